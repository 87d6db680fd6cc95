"""Exception types raised across the library.

Every error that corresponds to a rejected precondition carries enough
context (offending indices, values) to reproduce the check by hand.
"""


class CoarseDimError(Exception):
    """Base class for all library errors."""


# -- metric validation -------------------------------------------------------

class NonSymmetric(CoarseDimError):
    def __init__(self, i: int, j: int, dij: float, dji: float):
        self.i, self.j = i, j
        super().__init__(f"dist[{i}][{j}]={dij!r} != dist[{j}][{i}]={dji!r}")


class NegativeEntry(CoarseDimError):
    def __init__(self, i: int, j: int, value: float):
        self.i, self.j = i, j
        super().__init__(f"dist[{i}][{j}]={value!r} is negative")


class NonzeroDiagonal(CoarseDimError):
    def __init__(self, i: int, value: float):
        self.i = i
        super().__init__(f"dist[{i}][{i}]={value!r} is not zero")


class TriangleViolation(CoarseDimError):
    def __init__(self, i: int, j: int, k: int, excess: float):
        self.i, self.j, self.k = i, j, k
        super().__init__(
            f"d({i},{k}) > d({i},{j}) + d({j},{k}) by {excess:.3g}")


class NonPositiveLambda(CoarseDimError):
    pass


class EmptySet(CoarseDimError):
    pass


# -- covering / Assouad ------------------------------------------------------

class ExactTooLarge(CoarseDimError):
    pass


class DegenerateGrid(CoarseDimError):
    pass


class BadOrdering(CoarseDimError):
    pass


# -- Nagata certificates -----------------------------------------------------

class TooLarge(CoarseDimError):
    pass


class NotSeparated(CoarseDimError):
    pass


class MismatchedParams(CoarseDimError):
    pass


class InputCertInvalid(CoarseDimError):
    pass


class EmptyWindow(CoarseDimError):
    pass


class GapsTooSmall(CoarseDimError):
    pass


class NotEnoughColors(CoarseDimError):
    pass


class EpsilonTooLarge(CoarseDimError):
    pass


class RadiusInfeasible(CoarseDimError):
    pass


class ResidualNonempty(CoarseDimError):
    def __init__(self, stage: int, residual: frozenset):
        self.stage = stage
        self.residual = residual
        super().__init__(
            f"residual nonempty after stage {stage}: {len(residual)} points left "
            "(r/R not small enough for this data)")


class BadScales(CoarseDimError):
    pass


# -- Gromov-Hausdorff --------------------------------------------------------

class MiddleMismatch(CoarseDimError):
    pass


class EmptyCorrespondence(CoarseDimError):
    pass


class CenterNotFound(CoarseDimError):
    def __init__(self, j: int):
        self.j = j
        super().__init__(
            f"cover center {j} has no close partner point; the extension does "
            "not witness the claimed epsilon")


class OracleFailure(CoarseDimError):
    pass


class WindowTooLarge(CoarseDimError):
    pass
