"""Exception hierarchy shared by all eqtomo modules."""

from __future__ import annotations


class EqtomoError(Exception):
    """Base class for every domain error raised by eqtomo."""


class InvalidConfiguration(EqtomoError, ValueError):
    pass


class SpectrumNegative(InvalidConfiguration):
    """An eigenvalue of the Gram matrix is negative beyond tolerance."""

    def __init__(self, index: int, value: float):
        self.index = index
        self.value = value
        super().__init__(
            f"lambda_{index} = {value:.6g} < 0: |alpha| exceeds the "
            "linear-independence bound for this (theta, dim)"
        )


class DimensionMismatch(EqtomoError, ValueError):
    pass


class ZeroVector(EqtomoError, ValueError):
    pass


class ZeroTrace(EqtomoError, ValueError):
    pass


class InvalidDensityMatrix(EqtomoError, ValueError):
    pass


class SingularSystem(EqtomoError, ArithmeticError):
    """A circulant system has a vanishing eigenvalue gamma_r (of diagonal k)."""

    def __init__(self, r: int, k: int | None = None):
        self.r = r
        self.k = k
        where = f"k={k}, r={r}" if k is not None else f"r={r}"
        super().__init__(f"circulant system is singular: gamma vanishes at {where}")

    def with_diagonal(self, k: int) -> "SingularSystem":
        return SingularSystem(self.r, k)


class DegenerateConfiguration(InvalidConfiguration):
    pass


class EvenDimension(InvalidConfiguration):
    def __init__(self, dim: int):
        self.dim = dim
        half = dim // 2
        super().__init__(
            f"dim={dim} is even: the imaginary parts Im(rho[p, q]) with "
            f"|p - q| = {half} do not appear in the equations system (every "
            "sine coefficient vanishes), so the state cannot be reconstructed; "
            "use an odd dimension"
        )


class OddDimension(InvalidConfiguration):
    pass


class NonFiniteValue(EqtomoError, ValueError):
    pass


class DocumentError(EqtomoError, ValueError):
    pass


class MalformedDocument(DocumentError):
    def __init__(self, message: str, position: int | None = None):
        self.position = position
        where = f" at position {position}" if position is not None else ""
        super().__init__(f"malformed document{where}: {message}")


class SchemaMismatch(DocumentError):
    def __init__(self, found, expected):
        self.found = found
        self.expected = expected
        super().__init__(f"schema mismatch: found {found!r}, expected {expected!r}")


class InvariantViolation(DocumentError):
    pass
