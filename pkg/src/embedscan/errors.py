"""Exception hierarchy shared by all solvers."""


class EmbedError(Exception):
    """Base class for every error raised by :mod:`embedscan`."""


class ValidationError(EmbedError, ValueError):
    pass


class NotSquare(ValidationError):
    def __init__(self, shape):
        super().__init__(f"matrix is not square: shape {shape}")
        self.shape = shape


class NegativeEntry(ValidationError):
    def __init__(self, i, j, value):
        super().__init__(f"entry ({i}, {j}) = {value!r} is negative")
        self.i, self.j, self.value = i, j, value


class RowSumViolation(ValidationError):
    def __init__(self, i, total):
        super().__init__(f"row {i} sums to {total!r}, expected 1")
        self.i, self.total = i, total


class ParseError(EmbedError, ValueError):
    def __init__(self, message, line=None):
        where = f" (line {line})" if line is not None else ""
        super().__init__(message + where)
        self.line = line


class DomainError(EmbedError, ValueError):
    pass


class SingularMatrix(EmbedError):
    pass


class UnsupportedMatrix(EmbedError):
    """The input lies outside the classes this library can decide."""


class UnsupportedDefective(UnsupportedMatrix):
    pass


class ComplexDefective(UnsupportedMatrix):
    pass


class IllConditioned(UnsupportedMatrix):
    pass


class NegativeRealEigenvalueOnBranchCut(EmbedError):
    pass


class InternalNumericalFailure(EmbedError, ArithmeticError):
    pass


class NonRealResult(InternalNumericalFailure):
    pass


class DegenerateScale(EmbedError, ValueError):
    pass
