"""Exception hierarchy shared by all photonic modules."""


class PhotonicError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(PhotonicError, ValueError):
    """An input violates a documented precondition."""


class StructuralError(ValidationError):
    """Shapes or mode counts of the inputs are inconsistent."""


class BranchCutError(PhotonicError):
    """A matrix logarithm would have to choose a branch at the cut."""


class TruncationError(PhotonicError):
    """Fock-space truncation discarded more weight than allowed.

    Attributes:
        leakage: probability weight that fell outside the cutoff.
        suggested_cutoff: a cutoff expected to satisfy the bound, if known.
    """

    def __init__(self, message: str, leakage: float, suggested_cutoff: int | None = None):
        super().__init__(message)
        self.leakage = leakage
        self.suggested_cutoff = suggested_cutoff


class NumericalError(PhotonicError):
    """A numerical routine failed to reach its tolerance."""


class SingularTransferError(NumericalError):
    """The transfer matrix has a = 0 (total reflection limit)."""


class StepSizeError(ValidationError):
    """An explicit time step violates its stability limit."""


class DomainError(PhotonicError):
    """A grid or coordinate request lies outside its valid domain."""


class HorizonError(StructuralError):
    """Zero or several horizons, or a horizon with the wrong orientation."""


class UnsupportedConfigurationError(ValidationError):
    """The configuration is outside what the method supports."""


class EmptyPostselectionError(PhotonicError):
    """The requested postselection sector carries no weight."""


class DSLError(ValidationError):
    """A network description could not be parsed.

    Attributes:
        line: 1-based line number of the offending line.
    """

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line
