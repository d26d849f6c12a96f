"""Exception types raised by the solver."""


class BianisoError(Exception):
    """Base class for all package errors."""


class QuadratureError(BianisoError):
    """A spectral-density or source quadrature failed to converge."""


class EliminationError(BianisoError):
    """The magnetization elimination matrix is singular or near-singular."""

    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class LongitudinalPivotError(BianisoError):
    """The 2x2 pivot of the longitudinal elimination vanishes."""

    def __init__(self, message, pivot=None):
        super().__init__(message)
        self.pivot = pivot


class ModeDegeneracyError(BianisoError):
    """The 4x4 propagation matrix is defective or near-defective."""


class BranchPointError(BianisoError):
    """Closed-form vacuum eigenvalues requested at their branch point."""


class StackGeometryError(BianisoError):
    """A layer stack violates its geometric or mode-split requirements."""


class MatchingError(BianisoError):
    """The interface-matching linear system is singular or ill-conditioned."""

    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class ExponentOverflowError(BianisoError):
    """A mode exponential would overflow double precision."""


class ResolutionError(BianisoError):
    """A sampling grid is too coarse for the requested evaluation."""


class StiffnessError(BianisoError):
    """The reference integrator cannot meet its error target."""


class EvanescentIncidenceError(BianisoError):
    """Scattering requested for an evanescent incident wave."""


class ConfigError(BianisoError):
    """A run configuration failed validation."""

    def __init__(self, message, diagnostics=()):
        super().__init__(message)
        self.diagnostics = list(diagnostics)
