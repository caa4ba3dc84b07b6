"""Exception taxonomy shared across the package."""


class BnlsError(Exception):
    """Base class for all package errors."""


class InvalidSpec(BnlsError):
    """Problem parameters violate the validity conditions."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("invalid problem spec: " + "; ".join(self.violations))


class DimensionTooSmall(BnlsError):
    """Threshold root undefined for N < 5."""


class SpaceMismatch(BnlsError):
    """Field is in the wrong representation (position vs spectral)."""


class NonFinite(BnlsError):
    """NaN or Inf encountered where finite data is required."""


class SpecMismatch(BnlsError):
    """Operation asked for family fields the spec does not carry."""


class ZeroField(BnlsError):
    """Operation undefined on the zero field."""


class BesselZeroFailure(BnlsError):
    """Newton iteration for a Bessel zero did not converge."""


class GridTooSmall(BnlsError):
    """Not enough nodes for the requested stencil."""


class RangeError(BnlsError):
    """Cutoff radius outside the grid."""


class NoConvergence(BnlsError):
    """Fixed-point iteration hit max_iter; carries the last residual."""

    def __init__(self, iterations, residual):
        self.iterations = iterations
        self.residual = residual
        super().__init__(
            f"no convergence after {iterations} iterations (residual {residual:.3e})"
        )


class StagnationDetected(BnlsError):
    """Petviashvili stabilizer oscillates over too wide a dynamic range."""


class CertificationFailure(BnlsError):
    """Ground-state certification identities failed."""

    def __init__(self, failures):
        self.failures = list(failures)
        super().__init__("certification failed: " + "; ".join(self.failures))


class NotApplicable(BnlsError):
    """Lemma hypothesis fails for this field (e.g. ME/MG not < 1)."""


class MissingDiagnostic(BnlsError):
    """Requested diagnostic was not recorded during the run."""


class RunTooShort(BnlsError):
    """Time series too short (or trivial) for the requested fit."""
