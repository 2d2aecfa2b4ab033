"""Exception hierarchy shared by all scissorlab modules."""


class ScissorlabError(Exception):
    """Base class for all scissorlab errors."""


class OccupationOutOfRange(ScissorlabError):
    """A requested photon number exceeds the cutoff of its mode."""


class CutoffTooSmall(ScissorlabError):
    """The truncated Fock space cannot hold the state to the requested tolerance."""

    def __init__(self, leakage: float, message: str | None = None):
        self.leakage = leakage
        super().__init__(message or f"truncation leakage {leakage:.3e} exceeds tolerance")


class DegenerateCat(ScissorlabError):
    """Cat-state construction produced a (numerically) zero-norm vector."""


class ModeCollision(ScissorlabError):
    """A two-mode element was given the same mode twice."""


class ModeOutOfRange(ScissorlabError):
    """A mode index does not exist in the Fock space."""


class ParameterOutOfRange(ScissorlabError):
    """A physical parameter is outside its valid range."""


class DimensionMismatch(ScissorlabError):
    """Two states or operators live on incompatible spaces."""


class NotNormalized(ScissorlabError):
    """An operation requiring a normalized state received an unnormalized one."""


class UnphysicalCovariance(ScissorlabError):
    """A covariance matrix violates the uncertainty relation."""


class ConvergenceFailure(ScissorlabError):
    """An iterative numerical procedure failed to converge."""


class UnsupportedOrder(ScissorlabError):
    """No circuit construction exists for the requested scissor order."""


class ZeroProbability(ScissorlabError):
    """Heralding on the requested pattern has numerically zero probability."""


class ConfigError(ScissorlabError):
    """An experiment configuration is invalid."""
