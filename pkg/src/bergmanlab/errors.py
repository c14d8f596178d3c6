"""Exception hierarchy shared by the numerical modules."""


class BergmanLabError(Exception):
    """Base class for all errors raised by bergmanlab."""


class StepSizeError(BergmanLabError):
    """Finite-difference step is too large (truncation) or too small (cancellation)."""


class TruncationError(BergmanLabError):
    """A truncated expansion cannot certify the requested tail tolerance.

    ``required`` carries the truncation order (or trace bound) that would
    be needed, when it can be estimated.
    """

    def __init__(self, message, required=None):
        super().__init__(message)
        self.required = required


class NotPositiveDefinite(BergmanLabError):
    """Gram matrix failed Cholesky factorisation."""


class CutoffInsufficient(BergmanLabError):
    """Series truncation error estimate exceeds the requested tolerance."""


class NonRealResult(BergmanLabError):
    """A quantity that must be real came out with a large imaginary part."""


class DimensionZero(BergmanLabError):
    """Operation needs a nonzero space of cusp forms."""


class DegenerateSamples(BergmanLabError):
    """Too few or repeated samples for a fit."""


class RegionEmpty(BergmanLabError):
    """Scan region contains no admissible points."""


class RefinementNonconvergent(BergmanLabError):
    """Local refinement left the scan region or failed to settle."""


class SpanDegenerate(BergmanLabError):
    """Input forms do not span anything useful (empty or mismatched)."""


class ZetaUnavailable(BergmanLabError):
    """Dedekind zeta value requested outside the supported range."""


class FactorizationOverflow(BergmanLabError):
    """Integer to factor exceeds the configured bound."""


class ConfigInvalid(BergmanLabError):
    """Experiment configuration fails validation."""
