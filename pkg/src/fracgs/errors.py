"""Exception types shared across the solver suite.

Every failure mode raised by the library derives from FracgsError so CLI
code can map library failures onto exit codes without enumerating them.
"""


class FracgsError(Exception):
    """Base class for all errors raised by this package."""


class ConstraintViolation(FracgsError):
    """A parameter tuple violates one of the model inequalities.

    The message names the violated inequality, e.g. "lambda < sqrt(mu*nu) fails".
    """


class GridMismatch(FracgsError):
    """Fields passed to one operation do not live on the same grid."""


class NonpositiveT(FracgsError):
    """A fibering-scale argument t must be positive."""


class ZeroPair(FracgsError):
    """The Nehari projection is undefined for the zero pair."""


class NoConvergence(FracgsError):
    """An iterative solver hit its iteration cap before reaching tolerance."""


class NonpositiveProfile(FracgsError):
    """The fixed-point iteration left the positive cone (or was seeded outside it)."""


class InconsistentEstimate(FracgsError):
    """Two independent estimates of the same constant disagree beyond tolerance."""


class ExponentDegenerate(FracgsError):
    """(p+1)/(p-1) - N/(2s) vanished; threshold exponents are undefined."""


class NonpositiveA(FracgsError):
    """The mixing ratio a of the coupling gap function must be positive."""


class NoInteriorMinimum(FracgsError):
    """Minimisation of the coupling gap function returned a bracket endpoint."""


class NotSuperThreshold(FracgsError):
    """An operation requiring mu > mu0 was called in the sub-threshold regime."""


class ScaleClash(FracgsError):
    """Bubble scales are incompatible (cutoff radius vs box, or eps vs radius)."""


class NonMonotoneVerdicts(FracgsError):
    """Scan verdicts violate monotonicity of the ground-state level in lambda."""


class NonConverged(FracgsError):
    """A reported constant did not stabilise under grid/scale refinement."""


class SymmetryLost(FracgsError):
    """An iterate left the radial (even-symmetric) class beyond tolerance."""


class ConfigError(FracgsError):
    """The run configuration failed to parse or validate."""


class IoFailure(FracgsError):
    """Writing run artifacts to disk failed."""
