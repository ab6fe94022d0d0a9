"""Exception taxonomy.

Numerical failure modes are first-class outcomes here: "could not certify at
the configured precision" (PrecisionLoss / PrecisionExhausted) is distinct
from ordinary misuse (UsageError) and from a computation that contradicts an
expected structural fact (DomainViolation).
"""


class ThetaLabError(Exception):
    """Base class for all library errors."""

    code = "error"


class NonConvergence(ThetaLabError):
    """Adaptive refinement exhausted its panel/step budget before tolerance."""

    code = "non_convergence"


class InvalidDecayBound(ThetaLabError):
    """No truncation radius satisfies the tolerance under the decay envelope."""

    code = "invalid_decay_bound"


class PrecisionLoss(ThetaLabError):
    """Error bounds swamp the margin of the quantity whose sign is needed."""

    code = "precision_loss"


class PrecisionExhausted(ThetaLabError):
    """The requested accuracy target is unreachable at the working precision."""

    code = "precision_exhausted"


class TailDominated(ThetaLabError):
    """Exponential growth of a factor defeats the kernel decay on the tail."""

    code = "tail_dominated"


class DomainViolation(ThetaLabError):
    """A computed value violates a precondition that theory guarantees."""

    code = "domain_violation"


class UnsupportedDerivativeOrder(ThetaLabError):
    """Requested derivative order exceeds what the evaluator supports."""

    code = "unsupported_derivative_order"


class HypothesisUnverified(ThetaLabError):
    """An operation was invoked without its prerequisite check having passed."""

    code = "hypothesis_unverified"


class PoleAtZero(ThetaLabError):
    """Evaluation point coincides with a real zero of the factored function."""

    code = "pole_at_zero"


class SeriesDivergence(ThetaLabError):
    """Series terms grow where a convergent tail estimate was required."""

    code = "series_divergence"


class UsageError(ThetaLabError):
    """Malformed arguments (CLI syntax, bad kernel string, bad ranges)."""

    code = "usage_error"
