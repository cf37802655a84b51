"""Exception taxonomy.

Two families matter for the CLI exit codes: ValidationFailure (bad input data,
exit 2) and NumericalFailure (an algorithm could not meet its contract, exit 3).
Config parse problems are ConfigParseError (exit 4).
"""


class HalfscatError(Exception):
    """Base class for all package errors."""


class ValidationFailure(HalfscatError):
    """Input data violates a structural requirement."""


class NumericalFailure(HalfscatError):
    """A numerical procedure failed to meet its contract."""


# --- validation family -------------------------------------------------------

class DimensionMismatch(ValidationFailure):
    pass


class NotHermitian(ValidationFailure):
    pass


class NotPositiveDefinite(ValidationFailure):
    pass


class NotUnitary(ValidationFailure):
    pass


class SelfadjointnessViolated(ValidationFailure):
    """A^dagger B is not Hermitian: the boundary pair is not selfadjoint."""


class RankDeficient(ValidationFailure):
    """A^dagger A + B^dagger B is not positive: the pair does not define
    n independent boundary conditions."""


class NotSelfadjoint(ValidationFailure):
    """Potential value fails V = V^dagger."""


class BadGrid(ValidationFailure):
    pass


class NegativeCoordinate(ValidationFailure):
    pass


class SingularTransform(ValidationFailure):
    pass


class NotDirichlet(ValidationFailure):
    """Operation requires a purely Dirichlet boundary condition."""


# --- numerical family --------------------------------------------------------

class IntegratorFailure(NumericalFailure):
    """Step size underflow or budget exhaustion in the ODE stepper."""


class ToleranceNotMet(NumericalFailure):
    pass


class QuadratureFailure(NumericalFailure):
    pass


class SingularJost(NumericalFailure):
    """J(k) numerically singular where an inverse is required."""


class SingularJ0(NumericalFailure):
    """B - ikA singular at the requested k (free bound-state point)."""


class ExtrapolationDivergence(NumericalFailure):
    """Successive small-k extrapolants of S do not contract."""


class EigenvalueNotPlusMinusOne(NumericalFailure):
    """An eigenvalue of S(0) is separated from both +1 and -1."""


class RefinementStall(NumericalFailure):
    """|det J| plateaued above tolerance during bound-state refinement."""


class PhaseStepTooLarge(NumericalFailure):
    """Adaptive phase sampling hit its doubling cap with steps still too big
    (a zero of det J sits on or very near the sampling contour)."""


class UnsettledTail(NumericalFailure):
    """S(k) did not settle to its large-k limit within the k_max budget."""


class BetaMatchFailure(NumericalFailure):
    """The decaying bound-state solution could not be matched to the Jost
    solution at the support end."""


class ConfigParseError(HalfscatError):
    """Problem configuration file is malformed (bad JSON, unknown keys,
    wrong types)."""


class MultiplicityMismatch(UserWarning):
    """Kernel dimension and winding number disagree at a bound state.

    Reported as a warning, not an exception: the winding number is trusted
    (it is integer-exact under the phase-step guard) but the disagreement is
    surfaced so the caller can inspect the kernel tolerance.
    """
