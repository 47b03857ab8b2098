"""Exception hierarchy.

Every error raised by the engine derives from :class:`SchoenError`.  The
CLI maps the three families below onto its exit codes:

* :class:`InputError` subclasses -> exit code 4 (bad surface, bad parameters)
* :class:`PrecisionExhausted` -> exit code 3
* :class:`VerificationMismatch` -> exit code 2
"""

from __future__ import annotations


class SchoenError(Exception):
    """Base class for all engine errors.

    ``context`` carries provenance (interval, disk index, operation, ...) so
    that failures deep inside a pipeline can be reported with their origin.
    """

    def __init__(self, message: str = "", **context):
        super().__init__(message)
        self.context = dict(context)

    def __str__(self) -> str:
        base = super().__str__()
        if self.context:
            extra = ", ".join(f"{k}={v}" for k, v in sorted(self.context.items()))
            return f"{base} [{extra}]"
        return base


class InputError(SchoenError):
    """Invalid user input (surface data, parameters, example ids)."""


class ComputationError(SchoenError):
    """A computation could not be completed with the given settings."""


# --- numerics -------------------------------------------------------------
class CenterMismatch(InputError):
    """Binary series operation on series expanded at different centers."""


class InvalidParameter(InputError):
    """A parameter makes a recurrence or formula undefined."""


class BranchPointAtCenter(InputError):
    """A fractional power was requested of a series vanishing at its center."""


class OutsideConvergence(ComputationError):
    """A truncated series was evaluated too far from its center."""


# --- surface --------------------------------------------------------------
class NonSemistablePoint(InputError):
    """g2 and the discriminant vanish simultaneously (additive fiber)."""


class SingularFiberPoint(InputError):
    """Fiberwise data requested at a point with a singular fiber."""


class InvalidSeedCenter(InputError):
    """The seed period series needs a point where both 1/J vanish."""


class InvalidSurface(InputError):
    """Weierstrass data violating the degree / nondegeneracy invariants."""


# --- ode ------------------------------------------------------------------
class NoODEFound(ComputationError):
    """No annihilating operator within the order / degree bounds."""


class NotRegularSingular(InputError):
    """Expansion requested at an irregular singular point."""


class SingularExpansionPoint(InputError):
    """Holomorphic basis requested at a singular point of the equation."""


# --- continuation ---------------------------------------------------------
class NotAdjacent(InputError):
    """Interval endpoints are not consecutive points of the singular set."""


class PrecisionExhausted(ComputationError):
    """Integer rounding or stability checks failed at the working precision."""


class ConsistencyFailure(ComputationError):
    """A structural identity (cocycle, telescoping sum, ...) failed."""

    def __init__(self, message: str = "", failed=(), **context):
        super().__init__(message, **context)
        self.failed = list(failed)


class DegenerateSamples(ComputationError):
    """Interpolation matrix singular for the chosen sample points."""


# --- zlattice -------------------------------------------------------------
class NotLocalModel(ComputationError):
    """A monodromy matrix is not conjugate to the expected local model."""


class OutsideSchoenHypotheses(InputError):
    """Fiber pair (I_n, I_m) not covered by the small-resolution formula."""


class NotASublattice(ComputationError):
    """A lattice basis is not integrally expressible in the larger lattice."""


# --- catalog / cli --------------------------------------------------------
class InvalidMobius(InputError):
    """Degenerate fractional-linear map (zero determinant)."""


class UnknownExample(InputError):
    """Example id not present in the catalog."""


class VerificationMismatch(SchoenError):
    """Computed data disagrees with reference data."""
