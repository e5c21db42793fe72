"""Contains lorprod exceptions."""


class LorprodError(Exception):
    """Base class for errors raised by lorprod."""


class UnreachableError(LorprodError, ValueError):
    """No path (or no causal path) joins the requested points."""


class InvalidPathError(LorprodError, ValueError):
    """A path or curve is malformed."""


class DomainError(LorprodError, ValueError):
    """An argument lies outside the domain where the quantity is defined."""


class SizeGuardError(LorprodError):
    """A computation would exceed a configured size guard."""

    def __init__(self, msg: str, *, suggested_coarsening: int | None = None) -> None:
        super().__init__(msg)
        self.suggested_coarsening = suggested_coarsening


class UndefinedLengthError(LorprodError, ValueError):
    """A Lorentzian length was requested for a non-causal curve."""


class NotApplicableError(LorprodError, ValueError):
    """The operation requires positive Lorentzian length."""


class BracketError(LorprodError):
    """The straightening root search could not bracket a solution."""


class StraighteningError(LorprodError):
    """The straightening map was found not to be monotone in epsilon."""


class HypothesisNotCertifiedError(LorprodError):
    """The metric family has not passed log-Lipschitz verification."""


class OutOfNeighbourhoodError(LorprodError, ValueError):
    """Endpoints lie outside the neighbourhood where a connector exists."""

    def __init__(self, msg: str, *, delta0: float) -> None:
        super().__init__(msg)
        self.delta0 = delta0


class ConnectorMarginError(LorprodError):
    """A connector was built but its length element falls below the guaranteed bound."""

    def __init__(self, msg: str, *, margin: float, bound: float) -> None:
        super().__init__(msg)
        self.margin = margin
        self.bound = bound


class InvalidRayError(LorprodError, ValueError):
    """A ray revisits a node and so does not escape."""


class ReparametrizeFirstError(LorprodError, ValueError):
    """The curve must have constant base speed."""


class NonVerticalPlanError(LorprodError, ValueError):
    """A transport case moves mass in space."""


class ScenarioError(LorprodError, ValueError):
    """A scenario document does not follow the schema."""
