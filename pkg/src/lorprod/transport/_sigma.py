import dataclasses
import math


@dataclasses.dataclass(slots=True, frozen=True)
class SigmaParams:
    """Arguments of the distortion coefficient sigma_kappa^t(theta)."""

    kappa: float
    t: float
    theta: float

    def __post_init__(self) -> None:
        if not 0 <= self.t <= 1:
            msg = f"t must lie in [0, 1], got {self.t}"
            raise ValueError(msg)


def s_kappa(kappa: float, theta: float) -> float:
    if kappa > 0:
        root = math.sqrt(kappa)
        return math.sin(root * theta) / root
    if kappa < 0:
        root = math.sqrt(-kappa)
        return math.sinh(root * theta) / root
    return theta


def sigma(kappa: float, t: float, theta: float) -> float:
    """The distortion coefficient sigma_kappa^t(theta).

    Returns math.inf when kappa * theta**2 >= pi**2.
    """
    params = SigmaParams(kappa, t, theta)
    curvature = params.kappa * params.theta**2
    if curvature == 0:
        return params.t
    if curvature >= math.pi**2:
        return math.inf
    return s_kappa(params.kappa, params.t * params.theta) / s_kappa(params.kappa, params.theta)
