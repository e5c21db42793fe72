"""(K, N)-convexity of sampled entropy curves."""

import dataclasses
import math
from collections.abc import Sequence

import numpy as np

from lorprod.transport._sigma import sigma

SLACK_TOL = 1e-9


@dataclasses.dataclass(frozen=True, eq=False)
class ConvexityResult:
    """Slack of exp(-u/N) over its sigma-weighted chord at each sample.

    Attributes
    ----------
    times : np.ndarray
        Samples in [0, 1].
    slacks : np.ndarray
        exp(-u(t)/N) minus the distorted chord.
    passed : bool
        Every slack is at least -1e-9.
    worst_t : float
        Where the slack is smallest.
    """

    times: np.ndarray
    slacks: np.ndarray
    passed: bool
    worst_t: float

    @property
    def worst_slack(self) -> float:
        return float(self.slacks.min())


def _scaled(coef: float, value: float) -> float:
    # an infinite coefficient on a vanishing endpoint contributes nothing
    if math.isinf(coef):
        return 0.0 if value == 0 else math.inf
    return coef * value


def kn_convexity(
    u: Sequence[float] | np.ndarray,
    k: float,
    n: float,
    length: float,
    times: Sequence[float] | np.ndarray | None = None,
) -> ConvexityResult:
    """Check exp(-u(t)/N) >= sigma^{1-t}(T) exp(-u(0)/N) + sigma^t(T) exp(-u(1)/N).

    Parameters
    ----------
    u : Sequence[float]
        Entropy samples; +inf is allowed.
    k, n : float
        The curvature bound K and dimension N >= 1.
    length : float
        T, the L2 length of the plan.
    times : Sequence[float] | None, optional
        Sample parameters, by default uniform on [0, 1].
    """
    if n < 1:
        msg = f"N must be at least 1, got {n}"
        raise ValueError(msg)
    u = np.asarray(u, dtype=float)
    times = np.linspace(0, 1, len(u)) if times is None else np.asarray(times, dtype=float)
    if times[0] != 0 or times[-1] != 1:
        msg = "samples must start at t=0 and end at t=1"
        raise ValueError(msg)
    u_exp = np.exp(-u / n)
    kappa = k / n
    slacks = np.empty(len(u))
    for i, t in enumerate(times):
        chord = _scaled(sigma(kappa, 1 - t, length), u_exp[0]) + _scaled(sigma(kappa, t, length), u_exp[-1])
        slacks[i] = u_exp[i] - chord
    worst = int(np.argmin(slacks))
    return ConvexityResult(times, slacks, bool(slacks.min() >= -SLACK_TOL), float(times[worst]))
