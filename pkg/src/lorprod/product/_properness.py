"""Divergence diagnostic for the properness criterion along escaping rays."""

import dataclasses
import logging
from enum import Enum, unique
from typing import Any

import numpy as np
from cogent3.core.table import Table, make_table

from lorprod.exceptions import InvalidRayError
from lorprod.product._spacetime import ProductCurve, ProductSpacetime
from lorprod.product._steps import curve_geometry

logger = logging.getLogger(__name__)

RAY_NOTE = "checked on declared rays only"
_RATIO_TOL = 1e-3
_DECAY_MARGIN = 0.05


@unique
class Divergence(Enum):
    DIVERGENT = "divergent"
    BOUNDED = "bounded"


@dataclasses.dataclass(slots=True, frozen=True)
class DivergenceReport:
    """Partial sums of v/h along a ray with an extrapolated verdict.

    Attributes
    ----------
    partial_sums : tuple[float, ...]
        S_n for n = 1..len(ray) - 1.
    verdict : Divergence
        Whether the sums appear to diverge.
    rate : str | None
        Growth rate of divergent sums, such as "n^1.00" or "log n".
    bound : float | None
        Extrapolated limit of bounded sums.
    tail_ratio : float
        Median ratio of consecutive increments over the tail.
    decay_exponent : float | None
        q in a power law fit increments ~ k**-q, when fitted.
    note : str
        Reminder that only the declared rays were checked.
    """

    partial_sums: tuple[float, ...]
    verdict: Divergence
    rate: str | None
    bound: float | None
    tail_ratio: float
    decay_exponent: float | None
    note: str = RAY_NOTE

    def to_table(self) -> Table:
        return make_table(
            header=["n", "partial_sum"],
            data={
                "n": list(range(1, len(self.partial_sums) + 1)),
                "partial_sum": list(self.partial_sums),
            },
            title=f"properness diagnostic ({self.verdict.value})",
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "verdict": self.verdict.value,
            "rate": self.rate,
            "bound": self.bound,
            "tail_ratio": self.tail_ratio,
            "decay_exponent": self.decay_exponent,
            "note": self.note,
        }


def properness_diagnostic(st: ProductSpacetime, ray: ProductCurve) -> DivergenceReport:
    """Decide whether the weighted spatial length of a ray diverges.

    Parameters
    ----------
    st : ProductSpacetime
        The product.
    ray : ProductCurve
        An escaping ray. Its prefixes play the role of a growing family of
        paths, and its time component may be constant.

    Returns
    -------
    DivergenceReport
        Partial sums of dd/hbar along the ray and the verdict.
        Increments shrinking geometrically, or like k**-q with q > 1,
        give a bounded verdict with an extrapolated bound; anything
        else is divergent with a fitted rate.
    """
    if len(set(ray.nodes)) != len(ray.nodes):
        msg = "the ray revisits a node and does not escape"
        raise InvalidRayError(msg)
    if ray.num_steps < 4:
        msg = "a ray needs at least four steps for extrapolation"
        raise ValueError(msg)

    _, dd, hbar = curve_geometry(st, ray)
    increments = dd / hbar
    sums = np.cumsum(increments)

    tail = increments[len(increments) // 2 :]
    ratio = float(np.median(tail[1:] / tail[:-1]))
    decay = None
    if ratio < 1 - _RATIO_TOL:
        verdict = Divergence.BOUNDED
        bound = float(sums[-1] + increments[-1] * ratio / (1 - ratio))
        rate = None
    else:
        k = np.arange(len(increments) // 2, len(increments)) + 1.0
        slope, _ = np.polyfit(np.log(k), np.log(tail), 1)
        decay = float(-slope)
        if decay > 1 + _DECAY_MARGIN:
            verdict = Divergence.BOUNDED
            bound = float(sums[-1] + increments[-1] * len(increments) / (decay - 1))
            rate = None
        else:
            verdict = Divergence.DIVERGENT
            bound = None
            growth = 1 - decay
            rate = "log n" if abs(growth) <= _DECAY_MARGIN else f"n^{growth:.2f}"

    logger.info("properness: %s (rate=%s, bound=%s)", verdict.value, rate, bound)
    return DivergenceReport(
        partial_sums=tuple(float(v) for v in sums),
        verdict=verdict,
        rate=rate,
        bound=bound,
        tail_ratio=ratio,
        decay_exponent=decay,
    )
