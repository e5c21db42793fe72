"""Right-hand sides y' = Phi(y, t) that are Lipschitz in y and integrable in t."""

import math
from collections.abc import Callable, Iterable

import numpy as np
from scipy import integrate

from lorprod.util import make_rng

FieldFunc = Callable[[float, float], float]


class CaratheodoryField:
    """A Caratheodory-Lipschitz field.

    Parameters
    ----------
    func : Callable[[float, float], float]
        Phi(y, t), continuous in y for each t.
    lipschitz : Callable[[float], float] | float | None, optional
        Integrable bound L(t) with |Phi(y, t) - Phi(y', t)| <= L(t)|y - y'|,
        by default None (undeclared).
    domain : tuple[float, float], optional
        Admissible values of y, by default the real line.
    continuous_in_t : bool, optional
        Whether Phi is continuous in t, enabling higher order integration,
        by default False.
    breakpoints : Iterable[float], optional
        Parameters at which Phi may jump in t. Integration grids include
        them.
    """

    def __init__(
        self,
        func: FieldFunc,
        lipschitz: Callable[[float], float] | float | None = None,
        domain: tuple[float, float] = (-math.inf, math.inf),
        *,
        continuous_in_t: bool = False,
        breakpoints: Iterable[float] = (),
    ) -> None:
        lo, hi = domain
        if not lo < hi:
            msg = f"empty domain {domain}"
            raise ValueError(msg)
        self.func = func
        self.lipschitz = lipschitz
        self.domain = (float(lo), float(hi))
        self.continuous_in_t = continuous_in_t
        self.breakpoints = np.unique(np.asarray(list(breakpoints), dtype=float))

    def __call__(self, y: float, t: float) -> float:
        return float(self.func(y, t))

    def in_domain(self, y: float) -> bool:
        return self.domain[0] <= y <= self.domain[1]

    def clip(self, y: float) -> float:
        return min(max(y, self.domain[0]), self.domain[1])

    def lipschitz_bound(self, t: float) -> float:
        if self.lipschitz is None:
            return math.inf
        if callable(self.lipschitz):
            return float(self.lipschitz(t))
        return float(self.lipschitz)

    def integrated_lipschitz(self, t0: float, t1: float) -> float:
        """The integral of L over [t0, t1]."""
        if self.lipschitz is None:
            return math.inf
        if not callable(self.lipschitz):
            return float(self.lipschitz) * abs(t1 - t0)
        points = self.breakpoints[(self.breakpoints > min(t0, t1)) & (self.breakpoints < max(t0, t1))]
        value, _ = integrate.quad(self.lipschitz, t0, t1, points=points if len(points) else None, limit=200)
        return abs(value)

    def sampled_quotient(
        self,
        times: Iterable[float],
        y_range: tuple[float, float],
        samples: int = 16,
        seed: int | None = None,
    ) -> float:
        """Largest |Phi(y,t) - Phi(y',t)| / (L(t)|y - y'|) over random draws.

        A value at most 1 means the declared bound dominates the sampled
        difference quotients.
        """
        rng = make_rng(seed)
        worst = 0.0
        for t in times:
            bound = self.lipschitz_bound(t)
            ys = rng.uniform(*y_range, size=(samples, 2))
            for y, y2 in ys:
                if y == y2:
                    continue
                quotient = abs(self(y, t) - self(y2, t)) / abs(y - y2)
                if quotient == 0:
                    continue
                worst = max(worst, quotient / bound if bound > 0 else math.inf)
        return worst
