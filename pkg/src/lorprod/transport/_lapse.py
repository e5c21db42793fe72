"""The isometry H of (I, |.|_h) onto an interval of the line."""

from collections.abc import Callable

import numpy as np
from scipy import integrate, optimize

LapseLike = Callable[[float], float] | float


class LapseScale:
    """H(s), the integral of a time-only lapse h from an origin.

    Parameters
    ----------
    lapse : Callable[[float], float] | float, optional
        The positive lapse h(s), by default 1.0.
    origin : float, optional
        H(origin) = 0, by default 0.0.
    """

    def __init__(self, lapse: "LapseLike | LapseScale" = 1.0, origin: float = 0.0) -> None:
        if isinstance(lapse, LapseScale):
            lapse = lapse.lapse
        if not callable(lapse) and not lapse > 0:
            msg = f"the lapse must be positive, got {lapse}"
            raise ValueError(msg)
        self.lapse = lapse
        self.origin = float(origin)

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}(lapse={self.lapse!r}, origin={self.origin})"

    @property
    def constant(self) -> bool:
        return not callable(self.lapse)

    def h(self, s: float) -> float:
        return float(self.lapse(s)) if callable(self.lapse) else float(self.lapse)

    def _scalar(self, s: float) -> float:
        if not callable(self.lapse):
            return self.lapse * (s - self.origin)
        value, _ = integrate.quad(self.lapse, self.origin, s, limit=200)
        return value

    def __call__(self, s: float | np.ndarray) -> float | np.ndarray:
        if np.ndim(s) == 0:
            return self._scalar(float(s))
        return np.array([self._scalar(float(v)) for v in np.ravel(s)]).reshape(np.shape(s))

    def _inverse_scalar(self, u: float) -> float:
        if not callable(self.lapse):
            return self.origin + u / self.lapse
        lo = hi = self.origin
        step = 1.0
        while self._scalar(lo) > u:
            lo -= step
            step *= 2
        step = 1.0
        while self._scalar(hi) < u:
            hi += step
            step *= 2
        if lo == hi:
            return lo
        return optimize.brentq(lambda s: self._scalar(s) - u, lo, hi, xtol=1e-14, rtol=1e-14)

    def inverse(self, u: float | np.ndarray) -> float | np.ndarray:
        if np.ndim(u) == 0:
            return self._inverse_scalar(float(u))
        return np.array([self._inverse_scalar(float(v)) for v in np.ravel(u)]).reshape(np.shape(u))

    def distance(self, s: float, t: float) -> float:
        """|t - s|_h."""
        if not callable(self.lapse):
            return self.lapse * abs(t - s)
        value, _ = integrate.quad(self.lapse, min(s, t), max(s, t), limit=200)
        return value

    def geodesic(self, a: float, b: float, t: float) -> float:
        """The |.|_h geodesic from a to b at parameter t."""
        if t in (0, 1):
            return a if t == 0 else b
        return self.inverse((1 - t) * self(a) + t * self(b))


def make_scale(lapse: "LapseLike | LapseScale") -> LapseScale:
    return lapse if isinstance(lapse, LapseScale) else LapseScale(lapse)

