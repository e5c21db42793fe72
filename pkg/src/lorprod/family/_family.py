"""Time-dependent metric families d_s on the base space."""

from abc import ABC, abstractmethod
from collections.abc import Callable, Mapping
from typing import Any, NamedTuple

import numpy as np

from lorprod.exceptions import DomainError
from lorprod.family._forms import FieldForm, make_form
from lorprod.space import BaseSpace, Node, SpacePath

_CACHE_SIZE = 64
_POSITIVITY_SAMPLES = 33


class MetricFamily(ABC):
    """A family of length metrics d_s on a base space indexed by s in I."""

    def __init__(self, space: BaseSpace, interval: tuple[float, float]) -> None:
        s_min, s_max = (float(v) for v in interval)
        if not s_min < s_max:
            msg = f"time interval must satisfy s_min < s_max, got {interval}"
            raise ValueError(msg)
        self.space = space
        self.interval = (s_min, s_max)
        self._cache: dict[float, np.ndarray] = {}

    def check_time(self, s: float) -> None:
        s_min, s_max = self.interval
        if not s_min <= s <= s_max:
            msg = f"time {s} lies outside [{s_min}, {s_max}]"
            raise DomainError(msg)

    @property
    def time_independent(self) -> bool:
        return False

    @abstractmethod
    def _compute_matrix(self, s: float) -> np.ndarray: ...

    def matrix_at(self, s: float) -> np.ndarray:
        """All-pairs distances d_s in node order."""
        self.check_time(s)
        key = self.interval[0] if self.time_independent else float(s)
        matrix = self._cache.get(key)
        if matrix is None:
            if len(self._cache) >= _CACHE_SIZE:
                self._cache.clear()
            matrix = self._compute_matrix(key)
            self._cache[key] = matrix
        return matrix

    def distance_at(self, s: float, x: Node, y: Node) -> float:
        space = self.space
        return float(self.matrix_at(s)[space.index(x), space.index(y)])

    def __getstate__(self) -> dict[str, Any]:
        state = self.__dict__.copy()
        state["_cache"] = {}
        return state


class ConformalFamily(MetricFamily):
    """Conformal metrics d_s = d_{rho(s, .)} together with a lapse h.

    Parameters
    ----------
    space : BaseSpace
        The base space.
    rho : FieldForm | float | Mapping
        Conformal weight rho(s, x), resolved with make_form.
    lapse : FieldForm | float | Mapping, optional
        The lapse h(s, x), by default 1.0.
    interval : tuple[float, float], optional
        The time interval I, by default (0.0, 1.0).
    log_lipschitz : float | None, optional
        Declared Lipschitz constant of log rho in s, by default the constant
        the form declares.
    lapse_lipschitz : float | None, optional
        Declared Lipschitz constant of h in s, by default None (unknown).
    """

    def __init__(
        self,
        space: BaseSpace,
        rho: FieldForm | float | Mapping[str, Any],
        lapse: FieldForm | float | Mapping[str, Any] = 1.0,
        interval: tuple[float, float] = (0.0, 1.0),
        *,
        log_lipschitz: float | None = None,
        lapse_lipschitz: float | None = None,
    ) -> None:
        super().__init__(space, interval)
        self.rho = make_form(rho, space)
        self.lapse = make_form(lapse, space)
        self.log_lipschitz = self.rho.log_lipschitz if log_lipschitz is None else log_lipschitz
        self.lapse_lipschitz = lapse_lipschitz
        for s in np.linspace(*self.interval, _POSITIVITY_SAMPLES):
            self.rho_values(float(s))
            self.lapse_values(float(s))

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}(rho={self.rho!r}, lapse={self.lapse!r}, interval={self.interval})"

    @property
    def time_independent(self) -> bool:
        return self.rho.time_independent

    @property
    def continuous_in_time(self) -> bool:
        return self.rho.continuous_in_time and self.lapse.continuous_in_time

    def rho_values(self, s: float) -> np.ndarray:
        values = self.rho.values(s)
        if not np.all(values > 0):
            msg = f"conformal weight is not positive at s={s}"
            raise DomainError(msg)
        return values

    def lapse_values(self, s: float) -> np.ndarray:
        values = self.lapse.values(s)
        if not np.all(values > 0):
            msg = f"lapse is not positive at s={s}"
            raise DomainError(msg)
        return values

    def _compute_matrix(self, s: float) -> np.ndarray:
        return self.space.conformal_matrix(self.rho_values(s))

    def lapse_bounds(self, window: tuple[float, float] | None = None, samples: int = 65) -> tuple[float, float]:
        """Sampled (inf, sup) of h over a time window and all nodes."""
        lo, hi = self.interval if window is None else window
        values = np.array([self.lapse_values(float(s)) for s in np.linspace(lo, hi, samples)])
        return float(values.min()), float(values.max())

    def to_dict(self) -> dict[str, Any]:
        return {
            "rho": self.rho.to_dict(),
            "lapse": self.lapse.to_dict(),
            "interval": list(self.interval),
            "log_lipschitz": self.log_lipschitz,
            "lapse_lipschitz": self.lapse_lipschitz,
        }


class OracleFamily(MetricFamily):
    """A family given by an arbitrary distance oracle (s, x, y) -> d_s(x, y).

    There is no speed formula for such families, so they only support
    distance queries and regularity verification.
    """

    def __init__(
        self,
        space: BaseSpace,
        oracle: Callable[[float, Node, Node], float],
        interval: tuple[float, float] = (0.0, 1.0),
    ) -> None:
        super().__init__(space, interval)
        self.oracle = oracle

    def _compute_matrix(self, s: float) -> np.ndarray:
        nodes = self.space.nodes
        n = len(nodes)
        matrix = np.zeros((n, n))
        for i in range(n):
            for j in range(i + 1, n):
                matrix[i, j] = matrix[j, i] = float(self.oracle(s, nodes[i], nodes[j]))
        return matrix


def distance_at(fam: MetricFamily, s: float, x: Node, y: Node) -> float:
    """The distance d_s(x, y).

    Parameters
    ----------
    fam : MetricFamily
        The metric family.
    s : float
        A time in the family's interval.
    x, y : Node
        End points.

    Returns
    -------
    float
        d_s(x, y).
    """
    return fam.distance_at(s, x, y)


class SpeedValue(NamedTuple):
    """A generalized metric speed and whether it is a one-sided value."""

    value: float
    one_sided: bool


def generalized_speed(fam: ConformalFamily, path: SpacePath, s: float, t: float) -> SpeedValue:
    """The speed of a parametrised path measured in d_s.

    Parameters
    ----------
    fam : ConformalFamily
        The metric family.
    path : SpacePath
        The spatial trace. Inside an edge rho is interpolated linearly
        between the endpoint weights.
    s : float
        The time at which the metric is taken.
    t : float
        The curve parameter.

    Returns
    -------
    SpeedValue
        rho(s, beta_t) times the base speed. At an interior breakpoint the
        value of the following segment is returned and flagged one-sided.
    """
    fam.check_time(s)
    space = fam.space
    if path.num_segments == 0:
        return SpeedValue(0.0, one_sided=False)

    breaks = path.breakpoints(space)
    if not breaks[0] <= t <= breaks[-1]:
        msg = f"parameter {t} outside [{breaks[0]}, {breaks[-1]}]"
        raise DomainError(msg)

    k = min(int(np.searchsorted(breaks, t, side="right")) - 1, path.num_segments - 1)
    one_sided = bool((0 < k and t == breaks[k]) or t == breaks[-1])
    duration = breaks[k + 1] - breaks[k]
    lam = (t - breaks[k]) / duration
    u = space.index(path.nodes[k])
    v = space.index(path.nodes[k + 1])
    weights = fam.rho_values(s)
    rho = (1 - lam) * weights[u] + lam * weights[v]
    speed = space.edge_length(path.nodes[k], path.nodes[k + 1]) / duration
    return SpeedValue(float(rho * speed), one_sided)
