"""Reduction of a constant-speed product curve to a Lorentzian rectangle."""

import dataclasses
import logging
from collections.abc import Callable, Sequence
from typing import Any

import numpy as np
from cogent3.core.table import Table, make_table

from lorprod.causal import lorentz_length
from lorprod.exceptions import InvalidPathError, ReparametrizeFirstError
from lorprod.manifold._metric import GridLorentzMetric, gq_length
from lorprod.product import Orientation, ProductCurve, ProductSpacetime

logger = logging.getLogger(__name__)

SPEED_TOL = 1e-9


def base_speed(st: ProductSpacetime, curve: ProductCurve) -> float:
    """The constant base speed c of the spatial component.

    Raises
    ------
    InvalidPathError
        If consecutive nodes are neither equal nor adjacent.
    ReparametrizeFirstError
        If the base speed is not constant.
    """
    space = st.space
    lengths = np.array(
        [space.edge_length(x, y) for x, y in zip(curve.nodes[:-1], curve.nodes[1:], strict=True)],
    )
    speeds = lengths / np.diff(curve.params)
    if len(speeds) == 0:
        return 0.0
    c = float(speeds.max())
    if np.any(np.abs(speeds - c) > SPEED_TOL * max(c, 1.0)):
        msg = f"base speed varies from {speeds.min():.6g} to {c:.6g}; straighten the curve first"
        raise ReparametrizeFirstError(msg)
    return c


@dataclasses.dataclass(frozen=True, eq=False)
class QReduction:
    """A curve's rectangle metric, its graph curve and the two lengths.

    Attributes
    ----------
    metric : GridLorentzMetric
        F = h(s, beta_t)**2 and G = c**2 rho(s, beta_t)**2.
    graph : np.ndarray
        Vertices (alpha_t, t) of the graph curve.
    speed : float
        The base speed c.
    gq : float
        Length of the graph curve under the rectangle metric.
    lorentzian : float
        Lorentzian length of the product curve.
    """

    metric: GridLorentzMetric
    graph: np.ndarray
    speed: float
    gq: float
    lorentzian: float

    @property
    def residual(self) -> float:
        return abs(self.gq - self.lorentzian)

    def to_dict(self) -> dict[str, Any]:
        return {
            "metric": self.metric.to_dict(),
            "speed": self.speed,
            "gq_length": self.gq,
            "lorentz_length": self.lorentzian,
            "residual": self.residual,
        }


def _subdivide(values: np.ndarray, refine: int) -> np.ndarray:
    fractions = np.arange(refine) / refine
    inner = values[:-1, None] + fractions[None, :] * np.diff(values)[:, None]
    return np.append(inner.ravel(), values[-1])


def q_reduce(st: ProductSpacetime, curve: ProductCurve, refine: int = 1) -> QReduction:
    """Build the rectangle metric of a future directed constant-speed curve.

    Parameters
    ----------
    st : ProductSpacetime
        The product.
    curve : ProductCurve
        A future directed causal curve with constant base speed. Within a
        step rho and h are linear in the fraction of the edge travelled.
    refine : int, optional
        Subdivisions of each time cell and each curve step, by default 1.

    Returns
    -------
    QReduction
        The sampled metric and the residual between the graph curve's
        length and the Lorentzian length of the curve.
    """
    if refine < 1:
        msg = f"refine must be a positive integer, got {refine}"
        raise ValueError(msg)
    if curve.orientation is not Orientation.FUTURE:
        msg = "q_reduce needs a future directed curve"
        raise InvalidPathError(msg)
    c = base_speed(st, curve)
    fam = st.family
    space = st.space
    params = np.array(curve.params)
    times = np.array(curve.times)

    lo, hi = times[0], times[-1]
    inside = st.times[(st.times > lo) & (st.times < hi)]
    s_grid = _subdivide(np.concatenate(([lo], inside, [hi])), refine)
    t_grid = _subdivide(params, refine)

    step = np.minimum(np.searchsorted(params, t_grid, side="right") - 1, curve.num_steps - 1)
    frac = (t_grid - params[step]) / (params[step + 1] - params[step])
    src = np.array([space.index(curve.nodes[k]) for k in step])
    dst = np.array([space.index(curve.nodes[k + 1]) for k in step])

    f_values = np.empty((len(s_grid), len(t_grid)))
    g_values = np.empty_like(f_values)
    for i, s in enumerate(s_grid):
        rho = fam.rho_values(float(s))
        lapse = fam.lapse_values(float(s))
        f_values[i] = ((1 - frac) * lapse[src] + frac * lapse[dst]) ** 2
        g_values[i] = (c * ((1 - frac) * rho[src] + frac * rho[dst])) ** 2
    metric = GridLorentzMetric(s_grid, t_grid, f_values, g_values)

    graph = np.column_stack([np.interp(t_grid, params, times), t_grid])
    result = QReduction(metric, graph, c, gq_length(metric, graph), lorentz_length(st, curve))
    logger.debug("q_reduce: c=%g refine=%d residual=%.3g", c, refine, result.residual)
    return result


@dataclasses.dataclass(frozen=True, eq=False)
class ResidualSweep:
    """Residuals of q_reduce over a sequence of refined problems."""

    levels: tuple[int, ...]
    deltas: np.ndarray
    residuals: np.ndarray

    @property
    def order(self) -> float | None:
        """Fitted convergence order, None when a residual vanishes."""
        if len(self.levels) < 2 or np.any(self.residuals <= 0):
            return None
        slope, _ = np.polyfit(np.log(self.deltas), np.log(self.residuals), 1)
        return float(slope)

    def to_table(self) -> Table:
        return make_table(
            header=["delta", "residual"],
            data={"delta": self.deltas.tolist(), "residual": self.residuals.tolist()},
            title="q_reduce residual sweep",
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "levels": list(self.levels),
            "deltas": self.deltas.tolist(),
            "residuals": self.residuals.tolist(),
            "order": self.order,
        }


def residual_sweep(
    build: Callable[[int], tuple[ProductSpacetime, ProductCurve]],
    levels: Sequence[int] = (1, 2, 4, 8),
    refine: int = 1,
) -> ResidualSweep:
    """q_reduce residuals for problems built at increasing refinement levels.

    Parameters
    ----------
    build : Callable[[int], tuple[ProductSpacetime, ProductCurve]]
        Returns the product and the curve at a level.
    levels : Sequence[int], optional
        Refinement levels, by default (1, 2, 4, 8).
    refine : int, optional
        Passed on to q_reduce, by default 1.

    Returns
    -------
    ResidualSweep
        The largest time step of each curve with its residual.
    """
    deltas = []
    residuals = []
    for level in levels:
        st, curve = build(level)
        deltas.append(float(np.max(np.diff(curve.times))))
        residuals.append(q_reduce(st, curve, refine).residual)
    return ResidualSweep(tuple(levels), np.array(deltas), np.array(residuals))
