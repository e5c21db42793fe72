"""Straightening causal curves into curves of constant Lorentzian length element."""

import dataclasses
import logging
import math
from typing import Any

import networkx as nx
import numpy as np
from cogent3.core.table import Table, make_table
from scipy import optimize

from lorprod.causal import lorentz_length
from lorprod.exceptions import BracketError, InvalidPathError, NotApplicableError, StraighteningError
from lorprod.family import ConformalFamily
from lorprod.ode._field import CaratheodoryField
from lorprod.ode._solve import ODESolution, solve_ivp
from lorprod.product import Orientation, ProductCurve, ProductSpacetime
from lorprod.space import Node, SpacePath, path_length

logger = logging.getLogger(__name__)

_ROOT_RTOL = 1e-14
_MONOTONE_SLACK = 1e-12


class TraceField(CaratheodoryField):
    """Phi_eps(y, t) = sqrt(v(y, t)**2 + eps**2) / h(y, beta_t) along a fixed trace.

    Inside an edge rho and h are linear in the edge fraction, so at the
    middle of a step they are the averages of the endpoint values.
    """

    def __init__(self, family: ConformalFamily, trace: SpacePath, start: float, epsilon: float) -> None:
        space = family.space
        self.family = family
        self.trace = trace
        self.epsilon = float(epsilon)
        self.grid = start + trace.breakpoints(space)
        self._u = np.array([space.index(n) for n in trace.nodes[:-1]], dtype=np.intp)
        self._v = np.array([space.index(n) for n in trace.nodes[1:]], dtype=np.intp)
        self._speed = trace.speeds(space)
        super().__init__(self._phi, domain=family.interval, breakpoints=self.grid)

    def _locate(self, t: float) -> tuple[int, float]:
        k = int(np.searchsorted(self.grid, t, side="right")) - 1
        k = min(max(k, 0), len(self._u) - 1)
        lam = (t - self.grid[k]) / (self.grid[k + 1] - self.grid[k])
        return k, lam

    def speed(self, s: float, t: float) -> float:
        """Generalized metric speed of the trace in d_s at parameter t."""
        k, lam = self._locate(t)
        rho = self.family.rho_values(s)
        return float(((1 - lam) * rho[self._u[k]] + lam * rho[self._v[k]]) * self._speed[k])

    def lapse(self, s: float, t: float) -> float:
        k, lam = self._locate(t)
        h = self.family.lapse_values(s)
        return float((1 - lam) * h[self._u[k]] + lam * h[self._v[k]])

    def _phi(self, y: float, t: float) -> float:
        v = self.speed(y, t)
        return math.sqrt(v * v + self.epsilon**2) / self.lapse(y, t)

    def elements(self, solution: ODESolution) -> np.ndarray:
        """(h dy)**2 - (v dt)**2 over dt**2 on each step, at step midpoints."""
        t = solution.grid
        y = solution.values
        dt = np.diff(t)
        dy = np.diff(y)
        out = np.empty(len(dt))
        for k in range(len(dt)):
            s_mid = 0.5 * (y[k] + y[k + 1])
            t_mid = 0.5 * (t[k] + t[k + 1])
            h = self.lapse(s_mid, t_mid)
            v = self.speed(s_mid, t_mid)
            out[k] = (h * dy[k]) ** 2 / dt[k] ** 2 - v * v
        return out


@dataclasses.dataclass(slots=True, frozen=True)
class StraightenResult:
    """A straightened curve with the root search record.

    Attributes
    ----------
    curve : ProductCurve
        The curve (y, beta) with the input endpoints.
    epsilon : float
        The constant length element eps_b.
    tau_input : float
        Lorentzian length of the input curve.
    evaluations : tuple[tuple[float, float], ...]
        (eps, y_eps(end) - target) for every evaluated eps, in order.
    solutions : tuple[ODESolution, ...]
        The solution for each evaluation.
    max_element_error : float
        Largest relative deviation of a step element from eps_b**2.
    """

    curve: ProductCurve
    epsilon: float
    tau_input: float
    evaluations: tuple[tuple[float, float], ...]
    solutions: tuple[ODESolution, ...]
    max_element_error: float

    @property
    def iterations(self) -> int:
        return len(self.evaluations)

    @property
    def tau(self) -> float:
        """Lorentzian length of the straightened curve."""
        return self.epsilon * (self.curve.params[-1] - self.curve.params[0])

    def trace_table(self) -> Table:
        """Every evaluated solution as rows (iterate, epsilon, t, y)."""
        data: dict[str, list[Any]] = {"iterate": [], "epsilon": [], "t": [], "y": []}
        for i, ((eps, _), sol) in enumerate(zip(self.evaluations, self.solutions, strict=True)):
            data["iterate"].extend([i] * len(sol.grid))
            data["epsilon"].extend([eps] * len(sol.grid))
            data["t"].extend(sol.grid.tolist())
            data["y"].extend(sol.values.tolist())
        return make_table(header=["iterate", "epsilon", "t", "y"], data=data, title="straightening iterates")

    def to_dict(self) -> dict[str, Any]:
        return {
            "epsilon": self.epsilon,
            "tau_input": self.tau_input,
            "tau": self.tau,
            "iterations": self.iterations,
            "max_element_error": self.max_element_error,
            "curve": self.curve.to_dict(),
        }


def conformal_geodesic(st: ProductSpacetime, s: float, start: Node, end: Node) -> list[Node]:
    """Nodes of a d_s shortest path from start to end."""
    space = st.space
    rho = st.family.rho_values(s)

    def cost(u: Node, v: Node, data: dict[str, Any]) -> float:
        return data["length"] * 0.5 * (rho[space.index(u)] + rho[space.index(v)])

    return nx.shortest_path(space.graph, start, end, weight=cost)


def spatial_trace(st: ProductSpacetime, curve: ProductCurve) -> SpacePath:
    """The spatial trace at constant base speed over the curve's time extent.

    Stays are dropped unless the curve never moves, in which case the
    curve's own time steps are kept. A step between non-adjacent nodes
    follows the d_s geodesic at its midpoint time.
    """
    space = st.space
    a, b = curve.times[0], curve.times[-1]
    moving = [curve.nodes[0]]
    for k, (x, y) in enumerate(zip(curve.nodes[:-1], curve.nodes[1:], strict=True)):
        if y == x:
            continue
        if space.graph.has_edge(x, y):
            moving.append(y)
        else:
            s_mid = 0.5 * (curve.times[k] + curve.times[k + 1])
            moving.extend(conformal_geodesic(st, s_mid, x, y)[1:])
    if len(moving) == 1:
        return SpacePath(curve.nodes, tuple(float(d) for d in np.diff(curve.times)))
    path = SpacePath(tuple(moving))
    return path.rescaled(space, path_length(space, path) / (b - a))


def straighten(st: ProductSpacetime, curve: ProductCurve, *, tol: float = 1e-8) -> StraightenResult:
    """Re-time a causal curve so its length element is a positive constant.

    The spatial trace is kept and the time component solves
    y' = Phi_eps(y, t), y(a) = a with eps chosen so that y reaches the end
    time b. The solution is the implicit midpoint rule on the trace grid,
    which gives every step the element eps**2 exactly.

    Parameters
    ----------
    st : ProductSpacetime
        The product.
    curve : ProductCurve
        A future directed causal curve with positive Lorentzian length.
    tol : float, optional
        Relative tolerance on the constancy of the step elements, by
        default 1e-8.

    Returns
    -------
    StraightenResult
        The timelike curve, eps_b and the record of the root search.

    Raises
    ------
    NotApplicableError
        If the curve has zero Lorentzian length.
    BracketError
        If no sign change of y_eps(end) - b is found.
    StraighteningError
        If y_eps(end) is found to decrease in eps, or the elements are
        not constant to within tol.
    """
    if curve.orientation is not Orientation.FUTURE:
        msg = "straightening needs a future directed curve"
        raise InvalidPathError(msg)
    tau = lorentz_length(st, curve)
    if not tau > 0:
        msg = "straightening needs a curve of positive Lorentzian length"
        raise NotApplicableError(msg)

    fam = st.family
    a, b = curve.times[0], curve.times[-1]
    trace = spatial_trace(st, curve)
    grid = a + trace.breakpoints(st.space)
    grid[-1] = b
    s_max = fam.interval[1]

    evaluations: list[tuple[float, float, bool]] = []
    solutions: list[ODESolution] = []

    def overshoot(eps: float) -> float:
        field = TraceField(fam, trace, a, eps)
        sol = solve_ivp(field, a, a, b, grid=grid, method="implicit_midpoint")
        value = (s_max - b) + (b - sol.grid[-1]) if sol.exited else sol.final - b
        evaluations.append((eps, value, sol.exited))
        solutions.append(sol)
        return value

    if overshoot(0.0) >= 0:
        msg = "the null re-timing already reaches the end time; the grid is too coarse to straighten"
        raise BracketError(msg)
    hi = tau / (b - a)
    cap = fam.lapse_bounds((a, b))[1] * (1 + 1e-6)
    while overshoot(hi) < 0:
        if hi >= cap:
            msg = f"no sign change for eps up to {cap:.6g}"
            raise BracketError(msg)
        hi = min(2 * hi, cap)

    eps_b = optimize.brentq(overshoot, 0.0, hi, xtol=1e-15, rtol=_ROOT_RTOL, maxiter=200)
    _check_monotone(evaluations)

    field = TraceField(fam, trace, a, eps_b)
    final = solve_ivp(field, a, a, b, grid=grid, method="implicit_midpoint")
    values = final.values.copy()
    values[-1] = b
    final = dataclasses.replace(final, values=values)
    elements = field.elements(final)
    error = float(np.max(np.abs(elements - eps_b**2)) / eps_b**2)
    if error > tol:
        msg = f"step elements deviate from eps_b**2 by {error:.3g} (relative)"
        raise StraighteningError(msg)

    logger.info("straightened curve: eps=%.10g after %d evaluations", eps_b, len(evaluations))
    straight = ProductCurve.from_samples(values, trace.nodes, params=grid)
    return StraightenResult(
        curve=straight,
        epsilon=float(eps_b),
        tau_input=tau,
        evaluations=tuple((e, v) for e, v, _ in evaluations),
        solutions=tuple(solutions),
        max_element_error=error,
    )


def _check_monotone(evaluations: list[tuple[float, float, bool]]) -> None:
    points = sorted((eps, value) for eps, value, exited in evaluations if not exited)
    for (e0, v0), (e1, v1) in zip(points[:-1], points[1:], strict=True):
        if v1 < v0 - _MONOTONE_SLACK * max(1.0, abs(v0)):
            msg = f"y_eps(end) decreases between eps={e0:.6g} and eps={e1:.6g}"
            raise StraighteningError(msg)
