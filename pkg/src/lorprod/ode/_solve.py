"""Initial value problems and the comparison principle for Caratheodory fields."""

import dataclasses
import logging
from enum import Enum, unique
from typing import Literal

import numpy as np
from cogent3.core.table import Table, make_table

from lorprod.exceptions import DomainError
from lorprod.ode._field import CaratheodoryField

logger = logging.getLogger(__name__)

Method = Literal["euler", "implicit_midpoint", "rk4"]

DEFAULT_STEPS = 1000
_FIXED_POINT_ITERS = 100
_FIXED_POINT_TOL = 1e-14
_DIFFERENCE_STEP = 1e-6
_ALLOWANCE_FACTOR = 4.0


@dataclasses.dataclass(slots=True, frozen=True)
class ODESolution:
    """A piecewise linear solution on its breakpoint grid.

    Attributes
    ----------
    grid : np.ndarray
        Parameters t_k, including the breakpoints of the field.
    values : np.ndarray
        y(t_k).
    method : str
        The integrator used.
    step : float
        Largest grid spacing.
    exited : bool
        The solution left the domain and was truncated at the last grid
        point inside it.
    error_estimate : float | None
        Largest difference from a run on the halved grid, when requested.
    """

    grid: np.ndarray
    values: np.ndarray
    method: str
    step: float
    exited: bool = False
    error_estimate: float | None = None

    def __call__(self, t: float | np.ndarray) -> float | np.ndarray:
        return np.interp(t, self.grid, self.values)

    @property
    def final(self) -> float:
        return float(self.values[-1])

    def to_table(self) -> Table:
        return make_table(
            header=["t", "y"],
            data={"t": self.grid.tolist(), "y": self.values.tolist()},
            title=f"solution ({self.method})",
        )


def _implicit_midpoint(field: CaratheodoryField, y: float, t: float, h: float) -> float:
    mid = t + 0.5 * h
    nxt = y + h * field(field.clip(y), mid)
    for _ in range(_FIXED_POINT_ITERS):
        update = y + h * field(field.clip(0.5 * (y + nxt)), mid)
        if abs(update - nxt) <= _FIXED_POINT_TOL * max(1.0, abs(update)):
            return update
        nxt = update
    return nxt


def _step(field: CaratheodoryField, method: Method, y: float, t: float, h: float) -> float:
    if method == "euler":
        # t is sampled at the midpoint so jumps on grid points are not seen
        return y + h * field(y, t + 0.5 * h)
    if method == "implicit_midpoint":
        return _implicit_midpoint(field, y, t, h)
    k1 = field(y, t)
    k2 = field(field.clip(y + 0.5 * h * k1), t + 0.5 * h)
    k3 = field(field.clip(y + 0.5 * h * k2), t + 0.5 * h)
    k4 = field(field.clip(y + h * k3), t + h)
    return y + h * (k1 + 2 * k2 + 2 * k3 + k4) / 6


def _integrate(field: CaratheodoryField, method: Method, grid: np.ndarray, y0: float) -> tuple[np.ndarray, bool]:
    values = np.empty(len(grid))
    values[0] = y0
    for k in range(len(grid) - 1):
        nxt = _step(field, method, values[k], grid[k], grid[k + 1] - grid[k])
        if not field.in_domain(nxt) or not np.isfinite(nxt):
            logger.debug("solution left the domain at t=%s", grid[k + 1])
            return values[: k + 1], True
        values[k + 1] = nxt
    return values, False


def solve_ivp(
    field: CaratheodoryField,
    t0: float,
    y0: float,
    horizon: float,
    *,
    num_steps: int = DEFAULT_STEPS,
    grid: np.ndarray | None = None,
    method: Method | None = None,
    estimate_error: bool = False,
) -> ODESolution:
    """Solve y' = Phi(y, t), y(t0) = y0 up to the horizon.

    Parameters
    ----------
    field : CaratheodoryField
        The right-hand side.
    t0, y0 : float
        Initial data; y0 must lie in the field's domain.
    horizon : float
        Final parameter, greater than t0.
    num_steps : int, optional
        Uniform steps when no grid is given, by default 1000.
    grid : np.ndarray | None, optional
        Explicit grid from t0 to horizon.
    method : {"euler", "implicit_midpoint", "rk4"} | None, optional
        By default rk4 for fields continuous in t, otherwise Euler with
        t sampled at step midpoints.
    estimate_error : bool, optional
        Compare against a run on the halved grid, by default False.

    Returns
    -------
    ODESolution
        The solution up to the horizon, or truncated with the exit flag
        set if it leaves the domain.
    """
    if not field.in_domain(y0):
        msg = f"initial value {y0} outside the domain {field.domain}"
        raise DomainError(msg)
    if method is None:
        method = "rk4" if field.continuous_in_t else "euler"
    if grid is None:
        if not horizon > t0:
            msg = f"horizon {horizon} must exceed t0 = {t0}"
            raise ValueError(msg)
        grid = np.linspace(t0, horizon, num_steps + 1)
        inside = field.breakpoints[(field.breakpoints > t0) & (field.breakpoints < horizon)]
        grid = np.union1d(grid, inside)
    else:
        grid = np.asarray(grid, dtype=float)
        if grid[0] != t0 or grid[-1] != horizon or np.any(np.diff(grid) <= 0):
            msg = "grid must increase strictly from t0 to the horizon"
            raise ValueError(msg)

    values, exited = _integrate(field, method, grid, float(y0))
    error = None
    if estimate_error and not exited:
        fine = np.empty(2 * len(grid) - 1)
        fine[::2] = grid
        fine[1::2] = 0.5 * (grid[:-1] + grid[1:])
        fine_values, fine_exit = _integrate(field, method, fine, float(y0))
        if not fine_exit:
            error = float(np.max(np.abs(fine_values[::2] - values)))

    return ODESolution(
        grid=grid[: len(values)],
        values=values,
        method=method,
        step=float(np.max(np.diff(grid))),
        exited=exited,
        error_estimate=error,
    )


@unique
class Comparison(Enum):
    EQUAL = "equal"
    ORDERED = "ordered"
    HYPOTHESIS_FAILED = "hypothesis failed"
    VIOLATED = "violated"


@dataclasses.dataclass(slots=True, frozen=True)
class ComparisonResult:
    """Outcome of the comparison principle for a pair of curves.

    ``contact`` is the last parameter at which the curves agree; after it
    phi < psi.
    """

    verdict: Comparison
    contact: float | None
    max_gap: float
    reason: str | None = None


def _defect(field: CaratheodoryField, curve: ODESolution, grid: np.ndarray) -> np.ndarray:
    values = curve(grid)
    slopes = np.diff(values) / np.diff(grid)
    mids = 0.5 * (grid[:-1] + grid[1:])
    return slopes - np.array([field(field.clip(y), t) for y, t in zip(curve(mids), mids, strict=True)])


def _allowance(field: CaratheodoryField, curve: ODESolution, grid: np.ndarray) -> np.ndarray:
    """Defect a correct discrete solution leaves on each interval of grid.

    On a segment of length h the secant slope misses y' at the midpoint by
    about h**2 |y'''| / 24, and the interpolant misses y by about
    h**2 |y''| / 8, which Phi scales by its local Lipschitz quotient. Euler
    steps evaluate Phi at the starting value, half a step away from the
    midpoint value. Derivatives are estimated from the curve's own slopes,
    and a segment split by the other curve's grid is charged for the
    distance of each piece from the segment midpoint.
    """
    own, values = curve.grid, curve.values
    mids = 0.5 * (grid[:-1] + grid[1:])
    if len(own) < 3:
        return np.zeros(len(mids))
    h = np.diff(own)
    slopes = np.diff(values) / h
    padded = np.concatenate(([slopes[0]], slopes, [slopes[-1]]))
    turn = np.maximum(np.abs(np.diff(padded[:-1])), np.abs(np.diff(padded[1:])))
    bend = np.abs(padded[2:] - 2 * padded[1:-1] + padded[:-2])
    reach = h * turn / 8
    if curve.method == "euler":
        reach = np.maximum(reach, 0.5 * np.abs(np.diff(values)))
    local = np.empty(len(h))
    centres = zip(0.5 * (values[:-1] + values[1:]), 0.5 * (own[:-1] + own[1:]), strict=True)
    for k, (y, t) in enumerate(centres):
        r = max(reach[k], _DIFFERENCE_STEP * max(1.0, abs(y)))
        quotient = abs(field(field.clip(y + r), t) - field(field.clip(y - r), t)) / (2 * r)
        local[k] = quotient * reach[k] + bend[k] / 24
    segment = np.clip(np.searchsorted(own, mids, side="right") - 1, 0, len(h) - 1)
    offset = np.abs(mids - 0.5 * (own[:-1] + own[1:])[segment]) / h[segment]
    return _ALLOWANCE_FACTOR * (local[segment] + offset * turn[segment])


def compare(
    field: CaratheodoryField,
    phi: ODESolution,
    psi: ODESolution,
    *,
    tol: float = 1e-9,
) -> ComparisonResult:
    """Check the dichotomy of the comparison principle numerically.

    With phi(xi) <= psi(xi) and P phi <= P psi, where P y = y' - Phi(y, t),
    either phi < psi after the start, or the curves agree up to a contact
    parameter c and phi < psi after it. Defects are compared after
    removing the discretisation error each curve carries on its own grid.
    """
    lo = max(phi.grid[0], psi.grid[0])
    hi = min(phi.grid[-1], psi.grid[-1])
    if not hi > lo:
        msg = "curves do not share a parameter interval"
        raise ValueError(msg)
    grid = np.union1d(phi.grid, psi.grid)
    grid = grid[(grid >= lo) & (grid <= hi)]
    gap = np.asarray(psi(grid)) - np.asarray(phi(grid))
    scale = max(1.0, float(np.max(np.abs(psi(grid)))))

    if gap[0] < -tol * scale:
        return ComparisonResult(Comparison.HYPOTHESIS_FAILED, None, float(gap.min()), "phi starts above psi")
    excess = _defect(field, phi, grid) - _defect(field, psi, grid)
    excess -= _allowance(field, phi, grid) + _allowance(field, psi, grid)
    if np.any(excess > tol * scale):
        k = int(np.argmax(excess))
        return ComparisonResult(
            Comparison.HYPOTHESIS_FAILED,
            None,
            float(gap.min()),
            f"P phi > P psi near t={0.5 * (grid[k] + grid[k + 1])}",
        )

    touching = np.abs(gap) <= tol * scale
    if touching.all():
        return ComparisonResult(Comparison.EQUAL, float(grid[-1]), float(np.abs(gap).max()))
    first_apart = int(np.argmin(touching))
    contact = float(grid[first_apart - 1]) if first_apart > 0 else None
    if np.all(gap[first_apart:] > tol * scale):
        return ComparisonResult(Comparison.ORDERED, contact, float(gap.max()))
    return ComparisonResult(
        Comparison.VIOLATED,
        contact,
        float(gap.min()),
        "curves meet again after separating",
    )
