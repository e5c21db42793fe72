"""Sampled two-dimensional Lorentzian metrics -F ds^2 + G dt^2."""

import dataclasses
import functools
from typing import Any

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from lorprod.exceptions import DomainError, UndefinedLengthError
from lorprod.product import lorentz_increment


@dataclasses.dataclass(frozen=True, eq=False)
class GridLorentzMetric:
    """The metric g_Q = -F ds^2 + G dt^2 on a rectangle, sampled on a grid.

    F and G are interpolated bilinearly between grid points.

    Attributes
    ----------
    s_grid : np.ndarray
        Increasing time coordinates.
    t_grid : np.ndarray
        Increasing curve-parameter coordinates.
    F : np.ndarray
        Positive samples of shape (len(s_grid), len(t_grid)).
    G : np.ndarray
        Nonnegative samples of the same shape.
    """

    s_grid: np.ndarray
    t_grid: np.ndarray
    F: np.ndarray
    G: np.ndarray

    def __post_init__(self) -> None:
        for name in ("s_grid", "t_grid"):
            grid = np.asarray(getattr(self, name), dtype=float)
            if grid.ndim != 1 or len(grid) < 2 or np.any(np.diff(grid) <= 0):
                msg = f"{name} must be strictly increasing with at least two points"
                raise ValueError(msg)
            object.__setattr__(self, name, grid)
        shape = (len(self.s_grid), len(self.t_grid))
        for name in ("F", "G"):
            values = np.asarray(getattr(self, name), dtype=float)
            if values.shape != shape:
                msg = f"{name} needs shape {shape}, got {values.shape}"
                raise ValueError(msg)
            object.__setattr__(self, name, values)
        if not np.all(self.F > 0):
            msg = "F must be positive"
            raise DomainError(msg)
        if not np.all(self.G >= 0):
            msg = "G must be nonnegative"
            raise DomainError(msg)

    @classmethod
    def from_functions(
        cls,
        s_grid: np.ndarray,
        t_grid: np.ndarray,
        f_func: Any,
        g_func: Any,
    ) -> "GridLorentzMetric":
        """Sample vectorised F(s, t) and G(s, t) on the grid."""
        s, t = np.meshgrid(np.asarray(s_grid, dtype=float), np.asarray(t_grid, dtype=float), indexing="ij")
        return cls(s_grid, t_grid, np.broadcast_to(f_func(s, t), s.shape), np.broadcast_to(g_func(s, t), s.shape))

    @functools.cached_property
    def _interpolators(self) -> tuple[RegularGridInterpolator, RegularGridInterpolator]:
        grid = (self.s_grid, self.t_grid)
        return (
            RegularGridInterpolator(grid, self.F, method="linear"),
            RegularGridInterpolator(grid, self.G, method="linear"),
        )

    def values(self, points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """F and G at (s, t) points of shape (m, 2)."""
        f_interp, g_interp = self._interpolators
        try:
            return f_interp(points), g_interp(points)
        except ValueError:
            msg = "points lie outside the rectangle"
            raise DomainError(msg) from None

    @property
    def lipschitz(self) -> dict[str, float]:
        """Sampled Lipschitz constants of F and G in each coordinate."""
        ds = np.diff(self.s_grid)[:, None]
        dt = np.diff(self.t_grid)[None, :]
        return {
            "F_s": float(np.max(np.abs(np.diff(self.F, axis=0)) / ds)),
            "F_t": float(np.max(np.abs(np.diff(self.F, axis=1)) / dt)),
            "G_s": float(np.max(np.abs(np.diff(self.G, axis=0)) / ds)),
            "G_t": float(np.max(np.abs(np.diff(self.G, axis=1)) / dt)),
        }

    def to_dict(self) -> dict[str, Any]:
        return {
            "s_range": [float(self.s_grid[0]), float(self.s_grid[-1])],
            "t_range": [float(self.t_grid[0]), float(self.t_grid[-1])],
            "shape": list(self.F.shape),
            "lipschitz": self.lipschitz,
        }


def gq_length(metric: GridLorentzMetric, points: np.ndarray) -> float:
    """Length sum of sqrt(F ds^2 - G dt^2) along a polygon in the rectangle.

    F and G are taken at step midpoints.

    Parameters
    ----------
    metric : GridLorentzMetric
        The sampled metric.
    points : np.ndarray
        Vertices (s_k, t_k) of shape (m, 2), with s nondecreasing.

    Raises
    ------
    UndefinedLengthError
        If a step is spacelike or runs backwards in s.
    """
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or points.shape[1] != 2:
        msg = f"points need shape (m, 2), got {points.shape}"
        raise ValueError(msg)
    if len(points) < 2:
        return 0.0
    steps = np.diff(points, axis=0)
    if np.any(steps[:, 0] < 0):
        msg = "the curve runs backwards in time"
        raise UndefinedLengthError(msg)
    f, g = metric.values(0.5 * (points[:-1] + points[1:]))
    margin, null, increment = lorentz_increment(np.sqrt(f) * steps[:, 0], np.sqrt(g) * np.abs(steps[:, 1]))
    bad = (margin < 0) & ~null
    if np.any(bad):
        k = int(np.argmax(bad))
        msg = f"step {k} is spacelike for g_Q (margin {margin[k]:.3g})"
        raise UndefinedLengthError(msg)
    return float(np.cumsum(increment)[-1])
