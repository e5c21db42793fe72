"""Slice densities of a product measure and the entropy audits built on them."""

import dataclasses
import logging
import math
from collections.abc import Iterable, Mapping, Sequence
from typing import Any

import numpy as np
from cogent3.core.table import Table, make_table
from scipy import integrate

from lorprod.exceptions import DomainError, NonVerticalPlanError
from lorprod.space import BaseSpace, Node
from lorprod.transport._convexity import ConvexityResult, kn_convexity
from lorprod.transport._lapse import LapseLike, LapseScale

logger = logging.getLogger(__name__)

QUADRATURE_POINTS = 64
_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(QUADRATURE_POINTS)


def _window_average(func: Any, lo: float, hi: float) -> float:
    """Gauss-Legendre average of a vectorised function over [lo, hi]."""
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    return float(0.5 * np.sum(_WEIGHTS * func(mid + half * _NODES)))


class DensityField:
    """g(s, x), the density of the product measure against h ds x m.

    Parameters
    ----------
    space : BaseSpace
        The base space.
    times : Sequence[float]
        Increasing time samples; g is linear in s between them.
    values : np.ndarray
        Positive samples of shape (len(times), num_nodes).
    lapse : Callable[[float], float] | float, optional
        The time-only lapse h(s), by default 1.0.
    reference : Sequence[float] | None, optional
        The probability measure m on nodes, by default uniform.
    """

    def __init__(
        self,
        space: BaseSpace,
        times: Sequence[float] | np.ndarray,
        values: np.ndarray,
        lapse: LapseLike = 1.0,
        reference: Sequence[float] | np.ndarray | None = None,
    ) -> None:
        times = np.array(times, dtype=float)
        values = np.array(values, dtype=float)
        if times.ndim != 1 or len(times) < 2 or np.any(np.diff(times) <= 0):
            msg = "density times must be strictly increasing with at least two samples"
            raise ValueError(msg)
        if values.shape != (len(times), space.num_nodes):
            msg = f"density values need shape {(len(times), space.num_nodes)}, got {values.shape}"
            raise ValueError(msg)
        if not np.all(values > 0):
            msg = "density values must be positive"
            raise DomainError(msg)
        if reference is None:
            reference = np.full(space.num_nodes, 1 / space.num_nodes)
        reference = np.array(reference, dtype=float)
        if reference.shape != (space.num_nodes,) or np.any(reference <= 0) or abs(reference.sum() - 1) > 1e-12:
            msg = "the reference must be a positive probability vector on the nodes"
            raise ValueError(msg)
        self.space = space
        self.times = times
        self.values = values
        self.reference = reference
        self.scale = LapseScale(lapse, origin=float(times[0]))

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}(times={len(self.times)}, nodes={self.space.num_nodes})"

    @classmethod
    def from_function(
        cls,
        space: BaseSpace,
        times: Sequence[float] | np.ndarray,
        func: Any,
        lapse: LapseLike = 1.0,
        reference: Sequence[float] | None = None,
    ) -> "DensityField":
        """Sample g(s, x) = func(s, node) on the grid."""
        values = np.array([[func(float(s), x) for x in space.nodes] for s in times], dtype=float)
        return cls(space, times, values, lapse, reference)

    @classmethod
    def from_slices(
        cls,
        space: BaseSpace,
        times: Sequence[float] | np.ndarray,
        slices: np.ndarray,
        lapse: LapseLike = 1.0,
        normalizer: np.ndarray | None = None,
    ) -> "DensityField":
        """Build g from slice measures m_s and a normalizer G.

        The product measure is m_s(x) h(s) ds. With int G d(product) = 1,
        m(x) = int G(s, x) m_s(x) h(s) ds and g(s, x) = m_s(x) / m(x).
        """
        times = np.array(times, dtype=float)
        slices = np.array(slices, dtype=float)
        scale = LapseScale(lapse)
        h = np.array([scale.h(float(s)) for s in times])
        weighted = slices * h[:, None]
        if normalizer is None:
            total = integrate.trapezoid(weighted.sum(axis=1), times)
            normalizer = np.full(slices.shape, 1 / total)
        normalizer = np.array(normalizer, dtype=float)
        reference = integrate.trapezoid(normalizer * weighted, times, axis=0)
        if abs(reference.sum() - 1) > 1e-9:
            msg = f"the normalizer integrates to {reference.sum()!r}, not 1"
            raise ValueError(msg)
        reference = reference / reference.sum()
        return cls(space, times, slices / reference[None, :], lapse, reference)

    @property
    def window(self) -> tuple[float, float]:
        return float(self.times[0]), float(self.times[-1])

    def check_window(self, lo: float, hi: float) -> None:
        if not self.times[0] <= lo < hi <= self.times[-1]:
            msg = f"window [{lo}, {hi}] is not inside the density range {self.window}"
            raise DomainError(msg)

    def profile(self, node: Node, s: float | np.ndarray) -> np.ndarray:
        """g(s, node), linear between time samples."""
        return np.interp(s, self.times, self.values[:, self.space.index(node)])

    def mass(self, nodes: Iterable[Node]) -> float:
        return float(sum(self.reference[self.space.index(x)] for x in nodes))

    def density_bound(self, window: tuple[float, float] | None = None) -> float:
        """The constant C with 1/C <= g <= C on the window."""
        lo, hi = self.window if window is None else window
        inside = (self.times >= lo) & (self.times <= hi)
        values = self.values[inside]
        return float(max(values.max(), 1 / values.min()))

    def log_average(self, node: Node, lo: float, hi: float) -> float:
        """Average of log g(., node) over H-coordinates in [lo, hi]."""
        column = self.values[:, self.space.index(node)]

        def log_g(u: np.ndarray) -> np.ndarray:
            return np.log(np.interp(self.scale.inverse(u), self.times, column))

        return _window_average(log_g, lo, hi)


@dataclasses.dataclass(slots=True, frozen=True)
class WtcdCase:
    """Uniform measures in H-coordinates on two time windows, over a node region.

    The target region, when given, must equal the region: only vertical
    plans are supported.
    """

    start: tuple[float, float]
    end: tuple[float, float]
    region: tuple[Node, ...]
    target_region: tuple[Node, ...] | None = None
    name: str = "case"

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "WtcdCase":
        target = data.get("target_region")
        return cls(
            start=tuple(data["start"]),  # type: ignore[arg-type]
            end=tuple(data["end"]),  # type: ignore[arg-type]
            region=tuple(data["region"]),
            target_region=None if target is None else tuple(target),
            name=str(data.get("name", "case")),
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "start": list(self.start),
            "end": list(self.end),
            "region": list(self.region),
        }


def _resolve_case(field: DensityField, case: WtcdCase) -> tuple[np.ndarray, np.ndarray, tuple[Node, ...]]:
    if case.target_region is not None and set(case.target_region) != set(case.region):
        msg = f"case {case.name!r} moves mass in space; only vertical plans are supported"
        raise NonVerticalPlanError(msg)
    if not case.region:
        msg = f"case {case.name!r} has an empty region"
        raise ValueError(msg)
    region = []
    for x in case.region:
        if field.space.has_node(x):
            region.append(x)
            continue
        matches = [n for n in field.space.nodes if str(n) == str(x)]
        if not matches:
            msg = f"unknown node {x!r} in case {case.name!r}"
            raise ValueError(msg)
        region.append(matches[0])
    for lo, hi in (case.start, case.end):
        field.check_window(lo, hi)
    h0 = np.array([field.scale(case.start[0]), field.scale(case.start[1])])
    h1 = np.array([field.scale(case.end[0]), field.scale(case.end[1])])
    if h1[0] < h0[0] or h1[1] < h0[1]:
        msg = f"case {case.name!r} does not transport along increasing curves"
        raise NonVerticalPlanError(msg)
    return h0, h1, tuple(region)


def _window_at(h0: np.ndarray, h1: np.ndarray, t: float) -> tuple[float, float]:
    lo, hi = (1 - t) * h0 + t * h1
    return float(lo), float(hi)


def node_entropy(field: DensityField, case: WtcdCase, node: Node, t: float) -> float:
    """e_x(t), the entropy of nu_t against g(., x) |.|_h."""
    h0, h1, _ = _resolve_case(field, case)
    lo, hi = _window_at(h0, h1, t)
    return -math.log(hi - lo) - field.log_average(node, lo, hi)


def region_entropy(field: DensityField, case: WtcdCase, t: float) -> float:
    """e_B(t), the entropy of nu_t x m|_B / m(B) against the product measure."""
    h0, h1, region = _resolve_case(field, case)
    lo, hi = _window_at(h0, h1, t)
    width = hi - lo
    mass_b = field.mass(region)
    points = 0.5 * (lo + hi) + 0.5 * width * _NODES
    weights = 0.5 * width * _WEIGHTS
    s = field.scale.inverse(points)
    total = 0.0
    for x in region:
        g = field.profile(x, s)
        rho = 1 / (width * g * mass_b)
        total += field.reference[field.space.index(x)] * float(np.sum(weights * g * rho * np.log(rho)))
    return total


@dataclasses.dataclass(frozen=True, eq=False)
class DecompositionResult:
    """Both sides of e_B(t) = mean over B of e_x(t) - log m(B)."""

    times: np.ndarray
    region_entropy: np.ndarray
    averaged_entropy: np.ndarray

    @property
    def residual(self) -> float:
        return float(np.max(np.abs(self.region_entropy - self.averaged_entropy)))


def entropy_decomposition(field: DensityField, case: WtcdCase, num_times: int = 11) -> DecompositionResult:
    """Evaluate both sides of the entropy decomposition on a uniform t grid."""
    _, _, region = _resolve_case(field, case)
    mass_b = field.mass(region)
    times = np.linspace(0, 1, num_times)
    left = np.array([region_entropy(field, case, float(t)) for t in times])
    right = np.empty(num_times)
    for k, t in enumerate(times):
        average = sum(
            field.reference[field.space.index(x)] * node_entropy(field, case, x, float(t)) for x in region
        )
        right[k] = average / mass_b - math.log(mass_b)
    return DecompositionResult(times, left, right)


def plan_lengths(field: DensityField, case: WtcdCase, p: float) -> tuple[float, float]:
    """(ell_p, D) of the vertical plan: the L^p and L^2 norms of |alpha_1 - alpha_0|_h."""
    h0, h1, _ = _resolve_case(field, case)
    q = 0.5 + 0.5 * _NODES
    weights = 0.5 * _WEIGHTS
    moved = (h1[0] - h0[0]) + q * ((h1[1] - h1[0]) - (h0[1] - h0[0]))
    ell = float(np.sum(weights * moved**p)) ** (1 / p)
    length = math.sqrt(float(np.sum(weights * moved**2)))
    return ell, length


@dataclasses.dataclass(frozen=True, eq=False)
class CaseResult:
    case: WtcdCase
    times: np.ndarray
    entropy: np.ndarray
    ell_p: float
    length: float
    convexity: ConvexityResult

    @property
    def passed(self) -> bool:
        return self.convexity.passed

    def entropy_table(self) -> Table:
        return make_table(
            header=["t", "entropy", "slack"],
            data={
                "t": self.times.tolist(),
                "entropy": self.entropy.tolist(),
                "slack": self.convexity.slacks.tolist(),
            },
            title=f"entropy curve {self.case.name}",
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "case": self.case.to_dict(),
            "passed": self.passed,
            "ell_p": self.ell_p,
            "D": self.length,
            "worst_t": self.convexity.worst_t,
            "worst_slack": self.convexity.worst_slack,
            "slacks": self.convexity.slacks.tolist(),
        }


@dataclasses.dataclass(frozen=True, eq=False)
class WtcdReport:
    k: float
    n: float
    p: float
    cases: tuple[CaseResult, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.cases)

    def to_table(self) -> Table:
        return make_table(
            header=["case", "passed", "worst_t", "worst_slack", "D"],
            data={
                "case": [c.case.name for c in self.cases],
                "passed": [c.passed for c in self.cases],
                "worst_t": [c.convexity.worst_t for c in self.cases],
                "worst_slack": [c.convexity.worst_slack for c in self.cases],
                "D": [c.length for c in self.cases],
            },
            title=f"wTCD probe K={self.k} N={self.n}",
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "K": self.k,
            "N": self.n,
            "p": self.p,
            "passed": self.passed,
            "cases": [c.to_dict() for c in self.cases],
        }


def wtcd_probe(
    field: DensityField,
    cases: Iterable[WtcdCase],
    k: float,
    n: float,
    p: float = 0.5,
    num_times: int = 21,
) -> WtcdReport:
    """Test (K, N)-convexity of e_B along the vertical plan of each case.

    Parameters
    ----------
    field : DensityField
        The densities g and the lapse.
    cases : Iterable[WtcdCase]
        Window pairs with their regions.
    k, n : float
        The curvature bound and dimension.
    p : float, optional
        Exponent of the reported ell_p, by default 0.5.
    num_times : int, optional
        Samples of t in [0, 1], by default 21.

    Raises
    ------
    NonVerticalPlanError
        If a case moves mass in space or its plan is not increasing.
    """
    if not 0 < p < 1:
        msg = f"p must lie in (0, 1), got {p}"
        raise ValueError(msg)
    times = np.linspace(0, 1, num_times)
    results = []
    for case in cases:
        entropy = np.array([region_entropy(field, case, float(t)) for t in times])
        ell, length = plan_lengths(field, case, p)
        convexity = kn_convexity(entropy, k, n, length, times)
        verdict = "pass" if convexity.passed else "fail"
        logger.info("wTCD case %s: %s (worst slack %.3g)", case.name, verdict, convexity.worst_slack)
        results.append(CaseResult(case, times, entropy, ell, length, convexity))
    return WtcdReport(k, n, p, tuple(results))


def delta_smooth(
    field: DensityField,
    node: Node,
    delta: float,
    n: float = 1.0,
    points: Sequence[float] | np.ndarray | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """u_x^delta(a) = exp(mean of log g(., x) over the |.|_h ball of radius delta about a, / N).

    Returns the evaluation points, by default the time samples at least
    delta from the ends, and the smoothed values.

    Raises
    ------
    DomainError
        If delta is not below half the window or a point is too close to
        an end.
    """
    h_lo, h_hi = field.scale(field.window[0]), field.scale(field.window[1])
    if not 0 < delta < 0.5 * (h_hi - h_lo):
        msg = f"delta = {delta} must be positive and below half the window"
        raise DomainError(msg)
    if points is None:
        h_times = np.asarray(field.scale(field.times))
        points = field.times[(h_times - delta >= h_lo) & (h_times + delta <= h_hi)]
    points = np.asarray(points, dtype=float)
    values = np.empty(len(points))
    for k, a in enumerate(points):
        center = float(field.scale(float(a)))
        if center - delta < h_lo - 1e-12 or center + delta > h_hi + 1e-12:
            msg = f"the delta ball about {a} leaves the window"
            raise DomainError(msg)
        lo = max(center - delta, h_lo)
        hi = min(center + delta, h_hi)
        values[k] = math.exp(field.log_average(node, lo, hi) / n)
    return points, values
