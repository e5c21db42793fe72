"""Concavity of slice densities and the constancy of slice measures."""

import dataclasses
import itertools
import logging
from collections.abc import Sequence
from typing import Any

import numpy as np
from cogent3.core.table import Table, make_table

from lorprod.space import Node
from lorprod.transport._convexity import SLACK_TOL, _scaled
from lorprod.transport._density import DensityField
from lorprod.transport._sigma import sigma

logger = logging.getLogger(__name__)

MAX_SAMPLES = 41
FRACTIONS = (0.25, 0.5, 0.75)
CONSTANT_TOL = 1e-12


@dataclasses.dataclass(frozen=True)
class NodeVerdict:
    """Concavity and constancy of g(., x)^(1/N) at one node."""

    node: Node
    passed: bool
    max_violation: float
    worst_triple: tuple[float, float, float] | None
    slope_bounds: tuple[float, ...]
    extrapolated_bound: float | None
    constancy: str

    def to_dict(self) -> dict[str, Any]:
        return {
            "node": str(self.node),
            "passed": self.passed,
            "max_violation": self.max_violation,
            "worst_triple": None if self.worst_triple is None else list(self.worst_triple),
            "slope_bounds": list(self.slope_bounds),
            "extrapolated_bound": self.extrapolated_bound,
            "constancy": self.constancy,
        }


@dataclasses.dataclass(frozen=True)
class RigidityReport:
    """Per-node concavity verdicts with the window-growth constancy verdict.

    Constancy on the whole line is reported as a bound extrapolated from
    the tested windows and is only evaluated for K = 0.
    """

    k: float
    n: float
    windows: tuple[tuple[float, float], ...]
    nodes: tuple[NodeVerdict, ...]
    constancy: str
    exceptional_mass: float

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.nodes)

    @property
    def failures(self) -> tuple[Node, ...]:
        return tuple(v.node for v in self.nodes if not v.passed)

    def to_table(self) -> Table:
        return make_table(
            header=["node", "concave", "max_violation", "constancy"],
            data={
                "node": [str(v.node) for v in self.nodes],
                "concave": [v.passed for v in self.nodes],
                "max_violation": [v.max_violation for v in self.nodes],
                "constancy": [v.constancy for v in self.nodes],
            },
            title=f"rigidity K={self.k} N={self.n}",
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "K": self.k,
            "N": self.n,
            "windows": [list(w) for w in self.windows],
            "passed": self.passed,
            "constancy": self.constancy,
            "exceptional_mass": self.exceptional_mass,
            "nodes": [v.to_dict() for v in self.nodes],
        }


def _window_samples(field: DensityField, lo: float, hi: float) -> np.ndarray:
    inside = field.times[(field.times > lo) & (field.times < hi)]
    samples = np.concatenate(([lo], inside, [hi]))
    if len(samples) > MAX_SAMPLES:
        keep = np.unique(np.linspace(0, len(samples) - 1, MAX_SAMPLES).round().astype(int))
        samples = samples[keep]
    return samples


def _concavity(
    field: DensityField,
    node: Node,
    k: float,
    n: float,
    samples: np.ndarray,
) -> tuple[float, tuple[float, float, float] | None]:
    """Largest excess of the sigma-weighted chord over g^(1/N) at a geodesic point."""
    kappa = k / n
    h_samples = np.asarray(field.scale(samples))
    u_samples = field.profile(node, samples) ** (1 / n)
    worst = -np.inf
    worst_triple = None
    for i, j in itertools.combinations(range(len(samples)), 2):
        theta = float(h_samples[j] - h_samples[i])
        for t in FRACTIONS:
            s_t = float(field.scale.inverse((1 - t) * h_samples[i] + t * h_samples[j]))
            u_t = float(field.profile(node, s_t)) ** (1 / n)
            chord = _scaled(sigma(kappa, 1 - t, theta), u_samples[i]) + _scaled(sigma(kappa, t, theta), u_samples[j])
            violation = chord - u_t
            if violation > worst:
                worst = violation
                worst_triple = (float(samples[i]), float(samples[j]), t)
    return float(worst), worst_triple


def _constancy(
    field: DensityField,
    node: Node,
    n: float,
    windows: Sequence[tuple[float, float]],
) -> tuple[tuple[float, ...], float | None, str]:
    bounds = []
    values = []
    for lo, hi in windows:
        u_lo, u_hi = field.profile(node, np.array([lo, hi])) ** (1 / n)
        bounds.append(float(max(u_lo, u_hi) / (hi - lo)))
        values.append(field.profile(node, _window_samples(field, lo, hi)) ** (1 / n))
    sampled = np.concatenate(values)
    extrapolated = None
    if len(windows) >= 2:
        inverse_width = np.array([1 / (hi - lo) for lo, hi in windows])
        if np.ptp(inverse_width) > 0:
            _, intercept = np.polyfit(inverse_width, bounds, 1)
            extrapolated = float(abs(intercept))
    if np.ptp(sampled) <= CONSTANT_TOL or (extrapolated is not None and extrapolated <= CONSTANT_TOL):
        return tuple(bounds), extrapolated, "constant"
    return tuple(bounds), extrapolated, f"undetermined at this window, slope bound {bounds[-1]:g}"


def concavity_rigidity(
    field: DensityField,
    k: float,
    n: float,
    windows: Sequence[tuple[float, float]] | None = None,
) -> RigidityReport:
    """Audit g(., x)^(1/N) for (K, N)-concavity along |.|_h geodesics.

    Parameters
    ----------
    field : DensityField
        The slice densities.
    k, n : float
        The curvature bound and dimension.
    windows : Sequence[tuple[float, float]] | None, optional
        Growing time windows, by default the whole range of the field.

    Returns
    -------
    RigidityReport
        For each node the worst violation over sampled (a, b, t) triples.
        When K = 0 the slope bound max(u(l), u(r)) / (r - l) of each window
        and its extrapolation to infinite width decide constancy.
    """
    if n < 1:
        msg = f"N must be at least 1, got {n}"
        raise ValueError(msg)
    windows = (field.window,) if windows is None else tuple((float(lo), float(hi)) for lo, hi in windows)
    for lo, hi in windows:
        field.check_window(lo, hi)
    windows = tuple(sorted(windows, key=lambda w: w[1] - w[0]))

    verdicts = []
    for node in field.space.nodes:
        worst, triple = -np.inf, None
        for lo, hi in windows:
            violation, where = _concavity(field, node, k, n, _window_samples(field, lo, hi))
            if violation > worst:
                worst, triple = violation, where
        passed = bool(worst <= SLACK_TOL)
        if k == 0:
            bounds, extrapolated, constancy = _constancy(field, node, n, windows)
        else:
            bounds, extrapolated, constancy = (), None, "not tested for K != 0"
        verdicts.append(NodeVerdict(node, passed, max(worst, 0.0), triple, bounds, extrapolated, constancy))

    exceptional = field.mass(v.node for v in verdicts if not v.passed)
    if k != 0:
        constancy = "not tested for K != 0"
    elif all(v.constancy == "constant" for v in verdicts):
        constancy = "constant"
    else:
        worst_bound = max(v.slope_bounds[-1] for v in verdicts if v.constancy != "constant")
        constancy = f"undetermined at this window, slope bound {worst_bound:g}"
    concave = sum(v.passed for v in verdicts)
    logger.info("rigidity: %d of %d nodes concave, %s", concave, len(verdicts), constancy)
    return RigidityReport(k, n, windows, tuple(verdicts), constancy, exceptional)
