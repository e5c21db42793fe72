"""Quadratic transport of measures on the time line in the |.|_h metric."""

import dataclasses
import itertools
import math
from collections.abc import Sequence

import numpy as np
import ot

from lorprod.exceptions import SizeGuardError
from lorprod.transport._lapse import LapseLike, LapseScale, make_scale
from lorprod.transport._measure import DiscreteMeasure

MAX_CYCLIC_PAIRS = 8
_MASS_TOL = 1e-15


@dataclasses.dataclass(frozen=True, eq=False)
class TransportPlan:
    """The monotone coupling of two time measures and its W_h cost.

    Attributes
    ----------
    source, target : DiscreteMeasure
        Measures on times.
    matrix : np.ndarray
        Coupling masses, sources by targets.
    distance : float
        W_h, with the factor 1/2 in the quadratic cost.
    scale : LapseScale
        The map H.
    """

    source: DiscreteMeasure
    target: DiscreteMeasure
    matrix: np.ndarray
    distance: float
    scale: LapseScale

    def pairs(self) -> list[tuple[float, float, float]]:
        """(s, t, mass) for every charged pair."""
        i, j = np.nonzero(self.matrix > _MASS_TOL)
        return [
            (float(self.source.atoms[a]), float(self.target.atoms[b]), float(self.matrix[a, b]))
            for a, b in zip(i, j, strict=True)
        ]

    def is_increasing(self) -> bool:
        return all(s <= t for s, t, _ in self.pairs())

    def l2_length(self) -> float:
        """The L2 norm of |t - s|_h over the coupling, without the factor 1/2."""
        return math.sqrt(sum(m * self.scale.distance(s, t) ** 2 for s, t, m in self.pairs()))

    def interpolate(self, t: float) -> DiscreteMeasure:
        """The displacement interpolant nu_t, moving mass along |.|_h geodesics."""
        if not 0 <= t <= 1:
            msg = f"t must lie in [0, 1], got {t}"
            raise ValueError(msg)
        masses: dict[float, float] = {}
        for s, u, m in self.pairs():
            point = float(self.scale.geodesic(s, u, t))
            masses[point] = masses.get(point, 0.0) + m
        total = sum(masses.values())
        return DiscreteMeasure.from_mapping({k: v / total for k, v in sorted(masses.items())})


def wasserstein_h(nu0: DiscreteMeasure, nu1: DiscreteMeasure, lapse: LapseLike | LapseScale = 1.0) -> TransportPlan:
    """W_h between measures on I with its optimal (monotone) plan.

    Atoms are pushed through H, coupled by the one dimensional quadratic
    optimal transport and pulled back.
    """
    scale = make_scale(lapse)
    x = np.asarray(scale(np.array(nu0.atoms, dtype=float)), dtype=float)
    y = np.asarray(scale(np.array(nu1.atoms, dtype=float)), dtype=float)
    matrix = ot.emd_1d(x, y, np.asarray(nu0.weights), np.asarray(nu1.weights), metric="sqeuclidean")
    cost = float(np.sum(matrix * (x[:, None] - y[None, :]) ** 2))
    return TransportPlan(nu0, nu1, matrix, math.sqrt(0.5 * max(cost, 0.0)), scale)


@dataclasses.dataclass(slots=True, frozen=True)
class CyclicResult:
    passed: bool
    worst_permutation: tuple[int, ...] | None
    excess: float


def check_cyclic(
    pairs: Sequence[tuple[float, float]],
    p: float,
    lapse: LapseLike | LapseScale = 1.0,
    *,
    tol: float = 1e-12,
) -> CyclicResult:
    """Check sum |t_i - s_i|_h**p >= sum |t_i - s_sigma(i)|_h**p over permutations.

    Raises
    ------
    SizeGuardError
        For more than 8 pairs.
    """
    if len(pairs) > MAX_CYCLIC_PAIRS:
        msg = f"{len(pairs)} pairs exceed the permutation guard of {MAX_CYCLIC_PAIRS}"
        raise SizeGuardError(msg)
    scale = make_scale(lapse)
    sources = [s for s, _ in pairs]
    targets = [t for _, t in pairs]
    base = sum(scale.distance(s, t) ** p for s, t in pairs)
    worst: tuple[int, ...] | None = None
    excess = 0.0
    for perm in itertools.permutations(range(len(pairs))):
        value = sum(scale.distance(sources[perm[i]], targets[i]) ** p for i in range(len(pairs)))
        if value - base > excess:
            excess = value - base
            worst = perm
    passed = excess <= tol * max(1.0, base)
    return CyclicResult(passed, None if passed else worst, excess)
