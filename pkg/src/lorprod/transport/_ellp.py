"""The Lorentz-Wasserstein distance ell_p between measures on grid events."""

import dataclasses
import logging
from collections import defaultdict
from typing import Any, Literal

import numpy as np
import ot
from scipy import optimize

from lorprod.causal import CausalDAG, time_separation
from lorprod.exceptions import SizeGuardError
from lorprod.product import Event
from lorprod.transport._measure import DiscreteMeasure

logger = logging.getLogger(__name__)

MAX_LP_ATOMS = 8
_FACTOR_TOL = 1e-12


@dataclasses.dataclass(frozen=True, eq=False)
class EllPResult:
    """ell_p with an optimal causal coupling.

    Attributes
    ----------
    value : float
        ell_p(mu, nu); 0 when no causal coupling exists.
    coupling : np.ndarray | None
        Masses on (mu atom, nu atom) pairs.
    vertical : bool
        Whether the vertical monotone coupling was used.
    infeasible_sources, infeasible_targets : tuple[Event, ...]
        Atoms with no causally related atom on the other side.
    """

    value: float
    coupling: np.ndarray | None
    vertical: bool
    infeasible_sources: tuple[Event, ...] = ()
    infeasible_targets: tuple[Event, ...] = ()

    @property
    def feasible(self) -> bool:
        return self.coupling is not None

    def to_dict(self) -> dict[str, Any]:
        return {
            "value": self.value,
            "vertical": self.vertical,
            "feasible": self.feasible,
            "infeasible_sources": [list(e) for e in self.infeasible_sources],
            "infeasible_targets": [list(e) for e in self.infeasible_targets],
        }


def _factor(measure: DiscreteMeasure) -> tuple[dict[int, float], dict[Any, float]] | None:
    """Split a measure on events into time and node marginals if it is a product."""
    times: dict[int, float] = defaultdict(float)
    nodes: dict[Any, float] = defaultdict(float)
    for (layer, node), w in zip(measure.atoms, measure.weights, strict=True):
        times[layer] += w
        nodes[node] += w
    masses = dict(zip(measure.atoms, measure.weights, strict=True))
    for layer, a in times.items():
        for node, m in nodes.items():
            if abs(masses.get((layer, node), 0.0) - a * m) > _FACTOR_TOL:
                return None
    return dict(times), dict(nodes)


def _time_only_lapse(dag: CausalDAG, first: int, last: int) -> bool:
    """Whether h is constant across nodes at every time the steps from first to last sample."""
    times = dag.spacetime.times[first : last + 1]
    samples = np.concatenate((times, 0.5 * (times[:-1] + times[1:])))
    fam = dag.spacetime.family
    for s in samples:
        values = fam.lapse_values(float(s))
        if np.ptp(values) > _FACTOR_TOL * max(1.0, float(values.max())):
            return False
    return True


def _vertical(dag: CausalDAG, mu: DiscreteMeasure, nu: DiscreteMeasure, p: float) -> EllPResult | None:
    first = _factor(mu)
    second = _factor(nu)
    if first is None or second is None:
        return None
    (t0, m0), (t1, m1) = first, second
    if m0.keys() != m1.keys() or any(abs(m0[x] - m1[x]) > _FACTOR_TOL for x in m0):
        return None

    layers0 = sorted(t0)
    layers1 = sorted(t1)
    if not _time_only_lapse(dag, min(layers0[0], layers1[0]), max(layers0[-1], layers1[-1])):
        logger.debug("lapse varies across nodes; the vertical coupling need not be optimal")
        return None
    times = dag.spacetime.times
    plan = ot.emd_1d(
        times[layers0],
        times[layers1],
        np.array([t0[i] for i in layers0]),
        np.array([t1[j] for j in layers1]),
        metric="sqeuclidean",
    )
    index0 = {atom: k for k, atom in enumerate(mu.atoms)}
    index1 = {atom: k for k, atom in enumerate(nu.atoms)}
    coupling = np.zeros((len(mu), len(nu)))
    total = 0.0
    for a, b in zip(*np.nonzero(plan > 0), strict=True):
        i, j = layers0[a], layers1[b]
        if i > j:
            return None
        for node, m in m0.items():
            sep = time_separation(dag, Event(i, node), Event(j, node))
            if not sep.causal:
                return None
            coupling[index0[i, node], index1[j, node]] += plan[a, b] * m
            total += plan[a, b] * m * sep.tau**p
    return EllPResult(total ** (1 / p), coupling, vertical=True)


def ell_p(
    dag: CausalDAG,
    mu: DiscreteMeasure,
    nu: DiscreteMeasure,
    p: float,
    *,
    method: Literal["auto", "vertical", "general"] = "auto",
) -> EllPResult:
    """ell_p(mu, nu), the largest (sum tau**p d pi)**(1/p) over causal couplings.

    Product measures with equal node marginals, under a lapse that depends
    on time alone, use the vertical coupling when its monotone time coupling
    is causal. Otherwise the coupling polytope is searched by linear
    programming, for at most 8 atoms per side.

    Raises
    ------
    SizeGuardError
        If the general case has more than 8 atoms on a side.
    """
    if not 0 < p < 1:
        msg = f"p must lie in (0, 1), got {p}"
        raise ValueError(msg)
    if method != "general":
        result = _vertical(dag, mu, nu, p)
        if result is not None:
            return result
        if method == "vertical":
            msg = "the measures do not admit a vertical causal coupling"
            raise ValueError(msg)

    if len(mu) > MAX_LP_ATOMS or len(nu) > MAX_LP_ATOMS:
        msg = f"supports of {len(mu)} and {len(nu)} atoms exceed the guard of {MAX_LP_ATOMS}"
        raise SizeGuardError(msg)

    n, m = len(mu), len(nu)
    gain = np.zeros((n, m))
    causal = np.zeros((n, m), dtype=bool)
    for i, a in enumerate(mu.atoms):
        for j, b in enumerate(nu.atoms):
            sep = time_separation(dag, Event(*a), Event(*b))
            causal[i, j] = sep.causal
            gain[i, j] = sep.tau**p

    sources = tuple(Event(*a) for i, a in enumerate(mu.atoms) if mu.weights[i] > 0 and not causal[i].any())
    targets = tuple(Event(*b) for j, b in enumerate(nu.atoms) if nu.weights[j] > 0 and not causal[:, j].any())

    rows = np.zeros((n + m, n * m))
    for i in range(n):
        rows[i, i * m : (i + 1) * m] = 1
    for j in range(m):
        rows[n + j, j::m] = 1
    bounds = [(0, None) if c else (0, 0) for c in causal.ravel()]
    res = optimize.linprog(
        -gain.ravel(),
        A_eq=rows,
        b_eq=np.concatenate((mu.weights, nu.weights)),
        bounds=bounds,
        method="highs",
    )
    if res.status != 0:
        logger.info("no causal coupling: %s", res.message)
        return EllPResult(0.0, None, vertical=False, infeasible_sources=sources, infeasible_targets=targets)
    coupling = res.x.reshape(n, m)
    value = max(float(np.sum(coupling * gain)), 0.0)
    return EllPResult(value ** (1 / p), coupling, vertical=False)
