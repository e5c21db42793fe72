"""The layered causal graph of a discretised product."""

import dataclasses
import logging
import math

import numpy as np

from lorprod.exceptions import SizeGuardError
from lorprod.product import Event, ProductSpacetime, lorentz_increment, step_geometry

logger = logging.getLogger(__name__)

MAX_STEPS = 50_000_000
MAX_WIDE_STEPS = 1_000_000


@dataclasses.dataclass(slots=True, frozen=True)
class LayerSteps:
    """Admissible steps from layer i to layer i + 1, sorted by (src, dst)."""

    src: np.ndarray
    dst: np.ndarray
    distance: np.ndarray
    lapse: np.ndarray
    span: np.ndarray
    increment: np.ndarray
    timelike: np.ndarray

    def __len__(self) -> int:
        return len(self.src)


class CausalDAG:
    """Events (layer, node) joined by admissible causal steps.

    Use build_causal_dag to construct one.
    """

    def __init__(self, spacetime: ProductSpacetime, layers: tuple[LayerSteps, ...], *, conservative: bool) -> None:
        self.spacetime = spacetime
        self.layers = layers
        self.conservative = conservative
        self._tables: dict[Event, object] = {}

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}(layers={len(self.layers)}, steps={self.step_count})"

    @property
    def step_count(self) -> int:
        return sum(len(layer) for layer in self.layers)

    def successors(self, event: Event) -> list[tuple[Event, float]]:
        """Admissible steps out of an event with their length increments."""
        st = self.spacetime
        if event.layer >= st.num_layers:
            return []
        steps = self.layers[event.layer]
        x = st.space.index(event.node)
        lo, hi = np.searchsorted(steps.src, [x, x + 1])
        nodes = st.space.nodes
        return [
            (Event(event.layer + 1, nodes[int(steps.dst[k])]), float(steps.increment[k]))
            for k in range(lo, hi)
        ]


def build_causal_dag(
    st: ProductSpacetime,
    *,
    conservative: bool = False,
    max_steps: int = MAX_STEPS,
    max_wide_steps: int = MAX_WIDE_STEPS,
) -> CausalDAG:
    """Build the causal graph of a discretised product.

    Parameters
    ----------
    st : ProductSpacetime
        The product, its time grid and hop radius.
    conservative : bool, optional
        Use worst-case distances and lapses over each step, by default
        False (midpoint values).
    max_steps : int, optional
        Guard on the number of candidate steps, by default 5e7.
    max_wide_steps : int, optional
        Guard on the number of candidate steps when the hop radius
        exceeds 2, by default 1e6.

    Returns
    -------
    CausalDAG
        Every admissible step (i, x) -> (i + 1, y) with y within the hop
        radius of x, carrying its distance, time span and increment.

    Raises
    ------
    SizeGuardError
        If a guard is exceeded. The error suggests a coarsening factor
        for the time grid.
    """
    hoods = st.space.hop_neighbours(st.hop_radius)
    src = np.concatenate([np.full(len(h), x, dtype=np.intp) for x, h in enumerate(hoods)])
    dst = np.concatenate(hoods)
    total = len(src) * st.num_layers

    limit = max_wide_steps if st.hop_radius > 2 else max_steps
    if total > limit:
        factor = math.ceil(total / limit)
        msg = (
            f"{total} candidate steps exceed the guard of {limit} at hop radius "
            f"{st.hop_radius}; coarsen the time grid by a factor of {factor}"
        )
        raise SizeGuardError(msg, suggested_coarsening=factor)

    layers = []
    for i in range(st.num_layers):
        s0, s1 = float(st.times[i]), float(st.times[i + 1])
        dd, hbar = step_geometry(st, s0, s1, src, dst, conservative=conservative)
        span = hbar * (s1 - s0)
        margin, null, increment = lorentz_increment(span, dd)
        keep = (margin > 0) | null
        layers.append(
            LayerSteps(
                src=src[keep],
                dst=dst[keep],
                distance=dd[keep],
                lapse=hbar[keep],
                span=span[keep],
                increment=increment[keep],
                timelike=(margin > 0)[keep] & ~null[keep],
            ),
        )

    dag = CausalDAG(st, tuple(layers), conservative=conservative)
    logger.info(
        "built causal DAG: %d layers, %d of %d candidate steps admissible",
        st.num_layers,
        dag.step_count,
        total,
    )
    return dag
