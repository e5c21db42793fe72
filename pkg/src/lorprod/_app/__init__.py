"""cogent3 apps for lorprod."""

from collections.abc import Iterable, Mapping
from typing import Any

from scinexus import composable
from scinexus.misc import extend_docstring_from

from lorprod.causal import CausalDAG, Separation, build_causal_dag, time_separation
from lorprod.family import MetricFamily, RegularityReport, verify_regularity
from lorprod.product import Event, ProductSpacetime
from lorprod.transport import DensityField, WtcdCase, WtcdReport, wtcd_probe


@composable.define_app
class lor_causal_dag:
    @extend_docstring_from(build_causal_dag)
    def __init__(self, *, conservative: bool = False) -> None:
        self._conservative = conservative

    def main(self, st: ProductSpacetime) -> CausalDAG:
        return build_causal_dag(st, conservative=self._conservative)


@composable.define_app
class lor_time_separation:
    @extend_docstring_from(time_separation)
    def __init__(self, p: tuple[int, Any], q: tuple[int, Any]) -> None:
        self._p = Event(*p)
        self._q = Event(*q)

    def main(self, dag: CausalDAG) -> Separation:
        return time_separation(dag, self._p, self._q)


@composable.define_app
class lor_verify_regularity:
    @extend_docstring_from(verify_regularity)
    def __init__(
        self,
        window: tuple[float, float] | None = None,
        *,
        seed: int | None = None,
        tolerance: float = 0.1,
    ) -> None:
        self._window = window
        self._seed = seed
        self._tolerance = tolerance

    def main(self, fam: MetricFamily) -> RegularityReport:
        return verify_regularity(fam, self._window, seed=self._seed, tolerance=self._tolerance)


@composable.define_app
class lor_wtcd_probe:
    @extend_docstring_from(wtcd_probe)
    def __init__(
        self,
        cases: Iterable[WtcdCase | Mapping[str, Any]],
        k: float = 0.0,
        n: float = 1.0,
        p: float = 0.5,
    ) -> None:
        self._cases = tuple(c if isinstance(c, WtcdCase) else WtcdCase.from_dict(c) for c in cases)
        self._k = k
        self._n = n
        self._p = p

    def main(self, field: DensityField) -> WtcdReport:
        return wtcd_probe(field, self._cases, self._k, self._n, self._p)


_ALL_APP_NAMES = [
    "lor_causal_dag",
    "lor_time_separation",
    "lor_verify_regularity",
    "lor_wtcd_probe",
]
