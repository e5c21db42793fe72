import math

import numpy as np
import pytest

from lorprod.exceptions import DomainError, NonVerticalPlanError
from lorprod.space import BaseSpace, path_space
from lorprod.transport import (
    DensityField,
    WtcdCase,
    concavity_rigidity,
    delta_smooth,
    entropy_decomposition,
    node_entropy,
    plan_lengths,
    region_entropy,
    wtcd_probe,
)


@pytest.fixture
def pair() -> BaseSpace:
    return path_space(2)


@pytest.fixture
def unit_field(pair: BaseSpace) -> DensityField:
    return DensityField(pair, np.linspace(0.0, 1.0, 11), np.ones((11, 2)))


@pytest.fixture
def growing() -> WtcdCase:
    return WtcdCase(start=(0.0, 0.25), end=(0.5, 1.0), region=(0, 1), name="growing")


def _width(t: float) -> float:
    return (1 - t) * 0.25 + t * 0.5


def test_density_validation(pair: BaseSpace) -> None:
    with pytest.raises(ValueError, match="increasing"):
        _ = DensityField(pair, [0.0, 0.0], np.ones((2, 2)))
    with pytest.raises(ValueError, match="shape"):
        _ = DensityField(pair, [0.0, 1.0], np.ones((2, 3)))
    with pytest.raises(DomainError):
        _ = DensityField(pair, [0.0, 1.0], np.zeros((2, 2)))
    with pytest.raises(ValueError, match="probability"):
        _ = DensityField(pair, [0.0, 1.0], np.ones((2, 2)), reference=[0.5, 0.6])


def test_from_slices(pair: BaseSpace) -> None:
    times = np.linspace(0.0, 1.0, 5)
    field = DensityField.from_slices(pair, times, np.ones((5, 2)))
    np.testing.assert_allclose(field.reference, [0.5, 0.5])
    np.testing.assert_allclose(field.values, 2.0)
    with pytest.raises(ValueError, match="normalizer"):
        DensityField.from_slices(pair, times, np.ones((5, 2)), normalizer=np.ones((5, 2)))


def test_field_queries(pair: BaseSpace) -> None:
    field = DensityField.from_function(pair, [0.0, 1.0], lambda s, x: 1.0 + s + x)
    assert field.profile(1, 0.5) == pytest.approx(2.5)
    assert field.mass([0]) == pytest.approx(0.5)
    assert field.density_bound() == pytest.approx(3.0)
    assert field.log_average(0, 0.0, 1.0) == pytest.approx(2 * math.log(2) - 1)
    with pytest.raises(DomainError):
        field.check_window(0.5, 1.5)


def test_entropies_of_a_uniform_field(unit_field: DensityField, growing: WtcdCase) -> None:
    for t in (0.0, 0.5, 1.0):
        expected = -math.log(_width(t))
        assert region_entropy(unit_field, growing, t) == pytest.approx(expected)
        assert node_entropy(unit_field, growing, 0, t) == pytest.approx(expected)


def test_region_entropy_half_region(unit_field: DensityField) -> None:
    case = WtcdCase(start=(0.0, 0.5), end=(0.5, 1.0), region=(1,))
    assert region_entropy(unit_field, case, 0.0) == pytest.approx(math.log(2) + math.log(2))


def test_entropy_decomposition(pair: BaseSpace, growing: WtcdCase) -> None:
    field = DensityField.from_function(pair, np.linspace(0.0, 1.0, 11), lambda s, x: 1.0 + s * (1 + x))
    result = entropy_decomposition(field, growing)
    assert len(result.times) == 11
    assert result.residual < 1e-12


def test_entropy_decomposition_random_fields() -> None:
    rng = np.random.default_rng(8)
    for _ in range(100):
        space = path_space(int(rng.integers(2, 6)))
        times = np.linspace(0.0, 1.0, int(rng.integers(3, 9)))
        reference = rng.uniform(0.5, 1.5, space.num_nodes)
        field = DensityField(
            space,
            times,
            rng.uniform(0.5, 2.0, (len(times), space.num_nodes)),
            lapse=float(rng.uniform(0.5, 2.0)),
            reference=reference / reference.sum(),
        )
        size = int(rng.integers(1, space.num_nodes + 1))
        region = tuple(int(x) for x in rng.choice(space.num_nodes, size=size, replace=False))
        start_lo = float(rng.uniform(0.0, 0.4))
        start_hi = start_lo + float(rng.uniform(0.05, 0.3))
        end_lo = start_lo + float(rng.uniform(0.0, 0.3))
        end_hi = max(start_hi, end_lo + 0.05) + float(rng.uniform(0.0, 0.2))
        case = WtcdCase(start=(start_lo, start_hi), end=(end_lo, end_hi), region=region)
        assert entropy_decomposition(field, case).residual < 1e-12


def test_plan_lengths() -> None:
    field = DensityField(path_space(2), [0.0, 1.0], np.ones((2, 2)))
    shift = WtcdCase(start=(0.0, 0.5), end=(0.5, 1.0), region=(0, 1))
    ell, length = plan_lengths(field, shift, 0.5)
    assert ell == pytest.approx(0.5)
    assert length == pytest.approx(0.5)


@pytest.mark.parametrize(("k", "passed"), [(0.0, True), (-1.0, True), (1.0, False)])
def test_wtcd_probe_curvature(unit_field: DensityField, growing: WtcdCase, k: float, passed: bool) -> None:
    report = wtcd_probe(unit_field, [growing], k, 1.0)
    assert report.passed is passed
    case = report.cases[0]
    assert case.length == pytest.approx(math.sqrt(0.25 + 0.125 + 0.0625 / 3))
    table = case.entropy_table()
    assert table.header == ("t", "entropy", "slack")
    assert table.shape[0] == 21
    assert report.to_table().shape[0] == 1
    assert report.to_dict()["cases"][0]["passed"] is passed


@pytest.mark.parametrize(
    ("case", "error"),
    [
        (WtcdCase(start=(0.0, 0.5), end=(0.5, 1.0), region=(0,), target_region=(1,)), NonVerticalPlanError),
        (WtcdCase(start=(0.5, 1.0), end=(0.0, 0.5), region=(0,)), NonVerticalPlanError),
        (WtcdCase(start=(0.0, 0.5), end=(0.5, 1.5), region=(0,)), DomainError),
        (WtcdCase(start=(0.0, 0.5), end=(0.5, 1.0), region=()), ValueError),
        (WtcdCase(start=(0.0, 0.5), end=(0.5, 1.0), region=(9,)), ValueError),
    ],
)
def test_invalid_cases(unit_field: DensityField, case: WtcdCase, error: type[Exception]) -> None:
    with pytest.raises(error):
        region_entropy(unit_field, case, 0.5)


def test_case_round_trip() -> None:
    case = WtcdCase.from_dict({"name": "c", "start": [0, 0.5], "end": [0.5, 1], "region": ["0", "1"]})
    assert case.start == (0, 0.5)
    assert case.to_dict() == {"name": "c", "start": [0, 0.5], "end": [0.5, 1], "region": ["0", "1"]}


def test_string_region_nodes(unit_field: DensityField) -> None:
    case = WtcdCase(start=(0.0, 0.5), end=(0.5, 1.0), region=("0", "1"))
    assert region_entropy(unit_field, case, 0.0) == pytest.approx(math.log(2))


def test_wtcd_probe_invalid_p(unit_field: DensityField, growing: WtcdCase) -> None:
    with pytest.raises(ValueError, match="p must"):
        wtcd_probe(unit_field, [growing], 0.0, 1.0, p=1.0)


def test_delta_smooth(pair: BaseSpace) -> None:
    field = DensityField.from_function(pair, np.linspace(0.0, 1.0, 101), lambda s, _: math.exp(s))
    points, values = delta_smooth(field, 0, 0.1)
    assert points.min() >= 0.1 - 1e-12
    assert points.max() <= 0.9 + 1e-12
    np.testing.assert_allclose(values, np.exp(points), rtol=1e-4)

    _, halved = delta_smooth(field, 0, 0.1, n=2.0, points=[0.5])
    assert halved[0] == pytest.approx(math.exp(0.25), rel=1e-4)


def test_delta_smooth_invalid(unit_field: DensityField) -> None:
    with pytest.raises(DomainError, match="half"):
        delta_smooth(unit_field, 0, 0.6)
    with pytest.raises(DomainError, match="leaves"):
        delta_smooth(unit_field, 0, 0.1, points=[0.05])


def test_rigidity_linear_density() -> None:
    field = DensityField.from_function(path_space(2), np.linspace(0.0, 2.0, 21), lambda s, _: 1.0 + 0.05 * s)
    report = concavity_rigidity(field, 0.0, 1.0)
    assert report.passed
    assert report.exceptional_mass == 0.0
    assert report.nodes[0].slope_bounds == pytest.approx((0.55,))
    assert report.constancy == "undetermined at this window, slope bound 0.55"


def test_rigidity_constant_density(unit_field: DensityField) -> None:
    report = concavity_rigidity(unit_field, 0.0, 1.0, windows=[(0.0, 1.0), (0.25, 0.75)])
    assert report.passed
    assert report.constancy == "constant"
    assert report.windows == ((0.25, 0.75), (0.0, 1.0))
    assert report.nodes[0].extrapolated_bound == pytest.approx(0.0, abs=1e-12)


def test_rigidity_convex_density(pair: BaseSpace) -> None:
    field = DensityField.from_function(
        pair,
        np.linspace(0.0, 1.0, 11),
        lambda s, x: (1.0 + s) ** 2 if x == 0 else 1.0,
    )
    report = concavity_rigidity(field, 0.0, 1.0)
    assert not report.passed
    assert report.failures == (0,)
    assert report.exceptional_mass == pytest.approx(0.5)
    assert report.nodes[0].max_violation > 0
    assert report.to_dict()["nodes"][1]["passed"]

    # the square root is linear, so N = 2 passes
    assert concavity_rigidity(field, 0.0, 2.0).passed


def test_rigidity_curved_and_invalid(unit_field: DensityField) -> None:
    report = concavity_rigidity(unit_field, 1.0, 1.0)
    assert report.constancy == "not tested for K != 0"
    assert report.to_table().shape[0] == 2
    with pytest.raises(ValueError, match="N must"):
        concavity_rigidity(unit_field, 0.0, 0.5)
    with pytest.raises(DomainError):
        concavity_rigidity(unit_field, 0.0, 1.0, windows=[(0.0, 2.0)])
