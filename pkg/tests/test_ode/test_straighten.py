import math

import numpy as np
import pytest
from pytest_mock import MockerFixture

from lorprod.causal import (
    CausalCharacter,
    build_causal_dag,
    classify,
    lorentz_length,
    maximizer,
    time_separation,
)
from lorprod.exceptions import (
    BracketError,
    ConnectorMarginError,
    HypothesisNotCertifiedError,
    InvalidPathError,
    NotApplicableError,
    OutOfNeighbourhoodError,
)
from lorprod.family import ConformalFamily, verify_regularity
from lorprod.ode import (
    conformal_geodesic,
    neighbourhood_radius,
    push_up,
    spatial_trace,
    step_elements,
    straighten,
    timelike_connector,
)
from lorprod.product import Event, ProductCurve, ProductSpacetime
from lorprod.space import path_space


@pytest.fixture
def roomy_spacetime() -> ProductSpacetime:
    """Flat product whose time interval extends past the grid."""
    fam = ConformalFamily(path_space(11), 1.0, interval=(0.0, 2.0))
    return ProductSpacetime(fam, np.linspace(0.0, 1.0, 11), hop_radius=3)


def test_spatial_trace_drops_stays(roomy_spacetime: ProductSpacetime) -> None:
    curve = ProductCurve.from_samples([0.0, 0.5, 1.0], [0, 0, 5])
    trace = spatial_trace(roomy_spacetime, curve)
    assert trace.nodes == (0, 1, 2, 3, 4, 5)
    np.testing.assert_allclose(trace.speeds(roomy_spacetime.space), 0.5)


def test_spatial_trace_follows_geodesics_of_wide_steps(roomy_spacetime: ProductSpacetime) -> None:
    curve = ProductCurve.from_samples([0.0, 0.3, 0.6], [2, 5, 3])
    trace = spatial_trace(roomy_spacetime, curve)
    assert trace.nodes == (2, 3, 4, 5, 4, 3)
    assert conformal_geodesic(roomy_spacetime, 0.5, 5, 3) == [5, 4, 3]


def test_straighten_flat(roomy_spacetime: ProductSpacetime) -> None:
    curve = ProductCurve.from_samples([0.0, 0.5, 1.0], [0, 0, 5], params=[0.0, 0.5, 1.0])
    result = straighten(roomy_spacetime, curve)
    assert result.tau_input == pytest.approx(0.5)
    assert result.epsilon == pytest.approx(math.sqrt(0.75), rel=1e-10)
    assert result.tau == pytest.approx(math.sqrt(0.75), rel=1e-10)
    assert result.tau >= result.tau_input
    assert result.curve.start == (0.0, 0)
    assert result.curve.end == (1.0, 5)
    np.testing.assert_allclose(result.curve.times, np.linspace(0.0, 1.0, 6), atol=1e-12)
    assert lorentz_length(roomy_spacetime, result.curve) == pytest.approx(math.sqrt(0.75))

    elements = step_elements(roomy_spacetime, result.curve)
    np.testing.assert_allclose(elements, result.epsilon, rtol=1e-8)

    trace = result.trace_table()
    assert trace.header == ("iterate", "epsilon", "t", "y")
    assert result.iterations == len(result.solutions)
    assert result.to_dict()["iterations"] == result.iterations


def test_straighten_rejects_null_curves(roomy_spacetime: ProductSpacetime) -> None:
    null = ProductCurve.from_samples([0.0, 0.5], [0, 5])
    with pytest.raises(NotApplicableError):
        straighten(roomy_spacetime, null)
    past = ProductCurve.from_samples([0.5, 0.0], [0, 0])
    with pytest.raises(InvalidPathError):
        straighten(roomy_spacetime, past)


def test_push_up(roomy_spacetime: ProductSpacetime) -> None:
    left = ProductCurve.from_samples([0.0, 0.5], [5, 5], params=[0.0, 0.5])
    right = ProductCurve.from_samples([0.5, 1.0], [5, 10], params=[0.5, 1.0])
    result = push_up(roomy_spacetime, left, right)
    assert result.curve.start == (0.0, 5)
    assert result.curve.end == (1.0, 10)
    assert result.tau_input == pytest.approx(0.5)
    assert result.tau == pytest.approx(math.sqrt(0.75), rel=1e-8)
    assert np.all(step_elements(roomy_spacetime, result.curve) > 0)


def test_push_up_degenerate_leg(roomy_spacetime: ProductSpacetime) -> None:
    left = ProductCurve.from_samples([0.2], [3])
    right = ProductCurve.from_samples([0.2, 0.6], [3, 3], params=[0.2, 0.6])
    result = push_up(roomy_spacetime, left, right, force=True)
    assert result.tau == pytest.approx(0.4)


def test_push_up_needs_certified_family() -> None:
    fam = ConformalFamily(path_space(11), {"form": "holder_bubble", "s0": 0.0}, interval=(0.0, 2.0))
    st = ProductSpacetime(fam, np.linspace(0.0, 1.0, 11))
    left = ProductCurve.from_samples([0.0, 0.5], [5, 5])
    right = ProductCurve.from_samples([0.5, 1.0], [5, 5])
    with pytest.raises(HypothesisNotCertifiedError):
        push_up(st, left, right)


def test_push_up_null_chain(roomy_spacetime: ProductSpacetime) -> None:
    left = ProductCurve.from_samples([0.0, 0.1], [0, 1])
    right = ProductCurve.from_samples([0.1], [1])
    with pytest.raises(NotApplicableError):
        push_up(roomy_spacetime, left, right, force=True)


def _stationary_witness() -> ProductCurve:
    return ProductCurve.from_samples([0.2, 0.5, 0.8], [5, 5, 5], params=[0.2, 0.5, 0.8])


def test_connector_at_the_witness(roomy_spacetime: ProductSpacetime) -> None:
    result = timelike_connector(roomy_spacetime, _stationary_witness(), (0.2, 5), (0.8, 5))
    assert result.delta0 > 0
    assert result.margin == pytest.approx(1.0)
    assert result.margin >= result.bound
    assert result.curve.nodes == (5, 5, 5)


def test_connector_out_of_neighbourhood(roomy_spacetime: ProductSpacetime) -> None:
    with pytest.raises(OutOfNeighbourhoodError) as err:
        timelike_connector(roomy_spacetime, _stationary_witness(), (0.2, 0), (0.8, 5))
    assert err.value.delta0 > 0


def test_connector_needs_timelike_witness(roomy_spacetime: ProductSpacetime) -> None:
    witness = ProductCurve.from_samples([0.0, 0.1], [0, 1])
    with pytest.raises(NotApplicableError):
        timelike_connector(roomy_spacetime, witness, (0.0, 0), (0.1, 1))


def test_neighbourhood_radius() -> None:
    assert neighbourhood_radius(1.0, 1.0, 0.0) == pytest.approx(0.99 / 6)
    assert neighbourhood_radius(1.0, 1.0, math.inf) == 0.0


def test_connector_absorbs_a_small_displacement(roomy_spacetime: ProductSpacetime) -> None:
    witness = ProductCurve.from_samples([0.0, 0.5, 1.0], [5, 5, 5], params=[0.0, 0.5, 1.0])
    result = timelike_connector(roomy_spacetime, witness, (0.01, 5), (0.99, 5))
    assert result.delta0 == pytest.approx(0.99 / 6)
    assert result.kappa == pytest.approx(16.0)
    assert result.curve.start == (0.01, 5)
    assert result.curve.end == (0.99, 5)
    assert result.margin == pytest.approx(0.98)
    assert result.bound == pytest.approx(math.sqrt(0.1875))
    assert result.margin >= 0.5
    assert result.margin >= result.bound


def test_connector_below_the_bound_raises(roomy_spacetime: ProductSpacetime, mocker: MockerFixture) -> None:
    witness = _stationary_witness()
    elements = step_elements(roomy_spacetime, witness)
    mocker.patch(
        "lorprod.ode._pushup.step_elements",
        side_effect=[elements, elements, np.array([1e-3])],
    )
    with pytest.raises(ConnectorMarginError, match="below the bound") as err:
        timelike_connector(roomy_spacetime, witness, (0.2, 5), (0.8, 5))
    assert err.value.margin == pytest.approx(1e-3)
    assert err.value.bound == pytest.approx(math.sqrt(33) / 14)


def test_holder_family_cannot_be_bracketed() -> None:
    fam = ConformalFamily(path_space(11), {"form": "holder_bubble", "s0": 1.01}, interval=(0.0, 2.0))
    st = ProductSpacetime(fam, np.linspace(0.0, 1.0, 11), hop_radius=2)
    left = ProductCurve.from_samples([0.88, 0.9], [0, 0])
    right = ProductCurve.from_samples([0.9, 1.12], [0, 2])
    with pytest.raises(BracketError, match="null re-timing"):
        push_up(st, left, right, force=True)


@pytest.fixture
def warped_spacetime() -> ProductSpacetime:
    """rho = 0.3 exp(s) w(x) with random node weights."""
    weights = np.random.default_rng(4).uniform(0.5, 1.0, 9).tolist()
    params = {"form": "exp_linear", "a": 1.0, "c": 0.3, "w": weights}
    fam = ConformalFamily(path_space(9, length=0.8), params, interval=(0.0, 2.0))
    return ProductSpacetime(fam, np.linspace(0.0, 1.0, 9), hop_radius=2)


def test_push_up_random_chains(warped_spacetime: ProductSpacetime) -> None:
    st = warped_spacetime
    report = verify_regularity(st.family, seed=0)
    assert report.passed
    dag = build_causal_dag(st)
    rng = np.random.default_rng(5)
    nodes = st.space.nodes
    checked = attempts = 0
    while checked < 200:
        attempts += 1
        assert attempts < 20_000
        i, j, k = sorted(int(v) for v in rng.choice(st.num_layers + 1, size=3, replace=False))
        q, p, r = (Event(layer, nodes[int(rng.integers(len(nodes)))]) for layer in (i, j, k))
        if not time_separation(dag, q, p).causal or not time_separation(dag, p, r).tau > 0.1:
            continue
        left = maximizer(dag, q, p)
        right = maximizer(dag, p, r)
        result = push_up(st, left, right, report=report)
        assert result.curve.start == left.start
        assert result.curve.end == right.end
        assert result.max_element_error <= 1e-6
        assert np.all(step_elements(st, result.curve) > 0)
        assert classify(st, result.curve).character is CausalCharacter.TIMELIKE
        checked += 1
