import math

import numpy as np
import pytest

from lorprod.exceptions import DomainError, InvalidPathError, ReparametrizeFirstError, UndefinedLengthError
from lorprod.family import ConformalFamily
from lorprod.manifold import GridLorentzMetric, base_speed, gq_length, q_reduce, residual_sweep
from lorprod.product import ProductCurve, ProductSpacetime
from lorprod.space import path_space


def _unit_square(f: float, g: float) -> GridLorentzMetric:
    grid = np.array([0.0, 1.0])
    return GridLorentzMetric(grid, grid, np.full((2, 2), f), np.full((2, 2), g))


def test_gq_length_constant_metric() -> None:
    metric = _unit_square(1.0, 0.25)
    assert gq_length(metric, np.array([[0.0, 0.0], [1.0, 1.0]])) == pytest.approx(math.sqrt(3) / 2)
    assert gq_length(metric, np.array([[0.5, 0.5]])) == 0.0


def test_gq_length_undefined() -> None:
    metric = _unit_square(1.0, 4.0)
    with pytest.raises(UndefinedLengthError, match="spacelike"):
        gq_length(metric, np.array([[0.0, 0.0], [1.0, 1.0]]))
    with pytest.raises(UndefinedLengthError, match="backwards"):
        gq_length(metric, np.array([[1.0, 0.0], [0.0, 0.0]]))
    with pytest.raises(DomainError):
        gq_length(metric, np.array([[0.0, 0.0], [4.0, 0.0]]))
    with pytest.raises(ValueError, match="shape"):
        gq_length(metric, np.zeros((2, 3)))


def test_metric_validation() -> None:
    grid = np.array([0.0, 1.0])
    with pytest.raises(DomainError, match="F"):
        _ = GridLorentzMetric(grid, grid, np.zeros((2, 2)), np.zeros((2, 2)))
    with pytest.raises(DomainError, match="G"):
        _ = GridLorentzMetric(grid, grid, np.ones((2, 2)), -np.ones((2, 2)))
    with pytest.raises(ValueError, match="shape"):
        _ = GridLorentzMetric(grid, grid, np.ones((3, 2)), np.ones((2, 2)))
    with pytest.raises(ValueError, match="increasing"):
        _ = GridLorentzMetric(np.array([1.0, 0.0]), grid, np.ones((2, 2)), np.ones((2, 2)))


def test_metric_lipschitz() -> None:
    grid = np.linspace(0.0, 1.0, 5)
    metric = GridLorentzMetric.from_functions(grid, grid, lambda s, _: 1 + 2 * s, lambda _, t: t)
    lip = metric.lipschitz
    assert lip["F_s"] == pytest.approx(2.0)
    assert lip["F_t"] == pytest.approx(0.0)
    assert lip["G_s"] == pytest.approx(0.0)
    assert lip["G_t"] == pytest.approx(1.0)
    assert metric.to_dict()["shape"] == [5, 5]


def test_q_reduce_vertical(flat_spacetime: ProductSpacetime) -> None:
    curve = ProductCurve.from_samples([0.2, 0.5, 0.8], [3, 3, 3], params=[0.2, 0.5, 0.8])
    result = q_reduce(flat_spacetime, curve, refine=2)
    assert result.speed == 0.0
    assert result.lorentzian == pytest.approx(0.6)
    assert result.residual < 1e-14
    np.testing.assert_allclose(result.metric.G, 0.0)


def test_q_reduce_diagonal() -> None:
    fam = ConformalFamily(path_space(11, length=0.5), 1.0)
    st = ProductSpacetime(fam, np.linspace(0.0, 1.0, 11))
    times = st.times.tolist()
    curve = ProductCurve.from_samples(times, range(11), params=times)
    result = q_reduce(st, curve)
    assert result.speed == pytest.approx(0.5)
    np.testing.assert_allclose(result.metric.G, 0.25)
    assert result.gq == pytest.approx(math.sqrt(0.75))
    assert result.residual < 1e-12
    assert result.to_dict()["residual"] == result.residual


def test_q_reduce_invalid(flat_spacetime: ProductSpacetime) -> None:
    uneven = ProductCurve.from_samples([0.0, 0.5, 1.0], [0, 1, 1], params=[0.0, 0.5, 1.0])
    with pytest.raises(ReparametrizeFirstError):
        base_speed(flat_spacetime, uneven)
    with pytest.raises(InvalidPathError):
        q_reduce(flat_spacetime, ProductCurve.from_samples([0.0, 0.5], [0, 2]))
    with pytest.raises(InvalidPathError, match="future"):
        q_reduce(flat_spacetime, ProductCurve.from_samples([0.5, 0.0], [0, 0]))
    with pytest.raises(ValueError, match="refine"):
        q_reduce(flat_spacetime, ProductCurve.from_samples([0.0, 0.5], [0, 0]), refine=0)


def _diagonal_problem(level: int) -> tuple[ProductSpacetime, ProductCurve]:
    m = 4 * level
    fam = ConformalFamily(path_space(m + 1, length=0.3), {"form": "exp_linear", "a": 1.0})
    st = ProductSpacetime(fam, np.linspace(0.0, 1.0, m + 1))
    times = st.times.tolist()
    return st, ProductCurve.from_samples(times, range(m + 1), params=times)


def test_residual_sweep_converges() -> None:
    sweep = residual_sweep(_diagonal_problem, levels=(1, 2, 4, 8))
    assert np.all(np.diff(sweep.residuals) < 0)
    assert sweep.order == pytest.approx(2.0, abs=0.3)
    table = sweep.to_table()
    assert table.header == ("delta", "residual")
    assert table.shape[0] == 4
