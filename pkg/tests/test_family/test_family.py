import math

import numpy as np
import pytest

from lorprod.exceptions import DomainError
from lorprod.family import (
    ConformalFamily,
    FormType,
    OracleFamily,
    distance_at,
    generalized_speed,
    make_form,
)
from lorprod.space import BaseSpace, SpacePath, path_space


def test_exp_linear_scales_distance(short_path: BaseSpace) -> None:
    fam = ConformalFamily(short_path, {"form": "exp_linear", "a": 1.0})
    assert distance_at(fam, 0.0, 0, 10) == pytest.approx(1.0)
    assert distance_at(fam, 1.0, 0, 10) == pytest.approx(math.e)
    assert fam.log_lipschitz == 1.0


def test_constant_family_is_time_independent(short_path: BaseSpace) -> None:
    fam = ConformalFamily(short_path, 2.0)
    assert fam.time_independent
    assert fam.matrix_at(0.0) is fam.matrix_at(0.7)
    assert fam.distance_at(0.3, 2, 5) == pytest.approx(0.6)


def test_time_outside_interval(flat_family: ConformalFamily) -> None:
    with pytest.raises(DomainError, match="outside"):
        flat_family.distance_at(1.5, 0, 1)


def test_invalid_interval(short_path: BaseSpace) -> None:
    with pytest.raises(ValueError, match="s_min < s_max"):
        _ = ConformalFamily(short_path, 1.0, interval=(1.0, 1.0))


def test_weight_must_stay_positive(short_path: BaseSpace) -> None:
    with pytest.raises(DomainError, match="not positive"):
        _ = ConformalFamily(short_path, {"form": "affine", "a": -2.0, "b": 1.0})
    with pytest.raises(DomainError, match="lapse"):
        _ = ConformalFamily(short_path, 1.0, lapse={"form": "affine", "a": -2.0, "b": 1.0})


def test_lapse_bounds(short_path: BaseSpace) -> None:
    fam = ConformalFamily(short_path, 1.0, lapse={"form": "affine", "a": 1.0, "b": 1.0})
    lo, hi = fam.lapse_bounds()
    assert lo == pytest.approx(1.0)
    assert hi == pytest.approx(2.0)


def test_oracle_family(short_path: BaseSpace) -> None:
    fam = OracleFamily(short_path, lambda s, x, y: (1 + s) * abs(x - y))
    assert fam.distance_at(0.5, 2, 6) == pytest.approx(6.0)
    assert fam.distance_at(0.5, 6, 6) == 0.0


@pytest.mark.parametrize("form_type", list(FormType))
def test_form_descriptions(form_type: FormType) -> None:
    assert form_type.description


@pytest.mark.parametrize(
    ("spec", "expected"),
    [
        (2.0, [2.0, 2.0, 2.0]),
        ({"form": "exp_linear", "a": 0.0, "c": 3.0}, [3.0, 3.0, 3.0]),
        ({"form": "affine", "a": 1.0, "b": 1.0, "w": [0.0, 1.0, 2.0]}, [1.0, 1.5, 2.0]),
        ({"form": "geometric_depth", "root": 0, "ratio": 0.5}, [1.0, 0.5, 0.25]),
        ({"form": "power_affine", "a": 1.0, "b": 0.5, "power": 2.0}, [1.0, 1.0, 1.0]),
        ({"grid": [[1.0, 2.0, 3.0], [3.0, 2.0, 1.0]], "times": [0.0, 1.0]}, [2.0, 2.0, 2.0]),
    ],
)
def test_form_values(spec: object, expected: list[float]) -> None:
    space = path_space(3)
    form = make_form(spec, space)  # type: ignore[arg-type]
    np.testing.assert_allclose(form.values(0.5), expected)


def test_form_round_trip() -> None:
    space = path_space(3)
    form = make_form({"form": "exp_square", "a": 2.0, "c": 0.5}, space)
    again = make_form(form.to_dict(), space)
    np.testing.assert_allclose(again.values(0.3), form.values(0.3))


def test_holder_bubble_declares_infinite_constant() -> None:
    form = make_form({"form": "holder_bubble", "s0": 0.5}, path_space(3))
    assert math.isinf(form.log_lipschitz)  # type: ignore[arg-type]
    np.testing.assert_allclose(form.values(0.5), [1.0, 1.0, 1.0])


@pytest.mark.parametrize(
    "spec",
    [
        {"form": "wavelet"},
        {"form": "exp_linear", "beta": 1.0},
        {"form": "geometric_depth", "root": 99},
        {"grid": [[1.0, 2.0]]},
        "sideways",
    ],
)
def test_make_form_invalid(spec: object) -> None:
    with pytest.raises(ValueError):  # noqa: PT011
        make_form(spec, path_space(3))  # type: ignore[arg-type]


def test_string_keyed_weights() -> None:
    space = path_space(3)
    form = make_form({"form": "exp_linear", "a": 0.0, "w": {"1": 4.0}}, space)
    np.testing.assert_allclose(form.values(0.0), [1.0, 4.0, 1.0])


def test_generalized_speed(short_path: BaseSpace) -> None:
    fam = ConformalFamily(short_path, {"form": "exp_linear", "a": 0.0, "w": [float(i + 1) for i in range(11)]})
    path = SpacePath((0, 1, 2), durations=(0.2, 0.1))
    speed = generalized_speed(fam, path, 0.0, 0.1)
    assert speed.value == pytest.approx(0.5 * 1.5)
    assert not speed.one_sided

    at_break = generalized_speed(fam, path, 0.0, 0.2)
    assert at_break.value == pytest.approx(2.0)
    assert at_break.one_sided

    with pytest.raises(DomainError):
        generalized_speed(fam, path, 0.0, 0.4)


def test_generalized_speed_constant_path(flat_family: ConformalFamily) -> None:
    speed = generalized_speed(flat_family, SpacePath((4,)), 0.5, 0.0)
    assert speed.value == 0.0
