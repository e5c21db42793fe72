"""Causal character and Lorentzian length of sampled curves."""

import dataclasses
from enum import Enum, unique

import numpy as np

from lorprod.exceptions import UndefinedLengthError
from lorprod.product import (
    Orientation,
    ProductCurve,
    ProductSpacetime,
    curve_geometry,
    lorentz_increment,
)


@unique
class CausalCharacter(Enum):
    TIMELIKE = "timelike"
    CAUSAL = "causal"
    NULL = "null"
    NON_CAUSAL = "non-causal"


@dataclasses.dataclass(slots=True, frozen=True)
class CausalClass:
    """Causal character of a curve with its per-step margins.

    Attributes
    ----------
    character : CausalCharacter
        The class of the curve.
    worst_margin : float
        Smallest margin hbar**2 ds**2 - dd**2 over the steps.
    margins : tuple[float, ...]
        Per-step margins, with null steps reported as exactly 0.
    reason : str | None
        Why a curve is non-causal.
    """

    character: CausalCharacter
    worst_margin: float
    margins: tuple[float, ...]
    reason: str | None = None

    @property
    def is_causal(self) -> bool:
        return self.character is not CausalCharacter.NON_CAUSAL


def _step_increments(st: ProductSpacetime, curve: ProductCurve) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    ds, dd, hbar = curve_geometry(st, curve)
    return lorentz_increment(hbar * np.abs(ds), dd)


def classify(st: ProductSpacetime, curve: ProductCurve) -> CausalClass:
    """Classify a curve by the sign of its per-step margins.

    Parameters
    ----------
    st : ProductSpacetime
        The product.
    curve : ProductCurve
        The curve; its time component must be strictly monotone.

    Returns
    -------
    CausalClass
        Timelike when every margin is positive, null when every step is
        null, causal when no step is spacelike and non-causal otherwise.
    """
    if curve.orientation is Orientation.NONE:
        return CausalClass(
            CausalCharacter.NON_CAUSAL,
            worst_margin=float("nan"),
            margins=(),
            reason="time component is not strictly monotone",
        )

    margin, null, _ = _step_increments(st, curve)
    margin = np.where(null, 0.0, margin)
    timelike = margin > 0
    if timelike.all():
        character = CausalCharacter.TIMELIKE
    elif null.all():
        character = CausalCharacter.NULL
    elif (timelike | null).all():
        character = CausalCharacter.CAUSAL
    else:
        character = CausalCharacter.NON_CAUSAL

    reason = None
    if character is CausalCharacter.NON_CAUSAL:
        first = int(np.flatnonzero(~(timelike | null))[0])
        reason = f"step {first} is spacelike"
    return CausalClass(
        character,
        worst_margin=float(margin.min()),
        margins=tuple(float(m) for m in margin),
        reason=reason,
    )


def lorentz_length(st: ProductSpacetime, curve: ProductCurve) -> float:
    """The Lorentzian length of a causal curve.

    Raises
    ------
    UndefinedLengthError
        If the curve is not causal.
    """
    result = classify(st, curve)
    if not result.is_causal:
        msg = f"Lorentzian length is undefined for a non-causal curve: {result.reason}"
        raise UndefinedLengthError(msg)
    _, _, increment = _step_increments(st, curve)
    # sequential summation, matching the order of the longest-path sweep
    return float(np.cumsum(increment)[-1]) if len(increment) else 0.0
