"""Push-up of causal chains and timelike connectors near a timelike witness."""

import dataclasses
import logging
import math
from typing import Any

import numpy as np

from lorprod.causal import classify, lorentz_length
from lorprod.exceptions import (
    ConnectorMarginError,
    HypothesisNotCertifiedError,
    InvalidPathError,
    NotApplicableError,
    OutOfNeighbourhoodError,
)
from lorprod.family import RegularityReport, verify_regularity
from lorprod.ode._straighten import StraightenResult, conformal_geodesic, straighten
from lorprod.product import ProductCurve, ProductSpacetime, curve_geometry, lorentz_increment
from lorprod.space import Node

logger = logging.getLogger(__name__)

_DELTA_SAFETY = 0.99


def push_up(
    st: ProductSpacetime,
    left: ProductCurve,
    right: ProductCurve,
    *,
    report: RegularityReport | None = None,
    force: bool = False,
    seed: int = 0,
    tol: float = 1e-8,
) -> StraightenResult:
    """A timelike curve q -> r from witnesses of q <= p << r or q << p <= r.

    Parameters
    ----------
    st : ProductSpacetime
        The product.
    left, right : ProductCurve
        Causal witnesses q -> p and p -> r. A single sample stands for a
        degenerate leg.
    report : RegularityReport | None, optional
        A regularity verdict for the family; computed over every node when
        omitted.
    force : bool, optional
        Attempt the construction without a passing verdict, by default False.
    seed : int, optional
        Seed for the regularity verifier, by default 0.
    tol : float, optional
        Relative tolerance on the straightened length element, by default 1e-8.

    Raises
    ------
    HypothesisNotCertifiedError
        If the family does not pass the regularity check and force is False.
    NotApplicableError
        If the concatenated chain has zero Lorentzian length.
    """
    if not force:
        if report is None:
            report = verify_regularity(st.family, seed=seed)
        if not report.passed:
            msg = f"the metric family is not certified log-Lipschitz (verdict {report.verdict.value})"
            raise HypothesisNotCertifiedError(msg)

    if left.num_steps == 0:
        chain = right
    elif right.num_steps == 0:
        chain = left
    else:
        chain = left.concatenate(right)

    if not classify(st, chain).is_causal:
        msg = "the witnesses do not form a causal chain"
        raise InvalidPathError(msg)
    tau = lorentz_length(st, chain)
    if not tau > 0:
        msg = "neither witness has positive Lorentzian length"
        raise NotApplicableError(msg)
    logger.info("push-up chain of %d steps with tau=%.6g", chain.num_steps, tau)
    return straighten(st, chain, tol=tol)


def step_elements(st: ProductSpacetime, curve: ProductCurve) -> np.ndarray:
    """Length element tau'(t) on each step of a curve."""
    ds, dd, hbar = curve_geometry(st, curve)
    margin, null, _ = lorentz_increment(hbar * np.abs(ds), dd)
    margin = np.where(null, 0.0, margin)
    return np.sqrt(np.maximum(margin, 0.0)) / np.diff(curve.params)


@dataclasses.dataclass(slots=True, frozen=True)
class ConnectorResult:
    """A three-leg timelike connector.

    Attributes
    ----------
    curve : ProductCurve
        Initial geodesic leg, affinely re-timed core and final leg.
    margin : float
        Smallest length element over the steps.
    bound : float
        min(c0 / 2, sqrt(1/L - 1/L**2)) for the witness constants.
    delta0 : float
        Neighbourhood radius of the affine perturbation.
    kappa : float
        Time per unit distance on the geodesic legs.
    """

    curve: ProductCurve
    margin: float
    bound: float
    delta0: float
    kappa: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "margin": self.margin,
            "bound": self.bound,
            "delta0": self.delta0,
            "kappa": self.kappa,
            "curve": self.curve.to_dict(),
        }


def _witness_constants(st: ProductSpacetime, witness: ProductCurve) -> tuple[float, float, float, float]:
    """c0, the maximum-form L, the sum-form L and the modulus slope of h**2 + omega."""
    fam = st.family
    a0, b0 = witness.times[0], witness.times[-1]
    dt = np.diff(witness.params)
    ds, dd, _ = curve_geometry(st, witness)
    elements = step_elements(st, witness)
    c0 = float(elements.min())
    inf_h, sup_h = fam.lapse_bounds((a0, b0))
    alpha_speed = float(np.max(np.abs(ds) / dt))
    v_sup = float(np.max(dd / dt))
    extent = b0 - a0
    max_form = max(sup_h, 1 / extent, alpha_speed, v_sup)
    sum_form = inf_h**-2 + sup_h + 1 / extent + alpha_speed + v_sup
    lapse_lip = fam.lapse_lipschitz or 0.0
    log_lip = fam.log_lipschitz if math.isfinite(fam.log_lipschitz) else math.inf
    modulus = 2 * sup_h * lapse_lip + log_lip
    return c0, max_form, sum_form, modulus


def neighbourhood_radius(c0: float, max_form: float, modulus: float) -> float:
    """Largest delta with 3 L**5 delta + 7 L**2 omega(2 delta) below c0**2 / 2.

    omega is linear with the given slope; the result carries a safety factor.
    """
    rate = 3 * max_form**5 + 14 * max_form**2 * modulus
    if not math.isfinite(rate):
        return 0.0
    return _DELTA_SAFETY * c0**2 / (2 * rate)


def _geodesic_leg(st: ProductSpacetime, s: float, start: Node, end: Node, span: tuple[float, float]) -> ProductCurve:
    """A d_s geodesic from start to end, at constant speed over the time span."""
    nodes = conformal_geodesic(st, s, start, end)
    rho = st.family.rho_values(s)
    space = st.space
    steps = [
        space.edge_length(u, v) * 0.5 * (rho[space.index(u)] + rho[space.index(v)])
        for u, v in zip(nodes[:-1], nodes[1:], strict=True)
    ]
    cumulative = np.concatenate(([0.0], np.cumsum(steps)))
    times = span[0] + (span[1] - span[0]) * cumulative / cumulative[-1]
    times[-1] = span[1]
    return ProductCurve.from_samples(times, nodes, params=times)


def timelike_connector(
    st: ProductSpacetime,
    witness: ProductCurve,
    q: tuple[float, Node],
    p: tuple[float, Node],
) -> ConnectorResult:
    """Join q to p by a timelike curve built around a timelike witness.

    Parameters
    ----------
    st : ProductSpacetime
        The product.
    witness : ProductCurve
        A timelike curve q0 -> p0 whose length element is bounded below.
    q, p : tuple[float, Node]
        (time, node) near the start and the end of the witness.

    Raises
    ------
    OutOfNeighbourhoodError
        If q or p is too far from the witness endpoints. The error carries
        the computed delta0.
    ConnectorMarginError
        If the connector's smallest length element is below
        min(c0 / 2, sqrt(1/L - 1/L**2)).
    """
    elements = step_elements(st, witness)
    if witness.num_steps == 0 or not np.all(elements > 0):
        msg = "the witness must be a timelike curve with positive length element"
        raise NotApplicableError(msg)

    fam = st.family
    c0, max_form, sum_form, modulus = _witness_constants(st, witness)
    delta0 = neighbourhood_radius(c0, max_form, modulus)
    kappa = sum_form**2

    a, x = q
    b, y = p
    a0, x0 = witness.start
    b0, y0 = witness.end
    d_a = fam.distance_at(a, x, x0)
    d_b = fam.distance_at(b, y0, y)
    new_a0 = a + kappa * d_a
    new_b0 = b - kappa * d_b
    offset = abs(new_a0 - a0) + abs(new_b0 - b0)
    if not offset < delta0 or not new_b0 > new_a0:
        msg = f"endpoints are outside the neighbourhood: displacement {offset:.6g} >= delta0 = {delta0:.6g}"
        raise OutOfNeighbourhoodError(msg, delta0=delta0)

    scale = (new_b0 - new_a0) / (b0 - a0)
    core_times = [new_a0 + scale * (s - a0) for s in witness.times]
    core_times[0], core_times[-1] = new_a0, new_b0
    curve = ProductCurve(witness.params, tuple(core_times), witness.nodes)
    if d_a > 0:
        curve = _geodesic_leg(st, a, x, x0, (a, new_a0)).concatenate(curve)
    if d_b > 0:
        curve = curve.concatenate(_geodesic_leg(st, b, y0, y, (new_b0, b)))

    margin = float(step_elements(st, curve).min())
    bound = min(c0 / 2, math.sqrt(max(1 / sum_form - 1 / sum_form**2, 0.0)))
    if margin < bound:
        msg = f"connector margin {margin:.6g} is below the bound {bound:.6g}"
        raise ConnectorMarginError(msg, margin=margin, bound=bound)
    return ConnectorResult(curve, margin, bound, delta0, kappa)
