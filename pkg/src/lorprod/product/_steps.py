"""Per-step terms shared by every length functional on the product."""

import numpy as np

from lorprod.product._spacetime import ProductCurve, ProductSpacetime

NULL_TOLERANCE = 1e-12


def step_geometry(
    st: ProductSpacetime,
    s0: float,
    s1: float,
    src: np.ndarray,
    dst: np.ndarray,
    *,
    conservative: bool = False,
) -> tuple[np.ndarray, np.ndarray]:
    """Spatial distance and lapse for steps between two times.

    Parameters
    ----------
    st : ProductSpacetime
        The product.
    s0, s1 : float
        Times at the start and end of the steps.
    src, dst : np.ndarray
        Node indices at the start and end of each step.
    conservative : bool, optional
        Use the largest distance and the smallest lapse over both end
        times and the midpoint instead of midpoint values, by default False.

    Returns
    -------
    tuple[np.ndarray, np.ndarray]
        The step distances and the step lapses.
    """
    fam = st.family
    mid = 0.5 * (s0 + s1)
    lapse = fam.lapse_values(mid)
    dd = fam.matrix_at(mid)[src, dst]
    hbar = 0.5 * (lapse[src] + lapse[dst])
    if conservative:
        hbar = np.minimum(lapse[src], lapse[dst])
        for s in (s0, s1):
            dd = np.maximum(dd, fam.matrix_at(s)[src, dst])
            end_lapse = fam.lapse_values(s)
            hbar = np.minimum(hbar, np.minimum(end_lapse[src], end_lapse[dst]))
    return dd, hbar


def curve_geometry(st: ProductSpacetime, curve: ProductCurve) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Signed time steps, step distances and step lapses of a curve."""
    space = st.space
    n = curve.num_steps
    ds = np.empty(n)
    dd = np.empty(n)
    hbar = np.empty(n)
    for k in range(n):
        s0, s1 = curve.times[k], curve.times[k + 1]
        src = np.array([space.index(curve.nodes[k])])
        dst = np.array([space.index(curve.nodes[k + 1])])
        d, h = step_geometry(st, s0, s1, src, dst)
        ds[k] = s1 - s0
        dd[k] = d[0]
        hbar[k] = h[0]
    return ds, dd, hbar


def lorentz_increment(span: np.ndarray, dd: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Margins, null flags and length increments for time spans hbar * |ds|.

    A step is null when its margin span**2 - dd**2 vanishes to within a
    relative tolerance; null and spacelike steps have zero increment.
    """
    margin = span * span - dd * dd
    scale = np.maximum(span * span, dd * dd)
    null = np.abs(margin) <= NULL_TOLERANCE * scale
    increment = np.where((margin > 0) & ~null, np.sqrt(np.where(margin > 0, margin, 0.0)), 0.0)
    return margin, null, increment
