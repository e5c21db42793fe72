import numpy as np

from lorprod.product._spacetime import ProductCurve, ProductSpacetime
from lorprod.product._steps import curve_geometry


def product_length(st: ProductSpacetime, curve: ProductCurve) -> float:
    """Length of a curve in the generalized product metric.

    Each step contributes sqrt(hbar**2 ds**2 + dd**2), where hbar is the
    lapse and dd the spatial distance, both taken at the midpoint time.
    """
    ds, dd, hbar = curve_geometry(st, curve)
    return float(np.sqrt((hbar * ds) ** 2 + dd**2).sum())


def weighted_length(st: ProductSpacetime, curve: ProductCurve) -> float:
    """Length of a curve in the product metric conformally weighted by 1/h."""
    ds, dd, hbar = curve_geometry(st, curve)
    return float(np.sqrt(ds**2 + (dd / hbar) ** 2).sum())
