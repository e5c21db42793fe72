"""The product I x X: curves, Riemannian-signature lengths and properness."""

from lorprod.product._length import product_length, weighted_length
from lorprod.product._properness import Divergence, DivergenceReport, properness_diagnostic
from lorprod.product._spacetime import Event, Orientation, ProductCurve, ProductSpacetime
from lorprod.product._steps import NULL_TOLERANCE, curve_geometry, lorentz_increment, step_geometry

__all__ = [
    "NULL_TOLERANCE",
    "Divergence",
    "DivergenceReport",
    "Event",
    "Orientation",
    "ProductCurve",
    "ProductSpacetime",
    "curve_geometry",
    "lorentz_increment",
    "product_length",
    "properness_diagnostic",
    "step_geometry",
    "weighted_length",
]
