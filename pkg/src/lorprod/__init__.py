"""lorprod - causal structure and curvature of generalized Lorentzian products."""

from lorprod.causal import (
    CausalDAG,
    build_causal_dag,
    classify,
    lorentz_length,
    maximizer,
    time_separation,
)
from lorprod.family import ConformalFamily, available_forms, make_form, verify_regularity
from lorprod.product import Event, ProductCurve, ProductSpacetime
from lorprod.space import BaseSpace, load_space, path_space

__version__ = "0.1.0"


__all__ = [
    "BaseSpace",
    "CausalDAG",
    "ConformalFamily",
    "Event",
    "ProductCurve",
    "ProductSpacetime",
    "available_forms",
    "build_causal_dag",
    "classify",
    "load_space",
    "lorentz_length",
    "make_form",
    "maximizer",
    "path_space",
    "time_separation",
    "verify_regularity",
]
