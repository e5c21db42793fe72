"""Time-dependent metric families, generalized speeds and regularity checks."""

from lorprod.family._family import (
    ConformalFamily,
    MetricFamily,
    OracleFamily,
    SpeedValue,
    distance_at,
    generalized_speed,
)
from lorprod.family._forms import FieldForm, FormType, make_form, node_values
from lorprod.family._options import available_forms
from lorprod.family._regularity import RegularityReport, Verdict, verify_regularity

__all__ = [
    "ConformalFamily",
    "FieldForm",
    "FormType",
    "MetricFamily",
    "OracleFamily",
    "RegularityReport",
    "SpeedValue",
    "Verdict",
    "available_forms",
    "distance_at",
    "generalized_speed",
    "make_form",
    "node_values",
    "verify_regularity",
]
