"""Caratheodory ODEs, the comparison principle and curve straightening."""

from lorprod.ode._field import CaratheodoryField
from lorprod.ode._pushup import (
    ConnectorResult,
    neighbourhood_radius,
    push_up,
    step_elements,
    timelike_connector,
)
from lorprod.ode._solve import Comparison, ComparisonResult, ODESolution, compare, solve_ivp
from lorprod.ode._straighten import (
    StraightenResult,
    TraceField,
    conformal_geodesic,
    spatial_trace,
    straighten,
)

__all__ = [
    "CaratheodoryField",
    "Comparison",
    "ComparisonResult",
    "ConnectorResult",
    "ODESolution",
    "StraightenResult",
    "TraceField",
    "compare",
    "conformal_geodesic",
    "neighbourhood_radius",
    "push_up",
    "solve_ivp",
    "spatial_trace",
    "step_elements",
    "straighten",
    "timelike_connector",
]
