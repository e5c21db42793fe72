"""Optimal transport, entropy convexity and rigidity audits on product measures."""

from lorprod.transport._convexity import ConvexityResult, kn_convexity
from lorprod.transport._density import (
    CaseResult,
    DecompositionResult,
    DensityField,
    WtcdCase,
    WtcdReport,
    delta_smooth,
    entropy_decomposition,
    node_entropy,
    plan_lengths,
    region_entropy,
    wtcd_probe,
)
from lorprod.transport._ellp import EllPResult, ell_p
from lorprod.transport._lapse import LapseScale, make_scale
from lorprod.transport._measure import DiscreteMeasure, entropy
from lorprod.transport._rigidity import NodeVerdict, RigidityReport, concavity_rigidity
from lorprod.transport._sigma import SigmaParams, s_kappa, sigma
from lorprod.transport._wasserstein import CyclicResult, TransportPlan, check_cyclic, wasserstein_h

__all__ = [
    "CaseResult",
    "ConvexityResult",
    "CyclicResult",
    "DecompositionResult",
    "DensityField",
    "DiscreteMeasure",
    "EllPResult",
    "LapseScale",
    "NodeVerdict",
    "RigidityReport",
    "SigmaParams",
    "TransportPlan",
    "WtcdCase",
    "WtcdReport",
    "check_cyclic",
    "concavity_rigidity",
    "delta_smooth",
    "ell_p",
    "entropy",
    "entropy_decomposition",
    "kn_convexity",
    "make_scale",
    "node_entropy",
    "plan_lengths",
    "region_entropy",
    "s_kappa",
    "sigma",
    "wasserstein_h",
]
