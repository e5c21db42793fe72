"""The two-dimensional Lorentzian reduction and maximizer audits."""

from lorprod.manifold._audit import (
    AuditSummary,
    AuditVerdict,
    RegularityAudit,
    StepFinding,
    audit_maximizers,
    margin_trend,
    regularity_audit,
)
from lorprod.manifold._metric import GridLorentzMetric, gq_length
from lorprod.manifold._reduce import QReduction, ResidualSweep, base_speed, q_reduce, residual_sweep

__all__ = [
    "AuditSummary",
    "AuditVerdict",
    "GridLorentzMetric",
    "QReduction",
    "RegularityAudit",
    "ResidualSweep",
    "StepFinding",
    "audit_maximizers",
    "base_speed",
    "gq_length",
    "margin_trend",
    "q_reduce",
    "regularity_audit",
    "residual_sweep",
]
