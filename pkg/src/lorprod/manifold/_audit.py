"""Audits of the causal character of longest curves."""

import dataclasses
import logging
from collections.abc import Iterable
from enum import Enum, unique
from typing import Any

import numpy as np
from cogent3.core.table import Table, make_table

from lorprod.causal import CausalDAG, classify, lorentz_length, maximizer, separation_table
from lorprod.exceptions import NotApplicableError
from lorprod.product import Event, ProductCurve, ProductSpacetime
from lorprod.util import make_rng, process_seed

logger = logging.getLogger(__name__)


@unique
class AuditVerdict(Enum):
    TIMELIKE = "timelike"
    NULL_STEPS = "null steps"


@dataclasses.dataclass(slots=True, frozen=True)
class StepFinding:
    """A step of a maximizer whose margin is not positive."""

    step: int
    margin: float
    start: tuple[float, Any]
    end: tuple[float, Any]


@dataclasses.dataclass(slots=True, frozen=True)
class RegularityAudit:
    curve: ProductCurve
    length: float
    findings: tuple[StepFinding, ...]

    @property
    def verdict(self) -> AuditVerdict:
        return AuditVerdict.NULL_STEPS if self.findings else AuditVerdict.TIMELIKE

    def to_dict(self) -> dict[str, Any]:
        return {
            "verdict": self.verdict.value,
            "length": self.length,
            "start": list(self.curve.start),
            "end": list(self.curve.end),
            "findings": [dataclasses.asdict(f) for f in self.findings],
        }


def regularity_audit(st: ProductSpacetime, curve: ProductCurve) -> RegularityAudit:
    """Report every step of a positive-length maximizer with margin <= 0.

    Null steps are findings, not errors.

    Raises
    ------
    NotApplicableError
        If the curve has zero Lorentzian length.
    """
    length = lorentz_length(st, curve)
    if length <= 0:
        msg = "the audit needs a curve of positive Lorentzian length"
        raise NotApplicableError(msg)
    character = classify(st, curve)
    findings = tuple(
        StepFinding(k, margin, (curve.times[k], curve.nodes[k]), (curve.times[k + 1], curve.nodes[k + 1]))
        for k, margin in enumerate(character.margins)
        if margin <= 0
    )
    return RegularityAudit(curve, length, findings)


@dataclasses.dataclass(slots=True, frozen=True)
class AuditSummary:
    """Audits of maximizers between sampled pairs with tau > 0."""

    audits: tuple[RegularityAudit, ...]
    seed: int | None

    @property
    def null_steps(self) -> int:
        return sum(len(a.findings) for a in self.audits)

    @property
    def verdict(self) -> AuditVerdict:
        return AuditVerdict.NULL_STEPS if self.null_steps else AuditVerdict.TIMELIKE

    def to_table(self) -> Table:
        return make_table(
            header=["start", "end", "length", "null_steps"],
            data={
                "start": [str(a.curve.start) for a in self.audits],
                "end": [str(a.curve.end) for a in self.audits],
                "length": [a.length for a in self.audits],
                "null_steps": [len(a.findings) for a in self.audits],
            },
            title=f"maximizer audit ({self.verdict.value})",
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "verdict": self.verdict.value,
            "num_pairs": len(self.audits),
            "null_steps": self.null_steps,
            "seed": self.seed,
            "flagged": [a.to_dict() for a in self.audits if a.findings],
        }


def _sample_pairs(dag: CausalDAG, num_pairs: int, seed: int) -> list[tuple[Event, Event]]:
    st = dag.spacetime
    nodes = st.space.nodes
    rng = make_rng(seed)
    pairs: list[tuple[Event, Event]] = []
    attempts = 0
    while len(pairs) < num_pairs and attempts < 20 * num_pairs:
        attempts += 1
        source = Event(int(rng.integers(0, st.num_layers)), nodes[int(rng.integers(len(nodes)))])
        table = separation_table(dag, source)
        targets = [
            Event(layer, node)
            for layer in range(source.layer + 1, st.num_layers + 1)
            for node in nodes
            if (table.tau(Event(layer, node)) or 0.0) > 0
        ]
        if targets:
            pairs.append((source, targets[int(rng.integers(len(targets)))]))
    return pairs


def audit_maximizers(
    dag: CausalDAG,
    pairs: Iterable[tuple[Event, Event]] | None = None,
    *,
    num_pairs: int = 200,
    seed: int | None = None,
) -> AuditSummary:
    """Audit the maximizers between pairs, sampling pairs with tau > 0 by default."""
    used_seed = None
    if pairs is None:
        used_seed = process_seed(seed)
        pairs = _sample_pairs(dag, num_pairs, used_seed)
    audits = []
    for p, q in pairs:
        curve = maximizer(dag, p, q)
        audits.append(regularity_audit(dag.spacetime, curve))
    summary = AuditSummary(tuple(audits), used_seed)
    logger.info("audited %d maximizers: %d null steps", len(audits), summary.null_steps)
    if summary.null_steps:
        worst = min(f.margin for a in audits for f in a.findings)
        logger.warning("null steps on positive-length maximizers, worst margin %.3g", worst)
    return summary


def margin_trend(summaries: Iterable[AuditSummary]) -> np.ndarray:
    """Fraction of audited maximizers with null steps, per refinement level."""
    return np.array([sum(bool(a.findings) for a in s.audits) / max(len(s.audits), 1) for s in summaries])
