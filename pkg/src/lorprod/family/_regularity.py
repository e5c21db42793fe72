"""Empirical checks of the continuity and log-Lipschitz hypotheses."""

import dataclasses
import logging
import math
from collections.abc import Iterable
from enum import Enum, unique
from typing import Any

import numpy as np
from cogent3.core.table import Table, make_table
from scinexus.misc import get_object_provenance

from lorprod.exceptions import DomainError
from lorprod.family._family import ConformalFamily, MetricFamily
from lorprod.space import Node
from lorprod.util import process_seed

logger = logging.getLogger(__name__)

MIN_PAIRS = 20
NUM_SCALES = 24


@unique
class Verdict(Enum):
    """Outcome of an empirical check."""

    PASS = "pass"
    FAIL = "fail"
    INCONCLUSIVE = "inconclusive"


@dataclasses.dataclass(slots=True, frozen=True)
class RegularityReport:
    """Sampled modulus of continuity of s -> log d_s.

    Attributes
    ----------
    window : tuple[float, float]
        The time window J.
    gaps : tuple[float, ...]
        Time gaps |s - s'| at which the modulus was sampled.
    modulus : tuple[float, ...]
        Largest sampled |log(d_s / d_s')| at each gap.
    exponent : float | None
        Fitted exponent gamma, None when the modulus vanishes.
    constant : float
        Fitted constant C in modulus ~ C * gap**gamma.
    lipschitz_constant : float
        Largest sampled modulus / gap.
    lapse_lipschitz : float | None
        Largest sampled |h(s) - h(s')| / |s - s'| over the node set.
    verdict : Verdict
        Log-Lipschitz verdict.
    num_pairs : int
        Number of node pairs within the gating radius.
    radius : float
        The gating radius r.
    seed : int
        Seed used for sampling the base times.
    tolerance : float
        The exponent must be at least 1 - tolerance to pass.
    """

    window: tuple[float, float]
    gaps: tuple[float, ...]
    modulus: tuple[float, ...]
    exponent: float | None
    constant: float
    lipschitz_constant: float
    lapse_lipschitz: float | None
    verdict: Verdict
    num_pairs: int
    radius: float
    seed: int
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.verdict is Verdict.PASS

    def to_table(self) -> Table:
        return make_table(
            header=["gap", "modulus"],
            data={"gap": list(self.gaps), "modulus": list(self.modulus)},
            title=f"log-Lipschitz modulus ({self.verdict.value})",
        )

    def to_rich_dict(self) -> dict[str, Any]:
        import lorprod

        init_kwargs = {
            field.name: getattr(self, field.name) for field in dataclasses.fields(self)
        }
        init_kwargs["verdict"] = self.verdict.value
        init_kwargs["window"] = list(self.window)
        init_kwargs["gaps"] = list(self.gaps)
        init_kwargs["modulus"] = list(self.modulus)
        return {
            "version": lorprod.__version__,
            "type": get_object_provenance(self),
            "init_kwargs": init_kwargs,
        }

    @classmethod
    def from_rich_dict(cls, data: dict[str, Any]) -> "RegularityReport":
        kwargs = dict(data["init_kwargs"])
        kwargs["verdict"] = Verdict(kwargs["verdict"])
        kwargs["window"] = tuple(kwargs["window"])
        kwargs["gaps"] = tuple(kwargs["gaps"])
        kwargs["modulus"] = tuple(kwargs["modulus"])
        return cls(**kwargs)


def verify_regularity(
    fam: MetricFamily,
    window: tuple[float, float] | None = None,
    nodes: Iterable[Node] | None = None,
    seed: int | None = None,
    *,
    radius: float | None = None,
    samples_per_scale: int = 8,
    tolerance: float = 0.1,
) -> RegularityReport:
    """Estimate the modulus of continuity of the family in time.

    Parameters
    ----------
    fam : MetricFamily
        The family to examine.
    window : tuple[float, float] | None, optional
        The compact window J, by default the whole interval.
    nodes : Iterable[Node] | None, optional
        The node set K, by default every node.
    seed : int | None, optional
        Seed for the sampled base times, by default None (a fresh seed).
    radius : float | None, optional
        Pairs whose smallest sampled distance is below radius take part,
        by default half the diameter of K.
    samples_per_scale : int, optional
        Base times per gap, by default 8. The left end of J is always used.
    tolerance : float, optional
        Slack on the exponent, by default 0.1.

    Returns
    -------
    RegularityReport
        The sampled modulus, the least squares fit of its log-log graph
        and the verdict. Fewer than 20 admissible pairs give an
        inconclusive verdict.
    """
    seed = process_seed(seed)
    rng = np.random.default_rng(seed)
    lo, hi = fam.interval if window is None else (float(window[0]), float(window[1]))
    fam.check_time(lo)
    fam.check_time(hi)
    if not lo < hi:
        msg = f"window must have positive length, got {(lo, hi)}"
        raise DomainError(msg)

    space = fam.space
    idx = np.array(
        sorted({space.index(n) for n in (space.nodes if nodes is None else nodes)}),
        dtype=np.intp,
    )
    if len(idx) == 0:
        msg = "the node set must not be empty"
        raise ValueError(msg)
    pi, pj = np.triu_indices(len(idx), k=1)
    pi, pj = idx[pi], idx[pj]

    probes = np.array([fam.matrix_at(float(s))[pi, pj] for s in np.linspace(lo, hi, 9)])
    if radius is None:
        diameter = float(fam.matrix_at(0.5 * (lo + hi))[pi, pj].max()) if len(pi) else 0.0
        radius = 0.5 * diameter
    admissible = probes.min(axis=0) < radius if len(pi) else np.zeros(0, dtype=bool)
    pi, pj = pi[admissible], pj[admissible]
    num_pairs = len(pi)

    if num_pairs < MIN_PAIRS:
        logger.info("regularity inconclusive: %d admissible pairs", num_pairs)
        return RegularityReport(
            window=(lo, hi),
            gaps=(),
            modulus=(),
            exponent=None,
            constant=math.nan,
            lipschitz_constant=math.nan,
            lapse_lipschitz=None,
            verdict=Verdict.INCONCLUSIVE,
            num_pairs=num_pairs,
            radius=float(radius),
            seed=seed,
            tolerance=tolerance,
        )

    length = hi - lo
    gaps = np.geomspace(0.5 * length, 1e-4 * length, NUM_SCALES)
    modulus = np.zeros(NUM_SCALES)
    lapse_quotient = 0.0
    conformal = isinstance(fam, ConformalFamily)
    for k, gap in enumerate(gaps):
        bases = np.concatenate(([lo], rng.uniform(lo, hi - gap, samples_per_scale - 1)))
        for s in bases:
            s0, s1 = float(s), float(min(s + gap, hi))
            d0 = fam.matrix_at(s0)[pi, pj]
            d1 = fam.matrix_at(s1)[pi, pj]
            modulus[k] = max(modulus[k], float(np.abs(np.log(d0 / d1)).max()))
            if conformal:
                h0 = fam.lapse_values(s0)[idx]
                h1 = fam.lapse_values(s1)[idx]
                lapse_quotient = max(lapse_quotient, float(np.abs(h0 - h1).max()) / gap)

    positive = modulus > 1e-14
    if positive.sum() < 2:
        exponent = None
        constant = 0.0
        verdict = Verdict.PASS
    else:
        slope, intercept = np.polyfit(np.log(gaps[positive]), np.log(modulus[positive]), 1)
        exponent = float(slope)
        constant = float(math.exp(intercept))
        verdict = Verdict.PASS if exponent >= 1 - tolerance else Verdict.FAIL

    report = RegularityReport(
        window=(lo, hi),
        gaps=tuple(float(g) for g in gaps),
        modulus=tuple(float(m) for m in modulus),
        exponent=exponent,
        constant=constant,
        lipschitz_constant=float((modulus / gaps).max()),
        lapse_lipschitz=lapse_quotient if conformal else None,
        verdict=verdict,
        num_pairs=num_pairs,
        radius=float(radius),
        seed=seed,
        tolerance=tolerance,
    )
    logger.info(
        "regularity %s: exponent=%s constant=%.6g pairs=%d",
        verdict.value,
        exponent,
        constant,
        num_pairs,
    )
    return report
