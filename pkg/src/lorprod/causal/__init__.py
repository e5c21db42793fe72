"""Causal structure, time separation and maximizers on discretised products."""

from lorprod.causal._classify import CausalCharacter, CausalClass, classify, lorentz_length
from lorprod.causal._dag import CausalDAG, LayerSteps, build_causal_dag
from lorprod.causal._separation import (
    CausalDiamond,
    Separation,
    TimeSeparationTable,
    VariationalLength,
    causal_diamond,
    maximizer,
    separation_table,
    time_separation,
    variational_length,
)

__all__ = [
    "CausalCharacter",
    "CausalClass",
    "CausalDAG",
    "CausalDiamond",
    "LayerSteps",
    "Separation",
    "TimeSeparationTable",
    "VariationalLength",
    "build_causal_dag",
    "causal_diamond",
    "classify",
    "lorentz_length",
    "maximizer",
    "separation_table",
    "time_separation",
    "variational_length",
]
