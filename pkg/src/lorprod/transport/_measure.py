"""Finitely supported probability measures and their relative entropy."""

import dataclasses
import math
from collections.abc import Hashable, Iterable, Mapping
from typing import Any

import numpy as np

WEIGHT_TOL = 1e-12


@dataclasses.dataclass(frozen=True, eq=False)
class DiscreteMeasure:
    """A probability measure on finitely many distinct atoms.

    Parameters
    ----------
    atoms : tuple[Hashable, ...]
        Times, events or any hashable points.
    weights : np.ndarray
        Nonnegative masses summing to one.
    """

    atoms: tuple[Hashable, ...]
    weights: np.ndarray

    def __post_init__(self) -> None:
        weights = np.asarray(self.weights, dtype=float)
        if weights.shape != (len(self.atoms),):
            msg = "one weight per atom is required"
            raise ValueError(msg)
        if len(set(self.atoms)) != len(self.atoms):
            msg = "atoms must be distinct"
            raise ValueError(msg)
        if np.any(weights < 0):
            msg = "weights must be nonnegative"
            raise ValueError(msg)
        if abs(weights.sum() - 1) > WEIGHT_TOL:
            msg = f"weights sum to {weights.sum()!r}, not 1"
            raise ValueError(msg)
        weights.setflags(write=False)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def uniform(cls, atoms: Iterable[Hashable]) -> "DiscreteMeasure":
        atoms = tuple(atoms)
        return cls(atoms, np.full(len(atoms), 1 / len(atoms)))

    @classmethod
    def point(cls, atom: Hashable) -> "DiscreteMeasure":
        return cls((atom,), np.ones(1))

    @classmethod
    def from_mapping(cls, masses: Mapping[Hashable, float]) -> "DiscreteMeasure":
        return cls(tuple(masses), np.array(list(masses.values()), dtype=float))

    def __len__(self) -> int:
        return len(self.atoms)

    def mass(self, atom: Hashable) -> float:
        try:
            return float(self.weights[self.atoms.index(atom)])
        except ValueError:
            return 0.0

    @property
    def support(self) -> tuple[Hashable, ...]:
        return tuple(a for a, w in zip(self.atoms, self.weights, strict=True) if w > 0)

    def densities(self, reference: "DiscreteMeasure | Mapping[Hashable, float]") -> np.ndarray:
        """Radon-Nikodym densities against a reference, inf off its support."""
        masses = _reference_masses(reference)
        out = np.empty(len(self.atoms))
        for k, (atom, w) in enumerate(zip(self.atoms, self.weights, strict=True)):
            ref = masses.get(atom, 0.0)
            out[k] = w / ref if ref > 0 else (0.0 if w == 0 else math.inf)
        return out

    def to_dict(self) -> dict[str, Any]:
        return {"atoms": list(self.atoms), "weights": self.weights.tolist()}


def _reference_masses(reference: DiscreteMeasure | Mapping[Hashable, float]) -> dict[Hashable, float]:
    if isinstance(reference, DiscreteMeasure):
        return dict(zip(reference.atoms, reference.weights.tolist(), strict=True))
    return {k: float(v) for k, v in reference.items()}


def entropy(mu: DiscreteMeasure, reference: DiscreteMeasure | Mapping[Hashable, float]) -> float:
    """Relative entropy sum rho log rho d(reference), +inf off the reference support."""
    rho = mu.densities(reference)
    charged = mu.weights > 0
    if np.any(np.isinf(rho[charged])):
        return math.inf
    return float(np.sum(mu.weights[charged] * np.log(rho[charged])))
