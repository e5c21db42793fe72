"""The spatial factor: graphs, paths and conformal distances."""

from lorprod.space._base_space import (
    BaseSpace,
    Node,
    SpacePath,
    WeightLike,
    conformal_distance,
    distance_matrix,
    path_length,
    path_space,
    shortest_distance,
)
from lorprod.space._load import load_space

__all__ = [
    "BaseSpace",
    "Node",
    "SpacePath",
    "WeightLike",
    "conformal_distance",
    "distance_matrix",
    "load_space",
    "path_length",
    "path_space",
    "shortest_distance",
]
