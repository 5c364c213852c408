"""Finite combinatorics of ab-initio Hrushovski constructions."""

from __future__ import annotations

from .amalgam import free_join, verify_full_amalgamation
from .errors import HrushovskiError, InputError, InternalError, NotClosedError, ResourceError, SnapshotError
from .forests import (
    build_pseudofinite_witness,
    check_star_homogeneity,
    check_tuniv,
    delta_components,
    gamma_cl_eval,
    is_forest,
    theta_eval,
)
from .generic import Approximation, new_approximation, replay, snapshot
from .minimal_pairs import Kind, build_zero_biminimal, chi, classify_pair
from .predimension import ClassParams, closure, delta, delta_of, delta_rel, is_closed, is_in_class
from .structures import Embedding, Structure, canonical_form, enumerate_embeddings, is_isomorphic
from .trees import TreeCatalog

__all__ = [
    "Approximation",
    "ClassParams",
    "Embedding",
    "HrushovskiError",
    "InputError",
    "InternalError",
    "Kind",
    "NotClosedError",
    "ResourceError",
    "SnapshotError",
    "Structure",
    "TreeCatalog",
    "build_pseudofinite_witness",
    "build_zero_biminimal",
    "canonical_form",
    "check_star_homogeneity",
    "check_tuniv",
    "chi",
    "classify_pair",
    "closure",
    "delta",
    "delta_components",
    "delta_of",
    "delta_rel",
    "enumerate_embeddings",
    "free_join",
    "gamma_cl_eval",
    "is_closed",
    "is_forest",
    "is_in_class",
    "is_isomorphic",
    "new_approximation",
    "replay",
    "snapshot",
    "theta_eval",
    "verify_full_amalgamation",
]
