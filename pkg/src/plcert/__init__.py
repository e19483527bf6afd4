"""Exact degree computation and surjectivity certificates for piecewise affine maps."""

__version__ = "0.1.0"

from .certify import (
    certify_surjective,
    classify_1d,
    classify_homeomorphism,
    injectivity_falsifier,
    orientation_summary,
)
from .degree import (
    classify_regular,
    far_regular_value,
    global_degree,
    local_degree,
    preimage_count_profile,
    preimages,
    sample_regular_value,
)
from .plfunction import Cell, PLFunction, Selection, evaluate, locate, split_cells, validate
from .polyhedra import Halfspace, HPolyhedron

__all__ = [
    "Cell",
    "Halfspace",
    "HPolyhedron",
    "PLFunction",
    "Selection",
    "certify_surjective",
    "classify_1d",
    "classify_homeomorphism",
    "classify_regular",
    "evaluate",
    "far_regular_value",
    "global_degree",
    "injectivity_falsifier",
    "local_degree",
    "locate",
    "orientation_summary",
    "preimage_count_profile",
    "preimages",
    "sample_regular_value",
    "split_cells",
    "validate",
]
