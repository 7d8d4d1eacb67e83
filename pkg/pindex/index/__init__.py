"""P-index computation by crossing count and by closed-form formulas."""

from .crossing import CrossingRecord, IndexPair, bott_sum, index_crossing
from .formulas import (
    Theorem37Report,
    ceiling_parts,
    ellipsoid_index,
    iterate_closed_form,
    pinching_bounds,
    theorem37_check,
)

__all__ = [
    "CrossingRecord",
    "IndexPair",
    "Theorem37Report",
    "bott_sum",
    "ceiling_parts",
    "ellipsoid_index",
    "index_crossing",
    "iterate_closed_form",
    "pinching_bounds",
    "theorem37_check",
]
