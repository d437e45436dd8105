"""Names of the supported velocity placements and symbol variants."""
from __future__ import annotations

VERTEX_LUMPED = "vertex-lumped"
VERTEX_CONSISTENT = "vertex-consistent"
CELL_V = "cell-v"
CELL_CORRECTED = "cell-corrected"
EDGE_CR = "edge-cr"

GRID_KINDS = (VERTEX_LUMPED, VERTEX_CONSISTENT, CELL_V, CELL_CORRECTED, EDGE_CR)

# staggering of the velocity unknowns per grid kind
STAGGERING = {
    VERTEX_LUMPED: "vertex",
    VERTEX_CONSISTENT: "vertex",
    CELL_V: "cell",
    CELL_CORRECTED: "cell",
    EDGE_CR: "edge",
}

# symbol dimension (number of Fourier amplitude slots)
SYMBOL_DIM = {
    VERTEX_LUMPED: 2,
    VERTEX_CONSISTENT: 2,
    CELL_V: 4,
    CELL_CORRECTED: 4,
    EDGE_CR: 6,
}


def check_grid_kind(grid_kind: str) -> str:
    if grid_kind not in GRID_KINDS:
        raise ValueError(f"unknown grid kind {grid_kind!r}; expected one of {GRID_KINDS}")
    return grid_kind
