"""Viscous sea-ice stress divergence on triangular meshes.

Cross-verified Fourier symbols and discrete operators for the vertex, cell
and edge velocity placements, the kernel-removing stabilizations of the cell
and edge schemes, and an explicit mEVP solver with a moving-cyclone
benchmark demonstrating the resulting stability constraints.
"""

from .grids import (
    CELL_CORRECTED,
    CELL_V,
    EDGE_CR,
    GRID_KINDS,
    VERTEX_CONSISTENT,
    VERTEX_LUMPED,
)
from .mesh import GeoMeasures, TriMesh, build_periodic_mesh, geometric_measures
from .rheology import RheologyParams
from .symbols import Wavevector, wavevector_from_ka

__version__ = "0.1.0"

__all__ = [
    "CELL_CORRECTED",
    "CELL_V",
    "EDGE_CR",
    "GRID_KINDS",
    "VERTEX_CONSISTENT",
    "VERTEX_LUMPED",
    "GeoMeasures",
    "TriMesh",
    "build_periodic_mesh",
    "geometric_measures",
    "RheologyParams",
    "Wavevector",
    "wavevector_from_ka",
    "__version__",
]
