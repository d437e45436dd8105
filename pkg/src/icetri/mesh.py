"""Doubly periodic meshes of equilateral triangles.

Vertices sit on the lattice n1*(1,0)*a + n2*(1/2, sqrt(3)/2)*a with periodic
wrap after nx and ny periods.  Each lattice point owns one up-pointing cell,
one down-pointing cell and three edges, so vertices, cells and edges come in
1:2:3 proportion.  Entity ids are dense and block ordered (all U cells before
all D cells; edges grouped by orientation class A=(a,0), B=(a/2,sqrt3*a/2),
C=(-a/2,sqrt3*a/2)) so that amplitude vectors of translation-invariant
operators map directly onto id blocks.

Besides connectivity, the builder precomputes the geometric tables consumed
by the discrete operators: P1 and Crouzeix-Raviart basis gradients per cell,
median-dual contour weights per vertex, across-edge vectors (D-cell centroid
to U-cell centroid), per-cell outward edge normals, and the four flank edges
of every edge together with the sign of the inter-element jump of their
nonconforming basis functions.

The mesh is immutable after construction and safe to share between workers.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SQRT3 = np.sqrt(3.0)

CELL_U, CELL_D = 0, 1
EDGE_A, EDGE_B, EDGE_C = 0, 1, 2


class MeshError(ValueError):
    """Invalid mesh parameters or inconsistent connectivity."""


@dataclass(frozen=True)
class GeoMeasures:
    """Areas and lengths of mesh entities (uniform over the mesh).

    cell_area      triangle area
    vertex_area    median-dual control volume area, sum of adjacent cell
                   areas / 3 (twice the cell area on the uniform mesh)
    edge_area      area of the diagonal nonconforming mass entry,
                   2/3 of the cell area
    edge_length    edge length (= a)
    segment_length length of one median-dual half segment
    across_length  centroid-to-centroid distance across an edge, a/sqrt(3)
    """

    cell_area: float
    vertex_area: float
    edge_area: float
    edge_length: float
    segment_length: float
    across_length: float


@dataclass
class TriMesh:
    nx: int
    ny: int
    a: float
    h: float

    n_vertices: int
    n_cells: int
    n_edges: int

    # base (unwrapped) positions of owned entities
    vert_pos: np.ndarray      # (N_v, 2)
    cell_centroid: np.ndarray  # (N_c, 2)
    edge_mid: np.ndarray      # (N_e, 2)

    # connectivity
    cell_verts: np.ndarray    # (N_c, 3) vertex ids, CCW; slot i opposite edge slot i
    cell_edges: np.ndarray    # (N_c, 3) edge ids, slot i opposite vertex slot i
    edge_verts: np.ndarray    # (N_e, 2) endpoint vertex ids
    edge_cells: np.ndarray    # (N_e, 2) [U-side cell, D-side cell]
    vert_cells: np.ndarray    # (N_v, 6) incident cells in CCW order, alternating U/D
    vert_neigh: np.ndarray    # (N_v, 6) lattice neighbours across incident edges
    cell_class: np.ndarray    # (N_c,) CELL_U / CELL_D
    edge_class: np.ndarray    # (N_e,) EDGE_A / EDGE_B / EDGE_C

    # geometry for operators (consistently unwrapped per entity)
    cell_vert_pos: np.ndarray   # (N_c, 3, 2) triangle corner coordinates
    cell_grad_p1: np.ndarray    # (N_c, 3, 2) gradients of P1 basis per corner
    cell_grad_cr: np.ndarray    # (N_c, 3, 2) gradients of CR basis per edge slot
    cell_edge_nl: np.ndarray    # (N_c, 3, 2) outward normal * length per edge slot
    vert_cell_w: np.ndarray     # (N_v, 6, 2) median-dual contour weights
    vert_cell_grad: np.ndarray  # (N_v, 6, 2) grad of own P1 hat in each incident cell
    edge_r: np.ndarray          # (N_e, 2) across vector, D centroid -> U centroid
    edge_cell_gradcr: np.ndarray  # (N_e, 2, 2) grad of own CR basis in [U, D] cell

    # flank tables for the edge-jump stabilization
    edge_flank: np.ndarray       # (N_e, 4) the four flank edges of each edge
    edge_flank_sign: np.ndarray  # (N_e, 4) jump sign of the flank basis
    edge_flank_of: np.ndarray    # (N_e, 4) edges having this edge as a flank
    edge_flank_of_sign: np.ndarray  # (N_e, 4) own jump sign at those edges

    # periodicity
    period1: np.ndarray  # (2,) wrap vector nx*a*(1,0)
    period2: np.ndarray  # (2,) wrap vector ny*a*(1/2,sqrt3/2)

    def measures(self) -> GeoMeasures:
        return geometric_measures(self)

    def dof_positions(self, staggering: str) -> np.ndarray:
        """Velocity point coordinates for 'vertex', 'cell' or 'edge' staggering."""
        if staggering == "vertex":
            return self.vert_pos
        if staggering == "cell":
            return self.cell_centroid
        if staggering == "edge":
            return self.edge_mid
        raise MeshError(f"unknown staggering {staggering!r}")

    def n_dof(self, staggering: str) -> int:
        return len(self.dof_positions(staggering))

    def seam_vertex_mask(self) -> np.ndarray:
        """Vertices on the periodic seam (lattice row n1=0 or n2=0)."""
        v = np.arange(self.n_vertices)
        i = v % self.nx
        j = v // self.nx
        return (i == 0) | (j == 0)

    def boundary_dof_mask(self, staggering: str) -> np.ndarray:
        """Velocity points adjacent to the seam; zeroed in bounded-domain runs."""
        seam = self.seam_vertex_mask()
        if staggering == "vertex":
            return seam
        if staggering == "cell":
            return seam[self.cell_verts].any(axis=1)
        if staggering == "edge":
            return seam[self.edge_verts].any(axis=1)
        raise MeshError(f"unknown staggering {staggering!r}")

    def interior_cell_mask(self) -> np.ndarray:
        return ~self.boundary_dof_mask("cell")

    def interior_edge_mask(self) -> np.ndarray:
        """Edges whose both adjacent cells are interior."""
        interior = self.interior_cell_mask()
        return interior[self.edge_cells].all(axis=1)


def build_periodic_mesh(nx: int, ny: int, a: float) -> TriMesh:
    """Build a doubly periodic equilateral triangulation with nx*ny rhombic periods.

    Raises MeshError for nx or ny below 2 (the wrap would create duplicate
    incidences) or non-positive edge length.
    """
    if int(nx) != nx or int(ny) != ny:
        raise MeshError("nx and ny must be integers")
    nx, ny = int(nx), int(ny)
    if nx < 2 or ny < 2:
        raise MeshError("need nx >= 2 and ny >= 2 for a valid periodic mesh")
    if not (a > 0):
        raise MeshError("edge length a must be positive")

    a = float(a)
    h = 0.5 * SQRT3 * a
    n_v = nx * ny
    n_c = 2 * n_v
    n_e = 3 * n_v

    v = np.arange(n_v)
    i = v % nx
    j = v // nx
    ip = (i + 1) % nx
    im = (i - 1) % nx
    jp = (j + 1) % ny
    jm = (j - 1) % ny

    def vid(ii, jj):
        return jj * nx + ii

    # ids: U cell = lattice id, D cell = N_v + lattice id,
    # A edge = id, B edge = N_v + id, C edge = 2*N_v + id
    A = v
    B = n_v + v
    C = 2 * n_v + v

    vert_pos = np.stack([i * a + j * (0.5 * a), j * h], axis=1)

    cell_verts = np.empty((n_c, 3), dtype=np.int64)
    cell_verts[:n_v] = np.stack([v, vid(ip, j), vid(i, jp)], axis=1)
    cell_verts[n_v:] = np.stack([vid(ip, j), vid(ip, jp), vid(i, jp)], axis=1)

    # edge slot i sits opposite vertex slot i
    cell_edges = np.empty((n_c, 3), dtype=np.int64)
    cell_edges[:n_v] = np.stack([C, B, A], axis=1)
    cell_edges[n_v:] = np.stack([vid(i, jp), C, n_v + vid(ip, j)], axis=1)

    edge_verts = np.empty((n_e, 2), dtype=np.int64)
    edge_verts[A] = np.stack([v, vid(ip, j)], axis=1)
    edge_verts[B] = np.stack([v, vid(i, jp)], axis=1)
    edge_verts[C] = np.stack([vid(ip, j), vid(i, jp)], axis=1)

    edge_cells = np.empty((n_e, 2), dtype=np.int64)
    edge_cells[A] = np.stack([v, n_v + vid(i, jm)], axis=1)
    edge_cells[B] = np.stack([v, n_v + vid(im, j)], axis=1)
    edge_cells[C] = np.stack([v, n_v + v], axis=1)

    vert_cells = np.stack(
        [v, n_v + vid(im, j), vid(im, j), n_v + vid(im, jm), vid(i, jm), n_v + vid(i, jm)],
        axis=1,
    )
    vert_neigh = np.stack(
        [vid(ip, j), vid(i, jp), vid(im, jp), vid(im, j), vid(i, jm), vid(ip, jm)],
        axis=1,
    )

    cell_class = np.empty(n_c, dtype=np.uint8)
    cell_class[:n_v] = CELL_U
    cell_class[n_v:] = CELL_D
    edge_class = np.empty(n_e, dtype=np.uint8)
    edge_class[A] = EDGE_A
    edge_class[B] = EDGE_B
    edge_class[C] = EDGE_C

    # unwrapped per-entity coordinates from the owning lattice point
    base = vert_pos
    off_u = np.array([[0.0, 0.0], [a, 0.0], [0.5 * a, h]])
    off_d = np.array([[a, 0.0], [1.5 * a, h], [0.5 * a, h]])
    cell_vert_pos = np.empty((n_c, 3, 2))
    cell_vert_pos[:n_v] = base[:, None, :] + off_u[None, :, :]
    cell_vert_pos[n_v:] = base[:, None, :] + off_d[None, :, :]

    cell_centroid = cell_vert_pos.mean(axis=1)

    edge_mid = np.empty((n_e, 2))
    edge_mid[A] = base + np.array([0.5 * a, 0.0])
    edge_mid[B] = base + np.array([0.25 * a, 0.5 * h])
    edge_mid[C] = base + np.array([0.75 * a, 0.5 * h])

    # across vector r, from D-side centroid to U-side centroid, constant per class
    edge_r = np.empty((n_e, 2))
    edge_r[A] = np.array([0.0, 2.0 * h / 3.0])
    edge_r[B] = np.array([0.5 * a, -h / 3.0])
    edge_r[C] = np.array([-0.5 * a, -h / 3.0])

    # P1 basis gradients: grad lambda_i = rot90(p_{i+2} - p_{i+1}) / (2A)
    p = cell_vert_pos
    cell_area = 0.5 * a * h
    d12 = p[:, [2, 0, 1], :] - p[:, [1, 2, 0], :]
    cell_grad_p1 = np.stack([-d12[..., 1], d12[..., 0]], axis=-1) / (2.0 * cell_area)

    # CR basis on edge slot i is 1 - 2*lambda_i (edge i opposite vertex i)
    cell_grad_cr = -2.0 * cell_grad_p1

    # outward normal * length of edge slot i (edge from p_{i+1} to p_{i+2}, CCW)
    cell_edge_nl = np.stack([d12[..., 1], -d12[..., 0]], axis=-1)

    # median-dual contour weights: per incident cell, rot-90 of the vector
    # between the midpoints of the two own edges, ordered CCW around the vertex
    w6 = np.array(
        [
            [0.5 * h, 0.25 * a],
            [0.0, 0.5 * a],
            [-0.5 * h, 0.25 * a],
            [-0.5 * h, -0.25 * a],
            [0.0, -0.5 * a],
            [0.5 * h, -0.25 * a],
        ]
    )
    vert_cell_w = np.broadcast_to(w6, (n_v, 6, 2)).copy()

    # gradient of the vertex's own hat function inside each incident cell;
    # local slot of the vertex follows the fixed CCW pattern [0,0,1,1,2,2]
    slot = np.array([0, 0, 1, 1, 2, 2])
    vert_cell_grad = cell_grad_p1[vert_cells, slot[None, :], :]

    # gradient of the edge's own CR function in its U and D cells
    loc_u = _local_slot(cell_edges, edge_cells[:, 0], np.arange(n_e))
    loc_d = _local_slot(cell_edges, edge_cells[:, 1], np.arange(n_e))
    edge_cell_gradcr = np.stack(
        [
            cell_grad_cr[edge_cells[:, 0], loc_u, :],
            cell_grad_cr[edge_cells[:, 1], loc_d, :],
        ],
        axis=1,
    )

    # flank tables: the four edges of the two cells sharing e (e excluded),
    # with the endpoint value of their basis jump across e (U side minus D side)
    edge_flank = np.empty((n_e, 4), dtype=np.int64)
    edge_flank_sign = np.empty((n_e, 4))
    edge_flank[A] = np.stack([B, n_v + vid(ip, jm), C, 2 * n_v + vid(i, jm)], axis=1)
    edge_flank[B] = np.stack([A, vid(im, jp), C, 2 * n_v + vid(im, j)], axis=1)
    edge_flank[C] = np.stack([A, vid(i, jp), B, n_v + vid(ip, j)], axis=1)
    edge_flank_sign[:] = np.array([1.0, 1.0, -1.0, -1.0])

    edge_flank_of = np.empty((n_e, 4), dtype=np.int64)
    edge_flank_of_sign = np.empty((n_e, 4))
    edge_flank_of[A] = np.stack([B, n_v + vid(ip, jm), C, 2 * n_v + vid(i, jm)], axis=1)
    edge_flank_of_sign[A] = [1.0, 1.0, 1.0, 1.0]
    edge_flank_of[B] = np.stack([A, vid(im, jp), C, 2 * n_v + vid(im, j)], axis=1)
    edge_flank_of_sign[B] = [1.0, 1.0, -1.0, -1.0]
    edge_flank_of[C] = np.stack([A, vid(i, jp), B, n_v + vid(ip, j)], axis=1)
    edge_flank_of_sign[C] = [-1.0, -1.0, -1.0, -1.0]

    period1 = np.array([nx * a, 0.0])
    period2 = np.array([0.5 * ny * a, ny * h])

    mesh = TriMesh(
        nx=nx,
        ny=ny,
        a=a,
        h=h,
        n_vertices=n_v,
        n_cells=n_c,
        n_edges=n_e,
        vert_pos=vert_pos,
        cell_centroid=cell_centroid,
        edge_mid=edge_mid,
        cell_verts=cell_verts,
        cell_edges=cell_edges,
        edge_verts=edge_verts,
        edge_cells=edge_cells,
        vert_cells=vert_cells,
        vert_neigh=vert_neigh,
        cell_class=cell_class,
        edge_class=edge_class,
        cell_vert_pos=cell_vert_pos,
        cell_grad_p1=cell_grad_p1,
        cell_grad_cr=cell_grad_cr,
        cell_edge_nl=cell_edge_nl,
        vert_cell_w=vert_cell_w,
        vert_cell_grad=vert_cell_grad,
        edge_r=edge_r,
        edge_cell_gradcr=edge_cell_gradcr,
        edge_flank=edge_flank,
        edge_flank_sign=edge_flank_sign,
        edge_flank_of=edge_flank_of,
        edge_flank_of_sign=edge_flank_of_sign,
        period1=period1,
        period2=period2,
    )
    for arr in vars(mesh).values():
        if isinstance(arr, np.ndarray):
            arr.flags.writeable = False
    return mesh


def _local_slot(table: np.ndarray, rows: np.ndarray, wanted: np.ndarray) -> np.ndarray:
    """Index of `wanted[k]` within `table[rows[k]]`."""
    match = table[rows] == wanted[:, None]
    if not match.any(axis=1).all():
        raise MeshError("inconsistent incidence tables")
    return match.argmax(axis=1)


def geometric_measures(mesh: TriMesh) -> GeoMeasures:
    a, h = mesh.a, mesh.h
    cell_area = 0.5 * a * h
    return GeoMeasures(
        cell_area=cell_area,
        vertex_area=2.0 * cell_area,
        edge_area=2.0 * cell_area / 3.0,
        edge_length=a,
        segment_length=h / 3.0,
        across_length=a / SQRT3,
    )


def reciprocal_basis(mesh: TriMesh) -> tuple[np.ndarray, np.ndarray]:
    """Reciprocal vectors b1, b2 of the unit lattice (b_i . t_j = 2 pi delta_ij)."""
    a = mesh.a
    b1 = (2.0 * np.pi / a) * np.array([1.0, -1.0 / SQRT3])
    b2 = (2.0 * np.pi / a) * np.array([0.0, 2.0 / SQRT3])
    return b1, b2


def commensurate_wavevector(mesh: TriMesh, p1: int, p2: int) -> np.ndarray:
    """Wavevector (p1/nx)*b1 + (p2/ny)*b2, resolvable on the periodic mesh."""
    b1, b2 = reciprocal_basis(mesh)
    return (p1 / mesh.nx) * b1 + (p2 / mesh.ny) * b2


def is_commensurate(mesh: TriMesh, k: float, l: float, tol: float = 1e-8) -> bool:
    kv = np.array([k, l])
    for q in (mesh.period1, mesh.period2):
        phase = kv @ q / (2.0 * np.pi)
        if abs(phase - round(phase)) > tol:
            return False
    return True
