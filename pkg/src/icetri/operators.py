"""Discrete strain-rate and stress-divergence operators on the periodic mesh.

Three velocity placements are supported:

  vertex   P1 velocities at vertices; strains and stresses constant per cell;
           divergence tested against the P1 hats, divided by the median-dual
           area (lumped) or solved with the consistent mass matrix.
  cell     full velocity vectors at cell centroids; velocity derivatives at
           vertices by a contour integral over the median-dual control volume;
           either used directly at vertices (rank deficient) or averaged to
           edges and corrected so that the across-edge directional derivative
           matches the across-edge velocity difference; divergence by the
           Gauss theorem per triangle.
  edge     nonconforming (Crouzeix-Raviart) velocities at edge midpoints;
           strains per cell; divergence tested against the nonconforming
           basis with an optional penalty on inter-element velocity jumps.

Velocity arrays have shape (n_dof, 2) and may be real or complex; strain and
stress arrays carry the components (xx, xy, yy) in shape (n_elem, 3).  All
assembly is gather-based and therefore deterministic.
"""
from __future__ import annotations

import numpy as np

from .grids import (
    CELL_CORRECTED,
    CELL_V,
    EDGE_CR,
    VERTEX_CONSISTENT,
    VERTEX_LUMPED,
    check_grid_kind,
)
from .mesh import TriMesh


class SolveError(RuntimeError):
    """Iterative solve did not reach the requested residual."""


def _sym_components(grad: np.ndarray) -> np.ndarray:
    """(n,2,2) velocity gradient -> (n,3) strain components (xx, xy, yy)."""
    out = np.empty(grad.shape[:-2] + (3,), dtype=grad.dtype)
    out[..., 0] = grad[..., 0, 0]
    out[..., 1] = 0.5 * (grad[..., 0, 1] + grad[..., 1, 0])
    out[..., 2] = grad[..., 1, 1]
    return out


def strain_vertex_grid(mesh: TriMesh, u: np.ndarray) -> np.ndarray:
    """Cell strain rates of a P1 vertex velocity field; exact for linear fields."""
    grad = np.einsum("csi,csj->cij", mesh.cell_grad_p1, u[mesh.cell_verts])
    return _sym_components(grad)


def divergence_vertex_grid(
    mesh: TriMesh, sig: np.ndarray, mass: str = "lumped"
) -> np.ndarray:
    """Stress divergence at vertices from per-cell stresses.

    The weak right side is assembled over the six incident cells; division by
    the median-dual area gives the lumped variant, the consistent variant
    solves the P1 mass system by conjugate gradients.
    """
    cell_area = 0.5 * mesh.a * mesh.h
    s = sig[mesh.vert_cells]
    g = mesh.vert_cell_grad
    rx = -cell_area * (g[..., 0] * s[..., 0] + g[..., 1] * s[..., 1]).sum(axis=1)
    ry = -cell_area * (g[..., 0] * s[..., 1] + g[..., 1] * s[..., 2]).sum(axis=1)
    rhs = np.stack([rx, ry], axis=-1)
    if mass == "lumped":
        return rhs / (2.0 * cell_area)
    if mass == "consistent":
        return consistent_mass_solve(mesh, rhs)
    raise ValueError("mass must be 'lumped' or 'consistent'")


def consistent_mass_solve(
    mesh: TriMesh, rhs: np.ndarray, tol: float = 1e-13, maxiter: int = 1000
) -> np.ndarray:
    """Solve the consistent P1 mass system M x = rhs by conjugate gradients.

    M is symmetric positive definite on the periodic mesh; failure to reach
    the residual target raises SolveError with the residual attained.
    """
    cell_area = 0.5 * mesh.a * mesh.h

    def matvec(x):
        return cell_area * (x + x[mesh.vert_neigh].sum(axis=1) / 6.0)

    x = rhs / (2.0 * cell_area)  # lumped guess
    r = rhs - matvec(x)
    p = r.copy()
    rr = np.vdot(r, r).real
    bnorm = np.sqrt(np.vdot(rhs, rhs).real)
    if bnorm == 0.0:
        return np.zeros_like(rhs)
    for _ in range(maxiter):
        if np.sqrt(rr) <= tol * bnorm:
            return x
        Ap = matvec(p)
        alpha = rr / np.vdot(p, Ap).real
        x = x + alpha * p
        r = r - alpha * Ap
        rr_new = np.vdot(r, r).real
        p = r + (rr_new / rr) * p
        rr = rr_new
    raise SolveError(
        f"consistent mass solve stalled at residual {np.sqrt(rr) / bnorm:.3e}"
    )


def gradient_cell_to_vertex(mesh: TriMesh, u: np.ndarray) -> np.ndarray:
    """(n_vertices, 2, 2) velocity derivatives d_i u_j at vertices from cell
    velocities, via the contour integral over the median-dual control volume."""
    vertex_area = mesh.a * mesh.h
    grad = np.einsum("vsi,vsj->vij", mesh.vert_cell_w, u[mesh.vert_cells])
    return grad / vertex_area


def strain_cell_caseV(mesh: TriMesh, u: np.ndarray) -> np.ndarray:
    """Vertex strain rates from cell velocities (rank-deficient variant)."""
    return _sym_components(gradient_cell_to_vertex(mesh, u))


def vertex_to_edge_average(mesh: TriMesh, field_v: np.ndarray) -> np.ndarray:
    """Half sum of the two endpoint values, for any per-vertex field."""
    return 0.5 * (field_v[mesh.edge_verts[:, 0]] + field_v[mesh.edge_verts[:, 1]])


def corrected_edge_gradient(mesh: TriMesh, u: np.ndarray) -> np.ndarray:
    """(n_edges, 2, 2) velocity derivatives at edge midpoints.

    Vertex derivatives are averaged onto edges and then projected so that the
    directional derivative along the across-edge vector r equals the velocity
    difference of the two adjacent cells.  The constraint holds exactly after
    the correction, which removes the checkerboard kernel of the vertex
    derivatives while leaving linear fields untouched.
    """
    star = vertex_to_edge_average(mesh, gradient_cell_to_vertex(mesh, u))
    jump = u[mesh.edge_cells[:, 0]] - u[mesh.edge_cells[:, 1]]
    r = mesh.edge_r
    r2 = (r * r).sum(axis=1)
    if not (r2 > 0).all():
        raise ValueError("degenerate across-edge vector")
    resid = np.einsum("ei,eij->ej", r, star) - jump
    return star - r[:, :, None] * (resid / r2[:, None])[:, None, :]


def strain_cell_corrected(mesh: TriMesh, u: np.ndarray) -> np.ndarray:
    """Edge strain rates from cell velocities with the across-edge correction."""
    return _sym_components(corrected_edge_gradient(mesh, u))


def divergence_cell_grid(mesh: TriMesh, sig_edge: np.ndarray) -> np.ndarray:
    """Stress divergence at cells from mid-edge stresses, Gauss theorem per triangle."""
    cell_area = 0.5 * mesh.a * mesh.h
    s = sig_edge[mesh.cell_edges]
    nl = mesh.cell_edge_nl
    outx = (nl[..., 0] * s[..., 0] + nl[..., 1] * s[..., 1]).sum(axis=1)
    outy = (nl[..., 0] * s[..., 1] + nl[..., 1] * s[..., 2]).sum(axis=1)
    return np.stack([outx, outy], axis=-1) / cell_area


def strain_edge_CR(mesh: TriMesh, u: np.ndarray) -> np.ndarray:
    """Cell strain rates of a nonconforming linear edge velocity field."""
    grad = np.einsum("csi,csj->cij", mesh.cell_grad_cr, u[mesh.cell_edges])
    return _sym_components(grad)


def edge_jump_sums(mesh: TriMesh, u: np.ndarray) -> np.ndarray:
    """Per edge, the endpoint amplitude of the inter-element jump of u,
    accumulated over the four flank basis functions."""
    return np.einsum("ef,ef...->e...", mesh.edge_flank_sign, u[mesh.edge_flank])


def divergence_edge_CR(
    mesh: TriMesh,
    sig_cell: np.ndarray,
    u: np.ndarray,
    eps: float = 0.0,
    eta_edge=None,
) -> np.ndarray:
    """Stress divergence at edges from per-cell stresses, with the optional
    jump penalty -eps*(2 eta / l_e) acting on the velocity field itself.

    `eta_edge` is the per-edge viscosity weighting the penalty (scalar or
    array); it is required when eps is nonzero.
    """
    area_ratio = 1.5  # cell area over nonconforming mass entry
    s = sig_cell[mesh.edge_cells]
    g = mesh.edge_cell_gradcr
    outx = -area_ratio * (g[..., 0] * s[..., 0] + g[..., 1] * s[..., 1]).sum(axis=1)
    outy = -area_ratio * (g[..., 0] * s[..., 1] + g[..., 1] * s[..., 2]).sum(axis=1)
    out = np.stack([outx, outy], axis=-1)
    if eps != 0.0:
        if eta_edge is None:
            raise ValueError("eta_edge is required for a nonzero penalty")
        edge_area = mesh.a * mesh.h / 3.0
        ju = edge_jump_sums(mesh, u)
        weighted = np.asarray(eta_edge).reshape(-1, 1) * ju if np.ndim(eta_edge) else eta_edge * ju
        gathered = weighted[mesh.edge_flank_of]
        stab = np.einsum("ef,ef...->e...", mesh.edge_flank_of_sign, gathered)
        out = out - (2.0 * eps / (3.0 * edge_area)) * stab
    return out


def stress_divergence(
    mesh: TriMesh,
    grid_kind: str,
    u: np.ndarray,
    eta: float,
    zeta: float,
    eps: float = 0.0,
    mass: str | None = None,
) -> np.ndarray:
    """Constant-viscosity stress divergence chain of `grid_kind` applied to u.

    Used by the plane-wave symbol projection and by linear-regime tests; the
    pressure term is omitted (it drops out of the divergence for constant P).
    """
    check_grid_kind(grid_kind)

    def stress(strain):
        sxx = (eta + zeta) * strain[..., 0] + (zeta - eta) * strain[..., 2]
        sxy = 2.0 * eta * strain[..., 1]
        syy = (zeta - eta) * strain[..., 0] + (eta + zeta) * strain[..., 2]
        return np.stack([sxx, sxy, syy], axis=-1)

    if grid_kind in (VERTEX_LUMPED, VERTEX_CONSISTENT):
        sig = stress(strain_vertex_grid(mesh, u))
        mode = mass or ("lumped" if grid_kind == VERTEX_LUMPED else "consistent")
        return divergence_vertex_grid(mesh, sig, mass=mode)
    if grid_kind == CELL_V:
        sig_v = stress(strain_cell_caseV(mesh, u))
        return divergence_cell_grid(mesh, vertex_to_edge_average(mesh, sig_v))
    if grid_kind == CELL_CORRECTED:
        sig_e = stress(strain_cell_corrected(mesh, u))
        return divergence_cell_grid(mesh, sig_e)
    if grid_kind == EDGE_CR:
        sig_c = stress(strain_edge_CR(mesh, u))
        return divergence_edge_CR(mesh, sig_c, u, eps=eps, eta_edge=eta)
    raise ValueError(grid_kind)
