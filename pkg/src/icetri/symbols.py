"""Fourier symbols of the discrete stress-divergence operators.

A translation-invariant operator on the periodic lattice acts on plane
waves through a finite complex matrix per wavevector, acting on amplitude
vectors ordered as

    vertex placement:  (u, v)
    cell placement:    (u_up, v_up, u_down, v_down)
    edge placement:    (u_a, v_a, u_b, v_b, u_c, v_c)

where up/down are the two triangle families and a/b/c the three edge
orientation classes.  Amplitudes of cell or edge quantities are referenced
to cell centroids and edge midpoints.

All assembled divergence symbols factor as -c * E^H W Z E with a positive
weight W, so they are Hermitian and negative semidefinite whenever the
stress law matrix is positive semidefinite.  The edge placement adds a
penalty symbol eps*T built from the inter-element jumps; T is likewise
negative semidefinite.

`numeric_symbol` recovers the same matrices by applying the actual mesh
operators to plane-wave fields and projecting the result back onto
amplitudes; it is the definition of the symbol for the corrected cell
scheme, for which no closed form is assembled here.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import operators
from .grids import (
    CELL_CORRECTED,
    CELL_V,
    EDGE_CR,
    STAGGERING,
    VERTEX_CONSISTENT,
    VERTEX_LUMPED,
    check_grid_kind,
)
from .mesh import SQRT3, TriMesh, is_commensurate
from .rheology import stress_matrix


@dataclass(frozen=True)
class Wavevector:
    k: float
    l: float

    def dimensionless(self, a: float) -> tuple[float, float]:
        return self.k * a, self.l * a

    @property
    def magnitude(self) -> float:
        return float(np.hypot(self.k, self.l))


def wavevector_from_ka(ka: float, direction: float, a: float) -> Wavevector:
    """Wavevector of dimensionless magnitude |k|a = ka along `direction` (radians)."""
    return Wavevector(ka * np.cos(direction) / a, ka * np.sin(direction) / a)


def brillouin_boundary(direction: float, a: float = 1.0) -> float:
    """Dimensionless |k|a of the first zone boundary along `direction`.

    The boundary is the hexagon of perpendicular bisectors of the six nearest
    reciprocal lattice vectors (|g|a = 4 pi / sqrt(3)); along pi/6 it sits at
    2 pi / sqrt(3).
    """
    g = 4.0 * np.pi / (SQRT3 * a)
    khat = np.array([np.cos(direction), np.sin(direction)])
    best = np.inf
    for m in range(6):
        ang = np.pi / 6.0 + m * np.pi / 3.0
        gv = g * np.array([np.cos(ang), np.sin(ang)])
        proj = khat @ gv
        if proj > 1e-12:
            best = min(best, 0.5 * g * g / proj)
    return best * a


def phase_factors_vertex(kv: Wavevector, a: float) -> tuple[complex, complex, complex]:
    """Unit phase factors between the three corners of an up triangle and its centroid."""
    k, l = kv.k, kv.l
    h = 0.5 * SQRT3 * a
    alpha1 = np.exp(-1j * (k * a / 2.0 + l * h / 3.0))
    beta1 = np.exp(1j * (k * a / 2.0 - l * h / 3.0))
    gamma1 = np.exp(2j * l * h / 3.0)
    return alpha1, beta1, gamma1


def grad_symbol(kv: Wavevector, a: float, cell_class: str = "u") -> np.ndarray:
    """Symbol (g_x, g_y) of the elementwise P1 gradient on up or down triangles."""
    alpha1, beta1, gamma1 = phase_factors_vertex(kv, a)
    h = 0.5 * SQRT3 * a
    g = -(
        np.array([SQRT3, 1.0]) * alpha1
        + np.array([-SQRT3, 1.0]) * beta1
        + np.array([0.0, -2.0]) * gamma1
    ) / (2.0 * h)
    if cell_class == "u":
        return g
    if cell_class == "d":
        return -np.conj(g)
    raise ValueError("cell_class must be 'u' or 'd'")


def strain_symbol_vertex(kv: Wavevector, a: float) -> np.ndarray:
    """6x2 map from vertex velocity amplitudes to strain amplitudes on (up, down) cells."""
    gx, gy = grad_symbol(kv, a, "u")
    return np.array(
        [
            [gx, 0.0],
            [gy / 2.0, gx / 2.0],
            [0.0, gy],
            [-np.conj(gx), 0.0],
            [-np.conj(gy) / 2.0, -np.conj(gx) / 2.0],
            [0.0, -np.conj(gy)],
        ]
    )


def div_symbol_vertex(kv: Wavevector, a: float) -> np.ndarray:
    """2x6 map from (up, down) cell stress amplitudes to vertex divergence,
    already divided by the median-dual area."""
    gx, gy = grad_symbol(kv, a, "u")
    gxc, gyc = np.conj(gx), np.conj(gy)
    return 0.5 * np.array(
        [
            [-gxc, -gyc, 0.0, gx, gy, 0.0],
            [0.0, -gxc, -gyc, 0.0, gx, gy],
        ]
    )


def mass_symbol_consistent(kv: Wavevector, a: float) -> float:
    """Scalar symbol of the consistent P1 mass matrix divided by the lumped one."""
    k, l = kv.k, kv.l
    h = 0.5 * SQRT3 * a
    return 0.5 + (
        np.cos(k * a) + np.cos(k * a / 2.0 + l * h) + np.cos(-k * a / 2.0 + l * h)
    ) / 6.0


def vertex_symbol(
    kv: Wavevector, eta: float, z: float, a: float = 1.0, mass: str = "lumped"
) -> np.ndarray:
    """2x2 stress-divergence symbol for vertex velocities."""
    E = strain_symbol_vertex(kv, a)
    D = div_symbol_vertex(kv, a)
    S = stress_matrix(eta, z)
    Z = np.kron(np.eye(2), S)
    sym = D @ Z @ E
    if mass == "lumped":
        return sym
    if mass == "consistent":
        m = mass_symbol_consistent(kv, a)
        if abs(m) < 1e-14:
            raise ZeroDivisionError("consistent mass symbol vanishes at this wavevector")
        return sym / m
    raise ValueError("mass must be 'lumped' or 'consistent'")


def strain_symbol_cell(kv: Wavevector, a: float) -> np.ndarray:
    """3x4 map from (up, down) cell velocity amplitudes to vertex strain amplitudes
    obtained from the median-dual contour integral."""
    gx, gy = grad_symbol(kv, a, "u")
    gxc, gyc = np.conj(gx), np.conj(gy)
    return 0.5 * np.array(
        [
            [-gxc, 0.0, gx, 0.0],
            [-gyc / 2.0, -gxc / 2.0, gy / 2.0, gx / 2.0],
            [0.0, -gyc, 0.0, gy],
        ]
    )


def div_symbol_cell(kv: Wavevector, a: float) -> np.ndarray:
    """4x3 map from vertex stress amplitudes to the divergence on (up, down) cells,
    with stresses interpolated linearly over each triangle."""
    gx, gy = grad_symbol(kv, a, "u")
    gxc, gyc = np.conj(gx), np.conj(gy)
    return np.array(
        [
            [gx, gy, 0.0],
            [0.0, gx, gy],
            [-gxc, -gyc, 0.0],
            [0.0, -gxc, -gyc],
        ]
    )


def cellV_symbol(kv: Wavevector, eta: float, z: float, a: float = 1.0) -> np.ndarray:
    """4x4 stress-divergence symbol for cell velocities with vertex strain rates.

    Rank deficient: the strain map loses at least one dimension, so the
    composed symbol always has a nontrivial kernel."""
    E = strain_symbol_cell(kv, a)
    D = div_symbol_cell(kv, a)
    S = stress_matrix(eta, z)
    return D @ S @ E


def phase_factors_edge(kv: Wavevector, a: float) -> tuple[complex, complex, complex]:
    """Unit phases between the three edge midpoints of an up triangle and its centroid."""
    k, l = kv.k, kv.l
    h = 0.5 * SQRT3 * a
    alpha = np.exp(-1j * l * h / 3.0)
    beta = np.exp(1j * (-k * a / 4.0 + l * h / 6.0))
    gamma = np.exp(1j * (k * a / 4.0 + l * h / 6.0))
    return alpha, beta, gamma


def strain_symbol_edge(kv: Wavevector, a: float) -> np.ndarray:
    """6x6 map from edge velocity amplitudes (a,b,c classes) to strain amplitudes
    on (up, down) cells for the nonconforming linear element."""
    alpha, beta, gamma = phase_factors_edge(kv, a)
    h = 0.5 * SQRT3 * a
    Eu = (
        np.array(
            [
                [0.0, 0.0, -SQRT3 * beta, 0.0, SQRT3 * gamma, 0.0],
                [-alpha, 0.0, beta / 2.0, -SQRT3 * beta / 2.0, gamma / 2.0, SQRT3 * gamma / 2.0],
                [0.0, -2.0 * alpha, 0.0, beta, 0.0, gamma],
            ]
        )
        / h
    )
    return np.vstack([Eu, -np.conj(Eu)])


def div_symbol_edge(kv: Wavevector, a: float) -> np.ndarray:
    """6x6 map from (up, down) cell stress amplitudes to the edge divergence,
    already divided by the diagonal nonconforming mass."""
    alpha, beta, gamma = phase_factors_edge(kv, a)
    h = 0.5 * SQRT3 * a
    ac, bc, gc = np.conj(alpha), np.conj(beta), np.conj(gamma)
    return (
        -3.0
        / (2.0 * h)
        * np.array(
            [
                [0.0, -2.0 * ac, 0.0, 0.0, 2.0 * alpha, 0.0],
                [0.0, 0.0, -2.0 * ac, 0.0, 0.0, 2.0 * alpha],
                [-SQRT3 * bc, bc, 0.0, SQRT3 * beta, -beta, 0.0],
                [0.0, -SQRT3 * bc, bc, 0.0, SQRT3 * beta, -beta],
                [SQRT3 * gc, gc, 0.0, -SQRT3 * gamma, -gamma, 0.0],
                [0.0, SQRT3 * gc, gc, 0.0, -SQRT3 * gamma, -gamma],
            ]
        )
    )


def stab_symbol_edge(kv: Wavevector, eta: float, a: float = 1.0) -> np.ndarray:
    """6x6 symbol of the edge-jump penalty (unit penalty coefficient)."""
    k, l = kv.k, kv.l
    h = 0.5 * SQRT3 * a
    c1 = 2.0 * np.cos(-k * a / 4.0 + l * h / 2.0)
    c2 = 2.0 * np.cos(k * a / 4.0 + l * h / 2.0)
    c3 = 2.0 * np.cos(k * a / 2.0)
    L = np.array(
        [
            [0.0, 0.0, c1, 0.0, -c2, 0.0],
            [0.0, 0.0, 0.0, c1, 0.0, -c2],
            [-c1, 0.0, 0.0, 0.0, c3, 0.0],
            [0.0, -c1, 0.0, 0.0, 0.0, c3],
            [c2, 0.0, -c3, 0.0, 0.0, 0.0],
            [0.0, c2, 0.0, -c3, 0.0, 0.0],
        ]
    )
    return (2.0 * eta / (a * h)) * (L @ L)


def edge_symbol(
    kv: Wavevector, eta: float, z: float, eps: float, a: float = 1.0
) -> np.ndarray:
    """6x6 stress-divergence symbol for edge velocities, jump-stabilized for eps > 0."""
    E = strain_symbol_edge(kv, a)
    D = div_symbol_edge(kv, a)
    S = stress_matrix(eta, z)
    Z = np.kron(np.eye(2), S)
    sym = D @ Z @ E
    if eps != 0.0:
        sym = sym + eps * stab_symbol_edge(kv, eta, a)
    return sym


def continuous_symbol(kv: Wavevector, eta: float, zeta: float) -> np.ndarray:
    """2x2 symbol of the continuous stress divergence for constant viscosities."""
    k, l = kv.k, kv.l
    Ec = 1j * np.array([[k, 0.0], [l / 2.0, k / 2.0], [0.0, l]])
    Dc = 1j * np.array([[k, l, 0.0], [0.0, k, l]])
    S = np.array(
        [
            [eta + zeta, 0.0, -eta + zeta],
            [0.0, 2.0 * eta, 0.0],
            [-eta + zeta, 0.0, eta + zeta],
        ]
    )
    return Dc @ S @ Ec


def continuous_eigenvalues(kv: Wavevector, eta: float, zeta: float) -> tuple[float, float]:
    """Transverse and longitudinal eigenvalues, -eta*|k|^2 and -(eta+zeta)*|k|^2."""
    k2 = kv.k**2 + kv.l**2
    return -eta * k2, -(eta + zeta) * k2


def analytic_symbol(
    grid_kind: str,
    kv: Wavevector,
    eta: float = 1.0,
    z: float = 1.0,
    eps: float = 0.0,
    a: float = 1.0,
) -> np.ndarray:
    """Dispatch to the closed-form symbol of `grid_kind` (none exists for the
    corrected cell scheme)."""
    check_grid_kind(grid_kind)
    if grid_kind == VERTEX_LUMPED:
        return vertex_symbol(kv, eta, z, a, mass="lumped")
    if grid_kind == VERTEX_CONSISTENT:
        return vertex_symbol(kv, eta, z, a, mass="consistent")
    if grid_kind == CELL_V:
        return cellV_symbol(kv, eta, z, a)
    if grid_kind == EDGE_CR:
        return edge_symbol(kv, eta, z, eps, a)
    raise ValueError(f"no closed-form symbol for {grid_kind!r}")


def numeric_symbol(
    grid_kind: str,
    kv: Wavevector,
    mesh: TriMesh,
    eta: float = 1.0,
    z: float = 1.0,
    eps: float = 0.0,
) -> np.ndarray:
    """Symbol recovered from the discrete operator by plane-wave projection.

    One plane-wave velocity field is built per amplitude slot, pushed through
    the constant-viscosity stress-divergence chain of `grid_kind`, and the
    output amplitudes are read back off the corresponding entity blocks.
    Rejects wavevectors that do not fit the periodic mesh.
    """
    check_grid_kind(grid_kind)
    if not is_commensurate(mesh, kv.k, kv.l):
        raise ValueError(
            f"wavevector ({kv.k}, {kv.l}) is not commensurate with the {mesh.nx}x{mesh.ny} mesh"
        )

    stag = STAGGERING[grid_kind]
    pos = mesh.dof_positions(stag)
    phase = np.exp(1j * (pos @ np.array([kv.k, kv.l])))

    if stag == "vertex":
        blocks = [np.arange(mesh.n_vertices)]
    elif stag == "cell":
        blocks = [
            np.flatnonzero(mesh.cell_class == 0),
            np.flatnonzero(mesh.cell_class == 1),
        ]
    else:
        blocks = [np.flatnonzero(mesh.edge_class == c) for c in range(3)]

    n = 2 * len(blocks)
    sym = np.empty((n, n), dtype=complex)
    zeta = z * eta
    for col, (block, comp) in enumerate(
        (b, c) for b in range(len(blocks)) for c in range(2)
    ):
        u = np.zeros((len(pos), 2), dtype=complex)
        u[blocks[block], comp] = phase[blocks[block]]
        out = operators.stress_divergence(mesh, grid_kind, u, eta, zeta, eps=eps)
        for row_block, ids in enumerate(blocks):
            amps = out[ids] * np.conj(phase[ids])[:, None]
            sym[2 * row_block, col] = amps[:, 0].mean()
            sym[2 * row_block + 1, col] = amps[:, 1].mean()
    return sym
