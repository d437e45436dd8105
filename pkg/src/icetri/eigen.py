"""Eigen decomposition of small dense complex matrices and branch sweeps.

Branches of a symbol over a wavenumber sweep are stitched together by
eigenvector overlap between neighbouring samples and classified against the
continuous operator: a branch is physical when it vanishes with the
wavenumber and tracks one of the two continuous eigenvalues, kernel when it
is numerically zero along the whole sweep, and spurious otherwise.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import symbols as sym
from .grids import (
    CELL_CORRECTED,
    CELL_V,
    EDGE_CR,
    SYMBOL_DIM,
    VERTEX_CONSISTENT,
    VERTEX_LUMPED,
    check_grid_kind,
)
from .mesh import TriMesh, build_periodic_mesh, commensurate_wavevector, reciprocal_basis

PHYSICAL = "physical"
SPURIOUS = "spurious"
KERNEL = "kernel"

# eigenvector overlap below which the sweep refines locally before matching
OVERLAP_THRESHOLD = 0.6
MAX_REFINE_LEVELS = 3
# relative deviation from a continuous eigenvalue accepted over the smallest
# samples when declaring a branch physical
PHYSICAL_REL_TOL = 0.10


class EigenError(RuntimeError):
    pass


class ClassificationError(RuntimeError):
    pass


@dataclass
class EigenResult:
    values: np.ndarray    # (n,) complex
    vectors: np.ndarray   # (n, n), columns normalized
    residual: float       # max_i |A v_i - lambda_i v_i|


def eig_small(A: np.ndarray) -> EigenResult:
    """Eigenpairs of a dense complex matrix of dimension at most 6.

    Hermitian inputs (to machine precision) take the symmetric path with
    orthonormal eigenvectors; anything else falls back to the general
    solver.  The residual max |A v - lambda v| is checked against
    1e-10 * |A| and a failure raises EigenError with the residual attained.
    """
    A = np.asarray(A, dtype=complex)
    n = A.shape[0]
    if A.shape != (n, n) or n > 6:
        raise ValueError("expected a square matrix of dimension <= 6")
    if not np.isfinite(A).all():
        raise ValueError("matrix entries must be finite")
    norm = np.linalg.norm(A)
    if norm == 0.0:
        return EigenResult(np.zeros(n, complex), np.eye(n, dtype=complex), 0.0)
    if np.linalg.norm(A - A.conj().T) <= 1e-12 * norm:
        w, v = np.linalg.eigh(0.5 * (A + A.conj().T))
        w = w.astype(complex)
    else:
        w, v = np.linalg.eig(A)
        v = v / np.linalg.norm(v, axis=0, keepdims=True)
    residual = float(np.abs(A @ v - v * w[None, :]).max())
    if residual > 1e-10 * norm:
        raise EigenError(f"eigen residual {residual:.3e} exceeds 1e-10 * |A| = {1e-10 * norm:.3e}")
    return EigenResult(values=w, vectors=v, residual=residual)


@dataclass
class BranchTable:
    """Eigenvalue trajectories a^2 lambda / eta over a wavenumber sweep."""

    grid_kind: str
    direction: float
    ka: np.ndarray            # (n_samples,)
    lam: np.ndarray           # (n_branches, n_samples), dimensionless
    classes: list[str]
    z: float
    eps: float
    physical_ok: bool = True
    messages: list[str] = field(default_factory=list)

    @property
    def n_branches(self) -> int:
        return self.lam.shape[0]


def _symbol_at(grid_kind, kv, z, eps, a, mesh):
    if grid_kind == CELL_CORRECTED:
        if mesh is None:
            raise ValueError("the corrected cell symbol is operator-defined and needs a mesh")
        return sym.numeric_symbol(grid_kind, kv, mesh, eta=1.0, z=z, eps=eps)
    return sym.analytic_symbol(grid_kind, kv, eta=1.0, z=z, eps=eps, a=a)


def _match_columns(v_prev: np.ndarray, v_next: np.ndarray) -> tuple[np.ndarray, float]:
    """Greedy column assignment maximizing |<v_prev_i, v_next_j>|."""
    overlap = np.abs(v_prev.conj().T @ v_next)
    n = overlap.shape[0]
    perm = np.full(n, -1)
    used = np.zeros(n, dtype=bool)
    order = np.dstack(np.unravel_index(np.argsort(-overlap, axis=None), overlap.shape))[0]
    worst = 1.0
    assigned = 0
    for i, j in order:
        if perm[i] >= 0 or used[j]:
            continue
        perm[i] = j
        used[j] = True
        worst = min(worst, overlap[i, j])
        assigned += 1
        if assigned == n:
            break
    return perm, float(worst)


def _connect(grid_kind, kv_of, t0, t1, res0, res1, z, eps, a, mesh, level=0, refine=True):
    """Permutation aligning eigenpairs at t1 with those at t0, refining the
    interval when the eigenvector overlap is ambiguous.

    Degenerate clusters keep low pairwise overlaps no matter how fine the
    sampling, so after the refinement budget the best greedy assignment is
    accepted (mislabeling inside a cluster is harmless)."""
    perm, worst = _match_columns(res0.vectors, res1.vectors)
    if worst >= OVERLAP_THRESHOLD or level >= MAX_REFINE_LEVELS or not refine:
        return perm
    tm = 0.5 * (t0 + t1)
    resm = eig_small(_symbol_at(grid_kind, kv_of(tm), z, eps, a, mesh))
    perm_a = _connect(grid_kind, kv_of, t0, tm, res0, resm, z, eps, a, mesh, level + 1)
    perm_b = _connect(grid_kind, kv_of, tm, t1, resm, res1, z, eps, a, mesh, level + 1)
    return perm_b[perm_a]


def sweep_branches(
    grid_kind: str,
    direction: float = np.pi / 6.0,
    n_samples: int = 64,
    z: float = 1.0,
    eps: float = 0.0,
    a: float = 1.0,
    ka_max: float | None = None,
    mesh: TriMesh | None = None,
    strict: bool = False,
) -> BranchTable:
    """Sweep the symbol eigenvalues along one direction of the resolvable zone.

    For the corrected cell scheme the sweep runs over wavevectors commensurate
    with an internally built periodic mesh; the requested direction is matched
    by the closest small integer pair of lattice harmonics.
    """
    check_grid_kind(grid_kind)
    if n_samples < 16:
        raise ValueError("need at least 16 samples")

    if grid_kind == CELL_CORRECTED:
        kv_list, ka, direction = _commensurate_ray(direction, n_samples, a, mesh)
        if mesh is None:
            mesh = build_periodic_mesh(2 * n_samples, 2 * n_samples, a)
        kv_of = _ray_interp(kv_list, ka)
    else:
        if ka_max is None:
            ka_max = sym.brillouin_boundary(direction, a)
        ka = np.linspace(ka_max / n_samples, ka_max, n_samples)
        kv_of = lambda t: sym.wavevector_from_ka(t, direction, a)
        kv_list = [kv_of(t) for t in ka]

    n = SYMBOL_DIM[grid_kind]
    lam = np.empty((n, len(ka)), dtype=complex)
    results = [eig_small(_symbol_at(grid_kind, kv, z, eps, a, mesh)) for kv in kv_list]

    refine = grid_kind != CELL_CORRECTED  # only lattice harmonics are resolvable there
    lam[:, 0] = results[0].values
    aligned_prev = results[0]
    for s in range(1, len(ka)):
        perm = _connect(
            grid_kind, kv_of, ka[s - 1], ka[s], aligned_prev, results[s],
            z, eps, a, mesh, refine=refine,
        )
        vals = results[s].values[perm]
        vecs = results[s].vectors[:, perm]
        lam[:, s] = vals
        aligned_prev = EigenResult(vals, vecs, results[s].residual)

    lam *= a * a  # eta = 1 in the sweep, so a^2 lambda / eta
    classes, ok, messages = _classify(lam, ka, z)
    if strict and not ok:
        raise ClassificationError("; ".join(messages))
    return BranchTable(
        grid_kind=grid_kind,
        direction=float(direction),
        ka=ka,
        lam=lam,
        classes=classes,
        z=z,
        eps=eps,
        physical_ok=ok,
        messages=messages,
    )


def _ray_interp(kv_list, ka):
    k_unit = np.array([kv_list[0].k, kv_list[0].l]) / ka[0]

    def kv_of(t):
        return sym.Wavevector(*(k_unit * t))

    return kv_of


def _commensurate_ray(direction, n_samples, a, mesh):
    """Samples t * (p1 b1 + p2 b2) / N along the lattice harmonic closest to
    `direction`, reaching the zone boundary at the last sample."""
    if mesh is not None:
        b1, b2 = reciprocal_basis(mesh)
        nx = mesh.nx
    else:
        probe = build_periodic_mesh(2, 2, a)
        b1, b2 = reciprocal_basis(probe)
        nx = 2 * n_samples
    best = None
    for p1 in range(-6, 7):
        for p2 in range(0, 7):
            if p1 == 0 and p2 == 0:
                continue
            g = p1 * b1 + p2 * b2
            ang = np.arctan2(g[1], g[0]) % np.pi
            err = min(abs(ang - direction % np.pi), np.pi - abs(ang - direction % np.pi))
            key = (round(err, 9), abs(p1) + abs(p2))
            if best is None or key < best[0]:
                best = (key, (p1, p2))
    p1, p2 = best[1]
    g = (p1 * b1 + p2 * b2) / nx
    gnorm = np.linalg.norm(g)
    boundary = sym.brillouin_boundary(np.arctan2(g[1], g[0]), a) / a
    t_max = int(np.floor(boundary / gnorm))
    steps = np.unique(np.linspace(1, max(t_max, 1), min(n_samples, t_max)).astype(int))
    kv_list = [sym.Wavevector(*(g * t)) for t in steps]
    ka = gnorm * a * steps.astype(float)
    return kv_list, ka, float(np.arctan2(g[1], g[0]))


def _classify(lam, ka, z):
    """Tag each branch physical, spurious or kernel."""
    n = lam.shape[0]
    scale = np.abs(lam).max()
    classes = [SPURIOUS] * n
    messages: list[str] = []
    cont = {0: -1.0, 1: -(1.0 + z)}  # lambda / (eta (ka)^2) of the continuous pair
    small = np.argsort(ka)[:3]
    taken = {0: None, 1: None}
    for b in range(n):
        if np.abs(lam[b]).max() <= 1e-11 * max(scale, 1e-300):
            classes[b] = KERNEL
            continue
        ratios = lam[b, small].real / (ka[small] ** 2)
        for which, target in cont.items():
            if taken[which] is None and np.all(np.abs(ratios - target) <= PHYSICAL_REL_TOL * abs(target)):
                classes[b] = PHYSICAL
                taken[which] = b
                break
    ok = sum(c == PHYSICAL for c in classes) == 2
    if not ok:
        missing = [f"-{abs(v):g}*(ka)^2" for v, b in zip(cont.values(), taken.values()) if b is None]
        messages.append(
            "no branch tracks the continuous eigenvalue(s) " + ", ".join(missing)
            if missing
            else "unexpected number of physical branches"
        )
    return classes, ok, messages


def max_lambda2(
    grid_kind: str,
    a: float = 1.0,
    z: float = 1.0,
    eps: float = 0.0,
    n_grid: int = 64,
    mesh: TriMesh | None = None,
) -> tuple[float, sym.Wavevector]:
    """Largest |eigenvalue| / eta of the symbol over the resolvable zone.

    Sampled on an n_grid x n_grid lattice of commensurate wavevectors; the
    corrected cell scheme is scanned through its operator definition on a
    matching periodic mesh.  Returns the maximum and the maximizing
    wavevector.
    """
    check_grid_kind(grid_kind)
    if grid_kind == CELL_CORRECTED:
        if mesh is None:
            mesh = build_periodic_mesh(n_grid, n_grid, a)
        elif mesh.nx != n_grid or mesh.ny != n_grid:
            raise ValueError("mesh extents must match n_grid")
        best, best_kv = 0.0, sym.Wavevector(0.0, 0.0)
        done = set()
        for p1 in range(n_grid):
            for p2 in range(n_grid):
                if (p1 == 0 and p2 == 0) or (p1, p2) in done:
                    continue
                # the symbol at -k is the conjugate, same eigenvalue magnitudes
                done.add(((n_grid - p1) % n_grid, (n_grid - p2) % n_grid))
                kvec = commensurate_wavevector(mesh, p1, p2)
                kv = sym.Wavevector(*kvec)
                vals = eig_small(sym.numeric_symbol(grid_kind, kv, mesh, eta=1.0, z=z)).values
                m = float(np.abs(vals).max())
                if m > best:
                    best, best_kv = m, kv
        return best, best_kv

    b1, b2 = (
        (2.0 * np.pi / a) * np.array([1.0, -1.0 / np.sqrt(3.0)]),
        (2.0 * np.pi / a) * np.array([0.0, 2.0 / np.sqrt(3.0)]),
    )
    n = SYMBOL_DIM[grid_kind]
    best, best_kv = 0.0, sym.Wavevector(0.0, 0.0)
    mats = np.empty((n_grid * n_grid - 1, n, n), dtype=complex)
    kvs = []
    idx = 0
    for p1 in range(n_grid):
        for p2 in range(n_grid):
            if p1 == 0 and p2 == 0:
                continue
            kvec = (p1 / n_grid) * b1 + (p2 / n_grid) * b2
            kv = sym.Wavevector(*kvec)
            mats[idx] = sym.analytic_symbol(grid_kind, kv, eta=1.0, z=z, eps=eps, a=a)
            kvs.append(kv)
            idx += 1
    vals = np.linalg.eigvalsh(0.5 * (mats + np.conj(np.transpose(mats, (0, 2, 1)))))
    mags = np.abs(vals).max(axis=1)
    imax = int(np.argmax(mags))
    return float(mags[imax]), kvs[imax]
