import numpy as np
import pytest

import icetri.symbols as sym
from icetri.grids import CELL_CORRECTED, CELL_V, EDGE_CR, VERTEX_CONSISTENT, VERTEX_LUMPED
from icetri.mesh import SQRT3, build_periodic_mesh, commensurate_wavevector

PI6 = np.pi / 6.0


def kv_of(ka, direction=PI6, a=1.0):
    return sym.wavevector_from_ka(ka, direction, a)


def hermitian_defect(A):
    return np.linalg.norm(A - A.conj().T) / max(np.linalg.norm(A), 1e-300)


class TestPhasesAndGradient:
    def test_zero_wavevector(self):
        assert sym.phase_factors_vertex(sym.Wavevector(0, 0), 1.0) == (1, 1, 1)
        assert np.allclose(sym.grad_symbol(sym.Wavevector(0, 0), 1.0, "u"), 0.0)

    def test_unit_modulus(self):
        rng = np.random.default_rng(0)
        for _ in range(10):
            kv = sym.Wavevector(*rng.normal(size=2))
            for p in sym.phase_factors_vertex(kv, 1.0):
                assert abs(abs(p) - 1.0) < 1e-14
            for p in sym.phase_factors_edge(kv, 1.0):
                assert abs(abs(p) - 1.0) < 1e-14

    def test_half_turn_values(self):
        a1, b1, g1 = sym.phase_factors_vertex(sym.Wavevector(2 * np.pi, 0.0), 1.0)
        assert a1 == pytest.approx(-1.0, abs=1e-12)
        assert b1 == pytest.approx(-1.0, abs=1e-12)
        assert g1 == pytest.approx(1.0, abs=1e-12)

    def test_down_gradient_conjugate(self):
        rng = np.random.default_rng(1)
        for _ in range(10):
            kv = sym.Wavevector(*rng.normal(size=2))
            gu = sym.grad_symbol(kv, 1.0, "u")
            gd = sym.grad_symbol(kv, 1.0, "d")
            assert np.allclose(gd, -np.conj(gu), atol=1e-14)

    def test_small_k_consistency(self):
        kv = kv_of(1e-3)
        g = sym.grad_symbol(kv, 1.0, "u")
        target = 1j * np.array([kv.k, kv.l])
        assert np.linalg.norm(g - target) <= 1e-5 * kv.magnitude


class TestVertexSymbol:
    def test_zero_wavevector(self):
        for mass in ("lumped", "consistent"):
            A = sym.vertex_symbol(sym.Wavevector(0, 0), 1.0, 1.0, mass=mass)
            assert np.allclose(A, 0.0)

    def test_consistent_mass_scalar(self):
        assert sym.mass_symbol_consistent(sym.Wavevector(0, 0), 1.0) == pytest.approx(1.0)
        kb = kv_of(2 * np.pi / SQRT3)
        assert sym.mass_symbol_consistent(kb, 1.0) == pytest.approx(1.0 / 3.0, rel=1e-12)

    def test_hermitian_negative_semidefinite(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            kv = sym.Wavevector(*rng.normal(scale=2.0, size=2))
            A = sym.vertex_symbol(kv, 1.3, 1.0)
            assert hermitian_defect(A) < 1e-12
            w = np.linalg.eigvalsh(A)
            assert w.max() <= 1e-12 * np.linalg.norm(A)

    def test_small_k_tracks_continuous(self):
        for ka in (0.1, 0.3, 0.5):
            kv = kv_of(ka)
            w = np.sort(np.linalg.eigvalsh(sym.vertex_symbol(kv, 1.0, 1.0)))
            # transverse -(ka)^2 and longitudinal -2(ka)^2, within 5 percent
            assert abs(w[1] + ka**2) <= 0.05 * ka**2
            assert abs(w[0] + 2 * ka**2) <= 0.05 * ka**2

    def test_mass_treatment_flips_error_sign(self):
        kv = kv_of(0.3)
        wl = np.sort(np.linalg.eigvalsh(sym.vertex_symbol(kv, 1.0, 1.0, mass="lumped")))
        Ac = sym.vertex_symbol(kv, 1.0, 1.0, mass="consistent")
        wc = np.sort(np.linalg.eigvalsh(0.5 * (Ac + Ac.conj().T)))
        cont = np.array([-2 * 0.3**2, -(0.3**2)])
        for b in range(2):
            assert (wl[b] - cont[b]) * (wc[b] - cont[b]) < 0

    def test_eta_scaling(self):
        kv = kv_of(0.8)
        A1 = sym.vertex_symbol(kv, 1.0, 1.0)
        A2 = sym.vertex_symbol(kv, 2.0, 1.0)
        assert np.allclose(A2, 2 * A1, rtol=1e-13)


class TestCellSymbol:
    def test_zero_wavevector(self):
        assert np.allclose(sym.cellV_symbol(sym.Wavevector(0, 0), 1.0, 1.0), 0.0)

    def test_two_kernel_modes_on_symmetry_ray(self):
        A = sym.cellV_symbol(kv_of(1.0), 1.0, 1.0)
        w = np.abs(np.linalg.eigvalsh(A))
        n_zero = (w <= 1e-12 * np.linalg.norm(A, 2)).sum()
        assert n_zero == 2

    def test_rank_deficient_everywhere(self):
        rng = np.random.default_rng(3)
        for _ in range(25):
            kv = sym.Wavevector(*rng.normal(scale=2.0, size=2))
            A = sym.cellV_symbol(kv, 1.0, 1.0)
            w = np.abs(np.linalg.eigvalsh(A))
            assert (w <= 1e-11 * max(np.linalg.norm(A, 2), 1e-300)).sum() >= 1

    def test_small_k_physical_pair(self):
        ka = 0.2
        w = np.sort(np.linalg.eigvalsh(sym.cellV_symbol(kv_of(ka), 1.0, 1.0)))
        assert abs(w[0] + 2 * ka**2) <= 0.02 * 2 * ka**2
        assert abs(w[1] + ka**2) <= 0.02 * ka**2


class TestEdgeSymbol:
    def test_zero_wavevector_unstabilized(self):
        A = sym.edge_symbol(sym.Wavevector(0, 0), 1.0, 1.0, eps=0.0)
        assert np.allclose(A, 0.0)

    def test_penalty_at_zero_wavevector(self):
        T = sym.stab_symbol_edge(sym.Wavevector(0, 0), 1.0, 1.0)
        w = np.linalg.eigvalsh(T)
        assert (np.abs(w) <= 1e-12 * np.linalg.norm(T)).sum() == 2
        assert w.min() < -1.0  # the other branches stay finite at k -> 0

    def test_zero_branch_without_penalty(self):
        A = sym.edge_symbol(kv_of(1.3), 1.0, 1.0, eps=0.0)
        w = np.abs(np.linalg.eigvalsh(A))
        assert w.min() <= 1e-12 * np.linalg.norm(A, 2)

    def test_penalty_removes_kernel(self):
        for ka in (0.5, 1.7, 3.0):
            A = sym.edge_symbol(kv_of(ka), 1.0, 1.0, eps=1.0)
            w = np.abs(np.linalg.eigvalsh(A))
            assert w.min() > 1e-10

    def test_stabilized_tracks_continuous(self):
        for ka in (0.25, 0.5, 1.0):
            A = sym.edge_symbol(kv_of(ka), 1.0, 1.0, eps=1.0)
            w = np.sort(np.linalg.eigvalsh(A))
            close_t = np.abs(w + ka**2).min() <= 0.15 * ka**2
            close_l = np.abs(w + 2 * ka**2).min() <= 0.15 * 2 * ka**2
            assert close_t and close_l

    def test_hermitian_negative_semidefinite(self):
        rng = np.random.default_rng(4)
        for eps in (0.0, 0.2, 1.0):
            for _ in range(10):
                kv = sym.Wavevector(*rng.normal(scale=2.0, size=2))
                A = sym.edge_symbol(kv, 0.7, 1.0, eps=eps)
                assert hermitian_defect(A) < 1e-12
                assert np.linalg.eigvalsh(A).max() <= 1e-12 * np.linalg.norm(A)


class TestContinuousSymbol:
    def test_eigenvalues(self):
        A = sym.continuous_symbol(sym.Wavevector(1.0, 0.0), 1.0, 1.0)
        w = np.sort(np.linalg.eigvalsh(A))
        assert np.allclose(w, [-2.0, -1.0], rtol=1e-13)

    def test_zero(self):
        assert np.allclose(sym.continuous_symbol(sym.Wavevector(0, 0), 1.0, 1.0), 0.0)

    def test_isotropy(self):
        mags = []
        for theta in np.linspace(0, 2 * np.pi, 8, endpoint=False):
            kv = sym.wavevector_from_ka(0.7, theta, 1.0)
            mags.append(np.sort(np.linalg.eigvalsh(sym.continuous_symbol(kv, 1.0, 2.0))))
        assert np.ptp(np.array(mags), axis=0).max() < 1e-13

    def test_eigenvectors_transverse_longitudinal(self):
        kv = sym.wavevector_from_ka(0.9, 0.4, 1.0)
        A = sym.continuous_symbol(kv, 1.0, 1.0)
        w, v = np.linalg.eigh(A)
        khat = np.array([kv.k, kv.l]) / kv.magnitude
        # most negative eigenvalue is longitudinal
        assert abs(abs(v[:, 0] @ khat) - 1.0) < 1e-12
        assert abs(v[:, 1] @ khat) < 1e-12


class TestNumericSymbolOracle:
    """Plane-wave projection of the mesh operators against the closed forms."""

    @pytest.fixture(scope="class")
    def mesh16(self):
        return build_periodic_mesh(16, 16, 1.0)

    def sample_kvs(self, mesh, n=8, seed=0):
        rng = np.random.default_rng(seed)
        out = []
        while len(out) < n:
            p1 = int(rng.integers(0, mesh.nx))
            p2 = int(rng.integers(0, mesh.ny))
            if (p1, p2) != (0, 0):
                out.append(sym.Wavevector(*commensurate_wavevector(mesh, p1, p2)))
        return out

    @pytest.mark.parametrize(
        "grid_kind,eps",
        [
            (VERTEX_LUMPED, 0.0),
            (VERTEX_CONSISTENT, 0.0),
            (CELL_V, 0.0),
            (EDGE_CR, 0.0),
            (EDGE_CR, 0.2),
            (EDGE_CR, 1.0),
        ],
    )
    def test_matches_analytic(self, mesh16, grid_kind, eps):
        for kv in self.sample_kvs(mesh16):
            num = sym.numeric_symbol(grid_kind, kv, mesh16, eta=1.0, z=1.0, eps=eps)
            ana = sym.analytic_symbol(grid_kind, kv, eta=1.0, z=1.0, eps=eps, a=mesh16.a)
            scale = max(np.linalg.norm(ana), 1e-30)
            assert np.abs(num - ana).max() <= 1e-10 * scale

    def test_z_dependence(self, mesh16):
        kv = sym.Wavevector(*commensurate_wavevector(mesh16, 3, 5))
        num = sym.numeric_symbol(VERTEX_LUMPED, kv, mesh16, eta=0.8, z=4.0)
        ana = sym.analytic_symbol(VERTEX_LUMPED, kv, eta=0.8, z=4.0, a=1.0)
        assert np.abs(num - ana).max() <= 1e-10 * np.linalg.norm(ana)

    def test_incommensurate_rejected(self, mesh16):
        with pytest.raises(ValueError):
            sym.numeric_symbol(VERTEX_LUMPED, sym.Wavevector(0.37, 0.21), mesh16)

    def test_corrected_cell_lifts_kernel(self):
        # smallest resolvable wavenumber along the symmetry ray of a 64-mesh
        mesh = build_periodic_mesh(64, 64, 1.0)
        kv = sym.Wavevector(*commensurate_wavevector(mesh, 1, 1))
        ka = kv.magnitude * mesh.a
        A = sym.numeric_symbol(CELL_CORRECTED, kv, mesh, eta=1.0, z=1.0)
        w = np.sort(np.linalg.eigvalsh(0.5 * (A + A.conj().T)))
        # two branches near the continuous pair
        assert abs(w[-1] + ka**2) <= 0.1 * ka**2
        assert abs(w[-2] + 2 * ka**2) <= 0.1 * 2 * ka**2
        # two branches bounded away from zero
        assert np.abs(w[:2]).min() >= 1.0

    def test_lattice_periodicity_of_eigenvalues(self, mesh16):
        kv = sym.Wavevector(*commensurate_wavevector(mesh16, 2, 3))
        shifted = sym.Wavevector(*commensurate_wavevector(mesh16, 2 + 16, 3))
        for grid_kind in (VERTEX_LUMPED, CELL_V, EDGE_CR):
            w0 = np.sort(np.linalg.eigvalsh(sym.analytic_symbol(grid_kind, kv, eps=0.5)))
            w1 = np.sort(np.linalg.eigvalsh(sym.analytic_symbol(grid_kind, shifted, eps=0.5)))
            assert np.allclose(w0, w1, atol=1e-10 * max(1.0, np.abs(w0).max()))
