import numpy as np
import pytest

from icetri.rheology import (
    RheologyParams,
    delta_invariant,
    effective_pressure,
    ice_strength,
    shear_invariant,
    stress_from_strain,
    stress_matrix,
    viscosities,
)


def rotate_strain(exx, exy, eyy, theta):
    c, s = np.cos(theta), np.sin(theta)
    R = np.array([[c, -s], [s, c]])
    E = np.array([[exx, exy], [exy, eyy]])
    Ep = R.T @ E @ R
    return Ep[0, 0], Ep[0, 1], Ep[1, 1]


def test_delta_invariant_values():
    assert delta_invariant(0.0, 0.0, 0.0, 2.0) == 0.0
    for d in (0.4, -0.7):
        assert delta_invariant(d, 0.0, d, 3.0) == pytest.approx(2 * abs(d), rel=1e-14)
    # pure shear with e_vp = 2: (4 g^2 / 4)^(1/2) = |g|
    assert delta_invariant(0.0, 0.9, 0.0, 2.0) == pytest.approx(0.9, rel=1e-14)


def test_shear_invariant_values():
    assert shear_invariant(0.0, 0.0, 0.0) == 0.0
    assert shear_invariant(1.0, 0.0, 1.0) == 0.0
    assert shear_invariant(0.0, 0.5, 0.0) == pytest.approx(1.0, rel=1e-14)


def test_invariants_rotation_invariance():
    rng = np.random.default_rng(7)
    params = RheologyParams()
    for _ in range(20):
        exx, exy, eyy = rng.normal(size=3)
        for theta in (np.pi / 6, np.pi / 4, np.pi / 2):
            rot = rotate_strain(exx, exy, eyy, theta)
            assert delta_invariant(*rot, params.e_vp) == pytest.approx(
                delta_invariant(exx, exy, eyy, params.e_vp), rel=1e-12, abs=1e-12
            )
            assert shear_invariant(*rot) == pytest.approx(
                shear_invariant(exx, exy, eyy), rel=1e-12, abs=1e-12
            )


def test_viscosities_cap_and_ratio():
    params = RheologyParams(e_vp=2.0, delta_min=1e-9)
    zeta, eta = viscosities(2e-9, 1.0, params)
    assert zeta == pytest.approx(1.0 / (4e-9), rel=1e-14)
    zeta0, _ = viscosities(0.0, 1.0, params)
    assert zeta0 == pytest.approx(1.0 / (2e-9), rel=1e-14)
    assert eta == pytest.approx(zeta / 4, rel=1e-14)


def test_stress_examples():
    assert stress_from_strain(0.0, 0.0, 0.0, 1.0, 1.0, 0.0) == (0.0, 0.0, 0.0)
    eta = 0.37
    for z in (1.0, 4.0):
        sxx, sxy, syy = stress_from_strain(0.5, 0.0, 0.5, eta, z * eta, 0.0)
        assert sxx == pytest.approx(2 * z * eta * 0.5, rel=1e-14)
        assert syy == pytest.approx(2 * z * eta * 0.5, rel=1e-14)
        assert sxy == 0.0
    sxx, sxy, syy = stress_from_strain(1.0, 0.0, -1.0, 1.0, 1.0, 0.0)
    assert (sxx, sxy, syy) == (2.0, 0.0, -2.0)


def test_stress_matrix_values():
    assert np.allclose(stress_matrix(1.0, 1.0), 2 * np.eye(3))
    assert np.allclose(stress_matrix(0.0, 5.0), 0.0)
    S = stress_matrix(1.0, 4.0)
    assert np.allclose(S, [[5, 0, 3], [0, 2, 0], [3, 0, 5]])
    # positive semidefinite for z >= 0
    for z in (0.0, 1.0, 4.0):
        w = np.linalg.eigvalsh(stress_matrix(1.3, z))
        assert w.min() > -1e-14


def test_stress_matches_matrix_path():
    rng = np.random.default_rng(3)
    for _ in range(25):
        exx, exy, eyy = rng.normal(size=3)
        eta = abs(rng.normal()) + 0.1
        z = abs(rng.normal()) * 3
        via_matrix = stress_matrix(eta, z) @ np.array([exx, exy, eyy])
        direct = stress_from_strain(exx, exy, eyy, eta, z * eta, 0.0)
        assert np.abs(np.array(direct) - via_matrix).max() < 1e-14 * max(1, abs(eta))


def test_ice_strength_and_replacement():
    params = RheologyParams()
    p = ice_strength(1.0, 0.3, params)
    assert p == pytest.approx(27500 * 0.3, rel=1e-14)
    assert ice_strength(0.9, 0.3, params) < p
    on = RheologyParams(replacement_pressure=True)
    assert effective_pressure(0.0, p, on) == 0.0
    assert effective_pressure(2 * on.delta_min, p, on) == pytest.approx(p, rel=1e-14)
    off = RheologyParams(replacement_pressure=False)
    assert effective_pressure(0.0, p, off) == p


def test_params_validation():
    with pytest.raises(ValueError):
        RheologyParams(e_vp=0.0)
    with pytest.raises(ValueError):
        RheologyParams(delta_min=-1.0)
