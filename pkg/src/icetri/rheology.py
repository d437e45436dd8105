"""Viscous-plastic constitutive relations.

Strain rates and stresses are carried as component triplets (xx, xy, yy);
all functions accept scalars or numpy arrays elementwise.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class RheologyParams:
    e_vp: float = 2.0                # yield ellipse axis ratio
    delta_min: float = 2e-9          # viscous transition floor, 1/s
    p_star: float = 27500.0          # ice strength coefficient, N/m^2
    c_p: float = 20.0                # strength concentration exponent
    replacement_pressure: bool = False

    def __post_init__(self):
        if not (self.e_vp > 0 and self.delta_min > 0 and self.p_star > 0):
            raise ValueError("e_vp, delta_min and p_star must be positive")


def delta_invariant(exx, exy, eyy, e_vp: float):
    """Deformation measure selecting the viscous or plastic branch."""
    div = exx + eyy
    return np.sqrt(div * div + ((exx - eyy) ** 2 + 4.0 * exy * exy) / e_vp**2)


def shear_invariant(exx, exy, eyy):
    return np.sqrt((exx - eyy) ** 2 + 4.0 * exy * exy)


def ice_strength(conc, thick, params: RheologyParams):
    """Vertically integrated strength P from concentration and mean thickness."""
    return params.p_star * thick * np.exp(-params.c_p * (1.0 - conc))


def viscosities(delta, pressure, params: RheologyParams):
    """Bulk and shear viscosity (zeta, eta); zeta capped at P / (2 delta_min)."""
    zeta = pressure / (2.0 * np.maximum(delta, params.delta_min))
    return zeta, zeta / params.e_vp**2


def stress_from_strain(exx, exy, eyy, eta, zeta, pressure=0.0):
    """Stress components for given strain rates, viscosities and pressure term."""
    div = exx + eyy
    sxx = 2.0 * eta * (exx - 0.5 * div) + zeta * div - 0.5 * pressure
    syy = 2.0 * eta * (eyy - 0.5 * div) + zeta * div - 0.5 * pressure
    sxy = 2.0 * eta * exy
    return sxx, sxy, syy


def effective_pressure(delta, pressure, params: RheologyParams):
    """Pressure entering the stress law; scaled down in rigid regions if the
    replacement option is active."""
    if not params.replacement_pressure:
        return pressure
    return pressure * delta / np.maximum(delta, params.delta_min)


def stress_matrix(eta: float, z: float) -> np.ndarray:
    """3x3 map from strain components (xx, xy, yy) to stress components,
    valid for zeta = z * eta and no pressure term."""
    return eta * np.array(
        [
            [1.0 + z, 0.0, -1.0 + z],
            [0.0, 2.0, 0.0],
            [-1.0 + z, 0.0, 1.0 + z],
        ]
    )
