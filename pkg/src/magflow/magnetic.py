"""Exact left-invariant magnetic systems Ω = d(B ζ_m) and their reduced dynamics."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import MetricTwoStepAlgebra, j_map, sharp


@dataclass(frozen=True, eq=False)
class MagneticSystem:
    alg: MetricTwoStepAlgebra
    B: float
    zeta_m: np.ndarray  # unit central covector

    def __post_init__(self):
        if not self.alg.is_split:
            raise ValueError("magnetic systems need 𝔳 orthogonal to the centre")
        zeta = np.array(self.zeta_m, dtype=float)
        if zeta.shape != (self.alg.dim,):
            raise ValueError("zeta_m has the wrong size")
        if np.max(np.abs(zeta[: self.alg.dim_v])) > 0:
            raise ValueError("zeta_m must vanish on 𝔳")
        nrm = float(np.sqrt(zeta @ sharp(self.alg, zeta)))
        if abs(nrm - 1.0) > 1e-12:
            raise ValueError(f"zeta_m must have unit norm, got {nrm}")
        zeta.flags.writeable = False
        object.__setattr__(self, "zeta_m", zeta)
        object.__setattr__(self, "B", float(self.B))

    @property
    def Z_m(self) -> np.ndarray:
        return sharp(self.alg, self.zeta_m)


def default_zeta(alg: MetricTwoStepAlgebra) -> np.ndarray:
    """First central dual basis covector, scaled to unit length."""
    z = np.zeros(alg.dim)
    z[alg.dim_v] = 1.0
    return z / np.sqrt(z @ sharp(alg, z))


def make_system(alg: MetricTwoStepAlgebra, B: float, zeta_m=None) -> MagneticSystem:
    if zeta_m is None:
        zeta = default_zeta(alg)
    else:
        zeta = np.zeros(alg.dim)
        zeta[alg.dim_v:] = np.asarray(zeta_m, dtype=float)[-alg.dim_z:]
        zeta = zeta / np.sqrt(zeta @ sharp(alg, zeta))
    return MagneticSystem(alg, B, zeta)


def exact_form_normalize(alg: MetricTwoStepAlgebra, theta):
    """Split a potential θ into (B, ζ_m, degenerate) with B ζ_m = θ restricted to 𝔷.

    The 𝔳*-part is dropped since it is closed. When θ vanishes on 𝔷 the field is
    zero and ζ_m is an arbitrary (first basis) unit covector, signalled by the
    flag.
    """
    theta = np.asarray(theta, dtype=float)
    tz = np.zeros(alg.dim)
    tz[alg.dim_v:] = theta[alg.dim_v:]
    B = float(np.sqrt(max(tz @ sharp(alg, tz), 0.0)))
    if B == 0.0:
        return 0.0, default_zeta(alg), True
    return B, tz / B, False


def lorentz_force(sys: MagneticSystem, v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    alg = sys.alg
    J = j_map(alg, -sys.B * sys.Z_m)
    out = np.zeros_like(v)
    out[..., : alg.dim_v] = v[..., : alg.dim_v] @ J.T
    return out


def hamiltonian(sys: MagneticSystem, p):
    q = np.asarray(p, dtype=float) + sys.B * sys.zeta_m
    return 0.5 * np.einsum("...i,...i->...", q, sharp(sys.alg, q))


def dh(sys: MagneticSystem, p) -> np.ndarray:
    return sharp(sys.alg, np.asarray(p, dtype=float) + sys.B * sys.zeta_m)


def euler_field_alg(alg: MetricTwoStepAlgebra, p) -> np.ndarray:
    """-ad*_{dh_p} p, i.e. <E(p), Y> = <p, [#p, Y]>.

    Only #p enters: the magnetic shift is central, so it drops out of the
    bracket. This is why the field does not depend on B.
    """
    p = np.asarray(p, dtype=float)
    w = sharp(alg, p)
    return np.einsum("...c,...a,amc->...m", p, w, alg._struct)


def euler_field(sys: MagneticSystem, p) -> np.ndarray:
    return euler_field_alg(sys.alg, p)


def load_system(cfg: dict, alg: MetricTwoStepAlgebra) -> MagneticSystem:
    return make_system(alg, float(cfg.get("B", 0.0)), cfg.get("zeta_m"))
