"""Empirical density of central z0-values of periodic magnetic geodesics.

For E > |B| and a lattice with central generator exp(z̄ Z), every pair (h, ℓ)
with s = h z̄/(πAℓ) above the row threshold gives an admissible z0 = ∓sqrt((E² -
B²)/(s - 1)). As h/ℓ ranges over the rationals these fill (-E-B, 0) and
(0, E-B). The gap statistic below measures how well they do at a finite cap.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _numerics as nx
from .geodesics import HeisGeodesic
from .spectrum import periodicity_residual


@dataclass(frozen=True)
class DensityReport:
    bound: int
    interval: tuple
    admissible_z0: np.ndarray
    max_gap: float
    gap_at: tuple = ()

    @property
    def count(self) -> int:
        return len(self.admissible_z0)


def _check(E, B, z_bar, bound):
    if not E > abs(B):
        raise ValueError("density needs E > |B|")
    if not z_bar > 0:
        raise ValueError("z_bar must be positive")
    if bound < 1:
        raise ValueError("bound must be at least 1")


def admissible_pairs(z_bar: float, E: float, B: float, A: float, bound: int):
    """Arrays (h, ell, z0) over both sign rows, 1 <= h, ℓ <= bound."""
    _check(E, B, z_bar, bound)
    h, ell = np.meshgrid(np.arange(1, bound + 1), np.arange(1, bound + 1), indexing="ij")
    h, ell = h.ravel(), ell.ravel()
    s = h * z_bar / (math.pi * A * ell)
    out_h, out_l, out_z = [], [], []
    for thr, sign in ((2 * E / (E + B), -1.0), (2 * E / (E - B), 1.0)):
        m = nx.strictly_greater(s, thr)
        z0 = sign * np.sqrt((E * E - B * B) / (s[m] - 1))
        # (z0 + B)² < E² is implied by the threshold; drop rounding casualties
        ok = (z0 + B) ** 2 < E * E
        out_h.append(h[m][ok])
        out_l.append(ell[m][ok])
        out_z.append(z0[ok])
    return np.concatenate(out_h), np.concatenate(out_l), np.concatenate(out_z)


def admissible_z0(z_bar: float, E: float, B: float, A: float, bound: int) -> DensityReport:
    _, _, z0 = admissible_pairs(z_bar, E, B, A, bound)
    lo, hi = -E - B, E - B
    vals = np.unique(z0)
    pts = np.concatenate([[lo], vals, [hi]])
    gaps = np.diff(pts)
    k = int(np.argmax(gaps))
    return DensityReport(bound, (lo, hi), vals, float(gaps[k]), (float(pts[k]), float(pts[k + 1])))


def density_trend(z_bar: float, E: float, B: float, A: float, bounds) -> list:
    return [(int(b), admissible_z0(z_bar, E, B, A, int(b)).max_gap) for b in bounds]


def spot_check(z_bar: float, E: float, B: float, A: float, bound: int, samples: int = 20,
               seed: int = 0) -> float:
    """Worst periodicity residual over random admissible (h, ℓ, z0) triples."""
    h, ell, z0 = admissible_pairs(z_bar, E, B, A, bound)
    rng = np.random.default_rng(seed)
    pick = rng.choice(len(z0), size=min(samples, len(z0)), replace=False)
    worst = 0.0
    for i in pick:
        z = float(z0[i])
        geo = HeisGeodesic.on_circle(A, B, A * (E * E - (z + B) ** 2), z)
        omega = 2 * math.pi * A * ell[i] / z
        worst = max(worst, periodicity_residual(geo, [0.0, 0.0, h[i] * z_bar], omega))
    return worst
