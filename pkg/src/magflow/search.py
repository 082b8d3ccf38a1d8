"""Brute-force search for γ-periodic magnetic geodesics on 𝔥₁.

This is an oracle for the classifiers in :mod:`magflow.spectrum`: it knows
nothing about the period tables. It scans initial momenta at fixed energy
(z0 and the phase of (u0, v0)) against trial periods ω, keeps local minima of
the periodicity residual and polishes them with a batched Levenberg-Marquardt
iteration. A hit is a refined point with residual below ``accept``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import minimum_filter

from .geodesics import heis1_coords
from .spectrum import PeriodicFamily

T_SAMPLES = (0.0, 0.61, 1.37, 2.9)


@dataclass(frozen=True)
class SearchGrid:
    n_z0: int = 80
    n_omega: int = 160  # per sign
    n_phase: int | None = None  # default 1 for central γ, 16 otherwise
    omega_min: float = 0.5
    omega_max: float = 40.0
    max_candidates: int = 48
    accept: float = 1e-7
    lm_iters: int = 60


@dataclass(frozen=True)
class OracleHit:
    z0: float
    phase: float
    omega: float
    residual: float


def _residual(params, A, B, E, gamma, noncentral, t=T_SAMPLES):
    """Stacked residual vectors, shape (..., 3 * len(t))."""
    z0, ph, om = params[..., 0], params[..., 1], params[..., 2]
    r = np.sqrt(np.maximum(A * (E * E - (z0 + B) ** 2), 0.0))
    u = (r * np.cos(ph))[..., None]
    v = (r * np.sin(ph))[..., None]
    tt = np.asarray(t)
    s0 = heis1_coords(A, B, u, v, z0[..., None], tt)
    s1 = heis1_coords(A, B, u, v, z0[..., None], tt + om[..., None])
    g = np.asarray(gamma, dtype=float)
    lhs = s0 + g
    lhs[..., 2] += 0.5 * (g[0] * s0[..., 1] - g[1] * s0[..., 0])
    d = lhs - s1
    if noncentral:
        # γ ranges over its conjugacy class exp(V_γ + c Z); pick the best c
        d[..., 2] -= d[..., 2].mean(axis=-1, keepdims=True)
    return d.reshape(d.shape[:-2] + (-1,))


def _score(res, nt):
    return np.max(np.linalg.norm(res.reshape(res.shape[:-1] + (nt, 3)), axis=-1), axis=-1)


def _lm(x, fun, free, iters):
    """Batched Levenberg-Marquardt over rows of x, updating only ``free`` columns."""
    lam = np.full(len(x), 1e-3)
    f = fun(x)
    cost = np.sum(f * f, axis=-1)
    for _ in range(iters):
        J = []
        for j in free:
            h = 1e-7 * np.maximum(1.0, np.abs(x[:, j]))
            xp = x.copy()
            xp[:, j] += h
            J.append((fun(xp) - f) / h[:, None])
        J = np.stack(J, axis=-1)
        JTJ = np.einsum("kmi,kmj->kij", J, J)
        g = np.einsum("kmi,km->ki", J, f)
        D = np.einsum("kii->ki", JTJ) + 1e-12
        M = JTJ + lam[:, None, None] * np.einsum("ki,ij->kij", D, np.eye(len(free)))
        step = -np.linalg.solve(M, g[..., None])[..., 0]
        xn = x.copy()
        xn[:, free] += step
        fn = fun(xn)
        cn = np.sum(fn * fn, axis=-1)
        better = np.isfinite(cn) & (cn < cost)
        x[better], f[better], cost[better] = xn[better], fn[better], cn[better]
        lam = np.where(better, lam / 3, lam * 4)
        # stop once every row has converged or stalled
        if np.all((cost < 1e-30) | (lam > 1e12)):
            break
    return x


def brute_force_periodic_search(A: float, B: float, gamma, E: float,
                                grid: SearchGrid | None = None) -> list:
    """Oracle hits (z0, phase, ω, residual), deduplicated and sorted."""
    grid = grid or SearchGrid()
    gamma = np.asarray(gamma, dtype=float)
    noncentral = bool(np.any(gamma[:2] != 0))
    n_phase = grid.n_phase or (16 if noncentral else 1)
    z0 = np.linspace(-B - E, -B + E, grid.n_z0)
    ph = np.linspace(0.0, 2 * math.pi, n_phase, endpoint=False)
    om_pos = np.linspace(grid.omega_min, grid.omega_max, grid.n_omega)
    om = np.concatenate([-om_pos[::-1], om_pos])
    P = np.stack(np.meshgrid(z0, ph, om, indexing="ij"), axis=-1)
    nt = len(T_SAMPLES)
    R = _score(_residual(P, A, B, E, gamma, noncentral), nt)

    loc = R == minimum_filter(R, size=3, mode=("nearest", "wrap", "nearest"))
    idx = np.argwhere(loc)
    order = np.argsort(R[loc])[: grid.max_candidates]
    x = P[tuple(idx[order].T)].copy()
    free = [0, 1, 2] if noncentral else [0, 2]

    def fun(q):
        return _residual(q, A, B, E, gamma, noncentral)

    x = _lm(x, fun, free, grid.lm_iters)
    res = _score(fun(x), nt)
    hits = []
    lo, hi = grid.omega_min * (1 - 1e-6), grid.omega_max * (1 + 1e-6)
    for (zz, pp, ww), rr in zip(x, res):
        if not (rr < grid.accept and lo <= abs(ww) <= hi):
            continue
        if (zz + B) ** 2 > E * E * (1 + 1e-9):
            continue
        pp = math.remainder(pp, 2 * math.pi) if noncentral else 0.0
        if any(abs(zz - h.z0) < 1e-6 and abs(ww - h.omega) < 1e-6 * max(1, abs(ww))
               and (not noncentral or abs(math.remainder(pp - h.phase, 2 * math.pi)) < 1e-5)
               for h in hits):
            continue
        hits.append(OracleHit(float(zz), float(pp), float(ww), float(rr)))
    hits.sort(key=lambda h: (h.omega, h.z0))
    return hits


def match_hits(hits, families, E, B, grid: SearchGrid | None = None, contractible=False,
               z0_tol=None):
    """(missed, false_hits): in-window families without a hit, and unexplained hits."""
    grid = grid or SearchGrid()
    if z0_tol is None:
        z0_tol = max(1e-5, 2 * E / (grid.n_z0 - 1))

    def explains(f: PeriodicFamily, h: OracleHit):
        if abs(f.z0 - h.z0) > z0_tol:
            return False
        ratio = h.omega / f.omega
        if contractible:
            return abs(ratio - round(ratio)) < 1e-5 and round(ratio) != 0
        return abs(ratio - 1) < 1e-5

    window = [f for f in families if grid.omega_min <= abs(f.omega) <= grid.omega_max]
    missed = [f for f in window if not any(explains(f, h) for h in hits)]
    false = [h for h in hits if not any(explains(f, h) for f in families)]
    return missed, false
