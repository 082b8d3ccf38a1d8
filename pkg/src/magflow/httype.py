"""Magnetic geodesics on a six-dimensional Heisenberg-type group.

Basis X1..X4, Z1, Z2 orthonormal with [X1,X2] = Z1, [X1,X3] = Z2,
[X2,X4] = -Z2, [X3,X4] = Z1, and magnetic field B ζ1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _numerics as nx
from .algebra import group_multiply, ht_algebra

HT = ht_algebra()


@dataclass(frozen=True)
class HTInitialData:
    u: np.ndarray
    z1: float
    z2: float
    B: float

    def __post_init__(self):
        u = np.asarray(self.u, dtype=float)
        if u.shape != (4,):
            raise ValueError("u must have four components")
        object.__setattr__(self, "u", u)

    @property
    def zhat(self) -> float:
        return math.hypot(self.z1, self.z2)

    @property
    def u_sq(self) -> float:
        return float(self.u @ self.u)

    def momentum(self) -> np.ndarray:
        return np.concatenate([self.u, [self.z1, self.z2]])

    def energy(self) -> float:
        return math.sqrt(self.u_sq + (self.z1 + self.B) ** 2 + self.z2**2)


def _rot(d: HTInitialData) -> np.ndarray:
    """M u: the rotation direction of the 𝔳*-momentum, scaled by ẑ."""
    z1, z2 = d.z1, d.z2
    M = np.array([[0, -z1, -z2, 0],
                  [z1, 0, 0, z2],
                  [z2, 0, 0, -z1],
                  [0, -z2, z1, 0]], dtype=float)
    return M @ d.u


def ht_euler_curve(d: HTInitialData, t) -> np.ndarray:
    t = np.asarray(t, dtype=float)[..., None]
    zh = d.zhat
    th = zh * t
    # sin(ẑt)/ẑ written as t sinc(ẑt) keeps ẑ = 0 finite (frozen curve)
    a = d.u * np.cos(th) + _rot(d) * t * nx.sinc(th)
    c = np.broadcast_to([d.z1, d.z2], a.shape[:-1] + (2,))
    return np.concatenate([a, c], axis=-1)


def ht_geodesic_eval(d: HTInitialData, t) -> np.ndarray:
    """log σ(t) as (x1..x4, z1, z2).

    ẑ = 0 reduces to the straight line x = u t, z = (B t, 0), the same limit the
    guarded kernels give.
    """
    t = np.asarray(t, dtype=float)
    tt = t[..., None]
    zh = d.zhat
    th = zh * tt
    x = d.u * tt * nx.sinc(th) + _rot(d) * tt**2 * nx.versine_ratio(th)
    # z_j(t) = (z_j + B δ_j1) t + z_j û² (ẑt - sin ẑt)/(2 ẑ³)
    osc = 0.5 * d.u_sq * t**3 * nx.cycloid_ratio(zh * t)
    zc1 = (d.z1 + d.B) * t + d.z1 * osc
    zc2 = d.z2 * t + d.z2 * osc
    return np.concatenate([x, zc1[..., None], zc2[..., None]], axis=-1)


def ht_velocity(d: HTInitialData, t) -> np.ndarray:
    p = ht_euler_curve(d, t)
    p[..., 4] += d.B
    return p


def bracket_term(d: HTInitialData, t) -> np.ndarray:
    """z-part of [X'(t), X(t)] from the closed form, for cross-checks."""
    t = np.asarray(t, dtype=float)
    zh = d.zhat
    f = (1 - np.cos(zh * t)) * d.u_sq / zh**2
    return np.stack([-d.z1 * f, -d.z2 * f], axis=-1)


# central periods


@dataclass(frozen=True)
class NewtonOptions:
    damping: float = 0.5
    max_iter: int = 200
    step_tol: float = 1e-13
    residual_tol: float = 1e-10
    dedup_tol: float = 1e-8


@dataclass(frozen=True)
class HTRoot:
    u_sq: float
    z1: float
    z2: float
    omega: float
    residual: float
    periodicity: float

    def data(self, B: float, u=None) -> HTInitialData:
        if u is None:
            u = [math.sqrt(self.u_sq), 0.0, 0.0, 0.0]
        return HTInitialData(np.asarray(u, dtype=float), self.z1, self.z2, B)


@dataclass
class SolveReport:
    roots: list
    diagnostics: list = field(default_factory=list)


def period_system(x, xi1, xi2, E, B, k, reduced=False):
    """Residual and Jacobian of the central-period equations in (û², z1, z2)."""
    q, z1, z2 = x
    c = 2 * math.pi * k
    w = z1 * z1 + z2 * z2
    if not w > 0:
        raise ZeroDivisionError("ẑ = 0")
    zh = math.sqrt(w)
    zh3, zh5 = zh**3, zh**5
    F = np.array([
        c * (z1 + B) / zh + c * z1 * q / (2 * zh3) - xi1,
        c * z2 / zh + c * z2 * q / (2 * zh3) - xi2,
        q + (z1 + B) ** 2 + z2 * z2 - E * E,
    ])
    J = np.array([
        [c * z1 / (2 * zh3),
         c / zh - c * (z1 + B) * z1 / zh3 + c * q / (2 * zh3) - 1.5 * c * q * z1 * z1 / zh5,
         -c * (z1 + B) * z2 / zh3 - 1.5 * c * q * z1 * z2 / zh5],
        [c * z2 / (2 * zh3),
         -c * z1 * z2 / zh3 - 1.5 * c * q * z1 * z2 / zh5,
         c / zh - c * z2 * z2 / zh3 + c * q / (2 * zh3) - 1.5 * c * q * z2 * z2 / zh5],
        [1.0, 2 * (z1 + B), 2 * z2],
    ])
    if reduced:
        return F[[0, 2]], J[np.ix_([0, 2], [0, 1])]
    return F, J


def _newton(x0, fun, opts: NewtonOptions):
    """Damped Newton: halve the step while the residual grows."""
    x = np.array(x0, dtype=float)
    try:
        F, J = fun(x)
    except (ZeroDivisionError, ValueError):
        return None, "invalid seed"
    r = np.linalg.norm(F)
    for it in range(opts.max_iter):
        try:
            step = np.linalg.solve(J, -F)
        except np.linalg.LinAlgError:
            return x, f"singular Jacobian at iteration {it}"
        lam = 1.0
        while True:
            xn = x + lam * step
            try:
                Fn, Jn = fun(xn)
                rn = np.linalg.norm(Fn)
            except (ZeroDivisionError, ValueError):
                rn = math.inf
            if np.isfinite(rn) and (rn <= r or lam < 1e-12):
                break
            lam *= opts.damping
            if lam < 1e-12:
                return x, f"line search failed at iteration {it}"
        x, F, J, r = xn, Fn, Jn, rn
        if np.linalg.norm(lam * step) <= opts.step_tol:
            return x, "converged"
    return x, "max iterations"


def default_seeds(xi1, xi2, E, B, k):
    seeds = []
    qs = np.linspace(E * E / 5, E * E, 5)
    z1s = np.linspace(-E - abs(B), E + abs(B), 5)
    z2s = np.linspace(-E, E, 5)
    for q in qs:
        for z1 in z1s:
            for z2 in z2s:
                seeds.append((q, z1, z2))
    # the parallel-field solution as a starting point
    for ell in (k, -k):
        s = xi1 / (math.pi * ell)
        if s != 1 and (E * E - B * B) / (s - 1) > 0:
            for sign in (-1.0, 1.0):
                z1 = sign * math.sqrt((E * E - B * B) / (s - 1))
                seeds.append((E * E - (z1 + B) ** 2, z1, 0.0))
    return seeds


def ht_periodicity_residual(d: HTInitialData, xi1, xi2, omega, n_samples=16) -> float:
    gamma = np.array([0, 0, 0, 0, xi1, xi2], dtype=float)
    t = np.linspace(0.0, max(abs(omega), 1.0), n_samples)
    lhs = group_multiply(HT, gamma, ht_geodesic_eval(d, t))
    rhs = ht_geodesic_eval(d, t + omega)
    # same scale convention as the 𝔥₁ residual
    scale = max(1.0, float(np.max(np.linalg.norm(rhs, axis=-1))))
    return float(np.max(np.linalg.norm(lhs - rhs, axis=-1))) / scale


def ht_central_period_solve(xi1: float, xi2: float, E: float, B: float, k: int,
                           seeds=None, opts: NewtonOptions | None = None) -> SolveReport:
    """Roots (û², z1, z2) with the period ω = 2πk/ẑ, each checked for γ-periodicity.

    With ξ2 = 0 the second equation forces z2 = 0, so the solve runs on the
    reduced system in (û², z1) and z2 is exactly zero.
    """
    if k == 0 or not E > 0:
        raise ValueError("need k != 0 and E > 0")
    opts = opts or NewtonOptions()
    reduced = xi2 == 0
    seeds = default_seeds(xi1, xi2, E, B, k) if seeds is None else list(seeds)
    roots, diags = [], []
    for seed in seeds:
        seed = np.asarray(seed, dtype=float)
        if reduced:
            x0 = seed[:2]
            fun = lambda x: period_system((x[0], x[1], 0.0), xi1, xi2, E, B, k, reduced=True)  # noqa: E731
        else:
            x0 = seed
            fun = lambda x: period_system(x, xi1, xi2, E, B, k)  # noqa: E731
        x, status = _newton(x0, fun, opts)
        if x is None:
            diags.append((tuple(seed), status))
            continue
        q, z1 = float(x[0]), float(x[1])
        z2 = 0.0 if reduced else float(x[2])
        res = float(np.max(np.abs(period_system((q, z1, z2), xi1, xi2, E, B, k)[0])))
        if not res <= opts.residual_tol:
            diags.append((tuple(seed), f"{status}; residual {res:.3e}"))
            continue
        if q <= 0 or math.hypot(z1, z2) <= 0:
            diags.append((tuple(seed), "root with û² <= 0 or ẑ = 0 discarded"))
            continue
        if any(abs(q - r.u_sq) < opts.dedup_tol and abs(z1 - r.z1) < opts.dedup_tol
               and abs(z2 - r.z2) < opts.dedup_tol for r in roots):
            continue
        omega = 2 * math.pi * k / math.hypot(z1, z2)
        d = HTInitialData(np.array([math.sqrt(q), 0, 0, 0]), z1, z2, B)
        per = ht_periodicity_residual(d, xi1, xi2, omega)
        roots.append(HTRoot(q, z1, z2, omega, res, per))
    roots.sort(key=lambda r: (r.z1, r.z2, r.u_sq))
    return SolveReport(roots, diags)
