"""Magnetic geodesics: Heisenberg closed forms and a general numerical oracle."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _numerics as nx
from .algebra import bracket, group_multiply, heisenberg, levi_civita, sharp
from .magnetic import MagneticSystem, euler_field, lorentz_force, make_system

DEFAULT_STEP = 1e-3


@dataclass(frozen=True)
class HeisGeodesic:
    """Initial momentum Σ u_i α_i + Σ v_i β_i + z0 ζ on 𝔥_n with field B ζ."""

    A: np.ndarray
    B: float
    u: np.ndarray
    v: np.ndarray
    z0: float

    def __post_init__(self):
        A = np.atleast_1d(np.asarray(self.A, dtype=float))
        u = np.atleast_1d(np.asarray(self.u, dtype=float))
        v = np.atleast_1d(np.asarray(self.v, dtype=float))
        if not (A.shape == u.shape == v.shape) or A.ndim != 1:
            raise ValueError("A, u, v must be vectors of equal length")
        if np.any(A <= 0):
            raise ValueError("A_i must be positive")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "B", float(self.B))
        object.__setattr__(self, "z0", float(self.z0))

    @property
    def n(self) -> int:
        return len(self.A)

    @classmethod
    def on_circle(cls, A, B, radius_sq, z0, phase=0.0):
        r = math.sqrt(max(radius_sq, 0.0))
        return cls([A], B, [r * math.cos(phase)], [r * math.sin(phase)], z0)

    def momentum(self) -> np.ndarray:
        return np.concatenate([self.u, self.v, [self.z0]])

    def system(self) -> MagneticSystem:
        return make_system(heisenberg(self.A), self.B)


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    points: np.ndarray  # (len(times), [batch,] dim) log coordinates
    velocities: np.ndarray  # left-trivialized
    momenta: np.ndarray


def _phases(geo: HeisGeodesic, t):
    t = np.asarray(t, dtype=float)
    return t[..., None], t[..., None] * geo.z0 / geo.A


def euler_curve(geo: HeisGeodesic, t) -> np.ndarray:
    _, th = _phases(geo, t)
    c, s = np.cos(th), np.sin(th)
    a = geo.u * c - geo.v * s
    b = geo.u * s + geo.v * c
    z = np.broadcast_to(geo.z0, a.shape[:-1] + (1,))
    return np.concatenate([a, b, z], axis=-1)


def heis_eval(geo: HeisGeodesic, t) -> np.ndarray:
    """log σ(t) as (x_1..x_n, y_1..y_n, z); vectorized over t."""
    tt, th = _phases(geo, t)
    s1 = tt * nx.sinc(th) / geo.A  # sin(θ)/z0
    s2 = tt * th * nx.versine_ratio(th) / geo.A  # (1 - cos θ)/z0
    x = geo.u * s1 - geo.v * s2
    y = geo.u * s2 + geo.v * s1
    r2 = geo.u**2 + geo.v**2
    # (θ - sin θ)/z0² = (t/A)² θ (θ - sin θ)/θ³
    osc = np.sum(r2 * (tt / geo.A) ** 2 * th * nx.cycloid_ratio(th), axis=-1) / 2
    z = (geo.z0 + geo.B) * tt[..., 0] + osc
    return np.concatenate([x, y, z[..., None]], axis=-1)


def heis1_coords(A, B, u, v, z0, t):
    """Broadcasting 𝔥₁ closed form over arrays of parameters and times."""
    A, B, u, v, z0, t = (np.asarray(a, dtype=float) for a in (A, B, u, v, z0, t))
    th = t * z0 / A
    s1 = t * nx.sinc(th) / A
    s2 = t * th * nx.versine_ratio(th) / A
    z = (z0 + B) * t + 0.5 * (u * u + v * v) * (t / A) ** 2 * th * nx.cycloid_ratio(th)
    return np.stack(np.broadcast_arrays(u * s1 - v * s2, u * s2 + v * s1, z), axis=-1)


def velocity(geo: HeisGeodesic, t) -> np.ndarray:
    p = euler_curve(geo, t)
    n = geo.n
    out = np.empty_like(p)
    out[..., :n] = p[..., :n] / geo.A
    out[..., n: 2 * n] = p[..., n: 2 * n] / geo.A
    out[..., -1] = geo.z0 + geo.B
    return out


def energy(geo: HeisGeodesic) -> float:
    return math.sqrt(float(np.sum((geo.u**2 + geo.v**2) / geo.A)) + (geo.z0 + geo.B) ** 2)


def _rhs(sys: MagneticSystem, p, U):
    w = sharp(sys.alg, p + sys.B * sys.zeta_m)
    return euler_field(sys, p), w - 0.5 * bracket(sys.alg, w, U)


def integrate_numeric(sys: MagneticSystem, p0, T: float, steps: int | None = None,
                      store_every: int = 1) -> Trajectory:
    """Classical RK4 on the reduced momentum p and the log coordinates U.

    p' = E(p) on 𝔤* and U' = w - [w, U]/2 with w = #(p + B ζ_m), which is the
    left-trivialized velocity equation rewritten for exponential coordinates.
    ``p0`` may carry leading batch axes.
    """
    if steps is None:
        steps = max(2, math.ceil(abs(T) / DEFAULT_STEP))
    if steps < 2:
        raise ValueError("steps must be at least 2")
    h = T / steps
    p = np.array(p0, dtype=float)
    U = np.zeros_like(p)
    keep = list(range(0, steps + 1, store_every))
    if keep[-1] != steps:
        keep.append(steps)
    P, Us = [p.copy()], [U.copy()]
    for k in range(1, steps + 1):
        k1p, k1u = _rhs(sys, p, U)
        k2p, k2u = _rhs(sys, p + 0.5 * h * k1p, U + 0.5 * h * k1u)
        k3p, k3u = _rhs(sys, p + 0.5 * h * k2p, U + 0.5 * h * k2u)
        k4p, k4u = _rhs(sys, p + h * k3p, U + h * k3u)
        p = p + h / 6 * (k1p + 2 * k2p + 2 * k3p + k4p)
        U = U + h / 6 * (k1u + 2 * k2u + 2 * k3u + k4u)
        if k % store_every == 0 or k == steps:
            if not (np.all(np.isfinite(p)) and np.all(np.isfinite(U))):
                raise FloatingPointError(f"non-finite state at step {k}, t={k * h:.6g}")
            P.append(p.copy())
            Us.append(U.copy())
    P = np.stack(P)
    times = np.asarray(keep, dtype=float) * h
    vel = sharp(sys.alg, P + sys.B * sys.zeta_m)
    return Trajectory(times, np.stack(Us), vel, P)


def trajectory_energy(sys: MagneticSystem, traj: Trajectory) -> np.ndarray:
    return sys.alg.norm(traj.velocities)


def second_order_residual(sys: MagneticSystem, p) -> np.ndarray:
    """∇_σ' σ' - F σ' at momentum p, using σ'' = #(E(p)) in the left frame."""
    w = sharp(sys.alg, p + sys.B * sys.zeta_m)
    dw = sharp(sys.alg, euler_field(sys, p))
    return dw + levi_civita(sys.alg, w, w) - lorentz_force(sys, w)


def left_translate(alg, g, points) -> np.ndarray:
    return group_multiply(alg, g, points)


def tangent_eval(A: float, B: float, x0: float, y0: float, z0_tan: float, t) -> np.ndarray:
    """3-dim geodesic from the initial velocity x0 X + y0 Y + z0_tan Z.

    Straight one-parameter subgroup when z0_tan = B or x0 = y0 = 0, otherwise
    the spiral with rotation rate (z0_tan - B)/A.
    """
    t = np.asarray(t, dtype=float)
    k = z0_tan - B
    if abs(k) < 1e-13 * max(1.0, abs(B)) or (x0 == 0 and y0 == 0):
        return np.stack([t * x0, t * y0, t * z0_tan], axis=-1)
    th = t * k / A
    s, c1 = np.sin(th), 1 - np.cos(th)
    x = A / k * (s * x0 - c1 * y0)
    y = A / k * (c1 * x0 + s * y0)
    e2 = A * (x0**2 + y0**2)
    z = (z0_tan + e2 / (2 * k)) * t - A * e2 / (2 * k**2) * s
    return np.stack([x, y, z], axis=-1)


def momentum_to_tangent(A: float, B: float, u0: float, v0: float, z0: float):
    return u0 / A, v0 / A, z0 + B


def euclidean_reference(x0: float, y0: float, B: float, t):
    """Magnetic circle in the flat plane with F(1, 0) = B (0, 1)."""
    if B == 0:
        raise ValueError("B = 0 gives straight lines, outside this model")
    t = np.asarray(t, dtype=float)
    c1, s = 1 - np.cos(t * B), np.sin(t * B)
    return -y0 / B * c1 + x0 / B * s, x0 / B * c1 + y0 / B * s


def euclidean_circle(x0: float, y0: float, B: float):
    """(center, radius) of the planar magnetic circle."""
    return (-y0 / B, x0 / B), math.hypot(x0, y0) / abs(B)
