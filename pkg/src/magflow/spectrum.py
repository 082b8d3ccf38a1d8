"""Periodic magnetic geodesics on Heisenberg groups and their length sets.

Two independent classifiers of central spiraling orbits are provided: one in
momentum coordinates (ℓ-table) and one in the tangent-vector convention
(μ = E/|B| cases). They must agree family by family.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _numerics as nx
from .algebra import group_multiply, heisenberg
from .geodesics import HeisGeodesic, heis_eval

DEFAULT_CAP = 10_000
CONTINUUM_POINTS = 33
CONTINUUM_MARGIN = 1e-6


@dataclass(frozen=True)
class FreeHomotopyClass:
    v_norm: float
    z_gamma: float

    def __post_init__(self):
        if self.v_norm < 0:
            raise ValueError("v_norm must be nonnegative")

    @property
    def kind(self) -> str:
        if self.v_norm == 0 and self.z_gamma == 0:
            return "identity"
        return "central" if self.v_norm == 0 else "noncentral"

    def representative(self, A: float = 1.0) -> np.ndarray:
        """log γ = (|V|/sqrt(A)) X + z_γ Z on 𝔥₁."""
        return np.array([self.v_norm / math.sqrt(A), 0.0, self.z_gamma])


@dataclass(frozen=True)
class PeriodicFamily:
    branch: str
    ell: int | None
    z0: float
    omega: float
    radius_sq: float
    length: float
    phase: float = 0.0  # angle of (u0, v0) for the representative
    start: tuple = ()  # log σ(0) when the representative is left-translated
    mode: int = 0  # active mode for n > 1

    def key(self):
        return (self.omega, self.radius_sq)


@dataclass(frozen=True)
class LengthSet:
    values: tuple
    truncated: bool = False
    meta: dict = field(default_factory=dict, compare=False)

    def __len__(self):
        return len(self.values)


def _family(branch, ell, z0, omega, radius_sq, E, **kw) -> PeriodicFamily:
    return PeriodicFamily(branch, None if ell is None else int(ell), float(z0), float(omega),
                          float(max(radius_sq, 0.0)), float(E * abs(omega)), **kw)


def dedup_lengths(values, rtol=1e-9) -> tuple:
    out = []
    for v in sorted(float(x) for x in values):
        if not out or not nx.close(v, out[-1], rtol):
            out.append(v)
    return tuple(out)


def _regime(E, B):
    if nx.close(E, abs(B)):
        return 0
    return 1 if E > abs(B) else -1


# contractible class


def contractible_families(E: float, B: float, A) -> list:
    """Closed geodesics homotopic to a point: only for 0 < E < |B|.

    For several A_i the orbits with one active mode close up individually; when
    all A_i agree every initial direction works and one family is returned.
    """
    if E <= 0:
        raise ValueError("E must be positive")
    A = np.atleast_1d(np.asarray(A, dtype=float))
    if _regime(E, B) >= 0:
        return []
    z0 = -math.copysign(math.sqrt(B * B - E * E), B)
    fams = []
    modes = [0] if np.allclose(A, A[0], rtol=1e-12) else list(range(len(A)))
    seen = []
    for i in modes:
        if any(abs(A[i] - a) <= 1e-12 * A[i] for a in seen):
            continue
        seen.append(A[i])
        omega = 2 * math.pi * A[i] / z0
        fams.append(_family("contractible", None, z0, omega, A[i] * (E * E - (z0 + B) ** 2),
                            E, mode=i))
    return fams


# noncentral classes


def _conjugator(alg, V, c):
    """W with [W, V] = c Z (least squares over 𝔳)."""
    nv = alg.dim_v
    M = np.array([np.einsum("a,b,abk->k", alg.basis(i)[:nv], V[:nv], alg.bracket_tensor)
                  for i in range(nv)]).T
    w, *_ = np.linalg.lstsq(M, np.atleast_1d(c), rcond=None)
    out = np.zeros(alg.dim)
    out[:nv] = w
    return out


def noncentral_families(cls: FreeHomotopyClass, E: float, B: float, A: float = 1.0) -> list:
    """Straight γ-periodic orbits; none when E <= |B|.

    σ*(t) = exp(t(V0 + B Z)) reaches γ* = exp(V_γ + ωB Z) at t = ω. Conjugating
    by exp(W) with [W, V_γ] = (z_γ - ωB) Z moves γ* to γ, so exp(W)σ* works.
    """
    if cls.v_norm <= 0:
        raise ValueError("noncentral class needs v_norm > 0")
    if _regime(E, B) <= 0:
        return []
    alg = heisenberg([A])
    Vg = cls.representative(A)
    Vg[2] = 0.0
    speed = math.sqrt(E * E - B * B)
    fams = []
    for sgn, branch in ((1.0, "noncentral+"), (-1.0, "noncentral-")):
        omega = sgn * cls.v_norm / speed
        W = _conjugator(alg, Vg, cls.z_gamma - omega * B)
        fams.append(_family(branch, None, 0.0, omega, A * speed**2, E,
                            phase=0.0 if sgn > 0 else math.pi,
                            start=tuple(float(w) for w in W)))
    return fams


# central classes


def central_line_families(z_gamma: float, E: float, B: float = 0.0) -> list:
    if z_gamma == 0 or E <= 0:
        raise ValueError("need z_gamma != 0 and E > 0")
    return [_family(f"central-line{tag}", None, -B + sgn * E, z_gamma / (sgn * E), 0.0, E)
            for sgn, tag in ((1.0, "+"), (-1.0, "-"))]


def _continuum(z_gamma, E, B, A, points, margin):
    # E = |B|: any z0 strictly between -2B and 0 closes up when z_γ/(πA) = ℓ
    ell = z_gamma / (math.pi * A)
    if not nx.is_integer(ell):
        return []
    ell = int(round(ell))
    tau = np.linspace(margin, 1 - margin, points)
    z0 = -2 * B * tau
    branch = "3a" if B > 0 else "3b"
    return [_family(branch, ell, z, 2 * math.pi * A * ell / z, A * (E * E - (z + B) ** 2), E)
            for z in z0]


def central_spiral_families(z_gamma: float, E: float, B: float, A: float,
                            cap: int = DEFAULT_CAP, continuum_points: int = CONTINUUM_POINTS,
                            margin: float = CONTINUUM_MARGIN, with_flag: bool = False):
    """Spiraling exp(z_γ Z)-periodic families from the ℓ-table on 𝔥₁."""
    if z_gamma == 0 or E <= 0 or A <= 0:
        raise ValueError("need z_gamma != 0, E > 0, A > 0")
    regime = _regime(E, B)
    if regime == 0:
        fams = _continuum(z_gamma, E, B, A, continuum_points, margin)
        return (fams, bool(fams)) if with_flag else fams
    ell = np.concatenate([np.arange(-cap, 0), np.arange(1, cap + 1)])
    s = z_gamma / (math.pi * A * ell)
    dE = E * E - B * B
    rows = []
    if regime > 0:
        rows.append(("1a", nx.strictly_greater(s, 2 * E / (E + B)), -1.0))
        rows.append(("1b", nx.strictly_greater(s, 2 * E / (E - B)), 1.0))
    else:
        ok = nx.strictly_greater(s, 2 * E / (E - abs(B))) & nx.strictly_greater(
            2 * E / (E + abs(B)), s)
        rows.append(("2a" if B > 0 else "2b", ok, -math.copysign(1.0, B)))
    fams = []
    truncated = regime < 0
    for branch, mask, sign in rows:
        if mask[0] or mask[-1]:
            truncated = True
        for l, sv in zip(ell[mask], s[mask]):
            z0 = sign * math.sqrt(dE / (sv - 1))
            r2 = A * (E * E - (z0 + B) ** 2)
            if r2 <= 0:
                continue
            fams.append(_family(branch, l, z0, 2 * math.pi * A * l / z0, r2, E))
    return (fams, truncated) if with_flag else fams


def appendix_spiral_classifier(z_gamma: float, E: float, B: float, A: float,
                               cap: int = DEFAULT_CAP,
                               continuum_points: int = CONTINUUM_POINTS,
                               margin: float = CONTINUUM_MARGIN) -> list:
    """Same families via μ = E/|B| and ζ_ℓ/A = z_γ/(πAℓ) in tangent coordinates.

    Each case gives (A|v_0|², z0_tan, ω); the momentum data are recovered as
    radius_sq = A * A|v_0|² and z0 = z0_tan - B.
    """
    if B == 0:
        raise ValueError("B = 0 leaves μ undefined")
    if z_gamma == 0:
        raise ValueError("z_gamma must be nonzero")
    mu = E / abs(B)
    fams = []

    def emit(case, l, ebar2, z0t, omega):
        if ebar2 <= 0:
            return
        z0 = z0t - B
        fams.append(_family(case, l, z0, omega, A * ebar2, E))

    if nx.close(mu, 1.0):
        ratio = z_gamma / (math.pi * A)
        if not nx.is_integer(ratio):
            return []
        l = int(round(ratio))
        tau = np.linspace(margin, 1 - margin, continuum_points)
        for z0t in abs(B) * (1 - 2 * tau):
            emit("6", l, B * B - z0t * z0t, z0t, 2 * z_gamma / (z0t - B))
        return fams

    for l in list(range(-cap, 0)) + list(range(1, cap + 1)):
        q = z_gamma / (math.pi * l) / A
        gt = nx.strictly_greater
        if mu < 1:
            case = "1" if gt(q, -2 * mu / (1 - mu)) and gt(2 * mu / (1 + mu), q) else None
        elif nx.close(q, 2.0):
            case = "5"
        elif gt(q, 2 * mu / (1 + mu)) and gt(2.0, q):
            case = "2"
        elif gt(q, 2.0) and not gt(q, 2 * mu / (mu - 1)):
            case = "3"
        elif gt(q, 2 * mu / (mu - 1)):
            case = "4"
        else:
            case = None
        if case is None:
            continue
        if case == "5":
            ebar2 = 2 * abs(B) * math.sqrt(E * E - B * B)
            z0t = B - ebar2 / (2 * B)
            emit("5", l, ebar2, z0t, -math.copysign(1.0, B) * z_gamma / math.sqrt(E * E - B * B))
            continue
        r = (mu * mu - 1) / (q - 1)
        root = math.sqrt(r)
        z0t = -B * (-1 + root)
        emit(case, l, B * B * (r * (q - 2) + 2 * root), z0t, 2 * z_gamma * A / (q * A * (z0t - B)))
        if case == "4":
            z0t = -B * (-1 - root)
            emit("4-", l, B * B * (r * (q - 2) - 2 * root), z0t,
                 2 * z_gamma * A / (q * A * (z0t - B)))
    return fams


def family_multiset(fams, rtol=1e-9):
    return sorted((f.omega, f.radius_sq) for f in fams)


def same_families(f1, f2, rtol=1e-9) -> bool:
    a, b = family_multiset(f1), family_multiset(f2)
    if len(a) != len(b):
        return False
    return all(nx.close(x[0], y[0], rtol) and nx.close(x[1], y[1], rtol) for x, y in zip(a, b))


# length sets and bounds


def length_set(cls: FreeHomotopyClass, E: float, B: float, A: float = 1.0,
               enumeration_cap: int = DEFAULT_CAP) -> LengthSet:
    if E <= 0:
        raise ValueError("E must be positive")
    kind = cls.kind
    if kind == "identity":
        fams = contractible_families(E, B, [A])
        return LengthSet(dedup_lengths(f.length for f in fams))
    if kind == "noncentral":
        fams = noncentral_families(cls, E, B, A)
        return LengthSet(dedup_lengths(f.length for f in fams))
    fams, trunc = central_spiral_families(cls.z_gamma, E, B, A, cap=enumeration_cap,
                                          with_flag=True)
    vals = [f.length for f in fams] + [abs(cls.z_gamma)]
    return LengthSet(dedup_lengths(vals), truncated=bool(trunc),
                     meta={"families": len(fams)})


def length_bounds(z_gamma: float, E: float, B: float, A: float = 1.0):
    """(upper, lower, regime) for spiral lengths of a central class."""
    if z_gamma == 0:
        raise ValueError("z_gamma must be nonzero")
    regime = _regime(E, B)
    if regime > 0:
        return abs(z_gamma) / math.sqrt(1 - (B / E) ** 2), None, "supercritical"
    if regime < 0:
        return None, abs(z_gamma), "subcritical"
    return None, abs(z_gamma), "critical"


def resonance_check(geo: HeisGeodesic, omega: float, rtol: float = 1e-9) -> bool:
    active = (geo.u**2 + geo.v**2) != 0
    turns = omega * geo.z0 / (2 * math.pi * geo.A)
    return bool(np.all(nx.is_integer(turns[active], rtol)))


# verification


def representative(fam: PeriodicFamily, B: float, A) -> tuple:
    """(geo, start) with σ(t) = start · heis_eval(geo, t)."""
    A = np.atleast_1d(np.asarray(A, dtype=float))
    r = math.sqrt(fam.radius_sq)
    u = np.zeros_like(A)
    v = np.zeros_like(A)
    u[fam.mode] = r * math.cos(fam.phase)
    v[fam.mode] = r * math.sin(fam.phase)
    geo = HeisGeodesic(A, B, u, v, fam.z0)
    start = np.asarray(fam.start, dtype=float) if fam.start else None
    return geo, start


def periodicity_residual(geo: HeisGeodesic, gamma, omega: float, start=None,
                         n_samples: int = 16) -> float:
    """max_t |log(γ σ(t)) - log σ(t + ω)| over sampled t.

    The distance is divided by max(1, max_t |log σ(t + ω)|): near z0 = 0 the
    periods and coordinates grow without bound and an absolute tolerance would
    fall below the float spacing of the coordinates themselves.
    """
    alg = heisenberg(geo.A)
    t = np.linspace(0.0, max(abs(omega), 1.0), n_samples)
    s0 = heis_eval(geo, t)
    s1 = heis_eval(geo, t + omega)
    if start is not None:
        s0 = group_multiply(alg, start, s0)
        s1 = group_multiply(alg, start, s1)
    lhs = group_multiply(alg, np.asarray(gamma, dtype=float), s0)
    scale = max(1.0, float(np.max(np.linalg.norm(s1, axis=-1))))
    return float(np.max(np.linalg.norm(lhs - s1, axis=-1))) / scale


def family_residual(fam: PeriodicFamily, B: float, A, gamma) -> float:
    geo, start = representative(fam, B, A)
    return periodicity_residual(geo, gamma, fam.omega, start)
