"""Lattices in the 3-dim Heisenberg group and marked magnetic length spectra."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import _numerics as nx
from .algebra import bracket, group_multiply, heisenberg, is_automorphism
from .spectrum import DEFAULT_CAP, FreeHomotopyClass, LengthSet, length_set

KEY_DIGITS = 9
DEFAULT_WORD_LEN = 6
_H1 = heisenberg([1.0])


def _round(x):
    return round(float(x), KEY_DIGITS) + 0.0


def float_gcd(values, rtol=1e-9):
    """Largest g with every value an integer multiple of g (to rtol)."""
    vals = sorted({abs(float(v)) for v in values if abs(v) > 0}, reverse=True)
    if not vals:
        raise ValueError("no nonzero values")
    scale = vals[0]
    g = vals[0]
    for v in vals[1:]:
        a, b = g, v
        while b > rtol * scale:
            a, b = b, math.fmod(a, b)
            if b > a - rtol * scale:
                b = 0.0
        g = a
    return g


@dataclass(frozen=True, eq=False)
class Lattice:
    generators: tuple  # log coordinates (x, y, z) of each generator

    def __post_init__(self):
        gens = tuple(tuple(float(c) for c in g) for g in self.generators)
        if not gens or any(len(g) != 3 for g in gens):
            raise ValueError("generators must be non-empty (x, y, z) triples")
        object.__setattr__(self, "generators", gens)

    @property
    def z_bar(self) -> float:
        return central_generator(self)

    def scaled(self, r: float) -> "Lattice":
        """Image under the automorphism (x, y, z) -> (r x, r y, r² z)."""
        return Lattice([(r * x, r * y, r * r * z) for x, y, z in self.generators])

    def letters(self) -> np.ndarray:
        g = np.array(self.generators)
        return np.concatenate([g, -g])


def integer_lattice() -> Lattice:
    return Lattice([(1.0, 0.0, 0.0), (0.0, 1.0, 0.0)])


def load_lattice(path) -> Lattice:
    cfg = json.loads(Path(path).read_text())
    return Lattice(cfg["generators"])


def _is_central(g, tol=1e-12):
    return abs(g[0]) <= tol and abs(g[1]) <= tol


def _elements(lat: Lattice, word_len: int):
    """All products of at most word_len letters, deduplicated per level."""
    letters = lat.letters()
    seen = {(0.0, 0.0, 0.0)}
    frontier = [np.zeros(3)]
    out = []
    for _ in range(word_len):
        nxt = []
        for g in frontier:
            prods = group_multiply(_H1, g, letters)
            for p in prods:
                key = tuple(round(c, 12) + 0.0 for c in p)
                if key not in seen:
                    seen.add(key)
                    nxt.append(p)
                    out.append(p)
        frontier = nxt
    return out


def central_generator(lat: Lattice, depth: int = 3) -> float:
    """Positive generator of the central lattice, from commutators and short words."""
    gens = [np.array(g) for g in lat.generators]
    cvals = []
    for i, a in enumerate(gens):
        if _is_central(a):
            cvals.append(a[2])
        for b in gens[i + 1:]:
            cvals.append(bracket(_H1, a, b)[2])
    for g in _elements(lat, depth):
        if _is_central(g):
            cvals.append(g[2])
    cvals = [c for c in cvals if abs(c) > 1e-12]
    if not cvals:
        raise ValueError(f"no central element within word length {depth}: not a lattice?")
    return float_gcd(cvals)


def class_key(g, A: float = 1.0):
    if _is_central(g):
        return (0.0, _round(g[2]))
    return (_round(math.sqrt(A * (g[0] ** 2 + g[1] ** 2))), 0.0)


def enumerate_classes(lat: Lattice, word_len: int = DEFAULT_WORD_LEN, A: float = 1.0) -> list:
    if word_len < 1:
        raise ValueError("word_len must be at least 1")
    keys = {class_key(g, A) for g in _elements(lat, word_len)}
    keys.discard((0.0, 0.0))
    return [FreeHomotopyClass(v, z) for v, z in sorted(keys)]


@dataclass(frozen=True)
class MarkedSpectrum:
    entries: dict  # (v_norm, z_gamma) -> LengthSet
    E: float
    B: float
    A: float
    word_len: int
    cap: int
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def keys(self):
        return sorted(self.entries)


def marked_spectrum(lat: Lattice, E: float, B: float, A: float = 1.0,
                    word_len: int = DEFAULT_WORD_LEN, cap: int = DEFAULT_CAP) -> MarkedSpectrum:
    if not E > abs(B):
        raise ValueError("the marked spectrum is only defined for E > |B|")
    entries = {}
    for cls in enumerate_classes(lat, word_len, A):
        entries[(cls.v_norm, cls.z_gamma)] = length_set(cls, E, B, A, cap)
    return MarkedSpectrum(entries, E, B, A, word_len, cap,
                          meta={"truncated": sorted(k for k, v in entries.items() if v.truncated)})


def natural_marking(lat1: Lattice, lat2: Lattice, word_len: int = DEFAULT_WORD_LEN,
                    A1: float = 1.0, A2: float = 1.0) -> dict:
    """Class map induced by sending generator i of lat1 to generator i of lat2."""
    if len(lat1.generators) != len(lat2.generators):
        raise ValueError("natural marking needs the same number of generators")
    l1, l2 = lat1.letters(), lat2.letters()
    mapping = {}
    frontier = [(np.zeros(3), np.zeros(3))]
    seen = {((0.0,) * 3, (0.0,) * 3)}
    for _ in range(word_len):
        nxt = []
        for g1, g2 in frontier:
            p1 = group_multiply(_H1, g1, l1)
            p2 = group_multiply(_H1, g2, l2)
            for a, b in zip(p1, p2):
                key = (tuple(round(c, 12) + 0.0 for c in a), tuple(round(c, 12) + 0.0 for c in b))
                if key in seen:
                    continue
                seen.add(key)
                nxt.append((a, b))
                k1, k2 = class_key(a, A1), class_key(b, A2)
                if k1 == (0.0, 0.0) and k2 == (0.0, 0.0):
                    continue
                if mapping.setdefault(k1, k2) != k2:
                    raise ValueError(f"marking is not well defined at class {k1}")
        frontier = nxt
    return mapping


def compare_mls(s1: MarkedSpectrum, s2: MarkedSpectrum, marking: dict | None = None,
                rtol: float = 1e-9):
    """(equal, report) comparing L(φ_* C; E2) with L(C; E1) class by class.

    Without a marking the identity map on the common keys is used. Report rows
    are (key1, key2, equal, detail).
    """
    if marking is None:
        marking = {k: k for k in s1.entries if k in s2.entries}
    targets = list(marking.values())
    if len(set(targets)) != len(targets):
        raise ValueError("marking is not injective on class keys")
    missing = [k for k in marking if k not in s1.entries]
    missing += [v for v in targets if v not in s2.entries]
    if missing:
        raise ValueError(f"marking refers to unknown classes {missing[:3]}")
    report = []
    for k1 in sorted(marking):
        k2 = marking[k1]
        a, b = s1.entries[k1], s2.entries[k2]
        n = min(len(a.values), len(b.values)) if (a.truncated or b.truncated) else None
        if n is None:
            same = len(a.values) == len(b.values) and all(
                nx.close(x, y, rtol) for x, y in zip(a.values, b.values))
            detail = ""
            if len(a.values) != len(b.values):
                detail = f"{len(a.values)} vs {len(b.values)} lengths"
        else:
            same = a.truncated == b.truncated and all(
                nx.close(x, y, rtol) for x, y in zip(a.values[:n], b.values[:n]))
            detail = "" if same else "truncated prefixes differ"
        if not same and not detail:
            detail = "values differ"
        report.append((k1, k2, bool(same), detail))
    return all(r[2] for r in report), report


def _spiral_max(z, E, B, A):
    """Largest supercritical spiral length for exp(z Z), z > 0; 0 if none."""
    z = np.asarray(z, dtype=float)
    c = 2 * math.pi * A * E / math.sqrt(E * E - B * B)
    vertex = z / (2 * math.pi * A)
    # admissible ℓ: 1 <= ℓ < z (E + |B|) / (2πA E), the wider of the two rows
    lmax = np.ceil(z * (E + abs(B)) / (2 * math.pi * A * E)) - 1
    best = np.zeros_like(z)
    for cand in (np.floor(vertex), np.ceil(vertex)):
        ell = np.clip(cand, 1, None)
        ok = (ell <= lmax) & (ell >= 1)
        val = c * np.sqrt(np.maximum(ell * z / (math.pi * A) - ell * ell, 0.0))
        best = np.where(ok, np.maximum(best, val), best)
    return best


def central_rigidity_statistic(z_bar: float | Lattice, E: float, B: float, A: float = 1.0,
                               h_max: int = 10_000) -> float:
    """sup over 1 <= h <= h_max of max L([exp(h z̄ Z)]; E) / h.

    The spiral length is concave in ℓ with vertex at ℓ = h z̄/(2πA), so the
    maximum over admissible integers sits at the floor or ceiling of it.
    """
    if not E > abs(B):
        raise ValueError("needs E > |B|")
    if isinstance(z_bar, Lattice):
        z_bar = z_bar.z_bar
    h = np.arange(1, h_max + 1, dtype=float)
    z = h * abs(z_bar)
    longest = np.maximum(_spiral_max(z, E, B, A), z)
    return float(np.max(longest / h))


def rigidity_bound(z_bar: float, E: float, B: float) -> float:
    return abs(z_bar) / math.sqrt(1 - (B / E) ** 2)


def marking_decompose(phi_star, A: float = 1.0, tol: float = 1e-10):
    """Split an automorphism of 𝔥₁ as R1 (𝔳→𝔳) + R2 (𝔳→𝔷) + S (𝔷→𝔷).

    Returns (R1, R2, S, isometric) where isometric means R1 preserves the
    𝔳-metric A·I and |S| = 1.
    """
    phi = np.asarray(phi_star, dtype=float)
    if phi.shape != (3, 3):
        raise ValueError("expected a 3x3 matrix on the basis (X, Y, Z)")
    alg = heisenberg([A])
    ok, worst = is_automorphism(alg, phi, tol)
    if not ok or abs(np.linalg.det(phi)) <= tol:
        raise ValueError(f"not a Lie algebra automorphism; bracket fails on basis pair {worst}")
    if np.max(np.abs(phi[:2, 2])) > tol:
        raise ValueError("automorphism must preserve the centre")
    R1 = phi[:2, :2].copy()
    R2 = phi[2:, :2].copy()
    S = float(phi[2, 2])
    Gv = A * np.eye(2)
    iso = bool(np.max(np.abs(R1.T @ Gv @ R1 - Gv)) <= tol * A and abs(abs(S) - 1) <= tol)
    return R1, R2, S, iso
