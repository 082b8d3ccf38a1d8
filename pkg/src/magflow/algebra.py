"""Metric two-step nilpotent Lie algebras in exponential coordinates.

Vectors are flat numpy arrays of length ``dim`` with the 𝔳-block first and the
𝔷-block second. Group elements are stored by their logarithm, which is a
global chart because exp is a diffeomorphism for simply connected nilpotent
groups. Every function broadcasts over leading batch axes.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.linalg

SPD_PIVOT_TOL = 1e-12


def check_spd(gram: np.ndarray, name: str = "gram") -> np.ndarray:
    """Cholesky factor of a symmetric positive-definite matrix, or ValueError."""
    g = np.asarray(gram, dtype=float)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise ValueError(f"{name} must be square, got shape {g.shape}")
    if not np.all(np.isfinite(g)):
        raise ValueError(f"{name} has non-finite entries")
    scale = max(1.0, float(np.max(np.abs(g))))
    if np.max(np.abs(g - g.T)) > 1e-12 * scale:
        raise ValueError(f"{name} is not symmetric")
    try:
        L = np.linalg.cholesky(g)
    except np.linalg.LinAlgError as exc:
        raise ValueError(f"{name} is not positive definite") from exc
    piv = np.diag(L) ** 2
    if np.min(piv) <= SPD_PIVOT_TOL * np.max(np.abs(np.diag(g))):
        raise ValueError(f"{name} is numerically singular (pivot {np.min(piv):.3e})")
    return L


@dataclass(frozen=True, eq=False)
class MetricTwoStepAlgebra:
    dim_v: int
    dim_z: int
    bracket_tensor: np.ndarray  # c[i, j, k]: [e_i, e_j] = sum_k c[i, j, k] f_k
    gram: np.ndarray
    _struct: np.ndarray = field(init=False, repr=False)
    _gram_inv: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        c = np.array(self.bracket_tensor, dtype=float)
        g = np.array(self.gram, dtype=float)
        if c.shape != (self.dim_v, self.dim_v, self.dim_z):
            raise ValueError(
                f"bracket tensor shape {c.shape} != {(self.dim_v, self.dim_v, self.dim_z)}")
        if self.dim_z < 1 or self.dim_v < 2:
            raise ValueError("need dim_v >= 2 and dim_z >= 1")
        if np.max(np.abs(c + c.transpose(1, 0, 2)), initial=0.0) > 1e-14:
            raise ValueError("bracket tensor is not skew in its first two indices")
        n = self.dim_v + self.dim_z
        if g.shape != (n, n):
            raise ValueError(f"gram shape {g.shape} != {(n, n)}")
        check_spd(g)
        c.flags.writeable = False
        g.flags.writeable = False
        # full structure constants [e_a, e_b] = sum_c S[a, b, c] e_c on all of g
        S = np.zeros((n, n, n))
        S[: self.dim_v, : self.dim_v, self.dim_v:] = c
        S.flags.writeable = False
        ginv = np.linalg.inv(g)
        ginv.flags.writeable = False
        object.__setattr__(self, "bracket_tensor", c)
        object.__setattr__(self, "gram", g)
        object.__setattr__(self, "_struct", S)
        object.__setattr__(self, "_gram_inv", ginv)

    @property
    def dim(self) -> int:
        return self.dim_v + self.dim_z

    @property
    def is_split(self) -> bool:
        """True when the 𝔳-block is orthogonal to the centre in the Gram matrix."""
        off = self.gram[: self.dim_v, self.dim_v:]
        return bool(np.max(np.abs(off)) <= 1e-12 * max(1.0, np.max(np.abs(self.gram))))

    def basis(self, k: int) -> np.ndarray:
        e = np.zeros(self.dim)
        e[k] = 1.0
        return e

    def central(self, zpart) -> np.ndarray:
        out = np.zeros(self.dim)
        out[self.dim_v:] = zpart
        return out

    def inner(self, X, Y):
        return np.einsum("...i,ij,...j->...", X, self.gram, Y)

    def norm(self, X):
        return np.sqrt(np.maximum(self.inner(X, X), 0.0))


def _check(alg: MetricTwoStepAlgebra, *vecs):
    for v in vecs:
        if np.shape(v)[-1:] != (alg.dim,):
            raise ValueError(f"vector of shape {np.shape(v)} does not fit dim {alg.dim}")


def bracket(alg: MetricTwoStepAlgebra, X, Y) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    _check(alg, X, Y)
    return np.einsum("...a,...b,abc->...c", X, Y, alg._struct)


def group_multiply(alg: MetricTwoStepAlgebra, a, b) -> np.ndarray:
    """log(exp(a) exp(b)) = a + b + [a, b]/2 (exact in step two)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return a + b + 0.5 * bracket(alg, a, b)


def group_inverse(alg: MetricTwoStepAlgebra, a) -> np.ndarray:
    return -np.asarray(a, dtype=float)


def commutator(alg: MetricTwoStepAlgebra, a, b) -> np.ndarray:
    """log of exp(a) exp(b) exp(-a) exp(-b), which is [a, b]."""
    return bracket(alg, a, b)


def sharp(alg: MetricTwoStepAlgebra, p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    _check(alg, p)
    return p @ alg._gram_inv.T


def flat(alg: MetricTwoStepAlgebra, X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    _check(alg, X)
    return X @ alg.gram.T


def pair(p, X):
    """Natural pairing between a covector and a vector."""
    return np.einsum("...i,...i->...", p, X)


def j_map(alg: MetricTwoStepAlgebra, Z) -> np.ndarray:
    """Skew endomorphism of 𝔳 with g(j(Z)V1, V2) = g([V1, V2], Z)."""
    Z = np.asarray(Z, dtype=float)
    _check(alg, Z)
    if not alg.is_split:
        raise ValueError("j_map needs a Gram matrix with 𝔳 orthogonal to the centre")
    zs = max(1.0, float(np.max(np.abs(Z))))
    if np.max(np.abs(Z[: alg.dim_v])) > 1e-14 * zs:
        raise ValueError("j_map input is not central (nonzero 𝔳 part)")
    nv = alg.dim_v
    Gv = alg.gram[:nv, :nv]
    Gz = alg.gram[nv:, nv:]
    C = np.einsum("abk,k->ab", alg.bracket_tensor, Gz @ Z[nv:])
    return np.linalg.solve(Gv, C.T)


def levi_civita(alg: MetricTwoStepAlgebra, X, Y) -> np.ndarray:
    """Covariant derivative of left-invariant fields by the Koszul formula."""
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    _check(alg, X, Y)
    S = alg._struct
    G = alg.gram
    gXY = bracket(alg, X, Y) @ G.T
    # g([Y, e_m], X) and g([e_m, X], Y) for every basis vector e_m
    t2 = np.einsum("...a,amc,cd,...d->...m", Y, S, G, X)
    t3 = np.einsum("...a,mac,cd,...d->...m", X, S, G, Y)
    k = 0.5 * (gXY - t2 + t3)
    return k @ alg._gram_inv.T


def normalize_heisenberg_metric(gram, n: int | None = None):
    """Automorphism of 𝔥_n pulling an arbitrary metric back to standard form.

    Returns ``(phi, A)`` where the columns of ``phi`` are the images of the
    standard basis X_1..X_n, Y_1..Y_n, Z, and phi^T gram phi equals
    diag(A, A, 1) with A sorted ascending.
    """
    g = np.array(gram, dtype=float)
    if n is None:
        if g.shape[0] % 2 != 1:
            raise ValueError("a Heisenberg Gram matrix has odd size")
        n = (g.shape[0] - 1) // 2
    N = 2 * n + 1
    if g.shape != (N, N):
        raise ValueError(f"expected a {N}x{N} Gram matrix")
    check_spd(g)

    # step 0: scale X_i and Z so the centre has unit length
    zn = np.sqrt(g[-1, -1])
    psi0 = np.eye(N)
    psi0[:n, :n] /= zn
    psi0[-1, -1] /= zn
    g0 = psi0.T @ g @ psi0

    # step 1: push the 𝔳-part off the centre
    psi1 = np.eye(N)
    psi1[-1, : 2 * n] = -g0[-1, : 2 * n]
    g1 = psi1.T @ g0 @ psi1

    # step 2: real Schur form of j(Z) in g1-orthonormal coordinates
    Gv = g1[: 2 * n, : 2 * n]
    std = heisenberg([1.0] * n)
    Cmat = std.bracket_tensor[:, :, 0]
    J = np.linalg.solve(Gv, Cmat.T)
    L = np.linalg.cholesky(Gv)
    Jt = L.T @ J @ np.linalg.inv(L.T)
    T, Q = scipy.linalg.schur(Jt, output="real")
    d = np.empty(n)
    Xt = np.empty((2 * n, n))
    Yt = np.empty((2 * n, n))
    for b in range(n):
        i = 2 * b
        t10 = T[i + 1, i]
        if abs(t10) <= 1e-12 * max(1.0, np.max(np.abs(T))):
            raise ValueError("degenerate eigen-split: j(Z) has a zero block")
        if i + 2 < 2 * n and abs(T[i + 2, i + 1]) > 1e-9 * abs(t10):
            raise ValueError("degenerate eigen-split: Schur blocks are not 2x2")
        q0, q1 = Q[:, i], Q[:, i + 1]
        sgn = 1.0 if t10 > 0 else -1.0
        d[b] = abs(t10)
        # back to g1-coordinates
        Xt[:, b] = np.linalg.solve(L.T, q0)
        Yt[:, b] = np.linalg.solve(L.T, sgn * q1)
    order = np.argsort(-d, kind="stable")  # A = 1/d ascending
    d = d[order]
    Xt = Xt[:, order]
    Yt = Yt[:, order]
    psi2 = np.zeros((N, N))
    psi2[: 2 * n, :n] = Xt / np.sqrt(d)
    psi2[: 2 * n, n: 2 * n] = Yt / np.sqrt(d)
    psi2[-1, -1] = 1.0
    phi = psi0 @ psi1 @ psi2
    return phi, 1.0 / d


def is_automorphism(alg: MetricTwoStepAlgebra, phi, tol: float = 1e-10):
    """Returns (ok, worst_pair) for [phi u, phi v] = phi [u, v] on basis pairs."""
    phi = np.asarray(phi, dtype=float)
    worst, pair_ = 0.0, None
    for i in range(alg.dim):
        for j in range(i + 1, alg.dim):
            lhs = bracket(alg, phi[:, i], phi[:, j])
            rhs = phi @ bracket(alg, alg.basis(i), alg.basis(j))
            err = float(np.max(np.abs(lhs - rhs)))
            if err > worst:
                worst, pair_ = err, (i, j)
    scale = max(1.0, float(np.max(np.abs(phi))) ** 2)
    return worst <= tol * scale, pair_


def is_heisenberg_type(alg: MetricTwoStepAlgebra, tol: float = 1e-10) -> bool:
    if not alg.is_split:
        return False
    nv = alg.dim_v
    samples = [alg.basis(nv + k) for k in range(alg.dim_z)]
    for a in range(alg.dim_z):
        for b in range(a + 1, alg.dim_z):
            samples.append(alg.basis(nv + a) + alg.basis(nv + b))
    for Z in samples:
        J = j_map(alg, Z)
        zz = float(alg.inner(Z, Z))
        # j(Z)^2 = -|Z|^2 I, compared in the metric so non-orthonormal bases work
        if np.max(np.abs(J @ J + zz * np.eye(nv))) > tol * max(1.0, zz):
            return False
    return True


def heisenberg(A) -> MetricTwoStepAlgebra:
    """𝔥_n with [X_i, Y_i] = Z and {X_i/sqrt(A_i), Y_i/sqrt(A_i), Z} orthonormal."""
    A = np.atleast_1d(np.asarray(A, dtype=float))
    if np.any(A <= 0):
        raise ValueError("metric parameters A_i must be positive")
    n = len(A)
    c = np.zeros((2 * n, 2 * n, 1))
    for i in range(n):
        c[i, n + i, 0] = 1.0
        c[n + i, i, 0] = -1.0
    gram = np.diag(np.concatenate([A, A, [1.0]]))
    return MetricTwoStepAlgebra(2 * n, 1, c, gram)


def ht_algebra() -> MetricTwoStepAlgebra:
    """Six-dimensional Heisenberg-type algebra with a two-dimensional centre."""
    c = np.zeros((4, 4, 2))
    for i, j, k, val in [(0, 1, 0, 1.0), (0, 2, 1, 1.0), (1, 3, 1, -1.0), (2, 3, 0, 1.0)]:
        c[i, j, k] = val
        c[j, i, k] = -val
    return MetricTwoStepAlgebra(4, 2, c, np.eye(6))


def algebra_from_dict(cfg: dict) -> MetricTwoStepAlgebra:
    builtin = cfg.get("builtin")
    if builtin == "heisenberg":
        return heisenberg(cfg.get("A", [1.0]))
    if builtin == "ht":
        return ht_algebra()
    if builtin is not None:
        raise ValueError(f"unknown builtin algebra {builtin!r}")
    dv, dz = int(cfg["dim_v"]), int(cfg["dim_z"])
    c = np.zeros((dv, dv, dz))
    for i, j, k, val in cfg["bracket"]:
        c[int(i), int(j), int(k)] = val
        c[int(j), int(i), int(k)] = -val
    gram = np.asarray(cfg["gram"], dtype=float).reshape(dv + dz, dv + dz)
    return MetricTwoStepAlgebra(dv, dz, c, gram)


def load_algebra(path) -> MetricTwoStepAlgebra:
    return algebra_from_dict(json.loads(Path(path).read_text()))
