import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from magflow.algebra import (MetricTwoStepAlgebra, algebra_from_dict, bracket, check_spd, flat,
                             group_inverse, group_multiply, heisenberg, is_automorphism,
                             is_heisenberg_type, j_map, levi_civita, load_algebra,
                             normalize_heisenberg_metric, sharp)

X, Y, Z = np.eye(3)
finite = st.floats(-5, 5, allow_nan=False, allow_infinity=False)


def vec(n):
    return arrays(np.float64, n, elements=finite)


def test_bracket_basis(h1, ht):
    assert np.allclose(bracket(h1, X, Y), Z)
    assert np.allclose(bracket(h1, X, X), 0)
    e = np.eye(6)
    assert np.allclose(bracket(ht, e[1], e[3]), -e[5])


def test_bracket_rejects_wrong_size(h1):
    with pytest.raises(ValueError):
        bracket(h1, np.zeros(4), np.zeros(3))


def test_group_law_examples(h1):
    assert np.allclose(group_multiply(h1, X, Y), X + Y + 0.5 * Z)
    a = np.array([0.3, -1.2, 2.0])
    assert np.allclose(group_multiply(h1, a, group_inverse(h1, a)), 0)
    assert np.allclose(group_multiply(h1, Z, X), group_multiply(h1, X, Z))
    assert np.allclose(group_multiply(h1, Z, X), X + Z)


@settings(max_examples=50, deadline=None)
@given(vec(6), vec(6), vec(6))
def test_group_associative_and_two_step(a, b, c):
    from magflow.algebra import ht_algebra
    alg = ht_algebra()
    lhs = group_multiply(alg, group_multiply(alg, a, b), c)
    rhs = group_multiply(alg, a, group_multiply(alg, b, c))
    assert np.allclose(lhs, rhs, atol=1e-12 * max(1.0, np.max(np.abs(lhs))) * 10)
    br = bracket(alg, a, b)
    assert np.all(br[:4] == 0)
    assert np.allclose(bracket(alg, br, c), 0)


def test_j_map_heisenberg():
    alg = heisenberg([2.0])
    J = j_map(alg, Z)
    assert np.allclose(J @ [1, 0], [0, 0.5])  # j(Z)X = Y/A
    assert np.allclose(J @ [0, 1], [-0.5, 0])
    assert np.allclose(j_map(alg, np.zeros(3)), 0)
    with pytest.raises(ValueError):
        j_map(alg, X)


def test_j_map_ht_squares(ht):
    for k in (4, 5):
        J = j_map(ht, np.eye(6)[k])
        assert np.allclose(J @ J, -np.eye(4), atol=1e-14)


def test_j_map_skew_random(rng):
    for _ in range(20):
        A = rng.uniform(0.2, 3, size=2)
        alg = heisenberg(A)
        Gv = alg.gram[:4, :4]
        J = j_map(alg, alg.central(rng.normal()))
        assert np.max(np.abs(Gv @ J + (Gv @ J).T)) < 1e-12


def test_heisenberg_type(h1, ht):
    assert is_heisenberg_type(h1)
    assert not is_heisenberg_type(heisenberg([2.0]))
    assert is_heisenberg_type(ht)


def test_ht_identity_random_centrals(ht, rng):
    for _ in range(20):
        z = rng.normal(size=2)
        J = j_map(ht, ht.central(z))
        assert np.allclose(J @ J, -(z @ z) * np.eye(4), atol=1e-12)


def test_sharp_flat(rng):
    alg = heisenberg([3.0])
    assert np.allclose(sharp(alg, X), X / 3)
    assert np.allclose(sharp(alg, Z), Z)
    for _ in range(10):
        v = rng.normal(size=3)
        assert np.allclose(sharp(alg, flat(alg, v)), v, atol=1e-12)
        assert np.allclose(flat(alg, sharp(alg, v)), v, atol=1e-12)
        assert v @ sharp(alg, v) > 0


def test_levi_civita(rng):
    alg = heisenberg([2.0])
    assert np.allclose(levi_civita(alg, X, Y), 0.5 * Z)
    assert np.allclose(levi_civita(alg, Z, Z), 0)
    assert np.allclose(levi_civita(alg, X, Z), -Y / 4)
    for _ in range(10):
        a, b, c = rng.normal(size=(3, 3))
        # torsion free and metric compatible
        assert np.allclose(levi_civita(alg, a, b) - levi_civita(alg, b, a), bracket(alg, a, b))
        lhs = alg.inner(levi_civita(alg, a, b), c) + alg.inner(b, levi_civita(alg, a, c))
        assert abs(lhs) < 1e-12


def test_levi_civita_general_rules(ht, rng):
    for _ in range(5):
        V1, V2 = np.zeros((2, 6))
        V1[:4], V2[:4] = rng.normal(size=(2, 4))
        Zc = ht.central(rng.normal(size=2))
        assert np.allclose(levi_civita(ht, V1, V2), 0.5 * bracket(ht, V1, V2))
        jv = np.zeros(6)
        jv[:4] = j_map(ht, Zc) @ V1[:4]
        assert np.allclose(levi_civita(ht, V1, Zc), -0.5 * jv)
        assert np.allclose(levi_civita(ht, Zc, V1), -0.5 * jv)
        assert np.allclose(levi_civita(ht, Zc, Zc), 0)


def _check_normalized(g, n):
    phi, A = normalize_heisenberg_metric(g, n)
    std = heisenberg([1.0] * n)
    ok, _ = is_automorphism(std, phi)
    assert ok
    pulled = phi.T @ g @ phi
    want = np.diag(np.concatenate([A, A, [1.0]]))
    assert np.max(np.abs(pulled - want)) < 1e-10
    assert np.all(A > 0) and np.all(np.diff(A) >= 0)
    return phi, A


def test_normalize_standard_is_identity():
    phi, A = _check_normalized(np.diag([2.0, 2.0, 1.0]), 1)
    assert np.allclose(A, [2.0])
    assert np.allclose(np.abs(phi), np.eye(3))


def test_normalize_long_centre():
    g = np.diag([1.0, 1.0, 16.0])
    phi, A = _check_normalized(g, 1)
    # Z -> Z/4 has unit length; the symplectic area of the plane then forces
    # |X'|^2 = |Y'|^2 = sqrt(1/16 * 1)
    assert np.isclose(abs(phi[2, 2]), 0.25)
    assert np.isclose(abs(np.linalg.det(phi[:2, :2])), 0.25)
    assert np.allclose(A, [0.25])


@pytest.mark.parametrize("n", [1, 2, 3])
def test_normalize_random_spd(rng, n):
    for _ in range(10):
        M = rng.normal(size=(2 * n + 1, 2 * n + 1))
        _check_normalized(M @ M.T + 0.5 * np.eye(2 * n + 1), n)


def test_normalize_rejects_bad_input():
    with pytest.raises(ValueError):
        normalize_heisenberg_metric(np.diag([1.0, -1.0, 1.0]))
    with pytest.raises(ValueError):
        normalize_heisenberg_metric(np.eye(4))


def test_check_spd():
    check_spd(np.eye(3))
    with pytest.raises(ValueError):
        check_spd(np.array([[1.0, 2.0], [2.0, 1.0]]))
    with pytest.raises(ValueError):
        check_spd(np.array([[1.0, 0.5], [0.0, 1.0]]))


def test_constructor_validation():
    with pytest.raises(ValueError):
        MetricTwoStepAlgebra(2, 1, np.ones((2, 2, 1)), np.eye(3))  # not skew
    with pytest.raises(ValueError):
        heisenberg([0.0])


def test_load_algebra_from_json(tmp_path):
    cfg = {"dim_v": 2, "dim_z": 1, "bracket": [[0, 1, 0, 1.0]],
           "gram": [3, 0, 0, 0, 3, 0, 0, 0, 1]}
    p = tmp_path / "alg.json"
    p.write_text(json.dumps(cfg))
    alg = load_algebra(p)
    assert np.allclose(alg.gram, heisenberg([3.0]).gram)
    assert np.allclose(bracket(alg, X, Y), Z)
    assert algebra_from_dict({"builtin": "ht"}).dim == 6
