"""Property-based checks across modules."""
import math

import numpy as np
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from magflow.algebra import heisenberg, ht_algebra, j_map
from magflow.geodesics import HeisGeodesic, energy, heis_eval, momentum_to_tangent, tangent_eval, velocity
from magflow.httype import HTInitialData, ht_velocity
from magflow.magnetic import dh, euler_field, hamiltonian, make_system
from magflow.spectrum import FreeHomotopyClass, family_residual, length_set, noncentral_families

small = st.floats(-3, 3, allow_nan=False)
pos = st.floats(0.2, 3, allow_nan=False)


@settings(max_examples=40, deadline=None)
@given(pos, small, small, small, small)
def test_closed_form_speed_is_constant(A, B, u, v, z0):
    g = HeisGeodesic([A], B, [u], [v], z0)
    sp = heisenberg([A]).norm(velocity(g, np.linspace(0, 10, 200)))
    assert np.max(np.abs(sp - energy(g))) <= 1e-10 * max(1.0, energy(g))


@settings(max_examples=40, deadline=None)
@given(st.lists(small, min_size=4, max_size=4), small, small, small)
def test_ht_speed_is_constant(u, z1, z2, B):
    d = HTInitialData(np.array(u), z1, z2, B)
    sp = np.linalg.norm(ht_velocity(d, np.linspace(0, 10, 200)), axis=-1)
    assert np.max(np.abs(sp - d.energy())) <= 1e-10 * max(1.0, d.energy())


@settings(max_examples=40, deadline=None)
@given(pos, small, small, small, small)
def test_tangent_and_momentum_forms_agree(A, B, u, v, z0):
    t = np.linspace(0, 5, 20)
    ref = heis_eval(HeisGeodesic([A], B, [u], [v], z0), t)
    got = tangent_eval(A, B, *momentum_to_tangent(A, B, u, v, z0), t)
    # the tangent form divides by z0; allow for that near zero
    scale = max(1.0, np.max(np.abs(ref))) * (1 + 1e-3 / max(abs(z0), 1e-12))
    assert np.max(np.abs(got - ref)) <= 1e-11 * scale


@settings(max_examples=30, deadline=None)
@given(st.lists(small, min_size=6, max_size=6), small, small)
def test_euler_field_ignores_field_strength(p, b1, b2):
    alg = ht_algebra()
    p = np.array(p)
    assert np.array_equal(euler_field(make_system(alg, b1), p), euler_field(make_system(alg, b2), p))


@settings(max_examples=30, deadline=None)
@given(st.lists(small, min_size=2, max_size=2), st.lists(small, min_size=8, max_size=8))
def test_j_map_skew(z, vs):
    alg = ht_algebra()
    J = j_map(alg, alg.central(z))
    a, b = np.array(vs[:4]), np.array(vs[4:])
    assert abs((J @ a) @ b + a @ (J @ b)) <= 1e-12 * max(1.0, np.abs(a).max() * np.abs(b).max())


@settings(max_examples=30, deadline=None)
@given(st.lists(small, min_size=5, max_size=5), small)
def test_dh_is_gradient(p, B):
    s = make_system(heisenberg([0.7, 1.9]), B)
    p = np.array(p)
    h = 1e-5
    fd = np.array([(hamiltonian(s, p + h * e) - hamiltonian(s, p - h * e)) / (2 * h)
                   for e in np.eye(5)])
    g = dh(s, p)
    assert np.max(np.abs(fd - g)) <= 1e-6 * max(1.0, np.max(np.abs(g)))


@settings(max_examples=40, deadline=None)
@given(st.floats(0.1, 5), small, st.floats(0.1, 5), st.floats(-10, 10), pos)
def test_noncentral_regimes(vn, B, E, zg, A):
    assume(abs(E - abs(B)) > 1e-6)
    cls = FreeHomotopyClass(vn, zg)
    ls = length_set(cls, E, B, A)
    assert (len(ls) == 0) == (E < abs(B))
    for f in noncentral_families(cls, E, B, A):
        assert family_residual(f, B, A, cls.representative(A)) <= 1e-8
        assert math.isclose(f.length, vn / math.sqrt(1 - (B / E) ** 2), rel_tol=1e-12)
