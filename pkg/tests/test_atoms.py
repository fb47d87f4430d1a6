import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracle
from dopid import atoms
from dopid.atoms import decompose
from dopid.prob import from_array, product
from conftest import random_dist

GOLDEN = {
    "xor": (0.0, 0.0, 0.0, 1.0),
    "rdn": (0.0, 0.0, 1.0, 0.0),
    "unq": (1.0, 0.0, 0.0, 0.0),
    "copy_gate": (1.0, 1.0, 0.0, 0.0),
}


@pytest.mark.parametrize("name", sorted(GOLDEN))
def test_gate_golden(request, name):
    d = request.getfixturevalue(name)
    np.testing.assert_allclose(decompose(d).atoms, GOLDEN[name], rtol=0, atol=1e-9)
    np.testing.assert_allclose(oracle.atoms(oracle.from_array(d.p)), GOLDEN[name], rtol=0, atol=1e-9)


def test_single_functions_match_decompose(rng):
    for shape in [(2, 2, 2), (3, 3, 3), (2, 4, 3)]:
        for _ in range(10):
            d = random_dist(rng, shape)
            r = decompose(d)
            assert abs(atoms.unique_information(d, "x") - r.un_x_z_given_y) <= 1e-12
            assert abs(atoms.unique_information(d, "y") - r.un_y_z_given_x) <= 1e-12
            assert abs(atoms.unique_information_alt(d, "x") - r.un_x_alt) <= 1e-12
            assert abs(atoms.redundant_information(d) - r.red) <= 1e-12
            assert abs(atoms.redundant_information(d, order="yx") - r.red_swapped) <= 1e-12
            assert abs(atoms.redundant_information_alt(d) - r.red_alt) <= 1e-12
            assert abs(atoms.redundant_information_alt(d, order="yx") - r.red_swapped_alt) <= 1e-12
            assert abs(atoms.synergistic_information(d) - r.syn) <= 1e-12


def test_against_oracle(rng):
    for _ in range(60):
        shape = tuple(int(v) for v in rng.integers(2, 5, size=3))
        d = random_dist(rng, shape)
        np.testing.assert_allclose(decompose(d).atoms, oracle.atoms(oracle.from_array(d.p)), rtol=0, atol=1e-10)


def test_dual_paths_3x3x3(rng):
    for _ in range(100):
        r = decompose(random_dist(rng, (3, 3, 3)))
        assert max(r.residuals.values()) <= 1e-9
        assert abs(r.red_swapped - r.red_swapped_alt) <= 1e-9


def test_bad_direction(xor):
    with pytest.raises(ValueError):
        atoms.unique_information(xor, "z")


def test_base_scaling(rng):
    d = random_dist(rng, (3, 2, 4))
    bits = np.array(decompose(d, 2).atoms)
    nats = np.array(decompose(d, "e").atoms)
    dits = np.array(decompose(d, 10).atoms)
    np.testing.assert_allclose(nats, bits * math.log(2), atol=1e-12)
    np.testing.assert_allclose(dits, bits * math.log10(2), atol=1e-12)
    assert decompose(d, "e").base == "e"


def test_closed_system_flag(xor, rng):
    assert decompose(xor).closed_system
    assert not decompose(random_dist(rng, (2, 2, 2))).closed_system


def test_closed_system_syn_nonneg(rng):
    for _ in range(100):
        nx, ny, nz = (int(v) for v in rng.integers(2, 5, size=3))
        f = rng.integers(0, nz, size=(nx, ny))
        pxy = rng.dirichlet(np.ones(nx * ny)).reshape(nx, ny)
        p = np.zeros((nx, ny, nz))
        for x in range(nx):
            for y in range(ny):
                p[x, y, f[x, y]] = pxy[x, y]
        assert decompose(from_array(p)).syn >= -1e-9


def test_product_xor_rdn(xor, rdn):
    np.testing.assert_allclose(decompose(product(xor, rdn)).atoms, (0, 0, 1, 1), atol=1e-9)


def test_to_json_roundtrip(xor):
    doc = decompose(xor).to_json()
    assert doc["closed_system"] is True
    assert set(doc["residuals"]) == {"atoms_sum", "red_alt", "red_swapped", "un_x_alt", "un_y_alt"}
    assert doc["base"] == "2"


def test_result_frozen(xor):
    r = decompose(xor)
    with pytest.raises(AttributeError):
        r.red = 1.0


shapes = st.tuples(st.integers(2, 4), st.integers(2, 4), st.integers(2, 4))


@st.composite
def distributions(draw):
    shape = draw(shapes)
    n = shape[0] * shape[1] * shape[2]
    w = draw(st.lists(st.floats(0.0, 1.0), min_size=n, max_size=n))
    w = np.array(w)
    if w.sum() <= 1e-6:
        w[0] = 1.0
    return from_array(w.reshape(shape) / w.sum())


@settings(max_examples=150, deadline=None)
@given(distributions())
def test_property_consistency_and_bounds(d):
    r = decompose(d)
    tol = 1e-9
    assert r.residuals["atoms_sum"] <= tol
    assert r.residuals["red_swapped"] <= tol
    assert r.residuals["red_alt"] <= tol
    assert -tol <= r.red <= min(r.i_xz, r.i_yz) + tol
    assert -tol <= r.un_x_z_given_y <= r.i_xz + tol
    assert -tol <= r.un_y_z_given_x <= r.i_yz + tol
    if r.closed_system:
        assert r.syn >= -tol


@settings(max_examples=60, deadline=None)
@given(distributions(), distributions())
def test_property_additivity(d1, d2):
    a = np.array(decompose(d1).atoms) + np.array(decompose(d2).atoms)
    np.testing.assert_allclose(decompose(product(d1, d2)).atoms, a, rtol=0, atol=1e-9)


@settings(max_examples=60, deadline=None)
@given(distributions())
def test_property_swap_sources(d):
    # exchanging X and Y exchanges the unique atoms and keeps Red and Syn
    swapped = from_array(np.ascontiguousarray(d.p.transpose(1, 0, 2)))
    a, b = decompose(d), decompose(swapped)
    assert abs(a.un_x_z_given_y - b.un_y_z_given_x) <= 1e-9
    assert abs(a.red - b.red) <= 1e-9
    assert abs(a.syn - b.syn) <= 1e-9
