import numpy as np
import pytest

from dopid import do_op, measures
from dopid.errors import ShapeMismatch, SupportMismatch
from dopid.prob import Alphabet, Dist1, from_array, marginal
from conftest import random_dist

BIT = Alphabet(("0", "1"))


def test_identity_target(rng):
    for shape in [(2, 2, 2), (3, 4, 3)]:
        d = random_dist(rng, shape)
        out = do_op.do_operation(d, marginal(d, "z"))
        np.testing.assert_array_equal(out.dist.p, d.p)


def test_two_atom_example():
    p = np.zeros((2, 2, 2))
    p[0, 0, 0] = p[1, 0, 1] = 0.5
    d = from_array(p)
    out = do_op.do_operation(d, Dist1(BIT, [0.25, 0.75])).dist
    assert out.p[0, 0, 0] == 0.25
    assert out.p[1, 0, 1] == 0.75
    assert np.count_nonzero(out.p) == 2


def test_support_mismatch():
    p = np.zeros((2, 2, 2))
    p[0, 0, 0] = p[1, 1, 0] = 0.5
    d = from_array(p)
    with pytest.raises(SupportMismatch):
        do_op.do_operation(d, Dist1(BIT, [0.5, 0.5]))


def test_target_shape_mismatch(xor):
    with pytest.raises(ShapeMismatch):
        do_op.do_operation(xor, Dist1(Alphabet.range(3), [0.2, 0.3, 0.5]))


def test_subset_support_allowed(rdn):
    # D_{Z|Y=0} is a point mass although Z has full support
    out = do_op.do_operation(rdn, Dist1(BIT, [1.0, 0.0])).dist
    assert out.p[0, 0, 0] == 1.0
    assert out.p.sum() == 1.0


def test_family_rdn(rdn):
    fam = do_op.conditioned_family(rdn, "y")
    assert fam.weights == {"0": 0.5, "1": 0.5}
    expected = np.zeros((2, 2, 2))
    expected[0, 0, 0] = 1.0
    np.testing.assert_array_equal(fam.members["0"].dist.p, expected)


def test_family_independent_condition(rng):
    dxz = rng.dirichlet(np.ones(6)).reshape(3, 1, 2)
    dy = rng.dirichlet(np.ones(3)).reshape(1, 3, 1)
    d = from_array(dxz * dy)
    fam = do_op.conditioned_family(d, "y")
    for member in fam.members.values():
        np.testing.assert_allclose(member.dist.p, d.p, rtol=0, atol=1e-15)
    agg = do_op.aggregate_source(fam)
    np.testing.assert_allclose(agg.joint.p, np.outer(dxz.sum(axis=(1, 2)), dy.ravel()), atol=1e-15)


def test_family_skips_zero_weight():
    p = np.zeros((2, 2, 2))
    p[0, 0, 0] = 0.3
    p[1, 0, 1] = 0.7
    fam = do_op.conditioned_family(from_array(p), "y")
    assert list(fam.members) == ["0"]


def test_aggregate_rdn_diagonal(rdn):
    agg = do_op.aggregate_source(do_op.conditioned_family(rdn, "y"))
    np.testing.assert_array_equal(agg.joint.p, [[0.5, 0.0], [0.0, 0.5]])
    assert agg.joint.vars == ("a", "y")


@pytest.mark.parametrize("shape", [(2, 2, 2), (3, 3, 3), (4, 4, 4), (2, 4, 3)])
def test_family_invariants(rng, shape):
    for _ in range(40):
        d = random_dist(rng, shape)
        for direction in ("y", "x"):
            fam = do_op.conditioned_family(d, direction)
            assert abs(sum(fam.weights.values()) - 1.0) <= 1e-12
            for label, res in fam.members.items():
                assert do_op.distribution_residual(res.dist) <= 1e-12
                target = marginal(d.__class__(d.ax, d.ay, d.az, d.p), "z")
                cz = np.take(d.p, d.alphabets[fam.condition_axis].index(label), axis=fam.condition_axis).sum(axis=0)
                np.testing.assert_allclose(marginal(res.dist, "z").p, cz / cz.sum(), atol=1e-12)
            agg = do_op.aggregate_source(fam)
            src = "x" if direction == "y" else "y"
            src_axis = 0 if direction == "y" else 1
            np.testing.assert_allclose(agg.joint.p.sum(axis=1 - src_axis), marginal(d, src).p, atol=1e-12)
            np.testing.assert_allclose(agg.joint.p.sum(axis=src_axis), marginal(d, direction).p, atol=1e-12)


def _sampled(rng, n=500):
    for i in range(n):
        shape = tuple(int(v) for v in rng.integers(2, 5, size=3))
        yield random_dist(rng, shape)


def test_channel_invariance(rng):
    for d in _sampled(rng):
        fam = do_op.conditioned_family(d, "y")
        rhs = sum(w * measures.conditional_entropy(fam.members[k].dist, "x", "z") for k, w in fam.weights.items())
        assert abs(measures.conditional_entropy(d, "x", "z") - rhs) <= 1e-9


def test_aggregate_entropy_and_bounds(rng):
    for d in _sampled(rng, 200):
        fam = do_op.conditioned_family(d, "y")
        agg = do_op.aggregate_source(fam)
        h_x = measures.entropy(marginal(d, "x"))
        assert abs(measures.entropy(marginal(agg.joint, "a")) - h_x) <= 1e-9
        avg = 0.0
        for k, w in fam.weights.items():
            h_member = measures.entropy(do_op.member_source(fam, k))
            row = agg.joint.p[:, d.ay.index(k)]
            assert abs(measures.entropy(row / row.sum()) - h_member) <= 1e-12
            avg += w * h_member
        assert avg <= h_x + 1e-9


def test_subnormal_z_mass_rescales_finitely():
    tiny = 2.225e-313
    p = np.zeros((2, 2, 2))
    p[0, 0, 0] = 1.0
    p[1, 1, 0] = p[1, 1, 1] = tiny
    d = from_array(p)
    out = do_op.do_operation(d, Dist1(BIT, [0.5, 0.5])).dist
    assert np.all(np.isfinite(out.p))
    assert out.p[1, 1, 1] == 0.5
