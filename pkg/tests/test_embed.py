import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from qcx.mapcore import numeric_beltrami
from qcx.seqcore import IdentityTail, MonotoneSeq, identity
from qcx.embed import (BAMap, PiecewiseLinearHomeo, ba_eval, characterize_image, embedding_eval,
                       embedding_values, extend_embedding, inverse_assignment, inverse_bounds_for,
                       inverse_bounds_report, measure_mu, pl_interpolant)

ID_H = PiecewiseLinearHomeo((0.0, 1.0), (0.0, 1.0))
TWO_Z = MonotoneSeq(0, 0, (0.0,), 2.0, 2.0)
SWAP = IdentityTail(0, 1, (1, 0))


def random_instance(rng):
    w = int(rng.integers(2, 9))
    lo = int(rng.integers(-4, 4))
    gaps = rng.uniform(0.5, 2.0, w - 1)
    start = rng.uniform(-5, 5)
    e = MonotoneSeq(lo, lo + w - 1, tuple(np.concatenate([[start], start + np.cumsum(gaps)])),
                    float(rng.uniform(0.5, 2)), float(rng.uniform(0.5, 2)))
    aw = int(rng.integers(1, 7))
    alo = int(rng.integers(-5, 5))
    sigma = IdentityTail(alo, alo + aw - 1, tuple(int(v) for v in alo + rng.permutation(aw)))
    return e, sigma


class TestImage:
    def test_integers(self):
        r = characterize_image(MonotoneSeq(0, 0, (0.0,)))
        assert r.m_constant == 1.0 and r.passed

    def test_jump_fails(self):
        r = characterize_image(MonotoneSeq(0, 2, (0, 1, 100)), horizon=200)
        assert r.m_constant == 99.0
        assert not r.passed

    @settings(max_examples=30, deadline=None)
    @given(st.lists(st.floats(0.2, 5), min_size=2, max_size=6), st.floats(0.1, 10), st.floats(-20, 20))
    def test_affine_invariant(self, gaps, alpha, beta):
        vals = np.concatenate([[0.0], np.cumsum(gaps)])
        e = MonotoneSeq(0, len(vals) - 1, tuple(vals))
        s = MonotoneSeq(0, len(vals) - 1, tuple(alpha * vals + beta), alpha, alpha)
        assert characterize_image(s, 20).m_constant == pytest.approx(characterize_image(e, 20).m_constant,
                                                                     rel=1e-12)


class TestPiecewiseLinear:
    def test_interpolates(self):
        h = pl_interpolant(MonotoneSeq(0, 2, (0, 1, 3)))
        assert h(1.5) == 2.0
        assert h(-1.0) == -1.0 and h(4.0) == 5.0
        assert np.allclose(h(np.arange(0, 3)), [0, 1, 3])

    def test_rejects_decreasing(self):
        with pytest.raises(ValueError):
            PiecewiseLinearHomeo((0.0, 1.0), (1.0, 0.0))

    def test_mean_matches_quadrature(self):
        h = pl_interpolant(MonotoneSeq(-1, 2, (-3, 0, 0.5, 4), 3.0, 0.5))
        for a, b in [(-5, -4), (-2, 3), (0.2, 0.3), (1.5, 9)]:
            ref = quad(lambda t: float(h(t)), a, b, points=[-1, 0, 1, 2], limit=200)[0] / (b - a)
            assert float(h.mean(a, b)) == pytest.approx(ref, rel=1e-10, abs=1e-12)


class TestBeurlingAhlfors:
    def test_identity(self):
        rng = np.random.default_rng(0)
        z = rng.uniform(-10, 10, 500) + 1j * rng.uniform(-10, 10, 500)
        assert np.max(np.abs(ba_eval(BAMap(ID_H), z) - z)) < 1e-12

    def test_real_axis(self):
        h = pl_interpolant(MonotoneSeq(0, 3, (0, 0.5, 2, 2.5), 2.0, 1.0))
        x = np.linspace(-4, 6, 101)
        assert np.max(np.abs(ba_eval(BAMap(h), x.astype(complex)) - h(x))) < 1e-12
        # continuity onto the axis
        assert np.max(np.abs(ba_eval(BAMap(h), x + 1e-9j) - h(x))) < 1e-8

    def test_matches_quadrature(self):
        h = pl_interpolant(MonotoneSeq(-1, 2, (-3, 0, 0.5, 4), 3.0, 0.5))
        rng = np.random.default_rng(5)
        kinks = [-1, 0, 1, 2]
        for x, y in zip(rng.uniform(-3, 4, 30), rng.exponential(1.0, 30)):
            al = quad(lambda t: float(h(t)), x, x + y, points=kinks, limit=200)[0] / y
            be = quad(lambda t: float(h(t)), x - y, x, points=kinks, limit=200)[0] / y
            ref = (al + be) / 2 + 1j * (al - be)
            assert abs(ba_eval(BAMap(h), complex(x, y)) - ref) < 1e-9

    def test_tiny_height(self):
        assert abs(ba_eval(BAMap(ID_H), 1 + 1e-17j) - (1 + 1e-17j)) < 1e-30

    def test_conjugation(self):
        h = pl_interpolant(MonotoneSeq(0, 2, (0, 1, 3)))
        rng = np.random.default_rng(1)
        z = rng.uniform(-5, 5, 200) + 1j * rng.uniform(0.01, 5, 200)
        F = BAMap(h)
        assert np.max(np.abs(F(np.conj(z)) - np.conj(F(z)))) < 1e-12

    def test_doubling(self):
        h = PiecewiseLinearHomeo((0.0,), (0.0,), 2.0, 2.0)
        assert ba_eval(BAMap(h), 1.5 + 0.75j) == pytest.approx(3 + 1.5j, abs=1e-14)

    def test_beltrami_below_one(self):
        h = pl_interpolant(MonotoneSeq(-2, 2, (-4, -1, 0, 0.3, 5), 1.5, 0.7))
        x, y = np.meshgrid(np.linspace(-5, 5, 40), np.linspace(0.1, 5, 40))
        z = (x + 1j * y).ravel()
        s = numeric_beltrami(BAMap(h), z)
        assert np.all(np.abs(s.mu) < 1)


class TestEmbedding:
    def test_two_z_swap(self):
        m = extend_embedding(TWO_Z, SWAP)
        out = embedding_eval(m, np.array([0, 1, 2, -1], dtype=complex))
        assert np.allclose(out, [2, 0, 4, -2], atol=1e-12)
        # the BA stage of the doubling map is z -> 2z, so i goes to 2i
        assert abs(m(3j) - 6j) < 1e-12
        assert abs(m(1j) - 2j) < 1e-12

    def test_values(self):
        e = MonotoneSeq(0, 2, (0, 1, 3))
        assert embedding_values(e, SWAP, -1, 2).tolist() == [-1, 1, 0, 3]

    def test_random_instances(self):
        rng = np.random.default_rng(7)
        for _ in range(100):
            e, sigma = random_instance(rng)
            assert characterize_image(e, 20).m_constant <= 10
            m = extend_embedding(e, sigma)
            n = np.arange(-12, 13)
            got = embedding_eval(m, n.astype(complex))
            assert np.max(np.abs(got - embedding_values(e, sigma, -12, 12))) < 1e-8


class TestInverseBounds:
    def test_inverse_assignment(self):
        s = IdentityTail(0, 2, (2, 0, 1))
        g = inverse_assignment(s, -1, 3)
        assert [s(v) for v in g] == [-1, 0, 1, 2, 3]

    def test_identity(self):
        e = MonotoneSeq(0, 4, (0, 1, 2, 3, 4))
        g = list(range(5))
        assert measure_mu(e, g) == 1.0
        r = inverse_bounds_report(e, g, 1.0)
        assert r.l_constant == 8.0 and r.passed

    def test_adversarial_jump_flagged(self):
        e = MonotoneSeq(0, 4, (0, 1, 2, 3, 4))
        r = inverse_bounds_report(e, [0, 1, 2, 30, 31], 1.0)
        assert not r.passed
        assert ("adjacent", 2, 1, 28.0) in r.violations

    def test_size_mismatch(self):
        with pytest.raises(ValueError):
            inverse_bounds_report(MonotoneSeq(0, 1, (0, 1)), [0, 1, 2], 1.0)

    def test_pipeline_assignments(self):
        rng = np.random.default_rng(11)
        for _ in range(100):
            e, sigma = random_instance(rng)
            r = inverse_bounds_for(e, sigma)
            assert r.passed, r.violations
            assert r.mu >= 1 and r.l_constant == 8 * r.mu ** 2

    def test_two_z(self):
        r = inverse_bounds_for(TWO_Z, identity())
        assert r.passed and r.mu == 1.0
