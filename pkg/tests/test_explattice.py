import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qcx.mapcore import IDENTITY, expr_eval
from qcx.seqcore import IdentityTail, Negated, identity, three_point_lambda
from qcx.explattice import (ConditionViolation, TWO_PI, check_lemma_3_4, exp_eval, extend_exp_automorphism,
                            lambda_b_of, lift_eval, log_conjugate)

from oracles import brute_three_point

SWAP = IdentityTail(0, 1, (1, 0))


@st.composite
def identity_tails(draw, max_width=10):
    w = draw(st.integers(1, max_width))
    lo = draw(st.integers(-5, 5))
    perm = draw(st.permutations(list(range(lo, lo + w))))
    return IdentityTail(lo, lo + w - 1, tuple(perm))


def _b_oracle(a, lo, hi):
    """Three-point constant of e^{a_n} by plain enumeration (floats, no early exit)."""
    b = [math.exp(a(n)) for n in range(lo, hi + 1)]
    best = 0.0
    for i in range(len(b)):
        for k in range(i + 1, len(b)):
            for j in range(i, k):
                best = max(best, abs(b[i] - b[j]) / abs(b[i] - b[k]))
    return best


class TestReport:
    def test_identity(self):
        r = log_conjugate(identity())
        assert r.tends_to_zero
        assert r.lambda_b == 1.0
        assert r.c_lambda == pytest.approx(math.log(2))
        assert r.lambda_a == pytest.approx(1.6931, abs=1e-4)

    def test_swap_against_oracle(self):
        r = log_conjugate(SWAP)
        assert r.lambda_b == pytest.approx(max(1.0, _b_oracle(SWAP, -12, 13)), rel=1e-12)
        assert r.lambda_b == pytest.approx(math.e + 1, rel=1e-12)
        assert r.lambda_a == pytest.approx(math.log(r.lambda_b + 1) + 1, rel=1e-15)

    def test_reflection_rejected(self):
        with pytest.raises(ConditionViolation):
            log_conjugate(Negated(identity()))
        with pytest.raises(ConditionViolation):
            extend_exp_automorphism(Negated(SWAP))

    def test_horizon_margin(self):
        # margins beyond a few units do not change the measured constant
        s = IdentityTail(0, 3, (2, 0, 3, 1))
        assert lambda_b_of(s, 10) == lambda_b_of(s, 40)


class TestInversionGaps:
    def test_identity_has_no_inversions(self):
        assert check_lemma_3_4(identity(), 1.0)

    def test_swap(self):
        assert check_lemma_3_4(SWAP, log_conjugate(SWAP).lambda_b)

    def test_understated_lambda(self):
        s = IdentityTail(0, 3, (3, 1, 2, 0))
        assert check_lemma_3_4(s, log_conjugate(s).lambda_b)
        assert not check_lemma_3_4(s, 1.0)

    @settings(max_examples=60, deadline=None)
    @given(identity_tails())
    def test_gap_and_three_point_bounds_hold(self, s):
        r = log_conjugate(s)
        assert check_lemma_3_4(s, r.lambda_b)
        lam = float(brute_three_point(s.array(-30, 30).tolist()))
        assert lam <= r.lambda_a + 1e-9
        assert three_point_lambda(s).lambda_empirical <= r.lambda_a + 1e-9


class TestExtension:
    def test_identity(self):
        m = extend_exp_automorphism(identity())
        assert m.g == IDENTITY
        w = np.array([1 + 1j, -3, 0.5j, 7])
        assert np.array_equal(exp_eval(m, w), w)

    def test_swap(self):
        m = extend_exp_automorphism(SWAP)
        assert np.allclose(expr_eval(m.g, np.array([0, 1], dtype=complex)), [1, 0], atol=1e-12)
        assert exp_eval(m, 1.0) == pytest.approx(math.e, rel=1e-12)
        assert exp_eval(m, math.e) == pytest.approx(1.0, rel=1e-12)

    def test_strip_boundary_fixed(self):
        m = extend_exp_automorphism(IdentityTail(-2, 2, (1, -2, 2, 0, -1)))
        z = np.linspace(-10, 10, 41) + 1j * math.pi
        assert np.array_equal(expr_eval(m.g, z), z)
        assert np.array_equal(expr_eval(m.g, np.conj(z)), np.conj(z))

    def test_lattice_values(self):
        rng = np.random.default_rng(2)
        for _ in range(30):
            w = int(rng.integers(1, 11))
            lo = int(rng.integers(-5, 5))
            s = IdentityTail(lo, lo + w - 1, tuple(int(v) for v in lo + rng.permutation(w)))
            m = extend_exp_automorphism(s)
            n = np.arange(lo - 3, lo + w + 3)
            got = exp_eval(m, np.exp(n.astype(float)))
            want = np.exp(s.array(n[0], n[-1]).astype(float))
            assert np.max(np.abs(got / want - 1)) < 1e-9

    def test_negative_axis_exact(self):
        m = extend_exp_automorphism(IdentityTail(-1, 2, (2, 0, -1, 1)))
        w = -np.geomspace(1e-3, 1e3, 50)
        assert np.array_equal(exp_eval(m, w), w)
        assert exp_eval(m, -5.0) == -5.0

    def test_branch_consistency(self):
        m = extend_exp_automorphism(IdentityTail(0, 3, (2, 3, 0, 1)))
        rng = np.random.default_rng(4)
        w = np.exp(rng.uniform(-2, 5, 100) + 1j * rng.uniform(-math.pi, math.pi, 100))
        assert np.max(np.abs(exp_eval(m, w, branch=1) - exp_eval(m, w)) / np.abs(exp_eval(m, w))) < 1e-10

    def test_lift_periodic(self):
        m = extend_exp_automorphism(SWAP)
        z = np.array([0.3 + 0.2j, 1 - 0.5j, 0.7 + 3j])
        assert np.allclose(lift_eval(m, z + 2j * TWO_PI), lift_eval(m, z) + 2j * TWO_PI, atol=1e-12)

    def test_puncture(self):
        m = extend_exp_automorphism(SWAP)
        with pytest.raises(ValueError):
            exp_eval(m, 0.0)
        w = 1e-6 * np.exp(1j * np.linspace(-3, 3, 20))
        assert np.max(np.abs(exp_eval(m, w))) < 1e-5
