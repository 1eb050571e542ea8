"""Automorphisms of the exponential lattice {e^n}, extended through the covering z -> e^z.

A self-map ``f`` of ``E = {e^n}`` is described by the integer bijection
``a_n = log f(e^n)``.  Its extension is the strip map ``g`` of the integer
problem with ``delta = pi``, made 2 pi i periodic and pushed down by ``exp``.
"""
from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from .mapcore import _as_complex_array, _out, expr_eval
from .seqcore import IntBijection, Negated, is_bijective, three_point_lambda, three_point_sup
from .splitflow import PreconditionError, extend_automorphism

TAIL_MARGIN = 40
TWO_PI = 2 * math.pi


class ConditionViolation(ValueError):
    """``b_n = f(e^n)`` does not tend to 0 as n -> -oo."""


@dataclass(frozen=True)
class ExpLatticeReport:
    lambda_b: float
    c_lambda: float
    lambda_a: float
    tends_to_zero: bool


def _window(a: IntBijection) -> tuple[int, int]:
    inner = a.inner if isinstance(a, Negated) else a
    lo, hi = getattr(inner, "lo", 0), getattr(inner, "hi", 0)
    if hasattr(inner, "period"):
        lo, hi = 0, inner.period - 1
    return lo, hi


def lambda_b_of(a: IntBijection, margin: int = TAIL_MARGIN) -> float:
    """Three-point constant of b_n = e^{a_n} over [lo - margin, hi + margin], at least 1."""
    lo, hi = _window(a)
    b = np.exp(a.array(lo - margin, hi + margin).astype(float))
    lam, _ = three_point_sup(b)
    return max(1.0, lam)


def log_conjugate(a: IntBijection, margin: int = TAIL_MARGIN) -> ExpLatticeReport:
    """Constants of the exponential-scale problem; rejects maps with f(e^n) -/-> 0."""
    if not is_bijective(a):
        raise PreconditionError("sequence is not a bijection")
    # a_n -> -oo as n -> -oo holds exactly for same-direction representations
    tends = not isinstance(a, Negated)
    if not tends:
        raise ConditionViolation("f(e^n) -> +oo as n -> -oo; no extension fixing 0 exists")
    lam_b = lambda_b_of(a, margin)
    c = math.log(lam_b + 1)
    return ExpLatticeReport(lam_b, c, c + 1, tends)


def check_lemma_3_4(a: IntBijection, lambda_b: float, horizon: int = 40) -> bool:
    """Every inversion k < l, a_l < a_k in the horizon has a_k - a_l <= log(lambda_b + 1)."""
    vals = a.array(-horizon, horizon)
    c = math.log(lambda_b + 1)
    run = np.maximum.accumulate(vals)
    # for each l the largest earlier value gives the worst inversion gap
    gaps = run[:-1] - vals[1:]
    return bool(np.all(gaps <= c + 1e-12))


@dataclass(frozen=True)
class ExpLatticeMap:
    g: object
    a: IntBijection
    report: ExpLatticeReport | None = None

    def __call__(self, w):
        return exp_eval(self, w)


def extend_exp_automorphism(a: IntBijection) -> ExpLatticeMap:
    rep = log_conjugate(a)
    lam = max(rep.lambda_a, three_point_lambda(a).lambda_certified)
    g = extend_automorphism(a, math.pi, lam)
    return ExpLatticeMap(g, a, rep)


def lift_eval(m: ExpLatticeMap, z):
    """The 2 pi i-periodic lift: g on the band Im in (-pi, pi], translated copies elsewhere."""
    z, scalar = _as_complex_array(z)
    k = np.ceil((z.imag - math.pi) / TWO_PI)
    shift = 1j * TWO_PI * k
    return _out(expr_eval(m.g, z - shift) + shift, scalar)


def exp_eval(m: ExpLatticeMap, w, branch: int = 0):
    """exp(g(log w)) with the principal log (or the lift on band ``branch``); w = 0 is excluded."""
    w, scalar = _as_complex_array(w)
    w = np.atleast_1d(w)
    if np.any(w == 0):
        raise ValueError("exp_eval is undefined at the puncture w = 0")
    z = np.log(w) + 1j * TWO_PI * branch
    gz = lift_eval(m, z)
    out = np.where(gz == z, w, np.exp(gz))  # fixed points keep their exact input
    return _out(out[0] if scalar else out, scalar)
