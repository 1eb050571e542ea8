"""Making a three-point bijection splittable, and extending bijections of Z to the plane.

The extension of ``a`` is ``F1^{-1} o F2`` where ``F1`` re-sorts values so that
``b = F1(a)`` splits into short blocks and ``F2`` realizes ``b`` block by block.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Decimal
import math

import numpy as np

from .mapcore import (IDENTITY, Similarity, disjoint, expr_dilatation_bound, expr_eval, expr_eval_precise,
                      expr_inverse_eval, expr_local_dilatation, expr_slogdet, inverse, seq)
from .permbuild import BlockPermutation, build_block_permutation
from .seqcore import (Direction, IdentityTail, IntBijection, Negated, Periodic, SplitDecomposition,
                      block_image_ok, default_horizon, is_bijective, limit_classification,
                      splits_interval, three_point_lambda)


class PreconditionError(ValueError):
    pass


class ClaimViolation(AssertionError):
    """A step broke one of the block-size bounds; this is a bug, not bad input."""


class DecompositionMismatch(ValueError):
    pass


@dataclass(frozen=True)
class SortPlan:
    value_interval: tuple
    block_image_sorted: tuple
    complement_sorted: tuple
    pivot_split: int
    targets: tuple  # new position of each value of value_interval, in order


@dataclass(frozen=True)
class StepTrace:
    step_index: int
    interval: tuple
    argmax_idx: int
    argmin_idx: int
    claim_bound_ok: bool
    reach: float        # largest |value - anchor| bounded by lambda + 1
    block_size: int
    plan: SortPlan


@dataclass
class SplitResult:
    f1: object
    b: IdentityTail
    decomposition: SplitDecomposition
    traces: list = field(default_factory=list)
    lam: float = 1.0


class _State:
    """Mutable working copy of an identity-tail bijection, viewed with index/value sign ``s``."""

    def __init__(self, seq: IdentityTail):
        self.fwd = {n: v for n, v in zip(range(seq.lo, seq.hi + 1), seq.values) if n != v}
        self.inv = {v: n for n, v in self.fwd.items()}
        self.s = 1

    def value(self, n):
        n = self.s * n
        return self.s * self.fwd.get(n, n)

    def index(self, v):
        v = self.s * v
        return self.s * self.inv.get(v, v)

    def permute_values(self, lo, targets):
        """Send value lo + i to targets[i] (view coordinates)."""
        moves = {}
        for i, t in enumerate(targets):
            src = lo + i
            if t != src:
                moves[self.index(src)] = t
        for n, t in moves.items():
            rn, rt = self.s * n, self.s * t
            if rn == rt:
                self.fwd.pop(rn, None)
            else:
                self.fwd[rn] = rt
        self.inv = {v: n for n, v in self.fwd.items()}

    def to_seq(self) -> IdentityTail:
        if not self.fwd:
            return IdentityTail(0, 0, (0,))
        lo, hi = min(self.fwd), max(self.fwd)
        return IdentityTail(lo, hi, tuple(self.fwd.get(n, n) for n in range(lo, hi + 1)))


def _first_plan(values, v):
    """Sort plan for the pivot block: block values packed around v, the rest outside."""
    lo, hi = min(values), max(values)
    c = sorted(values)
    iv = c.index(v)
    m0, m1 = -iv, len(c) - 1 - iv
    inside = set(c)
    d_low = [x for x in range(lo, v) if x not in inside]
    d_high = [x for x in range(v + 1, hi + 1) if x not in inside]
    new = {x: v + j - iv for j, x in enumerate(c)}
    new.update({x: v + m0 - (len(d_low) - i) for i, x in enumerate(d_low)})
    new.update({x: v + m1 + 1 + i for i, x in enumerate(d_high)})
    return SortPlan((lo, hi), tuple(c), tuple(d_low + d_high), v + m0,
                    tuple(new[x] for x in range(lo, hi + 1)))


def _next_plan(block_values, start, top):
    c = sorted(x for x in block_values if start <= x <= top)
    inside = set(c)
    d = [x for x in range(start, top + 1) if x not in inside]
    new = {x: start + i for i, x in enumerate(c)}
    new.update({x: start + len(c) + i for i, x in enumerate(d)})
    return SortPlan((start, top), tuple(c), tuple(d), start + len(c) - 1,
                    tuple(new[x] for x in range(start, top + 1)))


def _sweep(state: _State, k, top, image_top, stop, lamp, sign, traces, plans):
    """Repeat the upward step until the rest of the (viewed) sequence is the identity."""
    step = 1
    while not (k >= stop and top <= k):
        lo_v, hi_v = image_top + 1, top + 1
        k_next = max(state.index(x) for x in range(lo_v, hi_v + 1))
        block = list(range(k + 1, k_next + 1))
        vals = [state.value(n) for n in block]
        j_max, j_min = int(np.argmax(vals)), int(np.argmin(vals))
        peak = vals[j_max]
        reach = abs(peak - (top + 1))
        ok = reach <= lamp and len(block) <= 2 * lamp + 1
        plan = _next_plan(vals, top + 1, peak)
        idx = [block[j_max], block[j_min]] if sign > 0 else [-block[j_min], -block[j_max]]
        interval = (block[0], block[-1]) if sign > 0 else (-block[-1], -block[0])
        traces.append(StepTrace(sign * step, interval, idx[0], idx[1], ok, reach, len(block),
                                _unview(plan, sign)))
        if not ok:
            raise ClaimViolation(f"step {sign * step}: reach {reach}, block {len(block)}, lambda' {lamp}")
        state.permute_values(plan.value_interval[0], plan.targets)
        plans.append(_unview(plan, sign))
        image_top = top + len(plan.block_image_sorted)
        top, k = peak, k_next
        step += 1
    return k


def _unview(plan: SortPlan, sign: int) -> SortPlan:
    """Express a plan made in the mirrored view in original coordinates."""
    if sign > 0:
        return plan
    lo, hi = plan.value_interval
    targets = tuple(-t for t in reversed(plan.targets))
    return SortPlan((-hi, -lo), tuple(sorted(-x for x in plan.block_image_sorted)),
                    tuple(sorted(-x for x in plan.complement_sorted)), -plan.pivot_split, targets)


def make_splittable(seq: IntBijection, lam: float | None = None, delta: float = 1.0,
                    pivot: int | None = None) -> SplitResult:
    """Deform values near the real axis so the sequence becomes (2 lam + 3)-splittable.

    ``pivot`` is the index whose block is sorted first (default: left end of
    the window).  The sweep runs upward from it and, through the mirrored
    view, downward.
    """
    if not isinstance(seq, IdentityTail):
        raise PreconditionError("the splitter accepts identity-tail sequences only")
    if not is_bijective(seq):
        raise PreconditionError("sequence is not a bijection")
    report = three_point_lambda(seq, default_horizon(seq))
    if lam is None:
        lam = report.lambda_certified
    elif report.lambda_certified > lam + 1e-12:
        raise PreconditionError(f"certified three point constant {report.lambda_certified} exceeds {lam}")
    lamp = lam + 1
    state = _State(seq)
    p = seq.lo if pivot is None else pivot
    v = state.value(p)
    lo_scan = min(seq.lo, p) - 1
    hi_scan = max(seq.hi, p) + 1
    k0 = min(n for n in range(lo_scan, hi_scan + 1) if state.value(n) >= v) - 1
    k1 = max(n for n in range(lo_scan, hi_scan + 1) if state.value(n) <= v)
    block = list(range(k0 + 1, k1 + 1))
    vals = [state.value(n) for n in block]
    peak, floor = max(vals), min(vals)
    reach = max(peak - v, v - floor)
    ok = reach <= lamp and len(block) <= 2 * lamp + 1
    plan = _first_plan(vals, v)
    traces = [StepTrace(0, (k0 + 1, k1), block[vals.index(peak)], block[vals.index(floor)],
                        ok, reach, len(block), plan)]
    if not ok:
        raise ClaimViolation(f"first block: reach {reach}, size {len(block)}, lambda' {lamp}")
    state.permute_values(floor, plan.targets)
    plans = [plan]
    top_cut = _sweep(state, k1, peak, plan.pivot_split + len(plan.block_image_sorted) - 1,
                     seq.hi, lamp, 1, traces, plans)
    state.s = -1
    bottom = _sweep(state, -(k0 + 1), -floor, -plan.pivot_split, -seq.lo, lamp, -1, traces, plans)
    state.s = 1
    bottom_cut = -bottom - 1

    f1 = disjoint([build_block_permutation(BlockPermutation(pl.value_interval[0], pl.value_interval[1],
                                                            pl.targets, delta))
                   for pl in plans if pl.value_interval[0] < pl.value_interval[1]])
    b = state.to_seq()
    cuts = sorted({bottom_cut, top_cut} | {t.interval[0] - 1 for t in traces} | {t.interval[1] for t in traces})
    cuts = [c for c in cuts if bottom_cut <= c <= top_cut]
    for a, c in zip(cuts, cuts[1:]):
        if not (splits_interval(b, a + 1, c) and block_image_ok(b, a + 1, c)):
            raise ClaimViolation(f"block [{a + 1}, {c}] does not split the deformed sequence")
    bound = max((c - a for a, c in zip(cuts, cuts[1:])), default=1)
    if bound > 2 * lam + 3:
        raise ClaimViolation(f"block size {bound} exceeds 2*lambda+3 = {2 * lam + 3}")
    dec = SplitDecomposition(tuple(cuts), bound, (cuts[0] + 1, cuts[-1]))
    return SplitResult(f1, b, dec, traces, lam)


def assemble(b: IntBijection, dec: SplitDecomposition, delta: float = 1.0):
    """Realize a split bijection block by block; identity outside the strip |Im z| < delta."""
    blocks = dec.blocks
    if not blocks:
        return IDENTITY
    shifts = set()
    for lo, hi in blocks:
        vals = b.array(lo, hi)
        if not block_image_ok(b, lo, hi):
            raise DecompositionMismatch(f"image of block [{lo}, {hi}] is not an interval of the same size")
        shifts.add(int(vals.min()) - lo)
    if len(shifts) != 1:
        raise DecompositionMismatch(f"blocks need different translations: {sorted(shifts)}")
    t = shifts.pop()
    parts = [build_block_permutation(BlockPermutation(lo, hi, tuple(int(x) - t for x in b.array(lo, hi)), delta))
             for lo, hi in blocks]
    return seq(disjoint(parts), Similarity(1, complex(t)) if t else IDENTITY)


def extend_automorphism(a: IntBijection, delta: float = 1.0, lam: float | None = None):
    """Plane homeomorphism sending n to a_n, the identity off |Im z| < delta (same-direction input)."""
    if not is_bijective(a):
        raise PreconditionError("sequence is not a bijection")
    if limit_classification(a) is Direction.MIRRORED:
        return seq(extend_automorphism(a.inner, delta, lam), Similarity(-1, 0j))
    if isinstance(a, Periodic):
        raise PreconditionError("periodic sequences are analysis-only; the splitter needs an identity tail")
    res = make_splittable(a, lam, delta)
    f2 = assemble(res.b, res.decomposition, delta)
    return seq(f2, inverse(res.f1))


# ---------------------------------------------------------------------------
# verification


@dataclass
class ExtensionReport:
    max_residual: float
    witness: int | None
    strip_residual: float | None
    folds: int
    dilatation_bound: float
    sampled_k: float
    roundtrip: float
    passed: bool
    checks: dict = field(default_factory=dict)
    roundtrip_f64: float = 0.0
    roundtrip_ld: float = 0.0
    precise_rechecks: int = 0


def _strip_samples(delta, rng, count=100, span=40.0):
    x = rng.uniform(-span, span, count)
    y = delta * (1 + rng.exponential(1.0, count))
    y[::2] *= -1
    y[:4] = [delta, -delta, delta, -delta]
    return x + 1j * y


def verify_extension(expr, seq_: IntBijection, window: int = 30, tol: float = 1e-9,
                     delta: float = 1.0, grid: int = 40, seed: int = 0) -> ExtensionReport:
    """Check an extension against its sequence: values on Z, strip identity, folds, dilatation."""
    rng = np.random.default_rng(seed)
    ns = np.arange(-window, window + 1)
    target = seq_.array(-window, window).astype(float)
    res = np.abs(expr_eval(expr, ns.astype(complex)) - target)
    j = int(np.argmax(res))
    max_res = float(res[j])
    witness = int(ns[j]) if max_res >= tol else None

    strip = None
    if limit_classification(seq_) is Direction.SAME:
        zs = _strip_samples(delta, rng)
        strip = float(np.max(np.abs(expr_eval(expr, zs) - zs)))

    xs = np.linspace(-window - 0.5, window + 0.5, 2 * grid) + 1e-3 * math.sqrt(2)
    ys = np.linspace(-delta, delta, grid) * (1 - 1e-3) + 1e-3 * math.sqrt(3) * delta
    X, Y = np.meshgrid(xs, ys)
    W = expr_eval(expr, X + 1j * Y)
    folds = _count_collisions(W, 1e-12)
    pts = (X + 1j * Y).ravel()
    back64 = float(np.max(np.abs(expr_inverse_eval(expr, expr_eval(expr, pts)) - pts)))
    # Local dilatation reaches 1e15 on wide blocks, where a round trip loses about
    # eps |w| / sigma_min to conditioning.  Long double first; points still above
    # tol are redone with 60-digit decimals, which isolates the inverse formula.
    ext = pts.astype(np.clongdouble)
    err = np.abs(expr_inverse_eval(expr, expr_eval(expr, ext)) - ext).astype(float)
    back_ld = float(np.max(err))
    hard = np.flatnonzero(err >= tol)
    for j in hard:
        z = complex(pts[j])
        bx, by = expr_eval_precise(expr, expr_eval_precise(expr, z), inverse=True)
        err[j] = abs(float(bx - Decimal(z.real))) + abs(float(by - Decimal(z.imag)))
    back = float(np.max(err))
    bound = expr_dilatation_bound(expr)
    sampled = float(np.max(expr_local_dilatation(expr, pts)))
    sign, _ = expr_slogdet(expr, pts)
    det_ok = bool(np.all(sign > 0))
    checks = {
        "values": max_res < tol,
        "strip": strip is None or strip == 0.0,
        "folds": folds == 0,
        "jacobian": det_ok,
        "roundtrip": back < tol,
        "dilatation": bound >= sampled - 1e-6,
    }
    return ExtensionReport(max_res, witness, strip, folds, bound, sampled, back,
                           all(checks.values()), checks, back64, back_ld, len(hard))


def _count_collisions(W, tol):
    """Grid points whose image coincides (to ``tol``) with another grid point's image."""
    key = np.stack([np.round(W.real.ravel() / tol), np.round(W.imag.ravel() / tol)], axis=1)
    _, counts = np.unique(key, axis=0, return_counts=True)
    return int(np.sum(counts[counts > 1]))
