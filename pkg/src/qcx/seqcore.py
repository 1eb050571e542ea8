"""Finite bijections of Z, monotone real sequences, and their checkable conditions."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence, Union

import numpy as np


class HorizonTooSmall(ValueError):
    pass


class Direction(str, Enum):
    SAME = "SameDirection"
    MIRRORED = "Mirrored"


# ---------------------------------------------------------------------------
# representations


@dataclass(frozen=True)
class IdentityTail:
    """``a_n = values[n - lo]`` on ``[lo, hi]`` and ``a_n = n`` elsewhere."""
    lo: int
    hi: int
    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(int(v) for v in self.values))
        if len(self.values) != self.hi - self.lo + 1:
            raise ValueError(f"window [{self.lo}, {self.hi}] needs {self.hi - self.lo + 1} values, "
                             f"got {len(self.values)}")

    def __call__(self, n: int) -> int:
        if self.lo <= n <= self.hi:
            return self.values[n - self.lo]
        return n

    def array(self, start: int, stop: int) -> np.ndarray:
        """Values for indices ``start..stop`` inclusive."""
        idx = np.arange(start, stop + 1)
        out = idx.copy()
        m = (idx >= self.lo) & (idx <= self.hi)
        if np.any(m):
            out[m] = np.asarray(self.values, dtype=np.int64)[idx[m] - self.lo]
        return out

    @property
    def max_displacement(self) -> int:
        return max((abs(v - (self.lo + i)) for i, v in enumerate(self.values)), default=0)


@dataclass(frozen=True)
class Periodic:
    """``a_n = n + disp[n mod period]``."""
    period: int
    disp: tuple

    def __post_init__(self):
        object.__setattr__(self, "disp", tuple(int(d) for d in self.disp))
        if self.period < 1 or len(self.disp) != self.period:
            raise ValueError("periodic sequence needs period >= 1 and len(disp) == period")

    def __call__(self, n: int) -> int:
        return n + self.disp[n % self.period]

    def array(self, start: int, stop: int) -> np.ndarray:
        idx = np.arange(start, stop + 1)
        return idx + np.asarray(self.disp, dtype=np.int64)[idx % self.period]

    @property
    def max_displacement(self) -> int:
        return max(abs(d) for d in self.disp)


@dataclass(frozen=True)
class Negated:
    """``a_n = -inner(n)``: the mirrored counterpart of a representable bijection."""
    inner: Union[IdentityTail, Periodic]

    def __call__(self, n: int) -> int:
        return -self.inner(n)

    def array(self, start: int, stop: int) -> np.ndarray:
        return -self.inner.array(start, stop)

    @property
    def max_displacement(self) -> int:
        raise ValueError("negated sequences have unbounded displacement")


IntBijection = Union[IdentityTail, Periodic, Negated]


def identity() -> IdentityTail:
    return IdentityTail(0, 0, (0,))


def is_bijective(seq: IntBijection) -> bool:
    if isinstance(seq, Negated):
        return is_bijective(seq.inner)
    if isinstance(seq, IdentityTail):
        return sorted(seq.values) == list(range(seq.lo, seq.hi + 1))
    residues = {(j + d) % seq.period for j, d in enumerate(seq.disp)}
    return len(residues) == seq.period


def limit_classification(seq: IntBijection) -> Direction:
    # identity tails and bounded periodic displacements both follow n
    return Direction.MIRRORED if isinstance(seq, Negated) else Direction.SAME


# ---------------------------------------------------------------------------
# three point condition


@dataclass(frozen=True)
class ThreePointReport:
    lambda_empirical: float
    lambda_certified: float
    horizon: int
    witness: tuple


def three_point_sup(values) -> tuple[float, tuple[int, int, int]]:
    """max |a_n - a_m| / |a_n - a_k| over positions n <= m < k of ``values``.

    Returns the maximum and the position triple attaining it (first in
    order of n, then k).  O(N^2) via running maxima.
    """
    a = np.asarray(values, dtype=float)
    best, wit = 0.0, (0, 0, 1)
    for n in range(len(a) - 1):
        d = np.abs(a[n:] - a[n])
        run = np.maximum.accumulate(d)[:-1]     # max over m in [n, k)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = run / d[1:]
        j = int(np.argmax(ratio))
        if ratio[j] > best:
            k = n + 1 + j
            m = n + int(np.argmax(d[: j + 1]))
            best, wit = float(ratio[j]), (n, m, k)
    return best, wit


def _full_span(seq, horizon):
    """Largest triple span guaranteed to be represented inside [-H, H]."""
    if isinstance(seq, IdentityTail):
        if seq.hi < seq.lo:
            return 2 * horizon
        return min(horizon + seq.lo, horizon - seq.hi)
    return 2 * horizon - seq.period + 1


def three_point_lambda(seq: IntBijection, horizon: int = 40) -> ThreePointReport:
    """Three point constant measured on [-horizon, horizon] plus a tail certificate.

    A triple of span s has ratio at most (s - 1 + 2D) / (s - 2D), D the maximal
    displacement; this decreases in s, so spans beyond the fully enumerated
    range are covered by its value at the first unenumerated span.
    """
    if isinstance(seq, Negated):
        inner = three_point_lambda(seq.inner, horizon)
        return inner  # ratios are invariant under a_n -> -a_n
    d = seq.max_displacement
    span = _full_span(seq, horizon)
    if span <= 2 * d:
        raise HorizonTooSmall(f"horizon {horizon} too small for displacement {d}")
    emp, (n, m, k) = three_point_sup(seq.array(-horizon, horizon))
    tail = (span + 2 * d) / (span + 1 - 2 * d)
    cert = max(1.0, emp, tail) if d > 0 else max(1.0, emp)
    return ThreePointReport(emp, cert, horizon, (n - horizon, m - horizon, k - horizon))


def default_horizon(seq: IntBijection) -> int:
    if isinstance(seq, Negated):
        return default_horizon(seq.inner)
    d = seq.max_displacement
    if isinstance(seq, IdentityTail):
        reach = max(abs(seq.lo), abs(seq.hi)) if seq.hi >= seq.lo else 0
        return max(40, reach + 4 * d + 2)
    return max(40, seq.period + 4 * d + 2)


# ---------------------------------------------------------------------------
# splitting


def _max_upto(seq, k: int, d: int) -> int:
    # n < k - 2d has a_n <= n + d < k - d <= a_k
    return int(seq.array(k - 2 * d, k).max())


def _min_from(seq, k: int, d: int) -> int:
    return int(seq.array(k, k + 2 * d).min())


def is_cut(seq: IntBijection, k: int) -> bool:
    """True iff every value at an index <= k is below every value at an index > k."""
    d = seq.max_displacement
    return _max_upto(seq, k, d) < _min_from(seq, k + 1, d)


def splits_interval(seq: IntBijection, k: int, l: int) -> bool:
    """Whether [k, l] splits the sequence: smaller values before, larger after."""
    if k > l:
        raise ValueError("need k <= l")
    d = seq.max_displacement
    block = seq.array(k, l)
    return _max_upto(seq, k - 1, d) < block.min() and _min_from(seq, l + 1, d) > block.max()


@dataclass(frozen=True)
class SplitDecomposition:
    cuts: tuple
    bound_c: int
    coverage: tuple

    @property
    def blocks(self) -> list[tuple[int, int]]:
        return [(a + 1, b) for a, b in zip(self.cuts, self.cuts[1:])]


def block_image_ok(seq: IntBijection, start: int, stop: int) -> bool:
    """The image of [start, stop] is an integer interval of the same size."""
    vals = seq.array(start, stop)
    return int(vals.max() - vals.min()) == stop - start and len(set(vals.tolist())) == stop - start + 1


def find_split_decomposition(seq: IntBijection, c_max: int, horizon: int = 40) -> SplitDecomposition | None:
    """Greedy left-to-right decomposition of [-horizon, horizon] into splitting blocks.

    Each block is extended until it splits; since [k+1, l] splits exactly
    when k and l are both cut points, this enumerates consecutive cuts.
    """
    if isinstance(seq, Negated):
        return None
    cuts = [k for k in range(-horizon - 1, horizon + 1) if is_cut(seq, k)]
    if len(cuts) < 2:
        return None
    bound = max(b - a for a, b in zip(cuts, cuts[1:]))
    if bound > c_max:
        return None
    for a, b in zip(cuts, cuts[1:]):
        if not (splits_interval(seq, a + 1, b) and block_image_ok(seq, a + 1, b)):
            raise AssertionError(f"block [{a + 1}, {b}] between cuts fails to split")
    return SplitDecomposition(tuple(cuts), bound, (cuts[0] + 1, cuts[-1]))


# ---------------------------------------------------------------------------
# monotone sequences


@dataclass(frozen=True)
class MonotoneSeq:
    lo: int
    hi: int
    values: tuple
    left_slope: float = 1.0
    right_slope: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if len(self.values) != self.hi - self.lo + 1 or not self.values:
            raise ValueError("monotone sequence needs hi - lo + 1 >= 1 window values")
        if not (self.left_slope > 0 and self.right_slope > 0):
            raise ValueError("tail slopes must be positive")
        if any(b <= a for a, b in zip(self.values, self.values[1:])):
            raise ValueError("window values must be strictly increasing")

    def array(self, start: int, stop: int) -> np.ndarray:
        idx = np.arange(start, stop + 1)
        out = np.empty(idx.shape, dtype=float)
        left, right = idx < self.lo, idx > self.hi
        mid = ~(left | right)
        out[left] = self.values[0] + (idx[left] - self.lo) * self.left_slope
        out[right] = self.values[-1] + (idx[right] - self.hi) * self.right_slope
        out[mid] = np.asarray(self.values)[idx[mid] - self.lo]
        return out

    def __call__(self, n: int) -> float:
        return float(self.array(n, n)[0])


def monotone_M(seq: MonotoneSeq, horizon: int = 40, *, with_witness: bool = False):
    """max over n, k of max(r, 1/r) with r = (a_{n+k} - a_n) / (a_n - a_{n-k}).

    n ranges over [lo - horizon, hi + horizon] and k over [1, horizon].
    """
    start = seq.lo - 2 * horizon
    a = seq.array(start, seq.hi + 2 * horizon)
    ns = np.arange(seq.lo - horizon, seq.hi + horizon + 1) - start
    best, wit = 1.0, (seq.lo, 1)
    for k in range(1, horizon + 1):
        r = (a[ns + k] - a[ns]) / (a[ns] - a[ns - k])
        r = np.maximum(r, 1 / r)
        j = int(np.argmax(r))
        if r[j] > best:
            best, wit = float(r[j]), (int(ns[j] + start), k)
    return (best, wit) if with_witness else best


# ---------------------------------------------------------------------------
# empirical quasisymmetry profile


@dataclass(frozen=True)
class QsProfile:
    t: np.ndarray
    rho: np.ndarray
    envelope: np.ndarray  # running max of rho over t sorted ascending

    def eta(self, t: float) -> float:
        """Envelope value at ``t`` (max rho over samples with ratio <= t)."""
        i = int(np.searchsorted(self.t, t, side="right"))
        return float(self.envelope[i - 1]) if i else 0.0


def qs_profile(xs: Sequence[float], ys: Sequence[float]) -> QsProfile:
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError(f"size mismatch: {x.shape} vs {y.shape}")
    if len(x) < 3:
        raise ValueError("need at least three points")
    i, j, k = np.meshgrid(np.arange(len(x)), np.arange(len(x)), np.arange(len(x)), indexing="ij")
    keep = (i != j) & (i != k)
    i, j, k = i[keep], j[keep], k[keep]
    t = np.abs(x[i] - x[j]) / np.abs(x[i] - x[k])
    rho = np.abs(y[i] - y[j]) / np.abs(y[i] - y[k])
    order = np.lexsort((rho, t))
    t, rho = t[order], rho[order]
    return QsProfile(t, rho, np.maximum.accumulate(rho))


# ---------------------------------------------------------------------------
# JSON


def bijection_to_json(seq: IntBijection) -> dict:
    if isinstance(seq, IdentityTail):
        return {"kind": "identity_tail", "lo": seq.lo, "hi": seq.hi, "values": list(seq.values)}
    if isinstance(seq, Periodic):
        return {"kind": "periodic", "period": seq.period, "disp": list(seq.disp)}
    return {"kind": "negated", "inner": bijection_to_json(seq.inner)}


def bijection_from_json(obj: dict) -> IntBijection:
    try:
        kind = obj["kind"]
        if kind == "identity_tail":
            return IdentityTail(int(obj["lo"]), int(obj["hi"]), tuple(obj["values"]))
        if kind == "periodic":
            return Periodic(int(obj["period"]), tuple(obj["disp"]))
        if kind == "negated":
            return Negated(bijection_from_json(obj["inner"]))
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed sequence: missing or bad field {exc}") from exc
    raise ValueError(f"unknown sequence kind {obj.get('kind')!r}")


def monotone_to_json(seq: MonotoneSeq) -> dict:
    return {"lo": seq.lo, "hi": seq.hi, "values": list(seq.values),
            "left_slope": seq.left_slope, "right_slope": seq.right_slope}


def monotone_from_json(obj: dict) -> MonotoneSeq:
    try:
        return MonotoneSeq(int(obj["lo"]), int(obj["hi"]), tuple(obj["values"]),
                           float(obj.get("left_slope", 1.0)), float(obj.get("right_slope", 1.0)))
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed monotone sequence: {exc}") from exc
