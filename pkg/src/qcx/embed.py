"""Quasisymmetric images of Z in R, Beurling-Ahlfors extensions and embedding extensions.

An embedding ``f: Z -> R`` is given by its (increasing) image ``E = {a_n}``
and an integer automorphism ``sigma`` with ``f(n) = a_{sigma(n)}``.  The
extension is ``F o G``: ``G`` extends ``sigma`` (strip construction) and ``F``
is the Beurling-Ahlfors extension of the piecewise-linear interpolant of
``n -> a_n``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .mapcore import _as_complex_array, _out, expr_eval
from .seqcore import IdentityTail, IntBijection, MonotoneSeq, monotone_M, qs_profile
from .splitflow import extend_automorphism


@dataclass(frozen=True)
class ImageReport:
    m_constant: float
    horizon: int
    witness: tuple
    passed: bool


def characterize_image(e: MonotoneSeq, horizon: int = 40, ceiling: float = 10.0) -> ImageReport:
    """Bounded-ratio test for ``E = {a_n}`` being a quasisymmetric image of Z."""
    m, wit = monotone_M(e, horizon, with_witness=True)
    return ImageReport(m, horizon, wit, m <= ceiling)


# ---------------------------------------------------------------------------
# piecewise-linear boundary map


@dataclass(frozen=True)
class PiecewiseLinearHomeo:
    breakpoints: tuple
    values: tuple
    left_slope: float = 1.0
    right_slope: float = 1.0
    _cum: np.ndarray = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        x = np.asarray(self.breakpoints, dtype=float)
        y = np.asarray(self.values, dtype=float)
        if x.shape != y.shape or x.ndim != 1 or x.size == 0:
            raise ValueError("breakpoints and values must be equal-length, non-empty")
        if np.any(np.diff(x) <= 0) or np.any(np.diff(y) <= 0):
            raise ValueError("breakpoints and values must be strictly increasing")
        if not (self.left_slope > 0 and self.right_slope > 0):
            raise ValueError("tail slopes must be positive")
        object.__setattr__(self, "breakpoints", tuple(x.tolist()))
        object.__setattr__(self, "values", tuple(y.tolist()))
        # integral of h from the first breakpoint to each breakpoint (trapezoids are exact)
        cum = np.concatenate([[0.0], np.cumsum(np.diff(x) * (y[:-1] + y[1:]) / 2)])
        object.__setattr__(self, "_cum", cum)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        bx, by = np.asarray(self.breakpoints), np.asarray(self.values)
        out = np.interp(x, bx, by)
        out = np.where(x < bx[0], by[0] + (x - bx[0]) * self.left_slope, out)
        out = np.where(x > bx[-1], by[-1] + (x - bx[-1]) * self.right_slope, out)
        return out

    def mean(self, a, b):
        """Exact mean of h over [a, b] (a <= b), piece by piece.

        Inside a single linear piece the mean is (h(a) + h(b)) / 2, which keeps
        full precision for very short intervals; otherwise trapezoids over the
        pieces meeting [a, b] are summed.
        """
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        bx = np.asarray(self.breakpoints)
        top = bx.size - 1
        ia = np.searchsorted(bx, a, side="left")       # first breakpoint >= a
        ib = np.searchsorted(bx, b, side="right") - 1  # last breakpoint <= b
        ha, hb = self(a), self(b)
        straddle = (ia <= ib) & (b > a)
        ka = bx[np.clip(ia, 0, top)]
        kb = bx[np.clip(ib, 0, top)]
        total = ((ka - a) * (ha + self(ka)) / 2
                 + self._cum[np.clip(ib, 0, top)] - self._cum[np.clip(ia, 0, top)]
                 + (b - kb) * (self(kb) + hb) / 2)
        width = np.where(straddle, b - a, 1.0)
        return np.where(straddle, total / width, (ha + hb) / 2)

    def one_sided_slopes(self, x):
        """Slopes of h just left and just right of x, and the distances to the nearest kinks."""
        x = np.asarray(x, dtype=float)
        bx, by = np.asarray(self.breakpoints), np.asarray(self.values)
        slope = np.concatenate([[self.left_slope], np.diff(by) / np.diff(bx), [self.right_slope]])
        il = np.searchsorted(bx, x, side="left")   # pieces are numbered 0 .. len(bx)
        ir = np.searchsorted(bx, x, side="right")
        ext = np.concatenate([[-np.inf], bx, [np.inf]])
        return slope[il], slope[ir], x - ext[il], ext[ir + 1] - x


def pl_interpolant(e: MonotoneSeq) -> PiecewiseLinearHomeo:
    """h(n) = a_n on the window, linear in between, affine tails with the sequence's slopes."""
    return PiecewiseLinearHomeo(tuple(range(e.lo, e.hi + 1)), e.values, e.left_slope, e.right_slope)


# ---------------------------------------------------------------------------
# Beurling-Ahlfors extension


@dataclass(frozen=True)
class BAMap:
    h: PiecewiseLinearHomeo

    def __call__(self, z):
        return ba_eval(self, z)


def ba_eval(m: BAMap, z):
    """F(x+iy) = (alpha+beta)/2 + i(alpha-beta) for y > 0, h(x) on R, conjugate below.

    alpha and beta are the means of h over [x, x+y] and [x-y, x].
    """
    z, scalar = _as_complex_array(z)
    z = z.astype(complex)
    x, y = z.real, np.abs(z.imag)
    h = m.h
    pos = y > 0
    ys = np.where(pos, y, 1.0)
    alpha = h.mean(x, x + ys)
    beta = h.mean(x - ys, x)
    u = np.where(pos, (alpha + beta) / 2, h(x))
    v = np.where(pos, alpha - beta, 0.0)
    # no kink inside (x - y, x + y) other than x itself: closed form, exact for tiny y
    sl, sr, dl, dr = h.one_sided_slopes(x)
    local = pos & (dl >= ys) & (dr >= ys)
    hx = h(x)
    u = np.where(local, hx + (sr - sl) * ys / 4, u)
    v = np.where(local, (sr + sl) * ys / 2, v)
    out = u + 1j * np.where(z.imag < 0, -v, v)
    return _out(out, scalar)


# ---------------------------------------------------------------------------
# embeddings Z -> R


@dataclass(frozen=True)
class EmbeddingMap:
    """``ba o auto``: first the integer automorphism's extension, then the BA map."""
    ba: BAMap
    auto: object

    def __call__(self, z):
        return embedding_eval(self, z)


def embedding_eval(m: EmbeddingMap, z):
    return ba_eval(m.ba, expr_eval(m.auto, z))


def extend_embedding(e: MonotoneSeq, assignment: IntBijection, delta: float = 1.0) -> EmbeddingMap:
    """Extension of ``f(n) = a_{assignment(n)}`` to a plane homeomorphism."""
    auto = extend_automorphism(assignment, delta)
    return EmbeddingMap(BAMap(pl_interpolant(e)), auto)


def embedding_values(e: MonotoneSeq, assignment: IntBijection, start: int, stop: int) -> np.ndarray:
    """f(n) = a_{sigma(n)} for n in [start, stop]."""
    s = assignment.array(start, stop)
    lo, hi = int(s.min()), int(s.max())
    return e.array(lo, hi)[s - lo]


# ---------------------------------------------------------------------------
# inverse-map bounds


def inverse_assignment(assignment: IntBijection, lo: int, hi: int) -> list[int]:
    """g(a_n) = sigma^{-1}(n) for n in [lo, hi]."""
    if isinstance(assignment, IdentityTail):
        inv = {v: assignment.lo + i for i, v in enumerate(assignment.values)}
        return [inv.get(n, n) for n in range(lo, hi + 1)]
    pad = hi - lo + 1
    while True:
        vals = assignment.array(lo - pad, hi + pad)
        inv = {int(v): lo - pad + i for i, v in enumerate(vals)}
        if all(n in inv for n in range(lo, hi + 1)):
            return [inv[n] for n in range(lo, hi + 1)]
        pad *= 2


def measure_mu(e: MonotoneSeq, g_values, margin: int = 0) -> float:
    """Empirical mu = eta'(1): max |g(x)-g(y)| / |g(x)-g(z)| over triples with |x-y| <= |x-z|.

    ``g_values`` are aligned with ``[e.lo - margin, e.hi + margin]``.
    """
    xs = e.array(e.lo - margin, e.hi + margin)
    prof = qs_profile(xs, np.asarray(g_values, dtype=float))
    return max(1.0, prof.eta(1.0))


@dataclass
class InverseBoundsReport:
    mu: float
    adjacent_max: float
    span_checks: list
    l_constant: float
    violations: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations


def inverse_bounds_report(e: MonotoneSeq, g_values, mu: float) -> InverseBoundsReport:
    """Check the adjacent, span and ratio bounds of the inverse assignment on the window.

    ``g_values[j]`` is g(a_{e.lo + j}).  Every failing inequality is recorded
    as ``(kind, n, k, value)``.
    """
    g = np.asarray(g_values, dtype=float)
    if g.size != e.hi - e.lo + 1:
        raise ValueError(f"size mismatch: {g.size} g-values for a window of {e.hi - e.lo + 1}")
    L = 8 * mu ** 2
    viol = []
    adj = np.abs(np.diff(g))
    for j in np.flatnonzero(adj >= 2 * mu):
        viol.append(("adjacent", e.lo + int(j), 1, float(adj[j])))
    spans = []
    size = g.size
    for k in range(1, size):
        d = np.abs(g[k:] - g[:-k])
        lower, upper = (k - 1) / (2 * mu), 2 * mu * k
        spans.append((k, lower, float(d.min()), upper))
        for j in np.flatnonzero((d <= lower) | (d >= upper)):
            viol.append(("span", e.lo + int(j), k, float(d[j])))
        if 2 * k < size:
            fwd = g[2 * k:] - g[k:-k]
            back = g[k:-k] - g[:-2 * k]
            r = np.abs(fwd / back)
            for j in np.flatnonzero((r <= 1 / L) | (r >= L)):
                viol.append(("ratio", e.lo + k + int(j), k, float(r[j])))
    return InverseBoundsReport(mu, float(adj.max()) if adj.size else 0.0, spans, L, viol)


def widen(e: MonotoneSeq, margin: int) -> MonotoneSeq:
    """Same sequence with ``margin`` tail points moved into the explicit window."""
    lo, hi = e.lo - margin, e.hi + margin
    return MonotoneSeq(lo, hi, tuple(e.array(lo, hi)), e.left_slope, e.right_slope)


def inverse_bounds_for(e: MonotoneSeq, assignment: IntBijection, margin: int = 3) -> InverseBoundsReport:
    """Measure mu for g = f^{-1} on a widened window and check the inverse-map bounds there."""
    w = widen(e, margin)
    if isinstance(assignment, IdentityTail):
        w = widen(w, max(0, e.lo - assignment.lo, assignment.hi - e.hi))
    g = inverse_assignment(assignment, w.lo, w.hi)
    return inverse_bounds_report(w, g, measure_mu(w, g))
