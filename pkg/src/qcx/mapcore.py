"""Rectangle-supported plane homeomorphisms and their compositions.

Points are Python ``complex`` numbers (or numpy complex arrays); every
evaluation routine is vectorized and returns the same shape it was given.

The basic primitive is a *tent slide*: inside a rectangle the coordinate
along one axis is displaced by a piecewise-linear field ``s`` (zero at both
ends, ``s(p) = q - p``) damped linearly to zero towards the transverse edges::

    t' = t + s(t) * (1 - |n| / B)

where ``t`` is the axis coordinate and ``n`` the transverse one, both relative
to the rectangle center.  Outside the open rectangle the map is the identity.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
import math
import decimal
from decimal import Decimal
from typing import Callable, Sequence, Union

import numpy as np

Point = complex
HORIZONTAL = "h"
VERTICAL = "v"


class DegeneratePointError(ValueError):
    """Raised when ``|f_z| <= |f_zbar|`` at a sampled point."""


@dataclass(frozen=True)
class Rect:
    cx: float
    cy: float
    hw: float
    hh: float

    def __post_init__(self):
        if not (self.hw > 0 and self.hh > 0):
            raise ValueError(f"rectangle half-extents must be positive, got {self.hw}, {self.hh}")
        if not all(map(math.isfinite, (self.cx, self.cy, self.hw, self.hh))):
            raise ValueError("rectangle must be finite")

    @property
    def bounds(self) -> tuple[float, float, float, float]:
        return (self.cx - self.hw, self.cx + self.hw, self.cy - self.hh, self.cy + self.hh)

    def contains(self, z):
        """Open-rectangle membership (vectorized)."""
        z = np.asarray(z)
        return (np.abs(z.real - self.cx) < self.hw) & (np.abs(z.imag - self.cy) < self.hh)


@dataclass(frozen=True)
class BeltramiSample:
    at: complex
    mu: complex
    k_local: float


def _dilatation(mu):
    a = np.abs(mu)
    return (1 + a) / (1 - a)


def _as_complex_array(z):
    arr = np.asarray(z)
    # extended precision is kept (used for round-trip checks of strongly sheared maps)
    if arr.dtype != np.clongdouble:
        arr = arr.astype(complex)
    return arr, arr.ndim == 0


def _out(arr, scalar):
    return complex(arr) if scalar else arr


# ---------------------------------------------------------------------------
# tent slides


@dataclass(frozen=True)
class TentSlide:
    rect: Rect
    axis: str
    p: float
    q: float

    def __post_init__(self):
        if self.axis not in (HORIZONTAL, VERTICAL):
            raise ValueError(f"axis must be 'h' or 'v', got {self.axis!r}")
        a = self.axis_half
        if not (abs(self.p) < a and abs(self.q) < a):
            raise ValueError(f"slide offsets must lie strictly inside (-{a}, {a}): p={self.p}, q={self.q}")

    @property
    def axis_half(self) -> float:
        return self.rect.hw if self.axis == HORIZONTAL else self.rect.hh

    @property
    def trans_half(self) -> float:
        return self.rect.hh if self.axis == HORIZONTAL else self.rect.hw

    # local (axis, transverse) coordinates
    def _local(self, z):
        dx = z.real - self.rect.cx
        dy = z.imag - self.rect.cy
        return (dx, dy) if self.axis == HORIZONTAL else (dy, dx)

    def _global(self, t, n):
        if self.axis == HORIZONTAL:
            return (self.rect.cx + t) + 1j * (self.rect.cy + n)
        return (self.rect.cx + n) + 1j * (self.rect.cy + t)

    def _shift(self, t):
        """Displacement s(t) and its slope; t == p takes the right branch."""
        a, p, d = self.axis_half, self.p, self.q - self.p
        left = t < p
        s = np.where(left, d * (t + a) / (p + a), d * (a - t) / (a - p))
        s = np.where(t == p, d, s)
        slope = np.where(left, d / (p + a), -d / (a - p))
        return s, slope

    def __call__(self, z):
        return tent_eval(self, z)


def tent_eval(slide: TentSlide, z):
    """Apply a tent slide; identity outside the open rectangle."""
    z, scalar = _as_complex_array(z)
    out = z.copy()
    inside = slide.rect.contains(z)
    if np.any(inside):
        zi = z[inside]
        t, n = slide._local(zi)
        tau = 1 - np.abs(n) / slide.trans_half
        s, _ = slide._shift(t)
        out[inside] = slide._global(t + s * tau, n)
    return _out(out, scalar)


def tent_inverse(slide: TentSlide, w):
    """Closed-form inverse of :func:`tent_eval`."""
    w, scalar = _as_complex_array(w)
    out = w.copy()
    inside = slide.rect.contains(w)
    if np.any(inside):
        u, n = slide._local(w[inside])
        a, p, d = slide.axis_half, slide.p, slide.q - slide.p
        tau = 1 - np.abs(n) / slide.trans_half
        kink = p + d * tau  # image of t = p on this transverse line
        kl = d * tau / (a + p)
        kr = d * tau / (a - p)
        t = np.where(u < kink, (u - kl * a) / (1 + kl), (u - kr * a) / (1 - kr))
        t = np.where(u == kink, p, t)
        out[inside] = slide._global(t, n)
    return _out(out, scalar)


def _tent_partials(slide: TentSlide, z):
    """Return (f_z, f_zbar) of a tent slide at interior points (arrays)."""
    t, n = slide._local(z)
    b = slide.trans_half
    tau = 1 - np.abs(n) / b
    s, slope = slide._shift(t)
    sign = np.where(n < 0, -1.0, 1.0)  # n == 0 uses the upper branch
    d_axis = 1 + slope * tau           # d t'/d t
    d_trans = -s * sign / b            # d t'/d n
    if slide.axis == HORIZONTAL:
        ux, uy, vx, vy = d_axis, d_trans, 0.0, 1.0
    else:
        ux, uy, vx, vy = 1.0, 0.0, d_trans, d_axis
    fz = ((ux + vy) + 1j * (vx - uy)) / 2
    fzb = ((ux - vy) + 1j * (vx + uy)) / 2
    return fz, fzb


def tent_beltrami(slide: TentSlide, z) -> BeltramiSample:
    """Analytic Beltrami coefficient of a slide at an interior point."""
    z = complex(z)
    if not bool(slide.rect.contains(z)):
        return BeltramiSample(z, 0j, 1.0)
    fz, fzb = _tent_partials(slide, np.asarray([z]))
    fz, fzb = complex(fz[0]), complex(fzb[0])
    if abs(fz) - abs(fzb) <= 1e-14:
        raise DegeneratePointError(f"degenerate slide at {z}")
    mu = fzb / fz
    return BeltramiSample(z, mu, float(_dilatation(mu)))


@lru_cache(maxsize=4096)
def _tent_dilatation_cached(axis_half, trans_half, p, q, grid):
    slide = TentSlide(Rect(0.0, 0.0, axis_half, trans_half), HORIZONTAL, p, q)
    if p == q:
        return 1.0
    a = axis_half
    # |mu| is quasi-convex in (u_x, u_y), and on each of the four smooth
    # pieces u_x depends only on |n| and u_y only on t, so the supremum sits
    # at a piece corner; corners are probed just inside each piece.
    eps = 1e-12 * a
    ts = [-a + eps, p - eps, p, a - eps]
    b = trans_half * (1 - 1e-15)
    ns = [0.0, -1e-12 * trans_half, b, -b]
    cand = np.array([t + 1j * n for t in ts for n in ns])
    fz, fzb = _tent_partials(slide, cand)
    best = float(np.max(_dilatation(fzb / fz)))
    if grid:
        g = (np.arange(grid) + 0.5) / grid
        tt, nn = np.meshgrid(-a + 2 * a * g, -trans_half + 2 * trans_half * g)
        fz, fzb = _tent_partials(slide, (tt + 1j * nn).ravel())
        best = max(best, float(np.max(_dilatation(fzb / fz))))
    return best


def tent_dilatation(slide: TentSlide, grid: int = 256) -> float:
    """Maximal dilatation of a slide (candidate corners plus a ``grid``-square sweep)."""
    return _tent_dilatation_cached(slide.axis_half, slide.trans_half, slide.p, slide.q, grid)


# ---------------------------------------------------------------------------
# similarities and composition trees


@dataclass(frozen=True)
class Similarity:
    """``z -> sign * z + shift``."""
    sign: int = 1
    shift: complex = 0j

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError("similarity sign must be +1 or -1")

    def __call__(self, z):
        return expr_eval(self, z)


@dataclass(frozen=True)
class Seq:
    """Children applied left to right."""
    children: tuple = ()

    def __call__(self, z):
        return expr_eval(self, z)


@dataclass(frozen=True)
class Disjoint:
    """Children with pairwise disjoint open supports, applied in parallel."""
    children: tuple = ()
    boxes: tuple = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        boxes = []
        for c in self.children:
            box = support(c)
            if box is None:
                continue
            if not all(map(math.isfinite, box)):
                raise ValueError("Disjoint children must have bounded support")
            for other in boxes:
                if _open_overlap(box, other):
                    raise ValueError(f"Disjoint supports overlap: {box} and {other}")
            boxes.append(box)
        object.__setattr__(self, "boxes", tuple(support(c) for c in self.children))

    def __call__(self, z):
        return expr_eval(self, z)


@dataclass(frozen=True)
class Inv:
    child: object

    def __call__(self, z):
        return expr_eval(self, z)


MapExpr = Union[TentSlide, Similarity, Seq, Disjoint, Inv]
IDENTITY = Seq(())


def _open_overlap(a, b):
    return min(a[1], b[1]) > max(a[0], b[0]) and min(a[3], b[3]) > max(a[2], b[2])


def support(expr) -> tuple[float, float, float, float] | None:
    """Bounding box (x0, x1, y0, y1) of the region moved by ``expr``; None if identity.

    Every bounded support is mapped onto itself, so a point leaves or enters
    it only through the identity.
    """
    if isinstance(expr, TentSlide):
        return None if expr.p == expr.q else expr.rect.bounds
    if isinstance(expr, Similarity):
        if expr.sign == 1 and expr.shift == 0:
            return None
        return (-math.inf, math.inf, -math.inf, math.inf)
    if isinstance(expr, Inv):
        return support(expr.child)
    if isinstance(expr, Disjoint) and expr.boxes:
        boxes = [b for b in expr.boxes if b is not None]
    else:
        boxes = [b for b in (support(c) for c in expr.children) if b is not None]
    if not boxes:
        return None
    return (min(b[0] for b in boxes), max(b[1] for b in boxes),
            min(b[2] for b in boxes), max(b[3] for b in boxes))


def is_identity(expr) -> bool:
    return support(expr) is None


def seq(*children) -> MapExpr:
    """Build a Seq, flattening nested Seqs and dropping identity pieces."""
    flat = []
    for c in children:
        if isinstance(c, Seq):
            flat.extend(c.children)
        elif not is_identity(c):
            flat.append(c)
    flat = [c for c in flat if not is_identity(c)]
    if len(flat) == 1:
        return flat[0]
    return Seq(tuple(flat))


def disjoint(children: Sequence) -> MapExpr:
    kept = tuple(c for c in children if not is_identity(c))
    if not kept:
        return IDENTITY
    if len(kept) == 1:
        return kept[0]
    return Disjoint(kept)


def inverse(expr) -> MapExpr:
    if is_identity(expr):
        return IDENTITY
    if isinstance(expr, Inv):
        return expr.child
    return Inv(expr)


def _in_box(z, box):
    return (z.real > box[0]) & (z.real < box[1]) & (z.imag > box[2]) & (z.imag < box[3])


def _apply(expr, z, forward):
    if isinstance(expr, TentSlide):
        return tent_eval(expr, z) if forward else tent_inverse(expr, z)
    if isinstance(expr, Similarity):
        if forward:
            return expr.sign * z + expr.shift if expr.shift != 0 else expr.sign * z
        return expr.sign * (z - expr.shift) if expr.shift != 0 else expr.sign * z
    if isinstance(expr, Inv):
        return _apply(expr.child, z, not forward)
    if isinstance(expr, Seq):
        order = expr.children if forward else reversed(expr.children)
        for c in order:
            z = _apply(c, z, forward)
        return z
    if isinstance(expr, Disjoint):
        out = z.copy()
        for c, box in zip(expr.children, expr.boxes):
            if box is None:
                continue
            mask = _in_box(z, box)
            if np.any(mask):
                out[mask] = _apply(c, z[mask], forward)
        return out
    raise TypeError(f"not a map expression: {expr!r}")


def expr_eval(expr, z):
    """Evaluate a map expression at a point or array of points."""
    z, scalar = _as_complex_array(z)
    return _out(_apply(expr, np.atleast_1d(z).copy(), True).reshape(z.shape), scalar)


def expr_inverse_eval(expr, w):
    w, scalar = _as_complex_array(w)
    return _out(_apply(expr, np.atleast_1d(w).copy(), False).reshape(w.shape), scalar)


# ---------------------------------------------------------------------------
# high-precision evaluation


def _tent_precise(slide: TentSlide, x, y, forward):
    r = slide.rect
    cx, cy, hw, hh = (Decimal(v) for v in (r.cx, r.cy, r.hw, r.hh))
    if not (abs(x - cx) < hw and abs(y - cy) < hh):
        return x, y
    horiz = slide.axis == HORIZONTAL
    t, n = (x - cx, y - cy) if horiz else (y - cy, x - cx)
    a, b = (hw, hh) if horiz else (hh, hw)
    p, q = Decimal(slide.p), Decimal(slide.q)
    d = q - p
    tau = 1 - abs(n) / b
    if forward:
        s = d * (t + a) / (p + a) if t < p else d * (a - t) / (a - p)
        t = t + s * tau
    elif t == p + d * tau:
        t = p
    elif t < p + d * tau:
        k = d * tau / (a + p)
        t = (t - k * a) / (1 + k)
    else:
        k = d * tau / (a - p)
        t = (t - k * a) / (1 - k)
    return (cx + t, cy + n) if horiz else (cx + n, cy + t)


def _apply_precise(expr, x, y, forward):
    if isinstance(expr, TentSlide):
        return _tent_precise(expr, x, y, forward)
    if isinstance(expr, Similarity):
        sx, sy = Decimal(expr.shift.real), Decimal(expr.shift.imag)
        if forward:
            return expr.sign * x + sx, expr.sign * y + sy
        return expr.sign * (x - sx), expr.sign * (y - sy)
    if isinstance(expr, Inv):
        return _apply_precise(expr.child, x, y, not forward)
    if isinstance(expr, Seq):
        for c in (expr.children if forward else reversed(expr.children)):
            x, y = _apply_precise(c, x, y, forward)
        return x, y
    if isinstance(expr, Disjoint):
        for c, box in zip(expr.children, expr.boxes):
            if box is not None and Decimal(box[0]) < x < Decimal(box[1]) and Decimal(box[2]) < y < Decimal(box[3]):
                return _apply_precise(c, x, y, forward)
        return x, y
    raise TypeError(f"not a map expression: {expr!r}")


def expr_eval_precise(expr, z, inverse: bool = False, digits: int = 60) -> tuple[Decimal, Decimal]:
    """Evaluate (or invert) at one point with ``digits`` significant decimal digits.

    ``z`` is a complex number or an (x, y) pair of Decimals.  Slow; meant for
    rechecking points where float64 is swamped by the map's conditioning.
    """
    with decimal.localcontext() as ctx:
        ctx.prec = digits
        if isinstance(z, tuple):
            x, y = +z[0], +z[1]
        else:
            z = complex(z)
            x, y = Decimal(z.real), Decimal(z.imag)
        return _apply_precise(expr, x, y, not inverse)


def _tent_matrix(slide: TentSlide, z):
    """Real 2x2 Jacobians of a slide at interior points, with their determinants."""
    t, n = slide._local(z)
    tau = 1 - np.abs(n) / slide.trans_half
    s, slope = slide._shift(t)
    sign = np.where(n < 0, -1.0, 1.0)
    d_axis = 1 + slope * tau
    d_trans = -s * sign / slide.trans_half
    m = np.zeros(z.shape + (2, 2))
    if slide.axis == HORIZONTAL:
        m[:, 0, 0], m[:, 0, 1], m[:, 1, 1] = d_axis, d_trans, 1.0
    else:
        m[:, 0, 0], m[:, 1, 0], m[:, 1, 1] = 1.0, d_trans, d_axis
    return m, d_axis


def _jac_step(z, m, logs, logdet, piece, piece_det):
    m = piece @ m
    scale = np.max(np.abs(m), axis=(1, 2))
    m = m / scale[:, None, None]
    return m, logs + np.log(scale), logdet + np.log(piece_det)


def _apply_jac(expr, z, m, logs, logdet, forward):
    """Forward-mode chain rule; ``m * exp(logs)`` is the accumulated Jacobian."""
    if isinstance(expr, TentSlide):
        inside = expr.rect.contains(z)
        if not np.any(inside):
            return z, m, logs, logdet
        z, m, logs, logdet = z.copy(), m.copy(), logs.copy(), logdet.copy()
        zi = z[inside]
        if forward:
            piece, det = _tent_matrix(expr, zi)
            w = tent_eval(expr, zi)
        else:
            w = tent_inverse(expr, zi)
            piece, det = _tent_matrix(expr, w)
            piece, det = np.linalg.inv(piece), 1 / det
        z[inside] = w
        m[inside], logs[inside], logdet[inside] = _jac_step(zi, m[inside], logs[inside], logdet[inside], piece, det)
        return z, m, logs, logdet
    if isinstance(expr, Similarity):
        return _apply(expr, z, forward), (m if expr.sign == 1 else -m), logs, logdet
    if isinstance(expr, Inv):
        return _apply_jac(expr.child, z, m, logs, logdet, not forward)
    if isinstance(expr, Seq):
        for c in (expr.children if forward else reversed(expr.children)):
            z, m, logs, logdet = _apply_jac(c, z, m, logs, logdet, forward)
        return z, m, logs, logdet
    if isinstance(expr, Disjoint):
        z, m, logs, logdet = z.copy(), m.copy(), logs.copy(), logdet.copy()
        z0 = z.copy()
        for c, box in zip(expr.children, expr.boxes):
            if box is None:
                continue
            mask = _in_box(z0, box)
            if np.any(mask):
                z[mask], m[mask], logs[mask], logdet[mask] = _apply_jac(
                    c, z0[mask], m[mask], logs[mask], logdet[mask], forward)
        return z, m, logs, logdet
    raise TypeError(f"not a map expression: {expr!r}")


def _jacobian_state(expr, z):
    z1 = np.atleast_1d(np.asarray(z, dtype=complex)).ravel()
    m = np.broadcast_to(np.eye(2), z1.shape + (2, 2)).copy()
    zeros = np.zeros(z1.shape)
    return _apply_jac(expr, z1.copy(), m, zeros, zeros.copy(), True)


def expr_jacobian(expr, z):
    """Exact (chain-rule) real Jacobian matrices of ``expr`` at the points ``z``, shape (N, 2, 2)."""
    _, m, logs, _ = _jacobian_state(expr, z)
    return m * np.exp(logs)[:, None, None]


def expr_slogdet(expr, z):
    """(sign, log|det|) of the exact Jacobian, like ``numpy.linalg.slogdet``."""
    _, m, logs, logdet = _jacobian_state(expr, z)
    return np.sign(np.linalg.det(m)), logdet


def expr_local_dilatation(expr, z):
    """Exact pointwise dilatation sigma_max / sigma_min, robust to extreme distortion.

    The determinant is carried as a sum of logs, so K = sigma_max^2 / det is
    free of the cancellation that defeats finite differences when K is huge.
    """
    _, m, logs, logdet = _jacobian_state(expr, z)
    # sigma_max = |f_z| + |f_zbar|; this form is also exact near K = 1
    a, b, c, d = m[:, 0, 0], m[:, 0, 1], m[:, 1, 0], m[:, 1, 1]
    smax = np.hypot(a + d, c - b) / 2 + np.hypot(a - d, c + b) / 2
    return smax ** 2 * np.exp(2 * logs - logdet)


def expr_dilatation_bound(expr, grid: int = 256) -> float:
    """Upper bound for the maximal dilatation: max over Disjoint, product over Seq."""
    if isinstance(expr, TentSlide):
        return tent_dilatation(expr, grid)
    if isinstance(expr, Similarity):
        return 1.0
    if isinstance(expr, Inv):
        return expr_dilatation_bound(expr.child, grid)
    if isinstance(expr, Disjoint):
        return max((expr_dilatation_bound(c, grid) for c in expr.children), default=1.0)
    if isinstance(expr, Seq):
        k = 1.0
        for c in expr.children:
            k *= expr_dilatation_bound(c, grid)
        return k
    raise TypeError(f"not a map expression: {expr!r}")


def count_leaves(expr) -> int:
    if isinstance(expr, (TentSlide, Similarity)):
        return 1
    if isinstance(expr, Inv):
        return count_leaves(expr.child)
    return sum(count_leaves(c) for c in expr.children)


# ---------------------------------------------------------------------------
# finite-difference oracle


def wirtinger(f: Callable, z, h: float = 1e-5):
    """Central-difference estimates of (f_z, f_zbar) for a vectorized map ``f``."""
    z, _ = _as_complex_array(z)
    z = np.atleast_1d(z)
    n = z.size
    stencil = np.concatenate([z + h, z - h, z + 1j * h, z - 1j * h])
    fw = np.asarray(f(stencil), dtype=complex)
    fx = (fw[:n] - fw[n:2 * n]) / (2 * h)
    fy = (fw[2 * n:3 * n] - fw[3 * n:]) / (2 * h)
    return (fx - 1j * fy) / 2, (fx + 1j * fy) / 2


def _refined_wirtinger(f, z, h, refine):
    """Wirtinger estimates, retrying degenerate stencils with h/10 up to ``refine`` times.

    Strongly sheared compositions need small steps before the difference
    quotients resolve the (tiny) gap between |f_z| and |f_zbar|.
    """
    fz, fzb = wirtinger(f, z, h)
    bad = np.abs(fz) <= np.abs(fzb)
    for _ in range(refine):
        if not np.any(bad):
            break
        h /= 10
        gz, gzb = wirtinger(f, z[bad], h)
        fz[bad], fzb[bad] = gz, gzb
        bad = np.abs(fz) <= np.abs(fzb)
    return fz, fzb, bad


def numeric_beltrami(f: Callable, z, h: float = 1e-5, refine: int = 3,
                     strict: bool = True) -> BeltramiSample:
    """Finite-difference Beltrami coefficient; ``f`` is a map expression or any vectorized map.

    Scalar ``z`` gives scalar fields, an array gives arrays.  Stencils that stay
    degenerate after refinement raise, or with ``strict=False`` give NaN.
    """
    if not callable(f):
        expr = f
        f = lambda w: expr_eval(expr, w)  # noqa: E731
    z_arr, scalar = _as_complex_array(z)
    z1 = np.atleast_1d(z_arr).ravel()
    fz, fzb, bad = _refined_wirtinger(f, z1, h, refine)
    if np.any(bad) and strict:
        raise DegeneratePointError(f"|f_z| <= |f_zbar| at {z1[bad][0]} (fold or kink-straddling stencil)")
    with np.errstate(divide="ignore", invalid="ignore"):
        mu = np.where(bad, np.nan, fzb / fz)
        k = _dilatation(mu)
    if scalar:
        return BeltramiSample(complex(z_arr), complex(mu[0]), float(k[0]))
    return BeltramiSample(z1, mu, k)


def jacobian_det(f: Callable, z, h: float = 1e-6, refine: int = 3):
    """Finite-difference Jacobian determinant |f_z|^2 - |f_zbar|^2."""
    z1 = np.atleast_1d(np.asarray(z, dtype=complex)).ravel()
    fz, fzb, _ = _refined_wirtinger(f, z1, h, refine)
    return np.abs(fz) ** 2 - np.abs(fzb) ** 2


# ---------------------------------------------------------------------------
# JSON trees


def expr_to_json(expr) -> dict:
    if isinstance(expr, TentSlide):
        r = expr.rect
        return {"node": "tent", "rect": [r.cx, r.cy, r.hw, r.hh], "axis": expr.axis,
                "p": expr.p, "q": expr.q}
    if isinstance(expr, Similarity):
        return {"node": "sim", "sign": expr.sign, "shift": [expr.shift.real, expr.shift.imag]}
    if isinstance(expr, Seq):
        return {"node": "seq", "children": [expr_to_json(c) for c in expr.children]}
    if isinstance(expr, Disjoint):
        return {"node": "disjoint", "children": [expr_to_json(c) for c in expr.children]}
    if isinstance(expr, Inv):
        return {"node": "inv", "child": expr_to_json(expr.child)}
    raise TypeError(f"not a map expression: {expr!r}")


def expr_from_json(obj: dict) -> MapExpr:
    try:
        tag = obj["node"]
        if tag == "tent":
            cx, cy, hw, hh = obj["rect"]
            return TentSlide(Rect(float(cx), float(cy), float(hw), float(hh)), obj["axis"],
                             float(obj["p"]), float(obj["q"]))
        if tag == "sim":
            re, im = obj.get("shift", [0.0, 0.0])
            return Similarity(int(obj.get("sign", 1)), complex(re, im))
        if tag == "seq":
            return Seq(tuple(expr_from_json(c) for c in obj["children"]))
        if tag == "disjoint":
            return Disjoint(tuple(expr_from_json(c) for c in obj["children"]))
        if tag == "inv":
            return Inv(expr_from_json(obj["child"]))
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed map expression: {exc}") from exc
    raise ValueError(f"unknown map node {obj.get('node')!r}")
