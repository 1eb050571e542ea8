"""Independent reference implementations used by the tests.

Deliberately naive: plain Python loops, no shared code with the package.
"""
from __future__ import annotations

import math
from fractions import Fraction


def rect_tent_formula(x: float, y: float, a: float, b: float, c: float) -> complex:
    """Two-branch rectangle map sending -c to c, identity outside |x| < a, |y| < b."""
    if not (abs(x) < a and abs(y) < b):
        return complex(x, y)
    if x <= -c:
        u = (a + c - 2 * c / b * abs(y)) * (x + a) / (a - c) - a
    else:
        u = (a - c + 2 * c / b * abs(y)) * (x - a) / (a + c) + a
    return complex(u, y)


def seq_value(kind: str, data: dict, n: int) -> int:
    if kind == "identity_tail":
        lo, hi, vals = data["lo"], data["hi"], data["values"]
        return vals[n - lo] if lo <= n <= hi else n
    if kind == "periodic":
        p, disp = data["period"], data["disp"]
        return n + disp[n % p]
    raise ValueError(kind)


def brute_three_point(values: list[int]) -> Fraction:
    """max |a_n - a_m| / |a_n - a_k| over positions n <= m < k, exactly.

    Ratios are compared by integer cross-multiplication.
    """
    bn, bd = 0, 1
    N = len(values)
    for n in range(N):
        an = values[n]
        for k in range(n + 1, N):
            den = abs(an - values[k])
            for m in range(n, k):
                num = abs(an - values[m])
                if num * bd > bn * den:
                    bn, bd = num, den
    return Fraction(bn, bd)


def brute_monotone_M(vals_fn, lo: int, hi: int, horizon: int) -> float:
    a = {n: vals_fn(n) for n in range(lo - 2 * horizon, hi + 2 * horizon + 1)}
    best = 1.0
    for n in range(lo - horizon, hi + horizon + 1):
        for k in range(1, horizon + 1):
            r = (a[n + k] - a[n]) / (a[n] - a[n - k])
            best = max(best, r, 1 / r)
    return best


def brute_splits(values_fn, k: int, l: int, reach: int) -> bool:
    """[k, l] splits when everything before is below the block and everything after above."""
    block = [values_fn(j) for j in range(k, l + 1)]
    lo_b, hi_b = min(block), max(block)
    before = all(values_fn(j) < lo_b for j in range(k - reach, k))
    after = all(values_fn(j) > hi_b for j in range(l + 1, l + 1 + reach))
    return before and after


def tent_k_closed(ux: float, uy: float) -> float:
    """Pointwise dilatation of (x, y) -> (u(x, y), y) from its partials."""
    fz = complex(ux + 1, -uy) / 2
    fzb = complex(ux - 1, uy) / 2
    m = abs(fzb) / abs(fz)
    return (1 + m) / (1 - m)


def tent_grid_sup(a: float, b: float, p: float, q: float, grid: int) -> float:
    """Grid maximum of the closed-form dilatation of a horizontal tent (cell centres)."""
    d = q - p
    best = 1.0
    for i in range(grid):
        t = -a + (i + 0.5) * 2 * a / grid
        if t < p:
            s, slope = d * (t + a) / (p + a), d / (p + a)
        else:
            s, slope = d * (a - t) / (a - p), -d / (a - p)
        for j in range(grid):
            n = -b + (j + 0.5) * 2 * b / grid
            tau = 1 - abs(n) / b
            ux = 1 + slope * tau
            uy = -s * math.copysign(1.0, n) / b
            best = max(best, tent_k_closed(ux, uy))
    return best
