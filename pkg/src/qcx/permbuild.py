"""Permutations of an integer interval realized by tent slides near the real axis."""
from __future__ import annotations

from dataclasses import dataclass

from .mapcore import HORIZONTAL, IDENTITY, VERTICAL, Rect, TentSlide, disjoint, expr_dilatation_bound, seq


@dataclass(frozen=True)
class BlockPermutation:
    """``j -> values[j - lo]`` on ``[lo, hi]``, to be realized inside height ``delta``."""
    lo: int
    hi: int
    values: tuple
    delta: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(int(v) for v in self.values))
        if sorted(self.values) != list(range(self.lo, self.hi + 1)):
            raise ValueError(f"{self.values} is not a permutation of [{self.lo}, {self.hi}]")
        if not self.delta > 0:
            raise ValueError("delta must be positive")


def transposition_move(m: int, n: int, lo: int, hi: int, delta: float):
    """Three disjoint-slide layers swapping integers m and n inside (lo-1/2, hi+1/2) x (-delta, delta).

    Layer 1 lifts m to m - i delta/2 and n to n + i delta/2, layer 2 slides
    them horizontally past each other in strips clear of the real axis, and
    layer 3 drops them back.
    """
    if not (lo <= m <= hi and lo <= n <= hi):
        raise ValueError(f"points {m}, {n} outside [{lo}, {hi}]")
    if m == n:
        return IDENTITY
    h = delta / 2
    c = (lo + hi) / 2
    w = (hi - lo + 1) / 2

    def lift(x, p, q):
        return TentSlide(Rect(float(x), 0.0, 0.5, delta), VERTICAL, p, q)

    def slide(cy, src, dst):
        return TentSlide(Rect(c, cy, w, delta / 4), HORIZONTAL, src - c, dst - c)

    g1 = disjoint([lift(m, 0.0, -h), lift(n, 0.0, h)])
    g2 = disjoint([slide(-h, m, n), slide(h, n, m)])
    g3 = disjoint([lift(n, -h, 0.0), lift(m, h, 0.0)])
    return seq(g1, g2, g3)


def build_block_permutation(perm: BlockPermutation):
    """Realize ``perm`` as a composition of transposition moves.

    Peels off the top index: with m the current image of the top, the
    transposition (m top) is composed last and the rest recurses on the
    shorter prefix.
    """
    cur = {j: v for j, v in zip(range(perm.lo, perm.hi + 1), perm.values)}
    moves = []
    for top in range(perm.hi, perm.lo, -1):
        m = cur[top]
        if m == top:
            continue
        moves.append(transposition_move(m, top, perm.lo, perm.hi, perm.delta))
        for j, v in cur.items():
            if v == m:
                cur[j] = top
            elif v == top:
                cur[j] = m
    return seq(*reversed(moves))


def block_bound_ceiling(width: int, delta: float) -> float:
    """Dilatation bound valid for every permutation of a block of ``width`` integers."""
    if width <= 1:
        return 1.0
    worst = max(expr_dilatation_bound(transposition_move(m, n, 0, width - 1, delta))
                for m in range(width) for n in range(m + 1, width))
    return worst ** (width - 1)
