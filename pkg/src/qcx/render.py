"""Deformed-grid output: CSV samples and a two-layer SVG drawing."""
from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np


@dataclass(frozen=True)
class GridSpec:
    x_range: tuple
    y_range: tuple
    nx: int
    ny: int

    def __post_init__(self):
        if self.nx < 2 or self.ny < 2:
            raise ValueError("grid counts must be >= 2")
        if not (self.x_range[0] < self.x_range[1] and self.y_range[0] < self.y_range[1]):
            raise ValueError("grid ranges must be nondegenerate")

    @classmethod
    def parse(cls, text: str) -> "GridSpec":
        """Parse ``"x0:x1:nx,y0:y1:ny"``."""
        try:
            xs, ys = text.split(",")
            x0, x1, nx = xs.split(":")
            y0, y1, ny = ys.split(":")
            return cls((float(x0), float(x1)), (float(y0), float(y1)), int(nx), int(ny))
        except ValueError as exc:
            raise ValueError(f"bad grid spec {text!r} (want x0:x1:nx,y0:y1:ny): {exc}") from exc

    def axes(self):
        return (np.linspace(self.x_range[0], self.x_range[1], self.nx),
                np.linspace(self.y_range[0], self.y_range[1], self.ny))

    def points(self) -> np.ndarray:
        """Grid nodes in row-major order (rows are constant y)."""
        xs, ys = self.axes()
        X, Y = np.meshgrid(xs, ys)
        return (X + 1j * Y).ravel()


def _num(v: float) -> str:
    v = float(v)
    if v == 0:
        return "0"  # no negative zero
    return repr(v)


def grid_csv(f, spec: GridSpec) -> str:
    pts = spec.points()
    img = np.asarray(f(pts), dtype=complex)
    lines = ["x,y,Fx,Fy"]
    lines += [f"{_num(z.real)},{_num(z.imag)},{_num(w.real)},{_num(w.imag)}" for z, w in zip(pts, img)]
    return "\n".join(lines) + "\n"


def _polyline(curve, to_px) -> str:
    xy = [to_px(c) for c in curve]
    head = f"M{xy[0][0]:.3f} {xy[0][1]:.3f}"
    return head + "".join(f" L{x:.3f} {y:.3f}" for x, y in xy[1:])


def grid_svg(f, spec: GridSpec, samples: int = 8, width: float = 800.0) -> str:
    """Source grid lines, their images, and integer points on the real axis with their images.

    Each grid line is refined to ``samples`` segments per cell so curved
    images are visible; one ``path`` per line and layer.
    """
    xs, ys = spec.axes()
    fine_x = np.linspace(xs[0], xs[-1], (spec.nx - 1) * samples + 1)
    fine_y = np.linspace(ys[0], ys[-1], (spec.ny - 1) * samples + 1)
    src = [fine_x + 1j * y for y in ys] + [x + 1j * fine_y for x in xs]
    img = [np.asarray(f(c), dtype=complex) for c in src]
    ints = []
    if ys[0] <= 0 <= ys[-1]:
        ints = [complex(n) for n in range(math.ceil(xs[0]), math.floor(xs[-1]) + 1)]
    int_img = list(np.asarray(f(np.asarray(ints, dtype=complex)), dtype=complex)) if ints else []

    allpts = np.concatenate(src + img + [np.asarray(int_img, dtype=complex)])
    x0, x1 = allpts.real.min(), allpts.real.max()
    y0, y1 = allpts.imag.min(), allpts.imag.max()
    pad = 0.05 * max(x1 - x0, y1 - y0, 1e-9)
    x0, x1, y0, y1 = x0 - pad, x1 + pad, y0 - pad, y1 + pad
    scale = width / (x1 - x0)
    height = (y1 - y0) * scale

    def to_px(z):
        return (z.real - x0) * scale, (y1 - z.imag) * scale

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.3f}" height="{height:.3f}" '
           f'viewBox="0 0 {width:.3f} {height:.3f}">']
    for name, curves, colour in (("source", src, "#bbbbbb"), ("image", img, "#1f4e9a")):
        out.append(f'<g id="{name}" fill="none" stroke="{colour}" stroke-width="1">')
        out += [f'<path d="{_polyline(c, to_px)}"/>' for c in curves]
        out.append("</g>")
    for name, pts, colour in (("source-integers", ints, "#555555"), ("image-integers", int_img, "#c0392b")):
        out.append(f'<g id="{name}" fill="{colour}">')
        for k, z in enumerate(pts):
            px, py = to_px(z)
            label = int(round(ints[k].real))
            out.append(f'<circle cx="{px:.3f}" cy="{py:.3f}" r="3" data-n="{label}"/>')
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
