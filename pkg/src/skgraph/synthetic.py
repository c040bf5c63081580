"""Synthetic stroke images: random scribbles, signatures, handwriting, blobs, glyphs.

Every generator takes a ``numpy.random.Generator`` so corpora are
reproducible from a seed.
"""

from __future__ import annotations

import numpy as np
from scipy import interpolate
from scipy import ndimage as ndi
from scipy.spatial import cKDTree

from .raster import Bitmap


def disc(radius: float) -> np.ndarray:
    """Boolean disc structuring element: offsets with dx^2 + dy^2 <= radius^2."""
    r = int(np.floor(radius))
    yy, xx = np.mgrid[-r : r + 1, -r : r + 1]
    return xx**2 + yy**2 <= radius**2 + 1e-9


def draw_curve(mask: np.ndarray, pts, pen: float = 1.0) -> None:
    """Ink every pixel whose centre lies within ``pen / 2`` of the polyline ``pts`` (x, y).

    A pen of width 1 or less draws the 8-connected digital line instead.
    """
    pts = np.asarray(pts, dtype=float)
    if len(pts) == 1:
        pts = np.vstack([pts, pts])
    seg = np.diff(pts, axis=0)
    n = np.maximum(1, np.ceil(np.hypot(seg[:, 0], seg[:, 1]) * 4).astype(int))
    dense = [pts[:1]]
    for p, d, k in zip(pts[:-1], seg, n):
        t = (np.arange(1, k + 1) / k)[:, None]
        dense.append(p + t * d)
    dense = np.vstack(dense)
    h, w = mask.shape
    if pen <= 1:
        q = np.rint(dense).astype(int)
        ok = (q[:, 0] >= 0) & (q[:, 0] < w) & (q[:, 1] >= 0) & (q[:, 1] < h)
        mask[q[ok, 1], q[ok, 0]] = True
        return
    r = pen / 2
    lo = np.maximum(np.floor(dense.min(axis=0) - r).astype(int), 0)
    hi = np.minimum(np.ceil(dense.max(axis=0) + r).astype(int) + 1, (w, h))
    if np.any(hi <= lo):
        return
    yy, xx = np.mgrid[lo[1] : hi[1], lo[0] : hi[0]]
    centres = np.column_stack([xx.ravel(), yy.ravel()])
    dist, _ = cKDTree(dense).query(centres, distance_upper_bound=r + 1)
    hit = (dist <= r).reshape(xx.shape)
    mask[lo[1] : hi[1], lo[0] : hi[0]] |= hit


def bezier(ctrl, n: int = 64) -> np.ndarray:
    """Points on a cubic Bezier curve with control points ``ctrl`` (4 x 2)."""
    c = np.asarray(ctrl, dtype=float)
    t = np.linspace(0, 1, n)[:, None]
    return (
        (1 - t) ** 3 * c[0] + 3 * (1 - t) ** 2 * t * c[1] + 3 * (1 - t) * t**2 * c[2] + t**3 * c[3]
    )


def _smooth_walk(rng, start, steps, step_len, turn_sd, bounds, curl=0.0):
    x, y = start
    ang = rng.uniform(0, 2 * np.pi)
    pts = [(x, y)]
    w, h = bounds
    for _ in range(steps):
        ang += rng.normal(curl, turn_sd)
        x += step_len * np.cos(ang)
        y += step_len * np.sin(ang)
        # steer back towards the canvas instead of clipping
        if not (4 <= x < w - 4 and 4 <= y < h - 4):
            ang = np.arctan2(h / 2 - y, w / 2 - x) + rng.normal(0, 0.3)
            x = min(max(x, 4), w - 5)
            y = min(max(y, 4), h - 5)
        pts.append((x, y))
    return np.array(pts)


def random_strokes(rng: np.random.Generator, size: int | None = None, pen: float | None = None) -> Bitmap:
    """A few random smooth strokes on a square canvas of 64..512 pixels."""
    size = int(rng.integers(64, 513)) if size is None else size
    pen = float(rng.integers(1, 6)) if pen is None else pen
    mask = np.zeros((size, size), dtype=bool)
    for _ in range(int(rng.integers(1, 5))):
        start = rng.uniform(8, size - 8, 2)
        pts = _smooth_walk(rng, start, int(rng.integers(10, 40)), size / 25, 0.35, (size, size))
        draw_curve(mask, pts, pen)
    return Bitmap(mask.astype(np.uint8))


def _cursive(rng, x0, y0, x1, amp, pen_pts=None):
    """A looping cursive trace from x0 to x1 around baseline y0."""
    n = max(2, int((x1 - x0) / (amp * 0.9)))
    t = np.linspace(0, 2 * np.pi * n, 24 * n)
    ax = amp * rng.uniform(0.35, 0.6)
    ay = amp * rng.uniform(0.7, 1.0)
    jitter = rng.normal(0, 0.08, size=n + 1)
    wobble = np.interp(t, np.linspace(0, t[-1], n + 1), jitter)
    xs = x0 + (x1 - x0) * t / t[-1] + ax * np.cos(t + np.pi / 2) * (1 + wobble)
    ys = y0 - ay * (0.5 + 0.5 * np.sin(t - np.pi / 2)) * (1 + wobble)
    return np.column_stack([xs, ys])


# Lower-case cursive letters as spline control points: x in letter widths,
# y in x-heights above the baseline.  Each letter enters and leaves near the
# baseline so letters chain into words.
LETTERS = {
    "a": (1.1, [(0, 0), (0.5, 0.9), (0.25, 0.85), (0.1, 0.3), (0.35, 0), (0.6, 0.5), (0.65, 1.0), (0.65, 0.3), (0.8, 0), (1, 0.1)]),
    "d": (1.2, [(0, 0), (0.5, 0.9), (0.25, 0.85), (0.1, 0.3), (0.35, 0), (0.6, 0.5), (0.75, 2.1), (0.7, 0.3), (0.85, 0), (1, 0.1)]),
    "e": (0.9, [(0, 0), (0.55, 0.4), (0.8, 0.8), (0.5, 1.0), (0.2, 0.6), (0.35, 0.1), (1, 0.05)]),
    "g": (1.1, [(0, 0), (0.5, 0.9), (0.25, 0.85), (0.1, 0.3), (0.35, 0), (0.6, 0.5), (0.65, 1.0), (0.6, -0.8), (0.4, -1.2), (0.3, -0.8), (0.6, -0.2), (1, 0.1)]),
    "h": (1.2, [(0, 0), (0.4, 1.4), (0.5, 2.2), (0.3, 2.3), (0.15, 1.5), (0.15, 0), (0.45, 0.9), (0.65, 1.0), (0.8, 0.4), (0.85, 0), (1, 0.1)]),
    "i": (0.6, [(0, 0), (0.4, 1.0), (0.5, 0.3), (0.65, 0), (1, 0.1)]),
    "l": (0.9, [(0, 0), (0.55, 1), (0.8, 2.0), (0.5, 2.35), (0.2, 1.7), (0.3, 0.3), (0.5, 0), (1, 0.1)]),
    "n": (1.1, [(0, 0), (0.15, 0.8), (0.3, 1.0), (0.45, 0.6), (0.5, 0), (0.6, 0.7), (0.8, 1.0), (0.95, 0.5), (1, 0)]),
    "o": (1.0, [(0, 0), (0.4, 0.9), (0.2, 0.8), (0.15, 0.3), (0.4, 0), (0.65, 0.4), (0.55, 0.95), (0.4, 0.9), (0.7, 0.8), (1, 0.6)]),
    "r": (0.9, [(0, 0), (0.3, 1.0), (0.5, 0.85), (0.7, 1.0), (0.75, 0.3), (0.85, 0), (1, 0.1)]),
    "s": (0.8, [(0, 0), (0.4, 1.0), (0.6, 0.5), (0.5, 0.05), (0.3, 0.1), (0.6, 0), (1, 0.1)]),
    "t": (0.8, [(0, 0), (0.4, 2.0), (0.45, 0.3), (0.6, 0), (1, 0.1)]),
    "u": (1.1, [(0, 0), (0.15, 1.0), (0.2, 0.3), (0.35, 0), (0.55, 0.5), (0.65, 1.0), (0.7, 0.3), (0.85, 0), (1, 0.2)]),
}
_LETTER_FREQ = {"a": 8, "d": 4, "e": 12, "g": 2, "h": 6, "i": 7, "l": 4, "n": 7, "o": 8, "r": 6, "s": 6, "t": 9, "u": 3}
_SLANT = 0.25


def _spline(pts, per_unit: float = 3.0) -> np.ndarray:
    """Dense points on an interpolating cubic spline through ``pts``."""
    pts = np.asarray(pts, dtype=float)
    keep = np.r_[True, np.any(np.abs(np.diff(pts, axis=0)) > 1e-6, axis=1)]
    pts = pts[keep]
    if len(pts) < 4:
        return pts
    tck, _ = interpolate.splprep(pts.T, s=0, k=3)
    length = np.hypot(*np.diff(pts, axis=0).T).sum()
    u = np.linspace(0, 1, max(8, int(length * per_unit)))
    return np.column_stack(interpolate.splev(u, tck))


def cursive_word(
    rng: np.random.Generator, x0: float, base: float, xh: float, letters: str | None = None, stretch: float = 1.0, lead=()
):
    """One connected cursive word; returns ``(stroke list, right edge)``.

    ``xh`` is the x-height in pixels and ``stretch`` widens every letter.
    ``lead`` holds extra control points (in x-heights, relative to ``x0``)
    drawn before the first letter, e.g. a capital.  Dots and crossbars come
    back as extra strokes.
    """
    if letters is None:
        letters = _random_letters(rng, int(rng.integers(2, 8)))
    ctrl = [(x0 + u * xh, v) for u, v in lead]
    extra = []
    x = ctrl[-1][0] if ctrl else x0
    for ch in letters:
        width, pts = LETTERS[ch]
        w = width * stretch * xh * rng.uniform(0.85, 1.15)
        for k, (u, v) in enumerate(pts):
            if ctrl and k == 0:
                continue
            jit = rng.normal(0, 0.05, 2) if 0 < k < len(pts) - 1 else (0, 0)
            ctrl.append((x + (u + jit[0]) * w, v + jit[1]))
        if ch == "i":
            extra.append(("dot", x + 0.45 * w, 1.6))
        elif ch == "t":
            extra.append(("bar", x + 0.1 * w, x + 0.8 * w, 1.3))
        x += w
    ctrl = np.array(ctrl)
    xy = np.column_stack([ctrl[:, 0] + _SLANT * ctrl[:, 1] * xh, base - ctrl[:, 1] * xh])
    strokes = [_spline(xy)]
    for e in extra:
        if e[0] == "dot":
            cx, cy = e[1] + _SLANT * e[2] * xh, base - e[2] * xh
            strokes.append(np.array([(cx, cy), (cx + 0.3, cy)]))
        else:
            y = base - e[3] * xh
            strokes.append(np.array([(e[1] + _SLANT * e[3] * xh, y), (e[2] + _SLANT * e[3] * xh, y - 0.1 * xh)]))
    return strokes, x


def signature(rng: np.random.Generator, width: int = 360, height: int = 120, pen: float = 3.0) -> Bitmap:
    """A signature-like image: a looped capital, one or two cursive names, a flourish."""
    mask = np.zeros((height, width), dtype=bool)
    xh = rng.uniform(12, 16)
    base = height * rng.uniform(0.6, 0.68)
    x = rng.uniform(10, 25)
    for _ in range(int(rng.integers(1, 3))):
        capital = _CAPITALS[int(rng.integers(len(_CAPITALS)))]
        lead = [(u + rng.normal(0, 0.05), v + rng.normal(0, 0.05)) for u, v in capital]
        strokes, x1 = cursive_word(rng, x, base, xh, _random_letters(rng, int(rng.integers(4, 8))), 1.3, lead)
        for s in strokes:
            draw_curve(mask, s, pen)
        x = x1 + rng.uniform(1.0, 1.6) * xh
        if x > width - 4 * xh:
            break
    y = base + rng.uniform(8, 16)
    flourish = bezier(
        [
            (rng.uniform(10, 40), y),
            (width * 0.3, y + rng.uniform(-10, 14)),
            (width * 0.6, y + rng.uniform(-14, 10)),
            (rng.uniform(width * 0.6, width - 10), y - rng.uniform(0, 10)),
        ]
    )
    draw_curve(mask, flourish, pen)
    return Bitmap(mask.astype(np.uint8))


# Looped capitals in x-heights; each ends on the baseline ready for a letter.
_CAPITALS = [
    [(0, 0.2), (0.6, 1.5), (1.2, 2.8), (0.8, 3.0), (0.4, 2.2), (0.3, 0.8), (0.1, 0.0), (-0.4, 0.3), (0.4, 0.5), (1.4, 0.1)],
    [(0.2, 2.4), (1.0, 3.0), (1.6, 2.6), (1.0, 1.8), (0.3, 1.6), (0.2, 0.6), (0.8, 0.0), (1.6, 0.6), (1.3, 1.3), (1.8, 0.2)],
    [(1.6, 2.6), (0.8, 3.0), (0.2, 2.2), (0.3, 1.0), (0.9, 0.0), (1.6, 0.5), (1.7, 1.6), (1.4, 0.2), (2.0, 0.1)],
]


def _random_letters(rng, n):
    names = list(_LETTER_FREQ)
    p = np.array(list(_LETTER_FREQ.values()), dtype=float)
    return "".join(rng.choice(names, size=n, p=p / p.sum()))


def handwriting(rng: np.random.Generator, width: int = 320, height: int = 160, pen: float = 2.0) -> Bitmap:
    """A handwritten note at about 100 dpi: two lines of cursive words with margins.

    The x-height is 11 to 14 pixels (about 3 mm) and roughly 2% of the page
    is skeleton, similar to a scanned note.
    """
    mask = np.zeros((height, width), dtype=bool)
    lines = 2
    pitch = height / (lines + 0.6)
    for k in range(lines):
        base = pitch * (k + 1.0)
        xh = rng.uniform(11, 14)
        x = rng.uniform(8, 24)
        while True:
            letters = _random_letters(rng, int(rng.integers(2, 8)))
            est = sum(LETTERS[c][0] for c in letters) * xh * 1.25 * 1.15 + 3 * xh * _SLANT
            if x + est > width - 8:
                break
            strokes, x1 = cursive_word(rng, x, base, xh, letters, 1.25)
            for s in strokes:
                draw_curve(mask, s, pen)
            x = x1 + rng.uniform(0.9, 1.6) * xh
    return Bitmap(mask.astype(np.uint8))


def cursive_strokes(rng: np.random.Generator, size: int = 200, pen: float = 2.0) -> Bitmap:
    """A few cursive traces on a square canvas."""
    mask = np.zeros((size, size), dtype=bool)
    for k in range(3):
        base = size * (k + 0.8) / 3
        x0 = rng.uniform(8, 30)
        draw_curve(mask, _cursive(rng, x0, base, size - rng.uniform(8, 30), rng.uniform(14, 22)), pen)
    return Bitmap(mask.astype(np.uint8))


def random_blob(rng: np.random.Generator, size: int = 48) -> Bitmap:
    """Union of a few random ellipses, optionally with a hole punched in."""
    yy, xx = np.mgrid[:size, :size]
    mask = np.zeros((size, size), dtype=bool)
    for _ in range(int(rng.integers(1, 5))):
        cx, cy = rng.uniform(6, size - 6, 2)
        a, b = rng.uniform(2, size / 3, 2)
        t = rng.uniform(0, np.pi)
        u = (xx - cx) * np.cos(t) + (yy - cy) * np.sin(t)
        v = -(xx - cx) * np.sin(t) + (yy - cy) * np.cos(t)
        mask |= (u / a) ** 2 + (v / b) ** 2 <= 1
    if rng.random() < 0.3:
        cx, cy = rng.uniform(8, size - 8, 2)
        mask &= (xx - cx) ** 2 + (yy - cy) ** 2 > rng.uniform(2, 6) ** 2
    return Bitmap(mask.astype(np.uint8))


# Clean glyph outlines in a unit box (x right, y down), drawn as polylines.
def _arc(cx, cy, rx, ry, a0, a1, n=48):
    t = np.linspace(np.radians(a0), np.radians(a1), n)
    return np.column_stack([cx + rx * np.cos(t), cy - ry * np.sin(t)])


GLYPHS = {
    "0": [_arc(0.5, 0.5, 0.28, 0.4, 0, 360)],
    "1": [[(0.5, 0.1), (0.5, 0.9)], [(0.22, 0.9), (0.78, 0.9)]],
    "2": [
        np.vstack([_arc(0.5, 0.32, 0.25, 0.22, 160, -40), [(0.3, 0.9)]]),
        [(0.12, 0.9), (0.85, 0.9)],
    ],
    "3": [[(0.25, 0.1), (0.75, 0.1), (0.75, 0.9), (0.25, 0.9)], [(0.35, 0.5), (0.75, 0.5)]],
    "4": [[(0.3, 0.1), (0.22, 0.62), (0.85, 0.62)], [(0.65, 0.2), (0.65, 0.9)]],
    "6": [np.vstack([[(0.7, 0.1)], _arc(0.5, 0.68, 0.25, 0.22, 150, -210)])],
    "7": [[(0.2, 0.1), (0.8, 0.1), (0.5, 0.9)]],
    "8": [_arc(0.5, 0.3, 0.2, 0.19, 0, 360), _arc(0.5, 0.7, 0.26, 0.2, 0, 360)],
    "9": [np.vstack([_arc(0.5, 0.32, 0.25, 0.22, 30, 390), [(0.75, 0.32), (0.6, 0.9)]])],
    "X": [[(0.2, 0.15), (0.8, 0.85)], [(0.8, 0.15), (0.2, 0.85)]],
}


def glyph(name: str, size: int = 96, pen: float = 3.0, margin: float = 0.25) -> Bitmap:
    """Render a clean glyph centred on a canvas with room to rotate it."""
    box = size * (1 - 2 * margin)
    mask = np.zeros((size, size), dtype=bool)
    for part in GLYPHS[name]:
        pts = np.asarray(part, dtype=float) * box + size * margin
        draw_curve(mask, pts, pen)
    return Bitmap(mask.astype(np.uint8))


def rotate(b: Bitmap, degrees: float) -> Bitmap:
    """Nearest-neighbour rotation about the image centre, same canvas size."""
    out = ndi.rotate(b.pixels, degrees, reshape=False, order=0, mode="constant")
    return Bitmap(out.astype(np.uint8))


def upscale(b: Bitmap, factor: int) -> Bitmap:
    """Nearest-neighbour integer upscaling."""
    return Bitmap(np.kron(b.pixels, np.ones((factor, factor), dtype=np.uint8)))
