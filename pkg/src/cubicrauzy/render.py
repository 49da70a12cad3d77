"""Point clouds for the fractal, its boundary curve, and the induced tiling.

Rendering works in the embedded plane with double precision; exactness lives
in the algebra layer.  Enumeration of admissible words is vectorized over a
transfer-matrix state (the last three digits); above the point cap the
admissible tree is subsampled uniformly with a seeded generator.
"""
from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .algebra import AlgNum, Embedding, FamilyParam, embed
from .codec import boundary_param_f, square_param_F
from .geometry import f_map
from .numeration import admissible_count, max_window

POINT_CAP = 2_000_000


@dataclass
class PointCloud:
    points: np.ndarray  # complex128
    meta: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class Lattice:
    """Translation lattice Z*u + Z*alpha*u with u = alpha - 1."""

    param: FamilyParam
    g1: complex  # embed(u)
    g2: complex  # embed(alpha * u)

    @staticmethod
    def for_family(param: FamilyParam, e: Embedding) -> "Lattice":
        u = AlgNum(-1, 1, 0, param)
        au = AlgNum.alpha(param) * u
        return Lattice(param, embed(u, e), embed(au, e))

    @property
    def covolume(self) -> float:
        return abs((self.g1.conjugate() * self.g2).imag)


def _valid_table(param: FamilyParam) -> np.ndarray:
    """Bool table V[state, digit]: may `digit` extend a word whose last three
    digits (most recent first) encode `state`?"""
    a = param.a
    bad = max_window(param)
    table = np.zeros((a * a * a, a), dtype=bool)
    for d1 in range(a):
        for d2 in range(a):
            for d3 in range(a):
                s = (d1 * a + d2) * a + d3
                for d in range(a):
                    table[s, d] = (d, d1, d2, d3) < bad
    return table


def _enumerate_words(param: FamilyParam, depth: int) -> np.ndarray:
    """All admissible words of length `depth` as a (N, depth) uint8 array."""
    a = param.a
    table = _valid_table(param)
    words = np.zeros((1, 0), dtype=np.uint8)
    states = np.zeros(1, dtype=np.int64)
    for _ in range(depth):
        mask = table[states]  # (N, a)
        rows, digs = np.nonzero(mask)
        words = np.hstack([words[rows], digs[:, None].astype(np.uint8)])
        states = digs * (a * a) + states[rows] // a
    return words


def _sample_words(param: FamilyParam, depth: int, count: int, seed: int,
                  threads: int = 1) -> np.ndarray:
    """`count` words drawn uniformly from the admissible tree (with replacement).

    Digits are chosen level by level with probabilities proportional to the
    exact number of admissible completions from each transfer state.
    """
    a = param.a
    bad = max_window(param)
    n_states = a * a * a

    # completions[L][s] = number of admissible length-L continuations from s
    trans: list[list[tuple[int, int]]] = [[] for _ in range(n_states)]
    for s in range(n_states):
        d1, rest = divmod(s, a * a)
        d2, d3 = divmod(rest, a)
        for d in range(a):
            if (d, d1, d2, d3) < bad:
                trans[s].append((d, d * a * a + s // a))
    comp = np.zeros((depth + 1, n_states), dtype=float)
    comp[0] = 1.0
    for L in range(1, depth + 1):
        for s in range(n_states):
            comp[L, s] = sum(comp[L - 1, t] for _, t in trans[s])

    # per-state cumulative digit distribution at each remaining depth;
    # unused tail slots stay at 1 so they never win the searchsorted race
    cum = np.ones((depth, n_states, a), dtype=float)
    digit_of = np.zeros((n_states, a), dtype=np.int64)
    state_of = np.zeros((n_states, a), dtype=np.int64)
    n_opts = np.zeros(n_states, dtype=np.int64)
    for s in range(n_states):
        n_opts[s] = len(trans[s])
        for j, (d, t) in enumerate(trans[s]):
            digit_of[s, j] = d
            state_of[s, j] = t
    for L in range(depth):
        rem = depth - L - 1
        for s in range(n_states):
            weights = [comp[rem, t] for _, t in trans[s]]
            total = sum(weights)
            if total > 0:
                acc = np.cumsum(np.asarray(weights) / total)
                cum[L, s, :n_opts[s]] = acc

    def sample_chunk(chunk_seed: int, m: int) -> np.ndarray:
        rng = np.random.default_rng(chunk_seed)
        states = np.zeros(m, dtype=np.int64)
        words = np.zeros((m, depth), dtype=np.uint8)
        for L in range(depth):
            u = rng.random(m)
            c = cum[L, states]  # (m, a)
            j = (u[:, None] > c).sum(axis=1)
            j = np.minimum(j, n_opts[states] - 1)
            words[:, L] = digit_of[states, j]
            states = state_of[states, j]
        return words

    if threads <= 1:
        return sample_chunk(seed, count)
    sizes = [count // threads + (1 if i < count % threads else 0) for i in range(threads)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(lambda iv: sample_chunk(seed * 1_000_003 + iv[0], iv[1]),
                              enumerate(sizes)))
    return np.vstack(parts)


def _eval_words(words: np.ndarray, e: Embedding, start: int = 2) -> np.ndarray:
    powers = e.alpha ** (start + np.arange(words.shape[1]))
    return words.astype(np.float64) @ powers


def points_of_R(param: FamilyParam, e: Embedding, depth: int,
                cap: int = POINT_CAP, seed: int = 0, threads: int = 1) -> PointCloud:
    """One point per admissible word of length `depth` (subsampled above `cap`)."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    total = admissible_count(param, depth)
    if total <= cap:
        words = _enumerate_words(param, depth)
        sampled = False
    else:
        words = _sample_words(param, depth, cap, seed, threads)
        sampled = True
    pts = _eval_words(words, e)
    meta = {
        "a": param.a, "depth": depth, "tag": "fractal",
        "count": len(pts), "total_words": total,
        "sampled": sampled, "seed": seed if sampled else None,
    }
    return PointCloud(pts, meta)


def boundary_points(param: FamilyParam, e: Embedding, samples: int, depth: int) -> PointCloud:
    """Images of the square-boundary homeomorphism over a uniform edge grid.

    The parametrization values are computed once per grid point and reused on
    all four edges through the exact edge maps.
    """
    per_edge = max(2, math.ceil(samples / 4))
    ts = np.linspace(0.0, 1.0, per_edge)
    base = np.array([boundary_param_f(float(t), param, e, depth)[0] for t in ts])
    edges = [base]
    for j in (1, 2, 3):
        m = f_map(j, param)
        edges.append(embed(m.t, e) + embed(m.s, e) * base)
    pts = np.concatenate(edges)
    meta = {"a": param.a, "depth": depth, "tag": "boundary", "count": len(pts),
            "samples_per_edge": per_edge}
    return PointCloud(pts, meta)


@dataclass
class Tiling:
    base: PointCloud
    lattice: Lattice
    shifts: list[tuple[int, int, complex]]
    meta: dict = field(default_factory=dict)

    def tiles(self):
        for k1, k2, shift in self.shifts:
            yield k1, k2, self.base.points + shift

    def all_points(self) -> np.ndarray:
        return np.concatenate([pts for _, _, pts in self.tiles()])


def tiling(param: FamilyParam, e: Embedding, depth: int, K: int,
           cap: int = POINT_CAP, seed: int = 0, threads: int = 1) -> Tiling:
    """Copies of the fractal translated over the lattice range [-K, K]^2."""
    if K < 0:
        raise ValueError("lattice range K must be >= 0")
    base = points_of_R(param, e, depth, cap=cap, seed=seed, threads=threads)
    lat = Lattice.for_family(param, e)
    shifts = [
        (k1, k2, k1 * lat.g1 + k2 * lat.g2)
        for k1 in range(-K, K + 1)
        for k2 in range(-K, K + 1)
    ]
    meta = {"a": param.a, "depth": depth, "tag": "tiling", "K": K,
            "tiles": len(shifts), "points_per_tile": len(base)}
    return Tiling(base, lat, shifts, meta)


def area_estimate(cloud: PointCloud, h: float, dilate: int | str = "auto") -> float:
    """Occupied-pixel area of the cloud at pixel size h.

    Occupancy can be dilated by one pixel to compensate for rendering a point
    sample of a solid set.  The default applies that compensation only when
    the sampling is sparse (fewer than 8 points per occupied pixel); once
    pixels are saturated, dilating would overcount by a boundary ring instead
    of filling interior gaps.
    """
    if h <= 0:
        raise ValueError("pixel size must be positive")
    pts = cloud.points
    if len(pts) == 0:
        return 0.0
    ix = np.floor(pts.real / h).astype(np.int64)
    iy = np.floor(pts.imag / h).astype(np.int64)
    ix -= ix.min()
    iy -= iy.min()
    w, hgt = int(ix.max()) + 1, int(iy.max()) + 1
    grid = np.zeros((w + 2, hgt + 2), dtype=bool)
    grid[ix + 1, iy + 1] = True
    occupied = int(grid.sum())
    if dilate == "auto":
        dilate = 1 if len(pts) < 8 * occupied else 0
    if dilate > 0:
        pad = dilate
        big = np.zeros((w + 2 * pad + 2, hgt + 2 * pad + 2), dtype=bool)
        big[ix + pad + 1, iy + pad + 1] = True
        out = big.copy()
        for dx in range(-dilate, dilate + 1):
            for dy in range(-dilate, dilate + 1):
                if dx or dy:
                    out |= np.roll(np.roll(big, dx, axis=0), dy, axis=1)
        return float(out.sum()) * h * h
    return float(occupied) * h * h


# ---------------------------------------------------------------------------
# export

_PALETTE = [
    (31, 119, 180), (255, 127, 14), (44, 160, 44), (214, 39, 40),
    (148, 103, 189), (140, 86, 75), (227, 119, 194), (127, 127, 127),
    (188, 189, 34), (23, 190, 207),
]


def _sorted_points(pts: np.ndarray) -> np.ndarray:
    order = np.lexsort((pts.imag, pts.real))
    return pts[order]


def _raster_frame(all_pts: np.ndarray, width: int) -> tuple[float, float, float, int, int]:
    re, im = all_pts.real, all_pts.imag
    lo_r, hi_r = float(re.min()), float(re.max())
    lo_i, hi_i = float(im.min()), float(im.max())
    span = max(hi_r - lo_r, hi_i - lo_i, 1e-12)
    h = span / (width - 1)
    height = int(math.floor((hi_i - lo_i) / h)) + 1
    return lo_r, lo_i, h, width, height


def _pixels(pts: np.ndarray, frame) -> tuple[np.ndarray, np.ndarray]:
    lo_r, lo_i, h, width, height = frame
    px = np.clip(((pts.real - lo_r) / h).astype(np.int64), 0, width - 1)
    py = np.clip(((pts.imag - lo_i) / h).astype(np.int64), 0, height - 1)
    return px, py


def _collect_layers(obj) -> list[tuple[int, np.ndarray]]:
    """(color index, points) layers for a cloud or a tiling."""
    if isinstance(obj, Tiling):
        layers = []
        for idx, (k1, k2, pts) in enumerate(obj.tiles()):
            layers.append((idx % len(_PALETTE), _sorted_points(pts)))
        return layers
    return [(0, _sorted_points(obj.points))]


def export_ppm(obj, path: str, width: int = 800) -> None:
    """Binary P6 raster; deterministic for identical input."""
    layers = _collect_layers(obj)
    all_pts = np.concatenate([pts for _, pts in layers])
    frame = _raster_frame(all_pts, width)
    _, _, _, w, hgt = frame
    img = np.full((hgt, w, 3), 255, dtype=np.uint8)
    for color_idx, pts in layers:
        px, py = _pixels(pts, frame)
        img[hgt - 1 - py, px] = _PALETTE[color_idx]
    with open(path, "wb") as fh:
        fh.write(f"P6\n{w} {hgt}\n255\n".encode("ascii"))
        fh.write(img.tobytes())


def export_svg(obj, path: str, width: int = 800) -> None:
    """SVG 1.1 with one unit rect per occupied pixel, sorted emission."""
    layers = _collect_layers(obj)
    all_pts = np.concatenate([pts for _, pts in layers])
    frame = _raster_frame(all_pts, width)
    _, _, _, w, hgt = frame
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{w}" height="{hgt}" viewBox="0 0 {w} {hgt}">',
        f'<rect width="{w}" height="{hgt}" fill="white"/>',
    ]
    for color_idx, pts in layers:
        r, g, b = _PALETTE[color_idx]
        px, py = _pixels(pts, frame)
        cells = sorted(set(zip(px.tolist(), py.tolist())))
        lines.append(f'<g fill="rgb({r},{g},{b})">')
        for x, y in cells:
            lines.append(f'<rect x="{x}" y="{hgt - 1 - y}" width="1" height="1"/>')
        lines.append("</g>")
    lines.append("</svg>")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def export_csv(obj, path: str) -> None:
    """Columns re,im over all points (tiling translates flattened)."""
    pts = obj.all_points() if isinstance(obj, Tiling) else obj.points
    pts = _sorted_points(pts)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("re,im\n")
        for z in pts:
            fh.write(f"{float(z.real)!r},{float(z.imag)!r}\n")


def export_json(obj, path: str) -> None:
    if isinstance(obj, Tiling):
        doc = {
            "meta": obj.meta,
            "lattice": {"g1": [obj.lattice.g1.real, obj.lattice.g1.imag],
                        "g2": [obj.lattice.g2.real, obj.lattice.g2.imag],
                        "covolume": obj.lattice.covolume},
            "tiles": [
                {"k1": k1, "k2": k2,
                 "points": [[z.real, z.imag] for z in _sorted_points(pts)]}
                for k1, k2, pts in obj.tiles()
            ],
        }
    else:
        doc = {
            "meta": obj.meta,
            "points": [[z.real, z.imag] for z in _sorted_points(obj.points)],
        }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh, sort_keys=True)
        fh.write("\n")


_EXPORTERS = {"ppm": export_ppm, "svg": export_svg, "csv": export_csv, "json": export_json}


def export(obj, path: str, fmt: str, **kwargs) -> None:
    try:
        fn = _EXPORTERS[fmt]
    except KeyError:
        raise ValueError(f"unknown format {fmt!r}; use one of {sorted(_EXPORTERS)}") from None
    fn(obj, path, **kwargs)
