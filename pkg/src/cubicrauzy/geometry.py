"""Affine contractions of the boundary piece and their exact gluing points.

The piece B of the boundary (the intersection of the fractal with its
translate by alpha - 1) decomposes under 2a-1 exact affine maps g_0..g_{2a-2}:

    g_{2k+1}(z) = -1 - k*alpha^3 + alpha^3 * z          k = 0..a-2
    g_{2k}(z)   = alpha - 1 + (a-1-k)*alpha^3 + alpha^2 * z   k = 0..a-1

Odd-index maps and the top even map act on all of B; the remaining even maps
act on the subset B' (third digit != a-1).  The images of g_0 and g_1 are
exactly the pieces with third digit a-1, which yields the follow constraint
on map codes: an even digit other than 2(a-1) is never followed by 0 or 1.

Three distinguished points drive the gluing:
    u = -1,   v = -(a-1)*alpha - 1/alpha,   w = -1 - alpha^3.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache
from itertools import islice

from .algebra import AlgNum, Embedding, FamilyParam, alpha_power, embed, roots


@dataclass(frozen=True)
class AffineMap:
    """Exact affine map z |-> t + s*z over Z[alpha]."""

    t: AlgNum
    s: AlgNum

    def __call__(self, z: AlgNum) -> AlgNum:
        return self.t + self.s * z


def identity_map(param: FamilyParam) -> AffineMap:
    return AffineMap(AlgNum.zero(param), AlgNum.one(param))


def f_map(j: int, param: FamilyParam) -> AffineMap:
    """The three maps carrying B onto the other non-singleton boundary pieces.

    f1(z) = 1/alpha - 1 + z/alpha,  f2(z) = -(a-1)*alpha + z/alpha,
    f3(z) = 1 - alpha + z.
    """
    a = param.a
    inv = AlgNum.alpha_inv(param)
    if j == 1:
        return AffineMap(inv - 1, inv)
    if j == 2:
        return AffineMap(AlgNum(0, -(a - 1), 0, param), inv)
    if j == 3:
        return AffineMap(AlgNum(1, -1, 0, param), AlgNum.one(param))
    raise ValueError(f"f index must be 1, 2 or 3, got {j}")


def g_map(i: int, param: FamilyParam) -> AffineMap:
    a = param.a
    if not 0 <= i <= 2 * (a - 1):
        raise ValueError(f"g index must be in [0, {2 * (a - 1)}], got {i}")
    cube = alpha_power(3, param)  # (1, -1, a)
    if i % 2 == 1:
        k = (i - 1) // 2
        return AffineMap(AlgNum.from_int(-1, param) - cube * k, cube)
    k = i // 2
    t = AlgNum(-1, 1, 0, param) + cube * (a - 1 - k)
    return AffineMap(t, AlgNum.alpha_sq(param))


def compose(maps, param: FamilyParam) -> AffineMap:
    """Left-to-right composition: compose([m1, m2]) applies m2 first."""
    acc = identity_map(param)
    for m in maps:
        acc = AffineMap(acc.t + acc.s * m.t, acc.s * m.s)
    return acc


@dataclass(frozen=True)
class KeyPoints:
    """u, v, w plus the exact two-piece intersection points.

    even_odd[k] = g_{2k}(w) = g_{2k+1}(v) = -1 - alpha^2 - k*alpha^3 - (a-1)*alpha^4
    odd_even[k] = g_{2k+1}(u) = g_{2k+2}(v) = -1 - (k+1)*alpha^3
    both for k = 0..a-2.
    """

    u: AlgNum
    v: AlgNum
    w: AlgNum
    even_odd: tuple[AlgNum, ...]
    odd_even: tuple[AlgNum, ...]


def key_points(param: FamilyParam) -> KeyPoints:
    """Construct u, v, w and verify every gluing identity exactly."""
    a = param.a
    u = AlgNum(-1, 0, 0, param)
    v = AlgNum(-1, 1, -1, param)    # -(a-1)*alpha - 1/alpha reduced
    w = AlgNum(-2, 1, -a, param)    # -1 - alpha^3 reduced
    if v != AlgNum(0, -(a - 1), 0, param) + (-AlgNum.alpha_inv(param)):
        raise ArithmeticError("v does not reduce to -(a-1)*alpha - 1/alpha")
    if w != AlgNum.from_int(-1, param) - alpha_power(3, param):
        raise ArithmeticError("w does not reduce to -1 - alpha^3")

    cube = alpha_power(3, param)
    quart = alpha_power(4, param)
    even_odd = []
    odd_even = []
    for k in range(a - 1):
        glue1 = AlgNum(-1, 0, -1, param) - cube * k - quart * (a - 1)
        lhs1 = g_map(2 * k, param)(w)
        rhs1 = g_map(2 * k + 1, param)(v)
        if not (lhs1 == rhs1 == glue1):
            raise ArithmeticError(f"even/odd gluing identity failed at k={k} (a={a})")
        even_odd.append(glue1)

        glue2 = AlgNum.from_int(-1, param) - cube * (k + 1)
        lhs2 = g_map(2 * k + 1, param)(u)
        rhs2 = g_map(2 * (k + 1), param)(v)
        if not (lhs2 == rhs2 == glue2):
            raise ArithmeticError(f"odd/even gluing identity failed at k={k} (a={a})")
        odd_even.append(glue2)
    return KeyPoints(u, v, w, tuple(even_odd), tuple(odd_even))


def follow_allowed(prev: int, nxt: int, param: FamilyParam) -> bool:
    """Whether map digit `nxt` may follow `prev` in a code.

    Even digits below 2(a-1) restrict the argument to B', and the images of
    g_0 and g_1 fall outside B', so those digits cannot be followed by 0 or 1.
    """
    top = 2 * (param.a - 1)
    if prev % 2 == 0 and prev != top:
        return nxt not in (0, 1)
    return True


def validate_gcode(digits, param: FamilyParam) -> None:
    """Raise ValueError on an out-of-range digit or a follow-constraint violation."""
    top = 2 * (param.a - 1)
    prev = None
    for pos, b in enumerate(digits):
        if not 0 <= b <= top:
            raise ValueError(f"code digit {b} at position {pos} outside [0, {top}]")
        if prev is not None and not follow_allowed(prev, b, param):
            raise ValueError(
                f"code digit {b} at position {pos} may not follow even digit {prev}"
            )
        prev = b


def random_gcode(param: FamilyParam, length: int, rng: random.Random, first: int | None = None):
    """A uniformly chosen valid code of the given length (optionally pinned first digit)."""
    top = 2 * (param.a - 1)
    out = []
    if first is not None:
        out.append(first)
    while len(out) < length:
        if out and not follow_allowed(out[-1], 0, param):
            b = rng.randrange(2, top + 1)
        else:
            b = rng.randrange(0, top + 1)
        out.append(b)
    return tuple(out)


def code_for_u(param: FamilyParam, depth: int) -> tuple[int, ...]:
    """Code whose evaluation converges to u = -1: 0, 2(a-1) repeating."""
    top = 2 * (param.a - 1)
    return tuple((0, top)[i % 2] for i in range(depth))


def code_for_v(param: FamilyParam, depth: int) -> tuple[int, ...]:
    """Code converging to v: 2(a-1), 0 repeating."""
    top = 2 * (param.a - 1)
    return tuple((top, 0)[i % 2] for i in range(depth))


def code_for_w(param: FamilyParam, depth: int) -> tuple[int, ...]:
    """Code converging to w: 2 then the v tail."""
    return (2,) + code_for_v(param, depth - 1) if depth >= 1 else ()


@dataclass(frozen=True)
class GCodeValue:
    """Result of evaluating a finite code prefix.

    `trunc` bounds the distance to the limit of any infinite continuation;
    `err` adds the float accumulation of the numeric evaluation.
    """

    exact: AlgNum
    point: complex
    trunc: float
    err: float


@lru_cache(maxsize=64)
def _embedded_g_maps(e: Embedding) -> tuple[tuple[complex, complex], ...]:
    param = e.param
    out = []
    for i in range(2 * (param.a - 1) + 1):
        m = g_map(i, param)
        out.append((embed(m.t, e), embed(m.s, e)))
    return tuple(out)


@lru_cache(maxsize=32)
def _cached_diam_bound(a: int) -> float:
    param = FamilyParam(a)
    e = roots(param)
    maps = _embedded_g_maps(e)
    rng = random.Random(0)
    x0_num = embed(key_points(param).w, e)
    best = abs(x0_num)
    for _ in range(400):
        code = random_gcode(param, 10, rng)
        z = x0_num
        for b in reversed(code):
            t_num, s_num = maps[b]
            z = t_num + s_num * z
        best = max(best, abs(z))
    # diam <= 2 * sup |z|; double again to absorb finite-sample slack
    return 4.0 * best


def diam_bound(param: FamilyParam) -> float:
    """Safe upper bound on the diameter of the boundary piece B."""
    return _cached_diam_bound(param.a)


def eval_gcode(code, param: FamilyParam, e: Embedding, depth: int | None = None,
               x0: AlgNum | None = None) -> GCodeValue:
    """g_{b1} o ... o g_{bn}(x0), exactly and numerically.

    The numeric value is accumulated map-by-map (each map has tiny exact
    coefficients), which avoids the catastrophic cancellation an embed of the
    exact result would suffer once its coefficients grow.  The error field
    bounds |value - limit point| for codes that continue indefinitely:
    |alpha|^(2n) * diam(B) plus the float accumulation.
    """
    digits = tuple(islice(iter(code), depth)) if depth is not None else tuple(code)
    validate_gcode(digits, param)
    if x0 is None:
        x0 = AlgNum(-2, 1, -param.a, param)  # w lies in B' and is reproducible
    maps_num = _embedded_g_maps(e)
    exact = x0
    z = embed(x0, e)
    for b in reversed(digits):
        exact = g_map(b, param)(exact)
        t_num, s_num = maps_num[b]
        z = t_num + s_num * z
    am = abs(e.alpha)
    trunc = am ** (2 * len(digits)) * diam_bound(param)
    float_err = (len(digits) + 1) * 8.0 * (e.err + 2.220446049250313e-16)
    return GCodeValue(exact, z, trunc, trunc + float_err)


def piece_disjointness_witness(
    param: FamilyParam,
    e: Embedding,
    k1: int,
    k2: int,
    parity: str = "even",
    depth: int = 12,
    samples: int = 1000,
    seed: int = 0,
) -> float:
    """Minimum cross distance between two sampled same-parity pieces.

    Samples g_{2k}(B') (or g_{2k+1}(B)) through random valid codes; distinct
    same-parity pieces are disjoint, so the minimum stays bounded away from 0
    (up to truncation error).
    """
    if k1 == k2:
        raise ValueError("piece indices must differ")
    if parity not in ("even", "odd"):
        raise ValueError(f"parity must be 'even' or 'odd', got {parity!r}")
    top = 2 * (param.a - 1)
    firsts = []
    for k in (k1, k2):
        i = 2 * k + (1 if parity == "odd" else 0)
        if not 0 <= i <= top:
            raise ValueError(f"piece index {k} out of range for parity {parity}")
        firsts.append(i)

    import numpy as np

    clouds = []
    for off, first in enumerate(firsts):
        rng = random.Random((seed << 1) | off)  # disjoint seed streams per piece
        pts = np.empty(samples, dtype=complex)
        for j in range(samples):
            code = random_gcode(param, depth, rng, first=first)
            pts[j] = eval_gcode(code, param, e).point
        clouds.append(pts)
    diff = np.abs(clouds[0][:, None] - clouds[1][None, :])
    return float(diff.min())
