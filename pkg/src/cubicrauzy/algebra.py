"""Exact arithmetic in Z[alpha] for the cubic family p(x) = x^3 - a*x^2 + x - 1.

beta denotes the real root > 1 of p, alpha the complex root with positive
imaginary part.  Every structural computation in this package runs on exact
integer coefficient triples (c0, c1, c2) representing c0 + c1*alpha +
c2*alpha^2; floating point enters only through `roots` and `embed`.

alpha is a unit of Z[alpha] (the constant term of p is -1), so division by
alpha is exact: alpha^(-1) = alpha^2 - a*alpha + 1.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass


class PrecisionError(ArithmeticError):
    """Root refinement failed to reach the requested error bound."""


@dataclass(frozen=True)
class FamilyParam:
    """Integer parameter a >= 2 selecting the family member."""

    a: int

    def __post_init__(self) -> None:
        if not isinstance(self.a, int) or isinstance(self.a, bool) or self.a < 2:
            raise ValueError(f"family parameter a must be an integer >= 2, got {self.a!r}")

    @property
    def r(self) -> int:
        """Mixed-radix base 2a - 1 used by the unit-interval codec."""
        return 2 * self.a - 1


@dataclass(frozen=True)
class AlgNum:
    """Element c0 + c1*alpha + c2*alpha^2 of Z[alpha].

    Coefficients are plain Python ints, so compositions of many affine maps
    stay exact no matter how large the coefficients grow.  Two elements are
    equal iff their coefficient triples (and family) agree.
    """

    c0: int
    c1: int
    c2: int
    param: FamilyParam

    @staticmethod
    def from_int(n: int, param: FamilyParam) -> AlgNum:
        return AlgNum(n, 0, 0, param)

    @staticmethod
    def zero(param: FamilyParam) -> AlgNum:
        return AlgNum(0, 0, 0, param)

    @staticmethod
    def one(param: FamilyParam) -> AlgNum:
        return AlgNum(1, 0, 0, param)

    @staticmethod
    def alpha(param: FamilyParam) -> AlgNum:
        return AlgNum(0, 1, 0, param)

    @staticmethod
    def alpha_sq(param: FamilyParam) -> AlgNum:
        return AlgNum(0, 0, 1, param)

    @staticmethod
    def alpha_inv(param: FamilyParam) -> AlgNum:
        # alpha * (alpha^2 - a*alpha + 1) = alpha^3 - a*alpha^2 + alpha = 1
        return AlgNum(1, -param.a, 1, param)

    def coeffs(self) -> tuple[int, int, int]:
        return (self.c0, self.c1, self.c2)

    @property
    def is_zero(self) -> bool:
        return self.c0 == 0 and self.c1 == 0 and self.c2 == 0

    def _same_family(self, other: AlgNum) -> None:
        if self.param != other.param:
            raise ValueError(f"family mismatch: a={self.param.a} vs a={other.param.a}")

    def __add__(self, other: AlgNum | int) -> AlgNum:
        if isinstance(other, int):
            return AlgNum(self.c0 + other, self.c1, self.c2, self.param)
        self._same_family(other)
        return AlgNum(self.c0 + other.c0, self.c1 + other.c1, self.c2 + other.c2, self.param)

    __radd__ = __add__

    def __neg__(self) -> AlgNum:
        return AlgNum(-self.c0, -self.c1, -self.c2, self.param)

    def __sub__(self, other: AlgNum | int) -> AlgNum:
        return self + (-other if isinstance(other, AlgNum) else -other)

    def __rsub__(self, other: int) -> AlgNum:
        return (-self) + other

    def __mul__(self, other: AlgNum | int) -> AlgNum:
        if isinstance(other, int):
            return AlgNum(self.c0 * other, self.c1 * other, self.c2 * other, self.param)
        self._same_family(other)
        a0, a1, a2 = self.coeffs()
        b0, b1, b2 = other.coeffs()
        return reduce(
            (a0 * b0,
             a0 * b1 + a1 * b0,
             a0 * b2 + a1 * b1 + a2 * b0,
             a1 * b2 + a2 * b1,
             a2 * b2),
            self.param,
        )

    __rmul__ = __mul__

    def __pow__(self, n: int) -> AlgNum:
        if n < 0:
            raise ValueError("negative powers are only defined for alpha (use alpha_power)")
        out = AlgNum.one(self.param)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __repr__(self) -> str:
        return f"AlgNum({self.c0}, {self.c1}, {self.c2}; a={self.param.a})"


def reduce(coeffs, param: FamilyParam) -> AlgNum:
    """Fold a coefficient vector over alpha^0..alpha^n down to degree < 3.

    Uses alpha^k = a*alpha^(k-1) - alpha^(k-2) + alpha^(k-3) repeatedly from
    the top, so the result is the exact value of the input polynomial at
    alpha.
    """
    a = param.a
    c = list(coeffs)
    for k in range(len(c) - 1, 2, -1):
        t = c[k]
        if t:
            c[k - 1] += a * t
            c[k - 2] -= t
            c[k - 3] += t
        c[k] = 0
    while len(c) < 3:
        c.append(0)
    return AlgNum(c[0], c[1], c[2], param)


def mul_alpha_inv(x: AlgNum) -> AlgNum:
    """Exact division by alpha: result * alpha == x."""
    return x * AlgNum.alpha_inv(x.param)


def alpha_power(n: int, param: FamilyParam) -> AlgNum:
    """Exact alpha^n for any integer n (negative powers via the unit inverse)."""
    if n >= 0:
        return reduce([0] * n + [1], param)
    out = AlgNum.one(param)
    inv = AlgNum.alpha_inv(param)
    for _ in range(-n):
        out = out * inv
    return out


@dataclass(frozen=True)
class Embedding:
    """Numerical roots of p: beta real > 1, alpha complex with Im > 0.

    `err` is a certified absolute error bound valid for both roots.
    """

    param: FamilyParam
    beta: float
    alpha: complex
    err: float


def _p(x, a):
    return ((x - a) * x + 1) * x - 1


def _dp(x, a):
    return (3 * x - 2 * a) * x + 1


def _residual_real(x: float, a: int) -> float:
    """|p(x)| evaluated exactly (the float x is an exact rational)."""
    from fractions import Fraction

    xf = Fraction(x)
    return abs(float(((xf - a) * xf + 1) * xf - 1))


def _residual_complex(z: complex, a: int) -> float:
    """Upper bound on |p(z)| from exact rational real/imaginary parts."""
    from fractions import Fraction

    x, y = Fraction(z.real), Fraction(z.imag)
    # z^2 and z^3 componentwise, exactly
    re2, im2 = x * x - y * y, 2 * x * y
    re3, im3 = re2 * x - im2 * y, re2 * y + im2 * x
    re = re3 - a * re2 + x - 1
    im = im3 - a * im2 + y
    return math.hypot(float(re), float(im))


def roots(param: FamilyParam, target: float = 1e-14) -> Embedding:
    """Find beta in (a-1, a) by bisection + Newton, then alpha by deflation.

    Raises PrecisionError (reporting the achieved bound) if the residual-based
    error estimate exceeds `target`.
    """
    a = param.a
    lo, hi = float(a - 1), float(a)
    # p(a-1) = -a^2 + 3a - 3 < 0 and p(a) = a - 1 > 0 for every a >= 2
    for _ in range(64):
        mid = 0.5 * (lo + hi)
        if _p(mid, a) < 0:
            lo = mid
        else:
            hi = mid
    beta = 0.5 * (lo + hi)
    for _ in range(4):
        beta -= _p(beta, a) / _dp(beta, a)
    # Newton can oscillate between adjacent floats; settle on the neighbor
    # with the smallest exact residual
    candidates = {beta}
    step = beta
    for _ in range(3):
        step = math.nextafter(step, 0.0)
        candidates.add(step)
    step = beta
    for _ in range(3):
        step = math.nextafter(step, math.inf)
        candidates.add(step)
    beta = min(candidates, key=lambda x: _residual_real(x, a))
    # Newton-style certificate with the residual computed in exact rationals,
    # doubled for the curvature of p near the simple root
    err_beta = 2.0 * _residual_real(beta, a) / abs(_dp(beta, a))

    # p(x) = (x - beta) * (x^2 + q1*x + q0)
    q1 = beta - a
    q0 = beta * q1 + 1.0
    disc = q1 * q1 - 4.0 * q0
    if disc >= 0:
        raise PrecisionError(f"deflated quadratic has real roots (a={a}); deflation failed")
    alpha = complex(-q1 / 2.0, math.sqrt(-disc) / 2.0)
    for _ in range(3):  # polish away the deflation round-off
        alpha -= _p(alpha, a) / _dp(alpha, a)
    err_alpha = 2.0 * _residual_complex(alpha, a) / abs(_dp(alpha, a))

    err = max(err_beta, err_alpha, 4.0 * 2.220446049250313e-16)
    if err > target:
        raise PrecisionError(f"achieved error {err:.3e} exceeds target {target:.3e}")

    if not (a - 1 < beta < a) or alpha.imag <= 0:
        raise PrecisionError(f"root layout check failed for a={a}")
    # product of the three roots of the monic cubic is 1
    if abs(beta * abs(alpha) ** 2 - 1.0) > 1e3 * err:
        raise PrecisionError(f"root product check failed for a={a}")
    return Embedding(param, beta, alpha, err)


def embed(x: AlgNum, e: Embedding) -> complex:
    """Numerical value c0 + c1*alpha + c2*alpha^2."""
    return x.c0 + x.c1 * e.alpha + x.c2 * (e.alpha * e.alpha)


def embed_with_err(x: AlgNum, e: Embedding) -> tuple[complex, float]:
    """embed() plus a first-order propagated error bound.

    The bound combines the root uncertainty (|d/dalpha| of the evaluation)
    with the rounding of the three-term float sum.
    """
    z = embed(x, e)
    root_part = e.err * (abs(x.c1) + 2.0 * abs(e.alpha) * abs(x.c2))
    round_part = 4.0 * 2.220446049250313e-16 * (abs(x.c0) + abs(x.c1) + abs(x.c2))
    return z, root_part + round_part
