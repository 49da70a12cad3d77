"""Digit words, the admissibility language, and greedy beta expansions.

A digit sequence over {0, ..., a-1} is admissible when every backward window
of four digits is lexicographically smaller than (a-1, a-1, 0, 1); positions
below the lowest stored index count as zeros.  That window is the expansion
of 1 in base beta for this family, so admissibility is exactly the greedy
(Parry) condition.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from .algebra import Embedding, FamilyParam


@dataclass(frozen=True)
class DigitWord:
    """Digits d_k, d_{k+1}, ... stored in increasing index order from `start`."""

    start: int
    digits: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.digits)

    @property
    def end(self) -> int:
        """Index one past the last stored digit."""
        return self.start + len(self.digits)

    def digit(self, i: int) -> int:
        if self.start <= i < self.end:
            return self.digits[i - self.start]
        return 0


@dataclass(frozen=True)
class PeriodicWord:
    """Eventually periodic digit stream: preperiod then a repeating block.

    An empty period means the stream is zero beyond the preperiod.
    """

    start: int
    pre: tuple[int, ...]
    period: tuple[int, ...] = ()

    def digit(self, i: int) -> int:
        if i < self.start:
            return 0
        j = i - self.start
        if j < len(self.pre):
            return self.pre[j]
        if not self.period:
            return 0
        return self.period[(j - len(self.pre)) % len(self.period)]

    def prefix(self, n: int) -> DigitWord:
        return DigitWord(self.start, tuple(self.digit(self.start + j) for j in range(n)))


def max_window(param: FamilyParam) -> tuple[int, int, int, int]:
    """The excluded lexicographic bound (a-1, a-1, 0, 1)."""
    a = param.a
    return (a - 1, a - 1, 0, 1)


def is_admissible(w: DigitWord, param: FamilyParam) -> bool:
    """True iff every 4-digit backward window is lexicographically < (a-1, a-1, 0, 1)."""
    a = param.a
    for d in w.digits:
        if not 0 <= d < a:
            raise ValueError(f"digit {d} out of range [0, {a - 1}]")
    bad = max_window(param)
    for i in range(w.start, w.end):
        if (w.digit(i), w.digit(i - 1), w.digit(i - 2), w.digit(i - 3)) >= bad:
            return False
    return True


def periodic_is_admissible(w: PeriodicWord, param: FamilyParam) -> bool:
    """Admissibility of an eventually periodic stream.

    Windows repeat once the index is three digits past the preperiod, so a
    finite check over preperiod + a few periods covers the whole stream.
    """
    p = max(1, len(w.period))
    horizon = len(w.pre) + 3 * p + 8
    return is_admissible(w.prefix(horizon), param)


def _beta_sign(c0: Fraction, c1: Fraction, c2: Fraction, a: int) -> int:
    """Exact sign of c0 + c1*beta + c2*beta^2.

    A nonzero quadratic with rational coefficients cannot vanish at the cubic
    irrationality beta, so rational interval bisection always separates the
    expression from zero.
    """
    if c0 == 0 and c1 == 0 and c2 == 0:
        return 0
    if c1 == 0 and c2 == 0:
        return 1 if c0 > 0 else -1
    lo, hi = Fraction(a - 1), Fraction(a)

    def p(x: Fraction) -> Fraction:
        return ((x - a) * x + 1) * x - 1

    for _ in range(4096):
        lo2, hi2 = lo * lo, hi * hi
        corners = (
            c0 + c1 * lo + c2 * lo2,
            c0 + c1 * hi + c2 * hi2,
            c0 + c1 * lo + c2 * hi2,
            c0 + c1 * hi + c2 * lo2,
        )
        if min(corners) > 0:
            return 1
        if max(corners) < 0:
            return -1
        mid = (lo + hi) / 2
        if p(mid) < 0:
            lo = mid
        else:
            hi = mid
    raise ArithmeticError("sign of the beta expression did not resolve")


def greedy_expand(x, e: Embedding, depth: int) -> DigitWord:
    """Greedy beta-expansion digits of x in (0, 1], indices -1 downward.

    The remainder state is kept exactly as a rational combination
    t0 + t1*beta + t2*beta^2, so digits are always the true greedy digits of
    the input: a Python real is an exact rational, and elements of Q(beta)
    can be passed as a coefficient triple over (1, beta, beta^2), e.g.
    (1, -a, 1) for 1/beta.  Digits whose floor is numerically ambiguous are
    resolved by exact sign computation and flagged with a precision warning.
    """
    a = e.param.a
    beta = e.beta
    if isinstance(x, tuple):
        t0, t1, t2 = (Fraction(c) for c in x)
    else:
        t0, t1, t2 = Fraction(x), Fraction(0), Fraction(0)
    val0 = float(t0) + float(t1) * beta + float(t2) * beta * beta
    if not -1e-9 < val0 <= 1 or _beta_sign(t0, t1, t2, a) <= 0 or _beta_sign(t0 - 1, t1, t2, a) > 0:
        raise ValueError(f"greedy expansion needs 0 < x <= 1, got {x!r}")
    digits: list[int] = []
    for _ in range(depth):
        if t0 == 0 and t1 == 0 and t2 == 0:
            digits.append(0)
            continue
        # multiply the state by beta using beta^3 = a*beta^2 - beta + 1
        t0, t1, t2 = t2, t0 - t2, t1 + a * t2
        val = float(t0) + float(t1) * beta + float(t2) * beta * beta
        d = math.floor(val)
        tol = 10.0 * e.err * (1.0 + abs(float(t1)) + 2.0 * beta * abs(float(t2))) + 1e-12
        nearest = round(val)
        if abs(val - nearest) < tol:
            # carry boundary: decide the floor exactly instead of trusting val
            s = _beta_sign(t0 - nearest, t1, t2, a)
            d = nearest if s >= 0 else nearest - 1
            if s != 0:
                warnings.warn(
                    f"digit {len(digits) + 1} of the expansion is within {tol:.2e} of a "
                    "carry boundary; resolved by exact sign",
                    stacklevel=2,
                )
        if not 0 <= d <= a - 1:
            raise ArithmeticError(f"greedy digit {d} fell outside [0, {a - 1}]")
        t0 -= d
        digits.append(d)
    return DigitWord(-depth, tuple(reversed(digits)))


@dataclass(frozen=True)
class ExpansionOfOne:
    """Expansion of 1 in base beta: preperiodic digits then a repeating block."""

    preperiod: tuple[int, ...]
    period: tuple[int, ...] = ()

    @property
    def is_finite(self) -> bool:
        return not self.period


def d_one(a: int, b: int) -> ExpansionOfOne:
    """Expansion of 1 for the cubic x^3 - a*x^2 - b*x - 1 (four-case classifier).

    This family's member is b = -1.  Valid range: -a+1 <= b <= a+1.
    """
    if a < 0:
        raise ValueError(f"need a >= 0, got {a}")
    if not -a + 1 <= b <= a + 1:
        raise ValueError(f"(a={a}, b={b}) outside the classifier range -a+1 <= b <= a+1")
    if b == -1:
        return ExpansionOfOne((a - 1, a - 1, 0, 1))
    if 0 <= b <= a:
        return ExpansionOfOne((a, b, 1))
    if b == a + 1:
        return ExpansionOfOne((a + 1, 0, 0, a, 1))
    # -a+1 <= b <= -2: preperiod then the single repeating digit a+b
    return ExpansionOfOne((a - 1, a + b - 1), (a + b,))


def _window_ok(d: int, d1: int, d2: int, d3: int, bad: tuple[int, int, int, int]) -> bool:
    return (d, d1, d2, d3) < bad


def enumerate_admissible(param: FamilyParam, n: int, start: int = 2) -> Iterator[DigitWord]:
    """All admissible words of length n at indices start..start+n-1, lex order.

    Depth-first with prefix pruning: a window only has to be checked at the
    digit that completes it, so the walk is output-linear.
    """
    if n < 1:
        raise ValueError(f"word length must be >= 1, got {n}")
    a = param.a
    bad = max_window(param)
    word = [0] * n

    def extend(pos: int) -> Iterator[DigitWord]:
        if pos == n:
            yield DigitWord(start, tuple(word))
            return
        d1 = word[pos - 1] if pos >= 1 else 0
        d2 = word[pos - 2] if pos >= 2 else 0
        d3 = word[pos - 3] if pos >= 3 else 0
        for d in range(a):
            if _window_ok(d, d1, d2, d3, bad):
                word[pos] = d
                yield from extend(pos + 1)
        word[pos] = 0

    yield from extend(0)


def admissible_count(param: FamilyParam, n: int) -> int:
    """Exact number of admissible words of length n (transfer-matrix count)."""
    if n < 0:
        raise ValueError("length must be >= 0")
    a = param.a
    bad = max_window(param)
    # state = last three digits, most recent first; initial state is zero padding
    counts: dict[tuple[int, int, int], int] = {(0, 0, 0): 1}
    for _ in range(n):
        nxt: dict[tuple[int, int, int], int] = {}
        for (d1, d2, d3), c in counts.items():
            for d in range(a):
                if _window_ok(d, d1, d2, d3, bad):
                    key = (d, d1, d2)
                    nxt[key] = nxt.get(key, 0) + c
        counts = nxt
    return sum(counts.values())


def eval_word(w: DigitWord, e: Embedding) -> complex:
    """Numerical sum of d_i * alpha^i over the word (Horner)."""
    acc = 0j
    for d in reversed(w.digits):
        acc = acc * e.alpha + d
    if w.start == 0:
        return acc
    return acc * e.alpha ** w.start
