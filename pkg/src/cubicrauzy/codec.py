"""The mixed-radix numeration of [0, 1] and the boundary parametrization.

Every t in [0, 1] expands as

    t = a_1/r + sum_{i>=2} a_i / (r^{n_i} (r-2)^{m_i}),      r = 2a - 1,

where n_i + m_i = i and at each step exactly one of n, m grows by one.  Which
one grows is a deterministic function of the previous digit, the parity of
its position, and (for the digit r-3 only) which coordinate grew at the
previous step; `_next_incr` encodes that rule table.  The digit range is
[0, r-1] on an n-step and [0, r-3] on an m-step.

The digit-wise coding `psi` turns such an expansion into a composition code
for the boundary maps, and `boundary_param_f` evaluates the resulting
parametrization f of the boundary piece B with f(0) = u and f(1) = v.
`square_param_F` glues four copies of f along the unit-square boundary into
the closed boundary curve of the fractal.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .algebra import AlgNum, Embedding, FamilyParam, embed
from .geometry import eval_gcode, f_map, key_points, validate_gcode

Entry = tuple[int, int, int]  # (digit, n, m)


def _require_codec_param(param: FamilyParam) -> None:
    if param.a < 3:
        raise ValueError(
            f"the unit-interval codec needs a >= 3 (base r-2 degenerates at a=2), got a={param.a}"
        )


def _next_incr(i: int, prev_digit: int, prev_incr: str, r: int) -> str:
    """Which coordinate ('n' or 'm') grows when digit a_i is produced, i >= 2.

    Keys on the previous digit a_{i-1}, the parity of its position i-1, and,
    for the ambiguous digit r-3, on the coordinate grown at step i-1.  The
    table for i = 2 (odd digits and r-1 go to 'n', other evens to 'm') is the
    same function with the step-1 coordinate defined as 'n'.
    """
    j = i - 1
    if prev_digit == 0:
        return "n" if j % 2 == 0 else "m"
    if prev_digit == r - 1:
        return "n" if j % 2 == 1 else "m"
    if prev_digit % 2 == 1:
        return "n"
    if prev_digit == r - 3 and prev_incr == "m":
        return "n" if j % 2 == 1 else "m"
    return "m"  # even digits 2..r-5, and r-3 reached through an n-step


def _digit_cap(incr: str, r: int) -> int:
    return r - 1 if incr == "n" else r - 3


class _RuleMachine:
    """Stateful walker producing (n_i, m_i) from the digit stream."""

    def __init__(self, r: int):
        self.r = r
        self.i = 1
        self.n = 1
        self.m = 0
        self.prev_digit: int | None = None
        self.prev_incr = "n"

    def feed(self, digit: int) -> Entry:
        if self.i == 1:
            if not 0 <= digit <= self.r - 1:
                raise ValueError(f"digit {digit} out of range [0, {self.r - 1}] at position 1")
        else:
            incr = _next_incr(self.i, self.prev_digit, self.prev_incr, self.r)
            cap = _digit_cap(incr, self.r)
            if not 0 <= digit <= cap:
                raise ValueError(
                    f"digit {digit} out of range [0, {cap}] at position {self.i}"
                )
            if incr == "n":
                self.n += 1
            else:
                self.m += 1
            self.prev_incr = incr
        self.prev_digit = digit
        entry = (digit, self.n, self.m)
        self.i += 1
        return entry

    def next_base(self) -> int:
        if self.i == 1:
            return self.r
        incr = _next_incr(self.i, self.prev_digit, self.prev_incr, self.r)
        return self.r if incr == "n" else self.r - 2


@dataclass(frozen=True)
class MixedDigits:
    """Digits with their weight exponents: entries (a_i, n_i, m_i) from i = 1.

    An optional `period` block repeats forever after the finite entries; its
    stored (n, m) are those of the first occurrence, later occurrences follow
    from the increment rules.  An empty period means zeros continue forever.
    """

    param: FamilyParam
    entries: tuple[Entry, ...]
    period: tuple[Entry, ...] = ()

    @property
    def r(self) -> int:
        return self.param.r

    def digit_at(self, i: int) -> int:
        """Digit at 1-based position i, following the period or zero fill."""
        if i < 1:
            raise IndexError(i)
        j = i - 1
        if j < len(self.entries):
            return self.entries[j][0]
        if not self.period:
            return 0
        return self.period[(j - len(self.entries)) % len(self.period)][0]

    def unroll(self, length: int) -> tuple[Entry, ...]:
        """First `length` entries with machine-derived (n, m), validating stored ones."""
        machine = _RuleMachine(self.r)
        out = []
        for i in range(1, length + 1):
            entry = machine.feed(self.digit_at(i))
            j = i - 1
            stored: Entry | None = None
            if j < len(self.entries):
                stored = self.entries[j]
            elif self.period and j < len(self.entries) + len(self.period):
                stored = self.period[j - len(self.entries)]
            if stored is not None and stored != entry:
                raise ValueError(
                    f"stored entry {stored} at position {i} disagrees with the "
                    f"base-selection rules, expected {entry}"
                )
            out.append(entry)
        return tuple(out)

    def validate(self) -> None:
        """Check digit ranges, increment structure, and period closure."""
        horizon = len(self.entries) + 3 * max(1, len(self.period)) + 2
        unrolled = self.unroll(horizon)
        if self.period:
            self._period_increments(unrolled)

    def _period_increments(self, unrolled) -> tuple[int, int]:
        """Per-repetition (dn, dm) of the periodic tail; raises if not geometric."""
        p = len(self.period)
        base = len(self.entries)
        if len(unrolled) < base + 2 * p:
            unrolled = self.unroll(base + 2 * p + 1)
        first = unrolled[base]
        second = unrolled[base + p]
        dn, dm = second[1] - first[1], second[2] - first[2]
        if dn + dm != p or dn < 0 or dm < 0:
            raise ValueError("period is not closed under the increment rules")
        for j in range(p):
            e1 = unrolled[base + j]
            e2 = unrolled[base + p + j]
            if (e2[1] - e1[1], e2[2] - e1[2]) != (dn, dm):
                raise ValueError("periodic tail does not repeat geometrically")
        return dn, dm


def entry_weight(entry: Entry, r: int) -> Fraction:
    digit, n, m = entry
    return Fraction(digit, r ** n * (r - 2) ** m)


def value(d: MixedDigits) -> Fraction:
    """Exact rational value; periodic tails are summed in closed form."""
    d.validate()
    r = d.r
    total = sum((entry_weight(e, r) for e in d.entries), Fraction(0))
    if d.period:
        unrolled = d.unroll(len(d.entries) + 2 * len(d.period) + 1)
        dn, dm = d._period_increments(unrolled)
        block = sum(
            (entry_weight(e, r) for e in unrolled[len(d.entries):len(d.entries) + len(d.period)]),
            Fraction(0),
        )
        q = Fraction(1, r ** dn * (r - 2) ** dm)
        total += block / (1 - q)
    return total


def value_float(d: MixedDigits) -> float:
    return float(value(d))


def remainder_bound(d: MixedDigits) -> Fraction:
    """Greedy remainder bound 1 / (r^{n_K} (r-2)^{m_K}) after the last entry."""
    if not d.entries:
        return Fraction(1)
    _, n, m = d.entries[-1]
    return Fraction(1, d.r ** n * (d.r - 2) ** m)


def one_expansion(param: FamilyParam) -> MixedDigits:
    """The distinguished periodic expansion of t = 1."""
    _require_codec_param(param)
    r = param.r
    return MixedDigits(
        param,
        entries=((r - 1, 1, 0),),
        period=((r - 1, 2, 0), (r - 3, 2, 1)),
    )


def expand(t, param: FamilyParam, depth: int) -> MixedDigits:
    """Greedy mixed-radix expansion of t in [0, 1] to `depth` digits.

    The input (any Python real) is converted exactly to a rational, so digits
    are exact and the remainder satisfies 0 <= c_K < r^{-n_K} (r-2)^{-m_K}.
    t = 1 returns its periodic expansion directly.
    """
    _require_codec_param(param)
    if depth < 1:
        raise ValueError("depth must be >= 1")
    tf = Fraction(t)
    if not 0 <= tf <= 1:
        raise ValueError(f"expand needs t in [0, 1], got {t!r}")
    if tf == 1:
        return one_expansion(param)
    machine = _RuleMachine(param.r)
    s = tf
    entries = []
    for _ in range(depth):
        base = machine.next_base()
        v = base * s
        digit = v.numerator // v.denominator
        s = v - digit
        entries.append(machine.feed(digit))
    return MixedDigits(param, tuple(entries))


def max_tail_digits(param: FamilyParam, k: int, a_k: int, prev_incr_at_k: str):
    """Infinite generator of the maximal-digit continuation after position k.

    Yields (digit, incr) pairs for positions k+1, k+2, ...: at each step the
    base rules fix the coordinate to grow and the digit takes its maximum
    value (r-1 on an n-step, r-3 on an m-step).  A value t whose expansion
    ends in this tail equals the value with digit a_k + 1 and zeros instead.
    """
    r = param.r
    i = k + 1
    prev_digit, prev_incr = a_k, prev_incr_at_k
    while True:
        incr = _next_incr(i, prev_digit, prev_incr, r)
        digit = _digit_cap(incr, r)
        yield digit, incr
        prev_digit, prev_incr = digit, incr
        i += 1


def equal_expansions(d1: MixedDigits, d2: MixedDigits) -> bool:
    """True iff the two expansions denote the same real number.

    Either the digit streams agree outright, or they split at one position k
    with digits a_k and a_k + 1 and the smaller side carries the maximal tail
    while the larger side carries zeros -- the four identification patterns,
    here generated uniformly from the base rules.
    """
    if d1.param != d2.param:
        raise ValueError("family mismatch")
    d1.validate()
    d2.validate()
    p1 = max(1, len(d1.period))
    p2 = max(1, len(d2.period))
    window = (
        max(len(d1.entries), len(d2.entries))
        + 2 * math.lcm(p1, p2, 2)
        + 8
    )
    u1 = d1.unroll(window)
    u2 = d2.unroll(window)
    dig1 = [e[0] for e in u1]
    dig2 = [e[0] for e in u2]
    if dig1 == dig2:
        # agreement over preperiods plus two common periods pins the streams
        return True
    k = next(i for i, (x, y) in enumerate(zip(dig1, dig2), start=1) if x != y)
    lo, hi = (u1, u2) if dig1[k - 1] < dig2[k - 1] else (u2, u1)
    lo_digits = [e[0] for e in lo]
    hi_digits = [e[0] for e in hi]
    if hi_digits[k - 1] != lo_digits[k - 1] + 1:
        return False
    if any(hi_digits[k:]):
        return False
    # reconstruct the coordinate grown at step k on the lo side
    if k == 1:
        prev_incr = "n"
    else:
        n_prev, m_prev = lo[k - 2][1], lo[k - 2][2]
        n_k, m_k = lo[k - 1][1], lo[k - 1][2]
        prev_incr = "n" if n_k == n_prev + 1 else "m"
        if (n_k - n_prev) + (m_k - m_prev) != 1:
            raise ValueError("corrupt increment history")
    gen = max_tail_digits(d1.param, k, lo_digits[k - 1], prev_incr)
    for j in range(k, window):
        expected, _ = next(gen)
        if lo_digits[j] != expected:
            return False
    return True


@dataclass(frozen=True)
class GeometricTail:
    """A finite head plus a two-entry block repeating with ratio 1/(r(r-2)).

    Explicit (n, m) per entry; the block's later occurrences advance both
    exponents by one per repetition.
    """

    param: FamilyParam
    head: tuple[Entry, ...]
    block: tuple[Entry, ...] = ()

    def value(self) -> Fraction:
        r = self.param.r
        total = sum((entry_weight(e, r) for e in self.head), Fraction(0))
        if self.block:
            block_sum = sum((entry_weight(e, r) for e in self.block), Fraction(0))
            q = Fraction(1, r * (r - 2))
            total += block_sum / (1 - q)
        return total


def tail_identity(case: int, n: int, m: int, param: FamilyParam) -> tuple[GeometricTail, GeometricTail]:
    """The four carry identities: 1/(r^n (r-2)^m) rewritten as a maximal tail.

    Returns (single-entry side, tail side); both evaluate to exactly
    r^-n (r-2)^-m.
    """
    _require_codec_param(param)
    r = param.r
    lhs = GeometricTail(param, head=((1, n, m),))
    if case == 1:
        rhs = GeometricTail(
            param,
            head=((r - 1, n + 1, m),),
            block=((r - 1, n + 2, m), (r - 3, n + 2, m + 1)),
        )
    elif case == 2:
        rhs = GeometricTail(
            param,
            head=(),
            block=((r - 1, n + 1, m), (r - 3, n + 1, m + 1)),
        )
    elif case == 3:
        rhs = GeometricTail(
            param,
            head=((r - 3, n, m + 1),),
            block=((r - 3, n, m + 2), (r - 1, n + 1, m + 2)),
        )
    elif case == 4:
        rhs = GeometricTail(
            param,
            head=(),
            block=((r - 3, n, m + 1), (r - 1, n + 1, m + 1)),
        )
    else:
        raise ValueError(f"case must be 1..4, got {case}")
    return lhs, rhs


@dataclass(frozen=True)
class PsiCode:
    """Map-composition code produced by the digit-wise coding."""

    param: FamilyParam
    digits: tuple[int, ...]


def psi(d: MixedDigits, length: int | None = None) -> PsiCode:
    """Digit-wise coding into boundary-map indices.

      b_1 = a_1,   b_{2k} = r-1 - a_{2k},
      b_{2k+1} = a_{2k+1}        if a_{2k} is 0 or odd,
      b_{2k+1} = a_{2k+1} + 2    if a_{2k} is even and nonzero.

    The output always satisfies the code follow constraint; a violation would
    mean the rule table was transcribed wrong, so it raises RuntimeError.
    """
    if length is None:
        if d.period:
            raise ValueError("length is required for a periodic expansion")
        length = len(d.entries)
    r = d.r
    unrolled = d.unroll(length)
    digits = [e[0] for e in unrolled]
    out = []
    for pos in range(1, length + 1):
        a_i = digits[pos - 1]
        if pos == 1:
            out.append(a_i)
        elif pos % 2 == 0:
            out.append(r - 1 - a_i)
        else:
            prev = digits[pos - 2]
            out.append(a_i if (prev == 0 or prev % 2 == 1) else a_i + 2)
    try:
        validate_gcode(out, d.param)
    except ValueError as exc:
        raise RuntimeError(f"psi output violated the follow constraint: {exc}") from exc
    return PsiCode(d.param, tuple(out))


def f_from_digits(d: MixedDigits, e: Embedding, depth: int) -> tuple[complex, float]:
    """Evaluate the parametrization on a given expansion (not just on a value)."""
    code = psi(d, depth)
    res = eval_gcode(code.digits, d.param, e)
    return res.point, res.err


def boundary_param_f(t, param: FamilyParam, e: Embedding, depth: int = 40) -> tuple[complex, float]:
    """f(t): the point of the boundary piece B coded by t, with error bound.

    f(0) = u = -1 and f(1) = v; the truncation error is
    |alpha|^(2*depth) * diam(B).
    """
    return f_from_digits(expand(t, param, depth), e, depth)


def square_param_F(x: float, y: float, param: FamilyParam, e: Embedding,
                   depth: int = 40, tol: float = 1e-12) -> complex:
    """The boundary homeomorphism on the unit-square boundary.

    Left edge (0, y) -> f(y); top (x, 1) -> f2(f(x)); right (1, y) -> f3(f(y));
    bottom (x, 0) -> f1(f(x)).  The exact corner identities f1(u) = u,
    f2(u) = v, f3(u) = -alpha, f1(v) = -alpha, f2(v) = f3(v) = -alpha^2 make
    the four branches agree where edges meet.
    """
    if not (-tol <= x <= 1 + tol and -tol <= y <= 1 + tol):
        raise ValueError(f"({x}, {y}) is not on the unit-square boundary")

    def f_num(t):
        return boundary_param_f(min(1.0, max(0.0, t)), param, e, depth)[0]

    def apply_f(j, z):
        m = f_map(j, param)
        return embed(m.t, e) + embed(m.s, e) * z

    if abs(x) <= tol:
        return f_num(y)
    if abs(y - 1) <= tol:
        return apply_f(2, f_num(x))
    if abs(x - 1) <= tol:
        return apply_f(3, f_num(y))
    if abs(y) <= tol:
        return apply_f(1, f_num(x))
    raise ValueError(f"({x}, {y}) is not on the unit-square boundary")


def corner_values(param: FamilyParam) -> dict[str, AlgNum]:
    """The exact images of the square corners: -1, -alpha, -alpha^2, v."""
    kp = key_points(param)
    return {
        "(0,0)": kp.u,
        "(0,1)": kp.v,
        "(1,0)": -AlgNum.alpha(param),
        "(1,1)": -AlgNum.alpha_sq(param),
    }
