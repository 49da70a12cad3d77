"""Command-line interface: renders, expansions, the automaton, verification.

Exit codes: 0 ok, 2 usage error, 3 verification failure, 4 I/O failure.
"""
from __future__ import annotations

import argparse
import json
import os
import random
import sys
from fractions import Fraction

from . import __version__
from .algebra import AlgNum, FamilyParam, embed, roots
from .automaton import (
    boundary_witness_pairs,
    build,
    expected_states,
    export_graph,
    verify_equality,
)
from .codec import (
    boundary_param_f,
    equal_expansions,
    expand,
    f_from_digits,
    one_expansion,
    psi,
    tail_identity,
    value,
)
from .geometry import (
    code_for_u,
    code_for_v,
    code_for_w,
    diam_bound,
    eval_gcode,
    f_map,
    key_points,
    piece_disjointness_witness,
)
from .numeration import (
    DigitWord,
    PeriodicWord,
    admissible_count,
    d_one,
    enumerate_admissible,
    greedy_expand,
    is_admissible,
)
from .render import (
    Lattice,
    area_estimate,
    boundary_points,
    export,
    points_of_R,
    tiling,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_VERIFY = 3
EXIT_IO = 4


def _default_threads() -> int:
    return max(1, os.cpu_count() or 1)


# ---------------------------------------------------------------------------
# verification suite

def run_checks(a: int, level: str = "quick", seed: int = 0) -> list[dict]:
    """The verification suite: exact identities plus sampled properties.

    Returns one record per check: {"name", "passed", "detail"}.
    """
    param = FamilyParam(a)
    e = roots(param)
    rng = random.Random(seed)
    results: list[dict] = []

    def check(name: str, fn) -> None:
        try:
            ok, detail = fn()
        except Exception as exc:  # a crashed check is a failed check
            ok, detail = False, f"exception: {exc!r}"
        results.append({"name": name, "passed": bool(ok), "detail": detail})

    def state_set():
        aut = build(param, e)
        want = expected_states(param)
        got = frozenset(aut.states)
        return got == want, f"{len(got)} live reachable states"

    def corner_identities():
        kp = key_points(param)
        f1, f2, f3 = (f_map(j, param) for j in (1, 2, 3))
        ma = -AlgNum.alpha(param)
        ma2 = -AlgNum.alpha_sq(param)
        ok = (
            f1(kp.u) == kp.u and f2(kp.u) == kp.v and f3(kp.u) == ma
            and f1(kp.v) == ma and f2(kp.v) == ma2 and f3(kp.v) == ma2
        )
        return ok, "six exact edge-map corner identities"

    def gluing_identities():
        key_points(param)  # raises on any failed identity
        return True, f"{2 * (a - 1)} two-piece intersection identities, exact"

    def endpoint_identities():
        z0, err0 = boundary_param_f(0.0, param, e, depth=40)
        z1, err1 = boundary_param_f(1.0, param, e, depth=40)
        v_num = embed(AlgNum(-1, 1, -1, param), e)
        ok = abs(z0 - (-1)) <= max(err0, 1e-9) and abs(z1 - v_num) <= max(err1, 1e-9)
        return ok, f"|f(0)+1| = {abs(z0 + 1):.2e}, |f(1)-v| = {abs(z1 - v_num):.2e}"

    def tail_identities():
        for case in (1, 2, 3, 4):
            for (n, m) in ((1, 0), (2, 1), (3, 2)):
                lhs, rhs = tail_identity(case, n, m, param)
                if lhs.value() != rhs.value():
                    return False, f"case {case} failed at (n,m)=({n},{m})"
        return True, "four carry identities, exact rationals"

    def codec_roundtrip():
        worst = 0.0
        for _ in range(100):
            t = Fraction(rng.randrange(0, 10**9), 10**9)
            d = expand(t, param, depth=25)
            err = abs(value(d) - t)
            bound = Fraction(1, param.r ** d.entries[-1][1] * (param.r - 2) ** d.entries[-1][2])
            worst = max(worst, float(err / bound) if bound else 0.0)
            if err >= bound:
                return False, f"round-trip residual {err} >= bound {bound} at t={t}"
        one = one_expansion(param)
        if value(one) != 1:
            return False, "periodic expansion of 1 does not sum to 1"
        return True, f"100 random round-trips; worst residual/bound = {worst:.3f}"

    def classifier_rows():
        got = (
            d_one(a, -1).preperiod == (a - 1, a - 1, 0, 1)
            and d_one(a, 0).preperiod == (a, 0, 1)
            and d_one(a, a + 1).preperiod == (a + 1, 0, 0, a, 1)
            and (a < 3 or d_one(a, -2) .period == (a - 2,))
        )
        expansion = greedy_expand(1, e, 12)
        digits = tuple(reversed(expansion.digits))
        want = (a - 1, a - 1, 0, 1) + (0,) * 8
        return got and digits == want, "four classifier rows + greedy expansion of 1"

    def automaton_witnesses():
        aut = build(param, e)
        for name, (w1, w2) in boundary_witness_pairs(param).items():
            z1 = sum(w1.digit(i) * e.alpha ** i for i in range(w1.start, 40))
            z2 = sum(w2.digit(i) * e.alpha ** i for i in range(w2.start, 40))
            if abs(z1 - z2) > 1e-8:
                return False, f"witness pair for {name} does not agree numerically"
            if not verify_equality(aut, w1, w2):
                return False, f"witness pair for {name} rejected"
        return True, "equal-sum witness pairs for -1, -alpha, v, w accepted"

    def fixed_points():
        from .geometry import compose, g_map
        kp = key_points(param)
        top = 2 * (a - 1)
        m_u = compose([g_map(0, param), g_map(top, param)], param)
        m_v = compose([g_map(top, param), g_map(0, param)], param)
        ok = m_u(kp.u) == kp.u and m_v(kp.v) == kp.v and g_map(2, param)(kp.v) == kp.w
        return ok, "u, v are exact fixed points; w = g_2(v)"

    def psi_constraint():
        for _ in range(300):
            t = Fraction(rng.randrange(0, 10**6), 10**6)
            psi(expand(t, param, depth=20))  # raises on violation
        return True, "300 random expansions coded without follow violations"

    checks = [
        ("state-set reconstruction", state_set),
        ("corner identities", corner_identities),
        ("piece gluing identities", gluing_identities),
        ("map fixed points", fixed_points),
        ("parametrization endpoints", endpoint_identities),
        ("carry tail identities", tail_identities),
        ("codec round-trip", codec_roundtrip),
        ("expansion-of-1 classifier", classifier_rows),
        ("boundary witness pairs", automaton_witnesses),
        ("coding follow constraint", psi_constraint),
    ]

    if level == "full":
        def enumeration_crosscheck():
            n = 8 if a <= 4 else 6
            brute = [
                w.digits
                for w in _all_words(param, n)
                if is_admissible(DigitWord(2, w.digits), param)
            ]
            fast = [w.digits for w in enumerate_admissible(param, n)]
            counted = admissible_count(param, n)
            ok = brute == fast and len(fast) == counted
            return ok, f"{len(fast)} admissible words of length {n} cross-checked"

        def identified_pairs():
            pairs = _identified_pair_samples(param, rng, 50)
            worst = 0.0
            for d_max, d_zero in pairs:
                if not equal_expansions(d_max, d_zero):
                    return False, "constructed identified pair not recognized"
                z1, e1 = f_from_digits(d_max, e, 30)
                z2, e2 = f_from_digits(d_zero, e, 30)
                if abs(z1 - z2) > e1 + e2:
                    return False, f"identified pair images differ by {abs(z1 - z2):.2e}"
                worst = max(worst, abs(z1 - z2))
            return True, f"{len(pairs)} identified pairs map together (worst {worst:.2e})"

        def disjoint_pieces():
            if a < 4:
                k1, k2 = 0, 1
            else:
                k1, k2 = 0, 2
            dist = piece_disjointness_witness(param, e, k1, k2, "even",
                                              depth=12, samples=200, seed=seed)
            floor_dist = 10 * abs(e.alpha) ** 24 * diam_bound(param)
            return dist > max(floor_dist, 1e-3), f"min cross distance {dist:.4f}"

        def area_sanity():
            lat = Lattice.for_family(param, e)
            cloud = points_of_R(param, e, depth=12, cap=400_000, seed=seed)
            h = lat.covolume ** 0.5 / 150
            est = area_estimate(cloud, h)
            rel = abs(est - lat.covolume) / lat.covolume
            return rel < 0.08, f"area {est:.4f} vs covolume {lat.covolume:.4f} ({rel:.1%})"

        checks += [
            ("admissible enumeration cross-check", enumeration_crosscheck),
            ("identified-pair well-definedness", identified_pairs),
            ("same-parity piece separation", disjoint_pieces),
            ("tiling area sanity", area_sanity),
        ]

    for name, fn in checks:
        check(name, fn)
    return results


def _all_words(param: FamilyParam, n: int):
    """Every word over [0, a-1]^n, admissible or not (brute-force oracle)."""
    a = param.a
    word = [0] * n
    while True:
        yield DigitWord(2, tuple(word))
        pos = n - 1
        while pos >= 0 and word[pos] == a - 1:
            word[pos] = 0
            pos -= 1
        if pos < 0:
            return
        word[pos] += 1


def _identified_pair_samples(param: FamilyParam, rng: random.Random, count: int):
    """Pairs (maximal-tail expansion, bumped-digit-plus-zeros expansion) of equal value."""
    from .codec import MixedDigits, max_tail_digits, _RuleMachine

    r = param.r
    out = []
    while len(out) < count:
        k = rng.randrange(1, 9)
        machine = _RuleMachine(r)
        prefix = []
        for _ in range(k):
            base = machine.next_base()
            cap = base - 1
            prefix.append(machine.feed(rng.randrange(0, cap)))  # leave room for +1
        a_k, n_k, m_k = prefix[-1]
        prev_incr = "n" if k == 1 else (
            "n" if k >= 2 and prefix[-1][1] == prefix[-2][1] + 1 else "m"
        )
        gen = max_tail_digits(param, k, a_k, prev_incr)
        mach2 = _RuleMachine(r)
        for ent in prefix:
            mach2.feed(ent[0])
        head = list(prefix)
        for _ in range(2):  # the maximal tail is two-periodic after two entries
            digit, _ = next(gen)
            head.append(mach2.feed(digit))
        block = []
        for _ in range(2):
            digit, _ = next(gen)
            block.append(mach2.feed(digit))
        d_max = MixedDigits(param, tuple(head), tuple(block))
        mach3 = _RuleMachine(r)
        bumped = []
        for ent in prefix[:-1]:
            bumped.append(mach3.feed(ent[0]))
        bumped.append(mach3.feed(a_k + 1))
        for _ in range(8):
            bumped.append(mach3.feed(0))
        d_zero = MixedDigits(param, tuple(bumped))
        if value(d_max) != value(d_zero):
            continue  # prefix whose maximal tail is not 2-periodic from the start
        out.append((d_max, d_zero))
    return out


# ---------------------------------------------------------------------------
# subcommands

def _cmd_automaton(args) -> int:
    param = FamilyParam(args.a)
    aut = build(param)
    want = expected_states(param)
    got = frozenset(aut.states)
    matches = got == want
    payload = {"a": args.a, "states": len(aut.states), "matches_expected_set": matches}
    if args.json:
        print(json.dumps(payload, sort_keys=True))
    else:
        print(f"states: {len(aut.states)}, matches expected state set: {str(matches).lower()}")
    if args.format is not None or args.out:
        fmt = args.format or "dot"
        if fmt == "dot":
            text = export_graph(aut)
        else:
            doc = {
                "a": args.a,
                "states": [s.coeffs() for s in aut.states],
                "transitions": [
                    {"from": s.coeffs(), "d": d, "to": t.coeffs()}
                    for s, d, t in aut.transition_triples()
                ],
            }
            text = json.dumps(doc, sort_keys=True) + "\n"
        if args.out:
            with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    return EXIT_OK if matches else EXIT_VERIFY


def _cmd_render(args) -> int:
    param = FamilyParam(args.a)
    e = roots(param)
    cloud = points_of_R(param, e, args.depth, seed=args.seed, threads=args.threads)
    export(cloud, args.out, args.format)
    if args.json:
        print(json.dumps({"a": args.a, "points": len(cloud), "out": args.out}, sort_keys=True))
    else:
        print(f"wrote {len(cloud)} points to {args.out}")
    return EXIT_OK


def _cmd_boundary(args) -> int:
    param = FamilyParam(args.a)
    e = roots(param)
    cloud = boundary_points(param, e, args.samples, args.depth)
    if args.out:
        export(cloud, args.out, args.format)
    if args.json:
        corners = {
            "f(0)": embed(AlgNum(-1, 0, 0, param), e),
            "f1(f(1))": embed(-AlgNum.alpha(param), e),
        }
        print(json.dumps({
            "a": args.a,
            "points": len(cloud),
            "corners": {k: [z.real, z.imag] for k, z in corners.items()},
        }, sort_keys=True))
    else:
        print(f"boundary curve: {len(cloud)} samples at depth {args.depth}")
    return EXIT_OK


def _cmd_tiling(args) -> int:
    param = FamilyParam(args.a)
    e = roots(param)
    til = tiling(param, e, args.depth, args.K, seed=args.seed, threads=args.threads)
    if args.out:
        export(til, args.out, args.format)
    n_tiles = len(til.shifts)
    if args.json:
        print(json.dumps({"a": args.a, "tiles": n_tiles,
                          "covolume": til.lattice.covolume}, sort_keys=True))
    else:
        print(f"{n_tiles} translates, covolume {til.lattice.covolume:.6f}")
    return EXIT_OK


def _cmd_expand(args) -> int:
    param = FamilyParam(args.a)
    d = expand(args.t, param, args.depth)
    entries = d.unroll(args.depth)
    code = psi(d, args.depth)
    if args.json:
        print(json.dumps({
            "a": args.a, "t": args.t, "r": param.r,
            "digits": [list(ent) for ent in entries],
            "psi": list(code.digits),
        }, sort_keys=True))
    else:
        digits = ",".join(str(ent[0]) for ent in entries)
        print(f"digits: {digits}")
        print("(n_i, m_i):", " ".join(f"({n},{m})" for _, n, m in entries))
        print("code:", ",".join(str(b) for b in code.digits))
    return EXIT_OK


def _cmd_param(args) -> int:
    param = FamilyParam(args.a)
    e = roots(param)
    z, err = boundary_param_f(args.t, param, e, args.depth)
    if args.json:
        print(json.dumps({"a": args.a, "t": args.t,
                          "point": [z.real, z.imag], "err": err}, sort_keys=True))
    else:
        print(f"f({args.t}) = {z.real:+.12f}{z.imag:+.12f}i  (error bound {err:.2e})")
    return EXIT_OK


def _cmd_verify(args) -> int:
    results = run_checks(args.a, args.level, seed=args.seed)
    failed = [rec for rec in results if not rec["passed"]]
    if args.json:
        print(json.dumps({"a": args.a, "level": args.level,
                          "passed": not failed, "checks": results}, sort_keys=True))
    else:
        for rec in results:
            mark = "PASS" if rec["passed"] else "FAIL"
            print(f"[{mark}] {rec['name']}: {rec['detail']}")
        print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return EXIT_OK if not failed else EXIT_VERIFY


def _positive_int(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return n


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cubicrauzy",
        description="Rauzy fractals of the cubic family x^3 - a*x^2 + x - 1: "
                    "exact arithmetic, the boundary automaton, and renderers.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, need_a3=False, depth=None):
        p.add_argument("--a", type=int, required=True, metavar="A",
                       help="family parameter (>= 3 for codec-based commands, else >= 2)")
        p.add_argument("--json", action="store_true", help="machine-readable output")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--threads", type=int, default=1,
                       help=f"worker threads (default 1; this machine has {_default_threads()})")
        if depth is not None:
            p.add_argument("--depth", type=_positive_int, default=depth)
        p.set_defaults(need_a3=need_a3)

    p = sub.add_parser("automaton", help="build the boundary pair automaton")
    common(p)
    p.add_argument("--format", choices=("dot", "json"), default=None)
    p.add_argument("--out", metavar="FILE")
    p.set_defaults(fn=_cmd_automaton)

    p = sub.add_parser("render", help="point cloud of the fractal")
    common(p, depth=14)
    p.add_argument("--out", required=True, metavar="FILE")
    p.add_argument("--format", choices=("ppm", "svg", "csv", "json"), default="ppm")
    p.set_defaults(fn=_cmd_render)

    p = sub.add_parser("boundary", help="sample the boundary curve")
    common(p, need_a3=True, depth=30)
    p.add_argument("--samples", type=_positive_int, default=4000)
    p.add_argument("--out", metavar="FILE")
    p.add_argument("--format", choices=("ppm", "svg", "csv", "json"), default="csv")
    p.set_defaults(fn=_cmd_boundary)

    p = sub.add_parser("tiling", help="lattice translates of the fractal")
    common(p, depth=12)
    p.add_argument("--K", type=int, default=1, help="lattice range [-K, K]^2")
    p.add_argument("--out", metavar="FILE")
    p.add_argument("--format", choices=("ppm", "svg", "csv", "json"), default="ppm")
    p.set_defaults(fn=_cmd_tiling)

    p = sub.add_parser("expand", help="mixed-radix expansion of t in [0, 1]")
    common(p, need_a3=True, depth=20)
    p.add_argument("--t", type=float, required=True)
    p.set_defaults(fn=_cmd_expand)

    p = sub.add_parser("param", help="boundary parametrization f(t)")
    common(p, need_a3=True, depth=40)
    p.add_argument("--t", type=float, required=True)
    p.set_defaults(fn=_cmd_param)

    p = sub.add_parser("verify", help="run the verification suite")
    common(p, need_a3=True)
    p.add_argument("--level", choices=("quick", "full"), default="quick")
    p.set_defaults(fn=_cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.a < 2:
        parser.error(f"--a must be >= 2, got {args.a}")
    if getattr(args, "need_a3", False) and args.a < 3:
        parser.error(f"this subcommand requires --a >= 3, got {args.a}")
    if getattr(args, "t", None) is not None and not 0 <= args.t <= 1:
        parser.error(f"--t must lie in [0, 1], got {args.t}")
    try:
        return args.fn(args)
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
