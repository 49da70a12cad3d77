"""The pair automaton recognizing equal alpha-sums of admissible digit streams.

States are exact elements A_k = alpha^(-k+2) * sum_{i<=k} (e_i - e'_i) alpha^i
of Z[alpha]; consuming a digit pair moves A -> A/alpha + (e - e')*alpha^2.
A pair of admissible streams sums to the same point iff it traces an infinite
path from 0.

The reachable closure is generated algorithmically rather than copied:

* a candidate value can lie on an infinite path only if
  |A| <= (a-1)|alpha|^3 / (1-|alpha|) + slack (the tail it must still cancel);
* each coordinate stream must stay admissible, which the construction tracks
  through a four-bit quotient of the last three digits (appending a-1 is
  forbidden exactly when the previous digit was a-1 and one of the two before
  it was nonzero);
* states without outgoing transitions and states unreachable from 0 are then
  pruned to a fixpoint.

Values are compared exactly as coefficient triples, so the numeric bound only
gates candidate generation.  Projecting the surviving product states onto
their values yields the 15-element state set of this family.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .algebra import AlgNum, Embedding, FamilyParam, embed, mul_alpha_inv, roots
from .numeration import PeriodicWord, periodic_is_admissible

DEFAULT_SLACK = 1e-9

# admissibility quotient: bit 0 = last digit == a-1, bit 1 = last >= 1,
# bit 2 = second-to-last >= 1, bit 3 = third-to-last >= 1
_INITIAL_BITS = 0


def _bits_forbidden(bits: int, e: int, a: int) -> bool:
    return e == a - 1 and (bits & 1) and (bits & 0b1100)


def _bits_next(bits: int, e: int, a: int) -> int:
    nxt = 0
    if e == a - 1:
        nxt |= 0b01
    if e >= 1:
        nxt |= 0b10
    nxt |= (bits & 0b10) << 1   # old "last >= 1" becomes "second-to-last >= 1"
    nxt |= (bits & 0b100) << 1  # old second becomes third
    return nxt


def expected_states(param: FamilyParam) -> frozenset[AlgNum]:
    """The 15-element state set of this family, as printed coefficient triples."""
    a = param.a
    half = [
        (0, 1, 0),       # alpha
        (0, 0, 1),       # alpha^2
        (0, 1, -1),      # alpha - alpha^2
        (1, 0, a - 1),   # 1 + (a-1) alpha^2
        (1, 0, a - 2),   # 1 + (a-2) alpha^2
        (1, -1, a - 1),  # 1 - alpha + (a-1) alpha^2
        (1, -2, a),      # 1 - 2 alpha + a alpha^2
    ]
    out = {AlgNum.zero(param)}
    for c0, c1, c2 in half:
        out.add(AlgNum(c0, c1, c2, param))
        out.add(AlgNum(-c0, -c1, -c2, param))
    return frozenset(out)


def labels(d: int, param: FamilyParam) -> tuple[tuple[int, int], ...]:
    """Concrete digit pairs (e, e') with e - e' == d, both in [0, a-1]."""
    a = param.a
    lo = max(0, d)
    hi = a - 1 + min(0, d)
    return tuple((e, e - d) for e in range(lo, hi + 1))


ProductState = tuple[AlgNum, int, int]


@dataclass(frozen=True)
class BoundaryAutomaton:
    """Live reachable part of the pair automaton.

    `states` and `edges` are the projection onto exact values (the published
    automaton); `product_edges` keeps the admissibility-tracking refinement
    that `run_prefix` and `verify_equality` simulate.
    """

    param: FamilyParam
    embedding: Embedding
    initial: AlgNum
    states: tuple[AlgNum, ...]
    edges: dict[AlgNum, dict[int, AlgNum]] = field(hash=False)
    product_edges: dict[ProductState, dict[tuple[int, int], ProductState]] = field(hash=False)

    @property
    def initial_product(self) -> ProductState:
        return (self.initial, _INITIAL_BITS, _INITIAL_BITS)

    def step(self, state: AlgNum, d: int) -> AlgNum | None:
        """Value-level transition (label family d), ignoring window contexts."""
        return self.edges.get(state, {}).get(d)

    def step_product(self, state: ProductState, e: int, ep: int) -> ProductState | None:
        return self.product_edges.get(state, {}).get((e, ep))

    def run_prefix(self, pairs) -> AlgNum | None:
        """Final state value after consuming (e, e') pairs, or None on rejection.

        Rejection happens at the first pair with no continuation, either
        because the value leaves the live set or because a coordinate stream
        becomes inadmissible.
        """
        a = self.param.a
        state = self.initial_product
        for e, ep in pairs:
            if not (0 <= e < a and 0 <= ep < a):
                raise ValueError(f"digit pair ({e}, {ep}) out of range [0, {a - 1}]")
            state = self.step_product(state, e, ep)
            if state is None:
                return None
        return state[0]

    def transition_triples(self) -> list[tuple[AlgNum, int, AlgNum]]:
        out = []
        for s in self.states:
            for d in sorted(self.edges[s]):
                out.append((s, d, self.edges[s][d]))
        return out


def build(
    param: FamilyParam,
    embedding: Embedding | None = None,
    slack: float = DEFAULT_SLACK,
    max_states: int = 65536,
) -> BoundaryAutomaton:
    """Closure from state 0, then liveness and reachability pruning."""
    e = embedding if embedding is not None else roots(param)
    a = param.a
    am = abs(e.alpha)
    bound = (a - 1) * am ** 3 / (1.0 - am) + slack

    zero = AlgNum.zero(param)
    alpha_sq = AlgNum.alpha_sq(param)

    # value-level candidate transitions, shared by all window contexts
    value_step: dict[tuple[AlgNum, int], AlgNum | None] = {}

    def step_value(v: AlgNum, d: int) -> AlgNum | None:
        key = (v, d)
        if key not in value_step:
            nxt = mul_alpha_inv(v) + alpha_sq * d
            value_step[key] = nxt if abs(embed(nxt, e)) <= bound else None
        return value_step[key]

    init: ProductState = (zero, _INITIAL_BITS, _INITIAL_BITS)
    edges: dict[ProductState, dict[tuple[int, int], ProductState]] = {}
    frontier = [init]
    seen = {init}
    while frontier:
        state = frontier.pop()
        v, b1, b2 = state
        out: dict[tuple[int, int], ProductState] = {}
        for eps in range(a):
            if _bits_forbidden(b1, eps, a):
                continue
            nb1 = _bits_next(b1, eps, a)
            for eps2 in range(a):
                if _bits_forbidden(b2, eps2, a):
                    continue
                nv = step_value(v, eps - eps2)
                if nv is None:
                    continue
                nxt = (nv, nb1, _bits_next(b2, eps2, a))
                out[(eps, eps2)] = nxt
                if nxt not in seen:
                    seen.add(nxt)
                    if len(seen) > max_states:
                        raise RuntimeError(
                            f"state closure exceeded {max_states} product states; "
                            "the pruning bound or the arithmetic is broken"
                        )
                    frontier.append(nxt)
        edges[state] = out

    # prune states with no outgoing edge, iterating because removals cascade
    while True:
        dead = {s for s, out in edges.items() if not out}
        if not dead:
            break
        for s in dead:
            del edges[s]
        for out in edges.values():
            for lab in [lab for lab, t in out.items() if t in dead]:
                del out[lab]

    if init not in edges:
        raise RuntimeError("initial state was pruned; automaton construction failed")

    # restrict to the part reachable from the initial state
    reach = {init}
    stack = [init]
    while stack:
        s = stack.pop()
        for t in edges[s].values():
            if t not in reach:
                reach.add(t)
                stack.append(t)
    edges = {s: out for s, out in edges.items() if s in reach}

    # project onto values
    value_edges: dict[AlgNum, dict[int, AlgNum]] = {}
    for (v, _, _), out in edges.items():
        slot = value_edges.setdefault(v, {})
        for (eps, eps2), (nv, _, _) in out.items():
            slot[eps - eps2] = nv
    states = tuple(sorted(value_edges, key=lambda x: x.coeffs()))
    return BoundaryAutomaton(param, e, zero, states, value_edges, edges)


def boundary_witness_pairs(param: FamilyParam) -> dict[str, tuple[PeriodicWord, PeriodicWord]]:
    """Equal-sum admissible stream pairs for the distinguished points.

    Each pair exhibits a point with two expansions, one of which starts below
    index 1 -- the certificate that the point lies on the fractal boundary.
    The second streams of "-1" and "-alpha" split as translate + fractal
    expansion for the lattice vectors alpha^2 - 1 and (alpha - 1)^2, realizing
    the two singleton intersections of the induced tiling.
    """
    a = param.a
    t = a - 1
    return {
        "-1": (
            PeriodicWord(2, (), (t, t, 0, 0)),
            PeriodicWord(-2, (1, 0, a - 2, t, 0, 0), (t, t, 0, 0)),
        ),
        "-alpha": (
            PeriodicWord(3, (), (t, t, 0, 0)),
            PeriodicWord(-1, (1, 0, a - 2, t, 0, 0), (t, t, 0, 0)),
        ),
        "v": (
            PeriodicWord(-3, (1, 0, t, a - 2, 0, 0, 0), (t, t, 0, 0)),
            PeriodicWord(2, (t, 0, 0), (t, t, 0, 0)),
        ),
        "w": (
            PeriodicWord(-3, (1, 0, t, a - 2, 0, 0, a - 2, t), (0, 0, t, t)),
            PeriodicWord(2, (t, a - 2), (0, 0, t, t)),
        ),
    }


def verify_equality(
    aut: BoundaryAutomaton,
    w1: PeriodicWord,
    w2: PeriodicWord,
    check_admissible: bool = True,
) -> bool:
    """Decide sum_i w1(i) alpha^i == sum_i w2(i) alpha^i for admissible streams.

    Both streams are eventually periodic, so the pair traces an infinite path
    iff the (state, phase) trajectory enters a cycle once both streams are in
    their periodic regime.
    """
    if check_admissible:
        for w in (w1, w2):
            if not periodic_is_admissible(w, aut.param):
                raise ValueError("verify_equality requires admissible streams")
    start = min(w1.start, w2.start)
    pre_end = max(w1.start + len(w1.pre), w2.start + len(w2.pre))
    p = math.lcm(max(1, len(w1.period)), max(1, len(w2.period)))
    state = aut.initial_product
    seen: set[tuple[ProductState, int]] = set()
    i = start
    while True:
        if i >= pre_end:
            key = (state, (i - pre_end) % p)
            if key in seen:
                return True
            seen.add(key)
        state = aut.step_product(state, w1.digit(i), w2.digit(i))
        if state is None:
            return False
        i += 1


def export_graph(aut: BoundaryAutomaton) -> str:
    """DOT text for the value automaton: nodes named by coefficient triple.

    Emission is fully sorted, so identical automata produce byte-identical
    output.
    """
    def node(s: AlgNum) -> str:
        return f'"({s.c0},{s.c1},{s.c2})"'

    lines = ["digraph boundary_pairs {", "  rankdir=LR;"]
    for s in aut.states:
        shape = "doublecircle" if s == aut.initial else "circle"
        lines.append(f"  {node(s)} [shape={shape}];")
    for s, d, t in aut.transition_triples():
        fam = " ".join(f"({e},{ep})" for e, ep in labels(d, aut.param))
        lines.append(f'  {node(s)} -> {node(t)} [label="d={d}: {fam}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
