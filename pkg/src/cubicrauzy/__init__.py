"""Rauzy fractals of the cubic family x^3 - a*x^2 + x - 1.

Exact arithmetic in Z[alpha], the admissibility language, the boundary pair
automaton, the graph-directed decomposition of the boundary piece, the
mixed-radix numeration of [0, 1] that parametrizes it, and renderers.
"""

__version__ = "0.1.0"

from .algebra import (
    AlgNum,
    Embedding,
    FamilyParam,
    PrecisionError,
    alpha_power,
    embed,
    embed_with_err,
    mul_alpha_inv,
    reduce,
    roots,
)
from .automaton import (
    BoundaryAutomaton,
    boundary_witness_pairs,
    build,
    expected_states,
    export_graph,
    labels,
    verify_equality,
)
from .codec import (
    GeometricTail,
    MixedDigits,
    PsiCode,
    boundary_param_f,
    equal_expansions,
    expand,
    f_from_digits,
    one_expansion,
    psi,
    square_param_F,
    tail_identity,
    value,
)
from .geometry import (
    AffineMap,
    GCodeValue,
    KeyPoints,
    compose,
    diam_bound,
    eval_gcode,
    f_map,
    g_map,
    key_points,
    piece_disjointness_witness,
    validate_gcode,
)
from .numeration import (
    DigitWord,
    ExpansionOfOne,
    PeriodicWord,
    admissible_count,
    d_one,
    enumerate_admissible,
    eval_word,
    greedy_expand,
    is_admissible,
    periodic_is_admissible,
)
from .render import (
    Lattice,
    PointCloud,
    Tiling,
    area_estimate,
    boundary_points,
    export,
    points_of_R,
    tiling,
)
