"""End-to-end acceptance checks, one test per shipped guarantee.

Every check here runs exact arithmetic; there are no tolerances.  The large
complete-bipartite matching enumeration is opt-in via SYMCIRC_K33=1 because
it runs far longer than the rest of the suite combined.
"""

from __future__ import annotations

import itertools
import os
import random

import pytest

from symcirc import (
    GF,
    QQ,
    GadgetSpec,
    Graph,
    Matrix,
    Transpose,
    accepting_vectors,
    build_cfi,
    check_symmetric,
    complete_bipartite,
    complete_graph,
    cycle_graph,
    det_oracle,
    enumerate_orientations,
    enumerate_perfect_matchings,
    eval_on_matrix,
    evaluate_bool,
    expand_to_threshold,
    gadget_for_partition_function,
    gadget_input_names,
    gadget_matchings_check,
    input_label,
    leverrier_det_circuit,
    lower_to_partition_basis,
    matching_count_via_permanent,
    matching_experiment,
    minimal_support,
    orbit_preservation_check,
    orientation_odd_set_census,
    path_graph,
    perm_oracle,
    pq,
    ryser_perm_circuit,
    uniform_count_formula,
    value_sets,
    verify_automorphism,
    verify_lowering,
    wl_equivalent,
)
from symcirc.circuit import ADD, MUL, CircuitBuilder
from symcirc.symmetry import matrix_var

SEED = 1729


def seeded_matrices(n, count, lo=-9, hi=9):
    rng = random.Random(SEED + n)
    for _ in range(count):
        yield [[rng.randint(lo, hi) for _ in range(n)] for _ in range(n)]


def test_01_determinant_circuit_matches_oracles():
    """Exact determinant agreement on 100 seeded integer matrices per size."""
    for n in range(2, 7):
        gen = leverrier_det_circuit(n)
        for rows in seeded_matrices(n, 100):
            assert eval_on_matrix(gen.circuit, rows) == det_oracle(QQ, rows)
    print("PASS determinant circuit matches oracles for n = 2..6")


def test_02_determinant_symmetry_and_size():
    """Transpose-group symmetry up to n = 6 and cubic gate-count bounds."""
    for n in range(2, 7):
        gen = leverrier_det_circuit(n)
        rep = check_symmetric(gen.circuit, Transpose(n))
        assert rep.symmetric, f"n={n} not transpose symmetric"
        for w in gen.witnesses:
            assert verify_automorphism(gen.circuit, w) == []
    for n in range(2, 9):
        size = len(leverrier_det_circuit(n).circuit)
        assert size <= 10 * n ** 3, f"n={n}: {size} gates"
        if n >= 4:
            assert size >= n ** 3 // 2, f"n={n}: {size} gates"
    print("PASS determinant symmetry for n = 2..6 and size bounds for n = 2..8")


def test_03_permanent_circuit_and_symmetry():
    """Exact permanent agreement and row/column plus transpose symmetry."""
    for n in range(2, 6):
        gen = ryser_perm_circuit(n)
        for rows in seeded_matrices(n, 100):
            assert eval_on_matrix(gen.circuit, rows) == perm_oracle(QQ, rows)
        assert check_symmetric(gen.circuit, Matrix(n, n)).symmetric
        assert check_symmetric(gen.circuit, Transpose(n)).symmetric
    print("PASS permanent circuit matches oracle and symmetry checks for n = 2..5")


def test_04_supports_in_determinant_circuit():
    """Matrix-entry gates have support {i, j}; traces and coefficients none."""
    gen = leverrier_det_circuit(4)
    spec = Transpose(4)
    c = gen.circuit
    pow_names = [nm for nm in gen.names if nm[0] == "pow"]
    assert len(pow_names) == 32
    for nm in pow_names:
        _, _m, i, j = nm
        assert minimal_support(c, gen.names[nm], spec) == {i, j}, nm
    invariant = [nm for nm in gen.names
                 if nm[0] in ("trace", "p", "psum", "pterm", "passT1")]
    assert len(invariant) >= 8
    for nm in invariant:
        assert minimal_support(c, gen.names[nm], spec) == set(), nm
    print("PASS supports: {i,j} on 32 entry gates, empty on invariant gates")


def two_var(kind):
    b = CircuitBuilder(QQ, ["x", "y"])
    x = b.add(input_label("x"))
    y = b.add(input_label("y"))
    return b.build(b.add(kind, [x, y]))


def partition_gate_circuit(kind, c, parts, counts):
    from symcirc.circuit import pprod, psum

    names = {t: [f"in_{t}_{i}" for i in range(1, counts[t] + 1)] for t in parts}
    flat = [v for t in sorted(parts) for v in names[t]]
    b = CircuitBuilder(QQ, flat)
    children = [(b.add(input_label(v)), t) for t in sorted(parts) for v in names[t]]
    lab = psum(c, parts) if kind == "psum" else pprod(c, parts)
    return b.build(b.add(lab, children)), flat


def test_05_lowering_round_trips():
    """verify_lowering passes exhaustively; gadgets match partition semantics."""
    cases = [two_var(MUL), two_var(ADD), ryser_perm_circuit(2).circuit]
    modes = ["compositional", "compositional", "exact"]
    for circuit, mode in zip(cases, modes):
        vs = value_sets(circuit, mode)
        for target in (0, 1, 2):
            accept = {QQ.of(target)}
            low = lower_to_partition_basis(circuit, accept, vs)
            assert verify_lowering(circuit, accept, low.circuit)
            assert verify_lowering(circuit, accept, expand_to_threshold(low).circuit)

    # gadget truth tables against a direct partition gate, all sizes <= 4
    value_pool = [QQ.of(v) for v in (0, 1, 2, -1, "1/2")]
    part_shapes = [((0,), (1,)), ((0,), (4,)), ((1,), (3,)), ((2,), (4,)),
                   ((3,), (2,)), ((4,), (1,)), ((1, 2), (4, 4)),
                   ((2, 4), (3, 2)), ((0, 2), (2, 3)), ((3, 4), (4, 4))]
    for vidx, sizes in part_shapes:
        parts = {str(value_pool[i]): value_pool[i] for i in vidx}
        tags = sorted(parts, key=lambda t: parts[t].sort_key())
        counts = dict(zip(tags, sizes))
        for kind in ("psum", "pprod"):
            seen_targets = set()
            for vec in itertools.product(*(range(counts[t] + 1) for t in tags)):
                acc = QQ.zero() if kind == "psum" else QQ.one()
                for t, k in zip(tags, vec):
                    acc = acc + parts[t].scaled(k) if kind == "psum" \
                        else acc * parts[t].power(k)
                seen_targets.add(acc)
            for c in seen_targets:
                vecs = accepting_vectors(kind, c, parts, counts)
                spec = GadgetSpec(tuple(tags), tuple(counts[t] for t in tags), vecs)
                gadget = gadget_for_partition_function(spec)
                names = gadget_input_names(spec)
                direct, flat = partition_gate_circuit(kind, c, parts, counts)
                assert sorted(flat) == sorted(v for t in tags for v in names[t])
                for bits in itertools.product((0, 1), repeat=len(flat)):
                    asg = dict(zip(flat, bits))
                    assert evaluate_bool(gadget, asg) == evaluate_bool(direct, asg), \
                        (kind, str(c), asg)
    print("PASS lowering verified exhaustively; gadget tables match up to size 4")


def test_06_orbit_preservation():
    """Largest orbit is unchanged through both lowering stages."""
    gen = ryser_perm_circuit(2)
    rep = check_symmetric(gen.circuit, Matrix(2, 2))
    assert rep.symmetric
    vs = value_sets(gen.circuit, "exact")
    low = lower_to_partition_basis(gen.circuit, {0}, vs)
    exp = expand_to_threshold(low)
    report = orbit_preservation_check(gen.circuit, rep.witnesses, low, exp)
    assert report.equal
    assert report.orb_phi == report.orb_d == report.orb_c == 4
    print("PASS orbit preservation: ORB 4 at all three stages")


def test_07_gadget_matchings():
    """The two edge gadgets have exactly 4 and 2 perfect matchings."""
    rep = gadget_matchings_check()
    assert rep.ok
    assert rep.s_count == 4 and rep.s_match_expected
    assert rep.t_count == 2 and rep.t_match_expected
    for bits, count in rep.counts_by_bits.items():
        assert count == (4 if sum(bits) % 2 == 0 else 2)
    print("PASS gadget matchings: 4 and 2, matching the explicit lists")


def test_08_orientation_census():
    """All 64 orientations of K4 spread evenly over the 8 even vertex sets."""
    g = complete_graph(4, name="K4")
    assert sum(1 for _ in enumerate_orientations(g)) == 64
    census = orientation_odd_set_census(g)
    assert len(census) == 8
    assert all(len(s) % 2 == 0 for s in census)
    assert set(census.values()) == {8}
    print("PASS orientation census: 8 even sets, 8 orientations each")


def test_09_pq_sequences():
    """Recurrence equals direct summation; the gap is exactly 4^m."""
    assert pq(1) == (20, 16)
    for m in range(1, 11):
        assert pq(m, "recurrence") == pq(m, "direct")
    for m in range(1, 21):
        p, q = pq(m)
        assert p - q == 4 ** m
    print("PASS pq sequences: (20,16) start, modes agree, gap 4^m")


def test_10_matching_counts_k4():
    """Twisted and untwisted CFI matching counts with all cross checks."""
    g = complete_graph(4, name="K4")
    rep = matching_experiment(g, k_list=(), p_list=(2, 3, 5, 7))
    assert rep.enumerated
    assert (rep.count_x, rep.count_y) == (23680, 23552)
    assert rep.count_x - rep.count_y == 128
    assert (rep.uniform_x, rep.uniform_y) == (5248, 5120)
    assert rep.uniform_x == uniform_count_formula(g, False)
    assert rep.uniform_y == uniform_count_formula(g, True)
    assert rep.nonuniform_x == rep.nonuniform_y == 18432
    # enumeration vs inclusion-exclusion permanent: two independent algorithms
    assert rep.permanent_checked
    assert rep.checks["permanent_matches_x"]
    assert rep.checks["permanent_matches_y"]
    assert matching_count_via_permanent(build_cfi(g).graph) == 23680
    assert rep.mod[2]["x"] == rep.mod[2]["y"]
    for p in (3, 5, 7):
        assert rep.mod[p]["x"] != rep.mod[p]["y"]
    assert rep.passed()
    print("PASS matching counts: 23680 vs 23552, formulas, permanent, moduli")


def test_11_wl_equivalence():
    """CFI pair is 1- and 2-WL equivalent; six-cycle pair splits at 2."""
    g = complete_graph(4, name="K4")
    x = build_cfi(g).graph
    y = build_cfi(g, twisted=True).graph
    for k in (1, 2):
        assert wl_equivalent(x, y, k).equivalent, f"k={k}"
    c6 = cycle_graph(6)
    cc = cycle_graph(3).disjoint_union(cycle_graph(3))
    assert wl_equivalent(c6, cc, 1).equivalent
    assert not wl_equivalent(c6, cc, 2).equivalent

    # hierarchy: higher-dimension equivalence implies lower
    pairs = [(x, y), (c6, cc), (complete_graph(3), path_graph(3))]
    for g1, g2 in pairs:
        v1 = wl_equivalent(g1, g2, 1).equivalent
        v2 = wl_equivalent(g1, g2, 2).equivalent
        if v2:
            assert v1

    # shuffle soundness: random relabelings are always equivalent
    rng = random.Random(SEED)
    for trial in range(10):
        n = 8
        edges = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)
                 if rng.random() < 0.5]
        g1 = Graph(tuple(range(1, n + 1)), tuple(edges))
        perm = list(g1.vertices)
        rng.shuffle(perm)
        g2 = g1.relabel(dict(zip(g1.vertices, perm)))
        for k in (1, 2):
            assert wl_equivalent(g1, g2, k).equivalent
    print("PASS WL: CFI pair equivalent at k=1,2; cycle pair split at k=2")


def test_12_asymptotics_out_of_scope():
    """Growth-rate claims are not checked here.

    The guarantees about how gate counts and orbit sizes scale as n grows
    without bound are mathematical statements about limits; a test suite can
    only sample finitely many sizes.  The size bounds sampled up to n = 8 in
    the determinant test are the finite shadow of those claims, and nothing
    in this suite purports to verify the limits themselves.
    """
    print("PASS asymptotic claims acknowledged as out of test scope")


@pytest.mark.skipif(not os.environ.get("SYMCIRC_K33"),
                    reason="long-running enumeration; set SYMCIRC_K33=1 to run")
def test_k33_matching_counts_stretch():
    """Full matching classification over the 48-vertex bipartite CFI pair."""
    g = complete_bipartite(3, 3, name="K33")
    assert uniform_count_formula(g, False) == 372736
    assert uniform_count_formula(g, True) == 373760
    x = build_cfi(g)
    y = build_cfi(g, twisted=True)
    rx = enumerate_perfect_matchings(x, mode="classify", node_budget=10 ** 10)
    ry = enumerate_perfect_matchings(y, mode="classify", node_budget=10 ** 10)
    assert rx.uniform == 372736
    assert ry.uniform == 373760
    assert rx.nonuniform == ry.nonuniform
    assert ry.count - rx.count == 1024
    print("PASS K33 stretch: counts differ by 1024 with matching formulas")


def test_k33_formulas_always():
    """The closed-form uniform counts for the odd-edge-count base graph."""
    g = complete_bipartite(3, 3, name="K33")
    assert uniform_count_formula(g, False) == 372736
    assert uniform_count_formula(g, True) == 373760
    assert uniform_count_formula(g, True) - uniform_count_formula(g, False) == 4 ** 5
    rep = matching_experiment(g, k_list=(), p_list=(), run_enumeration=False)
    assert rep.expected_diff == 1024
    assert rep.passed()
