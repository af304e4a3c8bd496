"""Circuit automorphisms: extension search, symmetry checks, orbits, supports."""

from __future__ import annotations

import pytest

from symcirc import (
    ADD,
    MUL,
    QQ,
    CircuitBuilder,
    Matrix,
    Partition,
    Square,
    Transpose,
    Witness,
    check_symmetric,
    const,
    find_extension,
    group_generators,
    input_label,
    is_support,
    minimal_support,
    orbits,
    verify_automorphism,
)
from symcirc.symmetry import (
    apply_sigma,
    bad_pairs,
    col_sigma,
    compose_sigma,
    diagonal_sigma,
    invert_sigma,
    matrix_var,
    matrix_variables,
    row_sigma,
    transpose_sigma,
)


def perm2_circuit():
    """x11*x22 + x12*x21 over a 2x2 variable matrix."""
    b = CircuitBuilder(QQ, matrix_variables(2))
    for i in (1, 2):
        for j in (1, 2):
            b.add(input_label(matrix_var(i, j)), name=("x", i, j))
    m1 = b.add(MUL, [b[("x", 1, 1)], b[("x", 2, 2)]], name="m1")
    m2 = b.add(MUL, [b[("x", 1, 2)], b[("x", 2, 1)]], name="m2")
    out = b.add(ADD, [m1, m2], name="out")
    return b.build(out), dict(b.names)


def det2_circuit():
    """x11*x22 - x12*x21."""
    b = CircuitBuilder(QQ, matrix_variables(2))
    for i in (1, 2):
        for j in (1, 2):
            b.add(input_label(matrix_var(i, j)), name=("x", i, j))
    m1 = b.add(MUL, [b[("x", 1, 1)], b[("x", 2, 2)]], name="m1")
    m2 = b.add(MUL, [b[("x", 1, 2)], b[("x", 2, 1)]], name="m2")
    neg = b.add(MUL, [b.add(const(QQ.of(-1))), m2], name="neg")
    out = b.add(ADD, [m1, neg], name="out")
    return b.build(out), dict(b.names)


def test_sigma_builders():
    # fixed points are omitted from sigma dicts
    s = diagonal_sigma(2, {1: 2, 2: 1})
    assert s["x_1_2"] == "x_2_1"
    r = row_sigma(2, 2, {1: 2, 2: 1})
    assert r["x_1_2"] == "x_2_2"
    assert r["x_2_1"] == "x_1_1"
    c = col_sigma(2, 2, {1: 2, 2: 1})
    assert c["x_1_2"] == "x_1_1"
    t = transpose_sigma(2)
    assert t["x_1_2"] == "x_2_1"
    assert "x_1_1" not in t


def test_sigma_compose_invert():
    r = row_sigma(2, 2, {1: 2, 2: 1})
    rr = compose_sigma(r, r)
    for v in matrix_variables(2):
        assert apply_sigma(rr, v) == v
    assert invert_sigma(r) == r


def test_generator_counts():
    assert len(group_generators(Square(3))) == 3
    assert len(group_generators(Matrix(2, 3))) == 1 + 3
    assert len(group_generators(Transpose(2))) == 1 + 1
    assert len(group_generators(Partition((("u", "v"), ("w",))))) == 1


def test_find_extension_on_symmetric_circuit():
    c, names = perm2_circuit()
    sigma = row_sigma(2, 2, {1: 2, 2: 1})
    pi = find_extension(c, sigma)
    assert pi is not None
    # row swap exchanges the two product gates and fixes the output
    assert pi[names["m1"]] == names["m2"]
    assert pi[names["out"]] == names["out"]
    assert verify_automorphism(c, Witness(sigma, pi)) == []


def test_find_extension_respects_fix():
    c, names = perm2_circuit()
    sigma = row_sigma(2, 2, {1: 2, 2: 1})
    assert find_extension(c, sigma, fix=names["out"]) is not None
    assert find_extension(c, sigma, fix=names["m1"]) is None


def test_find_extension_missing_input_target():
    b = CircuitBuilder(QQ, matrix_variables(2))
    x = b.add(input_label(matrix_var(1, 1)))
    c = b.build(x)
    sigma = diagonal_sigma(2, {1: 2, 2: 1})
    assert find_extension(c, sigma) is None


def test_verify_automorphism_flags_bad_witness():
    c, names = perm2_circuit()
    sigma = row_sigma(2, 2, {1: 2, 2: 1})
    ident = {g: g for g in c.gates}
    assert verify_automorphism(c, Witness(sigma, ident)) != []


def test_check_symmetric_permanent():
    c, _ = perm2_circuit()
    rep = check_symmetric(c, Matrix(2, 2))
    assert rep.symmetric
    assert len(rep.witnesses) == 2
    for w in rep.witnesses:
        assert verify_automorphism(c, w) == []


def test_check_symmetric_determinant_fails_row_swap():
    c, _ = det2_circuit()
    rep = check_symmetric(c, Matrix(2, 2))
    assert not rep.symmetric
    assert rep.failed


def test_check_symmetric_determinant_transpose():
    c, _ = det2_circuit()
    rep = check_symmetric(c, Transpose(2))
    assert rep.symmetric


def test_partition_spec_on_plain_variables():
    b = CircuitBuilder(QQ, ["u", "v", "w"])
    u = b.add(input_label("u"))
    v = b.add(input_label("v"))
    w = b.add(input_label("w"))
    c = b.build(b.add(ADD, [u, v, w]))
    assert check_symmetric(c, Partition((("u", "v", "w"),))).symmetric

    b = CircuitBuilder(QQ, ["u", "v"])
    u = b.add(input_label("u"))
    v = b.add(input_label("v"))
    sq = b.add(MUL, [(v, "l"), (v, "r")])
    c = b.build(b.add(ADD, [u, sq]))
    assert not check_symmetric(c, Partition((("u", "v"),))).symmetric


def test_witness_compose_inverse():
    c, _ = perm2_circuit()
    rep = check_symmetric(c, Matrix(2, 2))
    w = rep.witnesses[0]
    wi = w.compose(w.inverse())
    assert verify_automorphism(c, wi) == []
    assert all(g == h for g, h in wi.pi.items())


def test_orbits_of_permanent():
    c, names = perm2_circuit()
    rep = check_symmetric(c, Matrix(2, 2))
    orb = orbits(c, rep.witnesses)
    assert orb.max_orbit == 4
    assert sorted(len(o) for o in orb.orbits) == [1, 2, 4]
    assert set(orb.orbit_of(names["m1"])) == {names["m1"], names["m2"]}


def test_orbits_rejects_invalid_witness():
    c, names = perm2_circuit()
    sigma = row_sigma(2, 2, {1: 2, 2: 1})
    bad = Witness(sigma, {g: g for g in c.gates})
    with pytest.raises(Exception):
        orbits(c, [bad])


def full_matrix_sum(n):
    b = CircuitBuilder(QQ, matrix_variables(n))
    ins = []
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            ins.append(b.add(input_label(matrix_var(i, j)), name=("x", i, j)))
    out = b.add(ADD, ins, name="out")
    return b.build(out), dict(b.names)


def test_support_of_input_gate():
    c, names = full_matrix_sum(3)
    g = names[("x", 1, 2)]
    spec = Square(3)
    assert is_support(c, g, {1, 2}, spec)
    assert is_support(c, g, {1, 2, 3}, spec)
    assert not is_support(c, g, {1}, spec)
    assert not is_support(c, g, set(), spec)


def test_bad_pairs_and_minimal_support():
    c, names = full_matrix_sum(3)
    g = names[("x", 1, 2)]
    spec = Square(3)
    bad = bad_pairs(c, g, spec)
    assert set(bad) == {(1, 2), (1, 3), (2, 3)}
    assert minimal_support(c, g, spec) == {1, 2}
    # the symmetric sum itself needs no points at all
    assert minimal_support(c, names["out"], spec) == set()


def test_support_points_for_matrix_spec():
    # 3x3 makes the cover unique: only row 1 and column 2 hit every bad pair
    c, names = full_matrix_sum(3)
    g = names[("x", 1, 2)]
    spec = Matrix(3, 3)
    assert minimal_support(c, g, spec) == {("r", 1), ("c", 2)}
    assert is_support(c, g, {("r", 1), ("c", 2)}, spec)


def test_support_rejects_partition_spec():
    c, names = full_matrix_sum(2)
    with pytest.raises(TypeError):
        is_support(c, names["out"], set(), Partition((("x_1_1",),)))
