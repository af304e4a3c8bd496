"""Symmetric circuits for the determinant and permanent, with witnesses.

The determinant circuit follows Le Verrier's method: power-sum traces s_k
feed the coefficient recurrence p_k = (1/k)[p_{k-1}s_1 - p_{k-2}s_2 + ...
+/- s_k], and p_n is the determinant.  Matrix powers are computed by a
balanced split (M^{2r} = M^r M^r, M^{2r+1} = (M^r M^{r+1} + M^{r+1} M^r)/2)
so that the transpose map extends to a gate automorphism; a one-sided chain
M^k = M^{k-1} M would not admit one once the product gates are explicit.
Only powers up to ceil(n/2) are materialised as full matrices; higher traces
are assembled directly from pairs of half powers.

The permanent circuit symmetrises Ryser's formula over rows and columns:
PERM = (-1)^n sum_S (-1)^{|S|} prod_i sum_{j in S} x_ij, averaged with the
same expression on the transposed matrix, which yields transpose symmetry
on top of the row/column symmetry.  Over characteristic 2 the average is
unavailable and the plain row form is emitted.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .circuit import ADD, MUL, Circuit, CircuitBuilder, const, evaluate_arith, input_label
from .errors import CircuitError
from .field import QQ, Field, FieldValue
from .symmetry import (
    Matrix,
    Transpose,
    Witness,
    diagonal_sigma,
    matrix_var,
    matrix_variables,
    transpose_sigma,
)


@dataclass
class GeneratedCircuit:
    circuit: Circuit
    names: dict      # structured gate name -> gate id (aliases allowed)
    witnesses: list  # one Witness per group_generators(group) entry, same order
    group: object


def matrix_assignment(fld: Field, rows) -> dict:
    rows = [list(r) for r in rows]
    widths = {len(r) for r in rows}
    if len(widths) > 1:
        raise CircuitError(f"ragged matrix: row lengths {sorted(widths)}")
    asg = {}
    for i, row in enumerate(rows, start=1):
        for j, entry in enumerate(row, start=1):
            asg[matrix_var(i, j)] = fld.of(entry)
    return asg


def eval_on_matrix(circuit: Circuit, rows) -> FieldValue:
    return evaluate_arith(circuit, matrix_assignment(circuit.field, rows))


# ---------------------------------------------------------------------------
# Le Verrier determinant circuit


def _lv_image(name, sub, transpose):
    """Image of a structured gate name under one symmetry generator: either a
    base-index substitution (sub) or the transpose map."""

    def s(i):
        return sub.get(i, i)

    kind = name[0]
    if kind == "x":
        _, i, j = name
        return ("x", s(j), s(i)) if transpose else ("x", s(i), s(j))
    if kind == "pow":
        _, k, i, j = name
        return ("pow", k, s(j), s(i)) if transpose else ("pow", k, s(i), s(j))
    if kind == "F":
        _, m, i, a, j = name
        return ("F", m, s(j), s(a), s(i)) if transpose else ("F", m, s(i), s(a), s(j))
    if kind == "FL":
        _, m, i, a, j = name
        return ("FR", m, s(j), s(a), s(i)) if transpose else ("FL", m, s(i), s(a), s(j))
    if kind == "FR":
        _, m, i, a, j = name
        return ("FL", m, s(j), s(a), s(i)) if transpose else ("FR", m, s(i), s(a), s(j))
    if kind == "raw":
        _, m, i, j = name
        return ("raw", m, s(j), s(i)) if transpose else ("raw", m, s(i), s(j))
    if kind == "pass":
        _, r, i = name
        return ("pass", r, s(i))
    if kind == "tprod":
        _, k, a, b = name
        return ("tprod", k, s(b), s(a)) if transpose else ("tprod", k, s(a), s(b))
    # trace, p, psum, pterm, passT1, const: fixed by every generator
    return name


def leverrier_det_circuit(n: int, fld: Field = QQ, allow_positive_char: bool = False) -> GeneratedCircuit:
    """Transpose symmetric determinant circuit over a characteristic-0 field.

    Positive characteristic p > n is accepted behind an experimental flag
    (the method divides by 1..n); p <= n is rejected.
    """
    if n < 1:
        raise CircuitError("n must be positive")
    if fld.p is not None:
        if not allow_positive_char:
            raise CircuitError("Le Verrier divides by 1..n; pass allow_positive_char for p > n")
        if fld.p <= n:
            raise CircuitError(f"characteristic {fld.p} does not exceed n = {n}")

    b = CircuitBuilder(fld, matrix_variables(n))
    idx = range(1, n + 1)
    for i in idx:
        for j in idx:
            g = b.add(input_label(matrix_var(i, j)), name=("x", i, j))
            b.names[("pow", 1, i, j)] = g
    cvals = [("-1", -1), ("0", 0), ("1", 1)]
    cvals += [(f"1/{k}", Fraction(1, k)) for k in range(2, n + 1)]
    cgate = {lbl: b.add(const(fld.of(v)), name=("const", lbl)) for lbl, v in cvals}

    def pow_gate(k, i, j):
        return b.names[("pow", k, i, j)]

    def pass_gate(r, i):
        return b.ensure(ADD, [pow_gate(r, i, i)], ("pass", r, i))

    top = (n + 1) // 2  # full power matrices for 1..top
    for m in range(2, top + 1):
        if m % 2 == 0:
            r = m // 2
            for i in idx:
                for j in idx:
                    kids = []
                    for a in idx:
                        c1, c2 = pow_gate(r, i, a), pow_gate(r, a, j)
                        ch = [c1, pass_gate(r, i)] if c1 == c2 else [c1, c2]
                        kids.append(b.add(MUL, ch, name=("F", m, i, a, j)))
                    b.add(ADD, kids, name=("pow", m, i, j))
        else:
            r = m // 2
            for i in idx:
                for j in idx:
                    kids = []
                    for a in idx:
                        kids.append(b.add(MUL, [pow_gate(r, i, a), pow_gate(r + 1, a, j)],
                                          name=("FL", m, i, a, j)))
                        kids.append(b.add(MUL, [pow_gate(r + 1, i, a), pow_gate(r, a, j)],
                                          name=("FR", m, i, a, j)))
                    raw = b.add(ADD, kids, name=("raw", m, i, j))
                    b.add(MUL, [cgate["1/2"], raw], name=("pow", m, i, j))

    for k in range(1, n + 1):
        if k <= top:
            b.add(ADD, [pow_gate(k, a, a) for a in idx], name=("trace", k))
        else:
            m = k // 2
            m1, m2 = (m, m) if k % 2 == 0 else (m, m + 1)
            kids = []
            for a in idx:
                for c in idx:
                    g1, g2 = pow_gate(m1, a, c), pow_gate(m2, c, a)
                    ch = [g1, pass_gate(m1, a)] if g1 == g2 else [g1, g2]
                    kids.append(b.add(MUL, ch, name=("tprod", k, a, c)))
            b.add(ADD, kids, name=("trace", k))

    b.names[("p", 1)] = b.names[("trace", 1)]
    for k in range(2, n + 1):
        kids = []
        for j in range(1, k):
            ch = [b.names[("p", k - j)], b.names[("trace", j)]]
            if ch[0] == ch[1]:  # p_1 is the trace-1 gate; square it via a pass-through
                ch = [ch[0], b.ensure(ADD, [b.names[("trace", 1)]], ("passT1",))]
            if j % 2 == 0:
                ch.append(cgate["-1"])
            kids.append(b.add(MUL, ch, name=("pterm", k, j)))
        if k % 2 == 0:
            kids.append(b.add(MUL, [cgate["-1"], b.names[("trace", k)]], name=("pterm", k, k)))
        else:
            kids.append(b.names[("trace", k)])
        psum = b.add(ADD, kids, name=("psum", k))
        b.add(MUL, [cgate[f"1/{k}"], psum], name=("p", k))

    circuit = b.build(("p", n))

    def witness_for(sub, transpose):
        pi = {}
        for name, g in b.names.items():
            pi[g] = b.names[_lv_image(name, sub, transpose)]
        sigma = transpose_sigma(n) if transpose else diagonal_sigma(n, sub)
        return Witness(sigma, pi)

    witnesses = [witness_for({a: c, c: a}, False)
                 for a, c in itertools.combinations(idx, 2)]
    witnesses.append(witness_for({}, True))
    return GeneratedCircuit(circuit, dict(b.names), witnesses, Transpose(n))


# ---------------------------------------------------------------------------
# Ryser permanent circuit


def _ryser_image(name, row_map, col_map):
    def r(i):
        return row_map.get(i, i)

    def c(j):
        return col_map.get(j, j)

    def rset(S):
        return tuple(sorted(r(i) for i in S))

    def cset(S):
        return tuple(sorted(c(j) for j in S))

    kind = name[0]
    if kind == "x":
        _, i, j = name
        return ("x", r(i), c(j))
    if kind == "rsum":
        _, i, S = name
        return ("rsum", r(i), cset(S))
    if kind in ("rprod", "rneg"):
        return (kind, cset(name[1]))
    if kind == "csum":
        _, j, S = name
        return ("csum", c(j), rset(S))
    if kind in ("cprod", "cneg"):
        return (kind, rset(name[1]))
    return name


def ryser_perm_circuit(n: int, fld: Field = QQ) -> GeneratedCircuit:
    """Matrix symmetric permanent circuit; transpose symmetric too outside
    characteristic 2 (where the row/column average is unavailable and the
    plain row form is emitted).  Size is at most 8 * 2^n * n^2 gates.
    """
    if n < 1:
        raise CircuitError("n must be positive")
    two_sided = fld.char != 2
    b = CircuitBuilder(fld, matrix_variables(n))
    idx = range(1, n + 1)
    for i in idx:
        for j in idx:
            b.add(input_label(matrix_var(i, j)), name=("x", i, j))
    neg_one = b.add(const(fld.of(-1)), name=("const", "-1")) if two_sided else None
    subsets = [S for size in range(1, n + 1)
               for S in itertools.combinations(idx, size)]

    def term(prefix, S):
        sumname = "rsum" if prefix == "r" else "csum"
        kids = []
        for k in idx:
            if prefix == "r":
                ch = [b.names[("x", k, j)] for j in S]
            else:
                ch = [b.names[("x", i, k)] for i in S]
            kids.append(b.add(ADD, ch, name=(sumname, k, S)))
        prod = b.add(MUL, kids, name=(prefix + "prod", S))
        if two_sided and (n + len(S)) % 2 == 1:
            return b.add(MUL, [neg_one, prod], name=(prefix + "neg", S))
        return prod

    terms = [term("r", S) for S in subsets]
    if two_sided:
        terms += [term("c", S) for S in subsets]
        total = b.add(ADD, terms, name=("total",))
        half = b.add(const(fld.of(Fraction(1, 2))), name=("const", "1/2"))
        out = b.add(MUL, [half, total], name=("out",))
    else:
        out = b.add(ADD, terms, name=("total",))
        b.names[("out",)] = out
    circuit = b.build(out)

    def witness_for(row_map, col_map):
        pi = {g: b.names[_ryser_image(name, row_map, col_map)]
              for name, g in b.names.items()}
        sigma = {}
        for i in idx:
            for j in idx:
                ti, tj = row_map.get(i, i), col_map.get(j, j)
                if (ti, tj) != (i, j):
                    sigma[matrix_var(i, j)] = matrix_var(ti, tj)
        return Witness(sigma, pi)

    witnesses = [witness_for({a: c, c: a}, {}) for a, c in itertools.combinations(idx, 2)]
    witnesses += [witness_for({}, {a: c, c: a}) for a, c in itertools.combinations(idx, 2)]
    return GeneratedCircuit(circuit, dict(b.names), witnesses, Matrix(n, n))


# ---------------------------------------------------------------------------
# Brute-force oracles


def _square(fld: Field, rows) -> list:
    mat = [[fld.of(e) for e in row] for row in rows]
    if any(len(row) != len(mat) for row in mat):
        raise CircuitError("matrix is not square")
    return mat


def _perm_sign(perm) -> int:
    sign = 1
    seen = [False] * len(perm)
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        k = start
        while not seen[k]:
            seen[k] = True
            k = perm[k]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def leibniz_det(fld: Field, rows) -> FieldValue:
    mat = _square(fld, rows)
    n = len(mat)
    acc = fld.zero()
    for perm in itertools.permutations(range(n)):
        prod = fld.of(_perm_sign(perm))
        for i in range(n):
            prod = prod * mat[i][perm[i]]
        acc = acc + prod
    return acc


def leibniz_perm(fld: Field, rows) -> FieldValue:
    mat = _square(fld, rows)
    n = len(mat)
    acc = fld.zero()
    for perm in itertools.permutations(range(n)):
        prod = fld.one()
        for i in range(n):
            prod = prod * mat[i][perm[i]]
        acc = acc + prod
    return acc


def gauss_det(fld: Field, rows) -> FieldValue:
    """Determinant by exact Gaussian elimination with row pivoting."""
    mat = _square(fld, rows)
    n = len(mat)
    det = fld.one()
    for col in range(n):
        pivot = next((r for r in range(col, n) if not mat[r][col].is_zero()), None)
        if pivot is None:
            return fld.zero()
        if pivot != col:
            mat[col], mat[pivot] = mat[pivot], mat[col]
            det = -det
        det = det * mat[col][col]
        inv = mat[col][col].inverse()
        for r in range(col + 1, n):
            factor = mat[r][col] * inv
            if factor.is_zero():
                continue
            for k in range(col, n):
                mat[r][k] = mat[r][k] - factor * mat[col][k]
    return det


def det_oracle(fld: Field, rows) -> FieldValue:
    mat = _square(fld, rows)
    return leibniz_det(fld, mat) if len(mat) <= 7 else gauss_det(fld, mat)


def perm_oracle(fld: Field, rows) -> FieldValue:
    mat = _square(fld, rows)
    if len(mat) > 10:
        raise CircuitError("permanent oracle limited to n <= 10")
    return leibniz_perm(fld, mat)
