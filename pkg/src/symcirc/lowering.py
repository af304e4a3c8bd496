"""Lowering arithmetic circuits to Boolean threshold circuits.

The translation asks, for an arithmetic circuit Phi and a finite accepting
set B, for a Boolean circuit that accepts a 0-1 assignment exactly when
Phi evaluates into B.  It proceeds in two symmetry-preserving steps:

1. lower_to_partition_basis: one Boolean gate (v, c) per arithmetic gate v
   and candidate value c, true iff v evaluates to c.  Internal gates are
   PartitionSum / PartitionProd gates whose tagged wires group the children
   gates (u, q) by the value q they assert.
2. expand_to_threshold: each partition gate is replaced by an OR of ANDs of
   exact-threshold gates over per-part identity towers, one tower height per
   part, which computes the same function using only standard Boolean labels.

Both steps map gate names componentwise under a circuit automorphism, so
witnesses lift and orbit sizes are preserved.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .circuit import (
    ADD,
    AND,
    MUL,
    NOT,
    OR,
    Circuit,
    CircuitBuilder,
    bool_gate_values,
    const,
    evaluate_arith,
    evaluate_bool,
    input_label,
    pprod,
    psum,
    th_eq,
)
from .errors import BudgetExceededError, CircuitError
from .field import QQ, Field, FieldValue
from .symmetry import Witness, verify_automorphism, orbits

_ARITH_KINDS = ("input", "const", "add", "mul")
_VEC_BUDGET = 10 ** 6


def _sorted_vals(vals) -> tuple:
    return tuple(sorted(set(vals), key=lambda v: v.sort_key()))


@dataclass
class ValueSetMap:
    sets: dict   # gate id -> tuple of FieldValue, sorted
    exact: bool


def _require_arith(circuit: Circuit):
    for g, lab in circuit.gates.items():
        if lab.kind not in _ARITH_KINDS:
            raise CircuitError(f"gate {g}: cannot lower label {lab!r}")


def value_sets(circuit: Circuit, mode: str = "compositional", max_inputs: int = 20) -> ValueSetMap:
    """Per-gate candidate value sets over 0-1 assignments.

    exact mode enumerates all assignments (the true Q_v); compositional mode
    folds Minkowski sums / product sets over children, a superset that only
    depends on the children's sets and is therefore symmetry-invariant.
    """
    _require_arith(circuit)
    fld = circuit.field
    if mode == "exact":
        variables = sorted({lab.var for lab in circuit.gates.values() if lab.kind == "input"})
        if len(variables) > max_inputs:
            raise BudgetExceededError(f"{len(variables)} inputs exceed exact budget {max_inputs}")
        seen = {g: set() for g in circuit.gates}
        from .circuit import arith_gate_values
        for bits in itertools.product((0, 1), repeat=len(variables)):
            asg = {v: fld.of(b) for v, b in zip(variables, bits)}
            for g, val in arith_gate_values(circuit, asg).items():
                seen[g].add(val)
        return ValueSetMap({g: _sorted_vals(vs) for g, vs in seen.items()}, exact=True)
    if mode != "compositional":
        raise CircuitError(f"unknown value-set mode {mode!r}")
    sets = {}
    for g in circuit.topo_order():
        lab = circuit.gates[g]
        if lab.kind == "input":
            sets[g] = _sorted_vals((fld.zero(), fld.one()))
        elif lab.kind == "const":
            sets[g] = (lab.value,)
        else:
            unit = fld.zero() if lab.kind == "add" else fld.one()
            acc = {unit}
            for c, _t in circuit.wires[g]:
                if lab.kind == "add":
                    acc = {a + b for a in acc for b in sets[c]}
                else:
                    acc = {a * b for a in acc for b in sets[c]}
            sets[g] = _sorted_vals(acc)
    return ValueSetMap(sets, exact=False)


@dataclass
class PartitionCircuit:
    circuit: Circuit
    gate_of: dict          # (v, c) -> gate id; also ("out",) -> output
    trivial: str | None    # "const1" | "const0" | None
    values: ValueSetMap

    def lift(self, witness: Witness) -> Witness:
        """Image of a witness of the source circuit: (v, c) -> (pi(v), c)."""
        pi = {}
        for name, g in self.gate_of.items():
            if name == ("out",):
                pi[g] = g
            else:
                v, c = name
                pi[g] = self.gate_of[(witness.pi[v], c)]
        return Witness(dict(witness.sigma), pi)


def lower_to_partition_basis(circuit: Circuit, accept, values: ValueSetMap) -> PartitionCircuit:
    """Boolean circuit true iff the arithmetic circuit evaluates into accept."""
    _require_arith(circuit)
    fld = circuit.field
    accept = {fld.of(a) for a in accept}
    out_set = set(values.sets[circuit.output])
    hits = out_set & accept
    if hits == out_set or not hits:
        b = CircuitBuilder(fld, circuit.variables)
        g = b.add(const(fld.one() if hits else fld.zero()))
        kind = "const1" if hits else "const0"
        return PartitionCircuit(b.build(g), {}, kind, values)

    b = CircuitBuilder(fld, circuit.variables)
    for v in circuit.topo_order():
        lab = circuit.gates[v]
        if lab.kind == "input":
            one = b.add(input_label(lab.var), name=(v, fld.one()))
            b.add(NOT, [one], name=(v, fld.zero()))
        elif lab.kind == "const":
            b.add(const(fld.one()), name=(v, lab.value))
        elif not circuit.wires[v]:
            # childless Add/Mul: value is the fold unit, so (v, unit) is true
            unit = fld.zero() if lab.kind == "add" else fld.one()
            b.add(const(fld.one()), name=(v, unit))
        else:
            parts = {}
            for u, _t in circuit.wires[v]:
                for q in values.sets[u]:
                    parts[str(q)] = q
            kids = [(b.names[(u, q)], str(q))
                    for u, _t in circuit.wires[v]
                    for q in values.sets[u]]
            make = psum if lab.kind == "add" else pprod
            for c in values.sets[v]:
                b.add(make(c, parts), kids, name=(v, c))
    out = b.add(OR, [b.names[(circuit.output, c)]
                     for c in values.sets[circuit.output] if c in accept],
                name=("out",))
    return PartitionCircuit(b.build(out), dict(b.names), None, values)


# ---------------------------------------------------------------------------
# Partition gadgets


@dataclass(frozen=True)
class GadgetSpec:
    """A partition-symmetric Boolean function: inputs come in parts named by
    tags (given in canonical order, which fixes tower heights 1..len(tags)),
    sizes[i] inputs in part i, accepted iff the per-part count vector of true
    inputs lies in accept."""
    tags: tuple
    sizes: tuple
    accept: frozenset  # of count tuples aligned with tags

    def __post_init__(self):
        if len(self.tags) != len(self.sizes):
            raise CircuitError("tags and sizes differ in length")
        if len(set(self.tags)) != len(self.tags):
            raise CircuitError("duplicate part tags")
        if any(s < 0 for s in self.sizes):
            raise CircuitError("negative part size")
        for vec in self.accept:
            if len(vec) != len(self.tags) or any(
                    not (0 <= k <= s) for k, s in zip(vec, self.sizes)):
                raise CircuitError(f"accept vector {vec} out of range")


def gadget_input_names(spec: GadgetSpec) -> dict:
    return {t: tuple(f"in_{t}_{i}" for i in range(1, s + 1))
            for t, s in zip(spec.tags, spec.sizes)}


def gadget_for_partition_function(spec: GadgetSpec, fld: Field = QQ) -> Circuit:
    """OR over accepted vectors of AND over parts of exact-threshold gates,
    each part's inputs routed through an identity tower of that part's height.
    """
    names = gadget_input_names(spec)
    b = CircuitBuilder(fld, [n for t in spec.tags for n in names[t]])
    tops = {}
    for height, t in enumerate(spec.tags, start=1):
        part_tops = []
        for n in names[t]:
            g = b.add(input_label(n))
            for _ in range(height):
                g = b.add(AND, [g])
            part_tops.append(g)
        tops[t] = part_tops
    accs = []
    for vec in sorted(spec.accept):
        tes = [b.add(th_eq(k), tops[t]) for t, k in zip(spec.tags, vec)]
        accs.append(b.add(AND, tes))
    return b.build(b.add(OR, accs))


def accepting_vectors(kind: str, c: FieldValue, parts: dict, counts: dict) -> frozenset:
    """Count vectors over the parts realizing the sum / product equation.

    parts maps tag -> part value, counts maps tag -> number of wires; tags are
    taken in ascending part-value order, matching gadget tower heights.
    """
    fld = c.field
    tags = sorted(parts, key=lambda t: parts[t].sort_key())
    total = 1
    for t in tags:
        total *= counts[t] + 1
        if total > _VEC_BUDGET:
            raise BudgetExceededError("part-count enumeration overflow")
    good = []
    for vec in itertools.product(*(range(counts[t] + 1) for t in tags)):
        if kind == "psum":
            acc = fld.zero()
            for t, k in zip(tags, vec):
                acc = acc + parts[t].scaled(k)
        else:
            acc = fld.one()
            for t, k in zip(tags, vec):
                acc = acc * parts[t].power(k)
        if acc == c:
            good.append(vec)
    return frozenset(good)


@dataclass
class ExpandedCircuit:
    circuit: Circuit
    gate_of: dict   # ("copy", d) | ("tw", g, w, level) | ("te", g, vec, tag) | ("ac", g, vec) -> id
    source: Circuit

    def lift(self, witness: Witness) -> Witness:
        """Image of a witness of the partition circuit, gadget copies mapped
        to the gadget copies of the image gates."""
        p = witness.pi
        pi = {}
        for name, g in self.gate_of.items():
            kind = name[0]
            if kind == "copy":
                pi[g] = self.gate_of[("copy", p[name[1]])]
            elif kind == "tw":
                _, src, w, level = name
                pi[g] = self.gate_of[("tw", p[src], p[w], level)]
            elif kind == "te":
                _, src, vec, t = name
                pi[g] = self.gate_of[("te", p[src], vec, t)]
            elif kind == "ac":
                _, src, vec = name
                pi[g] = self.gate_of[("ac", p[src], vec)]
            else:
                pi[g] = self.gate_of[("d", p[name[1]])]
        return Witness(dict(witness.sigma), pi)


def expand_to_threshold(lowered: PartitionCircuit) -> ExpandedCircuit:
    """Replace every partition gate with its threshold gadget."""
    src = lowered.circuit
    b = CircuitBuilder(src.field, src.variables)
    gate_of = {}

    def image(d):
        # the gate standing for source gate d: its copy, or its gadget OR
        return gate_of[("copy", d)] if ("copy", d) in gate_of else gate_of[("d", d)]

    for g in src.topo_order():
        lab = src.gates[g]
        if lab.kind not in ("psum", "pprod"):
            kids = [(image(c), t) for c, t in src.wires[g]]
            gate_of[("copy", g)] = b.add(lab, kids)
            continue
        parts = lab.parts_map()
        tags = sorted(parts, key=lambda t: parts[t].sort_key())
        height = {t: i for i, t in enumerate(tags, start=1)}
        by_tag = {t: [] for t in tags}
        for w, t in src.wires[g]:
            top = image(w)
            for level in range(1, height[t] + 1):
                top = b.add(AND, [top])
                gate_of[("tw", g, w, level)] = top
            by_tag[t].append(top)
        counts = {t: len(by_tag[t]) for t in tags}
        vecs = accepting_vectors(lab.kind, lab.c, parts, counts)
        accs = []
        for vec in sorted(vecs):
            tes = []
            for t, k in zip(tags, vec):
                te = b.add(th_eq(k), by_tag[t])
                gate_of[("te", g, vec, t)] = te
                tes.append(te)
            ac = b.add(AND, tes)
            gate_of[("ac", g, vec)] = ac
            accs.append(ac)
        gate_of[("d", g)] = b.add(OR, accs)
    out = image(src.output)
    return ExpandedCircuit(b.build(out), gate_of, src)


# ---------------------------------------------------------------------------
# Checks


def verify_lowering(circuit: Circuit, accept, lowered_circuit: Circuit,
                    max_inputs: int = 20) -> bool:
    """True iff on every 0-1 assignment the Boolean circuit accepts exactly
    when the arithmetic circuit evaluates into accept."""
    _require_arith(circuit)
    fld = circuit.field
    accept = {fld.of(a) for a in accept}
    variables = sorted({lab.var for lab in circuit.gates.values() if lab.kind == "input"})
    if len(variables) > max_inputs:
        raise BudgetExceededError(f"{len(variables)} inputs exceed budget {max_inputs}")
    for bits in itertools.product((0, 1), repeat=len(variables)):
        arith = evaluate_arith(circuit, {v: fld.of(x) for v, x in zip(variables, bits)})
        got = evaluate_bool(lowered_circuit, dict(zip(variables, bits)))
        if got != int(arith in accept):
            return False
    return True


@dataclass
class OrbitPreservationReport:
    orb_phi: int
    orb_d: int
    orb_c: int
    equal: bool


def orbit_preservation_check(circuit: Circuit, witnesses,
                             lowered: PartitionCircuit,
                             expanded: ExpandedCircuit) -> OrbitPreservationReport:
    """Lift witnesses through both passes and compare max orbit sizes."""
    if lowered.trivial is not None:
        raise CircuitError("orbit check needs a non-trivial lowering")
    lifted_d = []
    for w in witnesses:
        probs = verify_automorphism(circuit, w)
        if probs:
            raise CircuitError(f"invalid witness: {probs[0]}")
        lifted_d.append(lowered.lift(w))
    lifted_c = [expanded.lift(w) for w in lifted_d]
    orb_phi = orbits(circuit, witnesses).max_orbit
    orb_d = orbits(lowered.circuit, lifted_d).max_orbit
    orb_c = orbits(expanded.circuit, lifted_c).max_orbit
    return OrbitPreservationReport(orb_phi, orb_d, orb_c,
                                   orb_phi == orb_d == orb_c)
