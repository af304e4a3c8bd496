"""Circuit intermediate representation.

A circuit is a labelled DAG with unbounded fan-in and a single designated
output gate.  Wires are sets of (child, tag) pairs: a gate never lists the
same tagged child twice, so squaring a subterm requires a pass-through gate.
Tags are only meaningful on the partition-counting labels; everywhere else
they must be absent.

Two evaluation semantics share the representation: exact field evaluation
(input/const/add/mul) and Boolean evaluation (input, 0/1 constants, and/or/not,
thresholds, and the partition-counting gates used by the lowering).
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass

from .errors import CircuitError, FieldMismatchError, SchemaError
from .field import QQ, Field, FieldValue

_ARITH_KINDS = {"input", "const", "add", "mul"}
_BOOL_KINDS = {"input", "const", "and", "or", "not", "th_ge", "th_eq", "psum", "pprod"}
_KINDS = _ARITH_KINDS | _BOOL_KINDS


@dataclass(frozen=True)
class GateLabel:
    kind: str
    var: str | None = None            # input
    value: FieldValue | None = None   # const
    k: int | None = None              # th_ge / th_eq
    c: FieldValue | None = None       # psum / pprod target
    parts: tuple[tuple[str, FieldValue], ...] | None = None  # tag -> weight, sorted by tag

    def parts_map(self) -> dict:
        return dict(self.parts or ())

    def __repr__(self) -> str:
        if self.kind == "input":
            return f"input({self.var})"
        if self.kind == "const":
            return f"const({self.value})"
        if self.kind in ("th_ge", "th_eq"):
            return f"{self.kind}({self.k})"
        if self.kind in ("psum", "pprod"):
            return f"{self.kind}(c={self.c}, parts={dict(self.parts)})"
        return self.kind


def input_label(var: str) -> GateLabel:
    return GateLabel("input", var=var)


def const(value: FieldValue) -> GateLabel:
    return GateLabel("const", value=value)


ADD = GateLabel("add")
MUL = GateLabel("mul")
AND = GateLabel("and")
OR = GateLabel("or")
NOT = GateLabel("not")


def th_ge(k: int) -> GateLabel:
    if k < 0:
        raise ValueError("threshold must be >= 0")
    return GateLabel("th_ge", k=k)


def th_eq(k: int) -> GateLabel:
    if k < 0:
        raise ValueError("threshold must be >= 0")
    return GateLabel("th_eq", k=k)


def _parts_tuple(parts: dict) -> tuple:
    if not parts:
        raise ValueError("partition label needs at least one part")
    return tuple(sorted(parts.items()))


def psum(c: FieldValue, parts: dict) -> GateLabel:
    return GateLabel("psum", c=c, parts=_parts_tuple(parts))


def pprod(c: FieldValue, parts: dict) -> GateLabel:
    return GateLabel("pprod", c=c, parts=_parts_tuple(parts))


def _child_key(ch):
    cid, tag = ch
    return (cid, "" if tag is None else tag)


class Circuit:
    """Immutable labelled DAG.  Mutating after construction is not supported;
    derived adjacency and refinement data are cached on the instance."""

    def __init__(self, fld: Field, variables, gates: dict, wires: dict, output: int):
        self.field = fld
        self.variables = tuple(variables)
        self.gates = dict(gates)
        norm = {}
        for g in self.gates:
            ws = wires.get(g, ())
            seen = []
            for ch in ws:
                if isinstance(ch, int):
                    ch = (ch, None)
                seen.append((ch[0], ch[1]))
            dedup = sorted(set(seen), key=_child_key)
            if len(dedup) != len(seen):
                raise CircuitError(f"gate {g}: duplicate (child, tag) wire")
            norm[g] = tuple(dedup)
        for g in wires:
            if g not in self.gates:
                raise CircuitError(f"wires reference unknown gate {g}")
        self.wires = norm
        self.output = output
        self._parents = None
        self._topo = None
        self._colors = None
        self._inputs_by_var = None
        self._childsets = None

    def children(self, g: int):
        return self.wires[g]

    def child_set(self, g: int) -> frozenset:
        if self._childsets is None:
            self._childsets = {h: frozenset(ws) for h, ws in self.wires.items()}
        return self._childsets[g]

    def parents(self) -> dict:
        if self._parents is None:
            par = {g: [] for g in self.gates}
            for g, ws in self.wires.items():
                for c, tag in ws:
                    par[c].append((g, tag))
            self._parents = {g: tuple(sorted(ps, key=_child_key)) for g, ps in par.items()}
        return self._parents

    def topo_order(self):
        """Children-first order; raises CircuitError on a cycle."""
        if self._topo is None:
            import heapq

            indeg = {g: len(self.wires[g]) for g in self.gates}
            ready = [g for g, d in indeg.items() if d == 0]
            order = []
            parents = self.parents()
            heapq.heapify(ready)
            while ready:
                g = heapq.heappop(ready)
                order.append(g)
                for p, _tag in parents[g]:
                    indeg[p] -= 1
                    if indeg[p] == 0:
                        heapq.heappush(ready, p)
            if len(order) != len(self.gates):
                stuck = sorted(set(self.gates) - set(order))
                raise CircuitError(f"cycle through gates {stuck[:8]}")
            self._topo = tuple(order)
        return self._topo

    def inputs_by_var(self) -> dict:
        """Map variable -> its input gate; raises if a variable labels two gates."""
        if self._inputs_by_var is None:
            out = {}
            for g, lab in self.gates.items():
                if lab.kind == "input":
                    if lab.var in out:
                        raise CircuitError(f"variable {lab.var} labels gates {out[lab.var]} and {g}")
                    out[lab.var] = g
            self._inputs_by_var = out
        return self._inputs_by_var

    def __len__(self):
        return len(self.gates)


class CircuitBuilder:
    """Incremental construction with optional structured gate names."""

    def __init__(self, fld: Field, variables):
        self.field = fld
        self.variables = list(variables)
        self.gates = {}
        self.wires = {}
        self.names = {}
        self._next = 0

    def add(self, label: GateLabel, children=(), name=None) -> int:
        if name is not None and name in self.names:
            raise ValueError(f"duplicate gate name {name!r}")
        g = self._next
        self._next += 1
        self.gates[g] = label
        self.wires[g] = [(c, None) if isinstance(c, int) else c for c in children]
        if name is not None:
            self.names[name] = g
        return g

    def ensure(self, label: GateLabel, children, name) -> int:
        """add() that is idempotent per name."""
        if name in self.names:
            return self.names[name]
        return self.add(label, children, name)

    def __getitem__(self, name) -> int:
        return self.names[name]

    def __contains__(self, name) -> bool:
        return name in self.names

    def build(self, output) -> Circuit:
        out = output if isinstance(output, int) else self.names[output]
        return Circuit(self.field, self.variables, self.gates, self.wires, out)


@dataclass
class Diagnostic:
    code: str
    gate: int | None
    message: str

    def __str__(self):
        where = "circuit" if self.gate is None else f"gate {self.gate}"
        return f"[{self.code}] {where}: {self.message}"


def validate(circuit: Circuit) -> list:
    """Structural diagnostics; an empty list means the invariants hold."""
    probs = []
    gates = circuit.gates
    if circuit.output not in gates:
        probs.append(Diagnostic("output", None, f"output {circuit.output} is not a gate"))
    for g, ws in circuit.wires.items():
        for c, tag in ws:
            if c not in gates:
                probs.append(Diagnostic("wire", g, f"child {c} does not exist"))
    # cycle detection without topo cache (cache raises; validate reports)
    indeg = {g: 0 for g in gates}
    for g, ws in circuit.wires.items():
        for c, _t in ws:
            if c in indeg:
                indeg[g] += 1
    ready = [g for g, d in indeg.items() if d == 0]
    seen = 0
    parents = {g: [] for g in gates}
    for g, ws in circuit.wires.items():
        for c, _t in ws:
            if c in parents:
                parents[c].append(g)
    while ready:
        g = ready.pop()
        seen += 1
        for p in parents[g]:
            indeg[p] -= 1
            if indeg[p] == 0:
                ready.append(p)
    if seen != len(gates):
        stuck = sorted(g for g, d in indeg.items() if d > 0)
        for g in stuck[:4]:
            probs.append(Diagnostic("cycle", g, "gate lies on a cycle"))
    for g, lab in sorted(gates.items()):
        ws = circuit.wires[g]
        if lab.kind not in _KINDS:
            probs.append(Diagnostic("label", g, f"unknown kind {lab.kind!r}"))
            continue
        if lab.kind in ("input", "const") and ws:
            probs.append(Diagnostic("arity", g, f"{lab.kind} gate has children"))
        if lab.kind == "not" and len(ws) != 1:
            probs.append(Diagnostic("arity", g, f"not gate has fan-in {len(ws)}"))
        if lab.kind == "input" and lab.var not in circuit.variables:
            probs.append(Diagnostic("var", g, f"variable {lab.var!r} not declared"))
        if lab.kind == "const" and lab.value.field != circuit.field:
            probs.append(Diagnostic("field", g, "constant from a different field"))
        if lab.kind in ("th_ge", "th_eq") and lab.k < 0:
            probs.append(Diagnostic("label", g, "negative threshold"))
        if lab.kind in ("psum", "pprod"):
            tags = {t for t, _q in lab.parts}
            for q in (w for _t, w in lab.parts):
                if q.field != circuit.field:
                    probs.append(Diagnostic("field", g, "part weight from a different field"))
            if lab.c.field != circuit.field:
                probs.append(Diagnostic("field", g, "target from a different field"))
            for c, tag in ws:
                if tag is None or tag not in tags:
                    probs.append(Diagnostic("tag", g, f"wire from {c} has tag {tag!r} outside parts"))
        else:
            for c, tag in ws:
                if tag is not None:
                    probs.append(Diagnostic("tag", g, f"tag {tag!r} on a non-partition gate"))
    return probs


def _require_valid_for_eval(circuit: Circuit):
    # evaluation only needs acyclicity; topo_order raises with a clear message
    circuit.topo_order()


def arith_gate_values(circuit: Circuit, assignment: dict) -> dict:
    """Exact value of every gate under a variable assignment."""
    _require_valid_for_eval(circuit)
    fld = circuit.field
    zero, one = fld.zero(), fld.one()
    vals = {}
    for g in circuit.topo_order():
        lab = circuit.gates[g]
        if lab.kind == "input":
            try:
                v = assignment[lab.var]
            except KeyError:
                raise CircuitError(f"missing variable {lab.var!r}") from None
            if not isinstance(v, FieldValue) or v.field != fld:
                raise FieldMismatchError(f"assignment for {lab.var!r} is not in {fld.name()}")
            vals[g] = v
        elif lab.kind == "const":
            if lab.value.field != fld:
                raise FieldMismatchError(f"gate {g}: constant outside {fld.name()}")
            vals[g] = lab.value
        elif lab.kind == "add":
            acc = zero
            for c, _t in circuit.wires[g]:
                acc = acc + vals[c]
            vals[g] = acc
        elif lab.kind == "mul":
            acc = one
            for c, _t in circuit.wires[g]:
                acc = acc * vals[c]
            vals[g] = acc
        else:
            raise CircuitError(f"gate {g}: label {lab.kind!r} is not arithmetic")
    return vals


def evaluate_arith(circuit: Circuit, assignment: dict) -> FieldValue:
    return arith_gate_values(circuit, assignment)[circuit.output]


def bool_gate_values(circuit: Circuit, assignment: dict) -> dict:
    """0/1 value of every gate under a 0/1 variable assignment."""
    _require_valid_for_eval(circuit)
    vals = {}
    for g in circuit.topo_order():
        lab = circuit.gates[g]
        ws = circuit.wires[g]
        if lab.kind == "input":
            try:
                v = assignment[lab.var]
            except KeyError:
                raise CircuitError(f"missing variable {lab.var!r}") from None
            if v not in (0, 1):
                raise CircuitError(f"variable {lab.var!r} must be 0 or 1")
            vals[g] = v
        elif lab.kind == "const":
            if lab.value.is_zero():
                vals[g] = 0
            elif lab.value.is_one():
                vals[g] = 1
            else:
                raise CircuitError(f"gate {g}: constant {lab.value} is not a bit")
        elif lab.kind == "and":
            vals[g] = int(all(vals[c] for c, _t in ws))
        elif lab.kind == "or":
            vals[g] = int(any(vals[c] for c, _t in ws))
        elif lab.kind == "not":
            vals[g] = 1 - vals[ws[0][0]]
        elif lab.kind == "th_ge":
            vals[g] = int(sum(vals[c] for c, _t in ws) >= lab.k)
        elif lab.kind == "th_eq":
            vals[g] = int(sum(vals[c] for c, _t in ws) == lab.k)
        elif lab.kind in ("psum", "pprod"):
            weights = lab.parts_map()
            counts = {t: 0 for t in weights}
            for c, tag in ws:
                counts[tag] += vals[c]
            if lab.kind == "psum":
                acc = circuit.field.zero()
                for t, q in weights.items():
                    acc = acc + q.scaled(counts[t])
            else:
                acc = circuit.field.one()
                for t, q in weights.items():
                    acc = acc * q.power(counts[t])
            vals[g] = int(acc == lab.c)
        else:
            raise CircuitError(f"gate {g}: label {lab.kind!r} is not Boolean")
    return vals


def evaluate_bool(circuit: Circuit, assignment: dict) -> int:
    return bool_gate_values(circuit, assignment)[circuit.output]


@dataclass
class SizeStats:
    gates: int
    wires: int
    depth: int
    by_kind: dict


def size_stats(circuit: Circuit) -> SizeStats:
    by_kind = {}
    for lab in circuit.gates.values():
        by_kind[lab.kind] = by_kind.get(lab.kind, 0) + 1
    depth = {}
    best = 0
    for g in circuit.topo_order():
        ws = circuit.wires[g]
        depth[g] = 0 if not ws else 1 + max(depth[c] for c, _t in ws)
        best = max(best, depth[g])
    nwires = sum(len(ws) for ws in circuit.wires.values())
    return SizeStats(len(circuit.gates), nwires, best, dict(sorted(by_kind.items())))


@dataclass
class RandomCompareResult:
    consistent: bool
    counterexample: dict | None
    trials: int


def compare_by_random_eval(c1: Circuit, c2: Circuit, trials: int = 20, seed: int = 1729) -> RandomCompareResult:
    """Probabilistic polynomial-identity check on shared variables.

    Rationals draw integer points from [-10^6, 10^6]; F_p draws uniformly.
    Agreement on all trials is evidence, not proof, of identity.
    """
    if c1.field != c2.field:
        raise FieldMismatchError("circuits live over different fields")
    if set(c1.variables) != set(c2.variables):
        raise CircuitError("circuits have different variable spaces")
    rng = random.Random(seed)
    fld = c1.field
    for t in range(trials):
        if fld.p is None:
            asg = {v: fld.of(rng.randint(-(10 ** 6), 10 ** 6)) for v in c1.variables}
        else:
            asg = {v: fld.of(rng.randrange(fld.p)) for v in c1.variables}
        if evaluate_arith(c1, asg) != evaluate_arith(c2, asg):
            return RandomCompareResult(False, {k: str(v) for k, v in sorted(asg.items())}, t + 1)
    return RandomCompareResult(True, None, trials)


def desugar_threshold_eq(circuit: Circuit) -> Circuit:
    """Rewrite every th_eq(k) gate as and(th_ge(k), not(th_ge(k+1)))."""
    gates = dict(circuit.gates)
    wires = {g: list(ws) for g, ws in circuit.wires.items()}
    nxt = max(gates) + 1 if gates else 0
    for g in sorted(circuit.gates):
        lab = circuit.gates[g]
        if lab.kind != "th_eq":
            continue
        kids = circuit.wires[g]
        lo = nxt
        hi = nxt + 1
        neg = nxt + 2
        nxt += 3
        gates[lo] = th_ge(lab.k)
        wires[lo] = list(kids)
        gates[hi] = th_ge(lab.k + 1)
        wires[hi] = list(kids)
        gates[neg] = NOT
        wires[neg] = [(hi, None)]
        gates[g] = AND
        wires[g] = [(lo, None), (neg, None)]
    return Circuit(circuit.field, circuit.variables, gates, wires, circuit.output)


# ---------------------------------------------------------------------------
# JSON round-trip


def _label_to_json(lab: GateLabel) -> dict:
    if lab.kind == "input":
        return {"kind": "input", "var": lab.var}
    if lab.kind == "const":
        return {"kind": "const", "value": str(lab.value)}
    if lab.kind in ("th_ge", "th_eq"):
        return {"kind": lab.kind, "k": lab.k}
    if lab.kind in ("psum", "pprod"):
        return {
            "kind": lab.kind,
            "c": str(lab.c),
            "parts": {t: str(q) for t, q in lab.parts},
        }
    return {"kind": lab.kind}


def serialize(circuit: Circuit) -> str:
    gates = []
    for g in sorted(circuit.gates):
        entry = {"id": g, "label": _label_to_json(circuit.gates[g])}
        kids = []
        for c, tag in circuit.wires[g]:
            kids.append({"id": c} if tag is None else {"id": c, "tag": tag})
        entry["children"] = kids
        gates.append(entry)
    doc = {
        "field": circuit.field.name(),
        "variables": list(circuit.variables),
        "gates": gates,
        "output": circuit.output,
    }
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _want(obj, key, typ, path):
    if not isinstance(obj, dict):
        raise SchemaError(path, f"expected object, got {type(obj).__name__}")
    if key not in obj:
        raise SchemaError(f"{path}.{key}", "missing")
    v = obj[key]
    if typ is not None and not isinstance(v, typ):
        raise SchemaError(f"{path}.{key}", f"expected {typ.__name__}, got {type(v).__name__}")
    return v


def _label_from_json(obj, fld: Field, path: str) -> GateLabel:
    kind = _want(obj, "kind", str, path)
    try:
        if kind == "input":
            return input_label(_want(obj, "var", str, path))
        if kind == "const":
            return const(fld.of(_want(obj, "value", str, path)))
        if kind in ("add", "mul", "and", "or", "not"):
            return GateLabel(kind)
        if kind in ("th_ge", "th_eq"):
            k = _want(obj, "k", int, path)
            if k < 0:
                raise SchemaError(f"{path}.k", "negative threshold")
            return GateLabel(kind, k=k)
        if kind in ("psum", "pprod"):
            c = fld.of(_want(obj, "c", str, path))
            raw = _want(obj, "parts", dict, path)
            if not raw:
                raise SchemaError(f"{path}.parts", "empty parts")
            parts = {t: fld.of(q) for t, q in raw.items()}
            return GateLabel(kind, c=c, parts=_parts_tuple(parts))
    except (ValueError, ZeroDivisionError) as exc:
        raise SchemaError(path, str(exc)) from None
    raise SchemaError(f"{path}.kind", f"unknown kind {kind!r}")


def deserialize(text: str) -> Circuit:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError("$", f"invalid JSON: {exc}") from None
    fld = Field.parse(_want(doc, "field", str, "$"))
    variables = _want(doc, "variables", list, "$")
    for i, v in enumerate(variables):
        if not isinstance(v, str):
            raise SchemaError(f"$.variables[{i}]", "variable ids must be strings")
    raw_gates = _want(doc, "gates", list, "$")
    gates = {}
    wires = {}
    for i, entry in enumerate(raw_gates):
        path = f"$.gates[{i}]"
        gid = _want(entry, "id", int, path)
        if gid in gates:
            raise SchemaError(f"{path}.id", f"duplicate gate id {gid}")
        gates[gid] = _label_from_json(_want(entry, "label", dict, path), fld, f"{path}.label")
        kids = []
        for j, ch in enumerate(_want(entry, "children", list, path)):
            cpath = f"{path}.children[{j}]"
            cid = _want(ch, "id", int, cpath)
            tag = ch.get("tag")
            if tag is not None and not isinstance(tag, str):
                raise SchemaError(f"{cpath}.tag", "tag must be a string")
            kids.append((cid, tag))
        wires[gid] = kids
    output = _want(doc, "output", int, "$")
    for gid, kids in wires.items():
        for cid, _tag in kids:
            if cid not in gates:
                raise SchemaError("$.gates", f"gate {gid} references unknown child {cid}")
    if output not in gates:
        raise SchemaError("$.output", f"unknown gate {output}")
    try:
        return Circuit(fld, variables, gates, wires, output)
    except CircuitError as exc:
        raise SchemaError("$.gates", str(exc)) from None


def export_dot(circuit: Circuit) -> str:
    lines = ["digraph circuit {", "  rankdir=BT;"]
    for g in sorted(circuit.gates):
        lab = repr(circuit.gates[g]).replace('"', "'")
        shape = "box" if circuit.gates[g].kind in ("input", "const") else "ellipse"
        extra = ", peripheries=2" if g == circuit.output else ""
        lines.append(f'  n{g} [label="{g}: {lab}", shape={shape}{extra}];')
    for g in sorted(circuit.gates):
        for c, tag in circuit.wires[g]:
            attr = "" if tag is None else f' [label="{tag}"]'
            lines.append(f"  n{c} -> n{g}{attr};")
    lines.append("}")
    return "\n".join(lines) + "\n"
