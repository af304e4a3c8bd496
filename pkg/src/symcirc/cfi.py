"""CFI perfect-matching graphs over 3-regular base graphs.

For a 3-regular 2-connected base graph G, X(G) replaces every edge e by two
vertices e_0, e_1 and every vertex v by a balance vertex v_b plus four inner
vertices v_S, one per even subset S of the edges at v.  Wiring: v_S is
adjacent to e_1 for e in S, to e_0 for the other incident edges, and to v_b.
The twisted variant ~X(G) uses odd subsets at one special vertex; which
vertex is twisted does not matter up to isomorphism (path_flip_isomorphism
exhibits the witness).

The perfect matchings of X(G) split into uniform ones, counted exactly by a
closed-form sum over vertex subsets, and non-uniform ones, whose count is
the same for X(G) and ~X(G).  The resulting count gap is a power of two,
which enumeration checks here reproduce.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb

from .errors import BudgetExceededError, CircuitError
from .graphs import Graph, is_graph_isomorphism
from .wl import wl_equivalent


@dataclass
class BaseGraphReport:
    valid: bool
    problems: list
    odd: bool  # |E| odd


def check_base_graph(g: Graph) -> BaseGraphReport:
    problems = []
    for v in g.vertices:
        if g.degree(v) != 3:
            problems.append(f"vertex {v!r} has degree {g.degree(v)}, want 3")
            break
    from .graphs import is_two_connected
    if not is_two_connected(g):
        problems.append("graph is not 2-connected")
    return BaseGraphReport(not problems, problems, len(g.edges) % 2 == 1)


@dataclass
class CFIGraph:
    graph: Graph
    base: Graph
    twisted: bool
    special: object  # base vertex carrying the odd subsets; None if untwisted
    inner: tuple
    outer: tuple


def build_cfi(g: Graph, twisted: bool = False, special=None) -> CFIGraph:
    rep = check_base_graph(g)
    if not rep.valid:
        raise CircuitError("; ".join(rep.problems))
    if twisted:
        special = g.vertices[0] if special is None else special
        if special not in g.vertices:
            raise CircuitError(f"special vertex {special!r} not in base graph")
    else:
        special = None
    verts = []
    edges = []
    for e in g.edges:
        verts.append(("e", e, 0))
        verts.append(("e", e, 1))
    for v in g.vertices:
        inc = g.incident(v)
        want = 1 if (twisted and v == special) else 0
        verts.append(("b", v))
        for r in range(4):
            if r % 2 != want:
                continue
            for S in itertools.combinations(inc, r):
                iv = ("i", v, S)
                verts.append(iv)
                edges.append((("b", v), iv))
                for e in inc:
                    edges.append((("e", e, 1 if e in S else 0), iv))
    name = (f"~X({g.name})" if twisted else f"X({g.name})") if g.name else ""
    graph = Graph(tuple(verts), tuple(edges), name)
    inner = tuple(v for v in graph.vertices if v[0] == "i")
    outer = tuple(v for v in graph.vertices if v[0] != "i")
    return CFIGraph(graph, g, twisted, special, inner, outer)


def path_flip_isomorphism(x: CFIGraph, y: CFIGraph, path) -> dict:
    """Isomorphism from x to y flipping e_0/e_1 along a simple base path from
    x's special vertex to y's.  Raises if the produced map fails the check."""
    if x.base.edges != y.base.edges or x.base.vertices != y.base.vertices:
        raise CircuitError("CFI graphs have different base graphs")
    if not (x.twisted and y.twisted):
        raise CircuitError("path flip applies to twisted CFI graphs")
    path = list(path)
    if not path or path[0] != x.special or path[-1] != y.special:
        raise CircuitError("path must run from x's special vertex to y's")
    if len(set(path)) != len(path):
        raise CircuitError("path must be simple")
    pedges = set()
    for a, b in zip(path, path[1:]):
        if not x.base.has_edge(a, b):
            raise CircuitError(f"({a!r}, {b!r}) is not a base edge")
        pedges.add((a, b) if (a, b) in x.base.edges else (b, a))
    mapping = {}
    for vert in x.graph.vertices:
        if vert[0] == "e":
            _, e, bit = vert
            mapping[vert] = ("e", e, 1 - bit) if e in pedges else vert
        elif vert[0] == "b":
            mapping[vert] = vert
        else:
            _, v, S = vert
            flip = {e for e in x.base.incident(v) if e in pedges}
            mapping[vert] = ("i", v, tuple(sorted(set(S) ^ flip)))
    if not is_graph_isomorphism(x.graph, y.graph, mapping):
        raise CircuitError("flip map failed the isomorphism check")
    return mapping


# ---------------------------------------------------------------------------
# Perfect matchings


@dataclass
class MatchingReport:
    count: int
    nodes: int
    uniform: int | None = None
    nonuniform: int | None = None
    histogram: dict | None = None  # (n0, n1, n2) projection-value counts -> matchings


def _matching_projections(cfi: CFIGraph, partner: dict):
    """p(v, e) = matched edges between {e_0, e_1} and the inner vertices of v,
    checked against the two balance equations."""
    proj = {}
    for e in cfi.base.edges:
        p0 = partner[("e", e, 0)]
        p1 = partner[("e", e, 1)]
        for v in e:
            proj[(v, e)] = int(p0[1] == v) + int(p1[1] == v)
        if proj[(e[0], e)] + proj[(e[1], e)] != 2:
            raise CircuitError(f"projection equation failed at edge {e!r}")
    for v in cfi.base.vertices:
        if sum(proj[(v, e)] for e in cfi.base.incident(v)) != 3:
            raise CircuitError(f"projection equation failed at vertex {v!r}")
    return proj


def enumerate_perfect_matchings(target, mode: str = "count",
                                node_budget: int = 10 ** 9) -> MatchingReport:
    """Exact backtracking count; classify mode also splits matchings of a CFI
    graph into uniform (all projections 1) and non-uniform ones."""
    cfi = target if isinstance(target, CFIGraph) else None
    if mode == "classify" and cfi is None:
        raise CircuitError("classify mode needs a CFI graph")
    if mode not in ("count", "classify"):
        raise CircuitError(f"unknown mode {mode!r}")
    g = cfi.graph if cfi else target
    verts = g.vertices
    if len(verts) % 2 == 1:
        return MatchingReport(0, 0)
    order = {v: i for i, v in enumerate(verts)}
    nbr = [sorted(order[w] for w in g.adj(v)) for v in verts]
    n = len(verts)
    free = [True] * n
    partner = [-1] * n
    state = {"nodes": 0, "count": 0, "uniform": 0, "hist": {}}

    def visit_leaf():
        state["count"] += 1
        if cfi is None or mode != "classify":
            return
        pairs = {verts[i]: verts[partner[i]] for i in range(n)}
        proj = _matching_projections(cfi, pairs)
        tally = [0, 0, 0]
        for p in proj.values():
            tally[p] += 1
        key = tuple(tally)
        state["hist"][key] = state["hist"].get(key, 0) + 1
        if key[0] == 0 and key[2] == 0:
            state["uniform"] += 1

    def rec(lo):
        while lo < n and not free[lo]:
            lo += 1
        if lo == n:
            visit_leaf()
            return
        state["nodes"] += 1
        if state["nodes"] > node_budget:
            raise BudgetExceededError(f"matching search exceeded {node_budget} nodes")
        free[lo] = False
        for w in nbr[lo]:
            if free[w]:
                free[w] = False
                partner[lo], partner[w] = w, lo
                rec(lo + 1)
                free[w] = True
        free[lo] = True

    rec(0)
    if mode == "classify":
        return MatchingReport(state["count"], state["nodes"], state["uniform"],
                              state["count"] - state["uniform"], dict(state["hist"]))
    return MatchingReport(state["count"], state["nodes"])


def all_perfect_matchings(g: Graph) -> list:
    """Every perfect matching as a frozenset of edges; for small graphs."""
    verts = list(g.vertices)
    out = []

    def rec(rest, acc):
        if not rest:
            out.append(frozenset(acc))
            return
        v, tail = rest[0], rest[1:]
        for w in g.adj(v):
            if w in tail:
                nxt = tuple(u for u in tail if u != w)
                rec(nxt, acc + [(v, w) if (v, w) in g.edges else (w, v)])

    rec(tuple(verts), [])
    return out


def bipartition(g: Graph):
    """(left, right) by BFS 2-coloring; raises on odd cycles."""
    color = {}
    for start in g.vertices:
        if start in color:
            continue
        color[start] = 0
        frontier = [start]
        while frontier:
            nxt = []
            for u in frontier:
                for w in g.adj(u):
                    if w not in color:
                        color[w] = 1 - color[u]
                        nxt.append(w)
                    elif color[w] == color[u]:
                        raise CircuitError("graph is not bipartite")
            frontier = nxt
    left = tuple(v for v in g.vertices if color[v] == 0)
    right = tuple(v for v in g.vertices if color[v] == 1)
    return left, right


def matching_count_via_permanent(g: Graph) -> int:
    """Permanent of the biadjacency matrix, by the inclusion-exclusion
    summation over column subsets with Gray-code updates."""
    left, right = bipartition(g)
    if len(left) != len(right):
        raise CircuitError("bipartition is unbalanced")
    n = len(left)
    if n == 0:
        return 1
    if n > 22:
        raise BudgetExceededError(f"permanent summation infeasible for n = {n}")
    cols = {v: j for j, v in enumerate(right)}
    rows = [[0] * n for _ in range(n)]
    for i, u in enumerate(left):
        for w in g.adj(u):
            rows[i][cols[w]] = 1
    total = 0
    sums = [0] * n
    prev = 0
    for s in range(1, 1 << n):
        gray = s ^ (s >> 1)
        j = (gray ^ prev).bit_length() - 1
        sign_flip = 1 if gray & (1 << j) else -1
        for i in range(n):
            sums[i] += sign_flip * rows[i][j]
        prev = gray
        prod = 1
        for x in sums:
            prod *= x
            if prod == 0:
                break
        if bin(gray).count("1") % 2 == n % 2:
            total += prod
        else:
            total -= prod
    return total


# ---------------------------------------------------------------------------
# Orientations


def enumerate_orientations(g: Graph):
    """All 2^|E| orientations with their odd in-degree vertex sets."""
    m = len(g.edges)
    if m > 24:
        raise BudgetExceededError(f"2^{m} orientations exceed the budget")
    for bits in range(1 << m):
        orient = {}
        indeg = {v: 0 for v in g.vertices}
        for idx, (u, v) in enumerate(g.edges):
            tail, head = (v, u) if bits >> idx & 1 else (u, v)
            orient[(u, v)] = (tail, head)
            indeg[head] += 1
        odd = frozenset(v for v, d in indeg.items() if d % 2 == 1)
        yield orient, odd


def orientation_odd_set_census(g: Graph) -> dict:
    census = {}
    for _o, odd in enumerate_orientations(g):
        census[odd] = census.get(odd, 0) + 1
    return census


# ---------------------------------------------------------------------------
# Closed-form counts


def uniform_count_formula(g: Graph, twisted: bool) -> int:
    """Number of uniform perfect matchings of X(G) (or ~X(G) if twisted)."""
    nv, ne = len(g.vertices), len(g.edges)
    want = (ne + (1 if twisted else 0)) % 2
    total = sum(comb(nv, s) * 2 ** s * 4 ** (nv - s)
                for s in range(nv + 1) if s % 2 == want)
    return 2 ** (nv // 2 + 1) * total


def pq(m: int, mode: str = "recurrence"):
    """(P_m, Q_m): even / odd subset sums of 2^|S| 4^{2m-|S|} over a 2m-set."""
    if m < 1:
        raise CircuitError("m must be at least 1")
    if mode == "direct":
        p = sum(comb(2 * m, s) * 2 ** s * 4 ** (2 * m - s)
                for s in range(0, 2 * m + 1, 2))
        q = sum(comb(2 * m, s) * 2 ** s * 4 ** (2 * m - s)
                for s in range(1, 2 * m + 1, 2))
        return p, q
    if mode != "recurrence":
        raise CircuitError(f"unknown pq mode {mode!r}")
    p, q = 20, 16
    for _ in range(m - 1):
        p, q = 20 * p + 16 * q, 16 * p + 20 * q
    return p, q


# ---------------------------------------------------------------------------
# Gadget subgraphs


_GADGET_EDGES = ("f", "g", "h")
_GADGET_INNERS = ((), ("f", "g"), ("f", "h"), ("g", "h"))


def _gadget_graph(bits) -> Graph:
    """Induced subgraph on the inner vertices, the balance vertex, and one
    chosen vertex per incident edge (bit 0 or 1)."""
    outer = [("e", e, b) for e, b in zip(_GADGET_EDGES, bits)]
    inner = [("i", S) for S in _GADGET_INNERS]
    verts = outer + inner + [("b",)]
    edges = [(("b",), iv) for iv in inner]
    for e, b in zip(_GADGET_EDGES, bits):
        for S in _GADGET_INNERS:
            if (e in S) == (b == 1):
                edges.append((("e", e, b), ("i", S)))
    return Graph(tuple(verts), tuple(edges))


def _m(*pairs):
    return frozenset((a, b) if (a, b) == min((a, b), (b, a)) else (b, a)
                     for a, b in pairs)


# the four matchings of the all-0 subgraph S and two of the (0,0,1) subgraph T
_S_MATCHINGS = (
    _m((("e", "f", 0), ("i", ())), (("e", "g", 0), ("i", ("f", "h"))),
       (("e", "h", 0), ("i", ("f", "g"))), (("b",), ("i", ("g", "h")))),
    _m((("e", "f", 0), ("i", ("g", "h"))), (("e", "g", 0), ("i", ())),
       (("e", "h", 0), ("i", ("f", "g"))), (("b",), ("i", ("f", "h")))),
    _m((("e", "f", 0), ("i", ("g", "h"))), (("e", "g", 0), ("i", ("f", "h"))),
       (("e", "h", 0), ("i", ("f", "g"))), (("b",), ("i", ()))),
    _m((("e", "f", 0), ("i", ("g", "h"))), (("e", "g", 0), ("i", ("f", "h"))),
       (("e", "h", 0), ("i", ())), (("b",), ("i", ("f", "g")))),
)
_T_MATCHINGS = (
    _m((("e", "f", 0), ("i", ())), (("e", "g", 0), ("i", ("f", "h"))),
       (("e", "h", 1), ("i", ("g", "h"))), (("b",), ("i", ("f", "g")))),
    _m((("e", "f", 0), ("i", ("g", "h"))), (("e", "g", 0), ("i", ())),
       (("e", "h", 1), ("i", ("f", "h"))), (("b",), ("i", ("f", "g")))),
)


@dataclass
class GadgetReport:
    s_count: int
    t_count: int
    s_match_expected: bool
    t_match_expected: bool
    counts_by_bits: dict
    ok: bool


def gadget_matchings_check() -> GadgetReport:
    """Count perfect matchings of all eight induced gadget subgraphs and
    compare the two canonical ones against the explicit matching lists."""
    counts = {}
    for bits in itertools.product((0, 1), repeat=3):
        counts[bits] = len(all_perfect_matchings(_gadget_graph(bits)))
    s_found = set(all_perfect_matchings(_gadget_graph((0, 0, 0))))
    t_found = set(all_perfect_matchings(_gadget_graph((0, 0, 1))))
    s_ok = s_found == set(_S_MATCHINGS)
    t_ok = t_found == set(_T_MATCHINGS)
    parity_ok = all(c == (4 if sum(bits) % 2 == 0 else 2)
                    for bits, c in counts.items())
    ok = s_ok and t_ok and parity_ok and counts[(0, 0, 0)] == 4 and counts[(0, 0, 1)] == 2
    return GadgetReport(counts[(0, 0, 0)], counts[(0, 0, 1)], s_ok, t_ok, counts, ok)


# ---------------------------------------------------------------------------
# The end-to-end experiment


@dataclass
class ExperimentReport:
    base: str
    formula_uniform_x: int
    formula_uniform_y: int
    expected_diff: int
    enumerated: bool
    count_x: int | None = None
    count_y: int | None = None
    uniform_x: int | None = None
    uniform_y: int | None = None
    nonuniform_x: int | None = None
    nonuniform_y: int | None = None
    permanent_checked: bool = False
    mod: dict = field(default_factory=dict)     # p -> {"x": r, "y": r, "differ": bool}
    wl: dict = field(default_factory=dict)      # k -> equivalent
    checks: dict = field(default_factory=dict)  # name -> bool

    def passed(self) -> bool:
        return all(self.checks.values())


def matching_experiment(g: Graph, k_list=(1, 2), p_list=(2, 3, 5),
                        node_budget: int = 10 ** 9,
                        run_enumeration: bool = True) -> ExperimentReport:
    """Build X(G) and ~X(G), count and classify their matchings, and check
    every finite claim: uniform counts match the formula, non-uniform counts
    agree, the total gap is 2^{3n+1} for |V| = 2n, modular separations hold,
    and k-WL fails to distinguish the pair for the requested k."""
    x = build_cfi(g, twisted=False)
    y = build_cfi(g, twisted=True)
    fx = uniform_count_formula(g, False)
    fy = uniform_count_formula(g, True)
    nv = len(g.vertices)
    expected = 2 ** (3 * (nv // 2) + 1)
    rep = ExperimentReport(g.name or "?", fx, fy, expected, False)
    rep.checks["formula_diff_is_power"] = abs(fx - fy) == expected
    if run_enumeration:
        try:
            rx = enumerate_perfect_matchings(x, "classify", node_budget)
            ry = enumerate_perfect_matchings(y, "classify", node_budget)
            rep.enumerated = True
        except BudgetExceededError:
            rep.enumerated = False
    if rep.enumerated:
        rep.count_x, rep.count_y = rx.count, ry.count
        rep.uniform_x, rep.uniform_y = rx.uniform, ry.uniform
        rep.nonuniform_x, rep.nonuniform_y = rx.nonuniform, ry.nonuniform
        rep.checks["uniform_x_matches_formula"] = rx.uniform == fx
        rep.checks["uniform_y_matches_formula"] = ry.uniform == fy
        rep.checks["nonuniform_counts_equal"] = rx.nonuniform == ry.nonuniform
        rep.checks["count_diff_is_power"] = abs(rx.count - ry.count) == expected
        if len(x.graph.vertices) <= 44:
            rep.checks["permanent_matches_x"] = (
                matching_count_via_permanent(x.graph) == rx.count)
            rep.checks["permanent_matches_y"] = (
                matching_count_via_permanent(y.graph) == ry.count)
            rep.permanent_checked = True
        for p in p_list:
            mx, my = rx.count % p, ry.count % p
            rep.mod[p] = {"x": mx, "y": my, "differ": mx != my}
            if p == 2:
                rep.checks["counts_agree_mod_2"] = mx == my
            else:
                rep.checks[f"counts_differ_mod_{p}"] = mx != my
    for k in k_list:
        verdict = wl_equivalent(x.graph, y.graph, k)
        rep.wl[k] = verdict.equivalent
        rep.checks[f"wl_{k}_equivalent"] = verdict.equivalent
    return rep
