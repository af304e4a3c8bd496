"""k-dimensional Weisfeiler-Leman equivalence testing for k in {1, 2, 3}.

Both graphs are refined jointly on their disjoint union so color ids are
comparable.  For k >= 2 the refinement runs over all k-tuples of union
vertices: the initial color is the tuple's ordered atomic type (equalities
and adjacencies among its entries), and each round extends a tuple's color
by the multiset, over all vertices w, of the k-vector of colors of the
tuples obtained by substituting w into each position.  k = 1 is classic
color refinement seeded with degrees.  Verdict: the color multisets over
the two graphs' pure tuples agree at every round.

Convention note: "k-dimensional" counts tuple length, so k = 2 refines
vertex pairs.  Colors are canonicalized per round by sorting signatures and
assigning dense integer ids; no hashing is involved.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass

from .errors import BudgetExceededError, CircuitError
from .graphs import Graph


@dataclass
class WLReport:
    equivalent: bool
    rounds: int
    class_counts: tuple  # total color classes on the union, per round
    distinguishing_round: int | None


def _dense(sigs):
    ids = {s: i for i, s in enumerate(sorted(set(sigs)))}
    return [ids[s] for s in sigs], len(ids)


def wl_equivalent(g1: Graph, g2: Graph, k: int, budget: int = 10 ** 6) -> WLReport:
    if k not in (1, 2, 3):
        raise CircuitError("k must be 1, 2, or 3")
    union = g1.disjoint_union(g2)
    verts = union.vertices  # all of g1's relabeled vertices sort before g2's
    n = len(verts)
    if n ** k > budget:
        raise BudgetExceededError(f"{n}^{k} tuples exceed the budget {budget}")
    index = {v: i for i, v in enumerate(verts)}
    adj = [frozenset(index[w] for w in union.adj(v)) for v in verts]
    n1 = len(g1.vertices)

    if k == 1:
        pure1 = range(n1)
        pure2 = range(n1, n)
        sigs = [len(adj[i]) for i in range(n)]

        def refine(col):
            return _dense([(col[i], tuple(sorted(col[j] for j in adj[i])))
                           for i in range(n)])
    else:
        digits = list(itertools.product(range(n), repeat=k))
        pows = [n ** (k - 1 - i) for i in range(k)]
        pure1 = [t for t, d in enumerate(digits) if all(x < n1 for x in d)]
        pure2 = [t for t, d in enumerate(digits) if all(x >= n1 for x in d)]
        sigs = [tuple((d[i] == d[j], d[j] in adj[d[i]])
                      for i in range(k) for j in range(i + 1, k))
                for d in digits]

        def refine(col):
            out = []
            for t, d in enumerate(digits):
                ms = sorted(
                    tuple(col[t + (w - d[i]) * pows[i]] for i in range(k))
                    for w in range(n))
                out.append((col[t], tuple(ms)))
            return _dense(out)

    col, nclasses = _dense(sigs)
    counts = [nclasses]

    def diverged(c):
        return Counter(c[t] for t in pure1) != Counter(c[t] for t in pure2)

    if diverged(col):
        return WLReport(False, 0, tuple(counts), 0)
    rounds = 0
    while True:
        newcol, nc = refine(col)
        rounds += 1
        if diverged(newcol):
            counts.append(nc)
            return WLReport(False, rounds, tuple(counts), rounds)
        if nc == nclasses:
            return WLReport(True, rounds, tuple(counts), None)
        col, nclasses = newcol, nc
        counts.append(nc)


def wl_distinguishing_round(g1: Graph, g2: Graph, k: int,
                            budget: int = 10 ** 6) -> int | None:
    return wl_equivalent(g1, g2, k, budget).distinguishing_round
