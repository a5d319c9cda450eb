"""Left-right planarity test (decision only, no embedding).

Phase 1 orients the graph by depth-first search and records lowpoints and a
nesting depth per oriented edge. Phase 2 walks the same DFS tree with the
children sorted by nesting depth and maintains a stack of conflict pairs of
return-edge intervals; an unresolvable conflict means the graph is not planar.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass

from .graph import Graph, connected_components, induced_subgraph

METHOD = "left-right"


@dataclass(frozen=True)
class PlanarityVerdict:
    planar: bool
    method: str = METHOD
    edge_bound_shortcut: bool = False

    def to_dict(self) -> dict:
        return {
            "planar": self.planar,
            "method": self.method,
            "edge_bound_shortcut": self.edge_bound_shortcut,
        }


class _Interval:
    __slots__ = ("low", "high")

    def __init__(self, low=None, high=None):
        self.low = low
        self.high = high

    def empty(self) -> bool:
        return self.low is None and self.high is None

    def copy(self) -> "_Interval":
        return _Interval(self.low, self.high)


class _ConflictPair:
    __slots__ = ("left", "right")

    def __init__(self, left=None, right=None):
        self.left = left if left is not None else _Interval()
        self.right = right if right is not None else _Interval()

    def swap(self):
        self.left, self.right = self.right, self.left


class _LRTester:
    def __init__(self, n: int, adj: list[list[int]]):
        self.adj = adj
        self.height: list[int | None] = [None] * n
        self.parent_edge: list[tuple[int, int] | None] = [None] * n
        self.oriented: set[tuple[int, int]] = set()
        self.out: list[list[int]] = [[] for _ in range(n)]
        self.lowpt: dict = {}
        self.lowpt2: dict = {}
        self.nesting: dict = {}
        self.ref: dict = {}
        self.lowpt_edge: dict = {}
        self.stack_bottom: dict = {}
        self.S: list[_ConflictPair] = []

    # phase 1 ---------------------------------------------------------------

    def orient(self, v: int) -> None:
        e = self.parent_edge[v]
        for w in self.adj[v]:
            if (v, w) in self.oriented or (w, v) in self.oriented:
                continue
            vw = (v, w)
            self.oriented.add(vw)
            self.out[v].append(w)
            self.lowpt[vw] = self.height[v]
            self.lowpt2[vw] = self.height[v]
            if self.height[w] is None:
                self.parent_edge[w] = vw
                self.height[w] = self.height[v] + 1
                self.orient(w)
            else:
                self.lowpt[vw] = self.height[w]
            self.nesting[vw] = 2 * self.lowpt[vw]
            if self.lowpt2[vw] < self.height[v]:
                self.nesting[vw] += 1
            if e is not None:
                if self.lowpt[vw] < self.lowpt[e]:
                    self.lowpt2[e] = min(self.lowpt[e], self.lowpt2[vw])
                    self.lowpt[e] = self.lowpt[vw]
                elif self.lowpt[vw] > self.lowpt[e]:
                    self.lowpt2[e] = min(self.lowpt2[e], self.lowpt[vw])
                else:
                    self.lowpt2[e] = min(self.lowpt2[e], self.lowpt2[vw])

    # phase 2 ---------------------------------------------------------------

    def _top(self):
        return self.S[-1] if self.S else None

    def _conflicting(self, iv: _Interval, b) -> bool:
        return not iv.empty() and self.lowpt[iv.high] > self.lowpt[b]

    def _lowest(self, p: _ConflictPair) -> int:
        if p.left.empty():
            return self.lowpt[p.right.low]
        if p.right.empty():
            return self.lowpt[p.left.low]
        return min(self.lowpt[p.left.low], self.lowpt[p.right.low])

    def test(self, v: int) -> bool:
        e = self.parent_edge[v]
        children = self.out[v]
        for w in children:
            ei = (v, w)
            self.stack_bottom[ei] = self._top()
            if ei == self.parent_edge[w]:
                if not self.test(w):
                    return False
            else:
                self.lowpt_edge[ei] = ei
                self.S.append(_ConflictPair(right=_Interval(ei, ei)))
            if self.lowpt[ei] < self.height[v]:
                if w == children[0]:
                    self.lowpt_edge[e] = self.lowpt_edge[ei]
                elif not self._add_constraints(ei, e):
                    return False
        if e is not None:
            self._remove_back_edges(e)
        return True

    def _add_constraints(self, ei, e) -> bool:
        P = _ConflictPair()
        # merge return edges of ei into the right interval of P
        while True:
            Q = self.S.pop()
            if not Q.left.empty():
                Q.swap()
            if not Q.left.empty():
                return False
            if self.lowpt[Q.right.low] > self.lowpt[e]:
                if P.right.empty():
                    P.right = Q.right.copy()
                else:
                    self.ref[P.right.low] = Q.right.high
                P.right.low = Q.right.low
            else:
                self.ref[Q.right.low] = self.lowpt_edge[e]
            if self._top() is self.stack_bottom[ei]:
                break
        # merge conflicting return edges of earlier siblings into the left interval
        while self.S and (
            self._conflicting(self._top().left, ei) or self._conflicting(self._top().right, ei)
        ):
            Q = self.S.pop()
            if self._conflicting(Q.right, ei):
                Q.swap()
            if self._conflicting(Q.right, ei):
                return False
            self.ref[P.right.low] = Q.right.high
            if Q.right.low is not None:
                P.right.low = Q.right.low
            if P.left.empty():
                P.left = Q.left.copy()
            else:
                self.ref[P.left.low] = Q.left.high
            P.left.low = Q.left.low
        if not (P.left.empty() and P.right.empty()):
            self.S.append(P)
        return True

    def _remove_back_edges(self, e) -> None:
        u = e[0]
        # drop conflict pairs whose return edges all end at the parent
        while self.S and self._lowest(self._top()) == self.height[u]:
            self.S.pop()
        if self.S:
            P = self.S.pop()
            while P.left.high is not None and P.left.high[1] == u:
                P.left.high = self.ref.get(P.left.high)
            if P.left.high is None and P.left.low is not None:
                self.ref[P.left.low] = P.right.low
                P.left.low = None
            while P.right.high is not None and P.right.high[1] == u:
                P.right.high = self.ref.get(P.right.high)
            if P.right.high is None and P.right.low is not None:
                self.ref[P.right.low] = P.left.low
                P.right.low = None
            self.S.append(P)


def _lr_planar(g: Graph) -> bool:
    adj = [sorted(s) for s in g.neighbors()]
    tester = _LRTester(g.n, adj)
    roots = []
    for v in range(g.n):
        if tester.height[v] is None:
            tester.height[v] = 0
            roots.append(v)
            tester.orient(v)
    for v in range(g.n):
        tester.out[v].sort(key=lambda w: tester.nesting[(v, w)])
    return all(tester.test(r) for r in roots)


def is_planar(g: Graph) -> PlanarityVerdict:
    """Planarity of a simple undirected graph, component by component."""
    limit = sys.getrecursionlimit()
    if limit < 4 * g.n + 200:
        sys.setrecursionlimit(4 * g.n + 200)
    for comp in connected_components(g):
        sub = induced_subgraph(g, comp)
        if sub.n <= 4:
            continue
        if sub.n_edges > 3 * sub.n - 6:
            return PlanarityVerdict(False, edge_bound_shortcut=True)
        if not _lr_planar(sub):
            return PlanarityVerdict(False)
    return PlanarityVerdict(True)
