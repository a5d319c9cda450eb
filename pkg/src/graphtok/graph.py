"""Canonical undirected graphs, their matrix views, and exact combinatorial oracles."""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.cluster.hierarchy import DisjointSet

INT64_MAX = np.iinfo(np.int64).max


class GraphError(ValueError):
    """Invalid graph construction input."""


class GraphFormatError(GraphError):
    """Malformed graph JSON."""


class OracleDisagreement(RuntimeError):
    """Two independent computations of the same quantity disagree."""


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph on nodes ``0..n-1``.

    ``edges`` is a sorted tuple of ``(u, v)`` pairs with ``u < v``. Use
    :func:`build_graph` rather than the constructor so input is validated
    and canonicalized.
    """

    n: int
    edges: tuple[tuple[int, int], ...]

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def neighbors(self) -> list[set[int]]:
        nbrs: list[set[int]] = [set() for _ in range(self.n)]
        for u, v in self.edges:
            nbrs[u].add(v)
            nbrs[v].add(u)
        return nbrs

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n, dtype=np.int64)
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def has_edge(self, u: int, v: int) -> bool:
        return (min(u, v), max(u, v)) in set(self.edges)

    def add_edges(self, pairs: Iterable[tuple[int, int]]) -> "Graph":
        return build_graph(self.n, list(self.edges) + list(pairs))

    def remove_edges(self, pairs: Iterable[tuple[int, int]]) -> "Graph":
        drop = {(min(u, v), max(u, v)) for u, v in pairs}
        return build_graph(self.n, [e for e in self.edges if e not in drop])

    def relabel(self, perm: Sequence[int]) -> "Graph":
        """Return the graph with node ``i`` renamed to ``perm[i]``."""
        perm = [int(p) for p in perm]
        if sorted(perm) != list(range(self.n)):
            raise GraphError(f"not a permutation of range({self.n}): {perm}")
        return build_graph(self.n, [(perm[u], perm[v]) for u, v in self.edges])


def build_graph(n: int, edges: Iterable[Sequence[int]]) -> Graph:
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
        raise GraphError(f"node count must be a positive integer, got {n!r}")
    n = int(n)
    canon = set()
    for pair in edges:
        if len(pair) != 2:
            raise GraphError(f"edge must be a pair, got {pair!r}")
        u, v = int(pair[0]), int(pair[1])
        if not (0 <= u < n and 0 <= v < n):
            raise GraphError(f"edge ({u}, {v}) has an endpoint out of range [0, {n})")
        if u == v:
            raise GraphError(f"self-loop at node {u}")
        canon.add((min(u, v), max(u, v)))
    return Graph(n, tuple(sorted(canon)))


def complete_graph(n: int) -> Graph:
    return build_graph(n, [(u, v) for u in range(n) for v in range(u + 1, n)])


def cycle_graph(n: int) -> Graph:
    return build_graph(n, [(i, (i + 1) % n) for i in range(n)])


def path_graph(n: int) -> Graph:
    return build_graph(n, [(i, i + 1) for i in range(n - 1)])


def star_graph(n: int) -> Graph:
    """Star on ``n`` nodes with center 0."""
    return build_graph(n, [(0, i) for i in range(1, n)])


def complete_bipartite(a: int, b: int) -> Graph:
    return build_graph(a + b, [(u, a + v) for u in range(a) for v in range(b)])


# -- matrix views ------------------------------------------------------------


def adjacency(g: Graph, dtype=float) -> np.ndarray:
    a = np.zeros((g.n, g.n), dtype=dtype)
    if g.edges:
        idx = np.asarray(g.edges)
        a[idx[:, 0], idx[:, 1]] = 1
        a[idx[:, 1], idx[:, 0]] = 1
    return a


def degree_matrix(g: Graph) -> np.ndarray:
    return np.diag(g.degrees().astype(float))


def laplacian(g: Graph, kind: str = "combinatorial") -> np.ndarray:
    """Graph Laplacian.

    ``kind="combinatorial"`` gives ``D - A``. ``kind="sym_normalized"`` gives
    ``I - D^{-1/2} A D^{-1/2}`` where isolated nodes use 0 for the inverse
    square-root degree, so their diagonal entry stays 1.
    """
    a = adjacency(g)
    deg = a.sum(axis=1)
    if kind == "combinatorial":
        return np.diag(deg) - a
    if kind == "sym_normalized":
        inv_sqrt = np.zeros_like(deg)
        nz = deg > 0
        inv_sqrt[nz] = 1.0 / np.sqrt(deg[nz])
        return np.eye(g.n) - inv_sqrt[:, None] * a * inv_sqrt[None, :]
    raise ValueError(f"unknown Laplacian kind {kind!r}")


def transition_matrix(g: Graph) -> np.ndarray:
    """Row-stochastic ``D^{-1} A``; isolated nodes get an all-zero row."""
    a = adjacency(g)
    deg = np.maximum(a.sum(axis=1), 1.0)
    return a / deg[:, None]


# -- exact oracles -----------------------------------------------------------


def _triangles_by_trace(g: Graph) -> int:
    a = adjacency(g, dtype=np.int64)
    tr = int(np.trace(a @ a @ a))
    if tr % 6:
        raise OracleDisagreement(f"Tr(A^3) = {tr} is not divisible by 6")
    return tr // 6


def _triangles_by_enumeration(g: Graph) -> int:
    nbrs = g.neighbors()
    count = 0
    for u, v in g.edges:
        count += sum(1 for w in nbrs[u] & nbrs[v] if w > v)
    return count


def triangle_count(g: Graph) -> int:
    """Number of triangles, via ``Tr(A^3)/6`` cross-checked by enumeration."""
    by_trace = _triangles_by_trace(g)
    by_enum = _triangles_by_enumeration(g)
    if by_trace != by_enum:
        raise OracleDisagreement(
            f"triangle count mismatch: trace gives {by_trace}, enumeration gives {by_enum}"
        )
    return by_trace


def closed_walk_diagonal(g: Graph, k: int) -> np.ndarray:
    """Exact diagonal of ``A^k`` as int64; raises OverflowError instead of wrapping."""
    if k < 1:
        raise ValueError(f"walk length must be >= 1, got {k}")
    a = adjacency(g, dtype=np.int64)
    dmax = int(a.sum(axis=1).max()) if g.n else 0
    power = a.copy()
    for step in range(2, k + 1):
        # each entry of power @ a is a sum of at most dmax entries of power
        if int(power.max()) * dmax > INT64_MAX:
            raise OverflowError(
                f"closed walk counts for k={k} exceed int64 (overflow at power {step})"
            )
        power = power @ a
    return np.diag(power).copy()


def _components_by_bfs(g: Graph) -> int:
    nbrs = g.neighbors()
    seen = [False] * g.n
    comps = 0
    for root in range(g.n):
        if seen[root]:
            continue
        comps += 1
        seen[root] = True
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for w in nbrs[u]:
                if not seen[w]:
                    seen[w] = True
                    queue.append(w)
    return comps


def connected_components(g: Graph) -> list[list[int]]:
    ds = DisjointSet(range(g.n))
    for u, v in g.edges:
        ds.merge(u, v)
    comps = sorted(sorted(s) for s in ds.subsets())
    if len(comps) != _components_by_bfs(g):
        raise OracleDisagreement("disjoint-set and BFS component counts differ")
    return comps


def is_connected(g: Graph) -> bool:
    return len(connected_components(g)) == 1


def induced_subgraph(g: Graph, nodes: Sequence[int]) -> Graph:
    """Subgraph on ``nodes``, relabeled to ``0..len(nodes)-1`` in the given order."""
    index = {v: i for i, v in enumerate(nodes)}
    return build_graph(
        len(nodes),
        [(index[u], index[v]) for u, v in g.edges if u in index and v in index],
    )


# -- JSON --------------------------------------------------------------------


def graph_to_dict(g: Graph) -> dict:
    return {"n": g.n, "edges": [[u, v] for u, v in g.edges]}


def graph_from_dict(obj, where: str = "graph") -> Graph:
    if not isinstance(obj, dict):
        raise GraphFormatError(f"{where}: expected an object with 'n' and 'edges'")
    for key in ("n", "edges"):
        if key not in obj:
            raise GraphFormatError(f"{where}: missing field '{key}'")
    n = obj["n"]
    if isinstance(n, bool) or not isinstance(n, int):
        raise GraphFormatError(f"{where}.n: expected an integer, got {n!r}")
    if not isinstance(obj["edges"], list):
        raise GraphFormatError(f"{where}.edges: expected a list")
    pairs = []
    for i, e in enumerate(obj["edges"]):
        if (
            not isinstance(e, list)
            or len(e) != 2
            or any(isinstance(x, bool) or not isinstance(x, int) for x in e)
        ):
            raise GraphFormatError(f"{where}.edges[{i}]: expected [int, int], got {e!r}")
        pairs.append(e)
    try:
        return build_graph(n, pairs)
    except GraphFormatError:
        raise
    except GraphError as exc:
        raise GraphFormatError(f"{where}: {exc}") from exc


def serialize_graph(g: Graph) -> str:
    return json.dumps(graph_to_dict(g))


def _loads(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphFormatError(
            f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc


def parse_graph(text: str) -> Graph:
    return graph_from_dict(_loads(text))


def parse_graphs(text: str) -> list[Graph]:
    """Parse a single graph object, an array of them, or a ``{"graphs": [...]}`` dataset."""
    obj = _loads(text)
    if isinstance(obj, dict) and "graphs" in obj:
        obj = obj["graphs"]
        where = "graphs"
    else:
        where = ""
    if isinstance(obj, list):
        return [graph_from_dict(o, f"{where}[{i}]") for i, o in enumerate(obj)]
    return [graph_from_dict(obj)]
