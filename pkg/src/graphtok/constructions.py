"""Graph gadgets from the tokenization lower-bound constructions, and synthetic datasets.

Node orderings are fixed so serialized outputs are reproducible:

* GM pair: switching set first, then active outside nodes, then inert nodes.
* Twin pairs and layered gadgets: each part occupies a consecutive index block.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .graph import (
    Graph,
    adjacency,
    build_graph,
    complete_bipartite,
    graph_to_dict,
    is_connected,
)


class SwitchingSetError(ValueError):
    pass


class GenerationError(RuntimeError):
    pass


def _rng(rng) -> np.random.Generator:
    return rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)


# -- Godsil-McKay switching --------------------------------------------------


@dataclass(frozen=True)
class SwitchingSet:
    members: tuple[int, ...]
    internal_degree: int
    outside_profile: tuple[tuple[int, int], ...]  # (node, neighbors in S), node order

    @property
    def size(self) -> int:
        return len(self.members)

    def active(self) -> list[int]:
        """Outside nodes adjacent to exactly half of the set."""
        return [v for v, c in self.outside_profile if c == self.size // 2]


def validate_switching_set(g: Graph, s: Sequence[int]) -> SwitchingSet:
    members = tuple(sorted({int(x) for x in s}))
    if not members:
        raise SwitchingSetError("switching set is empty")
    if len(members) != len(s):
        raise SwitchingSetError(f"switching set has repeated nodes: {list(s)}")
    if any(not 0 <= x < g.n for x in members):
        raise SwitchingSetError(f"switching set {list(members)} has nodes outside [0, {g.n})")
    k = len(members)
    if k % 2:
        raise SwitchingSetError(f"switching set size must be even, got {k}")
    nbrs = g.neighbors()
    inside = set(members)
    internal = [len(nbrs[x] & inside) for x in members]
    if len(set(internal)) != 1:
        detail = ", ".join(f"{x}:{d}" for x, d in zip(members, internal))
        raise SwitchingSetError(f"induced subgraph on S is not regular (degrees {detail})")
    profile = []
    for v in range(g.n):
        if v in inside:
            continue
        c = len(nbrs[v] & inside)
        if c not in (0, k // 2, k):
            raise SwitchingSetError(
                f"node {v} has {c} neighbors in S; allowed counts are 0, {k // 2}, {k}"
            )
        profile.append((v, c))
    return SwitchingSet(members, internal[0], tuple(profile))


def gm_switch(g: Graph, s: SwitchingSet) -> Graph:
    """Complement the edges into S of every outside node adjacent to half of S."""
    if validate_switching_set(g, s.members) != s:
        raise SwitchingSetError("switching set evidence does not match this graph")
    inside = set(s.members)
    active = set(s.active())
    kept = [(u, v) for u, v in g.edges if not ((u in active and v in inside) or (v in active and u in inside))]
    nbrs = g.neighbors()
    flipped = [(v, x) for v in active for x in s.members if x not in nbrs[v]]
    return build_graph(g.n, kept + flipped)


@dataclass(frozen=True)
class GadgetPair:
    g1: Graph
    g2: Graph
    label: str
    claimed_delta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.g1.n != self.g2.n:
            raise ValueError("gadget pair graphs must have the same node count")

    def to_dict(self) -> dict:
        return {
            "g1": graph_to_dict(self.g1),
            "g2": graph_to_dict(self.g2),
            "label": self.label,
            "claimed_delta": self.claimed_delta,
        }


# node names -> indices for the 12-node planar pair
GM_NODES = ["s1", "s2", "s3", "s4", "u1", "u2", "u3", "u4", "u5", "u6", "x1", "x2"]
GM_SWITCHING_SET = (0, 1, 2, 3)
_GM_EDGES = {
    "u1": ["s1", "s2", "u3", "u4", "u5", "u6", "x2"],
    "u2": ["s3", "s4", "u3", "u4", "u5", "u6", "x1"],
    "u3": ["s1", "s3", "u5", "u6", "x2"],
    "u4": ["s2", "s4", "u5", "u6", "x1"],
    "u5": ["s1", "s4"],
    "u6": ["s2", "s3", "x1", "x2"],
}


def planar_gm_graph() -> Graph:
    idx = {name: i for i, name in enumerate(GM_NODES)}
    return build_graph(12, [(idx[a], idx[b]) for a, bs in _GM_EDGES.items() for b in bs])


def planar_gm_pair() -> GadgetPair:
    """Planar 12-node graph and its GM switch, which is non-planar but has the same RW tokens."""
    g1 = planar_gm_graph()
    g2 = gm_switch(g1, validate_switching_set(g1, GM_SWITCHING_SET))
    return GadgetPair(g1, g2, "gm_pair", {"planarity": [True, False]})


# -- twin-edge pairs ---------------------------------------------------------


def bipartite_twin_pair(n: int) -> GadgetPair:
    """``K_{2,n-2}`` (twins 0 and 1) and the same graph with edge (0, 1)."""
    if n < 5:
        raise ValueError(f"bipartite twin pair needs n >= 5, got {n}")
    g1 = complete_bipartite(2, n - 2)
    g2 = g1.add_edges([(0, 1)])
    delta = {"twins": [0, 1], "eigenvalue": [n - 2, n], "triangles": n - 2}
    return GadgetPair(g1, g2, "bipartite_twin", delta)


def clique_join_twin_pair(n: int) -> GadgetPair:
    """Join of ``K_{n-2}`` (nodes ``0..n-3``) with two non-adjacent twins ``n-2, n-1``;
    the second graph adds the twin edge, giving ``K_n``."""
    if n < 5:
        raise ValueError(f"clique-join twin pair needs n >= 5, got {n}")
    c = n - 2
    clique = [(i, j) for i in range(c) for j in range(i + 1, c)]
    spokes = [(i, t) for i in range(c) for t in (c, c + 1)]
    g1 = build_graph(n, clique + spokes)
    g2 = g1.add_edges([(c, c + 1)])
    delta = {"twins": [c, c + 1], "eigenvalue": [n - 2, n], "triangles": n - 2}
    return GadgetPair(g1, g2, "clique_join_twin", delta)


# -- S5 word-problem gadget --------------------------------------------------


@dataclass(frozen=True)
class WalkGadget:
    """Layered graph where one layer-spanning closed walk exists iff the
    composed permutation maps ``s`` to ``t``."""

    graph: Graph
    perms: tuple[tuple[int, ...], ...]
    s: int
    t: int

    @property
    def n_layers(self) -> int:
        return len(self.perms) + 1

    @property
    def spanning_length(self) -> int:
        # one matching edge per permutation plus the closing edge
        return self.n_layers

    @property
    def source(self) -> int:
        return self.s

    @property
    def target(self) -> int:
        return 5 * len(self.perms) + self.t

    def layer(self, i: int) -> list[int]:
        return list(range(5 * i, 5 * i + 5))


def _check_perm(p) -> tuple[int, ...]:
    p = tuple(int(x) for x in p)
    if sorted(p) != [0, 1, 2, 3, 4]:
        raise ValueError(f"not a permutation of 5 elements: {p}")
    return p


def s5_walk_gadget(perms: Sequence[Sequence[int]], s: int, t: int) -> WalkGadget:
    """``len(perms) + 1`` layers of 5 nodes; node ``i`` of layer ``m`` joins node
    ``perms[m][i]`` of layer ``m + 1``; node ``s`` of the first layer joins node
    ``t`` of the last."""
    perms = tuple(_check_perm(p) for p in perms)
    if len(perms) < 2:
        raise ValueError(f"need at least 2 permutations, got {len(perms)}")
    if not (0 <= s < 5 and 0 <= t < 5):
        raise ValueError(f"s and t must lie in [0, 5), got {s}, {t}")
    edges = [(5 * m + i, 5 * (m + 1) + p[i]) for m, p in enumerate(perms) for i in range(5)]
    edges.append((s, 5 * len(perms) + t))
    return WalkGadget(build_graph(5 * (len(perms) + 1), edges), perms, s, t)


def compose_permutations(perms: Sequence[Sequence[int]], s: int) -> int:
    """Apply ``perms[0]`` first, then ``perms[1]``, and so on."""
    x = s
    for p in perms:
        x = p[x]
    return x


def spanning_closed_walks(gadget: WalkGadget) -> int:
    """Closed walks through every layer once, via the trace of the layer-to-layer
    block product read off the gadget's adjacency matrix."""
    a = adjacency(gadget.graph, dtype=np.int64)
    m = len(gadget.perms)
    prod = np.eye(5, dtype=np.int64)
    for i in range(m):
        prod = prod @ a[5 * i : 5 * i + 5, 5 * (i + 1) : 5 * (i + 2)]
    closing = a[5 * m : 5 * m + 5, 0:5]
    return int(np.trace(prod @ closing))


def random_permutations(k: int, rng) -> list[tuple[int, ...]]:
    rng = _rng(rng)
    return [tuple(int(x) for x in rng.permutation(5)) for _ in range(k)]


# -- set-disjointness triangle gadget ----------------------------------------


def disjointness_triangle_gadget(a, b) -> Graph:
    """Tripartite graph on ``3n`` nodes with a triangle iff ``a[i, j] * b[j, i] = 1`` for some ``i, j``.

    ``a`` gives V1-V2 edges, ``b[j, i]`` joins node ``j`` of V2 to node ``i`` of V3,
    and V1 node ``i`` is matched to V3 node ``i``.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape != b.shape:
        raise ValueError(f"a and b must be square and the same shape, got {a.shape}, {b.shape}")
    if not (np.isin(a, (0, 1)).all() and np.isin(b, (0, 1)).all()):
        raise ValueError("a and b must be 0/1 matrices")
    n = a.shape[0]
    edges = [(i, n + j) for i, j in zip(*np.nonzero(a))]
    edges += [(n + j, 2 * n + i) for j, i in zip(*np.nonzero(b))]
    edges += [(i, 2 * n + i) for i in range(n)]
    return build_graph(3 * n, edges)


def disjointness_holds(a, b) -> bool:
    """Whether the inputs intersect, i.e. some ``a[i, j] * b[j, i] == 1``."""
    a = np.asarray(a)
    b = np.asarray(b)
    return bool((a * b.T).any())


# -- random graphs -----------------------------------------------------------


def erdos_renyi(n: int, p: float, rng=None) -> Graph:
    """G(n, p): each pair ``u < v`` in lexicographic order is kept if a uniform draw is below ``p``."""
    if not 0 <= p <= 1:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    rng = _rng(rng)
    pairs = list(itertools.combinations(range(n), 2))
    keep = rng.random(len(pairs)) < p
    return build_graph(n, [e for e, k in zip(pairs, keep) if k])


def bridge_pair_graph(n: int, p: float = 0.5, connected: bool = True, rng=None, max_retries: int = 100) -> Graph:
    """Two ER(n/2, p) halves joined by 3 random edges, or with those 3 edges
    placed inside the halves instead. Halves that come out disconnected are
    redrawn."""
    if n < 4 or n % 2:
        raise ValueError(f"n must be even and >= 4, got {n}")
    if not 0 <= p <= 1:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    rng = _rng(rng)
    h = n // 2
    for _ in range(max_retries):
        left = erdos_renyi(h, p, rng)
        right = erdos_renyi(h, p, rng)
        if not (is_connected(left) and is_connected(right)):
            continue
        edges = list(left.edges) + [(u + h, v + h) for u, v in right.edges]
        if connected:
            cross = [(u, v) for u in range(h) for v in range(h, n)]
            pick = rng.choice(len(cross), size=3, replace=False)
            extra = [cross[i] for i in sorted(pick)]
        else:
            present = set(edges)
            inner = [
                e
                for e in itertools.chain(
                    itertools.combinations(range(h), 2), itertools.combinations(range(h, n), 2)
                )
                if e not in present
            ]
            pick = rng.choice(len(inner), size=min(3, len(inner)), replace=False)
            extra = [inner[i] for i in sorted(pick)]
        g = build_graph(n, edges + extra)
        if is_connected(g) != connected:
            raise GenerationError("bridge-pair graph does not match its connectivity label")
        return g
    raise GenerationError(
        f"no internally connected halves after {max_retries} draws (n={n}, p={p}); increase p"
    )


def bridge_pair_dataset(n: int, count: int, p: float = 0.5, seed: int = 0) -> tuple[list[Graph], list[int]]:
    rng = np.random.default_rng(seed)
    graphs, labels = [], []
    for _ in range(count):
        label = int(rng.random() < 0.5)
        graphs.append(bridge_pair_graph(n, p, bool(label), rng))
        labels.append(label)
    return graphs, labels


def dataset_to_dict(graphs: Sequence[Graph], labels=None) -> dict:
    out = {"graphs": [graph_to_dict(g) for g in graphs]}
    if labels is not None:
        out["labels"] = list(labels)
    return out
