"""Node-level graph tokenizations.

The functions (``spectral_tokens``, ``rw_tokens`` ...) map one graph to a
:class:`TokenMatrix`. The estimator classes wrap them in the scikit-learn
transformer API so a list of graphs can be tokenized into one zero-padded
``(n_graphs, n_max, width)`` array.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin, clone
from sklearn.utils.validation import check_is_fitted

from .io import atomic_write
from .graph import Graph, adjacency, graph_from_dict, laplacian, transition_matrix
from .spectra import EigenSystem, eigendecompose

FAMILIES = ("spectral", "random_walk", "adjacency", "adjacency_projected", "combined")


class TokenizationError(ValueError):
    pass


@dataclass(frozen=True)
class TokenMatrix:
    tokens: np.ndarray
    family: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise TokenizationError(f"unknown family {self.family!r}")
        if self.tokens.ndim != 2:
            raise TokenizationError("tokens must be a 2-D array")
        if not np.all(np.isfinite(self.tokens)):
            raise TokenizationError("tokens contain non-finite values")

    @property
    def shape(self) -> tuple[int, int]:
        return self.tokens.shape

    def to_csv(self, decimals: int | None = None) -> str:
        """CSV text with header ``node,c0,c1,...``.

        Floats are written at 17 significant digits, which round-trips doubles.
        With ``decimals`` they are rounded to that many places in fixed notation
        instead, so outputs equal up to solver noise come out byte-identical.
        """
        if decimals is None:
            fmt = lambda x: format(x, ".17g")  # noqa: E731
        elif decimals < 0:
            raise TokenizationError(f"decimals must be >= 0, got {decimals}")
        else:
            # adding 0.0 turns a rounded -0.0 into 0.0
            fmt = lambda x: format(round(x, decimals) + 0.0, f".{decimals}f")  # noqa: E731
        n, d = self.tokens.shape
        lines = [",".join(["node"] + [f"c{j}" for j in range(d)])]
        for v in range(n):
            lines.append(",".join([str(v)] + [fmt(float(x)) for x in self.tokens[v]]))
        return "\n".join(lines) + "\n"

    def sidecar(self, decimals: int | None = None) -> dict:
        return {"family": self.family, "params": self.params, "shape": list(self.tokens.shape), "decimals": decimals}


def read_token_csv(text: str) -> np.ndarray:
    rows = text.strip().splitlines()[1:]
    if not rows:
        return np.zeros((0, 0))
    return np.array([[float(x) for x in r.split(",")[1:]] for r in rows])


# -- spectral ----------------------------------------------------------------


def _select(eig: EigenSystem, k: int | None, which: str, drop_trivial: bool):
    order = np.arange(eig.n)
    if drop_trivial:
        order = order[1:]
    if which == "largest":
        order = _descending(eig, order)
    elif which != "smallest":
        raise TokenizationError(f"which must be 'smallest' or 'largest', got {which!r}")
    if k is None:
        k = len(order)
    if not 1 <= k <= len(order):
        raise TokenizationError(f"level k={k} out of range [1, {len(order)}]")
    return order[:k]


def _descending(eig: EigenSystem, order: np.ndarray) -> np.ndarray:
    # reverse the block order but keep each degenerate block's canonical order,
    # so "largest k" picks the same leading basis vectors of a shared eigenspace
    keep = set(order.tolist())
    out = []
    for blk in reversed(eig.blocks()):
        out.extend(i for i in range(blk.start, blk.stop) if i in keep)
    return np.array(out, dtype=int)


def spectral_tokens(
    g: Graph,
    k: int | None = None,
    kind: str = "combinatorial",
    which: str = "smallest",
    drop_trivial: bool = False,
    eigensystem: EigenSystem | None = None,
) -> TokenMatrix:
    """Per-node ``(u_i1(v), ..., u_ik(v), lambda_i1, ..., lambda_ik)``.

    ``k=None`` keeps every eigenpair (after the optional trivial drop). A
    precomputed ``eigensystem`` of the same Laplacian may be passed to avoid
    repeating the decomposition when sweeping ``k``.
    """
    eig = eigensystem if eigensystem is not None else eigendecompose(laplacian(g, kind))
    idx = _select(eig, k, which, drop_trivial)
    vecs = eig.vectors[:, idx]
    vals = np.broadcast_to(eig.values[idx], (g.n, len(idx)))
    params = {"k": None if k is None else int(k), "kind": kind, "which": which, "drop_trivial": drop_trivial}
    return TokenMatrix(np.hstack([vecs, vals]), "spectral", params)


# -- random walk -------------------------------------------------------------


def rw_tokens(g: Graph, t: int) -> TokenMatrix:
    """Return probabilities ``(P^i)_vv`` for ``i = 1..t`` with ``P = D^{-1} A``."""
    if t < 1:
        raise TokenizationError(f"walk length t must be >= 1, got {t}")
    p = transition_matrix(g)
    out = np.empty((g.n, t))
    power = p
    out[:, 0] = np.diag(power)
    for i in range(1, t):
        power = power @ p
        out[:, i] = np.diag(power)
    return TokenMatrix(out, "random_walk", {"t": int(t)})


# -- adjacency ---------------------------------------------------------------


def adjacency_tokens(g: Graph) -> TokenMatrix:
    return TokenMatrix(adjacency(g), "adjacency", {})


_PROJECTIONS: dict[tuple[int, int, int], np.ndarray] = {}
_PROJECTION_LOCK = threading.Lock()


def projection_matrix(n: int, d_tr: int, seed: int) -> np.ndarray:
    """Gaussian ``n x d_tr`` matrix with N(0, 1) entries, cached per ``(n, d_tr, seed)``.

    Rows are drawn in order, so the matrix for ``n`` is the leading ``n`` rows
    of the matrix for any larger node count with the same seed.
    """
    key = (int(n), int(d_tr), int(seed))
    with _PROJECTION_LOCK:
        r = _PROJECTIONS.get(key)
        if r is None:
            r = np.random.default_rng(seed).standard_normal((n, d_tr))
            r.setflags(write=False)
            _PROJECTIONS[key] = r
    return r


def adjacency_projected_tokens(
    g: Graph, d_tr: int, seed: int = 0, projection: np.ndarray | None = None
) -> TokenMatrix:
    """``A @ R`` for a shared random projection ``R``.

    ``projection`` overrides the seeded matrix (it must be ``n x d_tr``).
    """
    if d_tr < 1:
        raise TokenizationError(f"projection dimension must be >= 1, got {d_tr}")
    r = projection_matrix(g.n, d_tr, seed) if projection is None else np.asarray(projection, float)
    if r.shape != (g.n, d_tr):
        raise TokenizationError(f"projection has shape {r.shape}, expected {(g.n, d_tr)}")
    params = {"d_tr": int(d_tr), "seed": None if projection is not None else int(seed)}
    return TokenMatrix(adjacency(g) @ r, "adjacency_projected", params)


# -- combination and padding -------------------------------------------------


def combined_tokens(parts: list[TokenMatrix]) -> TokenMatrix:
    if not parts:
        raise TokenizationError("nothing to combine")
    rows = {p.tokens.shape[0] for p in parts}
    if len(rows) != 1:
        raise TokenizationError(f"row counts differ: {sorted(rows)}")
    params = {"parts": [{"family": p.family, "width": p.shape[1], **p.params} for p in parts]}
    return TokenMatrix(np.hstack([p.tokens for p in parts]), "combined", params)


def pad_tokens(tm: TokenMatrix, target_width: int) -> TokenMatrix:
    n, d = tm.shape
    if target_width < d:
        raise TokenizationError(f"target width {target_width} is smaller than current width {d}")
    if target_width == d:
        return tm
    tokens = np.hstack([tm.tokens, np.zeros((n, target_width - d))])
    return TokenMatrix(tokens, tm.family, {**tm.params, "padded_width": int(target_width)})


# -- scikit-learn estimators -------------------------------------------------


def check_graph(g) -> Graph:
    if isinstance(g, Graph):
        return g
    if isinstance(g, dict):
        return graph_from_dict(g)
    raise TypeError(f"expected a Graph or a {{'n', 'edges'}} mapping, got {type(g).__name__}")


def check_graphs(graphs) -> list[Graph]:
    """Coerce a graph, a mapping, or a sequence of either into a list of Graphs."""
    if isinstance(graphs, (Graph, dict)):
        return [check_graph(graphs)]
    graphs = [check_graph(g) for g in graphs]
    if not graphs:
        raise ValueError("expected at least one graph")
    return graphs


def padding_mask(graphs, n_max: int) -> np.ndarray:
    """Boolean ``(n_graphs, n_max)`` mask of real (non-padded) node positions."""
    graphs = check_graphs(graphs)
    sizes = np.array([g.n for g in graphs])
    return np.arange(n_max)[None, :] < sizes[:, None]


class _GraphTokenizer(TransformerMixin, BaseEstimator):
    """Shared fit/transform logic: fit records the largest graph size, transform pads to it."""

    def fit(self, X, y=None):
        graphs = check_graphs(X)
        self.n_max_ = max(g.n for g in graphs)
        self._check_params(self.n_max_)
        self.n_features_out_ = self._width(self.n_max_)
        return self

    def _check_params(self, n_max):
        pass

    def transform(self, X):
        check_is_fitted(self, "n_max_")
        graphs = check_graphs(X)
        out = np.zeros((len(graphs), self.n_max_, self.n_features_out_))
        for i, g in enumerate(graphs):
            if g.n > self.n_max_:
                raise ValueError(f"graph {i} has {g.n} nodes, more than n_max_={self.n_max_} seen in fit")
            out[i, : g.n] = self._padded(self.tokenize(g).tokens, g.n)
        return out

    def _padded(self, tokens: np.ndarray, n: int) -> np.ndarray:
        return np.hstack([tokens, np.zeros((n, self.n_features_out_ - tokens.shape[1]))])


class SpectralTokenizer(_GraphTokenizer):
    """Laplacian eigenvector tokens.

    With ``k=None`` every graph keeps its full spectrum and the eigenvector
    and eigenvalue blocks are each zero-padded to ``n_max_`` columns, so
    column ``j`` always means "eigenpair ``j``".
    """

    def __init__(self, k=None, kind="combinatorial", which="smallest", drop_trivial=False):
        self.k = k
        self.kind = kind
        self.which = which
        self.drop_trivial = drop_trivial

    def _check_params(self, n_max):
        if self.k is not None and self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")

    def _width(self, n_max):
        if self.k is None:
            return 2 * (n_max - 1 if self.drop_trivial else n_max)
        return 2 * self.k

    def tokenize(self, g) -> TokenMatrix:
        return spectral_tokens(check_graph(g), self.k, self.kind, self.which, self.drop_trivial)

    def _padded(self, tokens, n):
        half_out = self.n_features_out_ // 2
        half_in = tokens.shape[1] // 2
        out = np.zeros((n, self.n_features_out_))
        out[:, :half_in] = tokens[:, :half_in]
        out[:, half_out : half_out + half_in] = tokens[:, half_in:]
        return out


class RandomWalkTokenizer(_GraphTokenizer):
    def __init__(self, t=8):
        self.t = t

    def _check_params(self, n_max):
        if self.t < 1:
            raise ValueError(f"t must be >= 1, got {self.t}")

    def _width(self, n_max):
        return self.t

    def tokenize(self, g) -> TokenMatrix:
        return rw_tokens(check_graph(g), self.t)


class AdjacencyTokenizer(_GraphTokenizer):
    def _width(self, n_max):
        return n_max

    def tokenize(self, g) -> TokenMatrix:
        return adjacency_tokens(check_graph(g))


class ProjectedAdjacencyTokenizer(_GraphTokenizer):
    """Adjacency rows times one Gaussian matrix sampled at fit time."""

    def __init__(self, n_components=8, random_state=0):
        self.n_components = n_components
        self.random_state = random_state

    def fit(self, X, y=None):
        super().fit(X, y)
        self.projection_ = projection_matrix(self.n_max_, self.n_components, self.random_state)
        return self

    def _check_params(self, n_max):
        if self.n_components < 1:
            raise ValueError(f"n_components must be >= 1, got {self.n_components}")
        if not isinstance(self.random_state, (int, np.integer)):
            raise ValueError("random_state must be an integer seed")

    def _width(self, n_max):
        return self.n_components

    def tokenize(self, g) -> TokenMatrix:
        g = check_graph(g)
        proj = getattr(self, "projection_", None)
        if proj is None or proj.shape[0] < g.n:
            return adjacency_projected_tokens(g, self.n_components, self.random_state)
        tm = adjacency_projected_tokens(g, self.n_components, projection=proj[: g.n])
        return TokenMatrix(tm.tokens, tm.family, {**tm.params, "seed": int(self.random_state)})


class CombinedTokenizer(_GraphTokenizer):
    """Feature-wise concatenation of several tokenizers, each padded on its own."""

    def __init__(self, tokenizers=None):
        self.tokenizers = tokenizers

    def _parts(self):
        if self.tokenizers is None:
            return [SpectralTokenizer(), RandomWalkTokenizer(), AdjacencyTokenizer()]
        return list(self.tokenizers)

    def fit(self, X, y=None):
        graphs = check_graphs(X)
        self.fitted_ = [_clone_fit(t, graphs) for t in self._parts()]
        self.n_max_ = max(g.n for g in graphs)
        self.n_features_out_ = sum(t.n_features_out_ for t in self.fitted_)
        return self

    def transform(self, X):
        check_is_fitted(self, "fitted_")
        return np.concatenate([t.transform(X) for t in self.fitted_], axis=-1)

    def tokenize(self, g) -> TokenMatrix:
        parts = getattr(self, "fitted_", None) or self._parts()
        return combined_tokens([t.tokenize(g) for t in parts])


def _clone_fit(tokenizer, graphs):
    return clone(tokenizer).fit(graphs)


def write_tokens(
    tm: TokenMatrix, csv_path: Path, sidecar_path: Path | None = None, decimals: int | None = None
) -> None:
    csv_path = Path(csv_path)
    atomic_write(csv_path, tm.to_csv(decimals))
    sidecar_path = csv_path.with_suffix(".json") if sidecar_path is None else Path(sidecar_path)
    atomic_write(sidecar_path, json.dumps(tm.sidecar(decimals), indent=2, sort_keys=True) + "\n")
