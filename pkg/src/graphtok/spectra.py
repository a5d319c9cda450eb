"""Dense symmetric eigendecomposition with deterministic conventions.

Eigenvectors inside a degenerate eigenspace are not unique. By default the
basis of every such block is rebuilt canonically from the block's orthogonal
projector (Gram-Schmidt over its columns in node order), so two matrices that
share an eigenspace also share its basis. After that, each column is
sign-normalized so its first coordinate above ``TOL_SIGN`` is positive.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .graph import Graph, OracleDisagreement, laplacian, triangle_count

TOL_EIG = 1e-9
TOL_MATCH = 1e-7
TOL_SIGN = 1e-12
# eigenvalues closer than this (relative to the matrix scale) form one block
TOL_CLUSTER = 1e-10
# Gram-Schmidt residual below this means the projector column adds nothing
TOL_BASIS = 1e-6


class EigenError(ValueError):
    """Rejected input or failed post-condition of an eigendecomposition."""


@dataclass(frozen=True)
class EigenSystem:
    values: np.ndarray
    vectors: np.ndarray

    @property
    def n(self) -> int:
        return len(self.values)

    def blocks(self, tol: float = TOL_CLUSTER) -> list[slice]:
        """Index ranges of (numerically) equal eigenvalues."""
        return _cluster(self.values, tol * max(1.0, float(np.abs(self.values).max(initial=0))))

    def reconstruct(self) -> np.ndarray:
        return (self.vectors * self.values) @ self.vectors.T


@dataclass(frozen=True)
class SpectrumDiff:
    matched: int
    changed: list[tuple[float, float]] = field(default_factory=list)


def _cluster(values: np.ndarray, gap: float) -> list[slice]:
    out = []
    start = 0
    for i in range(1, len(values) + 1):
        if i == len(values) or values[i] - values[i - 1] > gap:
            out.append(slice(start, i))
            start = i
    return out


def _canonical_block_basis(block: np.ndarray) -> np.ndarray:
    """Orthonormal basis of span(block) that depends only on the subspace."""
    dim = block.shape[1]
    if dim == 1:
        return block
    proj = block @ block.T
    basis: list[np.ndarray] = []
    for j in range(proj.shape[0]):
        col = proj[:, j].copy()
        for b in basis:
            col -= (b @ col) * b
        # second pass keeps the basis orthonormal to machine precision
        for b in basis:
            col -= (b @ col) * b
        norm = np.linalg.norm(col)
        if norm > TOL_BASIS:
            basis.append(col / norm)
            if len(basis) == dim:
                break
    if len(basis) < dim:
        # Gram-Schmidt stalled on near-dependent columns; fall back to the solver's basis
        return block
    return np.column_stack(basis)


def canonical_signs(vectors: np.ndarray, tol_sign: float = TOL_SIGN) -> np.ndarray:
    out = vectors.copy()
    for i in range(out.shape[1]):
        col = out[:, i]
        big = np.flatnonzero(np.abs(col) > tol_sign)
        if big.size and col[big[0]] < 0:
            out[:, i] = -col
    return out


def eigendecompose(
    m: np.ndarray,
    tol_eig: float = TOL_EIG,
    canonical_basis: bool = True,
) -> EigenSystem:
    """Ascending eigenpairs of a symmetric matrix.

    Raises ``EigenError`` for asymmetric or non-finite input, and when the
    computed pairs fail the residual or orthonormality checks.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise EigenError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise EigenError("matrix has non-finite entries")
    scale = max(1.0, float(np.abs(m).sum(axis=1).max(initial=0)))
    asym = float(np.abs(m - m.T).max(initial=0))
    if asym > tol_eig * scale:
        raise EigenError(f"matrix is not symmetric (max |M - M^T| = {asym:.3e})")
    values, vectors = np.linalg.eigh((m + m.T) / 2)
    if canonical_basis:
        vectors = vectors.copy()
        for blk in _cluster(values, TOL_CLUSTER * scale):
            if blk.stop - blk.start > 1:
                vectors[:, blk] = _canonical_block_basis(vectors[:, blk])
                values[blk] = values[blk].mean()
    vectors = canonical_signs(vectors)

    residual = float(np.abs(m @ vectors - vectors * values).max(initial=0))
    if residual > tol_eig * scale:
        raise EigenError(f"eigenpair residual {residual:.3e} exceeds tolerance")
    ortho = float(np.abs(vectors.T @ vectors - np.eye(len(values))).max(initial=0))
    if ortho > tol_eig * max(1, len(values)):
        raise EigenError(f"eigenvectors not orthonormal (max deviation {ortho:.3e})")
    return EigenSystem(values, vectors)


def laplacian_eigensystem(g: Graph, kind: str = "combinatorial", **kwargs) -> EigenSystem:
    return eigendecompose(laplacian(g, kind), **kwargs)


def compare_spectra(e1, e2, tol_match: float = TOL_MATCH) -> SpectrumDiff:
    """Greedy multiset matching of two spectra.

    Accepts ``EigenSystem`` values or plain arrays of eigenvalues.
    """
    v1 = np.sort(np.asarray(getattr(e1, "values", e1), dtype=float))
    v2 = np.sort(np.asarray(getattr(e2, "values", e2), dtype=float))
    if v1.shape != v2.shape:
        raise ValueError(f"spectrum sizes differ: {len(v1)} vs {len(v2)}")
    used = np.zeros(len(v2), dtype=bool)
    unmatched_old = []
    matched = 0
    for lam in v1:
        hit = np.flatnonzero(~used & (np.abs(v2 - lam) <= tol_match))
        if hit.size:
            used[hit[0]] = True
            matched += 1
        else:
            unmatched_old.append(float(lam))
    unmatched_new = [float(x) for x in v2[~used]]
    return SpectrumDiff(matched, list(zip(unmatched_old, unmatched_new)))


@dataclass
class TwinEdgeReport:
    u: int
    v: int
    twins: bool
    degree: int | None = None
    residual_before: float | None = None  # ||L1 x - d x||_inf
    residual_after: float | None = None  # ||L2 x - (d+2) x||_inf
    diff: SpectrumDiff | None = None
    spectrum_residual: float | None = None
    triangle_delta: int | None = None
    tol: float = TOL_MATCH

    @property
    def eigenvector_ok(self) -> bool:
        return (
            self.residual_before is not None
            and self.residual_before <= self.tol
            and self.residual_after <= self.tol
        )

    @property
    def spectrum_ok(self) -> bool:
        return (
            self.diff is not None
            and len(self.diff.changed) == 1
            and self.spectrum_residual <= self.tol
        )

    @property
    def triangles_ok(self) -> bool:
        return self.triangle_delta is not None and self.triangle_delta == self.degree

    @property
    def passed(self) -> bool:
        return self.twins and self.eigenvector_ok and self.spectrum_ok and self.triangles_ok

    @property
    def max_residual(self) -> float:
        vals = [self.residual_before, self.residual_after, self.spectrum_residual]
        return max((v for v in vals if v is not None), default=0.0)


def verify_twin_edge_lemma(g: Graph, u: int, v: int, tol: float = TOL_MATCH) -> TwinEdgeReport:
    """Check that joining two non-adjacent twins of degree d moves one
    Laplacian eigenvalue from d to d+2 and adds d triangles."""
    if u == v:
        raise ValueError("u and v must differ")
    if g.has_edge(u, v):
        raise ValueError(f"({u}, {v}) is already an edge")
    nbrs = g.neighbors()
    report = TwinEdgeReport(u, v, twins=nbrs[u] == nbrs[v], tol=tol)
    if not report.twins:
        return report
    d = len(nbrs[u])
    g2 = g.add_edges([(u, v)])
    l1 = laplacian(g)
    l2 = laplacian(g2)
    x = np.zeros(g.n)
    x[u], x[v] = 1.0, -1.0
    report.degree = d
    report.residual_before = float(np.abs(l1 @ x - d * x).max())
    report.residual_after = float(np.abs(l2 @ x - (d + 2) * x).max())
    report.diff = compare_spectra(eigendecompose(l1), eigendecompose(l2), tol_match=tol)
    if len(report.diff.changed) == 1:
        old, new = report.diff.changed[0]
        report.spectrum_residual = max(abs(old - d), abs(new - (d + 2)))
    else:
        report.spectrum_residual = float("inf")
    try:
        report.triangle_delta = triangle_count(g2) - triangle_count(g)
    except OracleDisagreement:
        report.triangle_delta = None
    return report


def twin_pairs(g: Graph) -> list[tuple[int, int]]:
    """All non-adjacent pairs ``u < v`` with identical neighborhoods."""
    nbrs = g.neighbors()
    edges = set(g.edges)
    return [
        (u, v)
        for u in range(g.n)
        for v in range(u + 1, g.n)
        if (u, v) not in edges and nbrs[u] == nbrs[v]
    ]
