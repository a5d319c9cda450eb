"""Executable checks: the thresholding walk detector, the Laplacian gradient
identity, and the end-to-end verification suite."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .constructions import (
    GM_SWITCHING_SET,
    GadgetPair,
    bipartite_twin_pair,
    clique_join_twin_pair,
    compose_permutations,
    disjointness_holds,
    disjointness_triangle_gadget,
    erdos_renyi,
    planar_gm_pair,
    random_permutations,
    s5_walk_gadget,
    spanning_closed_walks,
)
from .graph import Graph, adjacency, closed_walk_diagonal, laplacian, triangle_count
from .planarity import is_planar
from .spectra import compare_spectra, eigendecompose, twin_pairs, verify_twin_edge_lemma
from .tokenizers import rw_tokens, spectral_tokens

TOL_DET = 1e-9
FD_STEP = 1e-5
# n**k must stay below this for the detector threshold to be representable
MAX_INV_EPSILON = 1e300


# -- walk detector -----------------------------------------------------------


@dataclass
class DetectorResult:
    node_hits: np.ndarray
    detected: bool
    epsilon: float
    mean: float
    # nodes whose return probability lies strictly inside (0, epsilon)
    violations: list[int] = field(default_factory=list)


def _relu(x):
    return np.maximum(x, 0.0)


def rw_walk_detector(g: Graph, k: int, tol_det: float = TOL_DET) -> DetectorResult:
    """Two-layer threshold construction on the length-``k`` return probabilities.

    Each node maps ``x = (P^k)_vv`` through ``relu(x/eps) - relu(x/eps - 1)``
    with ``eps = n**-k``; uniform attention averages the node outputs and the
    graph is flagged when the mean reaches ``1/n``.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    n = g.n
    log_inv_eps = k * math.log(n)
    if log_inv_eps >= math.log(MAX_INV_EPSILON):
        raise OverflowError(
            f"threshold 1/n^k underflows for n={n}, k={k}; use closed_walk_diagonal instead"
        )
    eps = math.exp(-log_inv_eps)
    x = rw_tokens(g, k).tokens[:, k - 1]
    h = _relu(x / eps) - _relu(x / eps - 1.0)
    mean = float(h.mean())
    violations = [int(v) for v in np.flatnonzero((x > 0) & (x < eps))]
    return DetectorResult(h >= 1.0 - tol_det, mean >= 1.0 / n - tol_det, eps, mean, violations)


# -- gradient identity -------------------------------------------------------


@dataclass
class GradientReport:
    node_degree: int
    analytic_grad_norm_sq: float
    laplacian_sq_diag: float
    identity_residual: float
    fd_max_error: float
    value: float = 0.0
    reconstruction_residual: float = 0.0


def edge_gradient_check(g: Graph, u: int, v: int, fd_step: float = FD_STEP, eig=None) -> GradientReport:
    """Gradient of the edge read-out ``f(x) = -x^T diag(lambda) y`` with respect to
    node ``u``'s eigenvector coordinates ``x`` (``y`` is node ``v``'s row)."""
    if u == v:
        raise ValueError("u and v must differ")
    lap = laplacian(g)
    eig = eig if eig is not None else eigendecompose(lap)
    lam = eig.values
    x = eig.vectors[u].copy()
    y = eig.vectors[v]

    def f(z):
        return -float(z @ (lam * y))

    grad = -lam * y
    fd = np.empty_like(x)
    for i in range(len(x)):
        step = np.zeros_like(x)
        step[i] = fd_step
        fd[i] = (f(x + step) - f(x - step)) / (2 * fd_step)
    d = int(g.degrees()[v])
    norm_sq = float(grad @ grad)
    value = f(x)
    return GradientReport(
        node_degree=d,
        analytic_grad_norm_sq=norm_sq,
        laplacian_sq_diag=float((lap @ lap)[v, v]),
        identity_residual=abs(norm_sq - (d * d + d)),
        fd_max_error=float(np.abs(fd - grad).max()),
        value=value,
        reconstruction_residual=abs(value - adjacency(g)[u, v]),
    )


# -- verification suite ------------------------------------------------------


@dataclass
class CheckResult:
    name: str
    passed: bool
    residual: float
    elapsed_ms: float = 0.0
    detail: dict = field(default_factory=dict)


@dataclass
class VerificationReport:
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def overall(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self, timings: bool = True) -> dict:
        return {
            "checks": [
                {
                    "name": c.name,
                    "pass": c.passed,
                    "residual": c.residual,
                    "elapsed_ms": round(c.elapsed_ms, 3) if timings else None,
                    "detail": c.detail,
                }
                for c in self.checks
            ],
            "overall": self.overall,
        }

    def summary(self) -> str:
        lines = [
            f"{'PASS' if c.passed else 'FAIL'}  {c.name:<28} residual={c.residual:.3e}  {c.elapsed_ms:9.1f} ms"
            for c in self.checks
        ]
        lines.append(f"overall: {'PASS' if self.overall else 'FAIL'} ({sum(c.passed for c in self.checks)}/{len(self.checks)})")
        return "\n".join(lines)


GROUPS = ("t4", "t1", "lemma", "t3", "t5", "t7", "rw")


@dataclass
class SuiteConfig:
    groups: tuple[str, ...] = GROUPS
    seed: int = 0
    gm_pair: GadgetPair | None = None
    twin_sizes: tuple[int, ...] = tuple(range(5, 65))
    rw_max_length: int = 24
    lemma_graphs: int = 200
    lemma_max_n: int = 16
    walk_instances: int = 200
    walk_ks: tuple[int, ...] = (2, 3, 4, 5)
    disjointness_random: int = 500
    disjointness_sizes: tuple[int, ...] = (3, 4, 5)
    gradient_graphs: int = 100
    gradient_max_n: int = 32
    detector_graphs: int = 500
    detector_max_n: int = 12
    detector_max_k: int = 6

    @classmethod
    def empty(cls) -> "SuiteConfig":
        return cls(groups=())


def check_gm_rw_equality(cfg: SuiteConfig):
    pair = cfg.gm_pair or planar_gm_pair()
    t1 = rw_tokens(pair.g1, cfg.rw_max_length).tokens
    t2 = rw_tokens(pair.g2, cfg.rw_max_length).tokens
    diff = np.abs(t1 - t2).max(axis=1)
    residual = float(diff.max())
    same_degrees = bool(np.array_equal(pair.g1.degrees(), pair.g2.degrees()))
    detail = {
        "max_walk_length": cfg.rw_max_length,
        "same_degree_sequence": same_degrees,
        "differing_nodes": [int(v) for v in np.flatnonzero(diff >= 1e-10)],
    }
    if cfg.gm_pair is None:
        inside = list(GM_SWITCHING_SET)
        outside = [v for v in range(pair.g1.n) if v not in inside]
        detail["max_diff_switching_set"] = float(diff[inside].max())
        detail["max_diff_outside"] = float(diff[outside].max())
    return residual < 1e-10 and same_degrees and pair.g1.edges != pair.g2.edges, residual, detail


def check_gm_planarity_flip(cfg: SuiteConfig):
    pair = cfg.gm_pair or planar_gm_pair()
    p1 = is_planar(pair.g1).planar
    p2 = is_planar(pair.g2).planar
    return p1 and not p2, 0.0, {"g1_planar": p1, "g2_planar": p2}


def _twin_family_check(make: Callable[[int], GadgetPair], which: str, sizes) -> tuple[bool, float, dict]:
    worst = 0.0
    failures = []
    for n in sizes:
        pair = make(n)
        e1 = eigendecompose(laplacian(pair.g1))
        e2 = eigendecompose(laplacian(pair.g2))
        diff = compare_spectra(e1, e2, tol_match=1e-6)
        ok_spec = len(diff.changed) == 1 and abs(diff.changed[0][1] - diff.changed[0][0] - 2) <= 1e-6
        spec_res = abs(diff.changed[0][1] - diff.changed[0][0] - 2) if len(diff.changed) == 1 else math.inf
        tok_res = 0.0
        for k in range(1, n - 1):
            a = spectral_tokens(pair.g1, k, which=which, eigensystem=e1).tokens
            b = spectral_tokens(pair.g2, k, which=which, eigensystem=e2).tokens
            tok_res = max(tok_res, float(np.abs(a - b).max()))
        delta = triangle_count(pair.g2) - triangle_count(pair.g1)
        ok = ok_spec and tok_res <= 1e-7 and delta == n - 2
        worst = max(worst, spec_res, tok_res)
        if not ok:
            failures.append(n)
    return not failures, worst, {"sizes": [min(sizes), max(sizes)], "failed_sizes": failures}


def check_bipartite_twin(cfg: SuiteConfig):
    return _twin_family_check(bipartite_twin_pair, "smallest", cfg.twin_sizes)


def check_clique_join_twin(cfg: SuiteConfig):
    return _twin_family_check(clique_join_twin_pair, "largest", cfg.twin_sizes)


def check_twin_edge_lemma(cfg: SuiteConfig):
    rng = np.random.default_rng([cfg.seed, 1])
    pairs = 0
    failures = 0
    worst = 0.0
    for _ in range(cfg.lemma_graphs):
        n = int(rng.integers(2, cfg.lemma_max_n + 1))
        p = float(rng.choice([0.3, 0.5, 0.7]))
        g = erdos_renyi(n, p, rng)
        for u, v in twin_pairs(g):
            rep = verify_twin_edge_lemma(g, u, v, tol=1e-7)
            pairs += 1
            worst = max(worst, rep.max_residual)
            failures += not rep.passed
    return failures == 0, worst, {"graphs": cfg.lemma_graphs, "twin_pairs": pairs, "failures": failures}


def check_s5_gadget(cfg: SuiteConfig):
    rng = np.random.default_rng([cfg.seed, 2])
    disagreements = 0
    hits = 0
    for k in cfg.walk_ks:
        for _ in range(cfg.walk_instances):
            perms = random_permutations(k, rng)
            s = int(rng.integers(5))
            # bias toward the positive case so both outcomes are exercised
            t = compose_permutations(perms, s) if rng.random() < 0.5 else int(rng.integers(5))
            gadget = s5_walk_gadget(perms, s, t)
            expected = compose_permutations(perms, s) == t
            found = spanning_closed_walks(gadget) > 0
            if gadget.spanning_length % 2:
                # odd length: every closed walk of that length winds once around the layers
                found_diag = closed_walk_diagonal(gadget.graph, gadget.spanning_length)[gadget.source] > 0
                disagreements += int(found_diag != expected)
            disagreements += int(found != expected)
            hits += int(expected)
    total = len(cfg.walk_ks) * cfg.walk_instances
    return disagreements == 0, float(disagreements), {"instances": total, "positives": hits, "disagreements": disagreements}


def _check_disjointness_instance(a, b) -> bool:
    return (triangle_count(disjointness_triangle_gadget(a, b)) > 0) == disjointness_holds(a, b)


def check_disjointness(cfg: SuiteConfig):
    rng = np.random.default_rng([cfg.seed, 3])
    disagreements = 0
    count = 0
    patterns = [np.array(bits).reshape(2, 2) for bits in np.ndindex(2, 2, 2, 2)]
    for a in patterns:
        for b in patterns:
            disagreements += not _check_disjointness_instance(a, b)
            count += 1
    for n in cfg.disjointness_sizes:
        for _ in range(cfg.disjointness_random):
            density = rng.random()
            a = (rng.random((n, n)) < density).astype(int)
            b = (rng.random((n, n)) < density).astype(int)
            disagreements += not _check_disjointness_instance(a, b)
            count += 1
    return disagreements == 0, float(disagreements), {"instances": count, "disagreements": disagreements}


def check_gradient_identity(cfg: SuiteConfig):
    rng = np.random.default_rng([cfg.seed, 4])
    worst_rel = 0.0
    worst_fd = 0.0
    nodes = 0
    for _ in range(cfg.gradient_graphs):
        n = int(rng.integers(2, cfg.gradient_max_n + 1))
        g = erdos_renyi(n, float(rng.uniform(0.05, 0.95)), rng)
        eig = eigendecompose(laplacian(g))
        for v in range(n):
            u = (v + 1) % n
            rep = edge_gradient_check(g, u, v, eig=eig)
            d = rep.node_degree
            worst_rel = max(worst_rel, rep.identity_residual / (d * d + d + 1))
            worst_fd = max(worst_fd, rep.fd_max_error)
            nodes += 1
    ok = worst_rel <= 1e-6 and worst_fd <= 1e-6
    return ok, max(worst_rel, worst_fd), {"nodes": nodes, "identity_rel": worst_rel, "fd_max_error": worst_fd}


def check_rw_detector(cfg: SuiteConfig):
    rng = np.random.default_rng([cfg.seed, 5])
    disagreements = 0
    violations = 0
    checks = 0
    for _ in range(cfg.detector_graphs):
        n = int(rng.integers(1, cfg.detector_max_n + 1))
        g = erdos_renyi(n, float(rng.uniform(0.05, 0.8)), rng)
        for k in range(1, cfg.detector_max_k + 1):
            res = rw_walk_detector(g, k)
            oracle = closed_walk_diagonal(g, k) > 0
            disagreements += int((res.node_hits != oracle).sum())
            disagreements += int(res.detected != bool(oracle.any()))
            violations += len(res.violations)
            checks += 1
    ok = disagreements == 0 and violations == 0
    return ok, float(disagreements), {"runs": checks, "disagreements": disagreements, "threshold_violations": violations}


CHECKS: dict[str, list[tuple[str, Callable]]] = {
    "t4": [("t4.rw_equality", check_gm_rw_equality), ("t4.planarity_flip", check_gm_planarity_flip)],
    "t1": [("t1.bipartite_twin", check_bipartite_twin), ("t1.clique_join_twin", check_clique_join_twin)],
    "lemma": [("lemma.twin_edge", check_twin_edge_lemma)],
    "t3": [("t3.s5_gadget", check_s5_gadget)],
    "t5": [("t5.disjointness", check_disjointness)],
    "t7": [("t7.gradient_identity", check_gradient_identity)],
    "rw": [("rw.detector", check_rw_detector)],
}


def run_verification_suite(config: SuiteConfig | None = None) -> VerificationReport:
    """Run the selected check groups in a fixed order; a failing or crashing
    check is recorded and the rest still run."""
    cfg = config if config is not None else SuiteConfig()
    unknown = set(cfg.groups) - set(GROUPS)
    if unknown:
        raise ValueError(f"unknown check groups: {sorted(unknown)}")
    report = VerificationReport()
    for group in GROUPS:
        if group not in cfg.groups:
            continue
        for name, fn in CHECKS[group]:
            start = time.perf_counter()
            try:
                passed, residual, detail = fn(cfg)
            except Exception as exc:  # noqa: BLE001 - a crashing check is a failed check
                passed, residual, detail = False, math.inf, {"error": f"{type(exc).__name__}: {exc}"}
            elapsed = (time.perf_counter() - start) * 1000
            report.checks.append(CheckResult(name, bool(passed), float(residual), elapsed, detail))
    return report
