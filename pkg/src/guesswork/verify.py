"""Property suites behind ``guesswork verify``.

Each suite walks random exact instances in increasing size and stops at the
first failure, so the reported instance is the smallest one found.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .core import RATIONAL, Distribution, Partition, guess_time_after_question, guessing_time
from .cutoff import b_values, legendre, legendre_check
from .graph import (
    brute_force_maxcut,
    c_partition_audit,
    connectivity_report,
    cut_weight,
    greedy_maxcut,
    monotonicity_additivity_audit,
    quadratic_cut,
    weight_matrix,
    zigzag_partition,
)
from .io import distribution_to_json
from .search import DEFAULT_P_GRID, random_distribution
from .spectral import psd_certificate

SUITES = ("psd", "graph", "cpartition", "legendre")


@dataclass
class SuiteResult:
    suite: str
    checked: int = 0
    failure: dict | None = None
    notes: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.failure is None


def _instances(count: int, seed: int, n_min: int, n_max: int, p_grid, even: bool = False):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        n = int(rng.integers(n_min, n_max + 1))
        if even and n % 2:
            n += -1 if n == n_max else 1
        D = random_distribution(n, rng, RATIONAL, noise_levels=p_grid)
        p = p_grid[int(rng.integers(len(p_grid)))]
        out.append((D, Fraction(p)))
    out.sort(key=lambda item: item[0].n)
    return out


def _fail(result: SuiteResult, check: str, D: Distribution, p, **extra) -> SuiteResult:
    result.failure = {
        "check": check,
        "distribution": distribution_to_json(D),
        "p": f"{p.numerator}/{p.denominator}",
        **extra,
    }
    return result


def psd_suite(instances: int = 1000, seed: int = 0, n_max: int = 12, p_grid=DEFAULT_P_GRID) -> SuiteResult:
    res = SuiteResult("psd")
    for D, p in _instances(instances, seed, 2, n_max, p_grid):
        cert = psd_certificate(weight_matrix(D, p))
        res.checked += 1
        if not cert.ok:
            return _fail(res, "psd_certificate", D, p, certificate=repr(cert))
    return res


def graph_suite(instances: int = 200, seed: int = 0, n_max: int = 8, p_grid=DEFAULT_P_GRID) -> SuiteResult:
    """Cut identity over every question, greedy = zigzag, half-MAXCUT, edge pattern."""
    res = SuiteResult("graph")
    for D, p in _instances(instances, seed, 2, n_max, p_grid):
        W = weight_matrix(D, p)
        g = guessing_time(D)
        for mask in range(1, 1 << D.n, 2):
            A = Partition.from_mask(D.n, mask)
            cut = cut_weight(W, A)
            if guess_time_after_question(D, A, p) != g - cut:
                return _fail(res, "cut_identity", D, p, members=A.sorted_members())
            if quadratic_cut(W, A) != cut:
                return _fail(res, "quadratic_form", D, p, members=A.sorted_members())
        zz = zigzag_partition(D.n)
        if greedy_maxcut(W) != zz.canonical():
            return _fail(res, "greedy_is_zigzag", D, p)
        _, best = brute_force_maxcut(W)
        if 2 * cut_weight(W, zz) < best:
            return _fail(res, "half_maxcut", D, p)
        conn = connectivity_report(D, p)
        if conn.edges != frozenset((i, j) for i, j, _ in W.edges()):
            return _fail(res, "connectivity", D, p)
        audit = monotonicity_additivity_audit(W)
        if not audit.ok:
            return _fail(res, "monotonicity_additivity", D, p, violations=repr(audit.violations[:5]))
        res.checked += 1
    return res


def cpartition_suite(instances: int = 200, seed: int = 0, n_max: int = 10, p_grid=DEFAULT_P_GRID) -> SuiteResult:
    res = SuiteResult("cpartition")
    for D, p in _instances(instances, seed, 2, n_max, p_grid, even=True):
        audit = c_partition_audit(D, p)
        res.checked += 1
        if not audit.ok:
            return _fail(res, "c_partition", D, p, violations=[list(map(str, v)) for v in audit.violations])
    return res


def legendre_suite(max_degree: int = 25, alphas=(Fraction(1, 9), Fraction(1, 4), Fraction(1, 2))) -> SuiteResult:
    res = SuiteResult("legendre")
    for alpha in alphas:
        for k in range(max_degree + 1):
            chk = legendre_check(k, alpha, Fraction(1, 2))
            res.checked += 1
            if chk.sum_identity_residual != 0:
                res.failure = {"check": "sum_identity", "k": k, "alpha": str(alpha)}
                return res
    for p in (Fraction(1, 20), Fraction(1, 10), Fraction(1, 4), Fraction(2, 5)):
        alpha = Fraction(1, 2) - p
        x = 1 / (1 - 2 * p)
        # Series ratio alpha (x + sqrt(x^2 - 1)); near 1 the terms overflow first.
        ratio = (1 + 2 * math.sqrt(p * (1 - p))) / 2
        if ratio < 0.95:
            terms = int(math.log(1e-14) / math.log(ratio)) + 20
            chk = legendre_check(1, alpha, x, terms=terms)
            res.checked += 1
            if chk.generating_partial_residual >= 1e-9:
                res.failure = {"check": "generating_function", "p": str(p),
                               "residual": chk.generating_partial_residual}
                return res
        # Partial sums of B_n against the Legendre form, exactly.
        bs = b_values(p, 30)
        acc = Fraction(0)
        for k in range(30):
            acc += alpha ** k * legendre(k, x)
            res.checked += 1
            if bs[k + 1] != alpha * acc:
                res.failure = {"check": "b_partial_sums", "p": str(p), "k": k}
                return res
    return res


def run_suite(name: str, instances: int | None = None, seed: int = 0, p_grid=None) -> SuiteResult:
    grid = tuple(Fraction(p) for p in p_grid) if p_grid else DEFAULT_P_GRID
    if name == "psd":
        return psd_suite(instances or 1000, seed, p_grid=grid)
    if name == "graph":
        return graph_suite(instances or 200, seed, p_grid=grid)
    if name == "cpartition":
        return cpartition_suite(instances or 200, seed, p_grid=grid)
    if name == "legendre":
        return legendre_suite()
    raise ValueError(f"unknown suite {name!r}")


__all__ = [
    "SUITES",
    "SuiteResult",
    "cpartition_suite",
    "graph_suite",
    "legendre_suite",
    "psd_suite",
    "run_suite",
]
