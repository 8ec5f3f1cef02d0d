"""Random scans for counterexamples to zigzag optimality.

Every scanned instance also re-checks the proven inequalities (the
``(1-2p)/4`` gap bound, the half-MAXCUT bound, the PSD certificate and the
agreement of the two guessing-time routes).  A positive zigzag gap is a
finding, not an error; a broken inequality is an error.
"""
from __future__ import annotations

import hashlib
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from .core import (
    FLOAT,
    RATIONAL,
    Distribution,
    check_noise,
    default_brute_limit,
    format_scalar,
    brute_force_opt_question,
    guess_time_after_question,
    guessing_time,
    make_distribution,
    to_scalar,
)
from .graph import brute_force_maxcut, cut_weight, weight_matrix, zigzag_partition
from .io import distribution_to_json
from .spectral import psd_certificate

log = logging.getLogger(__name__)

GAP_THRESHOLD = 1e-9
ROUTE_TOL = 1e-10
DEFAULT_P_GRID = tuple(Fraction(k, 20) for k in range(11))


def random_distribution(
    N: int, seed, mode: str = FLOAT, noise_levels=(), max_retries: int = 10
) -> Distribution:
    """Uniform draw from the simplex (normalized exponential spacings), sorted.

    If the draw is not in general configuration at every level in
    ``noise_levels`` it is jittered by a relative amount below ``1e-9`` and
    re-checked, up to ``max_retries`` times.  In rational mode each
    coordinate is rounded to a denominator of at most ``10**6`` first.
    """
    if N < 2:
        raise ValueError("need at least two symbols")
    rng = np.random.default_rng(seed)
    weights = rng.exponential(size=N)
    for _ in range(max_retries + 1):
        if mode == RATIONAL:
            raw = [Fraction(float(w)).limit_denominator(10**6) for w in weights]
        else:
            raw = [float(w) for w in weights]
        D = make_distribution(raw, mode)
        if D.general_config(0) and all(D.general_config(p) for p in noise_levels):
            return D
        weights = weights * (1.0 + rng.uniform(-1e-9, 1e-9, size=N))
    raise RuntimeError(f"could not reach a general configuration after {max_retries} retries")


@dataclass(frozen=True)
class ScanConfig:
    n_min: int = 3
    n_max: int = 10
    p_grid: tuple = DEFAULT_P_GRID
    instances: int = 1000
    seed: int = 7
    mode: str = FLOAT
    brute_limit: int = field(default_factory=default_brute_limit)

    def validate(self) -> None:
        if self.n_min < 2 or self.n_max < self.n_min:
            raise ValueError("need 2 <= n_min <= n_max")
        if self.n_max > self.brute_limit:
            raise ValueError(f"n_max={self.n_max} exceeds the brute-force limit {self.brute_limit}")
        if self.instances < 1:
            raise ValueError("need at least one instance")
        if not self.p_grid:
            raise ValueError("empty p grid")
        for p in self.p_grid:
            check_noise(p, RATIONAL)
        if self.mode not in (FLOAT, RATIONAL):
            raise ValueError(f"unknown mode {self.mode!r}")


def instance_seed(seed: int, index: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([seed, index])


def digest(D: Distribution) -> str:
    return hashlib.sha256(json.dumps(distribution_to_json(D)).encode()).hexdigest()[:16]


@dataclass
class InstanceRecord:
    index: int
    n: int
    digest: str
    p: str
    g: float
    g_zz: float
    g_zz_via_cut: float
    g_opt: float
    gap: float
    gap_bound_margin: float
    half_maxcut_margin: float
    psd_ok: bool
    route_ok: bool
    candidate: bool = False
    verified_gap: str | None = None


def _evaluate(D: Distribution, p_raw, index: int, brute_limit: int) -> tuple:
    p = to_scalar(check_noise(p_raw, RATIONAL), D.mode)
    zz = zigzag_partition(D.n)
    W = weight_matrix(D, p)
    g = guessing_time(D)
    g_zz = guess_time_after_question(D, zz, p)
    cut_zz = cut_weight(W, zz)
    g_zz_cut = g - cut_zz
    _, g_opt = brute_force_opt_question(D, p, brute_limit)
    _, maxcut = brute_force_maxcut(W, brute_limit)
    bound = (1 - 2 * p) / 4
    gap = g_zz - g_opt
    if D.mode == RATIONAL:
        route_ok = g_zz == g_zz_cut
    else:
        route_ok = abs(g_zz - g_zz_cut) <= ROUTE_TOL
    tol = 0 if D.mode == RATIONAL else ROUTE_TOL
    rec = InstanceRecord(
        index=index,
        n=D.n,
        digest=digest(D),
        p=format_scalar(check_noise(p_raw, RATIONAL)),
        g=float(g),
        g_zz=float(g_zz),
        g_zz_via_cut=float(g_zz_cut),
        g_opt=float(g_opt),
        gap=float(gap),
        gap_bound_margin=float(bound - gap),
        half_maxcut_margin=float(cut_zz - maxcut / 2),
        psd_ok=psd_certificate(W).ok,
        route_ok=route_ok,
    )
    violations = []
    if gap < -tol or rec.gap_bound_margin < -tol:
        violations.append("gap_bound")
    if rec.half_maxcut_margin < -tol:
        violations.append("half_maxcut")
    if not rec.psd_ok:
        violations.append("psd")
    if not route_ok:
        violations.append("routes")
    positive = gap > 0 if D.mode == RATIONAL else gap > GAP_THRESHOLD
    if positive:
        # Re-verify on the exact twin before calling it a candidate.
        exact = D.as_rational()
        pe = check_noise(p_raw, RATIONAL)
        ge = guess_time_after_question(exact, zigzag_partition(exact.n), pe)
        _, oe = brute_force_opt_question(exact, pe, brute_limit)
        rec.verified_gap = format_scalar(ge - oe)
        rec.candidate = ge - oe > 0
    return rec, violations


def _scan_instance(args):
    config, index = args
    rng = np.random.default_rng(instance_seed(config.seed, index))
    n = int(rng.integers(config.n_min, config.n_max + 1))
    D = random_distribution(n, rng, config.mode, noise_levels=config.p_grid)
    out = []
    for p in config.p_grid:
        rec, violations = _evaluate(D, p, index, config.brute_limit)
        out.append((rec, violations, distribution_to_json(D)))
    return out


@dataclass
class ScanReport:
    config: ScanConfig
    records: list
    violations: list
    candidates: list

    @property
    def max_gap(self) -> float:
        return max((r.gap for r in self.records), default=0.0)

    def summary(self) -> dict:
        return {
            "instances": self.config.instances,
            "rows": len(self.records),
            "seed": self.config.seed,
            "mode": self.config.mode,
            "n_range": [self.config.n_min, self.config.n_max],
            "p_grid": [format_scalar(check_noise(p, RATIONAL)) for p in self.config.p_grid],
            "max_gap": self.max_gap,
            "min_gap_bound_margin": min((r.gap_bound_margin for r in self.records), default=0.0),
            "min_half_maxcut_margin": min((r.half_maxcut_margin for r in self.records), default=0.0),
            "violations": self.violations,
            "candidates": [c["record"] for c in self.candidates],
        }

    def jsonl(self) -> str:
        return "".join(json.dumps(asdict(r), sort_keys=True) + "\n" for r in self.records)


def conjecture_scan(config: ScanConfig, jobs: int = 1) -> ScanReport:
    """Scan random instances across the p grid; output does not depend on ``jobs``."""
    config.validate()
    tasks = [(config, i) for i in range(config.instances)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_scan_instance, tasks, chunksize=16))
    else:
        results = [_scan_instance(t) for t in tasks]
    records, violations, candidates = [], [], []
    for rows in results:
        for rec, bad, dist in rows:
            records.append(rec)
            if bad:
                violations.append({"record": asdict(rec), "checks": bad, "distribution": dist})
                log.error("inequality violated on instance %d p=%s: %s", rec.index, rec.p, bad)
            if rec.candidate:
                candidates.append({"record": asdict(rec), "distribution": dist})
                log.warning("zigzag gap %s on instance %d p=%s", rec.verified_gap, rec.index, rec.p)
    return ScanReport(config, records, violations, candidates)
