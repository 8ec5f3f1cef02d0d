"""Repeated zigzag over a BSC with feedback.

The idealized analysis treats messages as infinitely divisible: after ``k``
uses the posterior is ``k+1`` equal-probability cliques with binomial sizes,
and the guessing time after ``n`` uses is ``2**(nR-1) (1 - B_n)``.  The
discrete scheme is simulated by Monte Carlo for comparison.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

import numpy as np

from .core import FLOAT, RATIONAL, check_noise, to_scalar

MEMORY_BUDGET = 1 << 27  # posterior entries held at once across a trial chunk
# Slack c in ``mean rank <= ideal + c n^2`` for leftover symbols.  Least-squares
# fits over calibration seeds 1..4 (M=256, p=0.1, n<=16, 20000 trials) gave
# 0.0036..0.0045; rounded up.
LEFTOVER_CONSTANT = 0.005


@dataclass(frozen=True)
class CliqueProfile:
    k: int
    sizes: tuple
    probs: tuple

    def total_size(self):
        return sum(self.sizes)

    def total_mass(self):
        return sum(m * q for m, q in zip(self.sizes, self.probs))


def clique_profile(n: int, p, M, mode: str = RATIONAL) -> list:
    """Clique sizes ``M 2^-k C(k,j)`` and member probabilities ``2^k p^j (1-p)^(k-j) / M``."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    p = check_noise(p, mode)
    M = to_scalar(M, mode)
    if M <= 0:
        raise ValueError("M must be positive")
    out = []
    for k in range(n + 1):
        scale = to_scalar(Fraction(1, 2 ** k), mode)
        sizes = tuple(M * scale * comb(k, j) for j in range(k + 1))
        probs = tuple(2 ** k * p ** j * (1 - p) ** (k - j) / M for j in range(k + 1))
        out.append(CliqueProfile(k, sizes, probs))
    return out


@dataclass
class SeriesTable:
    """Numeric columns indexed by ``n``; :meth:`to_csv` writes a header row."""

    index: list
    columns: dict = field(default_factory=dict)
    index_name: str = "n"

    def __post_init__(self):
        if any(b <= a for a, b in zip(self.index, self.index[1:])):
            raise ValueError("index must be strictly increasing")
        for name, col in self.columns.items():
            if len(col) != len(self.index):
                raise ValueError(f"column {name!r} has the wrong length")

    def column(self, name: str) -> list:
        return self.columns[name]

    def rows(self):
        names = list(self.columns)
        for r, idx in enumerate(self.index):
            yield [idx] + [self.columns[c][r] for c in names]

    def to_csv(self, preamble: str | None = None) -> str:
        buf = io.StringIO()
        if preamble:
            buf.write(f"# {preamble}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow([self.index_name] + list(self.columns))
        for row in self.rows():
            writer.writerow([_csv_cell(v) for v in row])
        return buf.getvalue()


def _csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _rational_p(p) -> Fraction:
    return check_noise(p, RATIONAL)


def b_terms(p, n_max: int) -> list:
    """Exact inner terms ``t_k = ((1-p)/2)^k sum_j C(k,j)^2 (p/(1-p))^j`` for ``k < n_max``."""
    p = _rational_p(p)
    a, b = p.numerator, p.denominator
    out = []
    for k in range(n_max):
        num = sum(comb(k, j) ** 2 * a ** j * (b - a) ** (k - j) for j in range(k + 1))
        out.append(Fraction(num, (2 * b) ** k))
    return out


def b_values(p, n_max: int) -> list:
    """Exact ``B_0 .. B_{n_max}`` (``B_0 = 0``).

    The endpoints are the limits of the same sum: ``B_n = 1 - 2^-n`` at
    ``p = 0`` and ``B_n = 0`` at ``p = 1/2``.
    """
    p = _rational_p(p)
    lead = Fraction(1, 2) - p
    values = [Fraction(0)]
    acc = Fraction(0)
    for t in b_terms(p, n_max):
        acc += t
        values.append(lead * acc)
    return values


def b_series(p, n_max: int) -> SeriesTable:
    """``B_n`` and ``1 - B_n`` for ``n = 1..n_max``.

    Computed exactly and only then rounded, so ``1 - B_n`` keeps full relative
    precision even when it is far below machine epsilon.
    """
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    values = b_values(p, n_max)[1:]
    return SeriesTable(
        list(range(1, n_max + 1)),
        {
            "B_n": [float(v) for v in values],
            "one_minus_B_n": [float(1 - v) for v in values],
        },
    )


def legendre_values(k: int, x):
    """``P_0(x) .. P_k(x)`` by Bonnet's recurrence; exact for rational ``x``."""
    if k < 0:
        raise ValueError("degree must be nonnegative")
    one = x ** 0
    vals = [one, x]
    for m in range(1, k):
        vals.append(((2 * m + 1) * x * vals[m] - m * vals[m - 1]) / (m + 1))
    return vals[: k + 1]


def legendre(k: int, x):
    return legendre_values(k, x)[k]


def binomial_square_sum(k: int, alpha):
    return sum(comb(k, j) ** 2 * alpha ** j for j in range(k + 1))


@dataclass(frozen=True)
class LegendreCheck:
    p_k: object
    sum_identity_residual: object
    generating_partial_residual: float


def legendre_check(k: int, alpha, x, terms: int = 200) -> LegendreCheck:
    """Residuals of the two Legendre identities used in the rate analysis.

    ``sum_j C(k,j)^2 alpha^j = (1-alpha)^k P_k((1+alpha)/(1-alpha))`` is exact
    for rational ``alpha``.  The generating function ``sum_k alpha^k P_k(x)``
    is compared through its first ``terms`` terms with
    ``(1 + alpha^2 - 2 alpha x)^(-1/2)``; it converges when
    ``alpha (x + sqrt(x^2 - 1)) < 1``.
    """
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    if k < 0:
        raise ValueError("degree must be nonnegative")
    xs = (1 + alpha) / (1 - alpha)
    lhs = binomial_square_sum(k, alpha)
    rhs = (1 - alpha) ** k * legendre(k, xs)
    fa, fx = float(alpha), float(x)
    partial = math.fsum(fa ** m * v for m, v in enumerate(legendre_values(terms - 1, fx)))
    base = 1.0 + fa * fa - 2.0 * fa * fx
    gap = abs(partial - 1.0 / math.sqrt(base)) if base > 0 else math.inf
    return LegendreCheck(legendre(k, x), lhs - rhs, gap)


def binary_entropy(a: float) -> float:
    if a <= 0.0 or a >= 1.0:
        return 0.0
    return -a * math.log2(a) - (1 - a) * math.log2(1 - a)


def renyi_half_binary(p) -> float:
    """``h_1/2(p) = 2 log2(sqrt(p) + sqrt(1-p))``."""
    p = float(p)
    return 2.0 * math.log2(math.sqrt(p) + math.sqrt(1.0 - p))


def cutoff_rate(p) -> float:
    # Clamped: at p = 1/2 rounding would otherwise give -2e-16.
    return max(0.0, 1.0 - renyi_half_binary(p))


@dataclass(frozen=True)
class BetaStar:
    p: float
    alpha_star: float
    beta_star: float
    cutoff_rate: float
    grid_alpha: float
    refined_alpha: float
    identity_residual: float


def _beta_objective(alpha, p: float):
    """``2 h(alpha) + alpha log2(p / (1-p))``, vectorized over ``alpha``."""
    alpha = np.asarray(alpha, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        h = -alpha * np.log2(alpha) - (1 - alpha) * np.log2(1 - alpha)
    h = np.where((alpha <= 0) | (alpha >= 1), 0.0, h)
    return 2.0 * h + alpha * math.log2(p / (1.0 - p))


def beta_star(p, grid_step: float = 1e-4) -> BetaStar:
    """Closed-form maximizer ``alpha* = sqrt(p) / (sqrt(p) + sqrt(1-p))`` with a grid check.

    ``grid_alpha`` is the best point of the grid; ``refined_alpha`` adds one
    parabolic step through its neighbours, which is accurate to about 1e-8.

    ``p = 0`` is taken as the limit ``alpha* = beta* = 0``.
    """
    p = float(check_noise(p, FLOAT))
    sp, sq = math.sqrt(p), math.sqrt(1.0 - p)
    a_star = sp / (sp + sq)
    rate = cutoff_rate(p)
    if p == 0.0:
        return BetaStar(p, 0.0, 0.0, rate, 0.0, 0.0, abs(-(math.log2(0.5)) - rate))
    b_star = float(_beta_objective(a_star, p))
    steps = int(round(1.0 / grid_step))
    grid = np.linspace(0.0, 1.0, steps + 1)
    values = _beta_objective(grid, p)
    i = int(np.argmax(values))
    grid_alpha = float(grid[i])
    refined = grid_alpha
    if 0 < i < steps:
        # Vertex of the parabola through the best grid point and its neighbours.
        f0, f1, f2 = values[i - 1], values[i], values[i + 1]
        curv = f0 - 2.0 * f1 + f2
        if curv < 0:
            refined = grid_alpha + 0.5 * (grid[1] - grid[0]) * (f0 - f2) / curv
    residual = abs(-(math.log2((1.0 - p) / 2.0) + b_star) - rate)
    return BetaStar(p, a_star, b_star, rate, grid_alpha, float(refined), residual)


def _log2_fraction(x: Fraction) -> float:
    if x <= 0:
        return -math.inf
    num, den = x.numerator, x.denominator
    shift = num.bit_length() - den.bit_length()
    # Bring the ratio into float range before taking the logarithm.
    scaled = Fraction(num, den) / Fraction(2) ** shift
    return shift + math.log2(float(scaled))


@dataclass(frozen=True)
class IdealCurve:
    table: SeriesTable
    rate: float
    cutoff: float
    below_cutoff: bool
    fitted_exponent: float
    log2_g: tuple


def ideal_guessing_curve(R, p, n_max: int, M=None) -> IdealCurve:
    """Idealized guessing time ``g(n) = 2^(nR-1) (1 - B_n)``, ``n = 0..n_max``.

    With ``M`` given the message count is held fixed instead of growing as
    ``2^(nR)``.  ``fitted_exponent`` is the exponential growth rate of ``g``
    fitted over the upper half of the range (see :func:`_fit_exponent`); it
    approaches ``R - cutoff``.
    """
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    R = float(R)
    if M is None and R <= 0:
        raise ValueError("rate must be positive")
    values = b_values(p, n_max)
    log2_g = []
    for n, b in enumerate(values):
        log2_m = math.log2(float(M)) if M is not None else n * R
        log2_g.append(log2_m - 1 + _log2_fraction(1 - b))
    g = [2.0 ** v if v < 1000 else math.inf for v in log2_g]
    ns = list(range(n_max + 1))
    table = SeriesTable(
        ns,
        {
            "B_n": [float(b) for b in values],
            "one_minus_B_n": [float(1 - b) for b in values],
            "ideal_g": g,
        },
    )
    lo = max(1, n_max // 2)
    slope = _fit_exponent(ns[lo:], log2_g[lo:]) if n_max - lo >= 3 else math.nan
    cut = cutoff_rate(p)
    return IdealCurve(table, R, cut, R < cut, slope, tuple(log2_g))


def _fit_exponent(ns, log2_ys) -> float:
    """Slope ``b`` of the least-squares fit ``log2 y = a + b n + c log2 n``.

    The ``log2 n`` column absorbs polynomial prefactors (``1 - B_n`` carries an
    ``n^(-1/2)`` one), which a plain linear fit would fold into the slope.
    """
    ns = np.asarray(ns, dtype=float)
    X = np.column_stack([np.ones_like(ns), ns, np.log2(ns)])
    coef = np.linalg.lstsq(X, np.asarray(log2_ys, dtype=float), rcond=None)[0]
    return float(coef[1])


def decay_exponent(p, n_lo: int = 40, n_hi: int = 80) -> float:
    """Exponential decay rate of ``1 - B_n`` fitted over ``n_lo..n_hi``."""
    if not 1 <= n_lo < n_hi - 1:
        raise ValueError("need 1 <= n_lo < n_hi - 1")
    values = b_values(p, n_hi)
    ns = range(n_lo, n_hi + 1)
    return -_fit_exponent(ns, [_log2_fraction(1 - values[n]) for n in ns])


# --------------------------------------------------------------------------
# Monte Carlo of the discrete scheme

POLICIES = ("mass", "left", "zigzag")


@dataclass(frozen=True)
class SchemeTrace:
    M: int
    p: float
    n: int
    trials: int
    seed: int
    policy: str
    ranks: np.ndarray  # (trials, n): rank of the true message after each step
    resolved_step: np.ndarray  # first step the true message is alone on top, 0 if never
    max_drift: float

    @property
    def final_ranks(self) -> np.ndarray:
        if self.n == 0:
            return np.full(self.trials, (self.M + 1) / 2)
        return self.ranks[:, -1]

    @property
    def step_means(self) -> np.ndarray:
        return self.ranks.mean(axis=0)

    @property
    def step_se(self) -> np.ndarray:
        if self.trials < 2:
            return np.zeros(self.n)
        return self.ranks.std(axis=0, ddof=1) / math.sqrt(self.trials)

    @property
    def mean_rank(self) -> float:
        return float(np.mean(self.final_ranks))

    @property
    def se(self) -> float:
        if self.trials < 2:
            return 0.0
        return float(np.std(self.final_ranks, ddof=1) / math.sqrt(self.trials))


def _class_key(counts: np.ndarray, p: float) -> np.ndarray:
    """Integer key that orders symbols exactly as the posterior does.

    The posterior of a symbol is proportional to ``p^j (1-p)^(k-j)`` where ``j``
    counts the answers that contradicted it, so ``j`` itself ranks them.
    """
    if p == 0.0:
        return np.minimum(counts, 1)
    if p == 0.5:
        return np.zeros_like(counts)
    return counts


def _rank_of(key: np.ndarray, msg: np.ndarray) -> np.ndarray:
    rows = np.arange(key.shape[0])
    mine = key[rows, msg][:, None]
    idx = np.arange(key.shape[1])[None, :]
    ahead = (key < mine) | ((key == mine) & (idx < msg[:, None]))
    return ahead.sum(axis=1) + 1


def _zigzag_sides(key: np.ndarray, post: np.ndarray, policy: str) -> np.ndarray:
    """Boolean side ``A`` for every symbol, in original index order."""
    t, m = key.shape
    order = np.argsort(key, axis=1, kind="stable")
    skey = np.take_along_axis(key, order, axis=1)
    pos = np.broadcast_to(np.arange(m), (t, m))
    if policy == "zigzag":
        side_sorted = pos % 2 == 0
    else:
        new = np.ones((t, m), dtype=bool)
        new[:, 1:] = skey[:, 1:] != skey[:, :-1]
        start = np.maximum.accumulate(np.where(new, pos, 0), axis=1)
        last = np.ones((t, m), dtype=bool)
        last[:, :-1] = skey[:, 1:] != skey[:, :-1]
        end = np.minimum.accumulate(np.where(last, pos, m - 1)[:, ::-1], axis=1)[:, ::-1]
        within = pos - start
        size = end - start + 1
        side_sorted = within % 2 == 0
        if policy == "mass":
            leftover = (size % 2 == 1) & (within == size - 1)
            cls = np.cumsum(new, axis=1) - 1
            spost = np.take_along_axis(post, order, axis=1)
            n_cls = int(cls.max()) + 1
            lmass = np.zeros((t, n_cls))
            has = np.zeros((t, n_cls), dtype=bool)
            tr, cc = np.nonzero(leftover)
            lmass[tr, cls[tr, cc]] = spost[tr, cc]
            has[tr, cls[tr, cc]] = True
            goes_a = np.zeros((t, n_cls), dtype=bool)
            diff = np.zeros(t)  # mass(A) - mass(not A) from earlier leftovers
            for c in range(n_cls):
                choose = diff <= 0.0
                goes_a[:, c] = choose
                diff += np.where(has[:, c], np.where(choose, lmass[:, c], -lmass[:, c]), 0.0)
            side_sorted = np.where(leftover, goes_a[np.arange(t)[:, None], cls], side_sorted)
    sides = np.empty((t, m), dtype=bool)
    np.put_along_axis(sides, order, side_sorted, axis=1)
    return sides


def _simulate_chunk(M, p, n, msgs, flips, policy):
    t = msgs.size
    rows = np.arange(t)
    counts = np.zeros((t, M), dtype=np.int32)
    post = np.full((t, M), 1.0 / M)
    ranks = np.zeros((t, n), dtype=np.int64)
    resolved = np.zeros(t, dtype=np.int64)
    drift = 0.0
    for step in range(n):
        key = _class_key(counts, p)
        sides = _zigzag_sides(key, post, policy)
        x = sides[rows, msgs]
        y = x ^ flips[:, step]
        agree = sides == y[:, None]
        post = post * np.where(agree, 1.0 - p, p)
        post /= post.sum(axis=1, keepdims=True)
        drift = max(drift, float(np.max(np.abs(post.sum(axis=1) - 1.0))))
        counts += ~agree
        key = _class_key(counts, p)
        ranks[:, step] = _rank_of(key, msgs)
        top = key.min(axis=1)
        alone = ((key == top[:, None]).sum(axis=1) == 1) & (key[rows, msgs] == top)
        resolved = np.where((resolved == 0) & alone, step + 1, resolved)
    return ranks, resolved, drift


def trial_seed_base(seed: int) -> int:
    """64-bit mix of ``seed``; small seeds XORed with trial indices would
    otherwise just permute the same per-trial streams."""
    return int(np.random.SeedSequence(seed).generate_state(1, np.uint64)[0])


def simulate_feedback_scheme(
    M: int,
    p,
    n: int,
    trials: int,
    seed: int = 0,
    policy: str = "mass",
    memory_budget: int = MEMORY_BUDGET,
) -> SchemeTrace:
    """Monte Carlo of the repeated-zigzag feedback scheme.

    Each trial draws a uniform message and ``n`` channel flips from its own
    generator seeded with ``trial_seed_base(seed) ^ trial``, so results do not depend on how
    trials are chunked.  At every step the posterior is sorted (ties by index),
    each equal-probability class is split alternately, and an odd class's
    leftover member is placed by ``policy``:

    ``"mass"``   side with the smaller posterior mass so far (ties to ``A``),
    ``"left"``   always ``A``,
    ``"zigzag"`` plain alternation over the whole sorted list.
    """
    if M < 2:
        raise ValueError("need at least two messages")
    if trials < 1:
        raise ValueError("need at least one trial")
    if n < 0:
        raise ValueError("n must be nonnegative")
    if policy not in POLICIES:
        raise ValueError(f"unknown leftover policy {policy!r}")
    if M > memory_budget:
        raise ValueError(f"M={M} exceeds the memory budget of {memory_budget} entries")
    p = float(check_noise(p, FLOAT))
    base = trial_seed_base(seed)
    msgs = np.empty(trials, dtype=np.int64)
    flips = np.empty((trials, n), dtype=bool)
    for i in range(trials):
        rng = np.random.default_rng(base ^ i)
        msgs[i] = rng.integers(M)
        flips[i] = rng.random(n) < p
    chunk = max(1, min(trials, memory_budget // M, 4096))
    ranks, resolved, drift = [], [], 0.0
    for start in range(0, trials, chunk):
        r, s, d = _simulate_chunk(M, p, n, msgs[start:start + chunk], flips[start:start + chunk], policy)
        ranks.append(r)
        resolved.append(s)
        drift = max(drift, d)
    if drift >= 1e-9:
        raise AssertionError(f"posterior normalization drifted by {drift}")
    return SchemeTrace(
        M, p, n, trials, seed, policy, np.concatenate(ranks), np.concatenate(resolved), drift
    )


def fit_leftover_constant(trace: SchemeTrace, ideal) -> float:
    """Least-squares ``c`` in ``step_mean(n) - ideal(n) = c n^2`` over ``n = 1..trace.n``.

    ``ideal`` holds the ideal curve for ``n = 0..trace.n`` at the same ``M``.
    """
    ns = np.arange(1, trace.n + 1, dtype=float)
    excess = trace.step_means - np.asarray(ideal, dtype=float)[1 : trace.n + 1]
    return float(np.dot(excess, ns ** 2) / np.dot(ns ** 2, ns ** 2))


def leftover_budget(n: int) -> int:
    """Upper bound on leftover symbols over ``n`` steps: one per clique per step."""
    return n * (n + 1) // 2
