"""Distributions, posteriors after one noisy yes/no question, and guessing times.

Probabilities are carried either as exact ``Fraction`` values (``mode="rational"``)
or as binary64 floats (``mode="float"``).  Every function that mixes a noise level
with a distribution first coerces the noise level into the distribution's mode, so
rational inputs stay exact end to end.

Symbols are labelled ``1..N`` in descending order of probability, matching the
usual convention for guessing problems; Python-side lists are 0-based.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational, Real
from typing import Iterable, Sequence, Union

import numpy as np

Scalar = Union[Fraction, float]

RATIONAL = "rational"
FLOAT = "float"
MODES = (RATIONAL, FLOAT)

FLOAT_SUM_TOL = 1e-12
DEFAULT_BRUTE_LIMIT = 20


def default_brute_limit() -> int:
    """Brute-force size limit, overridable with ``GUESSWORK_BRUTE_LIMIT``."""
    raw = os.environ.get("GUESSWORK_BRUTE_LIMIT")
    if raw is None:
        return DEFAULT_BRUTE_LIMIT
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"GUESSWORK_BRUTE_LIMIT must be an integer, got {raw!r}") from None
    if value < 1:
        raise ValueError("GUESSWORK_BRUTE_LIMIT must be positive")
    return value


def to_scalar(value, mode: str) -> Scalar:
    """Coerce ``value`` into the arithmetic of ``mode``.

    In rational mode floats go through their shortest decimal repr, so ``0.1``
    becomes ``1/10`` rather than the binary expansion of the double.  Strings
    such as ``"3/10"`` or ``"0.3"`` are accepted in both modes.
    """
    if mode == RATIONAL:
        if isinstance(value, Fraction):
            return value
        if isinstance(value, (int, Rational)):
            return Fraction(value)
        if isinstance(value, float):
            if not math.isfinite(value):
                raise ValueError(f"non-finite value {value!r}")
            return Fraction(repr(value))
        if isinstance(value, str):
            return Fraction(value.strip())
        if isinstance(value, Real):
            return Fraction(repr(float(value)))
        raise TypeError(f"cannot convert {type(value).__name__} to a rational scalar")
    if mode == FLOAT:
        if isinstance(value, str):
            out = float(Fraction(value.strip()))
        else:
            out = float(value)
        if not math.isfinite(out):
            raise ValueError(f"non-finite value {value!r}")
        return out
    raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")


def format_scalar(value: Scalar) -> str:
    """Lossless text form: ``"num/den"`` for rationals, shortest repr for floats."""
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    return repr(float(value))


def check_noise(p, mode: str = RATIONAL) -> Scalar:
    """Validate a lying probability and return it in ``mode``."""
    q = to_scalar(p, mode)
    if not 0 <= q <= Fraction(1, 2):
        raise ValueError(f"noise level must lie in [0, 1/2], got {p!r}")
    return q


@dataclass(frozen=True)
class Distribution:
    """A probability vector sorted in non-increasing order.

    Build instances with :func:`make_distribution`; the constructor only
    validates.
    """

    probs: tuple
    mode: str = RATIONAL

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        if not self.probs:
            raise ValueError("distribution must have at least one symbol")
        for a in self.probs:
            if self.mode == RATIONAL and not isinstance(a, Fraction):
                raise TypeError("rational distributions hold Fraction entries")
            if self.mode == FLOAT and not (isinstance(a, float) and math.isfinite(a)):
                raise TypeError("float distributions hold finite float entries")
            if a < 0:
                raise ValueError("probabilities must be nonnegative")
        if any(a < b for a, b in zip(self.probs, self.probs[1:])):
            raise ValueError("probabilities must be sorted in non-increasing order")
        total = sum(self.probs)
        if self.mode == RATIONAL and total != 1:
            raise ValueError(f"probabilities sum to {total}, not 1")
        if self.mode == FLOAT and abs(total - 1.0) > FLOAT_SUM_TOL:
            raise ValueError(f"probabilities sum to {total!r}, not 1")

    @property
    def n(self) -> int:
        return len(self.probs)

    def __len__(self) -> int:
        return len(self.probs)

    def __getitem__(self, i):
        return self.probs[i]

    def scalar(self, value) -> Scalar:
        return to_scalar(value, self.mode)

    def prob(self, i: int) -> Scalar:
        """Probability of symbol ``i`` (1-based); zero outside ``1..N``."""
        if 1 <= i <= self.n:
            return self.probs[i - 1]
        return self.scalar(0)

    def general_config(self, p) -> bool:
        """True iff all probabilities are distinct and no pair sits exactly on
        the edge threshold ``(1-p) min = p max`` at noise level ``p``."""
        p = self.scalar(p)
        probs = self.probs
        if len(set(probs)) != len(probs):
            return False
        for i in range(len(probs)):
            for j in range(i + 1, len(probs)):
                if (1 - p) * probs[j] == p * probs[i]:
                    return False
        return True

    def as_float(self) -> "Distribution":
        if self.mode == FLOAT:
            return self
        return make_distribution([float(a) for a in self.probs], FLOAT)

    def as_rational(self) -> "Distribution":
        """Exact rational twin; floats are converted bit-exactly, then renormalized."""
        if self.mode == RATIONAL:
            return self
        return make_distribution([Fraction(a) for a in self.probs], RATIONAL)


def make_distribution(raw: Iterable, mode: str = RATIONAL) -> Distribution:
    """Normalize ``raw`` weights and sort them in descending order.

    The sort is stable, so equal weights keep their input order.
    """
    values = [to_scalar(a, mode) for a in raw]
    if not values:
        raise ValueError("cannot build a distribution from an empty list")
    if any(a < 0 for a in values):
        raise ValueError("negative weight in distribution")
    total = sum(values)
    if total == 0:
        raise ValueError("all weights are zero")
    if mode == FLOAT and total == 1.0:
        normalized = values
    else:
        normalized = [a / total for a in values]
    order = sorted(range(len(normalized)), key=lambda i: -normalized[i])
    return Distribution(tuple(normalized[i] for i in order), mode)


@dataclass(frozen=True)
class Partition:
    """A binary question ``is X in A?`` over symbols ``1..n``."""

    n: int
    members: frozenset

    def __post_init__(self):
        object.__setattr__(self, "members", frozenset(self.members))
        if self.n < 1:
            raise ValueError("partition size must be positive")
        if any(not 1 <= i <= self.n for i in self.members):
            raise ValueError(f"members must lie in 1..{self.n}")

    @classmethod
    def from_mask(cls, n: int, mask: int) -> "Partition":
        """Bit ``i-1`` of ``mask`` set means symbol ``i`` is in ``A``."""
        return cls(n, frozenset(i + 1 for i in range(n) if mask >> i & 1))

    @classmethod
    def from_x(cls, x: Sequence[int]) -> "Partition":
        return cls(len(x), frozenset(i + 1 for i, v in enumerate(x) if v == 1))

    @property
    def mask(self) -> int:
        return sum(1 << (i - 1) for i in self.members)

    @property
    def x(self) -> tuple:
        """Assignment vector: ``+1`` for members of ``A``, ``-1`` otherwise."""
        return tuple(1 if i in self.members else -1 for i in range(1, self.n + 1))

    def __contains__(self, i) -> bool:
        return i in self.members

    def complement(self) -> "Partition":
        return Partition(self.n, frozenset(range(1, self.n + 1)) - self.members)

    def canonical(self) -> "Partition":
        """Representative of ``{A, complement(A)}`` that contains symbol 1."""
        return self if 1 in self.members else self.complement()

    def sorted_members(self) -> list:
        return sorted(self.members)


def _check_sizes(D: Distribution, A: Partition) -> None:
    if A.n != D.n:
        raise ValueError(f"partition over {A.n} symbols used with a distribution over {D.n}")


def guessing_time(D: Distribution) -> Scalar:
    """Expected number of guesses when guessing in descending order."""
    return sum((i * a for i, a in enumerate(D.probs, start=1)), D.scalar(0))


def order_function(values: Sequence) -> tuple:
    """Rank of each entry under descending order, ties to the smaller index.

    >>> order_function([0.25, 0.25, 0.5])
    (2, 3, 1)
    """
    if isinstance(values, Distribution):
        values = values.probs
    order = sorted(range(len(values)), key=lambda i: -values[i])
    ranks = [0] * len(values)
    for r, i in enumerate(order, start=1):
        ranks[i] = r
    return tuple(ranks)


@dataclass(frozen=True)
class Posterior:
    """Posterior of ``X`` after the answer ``y`` to the question ``A``."""

    y: int
    answer_prob: Scalar
    posterior: tuple
    order: tuple


def _joint_masses(D: Distribution, A: Partition, p: Scalar, y: int) -> list:
    """Unnormalized ``P(X=i, Y=y)``: the truthful side gets ``(1-p) p_i``."""
    return [
        (1 - p) * a if (i in A) == bool(y) else p * a
        for i, a in enumerate(D.probs, start=1)
    ]


def answer_probability(D: Distribution, A: Partition, p, y: int) -> Scalar:
    """Closed-form marginal ``1/2 (1 + (1-2y)(1-2p)(1-2 p_A))``."""
    _check_sizes(D, A)
    p = check_noise(p, D.mode)
    p_a = sum((D.probs[i - 1] for i in A.members), D.scalar(0))
    half = D.scalar(Fraction(1, 2))
    return half * (1 + (1 - 2 * y) * (1 - 2 * p) * (1 - 2 * p_a))


def posterior(D: Distribution, A: Partition, p, y: int) -> Posterior:
    """Bayes update of ``D`` after Carole answers ``y`` to ``is X in A?``.

    If the answer has probability zero (possible only when ``p = 0``), the
    conditional is undefined and the prior is returned with ``answer_prob = 0``.
    """
    if y not in (0, 1):
        raise ValueError("answer must be 0 or 1")
    _check_sizes(D, A)
    p = check_noise(p, D.mode)
    joint = _joint_masses(D, A, p, y)
    norm = answer_probability(D, A, p, y)
    if norm == 0:
        post = D.probs
    else:
        post = tuple(m / norm for m in joint)
    return Posterior(y, norm, tuple(post), order_function(post))


def posterior_report(D: Distribution, A: Partition, p) -> tuple:
    """Both answer rows ``(y=0, y=1)``."""
    return posterior(D, A, p, 0), posterior(D, A, p, 1)


def _integer_masses(D: Distribution, p: Fraction):
    """Scale ``(1-p) p_i`` and ``p p_i`` to integers over a common denominator."""
    den = math.lcm(p.denominator, *(a.denominator for a in D.probs))
    a_num = [a.numerator * (den // a.denominator) for a in D.probs]
    pn, pd = p.numerator, p.denominator
    hi = [(pd - pn) * a for a in a_num]
    lo = [pn * a for a in a_num]
    return hi, lo, den * pd


def _ranked_sum(masses: Sequence) -> object:
    # Ties do not matter: equal masses contribute the same whichever rank they get.
    return sum(r * m for r, m in enumerate(sorted(masses, reverse=True), start=1))


def guess_time_after_question(D: Distribution, A: Partition, p) -> Scalar:
    """Expected guessing time after a noisy answer to ``is X in A?``.

    Sums ``P(y) E[posterior rank | y]`` over both answers.  Since the posterior
    is the joint mass divided by ``P(y)``, this equals the rank-weighted joint
    mass, which is what is computed (exactly, with integers, in rational mode).
    """
    _check_sizes(D, A)
    p = check_noise(p, D.mode)
    if D.mode == RATIONAL:
        hi, lo, den = _integer_masses(D, p)
        return _guess_time_scaled(hi, lo, A.mask, den)
    total = 0.0
    for y in (0, 1):
        total += _ranked_sum(_joint_masses(D, A, p, y))
    return total


def _guess_time_scaled(hi, lo, mask, den) -> Fraction:
    yes = [hi[i] if mask >> i & 1 else lo[i] for i in range(len(hi))]
    no = [lo[i] if mask >> i & 1 else hi[i] for i in range(len(hi))]
    return Fraction(_ranked_sum(yes) + _ranked_sum(no), den)


def _float_question_times(probs: np.ndarray, p: float, masks: np.ndarray) -> np.ndarray:
    n = probs.size
    bits = (masks[:, None] >> np.arange(n)) & 1
    inside = bits.astype(bool)
    hi = (1.0 - p) * probs
    lo = p * probs
    ranks = np.arange(1, n + 1, dtype=float)
    yes = -np.sort(-np.where(inside, hi, lo), axis=1)
    no = -np.sort(-np.where(inside, lo, hi), axis=1)
    return yes @ ranks + no @ ranks


def brute_force_opt_question(D: Distribution, p, limit: int | None = None):
    """Exhaustive minimum of :func:`guess_time_after_question`.

    Symbol 1 is fixed inside ``A`` (a question and its complement are
    equivalent), so ``2**(N-1)`` subsets are scanned.  The first minimizer in
    increasing mask order is returned together with its value.
    """
    limit = default_brute_limit() if limit is None else limit
    if D.n > limit:
        raise ValueError(f"N={D.n} exceeds the brute-force limit {limit}")
    p = check_noise(p, D.mode)
    n = D.n
    masks = range(1, 1 << n, 2)
    if D.mode == RATIONAL:
        hi, lo, den = _integer_masses(D, p)
        best_mask, best = None, None
        for mask in masks:
            yes = [hi[i] if mask >> i & 1 else lo[i] for i in range(n)]
            no = [lo[i] if mask >> i & 1 else hi[i] for i in range(n)]
            value = _ranked_sum(yes) + _ranked_sum(no)
            if best is None or value < best:
                best_mask, best = mask, value
        return Partition.from_mask(n, best_mask), Fraction(best, den)
    probs = np.asarray(D.probs, dtype=float)
    best_mask, best = None, None
    chunk = 1 << 14
    all_masks = np.arange(1, 1 << n, 2, dtype=np.int64)
    for start in range(0, all_masks.size, chunk):
        block = all_masks[start:start + chunk]
        values = _float_question_times(probs, float(p), block)
        k = int(np.argmin(values))
        if best is None or values[k] < best:
            best_mask, best = int(block[k]), float(values[k])
    return Partition.from_mask(n, best_mask), best


@dataclass(frozen=True)
class EntropyMeasures:
    shannon: float
    renyi_half: float
    massey_lb: float


def shannon_entropy(D: Distribution) -> float:
    return -sum(float(a) * math.log2(float(a)) for a in D.probs if a > 0)


def renyi_half_entropy(D: Distribution) -> float:
    return 2.0 * math.log2(sum(math.sqrt(float(a)) for a in D.probs))


def entropy_measures(D: Distribution) -> EntropyMeasures:
    """Shannon and order-1/2 Renyi entropies (bits) and Massey's bound ``2**H/4 + 1``."""
    h = shannon_entropy(D)
    return EntropyMeasures(h, renyi_half_entropy(D), 2.0 ** h / 4 + 1)


@dataclass(frozen=True)
class MultiQuestionTime:
    value: Scalar
    lower: Scalar
    upper: Scalar


def multi_question_time(D: Distribution, k: int) -> MultiQuestionTime:
    """Optimal noiseless guessing time after ``k`` adaptive questions.

    The ``2**k``-ary zigzag sends symbol ``i`` to cell ``(i-1) mod 2**k``; the
    symbol then has rank ``ceil(i / 2**k)`` inside its cell.
    """
    if k < 0:
        raise ValueError("number of questions must be nonnegative")
    cells = 1 << k
    value = sum(
        ((-(-i // cells)) * a for i, a in enumerate(D.probs, start=1)), D.scalar(0)
    )
    g = guessing_time(D)
    scale = D.scalar(Fraction(1, cells))
    half = D.scalar(Fraction(1, 2))
    return MultiQuestionTime(value, scale * (g - half) + half, scale * (g - 1) + 1)


def example1_distribution(n: int, k: int, p, alpha, beta, mode: str = RATIONAL) -> Distribution:
    """Distribution for which asking about symbol ``k`` alone is the best singleton question.

    Consecutive ratios are ``alpha/(1-alpha)`` except between symbols ``k`` and
    ``k+1`` where the ratio is ``beta/(1-beta)``; with ``alpha < p < beta`` the
    only edge of the weighted graph is ``(k, k+1)``.
    """
    p, alpha, beta = (to_scalar(v, mode) for v in (p, alpha, beta))
    if not 0 < alpha < p < beta < Fraction(1, 2):
        raise ValueError("need 0 < alpha < p < beta < 1/2")
    if not 1 <= k <= n - 1:
        raise ValueError("need 1 <= k <= n-1")
    small = alpha / (1 - alpha)
    big = beta / (1 - beta)
    q = [to_scalar(1, mode)]
    for i in range(2, n + 1):
        q.append(q[-1] * (big if i == k + 1 else small))
    return make_distribution(q, mode)


def _is_doubly_stochastic(M, n: int, exact: bool) -> bool:
    if len(M) != n or any(len(row) != n for row in M):
        return False
    if any(v < 0 for row in M for v in row):
        return False
    sums = [sum(row) for row in M] + [sum(M[i][j] for i in range(n)) for j in range(n)]
    if exact:
        return all(s == 1 for s in sums)
    return all(abs(float(s) - 1.0) <= 1e-10 for s in sums)


def apply_doubly_stochastic(D: Distribution, M) -> Distribution:
    """Push ``D`` through the channel ``M`` (row-vector convention ``P' = P M``)."""
    n = D.n
    rows = [[D.scalar(v) for v in row] for row in M]
    if not _is_doubly_stochastic(rows, n, exact=D.mode == RATIONAL):
        raise ValueError("matrix is not an NxN doubly stochastic matrix")
    out = [sum((D.probs[i] * rows[i][j] for i in range(n)), D.scalar(0)) for j in range(n)]
    return make_distribution(out, D.mode)


def product_distribution(D: Distribution, n: int) -> Distribution:
    """Distribution of ``n`` i.i.d. copies of ``D``."""
    if n < 1:
        raise ValueError("need at least one copy")
    probs = [D.scalar(1)]
    for _ in range(n):
        probs = [a * b for a in probs for b in D.probs]
    return make_distribution(probs, D.mode)
