"""The weighted "passing" graph of a distribution and its cuts.

Two symbols ``i < j`` are joined with weight ``|(1-p) p_j - p p_i|_+``: the
expected amount by which a noisy answer can let ``j`` overtake ``i``.  The cut
weight of a question ``A`` is exactly the reduction in guessing time it buys.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .core import (
    RATIONAL,
    Distribution,
    Partition,
    Scalar,
    check_noise,
    default_brute_limit,
    guessing_time,
    make_distribution,
)


@dataclass(frozen=True)
class WeightMatrix:
    """Symmetric edge weights with diagonal ``(1-2p) p_i``.

    ``w`` is stored 0-based; :meth:`weight` is the 1-based total accessor that
    returns zero for indices outside ``1..n``.
    """

    n: int
    p: Scalar
    w: tuple
    mode: str = RATIONAL

    def weight(self, i: int, j: int) -> Scalar:
        if 1 <= i <= self.n and 1 <= j <= self.n:
            return self.w[i - 1][j - 1]
        return 0 * self.p

    def edge(self, i: int, j: int) -> Scalar:
        """Off-diagonal weight; self loops read as zero."""
        return 0 * self.p if i == j else self.weight(i, j)

    def edges(self):
        """Positive edges ``(i, j, w)`` with ``i < j``."""
        for i in range(1, self.n + 1):
            for j in range(i + 1, self.n + 1):
                if self.w[i - 1][j - 1] > 0:
                    yield i, j, self.w[i - 1][j - 1]

    def to_numpy(self) -> np.ndarray:
        return np.array([[float(v) for v in row] for row in self.w], dtype=float)

    def zero(self) -> Scalar:
        return 0 * self.p


def weight_matrix(D: Distribution, p) -> WeightMatrix:
    p = check_noise(p, D.mode)
    probs = D.probs
    n = D.n
    zero = D.scalar(0)
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            if i == j:
                row.append((1 - 2 * p) * probs[i])
            else:
                lo, hi = (probs[j], probs[i]) if i < j else (probs[i], probs[j])
                row.append(max(zero, (1 - p) * lo - p * hi))
        rows.append(tuple(row))
    return WeightMatrix(n, p, tuple(rows), D.mode)


def _check(W: WeightMatrix, A: Partition) -> None:
    if W.n != A.n:
        raise ValueError(f"partition over {A.n} symbols used with a {W.n}-vertex graph")


def cut_weight(W: WeightMatrix, A: Partition) -> Scalar:
    """Total weight of edges with exactly one endpoint in ``A``."""
    _check(W, A)
    inside = A.members
    outside = [j for j in range(1, W.n + 1) if j not in inside]
    return sum((W.w[i - 1][j - 1] for i in inside for j in outside), W.zero())


def quadratic_cut(W: WeightMatrix, A: Partition) -> Scalar:
    """Cut weight as ``1/4 sum_ij (1 - x_i x_j) w_ij``; the diagonal drops out."""
    _check(W, A)
    x = A.x
    total = sum(
        ((1 - x[i] * x[j]) * W.w[i][j] for i in range(W.n) for j in range(W.n)), W.zero()
    )
    return total / 4


def zigzag_partition(n: int) -> Partition:
    """Odd-ranked symbols ``{1, 3, 5, ...}``."""
    if n < 1:
        raise ValueError("need at least one symbol")
    return Partition(n, frozenset(range(1, n + 1, 2)))


def greedy_maxcut(W: WeightMatrix) -> Partition:
    """Greedy max-cut inserting vertices in descending probability order.

    Each vertex joins the side that adds more cut weight.  On a tie it goes
    opposite to the previous vertex, which keeps the zigzag alternation.
    """
    side = {}
    for v in range(1, W.n + 1):
        gain_in = sum((W.w[v - 1][u - 1] for u, s in side.items() if not s), W.zero())
        gain_out = sum((W.w[v - 1][u - 1] for u, s in side.items() if s), W.zero())
        if gain_in > gain_out:
            side[v] = True
        elif gain_out > gain_in:
            side[v] = False
        else:
            side[v] = not side[v - 1] if v > 1 else True
    return Partition(W.n, frozenset(v for v, s in side.items() if s)).canonical()


def _lex_key(mask: int, n: int) -> tuple:
    return tuple(mask >> i & 1 for i in range(n))


def _integer_weights(W: WeightMatrix):
    den = math.lcm(*(v.denominator for row in W.w for v in row))
    return [[int(v * den) for v in row] for row in W.w], den


def brute_force_maxcut(W: WeightMatrix, limit: int | None = None):
    """Exact maximum cut over all subsets containing vertex 1.

    Rational weights are scaled to integers and the subsets are walked in
    Gray-code order so each step costs ``O(N)``.  Ties go to the partition whose
    indicator string ``(x_1, ..., x_N)`` is lexicographically smallest.
    """
    limit = default_brute_limit() if limit is None else limit
    n = W.n
    if n > limit:
        raise ValueError(f"N={n} exceeds the brute-force limit {limit}")
    if n == 1:
        return Partition(1, frozenset({1})), W.zero()
    if W.mode == RATIONAL:
        w, den = _integer_weights(W)
        # Gray code over vertices 2..n; vertex 1 stays inside.
        mask = 1
        cut = sum(w[0][j] for j in range(1, n))
        best_mask, best = mask, cut
        for step in range(1, 1 << (n - 1)):
            bit = (step & -step).bit_length()  # vertex index (0-based) to flip
            inside = mask >> bit & 1
            delta = 0
            for j in range(n):
                if j == bit:
                    continue
                same = (mask >> j & 1) == inside
                delta += w[bit][j] if same else -w[bit][j]
            mask ^= 1 << bit
            cut += delta
            if cut > best or (cut == best and _lex_key(mask, n) < _lex_key(best_mask, n)):
                best_mask, best = mask, cut
        return Partition.from_mask(n, best_mask), Fraction(best, den)
    a = W.to_numpy()
    np.fill_diagonal(a, 0.0)
    total = a.sum()
    best_mask, best = None, None
    masks = np.arange(1, 1 << n, 2, dtype=np.int64)
    for start in range(0, masks.size, 1 << 14):
        block = masks[start:start + (1 << 14)]
        x = 2.0 * ((block[:, None] >> np.arange(n)) & 1) - 1.0
        values = 0.25 * (total - np.einsum("ki,ij,kj->k", x, a, x))
        top = values.max()
        if best is None or top > best:
            candidates = block[values == top]
            best = float(top)
            best_mask = min((int(m) for m in candidates), key=lambda m: _lex_key(m, n))
        elif top == best:
            candidates = [int(m) for m in block[values == top]] + [best_mask]
            best_mask = min(candidates, key=lambda m: _lex_key(m, n))
    return Partition.from_mask(n, best_mask), best


@dataclass(frozen=True)
class CutReport:
    partition: Partition
    cut_weight: Scalar
    guessing_time: Scalar


def guessing_time_via_cut(D: Distribution, p, A: Partition) -> Scalar:
    """Guessing time after the question, read off the graph as ``G - CUT_A``."""
    return guessing_time(D) - cut_weight(weight_matrix(D, p), A)


def cut_report(D: Distribution, p, A: Partition) -> CutReport:
    cut = cut_weight(weight_matrix(D, p), A)
    return CutReport(A.canonical(), cut, guessing_time(D) - cut)


@dataclass(frozen=True)
class ConnectivityReport:
    edges: frozenset
    fully_connected: bool
    empty: bool

    def edge_present(self, i: int, j: int) -> bool:
        return (min(i, j), max(i, j)) in self.edges


def connectivity_report(D: Distribution, p) -> ConnectivityReport:
    """Edge pattern from the ratio tests, without building the weights.

    ``i < j`` are joined iff ``p_i / p_j < (1-p)/p``; written multiplicatively so
    that ``p = 0`` and zero probabilities need no special cases.
    """
    p = check_noise(p, D.mode)
    probs = D.probs
    n = D.n
    edges = frozenset(
        (i + 1, j + 1)
        for i in range(n)
        for j in range(i + 1, n)
        if p * probs[i] < (1 - p) * probs[j]
    )
    pairs = n * (n - 1) // 2
    # Closed forms from the extreme and adjacent ratios.
    fully = n < 2 or p * probs[0] < (1 - p) * probs[-1]
    empty = all(p * probs[i] >= (1 - p) * probs[i + 1] for i in range(n - 1))
    if fully != (len(edges) == pairs) or empty != (not edges):
        raise AssertionError("ratio criteria disagree with the edge pattern")
    return ConnectivityReport(edges, fully, empty)


@dataclass
class AuditReport:
    checked: int = 0
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def monotonicity_additivity_audit(W: WeightMatrix) -> AuditReport:
    """Check containment monotonicity and additivity of intersecting edges."""
    report = AuditReport()
    n = W.n
    e = W.weight
    spans = [(i, j) for i in range(1, n + 1) for j in range(i, n + 1)]
    for (i, j), (k, l) in itertools.product(spans, spans):
        if k <= i and j <= l and (i, j) != (k, l):
            report.checked += 1
            if e(i, j) < e(k, l):
                report.violations.append(("monotonicity", (i, j), (k, l)))
    for i in range(1, n + 1):
        for k in range(1, n + 1):
            for j in range(max(i, k), n + 1):
                for l in range(max(i, k), n + 1):
                    ws = (e(i, j), e(k, l), e(i, l), e(k, j))
                    if min(ws) <= 0:
                        continue
                    report.checked += 1
                    if ws[0] + ws[1] != ws[2] + ws[3]:
                        report.violations.append(("additivity", (i, j), (k, l)))
    return report


def is_c_partition(A: Partition) -> bool:
    """Symbols ``2k-1`` and ``2k`` on opposite sides for every full pair.

    For odd ``N`` the last symbol is paired with an implicit zero-probability
    symbol and is unconstrained.
    """
    return all(((2 * k - 1) in A) != ((2 * k) in A) for k in range(1, A.n // 2 + 1))


def is_zigzag_equivalent(D: Distribution, p, A: Partition) -> bool:
    """For each C-pair / flipped-pair combination, the four cross edges are
    either all present or all absent."""
    if not is_c_partition(A):
        raise ValueError("zigzag equivalence is defined for C-partitions only")
    D, A = _pad_even(D, A)
    W = weight_matrix(D, p)
    pairs = range(1, D.n // 2 + 1)
    straight = [k for k in pairs if (2 * k - 1) in A]
    flipped = [k for k in pairs if (2 * k - 1) not in A]
    for a in straight:
        for b in flipped:
            present = {
                W.weight(u, v) > 0
                for u in (2 * a - 1, 2 * a)
                for v in (2 * b - 1, 2 * b)
            }
            if len(present) > 1:
                return False
    return True


def _pad_even(D: Distribution, A: Partition | None = None):
    if D.n % 2 == 0:
        return D, A
    padded = Distribution(D.probs + (D.scalar(0),), D.mode)
    if A is None:
        return padded, None
    return padded, Partition(D.n + 1, A.members)


def c_partitions(n: int):
    """Canonical C-partitions (symbol 1 inside) of ``n`` symbols, odd ``n`` padded."""
    half = (n + 1) // 2
    for flips in range(1 << (half - 1)):
        members = set()
        for k in range(1, half + 1):
            flipped = k > 1 and flips >> (k - 2) & 1
            pick = 2 * k if flipped else 2 * k - 1
            if pick <= n:
                members.add(pick)
        yield Partition(n, frozenset(members))


@dataclass(frozen=True)
class CPartitionEntry:
    partition: Partition
    cut_weight: Scalar
    zigzag_equivalent: bool


@dataclass(frozen=True)
class CPartitionAudit:
    zigzag_cut: Scalar
    entries: tuple
    general_config: bool
    violations: tuple

    @property
    def ok(self) -> bool:
        return not self.violations


def c_partition_audit(D: Distribution, p, limit: int | None = None) -> CPartitionAudit:
    """Compare every C-partition's cut with the zigzag cut.

    Dominance is always checked; "strict iff not zigzag-equivalent" only when
    the distribution is in general configuration at ``p``.
    """
    limit = default_brute_limit() if limit is None else limit
    half = (D.n + 1) // 2
    if half > limit:
        raise ValueError(f"N/2={half} exceeds the enumeration limit {limit}")
    p = check_noise(p, D.mode)
    W = weight_matrix(D, p)
    zz = cut_weight(W, zigzag_partition(D.n))
    # The zero pad of odd N sits on the edge threshold when p = 0.
    general = _pad_even(D)[0].general_config(p)
    entries, violations = [], []
    for A in c_partitions(D.n):
        cut = cut_weight(W, A)
        equiv = is_zigzag_equivalent(D, p, A)
        entries.append(CPartitionEntry(A, cut, equiv))
        if cut > zz:
            violations.append(("dominance", A.sorted_members(), cut, zz))
        elif general and (cut < zz) == equiv:
            violations.append(("strictness", A.sorted_members(), cut, zz))
    return CPartitionAudit(zz, tuple(entries), general, tuple(violations))


@dataclass(frozen=True)
class NoiselessOpt:
    g_opt: Scalar
    lower: Scalar
    upper: Scalar


def noiseless_opt(D: Distribution) -> NoiselessOpt:
    """Closed-form optimum for a truthful oracle: ``(G + sum of odd-ranked p_i) / 2``."""
    g = guessing_time(D)
    odd = sum(D.probs[0::2], D.scalar(0))
    half = D.scalar(Fraction(1, 2))
    quarter = D.scalar(Fraction(1, 4))
    return NoiselessOpt(half * (g + odd), half * g + quarter, half * g + half)


def induced_distribution(D: Distribution, k: int) -> Distribution:
    """Renormalized top-``k`` symbols; the graph on them is a scaled subgraph."""
    return make_distribution(D.probs[:k], D.mode)
