"""Slow, literal reference implementations used as test oracles.

They follow the definitions directly (explicit posteriors, explicit sorting,
explicit subset loops) and share no code with the package beyond the
``Distribution`` container.
"""
from fractions import Fraction
from itertools import product
from math import comb


def prior_time(probs):
    return sum(i * a for i, a in enumerate(sorted(probs, reverse=True), start=1))


def posterior_time(probs, members, p):
    """Sum over answers of P(y) * E[rank | y], with ranks from the posterior."""
    total = 0
    for y in (0, 1):
        joint = [(1 - p) * a if ((i + 1) in members) == (y == 1) else p * a
                 for i, a in enumerate(probs)]
        py = sum(joint)
        if py == 0:
            continue
        post = [m / py for m in joint]
        order = sorted(range(len(post)), key=lambda i: (-post[i], i))
        expected = sum((r + 1) * post[i] for r, i in enumerate(order))
        total += py * expected
    return total


def edge_weight(probs, p, i, j):
    """w_ij for 1-based i < j; diagonal (1-2p) p_i."""
    if i == j:
        return (1 - 2 * p) * probs[i - 1]
    i, j = min(i, j), max(i, j)
    return max(0, (1 - p) * probs[j - 1] - p * probs[i - 1])


def cut(probs, p, members):
    n = len(probs)
    return sum(edge_weight(probs, p, i, j)
               for i in range(1, n + 1) for j in range(1, n + 1)
               if i in members and j not in members)


def all_questions(n):
    """Every subset containing symbol 1."""
    for bits in product((0, 1), repeat=n - 1):
        yield frozenset([1] + [k + 2 for k, b in enumerate(bits) if b])


def optimum(probs, p):
    return min(posterior_time(probs, A, p) for A in all_questions(len(probs)))


def max_cut(probs, p):
    return max(cut(probs, p, A) for A in all_questions(len(probs)))


def b_value(p, n):
    """B_n straight from its double sum, exact for rational p."""
    p = Fraction(p)
    r = p / (1 - p)
    s = sum(((1 - p) / 2) ** k * sum(comb(k, j) ** 2 * r ** j for j in range(k + 1))
            for k in range(n))
    return (Fraction(1, 2) - p) * s


def legendre_explicit(k, x):
    """P_k(x) from the explicit sum 2^-k sum_m C(k,m)^2 (x-1)^(k-m) (x+1)^m."""
    return sum(comb(k, m) ** 2 * (x - 1) ** (k - m) * (x + 1) ** m for m in range(k + 1)) / 2 ** k
