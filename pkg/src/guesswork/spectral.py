"""Quadratic-form view of the cut: PSD certificate and the zigzag gap bound.

With ``x`` the +/-1 assignment vector, ``CUT_A = sum(W)/4 - x^T W x / 4``.  The
weight matrix (diagonal ``(1-2p) p_i``) is PSD, which is certified exactly by
showing that ``Q = A^T W A`` is diagonally dominant, where ``A`` is the
discrete-derivative matrix (ones on the diagonal, minus ones just below).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import Distribution, Scalar, check_noise, default_brute_limit, guessing_time
from .core import brute_force_opt_question, guess_time_after_question
from .graph import WeightMatrix, brute_force_maxcut, cut_weight, weight_matrix, zigzag_partition

JACOBI_OFF_TOL = 1e-14
EIGEN_ACCEPT = -1e-10
FLOAT_SIGN_TOL = 1e-12  # float mode only; rational checks are exact


@dataclass(frozen=True)
class CongruenceReport:
    q: tuple
    dominance_margins: tuple
    sign_violations: tuple
    row_sums: tuple


def _tolerance(W: WeightMatrix) -> float:
    return 0 if W.mode == "rational" else FLOAT_SIGN_TOL


def congruence_q(W: WeightMatrix) -> CongruenceReport:
    """Entries ``q_ij = w_ij + w_{i+1,j+1} - w_{i,j+1} - w_{i+1,j}`` (out of range = 0)."""
    n = W.n
    tol = _tolerance(W)
    e = W.weight
    q = tuple(
        tuple(e(i, j) + e(i + 1, j + 1) - e(i, j + 1) - e(i + 1, j) for j in range(1, n + 1))
        for i in range(1, n + 1)
    )
    margins = []
    signs = []
    for i in range(n):
        off = sum((abs(q[i][j]) for j in range(n) if j != i), W.zero())
        margins.append(q[i][i] - off)
        if q[i][i] < -tol:
            signs.append(("diagonal", i + 1, i + 1))
        for j in range(n):
            if j != i and q[i][j] > tol:
                signs.append(("off-diagonal", i + 1, j + 1))
    row_sums = tuple(sum(row, W.zero()) for row in q)
    return CongruenceReport(q, tuple(margins), tuple(signs), row_sums)


def derivative_matrix(n: int) -> np.ndarray:
    """``a_ij = delta_ij - delta_{i,j+1}``."""
    return np.eye(n) - np.eye(n, k=-1)


def row_sum_closed_form(W: WeightMatrix, i: int) -> Scalar:
    """Telescoped row sum of ``Q``: ``w_{i,1} - w_{i+1,1}``."""
    return W.weight(i, 1) - W.weight(i + 1, 1)


def jacobi_eigenvalues(a, tol: float = JACOBI_OFF_TOL, max_sweeps: int = 100) -> np.ndarray:
    """Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations.

    Sweeps over all ``(k, l)`` pairs until the off-diagonal Frobenius mass falls
    below ``tol`` times the matrix norm (absolute ``tol`` for tiny matrices).
    """
    a = np.array(a, dtype=float, copy=True)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("matrix must be square")
    if not np.allclose(a, a.T, rtol=0, atol=1e-15):
        raise ValueError("matrix must be symmetric")
    scale = max(np.linalg.norm(a), 1.0)
    for _ in range(max_sweeps):
        off = float(np.linalg.norm(a - np.diag(np.diag(a))))
        if off < tol * scale:
            break
        for k in range(n - 1):
            for l in range(k + 1, n):
                akl = a[k, l]
                diff = a[l, l] - a[k, k]
                if abs(akl) <= 1e-300 or abs(akl) <= 1e-18 * abs(diff):
                    a[k, l] = a[l, k] = 0.0
                    continue
                theta = diff / (2.0 * akl)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                rk = a[k, :].copy()
                rl = a[l, :].copy()
                a[k, :] = c * rk - s * rl
                a[l, :] = s * rk + c * rl
                ck = a[:, k].copy()
                cl = a[:, l].copy()
                a[:, k] = c * ck - s * cl
                a[:, l] = s * ck + c * cl
                a[k, l] = a[l, k] = 0.0
    else:
        raise RuntimeError("Jacobi iteration did not converge")
    return np.sort(np.diag(a))


@dataclass(frozen=True)
class PsdCertificate:
    exact_dominant: bool
    min_eigenvalue: float
    row_sum_identity: bool
    sign_structure: bool
    notes: tuple = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return (
            self.exact_dominant
            and self.row_sum_identity
            and self.sign_structure
            and self.min_eigenvalue >= EIGEN_ACCEPT
        )


def psd_certificate(W: WeightMatrix, numeric: bool = True) -> PsdCertificate:
    """Certify that ``W`` is positive semidefinite.

    Route one is exact: ``Q`` must have a nonnegative diagonal and dominate
    its rows.  Route two is numeric and independent: the smallest Jacobi
    eigenvalue of ``W`` itself.  A failed certificate is returned, not raised.
    """
    rep = congruence_q(W)
    tol = _tolerance(W)
    dominant = all(m >= -tol for m in rep.dominance_margins) and all(
        rep.q[i][i] >= -tol for i in range(W.n)
    )
    identity = all(
        rep.row_sums[i - 1] == row_sum_closed_form(W, i) for i in range(1, W.n + 1)
    )
    notes = [f"arithmetic={W.mode}"]
    if tol:
        notes.append(f"sign and dominance checks with tolerance {tol}")
    if not identity and W.mode != "rational":
        # Float rounding can break the telescoping by an ulp or so.
        identity = all(
            abs(float(rep.row_sums[i - 1]) - float(row_sum_closed_form(W, i))) <= 1e-12
            for i in range(1, W.n + 1)
        )
        notes.append("row sums compared with tolerance 1e-12")
    eig = float(jacobi_eigenvalues(W.to_numpy())[0]) if numeric else float("nan")
    if not numeric:
        notes.append("numeric eigenvalue check skipped")
    return PsdCertificate(dominant, eig, identity, not rep.sign_violations, tuple(notes))


def maxcut_upper_bound(W: WeightMatrix) -> Scalar:
    """Relaxation bound ``MAXCUT <= sum_ij w_ij / 4`` (diagonal included)."""
    return sum((v for row in W.w for v in row), W.zero()) / 4


def zigzag_cut(W: WeightMatrix) -> Scalar:
    return cut_weight(W, zigzag_partition(W.n))


@dataclass(frozen=True)
class GapReport:
    g: Scalar
    g_zz: Scalar
    g_opt: Scalar
    gap: Scalar
    bound: Scalar
    relaxation_slack: Scalar

    @property
    def within_bound(self) -> bool:
        return 0 <= self.gap <= self.bound and self.relaxation_slack <= self.bound


def near_optimality_gap(D: Distribution, p, limit: int | None = None) -> GapReport:
    """Zigzag guessing time versus the brute-force optimum.

    ``relaxation_slack`` is ``sum(W)/4 - CUT_ZZ``, which never exceeds ``(1-2p)/4``.
    """
    limit = default_brute_limit() if limit is None else limit
    p = check_noise(p, D.mode)
    W = weight_matrix(D, p)
    g_zz = guess_time_after_question(D, zigzag_partition(D.n), p)
    _, g_opt = brute_force_opt_question(D, p, limit)
    bound = (1 - 2 * p) / 4
    return GapReport(
        guessing_time(D), g_zz, g_opt, g_zz - g_opt, bound, maxcut_upper_bound(W) - zigzag_cut(W)
    )


def relaxation_chain(W: WeightMatrix, limit: int | None = None):
    """``(CUT_ZZ, MAXCUT, upper bound)`` for checking ``CUT_ZZ <= MAXCUT <= bound``."""
    _, best = brute_force_maxcut(W, limit)
    return zigzag_cut(W), best, maxcut_upper_bound(W)
