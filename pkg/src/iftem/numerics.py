"""Shared numerical kernels: Gaussian tail, stable least squares, golden-section search."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg
from scipy.linalg import lapack
from scipy.special import erfc, ndtr

_SQRT2 = math.sqrt(2.0)
_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


class IllConditioned(ValueError):
    """Least-squares system too ill-conditioned to solve reliably."""

    def __init__(self, condition: float, cap: float):
        super().__init__(f"condition estimate {condition:.3g} exceeds cap {cap:.3g}")
        self.condition = condition
        self.cap = cap


def q_function(x):
    """Gaussian tail probability Q(x) = P(N(0, 1) > x)."""
    return 0.5 * erfc(np.asarray(x, dtype=float) / _SQRT2)


def normal_cdf(x):
    return ndtr(x)


@dataclass(frozen=True)
class LeastSquaresSolution:
    x: np.ndarray
    residual_norm: float
    condition: float


def solve_ls(A, rhs, cond_cap: float = 1e8) -> LeastSquaresSolution:
    """Minimize ||A x - rhs||_2 through a thin QR factorization.

    The condition estimate comes from LAPACK's triangular 1-norm estimator on R.
    Only when that estimate lands within a decade of ``cond_cap`` is the exact
    2-norm condition number computed by SVD to make the final call.
    """
    A = np.asarray(A, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    m, n = A.shape
    if m < n:
        raise ValueError(f"need rows >= columns, got {A.shape}")
    Q, R = np.linalg.qr(A, mode="reduced")
    rcond, info = lapack.dtrcon(R, norm="1", uplo="U", diag="N")
    cond = math.inf if rcond == 0.0 or info != 0 else 1.0 / rcond
    if cond > cond_cap / 10.0:
        sv = np.linalg.svd(A, compute_uv=False)
        cond = math.inf if sv[-1] == 0.0 else float(sv[0] / sv[-1])
    if not cond <= cond_cap:
        raise IllConditioned(cond, cond_cap)
    x = linalg.solve_triangular(R, Q.T @ rhs, lower=False)
    resid = float(np.linalg.norm(A @ x - rhs))
    return LeastSquaresSolution(x=x, residual_norm=resid, condition=float(cond))


def golden_section_max(f, lo: float, hi: float, tol: float = 1e-12, maxiter: int = 200):
    """Locate a maximizer of a unimodal ``f`` on [lo, hi]; returns (x, f(x))."""
    a, b = lo, hi
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(maxiter):
        if b - a <= tol * max(1.0, abs(a) + abs(b)):
            break
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)
