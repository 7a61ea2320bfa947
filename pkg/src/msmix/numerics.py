"""Shared low-level numerical kernels.

Bracketed scalar root finding, small dense LU solves with partial pivoting,
and symmetric eigenvalue bounds for the matrix inequalities checked by the
verification harness.  Everything here is a pure function over scalars and
numpy arrays, safe to call from any number of threads.

Matrices are plain float64 ndarrays of shape (n, n) with n <= 64; the
species counts exercised by the rest of the library are far smaller, so all
linear algebra is dense.
"""

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import NoBracket, NoConvergence, NotSymmetric, Singular

MAX_SMALL_N = 64


@dataclass(frozen=True)
class RootProblem:
    """A scalar root-finding task on a sign-changing bracket."""

    f: Callable[[float], float]
    bracket_lo: float
    bracket_hi: float
    tol_abs: float = 1e-12
    max_iter: int = 200

    def __post_init__(self):
        if not self.tol_abs > 0.0:
            raise ValueError("tol_abs must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")


def solve_bracketed(problem: RootProblem, *, bisection_only: bool = False) -> float:
    """Find a root of ``problem.f`` inside the bracket.

    The default mode takes secant (Newton-like) steps clipped to the current
    sign-change interval and falls back to bisection whenever a step leaves
    the bracket or fails to shrink it.  ``bisection_only=True`` selects the
    plain bisection path, which serves as the independent oracle mode.

    Returns r with ``|f(r)| <= tol_abs`` or with the bracket width at or
    below ``tol_abs``.  The result always lies inside the initial bracket.
    """
    f = problem.f
    a, b = float(problem.bracket_lo), float(problem.bracket_hi)
    tol = problem.tol_abs
    fa, fb = f(a), f(b)
    if abs(fa) <= tol:
        return a
    if abs(fb) <= tol:
        return b
    if np.sign(fa) == np.sign(fb):
        raise NoBracket(f"f({a}) = {fa} and f({b}) = {fb} have the same sign")

    x, fx = (a, fa) if abs(fa) < abs(fb) else (b, fb)
    for _ in range(problem.max_iter):
        width = b - a
        if abs(width) <= tol:
            return 0.5 * (a + b)
        mid = 0.5 * (a + b)
        if bisection_only:
            cand = mid
        else:
            # Secant step from the endpoint pair; reject anything outside
            # the open bracket interior.
            denom = fb - fa
            cand = mid
            if denom != 0.0:
                s = b - fb * (b - a) / denom
                if a < s < b:
                    cand = s
        fc = f(cand)
        if abs(fc) <= tol:
            return cand
        if np.sign(fc) == np.sign(fa):
            a, fa = cand, fc
        else:
            b, fb = cand, fc
    raise NoConvergence(
        f"no root to tolerance {tol} within {problem.max_iter} iterations",
        best=0.5 * (a + b),
        residual=min(abs(fa), abs(fb)),
    )


def _check_small_square(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if a.shape[0] > MAX_SMALL_N:
        raise ValueError(f"matrix order {a.shape[0]} exceeds {MAX_SMALL_N}")
    return a


def lu_factor(a: np.ndarray):
    """LU factorization with partial pivoting.

    Returns (lu, piv) where lu stores both triangular factors.  Raises
    Singular if a pivot magnitude drops below 1e-14 * max|a|.
    """
    lu = _check_small_square(a).copy()
    n = lu.shape[0]
    piv = np.arange(n)
    floor = 1e-14 * np.abs(lu).max() if lu.size else 0.0
    for k in range(n):
        j = k + int(np.argmax(np.abs(lu[k:, k])))
        if abs(lu[j, k]) <= floor:
            raise Singular(f"pivot {lu[j, k]:.3e} below threshold {floor:.3e} at column {k}")
        if j != k:
            lu[[k, j]] = lu[[j, k]]
            piv[[k, j]] = piv[[j, k]]
        lu[k + 1:, k] /= lu[k, k]
        lu[k + 1:, k + 1:] -= np.outer(lu[k + 1:, k], lu[k, k + 1:])
    return lu, piv


def lu_solve(a: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve ``a @ z = rhs`` by LU with partial pivoting."""
    lu, piv = lu_factor(a)
    n = lu.shape[0]
    z = np.asarray(rhs, dtype=float)[piv].copy()
    for k in range(1, n):
        z[k] -= lu[k, :k] @ z[:k]
    for k in range(n - 1, -1, -1):
        z[k] = (z[k] - lu[k, k + 1:] @ z[k + 1:]) / lu[k, k]
    return z


def min_symmetric_eigenvalue(a: np.ndarray) -> float:
    """Smallest eigenvalue of a symmetric matrix.

    The input must be symmetric to 1e-12 relative in the max norm; the
    symmetrized average is then handed to the dense symmetric eigensolver.
    """
    a = _check_small_square(a)
    scale = np.abs(a).max()
    defect = np.abs(a - a.T).max()
    if defect > 1e-12 * (1.0 + scale):
        raise NotSymmetric(f"symmetry defect {defect:.3e} exceeds 1e-12 * (1 + {scale:.3e})")
    return float(np.linalg.eigvalsh(0.5 * (a + a.T))[0])
