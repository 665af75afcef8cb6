"""Complex Hermitian linear-algebra kernels shared by all solver modules.

Everything here operates on plain numpy complex128 2-D arrays.  Matrices that
are Hermitian by construction are symmetrized before factorization so that
round-off drift accumulated over many solver iterations cannot poison a
Cholesky factorization downstream.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

HERMITIAN_TOL = 1e-10
EIG_TOL_DEFAULT = 1e-9
EIG_MAX_ITERS_DEFAULT = 5000

# Relative slack on the power-scale branch test so that re-applying the
# projection to its own output is a bitwise no-op despite rounding.
POWER_BRANCH_SLACK = 1e-12

# Safety margin on the returned dominant eigenvalue: the Rayleigh quotient
# underestimates lambda_max on PSD matrices, and a stepsize below lambda_max
# would break the majorization bound used by the fast solver.
EIG_INFLATION_FACTOR = 10.0


class LinalgError(Exception):
    """Base class for kernel failures."""


class DimensionMismatch(LinalgError):
    pass


class NotHermitian(LinalgError):
    pass


class NotPositiveDefinite(LinalgError):
    pass


@dataclass(frozen=True)
class PowerIterationInfo:
    converged: bool
    iterations: int
    restarts: int


def require_matrix(a: np.ndarray, name: str = "matrix") -> np.ndarray:
    """Validate and coerce input to a finite complex128 2-D array."""
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise DimensionMismatch(f"{name} must be a 2-D matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise LinalgError(f"{name} contains non-finite entries")
    return a


def _require_square_hermitian(a: np.ndarray, name: str) -> np.ndarray:
    a = require_matrix(a, name)
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {a.shape}")
    drift = np.max(np.abs(a - a.conj().T))
    if drift > HERMITIAN_TOL:
        raise NotHermitian(f"{name} deviates from Hermitian by {drift:.3e}")
    # kill round-off asymmetry before any factorization
    return 0.5 * (a + a.conj().T)


def hermitianize(a: np.ndarray) -> np.ndarray:
    """(A + A^H) / 2."""
    return 0.5 * (a + np.swapaxes(a, -1, -2).conj())


def _cholesky(a: np.ndarray, name: str) -> np.ndarray:
    try:
        return np.linalg.cholesky(a)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(f"{name} is not positive definite") from exc


def hermitian_inverse(a: np.ndarray) -> np.ndarray:
    """Inverse of a Hermitian positive-definite matrix via Cholesky.

    Raises NotHermitian if the input deviates from its conjugate transpose by
    more than HERMITIAN_TOL entrywise, NotPositiveDefinite if the Cholesky
    factorization fails.
    """
    a = _require_square_hermitian(a, "A")
    chol = _cholesky(a, "A")
    eye = np.eye(a.shape[0], dtype=np.complex128)
    inv_chol = solve_triangular(chol, eye, lower=True)
    inv = inv_chol.conj().T @ inv_chol
    return hermitianize(inv)


def logdet_hermitian_pd(a: np.ndarray) -> float:
    """log det(A) in nats for Hermitian positive-definite A."""
    a = _require_square_hermitian(a, "A")
    chol = _cholesky(a, "A")
    return float(2.0 * np.sum(np.log(np.real(np.diagonal(chol)))))


def frobenius_norm_sq(a: np.ndarray) -> float:
    """Sum of squared entry magnitudes."""
    a = require_matrix(a, "A")
    return float(np.sum(np.abs(a) ** 2))


def largest_eigenvalue(
    a: np.ndarray,
    tol: float = EIG_TOL_DEFAULT,
    max_iters: int = EIG_MAX_ITERS_DEFAULT,
    return_info: bool = False,
):
    """Dominant eigenvalue of a Hermitian PSD matrix by power iteration.

    Starts from the normalized all-ones vector (deterministic).  Because that
    start vector can sit exactly on a non-dominant eigenvector, a converged
    estimate is re-probed once from a seeded noisy restart; if the Rayleigh
    quotient escapes upward, iteration continues from the perturbed vector.
    The returned value is inflated by (1 + 10*tol) so it upper-bounds
    lambda_max even though the Rayleigh quotient approaches it from below.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    a = _require_square_hermitian(a, "A")
    n = a.shape[0]

    def iterate(x: np.ndarray, budget: int) -> tuple[float, np.ndarray, int, bool]:
        # Stop on the Aitken-style geometric-tail bound diff * rho / (1 - rho),
        # not the raw successive difference: with a small eigengap the quotient
        # still creeps upward long after consecutive values agree to tol.
        lam_old = None
        diff_old = None
        lam = 0.0
        used = 0
        for _ in range(budget):
            y = a @ x
            used += 1
            norm_y = np.linalg.norm(y)
            if norm_y == 0.0:
                return 0.0, x, used, True  # x in null space; quotient is 0
            lam = float(np.real(x.conj() @ y))
            x = y / norm_y
            if lam_old is not None:
                diff = abs(lam - lam_old)
                scale = max(abs(lam), np.finfo(float).tiny)
                if diff <= tol * scale:
                    if diff_old is None or diff_old <= 0.0:
                        return lam, x, used, True
                    rho = min(diff / diff_old, 0.999)
                    if diff * rho / (1.0 - rho) <= tol * scale:
                        return lam, x, used, True
                diff_old = diff
            lam_old = lam
        return lam, x, used, False

    x0 = np.ones(n, dtype=np.complex128) / np.sqrt(n)
    lam, x, used, converged = iterate(x0, max_iters)
    restarts = 0

    if converged and used < max_iters:
        # seeded probe against the all-ones start landing on a minor eigenvector
        rng = np.random.default_rng(0x5EED)
        noise = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        xp = x + 1e-3 * noise / np.linalg.norm(noise)
        xp = xp / np.linalg.norm(xp)
        lam_p, x_p, used_p, conv_p = iterate(xp, max_iters - used)
        restarts = 1
        if lam_p > lam:
            lam, x, converged = lam_p, x_p, conv_p

    lam = lam * (1.0 + EIG_INFLATION_FACTOR * tol)
    info = PowerIterationInfo(converged=converged, iterations=used, restarts=restarts)
    if return_info:
        return lam, info
    return lam


def frobenius_stepsize(a: np.ndarray) -> float:
    """Frobenius-norm upper bound on lambda_max, the slower stepsize policy."""
    a = _require_square_hermitian(a, "A")
    return float(np.linalg.norm(a))
