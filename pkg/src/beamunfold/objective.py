"""Rate objective, transformed surrogates, and their shared building blocks.

Two layers of API live here.  The per-user functions (interference_cov_F,
update-style helpers, f_q_eval, ...) spell out the math one user at a time
and are the reference implementations.  The ``all_*`` helpers compute the
same quantities for every user at once with einsum and batched LAPACK calls;
the solvers and the unfolded network run on those, and the test suite pins
them against the per-user forms.

All logarithms are natural; convert to bits only when reporting.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import (
    POWER_BRANCH_SLACK,
    hermitian_inverse,
    hermitianize,
    logdet_hermitian_pd,
)


class ObjectiveError(Exception):
    pass


class NonPositiveStepsize(ObjectiveError):
    pass


def _h_tensor(channels) -> np.ndarray:
    return channels.H if hasattr(channels, "H") else np.asarray(channels)


def _ht(a: np.ndarray) -> np.ndarray:
    return np.swapaxes(a, -1, -2).conj()


# -- per-user reference forms ------------------------------------------------

def interference_cov_F(channels, V: np.ndarray, user: tuple[int, int],
                       sigma2: float) -> np.ndarray:
    """Interference-plus-noise covariance seen by ``user``; Hermitian PD."""
    H = _h_tensor(channels)
    l, k = user
    L, K = H.shape[0], H.shape[1]
    Nr = H.shape[3]
    F = sigma2 * np.eye(Nr, dtype=np.complex128)
    for i in range(L):
        for j in range(K):
            if i == l and j == k:
                continue
            G = H[l, k, i] @ V[i, j]
            F = F + G @ G.conj().T
    return hermitianize(F)


def total_cov_D(channels, V: np.ndarray, user: tuple[int, int],
                sigma2: float) -> np.ndarray:
    """Received-signal covariance: interference plus the user's own term."""
    H = _h_tensor(channels)
    l, k = user
    G = H[l, k, l] @ V[l, k]
    return hermitianize(interference_cov_F(channels, V, user, sigma2) + G @ G.conj().T)


def user_rate(channels, V: np.ndarray, user: tuple[int, int],
              sigma2: float) -> float:
    """Achievable rate log|I + V^H H^H F^{-1} H V| in nats."""
    H = _h_tensor(channels)
    l, k = user
    G = H[l, k, l] @ V[l, k]
    Finv = hermitian_inverse(interference_cov_F(channels, V, user, sigma2))
    M = G.conj().T @ Finv @ G
    d = V.shape[-1]
    return logdet_hermitian_pd(np.eye(d, dtype=np.complex128) + hermitianize(M))


def wsr(channels, V: np.ndarray, weights: np.ndarray, sigma2: float) -> float:
    """Weighted sum rate in nats."""
    H = _h_tensor(channels)
    total = 0.0
    for l in range(H.shape[0]):
        for k in range(H.shape[1]):
            w = float(weights[l, k])
            if w == 0.0:
                continue
            total += w * user_rate(channels, V, (l, k), sigma2)
    return total


def lambda_matrix(channels, Y: np.ndarray, Gamma: np.ndarray,
                  user: tuple[int, int], weights: np.ndarray) -> np.ndarray:
    """w * H^H Y (I + Gamma) for ``user``'s own link."""
    H = _h_tensor(channels)
    l, k = user
    d = Gamma.shape[-1]
    return weights[l, k] * H[l, k, l].conj().T @ Y[l, k] @ (
        np.eye(d, dtype=np.complex128) + Gamma[l, k])


def gram_L(channels, Y: np.ndarray, Gamma: np.ndarray, weights: np.ndarray,
           cell: int) -> np.ndarray:
    """Network-wide quadratic-form matrix for ``cell``'s beamformers (Nt x Nt)."""
    H = _h_tensor(channels)
    L, K = H.shape[0], H.shape[1]
    Nt = H.shape[4]
    d = Gamma.shape[-1]
    eye = np.eye(d, dtype=np.complex128)
    out = np.zeros((Nt, Nt), dtype=np.complex128)
    for i in range(L):
        for j in range(K):
            Hc = H[i, j, cell]
            M = Y[i, j] @ (eye + Gamma[i, j]) @ Y[i, j].conj().T
            out = out + weights[i, j] * (Hc.conj().T @ M @ Hc)
    return hermitianize(out)


def f_r_eval(channels, V: np.ndarray, Gamma: np.ndarray,
             weights: np.ndarray, sigma2: float) -> float:
    """Dual-transform objective (function of V and the SINR-like auxiliaries)."""
    H = _h_tensor(channels)
    d = Gamma.shape[-1]
    eye = np.eye(d, dtype=np.complex128)
    total = 0.0
    for l in range(H.shape[0]):
        for k in range(H.shape[1]):
            w = float(weights[l, k])
            G = H[l, k, l] @ V[l, k]
            Dinv = hermitian_inverse(total_cov_D(channels, V, (l, k), sigma2))
            quad = (eye + Gamma[l, k]) @ G.conj().T @ Dinv @ G
            total += w * (logdet_hermitian_pd(eye + hermitianize(Gamma[l, k]))
                          - float(np.trace(Gamma[l, k]).real)
                          + float(np.trace(quad).real))
    return total


def f_q_eval(channels, V: np.ndarray, Gamma: np.ndarray, Y: np.ndarray,
             weights: np.ndarray, sigma2: float) -> float:
    """Quadratic-transform objective, evaluated term by term in nats."""
    H = _h_tensor(channels)
    d = Gamma.shape[-1]
    eye = np.eye(d, dtype=np.complex128)
    total = 0.0
    for l in range(H.shape[0]):
        for k in range(H.shape[1]):
            w = float(weights[l, k])
            lam_mat = lambda_matrix(channels, Y, Gamma, (l, k), weights)
            D = total_cov_D(channels, V, (l, k), sigma2)
            ig = eye + Gamma[l, k]
            total += 2.0 * float(np.trace(V[l, k].conj().T @ lam_mat).real)
            total -= w * float(np.trace(Y[l, k].conj().T @ D @ Y[l, k] @ ig).real)
            total += w * logdet_hermitian_pd(eye + hermitianize(Gamma[l, k]))
            total -= w * float(np.trace(Gamma[l, k]).real)
    return total


def f_n_eval(channels, V: np.ndarray, Gamma: np.ndarray, Y: np.ndarray,
             Z: np.ndarray, lam, weights: np.ndarray, sigma2: float) -> float:
    """Eigenvalue-free surrogate objective with per-user (or per-cell) stepsizes.

    ``lam`` may be a scalar, a per-cell array (L,), or a per-user array (L, K);
    per-cell values broadcast to every user in the cell.
    """
    H = _h_tensor(channels)
    Lc, K = H.shape[0], H.shape[1]
    Nt = H.shape[4]
    d = Gamma.shape[-1]
    lam_lk = np.broadcast_to(np.asarray(lam, dtype=float).reshape(-1, 1)
                             if np.ndim(lam) == 1 else np.asarray(lam, dtype=float),
                             (Lc, K))
    if np.any(lam_lk <= 0):
        raise NonPositiveStepsize("stepsizes must be positive")
    eye_d = np.eye(d, dtype=np.complex128)
    eye_t = np.eye(Nt, dtype=np.complex128)
    gram = [gram_L(channels, Y, Gamma, weights, l) for l in range(Lc)]
    total = 0.0
    for l in range(Lc):
        for k in range(K):
            w = float(weights[l, k])
            lv = lam_lk[l, k]
            lam_mat = lambda_matrix(channels, Y, Gamma, (l, k), weights)
            shift = lv * eye_t - gram[l]
            total += 2.0 * float(np.trace(
                V[l, k].conj().T @ (lam_mat + shift @ Z[l, k])).real)
            total -= float(np.trace(Z[l, k].conj().T @ shift @ Z[l, k]).real)
            total -= lv * float(np.trace(V[l, k].conj().T @ V[l, k]).real)
            ig = eye_d + Gamma[l, k]
            total -= w * sigma2 * float(np.trace(ig @ Y[l, k].conj().T @ Y[l, k]).real)
            total += w * logdet_hermitian_pd(eye_d + hermitianize(Gamma[l, k]))
            total -= w * float(np.trace(Gamma[l, k]).real)
    return total


def cell_powers(V: np.ndarray) -> np.ndarray:
    """Per-cell transmit power sum_k ||V_lk||_F^2, shape (L,)."""
    return np.sum(np.abs(V) ** 2, axis=(1, 2, 3))


def check_feasible(V: np.ndarray, power: np.ndarray, tol: float = 1e-9) -> bool:
    return bool(np.all(cell_powers(V) <= np.asarray(power) * (1.0 + tol)))


def power_scale(V_hat: np.ndarray, power: np.ndarray) -> np.ndarray:
    """Project per-cell onto the power ball; cells already feasible pass through.

    Idempotent bitwise: the branch test carries a relative slack of 1e-12 so
    the rescaled output re-enters through the no-op branch.
    """
    power = np.asarray(power, dtype=float)
    p = cell_powers(V_hat)
    over = p > power * (1.0 + POWER_BRANCH_SLACK)
    scale = np.where(over, np.sqrt(power / np.where(over, p, 1.0)), 1.0)
    if not np.any(over):
        return V_hat
    return V_hat * scale[:, None, None, None]


# -- vectorized whole-network forms -------------------------------------------

@dataclass
class AuxiliaryState:
    """All auxiliary quantities of one solver iteration."""

    Gamma: np.ndarray    # (L, K, d, d) Hermitian PSD
    Y: np.ndarray        # (L, K, Nr, d)
    Z: np.ndarray        # (L, K, Nt, d)
    Lambda: np.ndarray   # (L, K, Nt, d)
    gram: np.ndarray     # (L, Nt, Nt) Hermitian PSD


def all_pair_products(H: np.ndarray, V: np.ndarray) -> np.ndarray:
    """HV[l,k,i,j] = H[l,k,i] @ V[i,j], shape (L, K, L, K, Nr, d)."""
    return np.einsum("lkiab,ijbd->lkijad", H, V)


def all_covariances(H: np.ndarray, V: np.ndarray, sigma2: float):
    """(D, F, own) for every user; own[l,k] = H[l,k,l] @ V[l,k]."""
    L, K, _, Nr, _ = H.shape
    HV = all_pair_products(H, V)
    S = np.einsum("lkijad,lkijcd->lkac", HV, HV.conj())
    D = hermitianize(S + sigma2 * np.eye(Nr, dtype=np.complex128))
    li = np.arange(L)[:, None]
    ki = np.arange(K)[None, :]
    own = HV[li, ki, li, ki]
    F = hermitianize(D - own @ _ht(own))
    return D, F, own


def all_Y(D: np.ndarray, own: np.ndarray) -> np.ndarray:
    return np.linalg.solve(D, own)


def all_Gamma(F: np.ndarray, own: np.ndarray) -> np.ndarray:
    return hermitianize(_ht(own) @ np.linalg.solve(F, own))


def all_lambda(H: np.ndarray, Y: np.ndarray, Gamma: np.ndarray,
               weights: np.ndarray) -> np.ndarray:
    L, K = H.shape[0], H.shape[1]
    d = Gamma.shape[-1]
    li = np.arange(L)[:, None]
    ki = np.arange(K)[None, :]
    Hown = H[li, ki, li]                       # (L, K, Nr, Nt)
    ig = np.eye(d, dtype=np.complex128) + Gamma
    return weights[:, :, None, None] * (_ht(Hown) @ Y @ ig)


def all_gram(H: np.ndarray, Y: np.ndarray, Gamma: np.ndarray,
             weights: np.ndarray) -> np.ndarray:
    d = Gamma.shape[-1]
    ig = np.eye(d, dtype=np.complex128) + Gamma
    M = Y @ ig @ _ht(Y)                        # (L, K, Nr, Nr)
    out = np.einsum("lk,lkian,lkab,lkibm->inm", weights, H.conj(), M, H)
    return hermitianize(out)


def all_rates(H: np.ndarray, V: np.ndarray, sigma2: float) -> np.ndarray:
    """Per-user rates in nats, shape (L, K)."""
    _, F, own = all_covariances(H, V, sigma2)
    d = V.shape[-1]
    M = hermitianize(_ht(own) @ np.linalg.solve(F, own))
    sign, ld = np.linalg.slogdet(np.eye(d, dtype=np.complex128) + M)
    return ld


def wsr_fast(H: np.ndarray, V: np.ndarray, weights: np.ndarray,
             sigma2: float) -> float:
    return float(np.sum(weights * all_rates(H, V, sigma2)))


def _logdet_ig(Gamma: np.ndarray) -> np.ndarray:
    d = Gamma.shape[-1]
    _, ld = np.linalg.slogdet(np.eye(d, dtype=np.complex128) + Gamma)
    return ld


def f_q_fast(H: np.ndarray, V: np.ndarray, Gamma: np.ndarray, Y: np.ndarray,
             Lambda: np.ndarray, weights: np.ndarray, sigma2: float) -> float:
    """Vectorized f_q; Lambda must be all_lambda(H, Y, Gamma, weights)."""
    D, _, _ = all_covariances(H, V, sigma2)
    d = Gamma.shape[-1]
    ig = np.eye(d, dtype=np.complex128) + Gamma
    t_lin = 2.0 * np.einsum("lknd,lknd->", V.conj(), Lambda).real
    t_quad = np.einsum("lk,lkad,lkab,lkbe,lked->", weights, Y.conj(), D, Y, ig).real
    t_log = float(np.sum(weights * _logdet_ig(Gamma)))
    t_tr = np.einsum("lk,lkdd->", weights, Gamma).real
    return float(t_lin - t_quad + t_log - t_tr)


def f_n_fast(H: np.ndarray, V: np.ndarray, Gamma: np.ndarray, Y: np.ndarray,
             Z: np.ndarray, lam_lk: np.ndarray, gram: np.ndarray,
             Lambda: np.ndarray, weights: np.ndarray, sigma2: float) -> float:
    """Vectorized f_n with per-user stepsizes lam_lk of shape (L, K)."""
    lam_lk = np.asarray(lam_lk, dtype=float)
    if np.any(lam_lk <= 0):
        raise NonPositiveStepsize("stepsizes must be positive")
    gram_Z = np.einsum("inm,ikmd->iknd", gram, Z)
    shift_Z = lam_lk[:, :, None, None] * Z - gram_Z
    t_lin = 2.0 * np.einsum("lknd,lknd->", V.conj(), Lambda + shift_Z).real
    t_zz = np.einsum("lknd,lknd->", Z.conj(), shift_Z).real
    t_vv = float(np.sum(lam_lk * np.sum(np.abs(V) ** 2, axis=(-2, -1))))
    d = Gamma.shape[-1]
    ig = np.eye(d, dtype=np.complex128) + Gamma
    t_noise = sigma2 * np.einsum("lk,lkde,lkae,lkad->", weights, ig, Y.conj(), Y).real
    t_log = float(np.sum(weights * _logdet_ig(Gamma)))
    t_tr = np.einsum("lk,lkdd->", weights, Gamma).real
    return float(t_lin - t_zz - t_vv - t_noise + t_log - t_tr)
