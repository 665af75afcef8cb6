"""Model-driven weighted-sum-rate solvers.

fp_solve is the classic alternating scheme with a bisected Lagrange
multiplier and a full Nt x Nt inverse per cell per iteration (kept on
purpose as the costly baseline).  fastfp_solve replaces multiplier search
and inversion with a spectral-stepsize ascent step plus a per-cell power
rescaling; with the eigen stepsize policy its iterates are monotone.
wmmse_sc_solve is the single-cell scale-after-solve baseline.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

import numpy as np

from . import objective as obj
from .linalg import (
    frobenius_stepsize,
    hermitian_inverse,
    hermitianize,
    largest_eigenvalue,
)
from .objective import NonPositiveStepsize


class SolverError(Exception):
    pass


class BracketFailure(SolverError):
    pass


class MulticellUnsupported(SolverError):
    pass


BISECT_TOL_DEFAULT = 1e-10
# fp_solve uses a tighter bracket: the surrogate ascent loses about
# eta * P * tol when the returned multiplier undershoots the power boundary,
# and that loss must stay below the 1e-9 monotonicity budget.
FP_BISECT_TOL = 1e-13
CONVERGENCE_WINDOW = 3
WMMSE_SC_RIDGE_REL = 1e-9


@dataclass
class SolveTrace:
    """Per-iteration record of one solve; records exclude the starting point."""

    wsr_nats: list[float] = field(default_factory=list)
    surrogate: list[float] = field(default_factory=list)
    step_params: list[list[float]] = field(default_factory=list)
    wall_ns: list[int] = field(default_factory=list)
    initial_wsr_nats: float = 0.0
    final_V: np.ndarray | None = None
    iterations: int = 0
    converged: bool = False

    def final_wsr_nats(self) -> float:
        return self.wsr_nats[-1] if self.wsr_nats else self.initial_wsr_nats

    def to_json_dict(self) -> dict:
        return {
            "initial_wsr_nats": self.initial_wsr_nats,
            "iterations": self.iterations,
            "converged": self.converged,
            "final_wsr_nats": self.final_wsr_nats(),
            "final_wsr_bits": self.final_wsr_nats() / np.log(2.0),
            "trace": [
                {
                    "wsr_nats": self.wsr_nats[i],
                    "surrogate": self.surrogate[i],
                    "step_params": self.step_params[i],
                    "wall_ns": self.wall_ns[i],
                }
                for i in range(self.iterations)
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())


def initial_beamformers(config, seed: int) -> np.ndarray:
    """Gaussian beamformers scaled so every cell transmits at exactly P_l."""
    rng = np.random.default_rng([seed, 0x5630])
    shape = (config.L, config.K, config.Nt, config.d)
    V = np.sqrt(0.5) * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
    p = obj.cell_powers(V)
    return V * np.sqrt(np.asarray(config.power) / p)[:, None, None, None]


# -- per-user update rules (reference forms) ---------------------------------

def update_Y(channels, V: np.ndarray, user: tuple[int, int], sigma2: float) -> np.ndarray:
    """Receive-filter refresh: D^{-1} H V for the user's own link."""
    H = obj._h_tensor(channels)
    l, k = user
    D = obj.total_cov_D(channels, V, user, sigma2)
    return hermitian_inverse(D) @ H[l, k, l] @ V[l, k]


def update_Gamma(channels, V: np.ndarray, user: tuple[int, int], sigma2: float) -> np.ndarray:
    """SINR-like auxiliary refresh: V^H H^H F^{-1} H V, Hermitian PSD."""
    H = obj._h_tensor(channels)
    l, k = user
    G = H[l, k, l] @ V[l, k]
    Finv = hermitian_inverse(obj.interference_cov_F(channels, V, user, sigma2))
    return hermitianize(G.conj().T @ Finv @ G)


# -- multiplier bisection ------------------------------------------------------

# Relative eigenvalue threshold below which a gram-matrix direction counts as
# null.  The linear targets lie in the gram range in exact arithmetic, so any
# projection onto near-null directions is rounding noise, and allocating
# transmit power there burns budget without adding rate.
NULL_DIRECTION_REL = 1e-12


def _spectral_multiplier(eigvals: np.ndarray, proj: np.ndarray, budget: float,
                         tol: float):
    """Multiplier search on the gram spectrum; returns (eta, live_mask).

    ``proj`` holds the targets rotated into the eigenbasis, shape (K, Nt, d).
    """
    eigvals = np.maximum(eigvals, 0.0)
    live = eigvals > np.max(eigvals, initial=0.0) * NULL_DIRECTION_REL
    coef = np.where(live, np.sum(np.abs(proj) ** 2, axis=(0, 2)), 0.0)

    def power(eta: float) -> float:
        denom = (eigvals + eta) ** 2
        on = coef > 0
        vals = np.zeros_like(coef)
        with np.errstate(divide="ignore"):
            vals[on] = coef[on] / denom[on]  # 0-denominator -> inf, intended
        return float(np.sum(vals))

    if power(0.0) <= budget:
        return 0.0, live

    hi = float(np.sqrt(np.sum(coef) / budget))
    doublings = 0
    while power(hi) > budget:
        hi *= 2.0
        doublings += 1
        if doublings > 200:
            raise BracketFailure("no feasible bracket for the power multiplier")

    lo = 0.0
    for _ in range(500):
        if power(hi) >= budget * (1.0 - tol):
            return hi, live
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:  # float interval exhausted
            return hi, live
        if power(mid) > budget:
            lo = mid
        else:
            hi = mid
    return hi, live


def bisect_eta(Lambdas: np.ndarray, Lmat: np.ndarray, budget: float,
               tol: float = BISECT_TOL_DEFAULT) -> float:
    """Smallest eta >= 0 with sum_k ||(eta I + L)^{-1} Lambda_k||_F^2 <= budget.

    The power curve is evaluated through one eigendecomposition of L, after
    which each trial eta costs a vector operation.  When eta = 0 is already
    feasible it is returned directly; otherwise bisection runs until the
    power lands in [budget*(1-tol), budget].  Rounding-level projections onto
    null directions of L are discarded (see NULL_DIRECTION_REL).
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if budget <= 0 or not np.isfinite(budget):
        raise ValueError("power budget must be positive and finite")
    Lambdas = np.asarray(Lambdas, dtype=np.complex128)
    if not (np.all(np.isfinite(Lambdas)) and np.all(np.isfinite(Lmat))):
        raise BracketFailure("non-finite bisection inputs")
    eigvals, U = np.linalg.eigh(hermitianize(np.asarray(Lmat, np.complex128)))
    proj = np.einsum("nm,knd->kmd", U.conj(), Lambdas)
    eta, _ = _spectral_multiplier(eigvals, proj, budget, tol)
    return eta


# -- convergence bookkeeping ---------------------------------------------------

def _converged(history: list[float], tol: float) -> bool:
    if len(history) < CONVERGENCE_WINDOW + 1:
        return False
    recent = history[-(CONVERGENCE_WINDOW + 1):]
    for prev, cur in zip(recent, recent[1:]):
        if abs(cur - prev) > tol * max(abs(cur), np.finfo(float).tiny):
            return False
    return True


# -- FP ------------------------------------------------------------------------

def fp_solve(channels, config, V0: np.ndarray, max_iters: int = 500,
             tol: float = 1e-6) -> SolveTrace:
    """Alternating solver with bisected per-cell multipliers (Algorithm-style)."""
    H = obj._h_tensor(channels)
    weights = config.weights
    sigma2 = config.noise_power
    power = np.asarray(config.power, dtype=float)
    V = np.array(V0, dtype=np.complex128)

    trace = SolveTrace(initial_wsr_nats=obj.wsr_fast(H, V, weights, sigma2))
    history = [trace.initial_wsr_nats]
    for _ in range(max_iters):
        t0 = time.perf_counter_ns()
        D, F, own = obj.all_covariances(H, V, sigma2)
        Y = obj.all_Y(D, own)
        Gamma = obj.all_Gamma(F, own)
        Lambda = obj.all_lambda(H, Y, Gamma, weights)
        gram = obj.all_gram(H, Y, Gamma, weights)
        etas = []
        for l in range(config.L):
            if not np.any(gram[l]):
                etas.append(None)  # degenerate cell: keep its beamformers
                continue
            # (eta I + L)^{-1} Lambda through the same spectral factorization
            # the multiplier search uses: the full-rank cost of update (11)
            # is paid here (one Nt^3 eigendecomposition per cell), and the
            # gram null space is excluded so rounding noise cannot soak up
            # transmit power on rate-less directions
            eigvals, Umat = np.linalg.eigh(gram[l])
            proj = np.einsum("nm,knd->kmd", Umat.conj(), Lambda[l])
            eta, live = _spectral_multiplier(eigvals, proj, float(power[l]),
                                             FP_BISECT_TOL)
            denom = np.maximum(eigvals, 0.0) + eta
            gains = np.zeros_like(denom)
            gains[live] = 1.0 / denom[live]
            V[l] = np.einsum("nm,m,kmd->knd", Umat, gains, proj)
            etas.append(eta)
        wall = time.perf_counter_ns() - t0

        w = obj.wsr_fast(H, V, weights, sigma2)
        trace.wsr_nats.append(w)
        trace.surrogate.append(obj.f_q_fast(H, V, Gamma, Y, Lambda, weights, sigma2))
        trace.step_params.append(etas)
        trace.wall_ns.append(wall)
        history.append(w)
        trace.iterations += 1
        if _converged(history, tol):
            trace.converged = True
            break

    trace.final_V = V
    return trace


# -- FastFP ----------------------------------------------------------------------

def eigen_stepsizes(gram: np.ndarray) -> np.ndarray:
    """Per-cell dominant eigenvalues of the gram matrices, shape (L,)."""
    return np.array([largest_eigenvalue(g) if np.any(g) else 0.0 for g in gram])


def frobenius_stepsizes(gram: np.ndarray) -> np.ndarray:
    return np.array([frobenius_stepsize(g) if np.any(g) else 0.0 for g in gram])


def fastfp_layer(H: np.ndarray, V: np.ndarray, weights: np.ndarray,
                 power: np.ndarray, sigma2: float, stepsize_fn):
    """One ascent step shared by the solver and the unfolded network.

    ``stepsize_fn(V, Lambda, gram, direction) -> (L, K) array`` supplies the
    per-user stepsizes.  Cells whose stepsize comes back zero (possible only
    for an all-zero gram matrix) keep their previous beamformers.
    Returns the new V plus the iteration's auxiliary state and stepsizes.
    """
    D, F, own = obj.all_covariances(H, V, sigma2)
    Y = obj.all_Y(D, own)
    Gamma = obj.all_Gamma(F, own)
    Lambda = obj.all_lambda(H, Y, Gamma, weights)
    gram = obj.all_gram(H, Y, Gamma, weights)
    direction = Lambda - np.einsum("inm,ikmd->iknd", gram, V)
    lam_lk = np.asarray(stepsize_fn(V, Lambda, gram, direction), dtype=float)

    if np.any(lam_lk < 0):
        raise NonPositiveStepsize("stepsize must be positive")
    live = lam_lk > 0
    if np.all(live):
        V_hat = V + direction / lam_lk[:, :, None, None]
    else:
        safe = np.where(live, lam_lk, 1.0)
        V_hat = np.where(live[:, :, None, None], V + direction / safe[:, :, None, None], V)
    V_new = obj.power_scale(V_hat, power)
    aux = obj.AuxiliaryState(Gamma=Gamma, Y=Y, Z=V, Lambda=Lambda, gram=gram)
    return V_new, aux, lam_lk


def fastfp_solve(channels, config, V0: np.ndarray, max_iters: int = 500,
                 tol: float = 1e-6, stepsize_policy: str = "eigen") -> SolveTrace:
    """Matrix-inverse-free solver; monotone under the eigen stepsize policy."""
    if stepsize_policy == "eigen":
        cell_fn = eigen_stepsizes
    elif stepsize_policy == "frobenius":
        cell_fn = frobenius_stepsizes
    else:
        raise ValueError(f"unknown stepsize policy {stepsize_policy!r}")

    H = obj._h_tensor(channels)
    weights = config.weights
    sigma2 = config.noise_power
    power = np.asarray(config.power, dtype=float)
    K = config.K
    V = np.array(V0, dtype=np.complex128)

    def stepsize_fn(V_cur, Lambda, gram, direction):
        return np.repeat(cell_fn(gram)[:, None], K, axis=1)

    trace = SolveTrace(initial_wsr_nats=obj.wsr_fast(H, V, weights, sigma2))
    history = [trace.initial_wsr_nats]
    for _ in range(max_iters):
        t0 = time.perf_counter_ns()
        V_new, aux, lam_lk = fastfp_layer(H, V, weights, power, sigma2, stepsize_fn)
        wall = time.perf_counter_ns() - t0

        w = obj.wsr_fast(H, V_new, weights, sigma2)
        lam_cells = lam_lk[:, 0]
        # a dead cell keeps Z = V, where f_n does not depend on the stepsize
        surrogate = obj.f_n_fast(H, V_new, aux.Gamma, aux.Y, aux.Z,
                                 np.where(lam_lk > 0, lam_lk, 1.0), aux.gram,
                                 aux.Lambda, weights, sigma2)
        V = V_new
        trace.wsr_nats.append(w)
        trace.surrogate.append(surrogate)
        trace.step_params.append([float(x) for x in lam_cells])
        trace.wall_ns.append(wall)
        history.append(w)
        trace.iterations += 1
        if _converged(history, tol):
            trace.converged = True
            break

    trace.final_V = V
    return trace


# -- single-cell baseline ---------------------------------------------------------

def wmmse_sc_solve(channels, config, V0: np.ndarray, max_iters: int = 100,
                   tol: float = 1e-6) -> SolveTrace:
    """Single-cell baseline: ridge-regularized unconstrained update, then rescale."""
    if config.L != 1:
        raise MulticellUnsupported("wmmse_sc_solve handles exactly one cell")
    H = obj._h_tensor(channels)
    weights = config.weights
    sigma2 = config.noise_power
    power = np.asarray(config.power, dtype=float)
    V = np.array(V0, dtype=np.complex128)
    Nt = V.shape[-2]
    eye_t = np.eye(Nt, dtype=np.complex128)

    trace = SolveTrace(initial_wsr_nats=obj.wsr_fast(H, V, weights, sigma2))
    history = [trace.initial_wsr_nats]
    for _ in range(max_iters):
        t0 = time.perf_counter_ns()
        D, F, own = obj.all_covariances(H, V, sigma2)
        Y = obj.all_Y(D, own)
        Gamma = obj.all_Gamma(F, own)
        Lambda = obj.all_lambda(H, Y, Gamma, weights)
        gram = obj.all_gram(H, Y, Gamma, weights)
        ridge = []
        if np.any(gram[0]):
            eps = WMMSE_SC_RIDGE_REL * float(np.trace(gram[0]).real) / Nt
            inv = hermitian_inverse(eps * eye_t + gram[0])
            V[0] = np.einsum("nm,kmd->knd", inv, Lambda[0])
            V = obj.power_scale(V, power)
            ridge.append(eps)
        wall = time.perf_counter_ns() - t0

        w = obj.wsr_fast(H, V, weights, sigma2)
        trace.wsr_nats.append(w)
        trace.surrogate.append(obj.f_q_fast(H, V, Gamma, Y, Lambda, weights, sigma2))
        trace.step_params.append(ridge)
        trace.wall_ns.append(wall)
        history.append(w)
        trace.iterations += 1
        if _converged(history, tol):
            trace.converged = True
            break

    trace.final_V = V
    return trace
