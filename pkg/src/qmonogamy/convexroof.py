"""Numerical upper bounds on convex-roof entanglement monotones.

A rank-``r`` state ``rho = sum_j lam_j |e_j><e_j|`` has every pure-state
decomposition of size ``K >= r`` in the form

    |psi~_k> = sum_j V_kj sqrt(lam_j) |e_j>,    V^dag V = 1_r,

with weights ``P_k = <psi~_k|psi~_k>``. The estimator minimizes the average
reduced-state entropy over ``K x r`` isometries ``V``, taken as the polar
factor of an unconstrained complex matrix.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import minimize

from .entropies import VON_NEUMANN, EntropyKind, entropy_values
from .errors import BadEnsembleSize, ReconstructionFailed
from .qcore import BipartiteSplit, _as_array, _split_of, hermitian_spectrum, partial_trace

RECONSTRUCTION_TOL = 1e-8


@dataclass(frozen=True)
class ConvexRoofConfig:
    restarts: int = 16
    ensemble_size: int | None = None
    seed: int = 0
    maxiter: int = 2000
    fd_step: float = 1e-7
    gtol: float = 1e-7


@dataclass(frozen=True, eq=False)
class Decomposition:
    """Pure-state ensemble: ``weights[k]`` and normalized ``states[k]`` (rows)."""

    weights: np.ndarray
    states: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return np.einsum("k,ki,kj->ij", self.weights, self.states, self.states.conj())

    def reconstruction_error(self, rho) -> float:
        return float(np.linalg.norm(self.reconstruct() - _as_array(rho)))

    def average_entropy(self, split: BipartiteSplit, entropy_fn: Callable) -> float:
        total = 0.0
        for w, psi in zip(self.weights, self.states):
            if w > 0:
                red = partial_trace(np.outer(psi, psi.conj()), split, "A")
                total += w * float(entropy_fn(hermitian_spectrum(red).probs))
        return total


def _vectorized_entropy(fn: Callable) -> Callable[[np.ndarray], np.ndarray]:
    if isinstance(fn, EntropyKind):
        return lambda p: entropy_values(p, fn)

    def call(p):
        try:
            out = np.asarray(fn(p), dtype=float)
            if out.shape == p.shape[:-1]:
                return out
        except Exception:
            pass
        flat = p.reshape(-1, p.shape[-1])
        return np.array([float(fn(row)) for row in flat]).reshape(p.shape[:-1])

    return call


def _eigvals_desc(red: np.ndarray) -> np.ndarray:
    """Descending, clipped, renormalized eigenvalues of a stack of unit-trace Hermitian matrices."""
    if red.shape[-1] == 2:
        a, d = red[..., 0, 0].real, red[..., 1, 1].real
        rad = np.sqrt(0.25 * (a - d) ** 2 + np.abs(red[..., 0, 1]) ** 2)
        mid = 0.5 * (a + d)
        lam = np.stack([mid + rad, mid - rad], axis=-1)
    else:
        lam = np.linalg.eigvalsh(red)[..., ::-1]
    lam = np.clip(lam, 0.0, None)
    total = lam.sum(axis=-1, keepdims=True)
    return lam / np.where(total > 0, total, 1.0)


class _Roof:
    def __init__(self, rho: np.ndarray, split: BipartiteSplit, S: Callable, K: int):
        w, e = np.linalg.eigh(rho)
        keep = w > 1e-12
        self.lam = w[keep][::-1]
        self.vecs = e[:, keep][:, ::-1]
        self.r = self.lam.size
        self.K = K
        self.split = split
        self.S = _vectorized_entropy(S)
        # row j of A is sqrt(lam_j) e_j
        self.A = (np.sqrt(self.lam)[:, None] * self.vecs.T)

    def isometries(self, x: np.ndarray) -> np.ndarray:
        n = x.shape[0]
        half = self.K * self.r
        m = (x[:, :half] + 1j * x[:, half:]).reshape(n, self.K, self.r)
        u, _, vh = np.linalg.svd(m, full_matrices=False)
        return u @ vh

    def unnormalized_states(self, v: np.ndarray) -> np.ndarray:
        return v @ self.A

    def objective(self, x: np.ndarray) -> np.ndarray:
        psi = self.unnormalized_states(self.isometries(x))
        n = psi.shape[0]
        t = psi.reshape(n, self.K, self.split.d_a, self.split.d_b)
        sigma = t @ np.swapaxes(t.conj(), -1, -2)
        p = np.real(np.einsum("nkaa->nk", sigma))
        safe = np.where(p > 1e-300, p, 1.0)
        red = sigma / safe[..., None, None]
        lam = _eigvals_desc(red)
        s = self.S(lam)
        return np.sum(np.where(p > 1e-300, p * s, 0.0), axis=-1)

    def decomposition(self, x: np.ndarray) -> Decomposition:
        psi = self.unnormalized_states(self.isometries(x[None, :]))[0]
        p = np.real(np.sum(psi * psi.conj(), axis=1))
        states = psi / np.sqrt(np.where(p > 0, p, 1.0))[:, None]
        return Decomposition(p, states)

    def eigen_start(self) -> np.ndarray:
        m = np.zeros((self.K, self.r), dtype=complex)
        m[: self.r, : self.r] = np.eye(self.r)
        return np.concatenate([m.real.ravel(), m.imag.ravel()])


@dataclass(frozen=True, eq=False)
class RoofResult:
    value: float
    decomposition: Decomposition
    history: list[float]
    ensemble_size: int


def convex_roof_search(rho, split: BipartiteSplit | None = None, entropy_fn: Callable = VON_NEUMANN,
                       K: int | None = None, cfg: ConvexRoofConfig | None = None) -> RoofResult:
    """Upper bound on ``inf sum_k P_k S(tr_B psi_k)`` over pure-state decompositions of ``rho``.

    Restart 0 starts from the eigendecomposition; the others start from
    Gaussian matrices drawn from ``SeedSequence(cfg.seed)`` children. Each
    restart runs L-BFGS with forward-difference gradients evaluated as one
    batched objective call. ``history`` holds the best value after each restart.
    """
    cfg = cfg or ConvexRoofConfig()
    m = _as_array(rho)
    split = _split_of(rho, split)
    split.check(m.shape[0])
    w = np.linalg.eigvalsh(m)
    rank = int(np.count_nonzero(w > 1e-12))
    K = K or cfg.ensemble_size or rank * rank
    if K < rank:
        raise BadEnsembleSize(f"ensemble size {K} below rank {rank}")
    roof = _Roof(m, split, entropy_fn, K)
    n_param = 2 * K * rank

    if rank == 1:
        x_best = roof.eigen_start()
        best = float(roof.objective(x_best[None, :])[0])
        history = [best]
    else:
        h = cfg.fd_step
        eye = h * np.eye(n_param)

        def fun_grad(x):
            vals = roof.objective(np.vstack([x, x + eye]))
            return vals[0], (vals[1:] - vals[0]) / h

        children = np.random.SeedSequence(cfg.seed).spawn(cfg.restarts)
        best, x_best, history = np.inf, None, []
        for k, child in enumerate(children):
            x0 = roof.eigen_start() if k == 0 else np.random.default_rng(child).standard_normal(n_param)
            res = minimize(fun_grad, x0, jac=True, method="L-BFGS-B",
                           options={"maxiter": cfg.maxiter, "gtol": cfg.gtol, "ftol": 1e-14})
            val = float(roof.objective(res.x[None, :])[0])
            if val < best:
                best, x_best = val, res.x
            history.append(best)

    dec = roof.decomposition(x_best)
    err = dec.reconstruction_error(m)
    if err > RECONSTRUCTION_TOL:
        raise ReconstructionFailed(f"decomposition misses rho by {err:.3e}")
    return RoofResult(float(best), dec, history, K)


def estimate_convex_roof(rho, split: BipartiteSplit | None = None, entropy_fn: Callable = VON_NEUMANN,
                         K: int | None = None, cfg: ConvexRoofConfig | None = None
                         ) -> tuple[float, Decomposition]:
    """Convex-roof estimate and the decomposition achieving it."""
    res = convex_roof_search(rho, split, entropy_fn, K, cfg)
    return res.value, res.decomposition
