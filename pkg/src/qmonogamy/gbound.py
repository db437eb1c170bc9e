"""Orbit suprema G, induced entropies S, and the negativity bound g = co(h)(2x + 1).

The numeric g pipeline has three stages:

* :func:`h_of_y` minimizes an entropy over spectra with ``sum sqrt(p_i) = sqrt(y)``,
* :func:`lower_convex_envelope` takes the greatest convex minorant on a grid,
* :func:`g_numeric` reads the envelope at ``y = 2x + 1``.

:func:`g_analytic` holds the closed forms for ``d* = 2, 3, 4`` and serves as the
independent check on that pipeline.
"""
from __future__ import annotations

import functools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import minimize
from scipy.stats import qmc

from .errors import BadGrid, OptimizerFailed, OutOfRange, RankTooLarge, UnsupportedDStar
from .measures import MeasureDescriptor, negativity, negativity_entropy, shannon
from .qcore import DensityMatrix, Spectrum, _as_array, hermitian_spectrum, random_unitary

SUPPORTED_DSTAR = (2, 3, 4)


# ---------------------------------------------------------------------------
# unitary-orbit supremum


@dataclass(frozen=True)
class OrbitConfig:
    restarts: int = 32
    xtol: float = 1e-6
    ftol: float = 1e-12
    max_evals: int | None = None
    seed: int = 0
    #: best value may not improve by more than this over the last quarter of restarts
    improvement_tol: float = 1e-5
    strict: bool = True
    workers: int = 1


@dataclass
class OrbitResult:
    value: float
    unitary: np.ndarray
    converged: bool
    history: list[float] = field(default_factory=list)
    evaluations: int = 0


def _pairs(d: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(d) for j in range(i + 1, d)]


def givens_unitary(x: np.ndarray, d: int) -> np.ndarray:
    """Unitary from ``d(d-1)/2`` (angle, phase) pairs followed by ``d`` diagonal phases."""
    pairs = _pairs(d)
    u = np.diag(np.exp(1j * np.asarray(x[2 * len(pairs):], dtype=float))).astype(complex)
    for k, (i, j) in enumerate(pairs):
        theta, phi = x[2 * k], x[2 * k + 1]
        c, s = np.cos(theta), np.sin(theta)
        ri, rj = u[i].copy(), u[j]
        u[i] = c * ri - np.exp(-1j * phi) * s * rj
        u[j] = np.exp(1j * phi) * s * ri + c * rj
    return u


def _orbit_objective(measure: MeasureDescriptor, rho: np.ndarray) -> Callable[[np.ndarray], float]:
    """``U -> R(U rho U^dag)``, with the unitarily invariant pieces precomputed."""
    if measure.kind == "coherence":
        s_vn = shannon(np.clip(np.linalg.eigvalsh(rho), 0, None))
        w, v = np.linalg.eigh(rho)
        w = np.clip(w, 0, None)
        bdag = measure.basis.conj().T

        def f(u):
            amp = bdag @ u @ v
            pops = (np.abs(amp) ** 2) @ w
            return float(shannon(pops / pops.sum()) - s_vn)

        return f
    if measure.kind == "nonuniformity":
        const = measure.evaluate(rho)
        return lambda u: const
    split = measure.split
    return lambda u: negativity(u @ rho @ u.conj().T, split)


def _one_restart(f, d: int, seed_seq: np.random.SeedSequence, cfg: OrbitConfig) -> tuple[float, np.ndarray, int]:
    rng = np.random.default_rng(seed_seq)
    u0 = random_unitary(d, rng)
    nparam = d * d
    x0 = rng.uniform(-0.1, 0.1, nparam)
    counter = [0]

    def loss(x):
        counter[0] += 1
        return -f(givens_unitary(x, d) @ u0)

    opts = {"xtol": cfg.xtol, "ftol": cfg.ftol}
    if cfg.max_evals:
        opts["maxfev"] = cfg.max_evals
    res = minimize(loss, x0, method="Powell", options=opts)
    u = givens_unitary(res.x, d) @ u0
    return f(u), u, counter[0]


def orbit_search(measure: MeasureDescriptor, rho, cfg: OrbitConfig | None = None) -> OrbitResult:
    """Random-restart Powell search for ``sup_U R(U rho U^dag)``.

    Restart ``k`` draws from child ``k`` of ``SeedSequence(cfg.seed)``, so the
    result does not depend on ``cfg.workers``.
    """
    cfg = cfg or OrbitConfig()
    m = _state_matrix(measure, rho)
    d = measure.dim
    f = _orbit_objective(measure, m)
    children = np.random.SeedSequence(cfg.seed).spawn(cfg.restarts)
    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as pool:
            runs = list(pool.map(lambda ss: _one_restart(f, d, ss, cfg), children))
    else:
        runs = [_one_restart(f, d, ss, cfg) for ss in children]

    best, best_u, history = -np.inf, np.eye(d, dtype=complex), []
    for value, u, _ in runs:
        if value > best:
            best, best_u = value, u
        history.append(best)
    tail = max(1, len(history) // 4)
    ref = history[-tail - 1] if len(history) > tail else history[0]
    converged = bool(history[-1] - ref <= cfg.improvement_tol)
    return OrbitResult(float(best), best_u, converged, history, sum(r[2] for r in runs))


def _state_matrix(measure: MeasureDescriptor, rho) -> np.ndarray:
    if isinstance(rho, Spectrum) or (not isinstance(rho, DensityMatrix) and np.ndim(rho) == 1):
        p = rho.probs if isinstance(rho, Spectrum) else np.asarray(rho, dtype=float)
        nz = int(np.count_nonzero(p > 1e-12))
        if nz > measure.dim:
            raise RankTooLarge(f"rank {nz} exceeds measure dimension {measure.dim}")
        p = np.sort(p)[::-1][: measure.dim] if p.size > measure.dim else p
        return np.diag(np.pad(p, (0, measure.dim - p.size))).astype(complex)
    m = _as_array(rho)
    if m.shape[0] != measure.dim:
        spec = hermitian_spectrum(m)
        return _state_matrix(measure, spec)
    return m


def g_orbit_sup(measure: MeasureDescriptor, rho, cfg: OrbitConfig | None = None,
                method: str = "auto") -> float:
    """G(rho) = sup over unitaries U of R(U rho U^dag).

    ``method="auto"`` uses the closed form for spectrum-only measures and for
    the two-qubit negativity, and the numerical search otherwise. Pass
    ``method="search"`` to force the search.
    """
    if method not in {"auto", "search", "closed"}:
        raise ValueError(f"unknown method {method!r}")
    m = _state_matrix(measure, rho)
    closed = measure.spectrum_only or measure.kind == "negativity2q"
    if method == "closed" or (method == "auto" and closed):
        return measure.closed_form_G(hermitian_spectrum(m))
    cfg = cfg or OrbitConfig()
    res = orbit_search(measure, m, cfg)
    if not res.converged and cfg.strict:
        raise OptimizerFailed(
            f"best value still improving over final restarts: {res.history[-4:]}")
    return max(res.value, measure.evaluate(m))


def entropy_from_measure(measure: MeasureDescriptor, spec) -> float:
    """S = R_sup - G on a spectrum with at most ``measure.dim`` nonzero entries."""
    p = spec.probs if isinstance(spec, Spectrum) else np.asarray(spec, dtype=float)
    if np.count_nonzero(p > 1e-12) > measure.dim:
        raise RankTooLarge(f"spectrum rank exceeds dimension {measure.dim}")
    p = np.sort(p)[::-1]
    p = p[: measure.dim] if p.size > measure.dim else np.pad(p, (0, measure.dim - p.size))
    if measure.has_closed_form():
        g = measure.closed_form_G(p)
    else:
        g = g_orbit_sup(measure, p, method="search")
    return float(max(measure.sup_value() - g, 0.0))


# ---------------------------------------------------------------------------
# h(y): entropy minimized over spectra with fixed sum of square roots


@dataclass(frozen=True)
class HConfig:
    sweep: int = 10_000
    polish: int = 3
    seed: int = 0
    xatol: float = 1e-9
    fatol: float = 1e-15
    max_steps: int = 400


def _check_dstar(d_star: int) -> int:
    if d_star not in SUPPORTED_DSTAR:
        raise UnsupportedDStar(f"d* = {d_star} is not one of {SUPPORTED_DSTAR}")
    return int(d_star)


def _vectorized(S_fn: Callable) -> Callable[[np.ndarray], np.ndarray]:
    def call(p: np.ndarray) -> np.ndarray:
        try:
            out = np.asarray(S_fn(p), dtype=float)
            if out.shape == p.shape[:-1]:
                return out
        except Exception:
            pass
        return np.array([float(S_fn(row)) for row in p.reshape(-1, p.shape[-1])]).reshape(p.shape[:-1])

    return call


def sqrt_sum_sq(p: np.ndarray) -> np.ndarray:
    """y(p) = (sum_i sqrt(p_i))^2 along the last axis."""
    return np.sqrt(np.clip(p, 0, None)).sum(axis=-1) ** 2


def _simplex_points(n: int, d: int, seed: int) -> np.ndarray:
    """Quasi-random points on the probability simplex (sorted-spacings map of a Sobol set)."""
    sob = qmc.Sobol(d - 1, scramble=True, seed=seed)
    m = int(np.ceil(np.log2(max(n, 2))))
    u = sob.random_base2(m)[:n]
    u = np.sort(u, axis=1)
    edges = np.hstack([np.zeros((n, 1)), u, np.ones((n, 1))])
    return np.diff(edges, axis=1)


def _feasible_on_paths(q: np.ndarray, y: float, iters: int = 48) -> np.ndarray:
    """Map each ``q`` to a point with ``y(p) = y`` on the path vertex -> q -> uniform.

    ``y`` runs continuously from 1 at the vertex to ``d`` at the uniform point,
    so bisection in the path parameter always lands on the constraint set.
    """
    n, d = q.shape
    e1 = np.zeros(d)
    e1[0] = 1.0
    uni = np.full(d, 1.0 / d)

    def point(t):
        t = t[:, None]
        first = e1 + np.clip(t, 0, 1) * (q - e1)
        return np.where(t <= 1, first, q + (np.clip(t, 1, 2) - 1) * (uni - q))

    lo, hi = np.zeros(n), np.full(n, 2.0)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        below = sqrt_sum_sq(point(mid)) < y
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return point(0.5 * (lo + hi))


class _SphereChart:
    """Square-root vectors ``s`` with ``|s| = 1`` and ``sum s = sqrt(y)`` as points on a sphere.

    ``s = c 1 + r Q v(angles)`` with ``Q`` an orthonormal basis of the complement
    of ``1`` and ``v`` a unit vector of dimension ``d - 1``.
    """

    def __init__(self, d: int, y: float):
        self.d = d
        self.c = np.sqrt(y) / d
        self.r = np.sqrt(max(1.0 - y / d, 0.0))
        basis = np.linalg.qr(np.hstack([np.ones((d, 1)), np.eye(d)[:, : d - 1]]))[0]
        self.Q = basis[:, 1:d]

    def from_angles(self, a: np.ndarray) -> np.ndarray:
        """Square-root vectors for angle arrays of shape ``(..., d - 2)``."""
        a = np.asarray(a, dtype=float)
        if self.d == 3:
            v = np.stack([np.cos(a[..., 0]), np.sin(a[..., 0])], axis=-1)
        else:
            v = np.stack([np.sin(a[..., 0]) * np.cos(a[..., 1]),
                          np.sin(a[..., 0]) * np.sin(a[..., 1]),
                          np.cos(a[..., 0])], axis=-1)
        return self.c + self.r * (v @ self.Q.T)

    def to_angles(self, s: np.ndarray) -> np.ndarray:
        v = self.Q.T @ (s - self.c)
        nv = np.linalg.norm(v)
        v = v / nv if nv > 0 else np.eye(self.d - 1)[0]
        if self.d == 3:
            return np.array([np.arctan2(v[1], v[0])])
        return np.array([np.arccos(np.clip(v[2], -1, 1)), np.arctan2(v[1], v[0])])


def _polish(S: Callable, chart: _SphereChart, p0: np.ndarray, cfg: HConfig) -> tuple[float, np.ndarray]:
    """Pattern search over the sphere angles around ``p0``.

    Each step evaluates a full stencil of offsets in one vectorized call, moves
    to the best point, and shrinks the stencil when the centre is already best.
    """
    a = chart.to_angles(np.sqrt(np.clip(p0, 0, None)))
    k = a.size
    unit = np.array(np.meshgrid(*[np.array([-1.0, -0.5, 0.0, 0.5, 1.0])] * k, indexing="ij")).reshape(k, -1).T

    def values(angles):
        s = chart.from_angles(angles)
        out = np.full(len(angles), np.inf)
        ok = np.all(s >= 0, axis=-1)
        if ok.any():
            out[ok] = S(s[ok] ** 2)
        return out

    best = values(a[None, :])[0]
    if not np.isfinite(best):
        return float(S(p0[None, :])[0]), p0
    step = 0.05
    for _ in range(cfg.max_steps):
        trial = a + step * unit
        vals = values(trial)
        j = int(np.argmin(vals))
        if vals[j] < best - cfg.fatol:
            a, best = trial[j], vals[j]
        else:
            step *= 0.25
            if step < cfg.xatol:
                break
    return float(best), np.clip(chart.from_angles(a), 0, None) ** 2


def _project_to_constraint(p: np.ndarray, y: float) -> np.ndarray | None:
    """Nearest point of the constraint set in square-root coordinates, or None if it leaves the simplex."""
    d = p.size
    s = np.sqrt(np.clip(p, 0, None))
    dev = s - s.mean()
    norm = np.linalg.norm(dev)
    if norm == 0:
        return None
    s = np.sqrt(y) / d + np.sqrt(max(1.0 - y / d, 0.0)) * dev / norm
    if s.min() < 0:
        return None
    return s**2


class _HSolver:
    """Reusable state for evaluating h at one or many y values."""

    def __init__(self, d_star: int, S_fn: Callable | None, cfg: HConfig):
        self.d = _check_dstar(d_star)
        self.S = _vectorized(S_fn if S_fn is not None else negativity_entropy)
        self.cfg = cfg
        self.q = _simplex_points(cfg.sweep, self.d, cfg.seed) if self.d > 2 else None

    def _endpoint(self, y: float) -> tuple[float, np.ndarray] | None:
        d = self.d
        if y == 1.0:
            p = np.eye(d)[0]
        elif y == d:
            p = np.full(d, 1.0 / d)
        elif d == 2:
            c, r = np.sqrt(y) / 2, np.sqrt(1.0 - y / 2)
            p = np.array([c + r / np.sqrt(2), c - r / np.sqrt(2)]) ** 2
        else:
            return None
        return float(self.S(p[None, :])[0]), p

    def _check_y(self, y: float) -> float:
        if not (1.0 - 1e-12 <= y <= self.d + 1e-12):
            raise OutOfRange(f"y = {y!r} outside [1, {self.d}]")
        return float(np.clip(y, 1.0, self.d))

    def __call__(self, y: float) -> tuple[float, np.ndarray]:
        y = self._check_y(y)
        done = self._endpoint(y)
        if done is not None:
            return done
        cand = _feasible_on_paths(self.q, y)
        vals = self.S(cand)
        order = np.argsort(vals)
        chart = _SphereChart(self.d, y)
        best_val, best_p = float(vals[order[0]]), cand[order[0]]
        for i in order[: self.cfg.polish]:
            v, p = _polish(self.S, chart, cand[i], self.cfg)
            if v < best_val:
                best_val, best_p = v, p
        return best_val, best_p

    def curve(self, ys: np.ndarray, path_points: int = 128) -> np.ndarray:
        """h on an ascending grid, sharing one sweep across all grid points.

        Every sweep path (vertex -> q -> uniform) is sampled at ``path_points``
        parameters; each sample is binned to its nearest grid value, and the
        bin minimum, projected onto the exact constraint set, competes with the
        previous grid point's minimizer as the start of a local polish.
        """
        ys = np.asarray(ys, dtype=float)
        out = np.empty(ys.size)
        if self.d == 2:
            return np.array([self(float(y))[0] for y in ys])
        best_sample = self._bin_minima(ys, path_points)
        warm = None
        for k, y in enumerate(ys):
            y = self._check_y(float(y))
            done = self._endpoint(y)
            if done is not None:
                out[k], warm = done
                continue
            starts = []
            for p in (best_sample[k], warm):
                if p is not None:
                    proj = _project_to_constraint(p, y)
                    if proj is not None:
                        starts.append((float(self.S(proj[None, :])[0]), proj))
            if not starts:
                out[k], warm = self(y)
                continue
            v0, p0 = min(starts, key=lambda t: t[0])
            out[k], warm = _polish(self.S, _SphereChart(self.d, y), p0, self.cfg)
        return out

    def _bin_minima(self, ys: np.ndarray, path_points: int) -> list:
        d = self.d
        e1 = np.eye(d)[0]
        uni = np.full(d, 1.0 / d)
        t = np.linspace(0.0, 2.0, path_points)
        first = e1 + np.clip(t, 0, 1)[None, :, None] * (self.q[:, None, :] - e1)
        second = self.q[:, None, :] + (np.clip(t, 1, 2) - 1)[None, :, None] * (uni - self.q[:, None, :])
        pts = np.where((t <= 1)[None, :, None], first, second).reshape(-1, d)
        yv = sqrt_sum_sq(pts)
        sv = self.S(pts)
        idx = np.clip(np.searchsorted(ys, yv), 1, ys.size - 1)
        idx = np.where(np.abs(ys[idx - 1] - yv) <= np.abs(ys[idx] - yv), idx - 1, idx)
        order = np.lexsort((sv, idx))
        first_in_bin = np.ones(order.size, dtype=bool)
        first_in_bin[1:] = idx[order][1:] != idx[order][:-1]
        best: list = [None] * ys.size
        for j in order[first_in_bin]:
            best[idx[j]] = pts[j]
        return best


def h_of_y(d_star: int, y: float, S_fn: Callable | None = None, cfg: HConfig | None = None) -> float:
    """Infimum of ``S_fn`` over probability vectors of length ``d_star`` with ``sum sqrt(p) = sqrt(y)``.

    ``S_fn`` maps a probability vector (or a stack of them, last axis) to a
    real; it defaults to the two-qubit negativity entropy ``1/2 - G``.
    """
    return _HSolver(d_star, S_fn, cfg or HConfig())(y)[0]


def h_minimizer(d_star: int, y: float, S_fn: Callable | None = None,
                cfg: HConfig | None = None) -> np.ndarray:
    """Descending spectrum attaining :func:`h_of_y`."""
    return np.sort(_HSolver(d_star, S_fn, cfg or HConfig())(y)[1])[::-1]


# ---------------------------------------------------------------------------
# lower convex envelope


@dataclass(frozen=True, eq=False)
class EnvelopeFunction:
    """Samples ``ys`` on ``xs`` together with their greatest convex minorant ``hull_ys``."""

    xs: np.ndarray
    ys: np.ndarray
    hull_ys: np.ndarray
    vertices: np.ndarray

    def __call__(self, x):
        return np.interp(x, self.xs, self.hull_ys)

    def raw(self, x):
        return np.interp(x, self.xs, self.ys)

    def final_chord(self) -> tuple[float, float]:
        """Left end and slope of the last hull segment (the tangent switch ``y0``, ``a``)."""
        i, j = self.vertices[-2], self.vertices[-1]
        return float(self.xs[i]), float((self.ys[j] - self.ys[i]) / (self.xs[j] - self.xs[i]))

    def chords(self, min_span: int = 2) -> list[tuple[float, float, float]]:
        """Hull segments spanning at least ``min_span`` grid steps, as (x_left, x_right, slope)."""
        out = []
        for i, j in zip(self.vertices[:-1], self.vertices[1:]):
            if j - i >= min_span:
                out.append((float(self.xs[i]), float(self.xs[j]),
                            float((self.ys[j] - self.ys[i]) / (self.xs[j] - self.xs[i]))))
        return out


def lower_convex_envelope(xs, ys) -> EnvelopeFunction:
    """Greatest convex function below the samples, via the lower hull (monotone chain)."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.ndim != 1 or xs.shape != ys.shape:
        raise BadGrid("xs and ys must be 1-d arrays of equal length")
    if xs.size < 3:
        raise BadGrid("need at least 3 grid points")
    if np.any(np.diff(xs) <= 0):
        raise BadGrid("xs must be strictly ascending")
    if not np.all(np.isfinite(ys)):
        raise BadGrid("ys must be finite")
    hull: list[int] = []
    for k in range(xs.size):
        while len(hull) >= 2:
            i, j = hull[-2], hull[-1]
            cross = (xs[j] - xs[i]) * (ys[k] - ys[i]) - (ys[j] - ys[i]) * (xs[k] - xs[i])
            if cross <= 0:
                hull.pop()
            else:
                break
        hull.append(k)
    v = np.array(hull)
    hull_ys = np.interp(xs, xs[v], ys[v])
    hull_ys = np.minimum(hull_ys, ys)
    return EnvelopeFunction(xs, ys, hull_ys, v)


# ---------------------------------------------------------------------------
# g(x)


def g_domain(d_star: int) -> tuple[float, float]:
    _check_dstar(d_star)
    return 0.0, (d_star - 1) / 2


def _check_x(d_star: int, x) -> np.ndarray:
    lo, hi = g_domain(d_star)
    x = np.asarray(x, dtype=float)
    if np.any(x < lo - 1e-12) or np.any(x > hi + 1e-12):
        raise OutOfRange(f"x outside [{lo}, {hi}] for d* = {d_star}")
    return np.clip(x, lo, hi)


def g_analytic(d_star: int, x):
    """Closed-form g for a two-qubit A and ``d* = 2, 3, 4``."""
    x = _check_x(d_star, x)
    if d_star == 2:
        g = (1.5 - np.sqrt(np.clip(1 - 2 * x**2, 0, None)) - np.sqrt(np.clip(0.25 - x**2, 0, None))) / 2
    elif d_star == 3:
        k = (np.sqrt(2 * x + 1) - np.sqrt(np.clip(1 - x, 0, None))) ** 2
        # k (sqrt(1 + (9/k - 3)^2) - 1), rewritten to stay finite at k = 0
        g = 0.5 - (np.sqrt(k**2 + (9 - 3 * k) ** 2) - k) / 18
    else:
        low = 1 - (np.sqrt(1 + 2 * x) + np.sqrt(np.clip(9 - 6 * x, 0, None))) ** 2 / 16
        g = np.where(x <= 1, low, x / 2 - 0.25)
    g = np.clip(g, 0.0, None)
    return float(g) if g.ndim == 0 else g


def h_curve(d_star: int, n_grid: int = 2001, S_fn: Callable | None = None,
            cfg: HConfig | None = None) -> EnvelopeFunction:
    """Sample h on a uniform grid over [1, d*] and return it with its convex envelope."""
    d = _check_dstar(d_star)
    if n_grid < 3:
        raise BadGrid("need at least 3 grid points")
    solver = _HSolver(d, S_fn, cfg or HConfig())
    ys_grid = np.linspace(1.0, d, n_grid)
    hs = solver.curve(ys_grid)
    return lower_convex_envelope(ys_grid, hs)


@functools.lru_cache(maxsize=16)
def _default_envelope(d_star: int, n_grid: int, sweep: int, seed: int) -> EnvelopeFunction:
    return h_curve(d_star, n_grid, None, HConfig(sweep=sweep, seed=seed))


def negativity_envelope(d_star: int, n_grid: int = 2001, sweep: int = 10_000,
                        seed: int = 0) -> EnvelopeFunction:
    """Cached co(h) for the two-qubit negativity entropy."""
    return _default_envelope(_check_dstar(d_star), int(n_grid), int(sweep), int(seed))


def g_numeric(d_star: int, x, envelope: EnvelopeFunction | None = None, **kwargs):
    """g(x) = co(h)(2x + 1) from the numerically built envelope."""
    x = _check_x(d_star, x)
    env = envelope if envelope is not None else negativity_envelope(d_star, **kwargs)
    g = env(2 * x + 1)
    return float(g) if np.ndim(g) == 0 else g
