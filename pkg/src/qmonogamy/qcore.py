"""Dense complex-matrix primitives: states, spectra, partial operations, sampling.

Subsystem convention: ``factors`` are listed left to right and the composite
index is the row-major index over them, i.e. ``np.kron(rho_1, rho_2)`` has
factors ``(d1, d2)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

from .errors import (
    BadRank,
    DimensionMismatch,
    NotHermitian,
    NotNormalized,
    NotPositive,
)

HERM_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = 1e-10

Side = Literal["A", "B"]


def _rng(rng) -> np.random.Generator:
    return np.random.default_rng(rng)


def _as_array(m) -> np.ndarray:
    if isinstance(m, DensityMatrix):
        return m.data
    return np.asarray(m, dtype=complex)


def hermiticity_error(m: np.ndarray) -> float:
    m = np.asarray(m)
    if m.size == 0:
        return 0.0
    return float(np.max(np.abs(m - m.conj().T)))


@dataclass(frozen=True)
class Spectrum:
    """Probability vector sorted in descending order."""

    probs: np.ndarray

    def __post_init__(self):
        p = np.array(self.probs, dtype=float).ravel()
        if p.size == 0:
            raise ValueError("empty spectrum")
        if np.any(p < 0) or np.any(p > 1 + 1e-10):
            raise ValueError(f"spectrum entries must lie in [0, 1]: {p}")
        if abs(p.sum() - 1.0) > 1e-10:
            raise NotNormalized(f"spectrum sums to {p.sum()!r}")
        if np.any(np.diff(p) > 0):
            raise ValueError("spectrum must be sorted in descending order")
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)

    @classmethod
    def from_values(cls, values: Sequence[float], tol: float = PSD_TOL) -> "Spectrum":
        """Sort, clamp tiny negatives to zero and renormalize."""
        p = np.sort(np.asarray(values, dtype=float).ravel())[::-1]
        if p.size and p[-1] < -tol:
            raise NotPositive(f"negative probability {p[-1]!r}")
        p = np.clip(p, 0.0, None)
        s = p.sum()
        if abs(s - 1.0) > max(tol, 1e-10) * max(1, p.size):
            raise NotNormalized(f"values sum to {s!r}")
        return cls(p / s)

    def __len__(self) -> int:
        return self.probs.size

    def __iter__(self):
        return iter(self.probs.tolist())

    def padded(self, n: int) -> np.ndarray:
        """Probabilities zero-padded to length ``n``."""
        if n < self.probs.size:
            extra = self.probs[n:]
            if np.any(extra > 0):
                raise ValueError(f"cannot truncate spectrum with {np.count_nonzero(extra)} nonzero tail entries")
            return self.probs[:n].copy()
        out = np.zeros(n)
        out[: self.probs.size] = self.probs
        return out

    def rank(self, tol: float = 1e-12) -> int:
        return int(np.count_nonzero(self.probs > tol))


@dataclass(frozen=True)
class BipartiteSplit:
    d_a: int
    d_b: int

    def __post_init__(self):
        if int(self.d_a) < 1 or int(self.d_b) < 1:
            raise ValueError("subsystem dimensions must be positive")

    @property
    def dim(self) -> int:
        return self.d_a * self.d_b

    @property
    def d_star(self) -> int:
        return min(self.d_a, self.d_b)

    def check(self, dim: int) -> None:
        if dim != self.dim:
            raise DimensionMismatch(f"state dimension {dim} != {self.d_a}*{self.d_b}")


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Validated Hermitian, unit-trace, positive semidefinite matrix."""

    data: np.ndarray
    factors: tuple[int, ...] = field(default=())
    validate: bool = field(default=True, repr=False)

    def __post_init__(self):
        m = np.array(self.data, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionMismatch(f"density matrix must be square, got shape {m.shape}")
        dim = m.shape[0]
        factors = tuple(int(f) for f in self.factors) or (dim,)
        if int(np.prod(factors)) != dim:
            raise DimensionMismatch(f"factors {factors} do not multiply to {dim}")
        if self.validate:
            herr = hermiticity_error(m)
            if herr > HERM_TOL:
                raise NotHermitian(f"hermiticity deviation {herr:.3e}")
            tr = np.trace(m).real
            if abs(tr - 1.0) > TRACE_TOL:
                raise NotNormalized(f"trace {tr!r}")
            lo = np.linalg.eigvalsh(m)[0] if dim else 0.0
            if lo < -PSD_TOL:
                raise NotPositive(f"smallest eigenvalue {lo:.3e}")
        m.setflags(write=False)
        object.__setattr__(self, "data", m)
        object.__setattr__(self, "factors", factors)

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    @classmethod
    def from_vector(cls, psi, factors: Sequence[int] = ()) -> "DensityMatrix":
        psi = np.asarray(psi, dtype=complex).ravel()
        norm = np.linalg.norm(psi)
        if abs(norm - 1.0) > 1e-10:
            raise NotNormalized(f"state vector norm {norm!r}")
        return cls(np.outer(psi, psi.conj()), tuple(factors))

    def purity(self) -> float:
        return float(np.real(np.vdot(self.data, self.data)))

    def spectrum(self) -> Spectrum:
        return hermitian_spectrum(self)

    def conjugate_by(self, u: np.ndarray) -> "DensityMatrix":
        u = np.asarray(u, dtype=complex)
        m = u @ self.data @ u.conj().T
        return DensityMatrix(0.5 * (m + m.conj().T), self.factors)

    def fingerprint(self) -> str:
        import hashlib

        return hashlib.sha256(np.ascontiguousarray(self.data).tobytes()).hexdigest()[:16]


def eigvals_desc(m) -> np.ndarray:
    """Real eigenvalues of a Hermitian matrix in descending order."""
    a = _as_array(m)
    herr = hermiticity_error(a)
    if herr > HERM_TOL:
        raise NotHermitian(f"hermiticity deviation {herr:.3e}")
    return np.sort(np.linalg.eigvalsh(a))[::-1]


def hermitian_spectrum(m) -> Spectrum:
    """Descending spectrum of a density matrix.

    Eigenvalues in ``[-1e-10, 0)`` are treated as round-off: clamped to zero
    before renormalizing. Anything more negative raises :class:`NotPositive`.
    """
    return Spectrum.from_values(eigvals_desc(m), tol=PSD_TOL)


def _split_of(rho, split: BipartiteSplit | None) -> BipartiteSplit:
    if split is not None:
        return split
    if isinstance(rho, DensityMatrix) and len(rho.factors) == 2:
        return BipartiteSplit(*rho.factors)
    raise DimensionMismatch("a bipartite split is required")


def partial_trace(rho, split: BipartiteSplit | None = None, keep: Side = "A") -> DensityMatrix:
    """Reduced state of one side of a bipartite state."""
    split = _split_of(rho, split)
    m = _as_array(rho)
    split.check(m.shape[0])
    t = m.reshape(split.d_a, split.d_b, split.d_a, split.d_b)
    if keep == "A":
        out = np.einsum("ijkj->ik", t)
        factors = (split.d_a,)
    elif keep == "B":
        out = np.einsum("ijil->jl", t)
        factors = (split.d_b,)
    else:
        raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")
    out = 0.5 * (out + out.conj().T)
    return DensityMatrix(out, factors)


def partial_transpose(rho, split: BipartiteSplit | None = None, side: Side = "B") -> np.ndarray:
    """Partial transpose on one side. A pure index permutation, hence an exact involution."""
    split = _split_of(rho, split)
    m = _as_array(rho)
    split.check(m.shape[0])
    t = m.reshape(split.d_a, split.d_b, split.d_a, split.d_b)
    if side == "A":
        t = t.transpose(2, 1, 0, 3)
    elif side == "B":
        t = t.transpose(0, 3, 2, 1)
    else:
        raise ValueError(f"side must be 'A' or 'B', got {side!r}")
    return np.ascontiguousarray(t.reshape(m.shape))


def reduce_subsystems(m, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Partial trace of a multipartite matrix onto the subsystems in ``keep`` (kept in order)."""
    m = _as_array(m)
    dims = [int(d) for d in dims]
    n = len(dims)
    if int(np.prod(dims)) != m.shape[0]:
        raise DimensionMismatch(f"dims {dims} do not match matrix of size {m.shape[0]}")
    keep = sorted(int(k) for k in keep)
    t = m.reshape(dims + dims)
    traced = [k for k in range(n) if k not in keep]
    # trace from the highest axis down so remaining axis numbers stay valid
    cur = n
    for k in sorted(traced, reverse=True):
        t = np.trace(t, axis1=k, axis2=k + cur)
        cur -= 1
    d = int(np.prod([dims[k] for k in keep])) if keep else 1
    return t.reshape(d, d)


def reduced_state(rho, dims: Sequence[int], keep: Sequence[int]) -> DensityMatrix:
    out = reduce_subsystems(rho, dims, keep)
    out = 0.5 * (out + out.conj().T)
    return DensityMatrix(out, tuple(int(dims[k]) for k in sorted(keep)))


def tensor(*states: DensityMatrix) -> DensityMatrix:
    data = np.array([[1.0 + 0j]])
    factors: list[int] = []
    for s in states:
        data = np.kron(data, s.data)
        factors.extend(s.factors)
    return DensityMatrix(data, tuple(factors))


def random_unitary(dim: int, rng=None) -> np.ndarray:
    """Haar-distributed unitary (QR of a Ginibre matrix with the phase fix)."""
    rng = _rng(rng)
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_pure_vector(dim: int, rng=None) -> np.ndarray:
    rng = _rng(rng)
    psi = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return psi / np.linalg.norm(psi)


def random_pure_state(dim: int, rng=None, factors: Sequence[int] = ()) -> DensityMatrix:
    """Haar-random pure state as a rank-1 projector."""
    if dim < 1:
        raise ValueError("dim must be >= 1")
    return DensityMatrix.from_vector(random_pure_vector(dim, rng), factors)


def random_density_matrix(dim: int, rank: int | None = None, rng=None,
                          factors: Sequence[int] = ()) -> DensityMatrix:
    """Hilbert-Schmidt-type random state ``G G^dag / tr`` with a ``dim x rank`` Ginibre ``G``."""
    rank = dim if rank is None else int(rank)
    if not 1 <= rank <= dim:
        raise BadRank(f"rank {rank} outside [1, {dim}]")
    rng = _rng(rng)
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    m = g @ g.conj().T
    m = m / np.trace(m).real
    return DensityMatrix(0.5 * (m + m.conj().T), tuple(factors))


_SYM_BASIS = np.zeros((8, 4), dtype=complex)
_SYM_BASIS[0b000, 0] = 1.0
_SYM_BASIS[[0b001, 0b010, 0b100], 1] = 1 / np.sqrt(3)
_SYM_BASIS[[0b011, 0b101, 0b110], 2] = 1 / np.sqrt(3)
_SYM_BASIS[0b111, 3] = 1.0


def symmetric_three_qubit_vector(coeffs: Sequence[complex]) -> np.ndarray:
    c = np.asarray(coeffs, dtype=complex).ravel()
    if c.size != 4:
        raise ValueError("need 4 amplitudes over (|000>, W, W-bar, |111>)")
    if abs(np.linalg.norm(c) - 1.0) > 1e-10:
        raise NotNormalized(f"amplitude norm {np.linalg.norm(c)!r}")
    return _SYM_BASIS @ c


def symmetric_three_qubit_pure(coeffs: Sequence[complex]) -> DensityMatrix:
    """Permutation-symmetric three-qubit pure state on the basis |000>, W, W-bar, |111>."""
    return DensityMatrix.from_vector(symmetric_three_qubit_vector(coeffs), (2, 2, 2))


def permute_subsystems(m, dims: Sequence[int], order: Sequence[int]) -> np.ndarray:
    """Reorder tensor factors of a matrix; ``order[k]`` is the old index placed at slot ``k``."""
    m = _as_array(m)
    dims = [int(d) for d in dims]
    n = len(dims)
    t = m.reshape(dims + dims)
    t = t.transpose(list(order) + [n + k for k in order])
    d = m.shape[0]
    return np.ascontiguousarray(t.reshape(d, d))
