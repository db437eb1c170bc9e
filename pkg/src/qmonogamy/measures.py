"""Resource measures and entanglement monotones."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .entropies import VON_NEUMANN, EntropyKind, binary_entropy, entropy, entropy_values, shannon
from .errors import BadOrder, DimensionMismatch, NotPure, TooManyEntries
from .qcore import (
    BipartiteSplit,
    Spectrum,
    _as_array,
    _split_of,
    hermitian_spectrum,
    partial_trace,
    partial_transpose,
)

UNITARY_TOL = 1e-10
PURITY_TOL = 1e-8

#: maximal two-qubit negativity, (d* - 1)/2 with d* = 2
NEG_MAX_TWO_QUBIT = 0.5


def is_unitary(u: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return bool(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) <= tol)


def _check_basis(basis, dim: int) -> np.ndarray:
    if basis is None:
        return np.eye(dim, dtype=complex)
    u = np.asarray(basis, dtype=complex)
    if u.shape != (dim, dim):
        raise DimensionMismatch(f"basis of shape {u.shape} for a dimension-{dim} state")
    if not is_unitary(u):
        raise ValueError("basis matrix is not unitary")
    return u


def rotated_qubit_basis(theta: float) -> np.ndarray:
    """Columns ``cos t|0> + sin t|1>`` and ``sin t|0> - cos t|1>``."""
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, s], [s, -c]], dtype=complex)


def rel_ent_coherence(rho, basis=None) -> float:
    """Relative entropy of coherence: Shannon entropy of basis populations minus S_vN."""
    m = _as_array(rho)
    u = _check_basis(basis, m.shape[0])
    pops = np.real(np.einsum("ji,jk,ki->i", u.conj(), m, u))
    pops = np.clip(pops, 0.0, None)
    pops = pops / pops.sum()
    value = shannon(pops) - entropy(hermitian_spectrum(m))
    return float(max(value, 0.0))


def nonuniformity(rho, kind: EntropyKind = VON_NEUMANN) -> float:
    """``log d - S`` for von Neumann/Renyi entropies, ``R_sup - d^(q-1) S_T`` for Tsallis."""
    m = _as_array(rho)
    d = m.shape[0]
    spec = hermitian_spectrum(m)
    return float(max(nonuniformity_from_spectrum(spec.probs, d, kind), 0.0))


def nonuniformity_sup(d: int, kind: EntropyKind = VON_NEUMANN) -> float:
    if kind.kind == "tsallis":
        q = kind.order
        return (d ** (q - 1) - 1) / (q - 1)
    return float(np.log(d))


def nonuniformity_from_spectrum(p, d: int, kind: EntropyKind = VON_NEUMANN):
    s = entropy_values(p, kind)
    if kind.kind == "tsallis":
        return nonuniformity_sup(d, kind) - d ** (kind.order - 1) * s
    return np.log(d) - s


def negativity(rho, split: BipartiteSplit | None = None) -> float:
    """Sum of the absolute values of the negative eigenvalues of the partial transpose."""
    lam = np.linalg.eigvalsh(partial_transpose(rho, split, "B"))
    return 0.0 + float(-lam[lam < 0].sum())


def pure_negativity_from_schmidt(probs) -> float:
    """Negativity of a pure state from its Schmidt probabilities: sum_{i<j} sqrt(p_i p_j)."""
    p = np.asarray(probs, dtype=float)
    # eigensolver noise of order 1e-16 would otherwise enter as 1e-8 through the square root
    s = np.sqrt(np.where(p > 1e-13, p, 0.0))
    return float((s.sum() ** 2 - (s**2).sum()) / 2)


_SY2 = np.kron(np.array([[0, -1j], [1j, 0]]), np.array([[0, -1j], [1j, 0]]))


def concurrence(rho) -> float:
    """Wootters concurrence of a two-qubit state."""
    m = _as_array(rho)
    if m.shape != (4, 4):
        raise DimensionMismatch("concurrence needs a 2x2 bipartite (4x4) state")
    w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
    sqrt_rho = (v * np.sqrt(np.clip(w, 0, None))) @ v.conj().T
    flipped = _SY2 @ m.conj() @ _SY2
    r = sqrt_rho @ flipped @ sqrt_rho
    lam = np.sqrt(np.clip(np.linalg.eigvalsh(0.5 * (r + r.conj().T)), 0, None))[::-1]
    return float(np.clip(lam[0] - lam[1:].sum(), 0.0, 1.0))


def eof_from_concurrence(c: float) -> float:
    c = min(max(c, 0.0), 1.0)
    return binary_entropy((1 + np.sqrt(1 - c * c)) / 2)


def eof_wootters(rho) -> float:
    """Two-qubit entanglement of formation in nats."""
    return eof_from_concurrence(concurrence(rho))


def pure_state_entanglement(rho, split: BipartiteSplit | None = None,
                            entropy_fn: Callable = VON_NEUMANN) -> float:
    """Entropy of the reduced state of a pure bipartite state."""
    split = _split_of(rho, split)
    m = _as_array(rho)
    purity = float(np.real(np.vdot(m, m)))
    if purity < 1 - PURITY_TOL:
        raise NotPure(f"purity {purity!r}")
    reduced = partial_trace(m, split, "A")
    return float(entropy_fn(hermitian_spectrum(reduced)))


def _pad4(p) -> np.ndarray:
    p = np.asarray(p.probs if isinstance(p, Spectrum) else p, dtype=float)
    if p.shape[-1] > 4:
        if np.any(p[..., 4:] > 0):
            raise TooManyEntries(f"spectrum has {p.shape[-1]} entries, at most 4 allowed")
        p = p[..., :4]
    if p.shape[-1] < 4:
        pad = [(0, 0)] * (p.ndim - 1) + [(0, 4 - p.shape[-1])]
        p = np.pad(p, pad)
    return -np.sort(-p, axis=-1)


def neg_spectrum_H(spec) -> np.ndarray | float:
    """sqrt((p1-p3)^2 + (p2-p4)^2) - p2 - p4 on the descending, zero-padded spectrum."""
    p = _pad4(spec)
    h = np.hypot(p[..., 0] - p[..., 2], p[..., 1] - p[..., 3]) - p[..., 1] - p[..., 3]
    return float(h) if np.ndim(h) == 0 else h


def neg_spectrum_G(spec) -> np.ndarray | float:
    """Largest two-qubit negativity on the unitary orbit of a spectrum (at most 4 entries)."""
    g = np.maximum(neg_spectrum_H(spec), 0.0) / 2
    return float(g) if np.ndim(g) == 0 else g


_MAX_NEG_BASIS = np.array([
    [1, 0, 1, 0],
    [0, np.sqrt(2), 0, 0],
    [0, 0, 0, np.sqrt(2)],
    [1, 0, -1, 0],
]) / np.sqrt(2)


def max_negativity_state(spec) -> np.ndarray:
    """Two-qubit state on the orbit of ``spec`` whose negativity equals :func:`neg_spectrum_G`.

    Eigenvectors, in descending eigenvalue order: ``(|00>+|11>)/sqrt2``,
    ``|01>``, ``(|00>-|11>)/sqrt2``, ``|10>``.
    """
    p = _pad4(spec)
    return (_MAX_NEG_BASIS * p) @ _MAX_NEG_BASIS.T + 0j


def negativity_entropy(spec) -> np.ndarray | float:
    """Entropy induced by the two-qubit negativity: 1/2 - G."""
    s = NEG_MAX_TWO_QUBIT - np.asarray(neg_spectrum_G(spec))
    return float(s) if np.ndim(s) == 0 else s


@dataclass(frozen=True, eq=False)
class MeasureDescriptor:
    """Identifies a resource measure R_d on d x d states and its supremum.

    ``kind`` is one of ``coherence``, ``nonuniformity``, ``negativity2q``
    (two-qubit negativity with its closed-form orbit maximum) or
    ``negativity`` (negativity on an arbitrary split, orbit maximum by search
    only).
    """

    kind: str
    dim: int
    basis: np.ndarray | None = None
    entropy_kind: EntropyKind = field(default=VON_NEUMANN)
    split: BipartiteSplit | None = None

    def __post_init__(self):
        if self.kind == "coherence":
            object.__setattr__(self, "basis", _check_basis(self.basis, self.dim))
        elif self.kind == "nonuniformity":
            if self.entropy_kind.kind == "binary":
                raise BadOrder("nonuniformity needs a von Neumann, Renyi or Tsallis entropy")
        elif self.kind == "negativity2q":
            if self.dim != 4:
                raise DimensionMismatch("two-qubit negativity lives on dimension 4")
            object.__setattr__(self, "split", BipartiteSplit(2, 2))
        elif self.kind == "negativity":
            if self.split is None or self.split.dim != self.dim:
                raise DimensionMismatch("negativity measure needs a split matching dim")
        else:
            raise ValueError(f"unknown measure kind {self.kind!r}")

    @classmethod
    def coherence(cls, basis=None, dim: int | None = None) -> "MeasureDescriptor":
        if dim is None:
            dim = np.asarray(basis).shape[0]
        return cls("coherence", dim, basis=basis)

    @classmethod
    def nonuniformity(cls, dim: int, kind: EntropyKind = VON_NEUMANN) -> "MeasureDescriptor":
        return cls("nonuniformity", dim, entropy_kind=kind)

    @classmethod
    def negativity_two_qubit(cls) -> "MeasureDescriptor":
        return cls("negativity2q", 4)

    @classmethod
    def negativity_split(cls, split: BipartiteSplit) -> "MeasureDescriptor":
        return cls("negativity", split.dim, split=split)

    def label(self) -> str:
        if self.kind == "nonuniformity":
            return f"nonuniformity[{self.entropy_kind.label()}]"
        if self.kind == "negativity":
            return f"negativity[{self.split.d_a}x{self.split.d_b}]"
        return self.kind

    def evaluate(self, rho) -> float:
        m = _as_array(rho)
        if m.shape[0] != self.dim:
            raise DimensionMismatch(f"{self.label()} expects dimension {self.dim}, got {m.shape[0]}")
        if self.kind == "coherence":
            return rel_ent_coherence(m, self.basis)
        if self.kind == "nonuniformity":
            return nonuniformity(m, self.entropy_kind)
        return negativity(m, self.split)

    __call__ = evaluate

    def sup_value(self) -> float:
        if self.kind == "nonuniformity":
            return nonuniformity_sup(self.dim, self.entropy_kind)
        if self.kind == "coherence":
            return float(np.log(self.dim))
        return (self.split.d_star - 1) / 2

    @property
    def entanglement_weight(self) -> float:
        """Factor multiplying E in ``R(rho_A) + w E <= R_sup`` (``d^(q-1)`` for Tsallis)."""
        if self.kind == "nonuniformity" and self.entropy_kind.kind == "tsallis":
            return float(self.dim ** (self.entropy_kind.order - 1))
        return 1.0

    @property
    def spectrum_only(self) -> bool:
        """True when R itself depends on the state only through its spectrum."""
        return self.kind == "nonuniformity"

    def has_closed_form(self) -> bool:
        return self.kind in {"coherence", "nonuniformity", "negativity2q"}

    def closed_form_G(self, p) -> float:
        """Orbit supremum from the spectrum alone, where a closed form is known.

        Coherence: ``log d - S_vN`` (attained by a basis unbiased to the eigenbasis).
        """
        p = np.asarray(p.probs if isinstance(p, Spectrum) else p, dtype=float)
        if self.kind == "nonuniformity":
            return float(nonuniformity_from_spectrum(p, self.dim, self.entropy_kind))
        if self.kind == "coherence":
            return float(np.log(self.dim) - shannon(p))
        if self.kind == "negativity2q":
            return neg_spectrum_G(p)
        raise NotImplementedError(f"no closed form for {self.label()}")

    def entanglement_entropy(self, spec) -> float:
        """Entropy S for which E(psi) = S(rho_A) makes E satisfy the monogamy bound.

        Von Neumann / Renyi / Tsallis entropy for nonuniformity (E enters the
        Tsallis bound with weight ``d^(q-1)``), von Neumann for coherence and
        ``1/2 - G`` for the two-qubit negativity.
        """
        p = spec.probs if isinstance(spec, Spectrum) else np.asarray(spec, dtype=float)
        if self.kind == "nonuniformity":
            return entropy(p, self.entropy_kind)
        if self.kind == "coherence":
            return entropy(p)
        if self.kind == "negativity2q":
            return negativity_entropy(p)
        raise NotImplementedError(f"no entanglement entropy for {self.label()}")
