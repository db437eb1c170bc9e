"""Spectral entropies (in nats) and majorization."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BadOrder, OutOfRange
from .qcore import Spectrum

MAJORIZATION_SLACK = 1e-12


@dataclass(frozen=True)
class EntropyKind:
    """One of ``vonneumann``, ``renyi``, ``tsallis`` or ``binary``.

    Renyi and Tsallis requests of order exactly 1 collapse to von Neumann.
    """

    kind: str = "vonneumann"
    order: float | None = None

    def __post_init__(self):
        kind = self.kind.lower().replace("_", "").replace("-", "")
        aliases = {"vn": "vonneumann", "shannon": "vonneumann"}
        kind = aliases.get(kind, kind)
        if kind not in {"vonneumann", "renyi", "tsallis", "binary"}:
            raise ValueError(f"unknown entropy kind {self.kind!r}")
        order = self.order
        if kind in {"renyi", "tsallis"}:
            if order is None or not np.isfinite(order) or order <= 0:
                raise BadOrder(f"{kind} order must be positive, got {order!r}")
            order = float(order)
            if order == 1.0:
                kind, order = "vonneumann", None
        else:
            order = None
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "order", order)

    @classmethod
    def von_neumann(cls) -> "EntropyKind":
        return cls("vonneumann")

    @classmethod
    def renyi(cls, alpha: float) -> "EntropyKind":
        return cls("renyi", alpha)

    @classmethod
    def tsallis(cls, q: float) -> "EntropyKind":
        return cls("tsallis", q)

    def label(self) -> str:
        if self.order is None:
            return self.kind
        return f"{self.kind}({self.order:g})"

    def __call__(self, spec):
        """Entropy of one spectrum, or of each row of a stacked array."""
        if not isinstance(spec, Spectrum) and np.ndim(spec) > 1:
            return np.maximum(entropy_values(spec, self), 0.0)
        return entropy(spec, self)


VON_NEUMANN = EntropyKind()


def _probs(spec) -> np.ndarray:
    if isinstance(spec, Spectrum):
        return spec.probs
    return np.asarray(spec, dtype=float)


def shannon(p: np.ndarray) -> np.ndarray:
    """Shannon entropy over the last axis with 0 log 0 = 0."""
    p = np.asarray(p, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(p > 0, -p * np.log(np.where(p > 0, p, 1.0)), 0.0)
    return terms.sum(axis=-1)


def entropy_values(p, kind: EntropyKind = VON_NEUMANN) -> np.ndarray:
    """Vectorized entropy over the last axis of an array of probability vectors."""
    p = np.clip(np.asarray(p, dtype=float), 0.0, None)
    if kind.kind in {"vonneumann", "binary"}:
        return shannon(p)
    a = kind.order
    power_sum = np.sum(np.where(p > 0, p, 0.0) ** a, axis=-1)
    if kind.kind == "renyi":
        return np.log(power_sum) / (1.0 - a)
    return (1.0 - power_sum) / (a - 1.0)


def entropy(spec, kind: EntropyKind = VON_NEUMANN) -> float:
    """Entropy of a spectrum in nats."""
    p = _probs(spec)
    if kind.kind == "binary" and p.size > 2 and np.any(p[2:] > 0):
        raise ValueError("binary entropy needs at most two nonzero entries")
    return float(max(entropy_values(p, kind), 0.0))


def binary_entropy(p: float) -> float:
    """h(p) = -p ln p - (1-p) ln(1-p)."""
    if not 0.0 <= p <= 1.0:
        raise OutOfRange(f"p={p!r} outside [0, 1]")
    return float(shannon(np.array([p, 1.0 - p])))


def binary_entropy_array(p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if np.any((p < 0) | (p > 1)):
        raise OutOfRange("probabilities outside [0, 1]")
    return shannon(np.stack([p, 1.0 - p], axis=-1))


def _padded_pair(a, b) -> tuple[np.ndarray, np.ndarray]:
    a = np.sort(_probs(a))[::-1]
    b = np.sort(_probs(b))[::-1]
    n = max(a.size, b.size)
    return np.pad(a, (0, n - a.size)), np.pad(b, (0, n - b.size))


def majorizes(a, b, slack: float = MAJORIZATION_SLACK) -> bool:
    """True iff every partial sum of sorted ``a`` dominates that of ``b``."""
    a, b = _padded_pair(a, b)
    return bool(np.all(np.cumsum(a) >= np.cumsum(b) - slack))


def mix_toward_uniform(p, t: float) -> np.ndarray:
    """``(1-t) p + t u``; always majorized by ``p``."""
    p = np.asarray(p, dtype=float)
    return (1.0 - t) * p + t / p.size
