"""Monogamy inequality evaluators and the three-qubit comparison curves.

Every evaluator returns a :class:`MonogamyReport` with ``lhs <= rhs`` expected.
Closed-form evaluators use a violation tolerance of 1e-9. When an entanglement
term comes from the convex-roof estimator the tolerance is 1e-4 and the report
is marked approximate.
"""
from __future__ import annotations

import enum
from dataclasses import asdict, dataclass
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.optimize import bisect, minimize

from .convexroof import ConvexRoofConfig, estimate_convex_roof
from .errors import DimensionMismatch, NotPure, OutOfRange, Unsupported, UnsupportedDStar
from .gbound import (
    OrbitConfig,
    _orbit_objective,
    g_analytic,
    g_numeric,
    g_orbit_sup,
    givens_unitary,
)
from .measures import (
    NEG_MAX_TWO_QUBIT,
    MeasureDescriptor,
    negativity,
    negativity_entropy,
    pure_negativity_from_schmidt,
)
from .qcore import (
    BipartiteSplit,
    DensityMatrix,
    Spectrum,
    _as_array,
    hermitian_spectrum,
    partial_trace,
    random_unitary,
    reduce_subsystems,
    symmetric_three_qubit_pure,
)

CLOSED_FORM_TOL = 1e-9
ROOF_TOL = 1e-4
PURITY_TOL = 1e-8


class InequalityId(str, enum.Enum):
    RESOURCE = "resource"
    ENTANGLEMENT = "entanglement"
    NEGATIVITY_G = "negativity_g"
    USUAL = "usual"
    COMBINED_SUM = "combined_sum"
    COMBINED_PAIRS = "combined_pairs"


@dataclass(frozen=True)
class MonogamyReport:
    inequality_id: str
    lhs: float
    rhs: float
    slack: float
    violated: bool
    seed: int | None
    state_fingerprint: str
    tol: float
    evaluator: str = "closed-form"
    approximate: bool = False
    #: False when the instance lies outside the range where the inequality is proven
    in_domain: bool = True

    @classmethod
    def build(cls, inequality_id, lhs: float, rhs: float, rho, tol: float, seed=None,
              evaluator: str = "closed-form", approximate: bool = False,
              in_domain: bool = True) -> "MonogamyReport":
        slack = float(rhs) - float(lhs)
        fp = rho.fingerprint() if isinstance(rho, DensityMatrix) else DensityMatrix(
            _as_array(rho), validate=False).fingerprint()
        return cls(InequalityId(inequality_id).value, float(lhs), float(rhs), slack,
                   bool(slack < -tol), None if seed is None else int(seed), fp, float(tol),
                   evaluator, approximate, in_domain)

    def to_dict(self) -> dict:
        return asdict(self)


def _is_pure(m: np.ndarray) -> bool:
    return float(np.real(np.vdot(m, m))) >= 1 - PURITY_TOL


def _dims_of(rho, dims: Sequence[int] | None, n: int | None = None) -> tuple[int, ...]:
    if dims is None:
        if isinstance(rho, DensityMatrix) and len(rho.factors) > 1:
            dims = rho.factors
        else:
            raise DimensionMismatch("subsystem dimensions are required")
    dims = tuple(int(d) for d in dims)
    if int(np.prod(dims)) != _as_array(rho).shape[0]:
        raise DimensionMismatch(f"dims {dims} do not match a state of size {_as_array(rho).shape[0]}")
    if n is not None and len(dims) != n:
        raise DimensionMismatch(f"expected {n} subsystems, got {len(dims)}")
    return dims


# ---------------------------------------------------------------------------
# R_d(rho_A) + E(rho) <= R_sup


def default_entanglement(measure: MeasureDescriptor, split: BipartiteSplit,
                         roof_cfg: ConvexRoofConfig | None = None) -> Callable:
    """E paired with ``measure``: reduced-state entropy for pure states, convex roof otherwise.

    Returns ``f(rho) -> (value, evaluator_name)``.
    """
    def ent(rho):
        m = _as_array(rho)
        if _is_pure(m):
            spec = hermitian_spectrum(partial_trace(m, split, "A"))
            return measure.entanglement_entropy(spec), "pure-reduction"
        value, _ = estimate_convex_roof(m, split, measure.entanglement_entropy, cfg=roof_cfg)
        return value, "convexroof"

    return ent


def check_resource_monogamy(rho_AB, split: BipartiteSplit, measure: MeasureDescriptor,
                            ent: Callable | None = None, tol: float | None = None,
                            seed: int | None = None) -> MonogamyReport:
    """``R_d(tr_B rho) + w E(rho) <= R_sup`` with ``w`` the measure's entanglement weight.

    ``ent`` maps the global state to ``E`` or to ``(E, evaluator_name)``; it
    defaults to :func:`default_entanglement`.
    """
    m = _as_array(rho_AB)
    split.check(m.shape[0])
    if measure.dim != split.d_a:
        raise DimensionMismatch(f"{measure.label()} acts on dimension {measure.dim}, A has {split.d_a}")
    out = (ent or default_entanglement(measure, split))(m)
    value, evaluator = out if isinstance(out, tuple) else (out, "custom")
    approximate = evaluator == "convexroof"
    if tol is None:
        tol = ROOF_TOL if approximate else CLOSED_FORM_TOL
    r = measure.evaluate(partial_trace(m, split, "A"))
    lhs = r + measure.entanglement_weight * value
    return MonogamyReport.build(InequalityId.RESOURCE, lhs, measure.sup_value(), rho_AB, tol, seed,
                                evaluator, approximate)


# ---------------------------------------------------------------------------
# negativity forms on a two-qubit A


def _two_qubit_A(rho, dims) -> tuple[np.ndarray, tuple[int, int, int]]:
    dims = _dims_of(rho, dims, 3)
    if dims[0] != 2 or dims[1] != 2:
        raise DimensionMismatch("the negativity instantiation needs A1 and A2 to be qubits")
    return _as_array(rho), dims


def check_entanglement_monogamy(rho, dims: Sequence[int] | None = None, tol: float | None = None,
                                seed: int | None = None,
                                roof_cfg: ConvexRoofConfig | None = None) -> MonogamyReport:
    """``E_N(A1:A2) + E(A1A2:B) <= 1/2`` with ``E`` built from ``S = 1/2 - G``.

    Mixed global states take ``E`` from the convex-roof estimator.
    """
    m, dims = _two_qubit_A(rho, dims)
    rho_a = reduce_subsystems(m, dims, (0, 1))
    e_tilde = negativity(rho_a, BipartiteSplit(2, 2))
    if _is_pure(m):
        e_ab = negativity_entropy(hermitian_spectrum(rho_a).probs)
        evaluator, approximate = "pure-reduction", False
    else:
        e_ab, _ = estimate_convex_roof(m, BipartiteSplit(4, dims[2]), negativity_entropy, cfg=roof_cfg)
        evaluator, approximate = "convexroof", True
    if tol is None:
        tol = ROOF_TOL if approximate else CLOSED_FORM_TOL
    return MonogamyReport.build(InequalityId.ENTANGLEMENT, e_tilde + e_ab, NEG_MAX_TWO_QUBIT, rho, tol,
                                seed, evaluator, approximate)


def check_negativity_g(rho, dims: Sequence[int] | None = None, g: str = "analytic",
                       tol: float = CLOSED_FORM_TOL, seed: int | None = None) -> MonogamyReport:
    """``E_N(A1:A2) + g(E_N(A1A2:B)) <= 1/2`` with ``d* = min(4, d_B)``.

    ``g="analytic"`` uses the closed forms, ``g="numeric"`` the numerically
    built convex envelope.
    """
    m, dims = _two_qubit_A(rho, dims)
    d_star = min(4, dims[2])
    if d_star not in (2, 3, 4):
        raise UnsupportedDStar(f"d* = {d_star} not in (2, 3, 4)")
    if g not in {"analytic", "numeric"}:
        raise ValueError(f"g must be 'analytic' or 'numeric', got {g!r}")
    rho_a = reduce_subsystems(m, dims, (0, 1))
    e1 = negativity(rho_a, BipartiteSplit(2, 2))
    if _is_pure(m):
        e_ab = pure_negativity_from_schmidt(hermitian_spectrum(rho_a).probs)
    else:
        e_ab = negativity(m, BipartiteSplit(4, dims[2]))
    e_ab = min(e_ab, (d_star - 1) / 2)
    g_fn = g_analytic if g == "analytic" else g_numeric
    lhs = e1 + g_fn(d_star, e_ab)
    return MonogamyReport.build(InequalityId.NEGATIVITY_G, lhs, NEG_MAX_TWO_QUBIT, rho, tol, seed,
                                f"g-{g}")


def _qubit_negativities(m: np.ndarray) -> tuple[float, float, float]:
    """E_N(A1:A2), E_N(A1:A3), E_N(A1:A2A3) of a three-qubit state."""
    dims = (2, 2, 2)
    q = BipartiteSplit(2, 2)
    n12 = negativity(reduce_subsystems(m, dims, (0, 1)), q)
    n13 = negativity(reduce_subsystems(m, dims, (0, 2)), q)
    n1_23 = negativity(m, BipartiteSplit(2, 4))
    return n12, n13, n1_23


def check_usual_monogamy(rho, tol: float = CLOSED_FORM_TOL, seed: int | None = None) -> MonogamyReport:
    """``E_N^2(A1:A2) + E_N^2(A1:A3) <= E_N^2(A1:A2A3)`` on a pure three-qubit state.

    Mixed inputs are evaluated but reported out of domain.
    """
    m = _as_array(rho)
    if m.shape != (8, 8):
        raise DimensionMismatch("needs a three-qubit (8x8) state")
    n12, n13, n1_23 = _qubit_negativities(m)
    return MonogamyReport.build(InequalityId.USUAL, n12**2 + n13**2, n1_23**2, rho, tol, seed,
                                in_domain=_is_pure(m))


def _split_negativity_G(spec: Spectrum, cfg: OrbitConfig | None) -> tuple[float, str]:
    """Orbit maximum of the 2x4 negativity for an 8-level spectrum."""
    p = spec.probs
    if np.count_nonzero(p > 1e-12) <= 2:
        # two locally orthogonal maximally entangled blocks reach the maximum 1/2
        return 0.5, "closed-form"
    measure = MeasureDescriptor.negativity_split(BipartiteSplit(2, 4))
    return g_orbit_sup(measure, p, cfg, method="search"), "orbit-search"


def check_combined_n_party(rho, dims: Sequence[int] | None = None, tol: float | None = None,
                           seed: int | None = None,
                           orbit_cfg: OrbitConfig | None = None) -> tuple[MonogamyReport, MonogamyReport]:
    """The two combined inequalities for three qubits A1 A2 A3 and an environment B.

    ``sum_k E_N(A1:Ak) + E(A:B) <= 1/2`` and
    ``(2/3) sum_{k<l} E_N(Ak:Al) + E(A:B) <= 1/2``, where ``E(A:B)`` is the
    pure-state monotone from the 2x4 negativity entropy of ``rho_A``. Both rely
    on the unsquared negativity being monogamous, which is not established, so
    the reports are marked out of domain.
    """
    dims = _dims_of(rho, dims)
    if len(dims) != 4 or any(d != 2 for d in dims[:3]):
        raise Unsupported("only three qubits A1 A2 A3 plus one environment are supported")
    m = _as_array(rho)
    if not _is_pure(m):
        raise NotPure("the combined inequalities are evaluated for pure global states")
    rho_a = reduce_subsystems(m, dims, (0, 1, 2))
    G, evaluator = _split_negativity_G(hermitian_spectrum(rho_a), orbit_cfg)
    e_ab = max(NEG_MAX_TWO_QUBIT - G, 0.0)
    approximate = evaluator == "orbit-search"
    if tol is None:
        tol = ROOF_TOL if approximate else CLOSED_FORM_TOL
    q = BipartiteSplit(2, 2)
    pair = {kl: negativity(reduce_subsystems(rho_a, (2, 2, 2), kl), q)
            for kl in ((0, 1), (0, 2), (1, 2))}
    first = pair[(0, 1)] + pair[(0, 2)] + e_ab
    second = (2 / 3) * sum(pair.values()) + e_ab
    return tuple(
        MonogamyReport.build(ident, lhs, NEG_MAX_TWO_QUBIT, rho, tol, seed, evaluator, approximate,
                             in_domain=False)
        for ident, lhs in ((InequalityId.COMBINED_SUM, first), (InequalityId.COMBINED_PAIRS, second)))


# ---------------------------------------------------------------------------
# three-qubit comparison


def _uem(e2):
    return np.sqrt(2) * e2 / 2


def _mei(e2):
    return (np.sqrt(np.clip(1 - 2 * e2**2, 0, None)) + np.sqrt(np.clip(0.25 - e2**2, 0, None)) - 0.5) / 2


def three_qubit_bounds(E2: float) -> tuple[float, float]:
    """Upper bounds on E_N(A1:A2) from the squared-negativity and the entropy inequality."""
    if not 0.0 <= E2 <= 0.5:
        raise OutOfRange(f"E2={E2!r} outside [0, 1/2]")
    return float(_uem(E2)), float(_mei(E2))


def find_crossover(lo: float = 0.3, hi: float = 0.5, xtol: float = 1e-9) -> float:
    """E2 at which both three-qubit bounds coincide."""
    return float(bisect(lambda e: _uem(e) - _mei(e), lo, hi, xtol=xtol))


@dataclass(frozen=True)
class SymmetricRow:
    coeffs: tuple[complex, ...]
    E1: float
    E2: float
    uem_bound: float
    mei_bound: float
    tighter: str
    ok: bool


def symmetric_grid(n: int) -> list[np.ndarray]:
    """Real nonnegative amplitudes on (|000>, W, W-bar, |111>) from an ``n``-point angle grid."""
    t = np.linspace(0, np.pi / 2, n)
    out = []
    for a in t:
        for b in t:
            for c in t:
                v = np.array([np.cos(a), np.sin(a) * np.cos(b), np.sin(a) * np.sin(b) * np.cos(c),
                              np.sin(a) * np.sin(b) * np.sin(c)])
                out.append(v)
    return out


def symmetric_family_scan(states: Iterable, tol: float = CLOSED_FORM_TOL) -> list[SymmetricRow]:
    """E1 = E_N(A1:A2), E2 = E_N(A1:A2A3) and both bounds for permutation-symmetric pure states.

    ``states`` holds amplitude 4-vectors or three-qubit density matrices.
    """
    rows = []
    for s in states:
        if isinstance(s, DensityMatrix):
            rho, coeffs = s, ()
        else:
            coeffs = tuple(complex(c) for c in np.asarray(s).ravel())
            rho = symmetric_three_qubit_pure(coeffs)
        n12, _, n1_23 = _qubit_negativities(rho.data)
        e2 = min(n1_23, 0.5)
        uem, mei = three_qubit_bounds(e2)
        rows.append(SymmetricRow(coeffs, n12, e2, uem, mei, "uem" if uem < mei else "mei",
                                 bool(n12 <= min(uem, mei) + tol)))
    return rows


# ---------------------------------------------------------------------------
# saturation


def pure_extension(spec, d_b: int | None = None, unitary: np.ndarray | None = None) -> np.ndarray:
    """State vector ``sum_i sqrt(p_i) U|i>|i>`` whose A-marginal has spectrum ``p``."""
    p = spec.probs if isinstance(spec, Spectrum) else np.asarray(spec, dtype=float)
    d = p.size
    d_b = d if d_b is None else d_b
    if d_b < np.count_nonzero(p > 0):
        raise DimensionMismatch("environment too small for this spectrum")
    psi = np.zeros((d, d_b), dtype=complex)
    k = min(d, d_b)
    psi[np.arange(k), np.arange(k)] = np.sqrt(p[:k])
    if unitary is not None:
        psi = unitary @ psi
    return psi.ravel()


@dataclass(frozen=True)
class SaturationResult:
    lhs: float
    rhs: float
    sampled_lhs: float
    unitary: np.ndarray


def saturate_resource(spec, measure: MeasureDescriptor, n_samples: int = 1000, rng=None,
                      polish: bool = True) -> SaturationResult:
    """Largest ``R_d(rho_A) + w E`` over local unitaries on A of a pure extension of ``spec``.

    Haar samples of ``U_A`` are scored first; the best one seeds a Powell
    refinement over Givens parameters. ``E`` is invariant under ``U_A``.
    """
    rng = np.random.default_rng(rng)
    p = spec.probs if isinstance(spec, Spectrum) else np.asarray(spec, dtype=float)
    d = measure.dim
    if p.size != d:
        raise DimensionMismatch(f"spectrum of length {p.size} for a dimension-{d} measure")
    ent = measure.entanglement_weight * measure.entanglement_entropy(p)
    f = _orbit_objective(measure, np.diag(p).astype(complex))
    best, best_u = -np.inf, np.eye(d, dtype=complex)
    for _ in range(n_samples):
        u = random_unitary(d, rng)
        v = f(u)
        if v > best:
            best, best_u = v, u
    sampled = best
    if polish:
        res = minimize(lambda x: -f(givens_unitary(x, d) @ best_u), np.zeros(d * d), method="Powell",
                       options={"xtol": 1e-8, "ftol": 1e-13})
        if -res.fun > best:
            best, best_u = -res.fun, givens_unitary(res.x, d) @ best_u
    return SaturationResult(float(best + ent), measure.sup_value(), float(sampled + ent), best_u)
