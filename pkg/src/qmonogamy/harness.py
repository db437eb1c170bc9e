"""Seeded Monte Carlo campaigns, the dephasing example and table output."""
from __future__ import annotations

import csv
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Sequence

import numpy as np

from .entropies import EntropyKind, binary_entropy
from .errors import BadConfig, BadOverlap, OutOfRange, UnknownInequality
from .measures import MeasureDescriptor, rel_ent_coherence, rotated_qubit_basis
from .monogamy import (
    MonogamyReport,
    check_combined_n_party,
    check_entanglement_monogamy,
    check_negativity_g,
    check_resource_monogamy,
    check_usual_monogamy,
)
from .qcore import BipartiteSplit, DensityMatrix, partial_trace, random_pure_vector, random_unitary

LN2 = float(np.log(2))

#: inequality id -> default subsystem dimensions
DEFAULT_DIMS = {
    "resource": (2, 2),
    "entanglement": (2, 2, 4),
    "negativity_g": (2, 2, 4),
    "usual": (2, 2, 2),
    "combined": (2, 2, 2, 2),
}


# ---------------------------------------------------------------------------
# dephasing example


@dataclass(frozen=True)
class DephasingParams:
    """``sqrt(p)|0>|e0> + sqrt(1-p)|1>|e1>`` with ``<e0|e1> = overlap``."""

    p: float
    overlap: complex = 0.0
    env_dim: int = 2
    theta: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise OutOfRange(f"p={self.p!r} outside [0, 1]")
        if abs(self.overlap) > 1.0 + 1e-12:
            raise BadOverlap(f"|overlap| = {abs(self.overlap)!r} exceeds 1")
        if self.env_dim < 2:
            raise BadConfig("env_dim must be at least 2")


def dephasing_state(params: DephasingParams) -> DensityMatrix:
    """Pure qubit-environment state; the long-time limit is ``overlap = 0``."""
    ov = complex(params.overlap)
    mag = min(abs(ov), 1.0)
    e0 = np.zeros(params.env_dim, dtype=complex)
    e0[0] = 1.0
    e1 = np.zeros(params.env_dim, dtype=complex)
    e1[0] = ov
    e1[1] = np.sqrt(1.0 - mag**2)
    psi = np.concatenate([np.sqrt(params.p) * e0, np.sqrt(1.0 - params.p) * e1])
    psi /= np.linalg.norm(psi)
    return DensityMatrix.from_vector(psi, (2, params.env_dim))


FIGURE1_THETAS = (0.0, np.pi / 8, np.pi / 6, np.pi / 4)


def figure1_data(p_grid: Sequence[float], theta_list: Sequence[float] = FIGURE1_THETAS,
                 bits: bool = True) -> list[tuple[float, float, float, float]]:
    """Rows ``(p, theta, coherence, log 2 - h(p))`` for the long-time dephased qubit.

    Coherence is taken in the basis ``{cos t|0> + sin t|1>, sin t|0> - cos t|1>}``.
    Values are in bits unless ``bits=False``.
    """
    scale = 1.0 / LN2 if bits else 1.0
    rows = []
    for p in p_grid:
        p = float(p)
        if not 0.0 <= p <= 1.0:
            raise OutOfRange(f"p={p!r} outside [0, 1]")
        rho_a = partial_trace(dephasing_state(DephasingParams(p)), keep="A")
        bound = (LN2 - binary_entropy(p)) * scale
        for theta in theta_list:
            c = rel_ent_coherence(rho_a, rotated_qubit_basis(theta)) * scale
            rows.append((p, float(theta), c, bound))
    return rows


def write_csv(path, header: Sequence[str], rows) -> None:
    """CSV with 12 significant digits for floats."""
    def fmt(v):
        return f"{v:.12g}" if isinstance(v, (float, np.floating)) else v

    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for r in rows:
            w.writerow([fmt(v) for v in r])


# ---------------------------------------------------------------------------
# campaigns


def parse_measure(spec: str, dim: int) -> tuple[str, MeasureDescriptor | None]:
    """``coherence`` (random basis per trial), ``nonuniformity[:vn|renyi:a|tsallis:q]``."""
    parts = spec.lower().split(":")
    if parts[0] == "coherence":
        return "coherence", None
    if parts[0] == "nonuniformity":
        if len(parts) == 1 or parts[1] in {"vn", "vonneumann"}:
            kind = EntropyKind.von_neumann()
        elif parts[1] in {"renyi", "tsallis"} and len(parts) == 3:
            kind = EntropyKind(parts[1], float(parts[2]))
        else:
            raise BadConfig(f"bad measure spec {spec!r}")
        return "nonuniformity", MeasureDescriptor.nonuniformity(dim, kind)
    raise BadConfig(f"unknown measure {spec!r}")


@dataclass
class CampaignConfig:
    inequality_id: str
    dims: tuple[int, ...] = ()
    trials: int = 1000
    master_seed: int = 0
    tol: float = 1e-9
    output_path: str | None = None
    emit_states_on_violation: bool = True
    #: resource inequality only
    measure: str = "coherence"
    workers: int = 1

    def __post_init__(self):
        if self.inequality_id not in DEFAULT_DIMS:
            raise UnknownInequality(
                f"unknown inequality {self.inequality_id!r}; choose from {sorted(DEFAULT_DIMS)}")
        self.dims = tuple(int(d) for d in (self.dims or DEFAULT_DIMS[self.inequality_id]))
        if self.trials < 1:
            raise BadConfig(f"trials must be >= 1, got {self.trials}")
        if not self.tol > 0:
            raise BadConfig(f"tol must be positive, got {self.tol}")
        if self.workers < 1:
            raise BadConfig("workers must be >= 1")

    @classmethod
    def from_dict(cls, d: dict) -> "CampaignConfig":
        known = {f.name for f in fields(cls)}
        extra = set(d) - known
        if extra:
            raise BadConfig(f"unknown config keys {sorted(extra)}")
        return cls(**d)


@dataclass
class CampaignSummary:
    inequality_id: str
    dims: tuple[int, ...]
    measure: str | None
    trials: int
    records: int
    violations: int
    out_of_domain_violations: int
    min_slack: float
    runtime_s: float
    output_path: str | None = None
    violating_trials: list[int] = field(default_factory=list)


def trial_seed(master_seed: int, index: int) -> int:
    """64-bit seed of trial ``index``; regenerates the trial's state on its own."""
    return int(np.random.SeedSequence([int(master_seed), int(index)]).generate_state(1, np.uint64)[0])


def trial_state(cfg: CampaignConfig, seed: int) -> tuple[np.ndarray, np.random.Generator]:
    rng = np.random.default_rng(seed)
    return random_pure_vector(int(np.prod(cfg.dims)), rng), rng


def evaluate_seed(cfg: CampaignConfig, seed: int) -> tuple[list[MonogamyReport], np.ndarray, str | None]:
    """Reports, state vector and measure label for the trial drawn from ``seed``."""
    psi, rng = trial_state(cfg, seed)
    rho = DensityMatrix.from_vector(psi, cfg.dims)
    ident = cfg.inequality_id
    label = None
    if ident == "resource":
        d_a, d_b = cfg.dims
        kind, measure = parse_measure(cfg.measure, d_a)
        if kind == "coherence":
            measure = MeasureDescriptor.coherence(random_unitary(d_a, rng))
        label = measure.label()
        reports = [check_resource_monogamy(rho, BipartiteSplit(d_a, d_b), measure, tol=cfg.tol, seed=seed)]
    elif ident == "entanglement":
        reports = [check_entanglement_monogamy(rho, tol=cfg.tol, seed=seed)]
    elif ident == "negativity_g":
        reports = [check_negativity_g(rho, tol=cfg.tol, seed=seed)]
    elif ident == "usual":
        reports = [check_usual_monogamy(rho, tol=cfg.tol, seed=seed)]
    else:
        reports = list(check_combined_n_party(rho, tol=cfg.tol, seed=seed))
    return reports, psi, label


def _run_trial(cfg: CampaignConfig, index: int) -> list[dict]:
    reports, psi, label = evaluate_seed(cfg, trial_seed(cfg.master_seed, index))
    out = []
    for r in reports:
        rec = {"trial": index, "dims": list(cfg.dims), "measure": label, **r.to_dict()}
        if r.violated and cfg.emit_states_on_violation:
            rec["state_re"] = psi.real.tolist()
            rec["state_im"] = psi.imag.tolist()
        out.append(rec)
    return out


def run_campaign(cfg: CampaignConfig) -> CampaignSummary:
    """Run ``cfg.trials`` independent trials; records are written in trial order as JSON lines.

    Trial ``i`` draws everything from ``trial_seed(master_seed, i)``, so the
    output bytes do not depend on ``cfg.workers``.
    """
    start = time.perf_counter()
    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as pool:
            per_trial = pool.map(lambda i: _run_trial(cfg, i), range(cfg.trials))
            batches = list(per_trial)
    else:
        batches = [_run_trial(cfg, i) for i in range(cfg.trials)]

    records = [rec for batch in batches for rec in batch]
    if cfg.output_path:
        path = Path(cfg.output_path)
        if path.parent != Path(""):
            path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w") as fh:
            for rec in records:
                fh.write(json.dumps(rec, sort_keys=True) + "\n")

    bad = [r for r in records if r["violated"]]
    return CampaignSummary(
        inequality_id=cfg.inequality_id,
        dims=cfg.dims,
        measure=cfg.measure if cfg.inequality_id == "resource" else None,
        trials=cfg.trials,
        records=len(records),
        violations=sum(1 for r in bad if r["in_domain"]),
        out_of_domain_violations=sum(1 for r in bad if not r["in_domain"]),
        min_slack=min(r["slack"] for r in records),
        runtime_s=time.perf_counter() - start,
        output_path=cfg.output_path,
        violating_trials=sorted({r["trial"] for r in bad}),
    )


def replay_trial(cfg: CampaignConfig, record: dict) -> MonogamyReport:
    """Recompute one campaign record from its stored seed."""
    reports, _, _ = evaluate_seed(cfg, record["seed"])
    return next(r for r in reports if r.inequality_id == record["inequality_id"])


def summary_dict(s: CampaignSummary) -> dict:
    d = asdict(s)
    d["dims"] = list(s.dims)
    return d
