"""Command-line entry point.

Exit codes: 0 when the run finished without violations, 2 when violations were
found, 1 on any error.
"""
from __future__ import annotations

import argparse
import json
import re
import sys

import numpy as np

from .errors import QMonogamyError

EXIT_OK, EXIT_ERROR, EXIT_VIOLATIONS = 0, 1, 2


def parse_dims(text: str) -> tuple[int, ...]:
    try:
        dims = tuple(int(t) for t in re.split(r"[x,]", text.lower()) if t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad dims {text!r}; use e.g. 2x2x4") from None
    if not dims or any(d < 1 for d in dims):
        raise argparse.ArgumentTypeError(f"bad dims {text!r}")
    return dims


_ANGLE = re.compile(r"^\s*([-+]?\d*\.?\d*)\s*\*?\s*pi\s*(?:/\s*(\d*\.?\d+))?\s*$")


def parse_angle(text: str) -> float:
    """A float or a multiple of pi such as ``pi/8``, ``3pi/4``, ``-2*pi``."""
    m = _ANGLE.match(text.lower())
    if m:
        coef = m.group(1)
        coef = -1.0 if coef == "-" else 1.0 if coef in ("", "+") else float(coef)
        den = float(m.group(2)) if m.group(2) else 1.0
        return coef * np.pi / den
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad angle {text!r}") from None


def parse_thetas(text: str) -> list[float]:
    return [parse_angle(t) for t in text.split(",") if t.strip()]


def parse_grid(text: str) -> np.ndarray:
    """``start:stop:step`` (stop included) or a comma list."""
    if ":" in text:
        start, stop, step = (float(t) for t in text.split(":"))
        if step <= 0:
            raise argparse.ArgumentTypeError("grid step must be positive")
        n = int(round((stop - start) / step)) + 1
        return np.round(start + step * np.arange(n), 12)
    return np.array([float(t) for t in text.split(",")])


def _emit_rows(header, rows, out):
    from .harness import write_csv

    if out:
        write_csv(out, header, rows)
        print(f"wrote {len(rows)} rows to {out}")
    else:
        print(",".join(header))
        for r in rows:
            print(",".join(f"{v:.12g}" if isinstance(v, float) else str(v) for v in r))


def cmd_verify(args) -> int:
    from .harness import CampaignConfig, run_campaign, summary_dict

    base = {}
    if args.config:
        with open(args.config) as fh:
            base = json.load(fh)
    overrides = {
        "inequality_id": args.inequality_id,
        "dims": args.dims,
        "trials": args.trials,
        "master_seed": args.seed,
        "tol": args.tol,
        "output_path": args.out,
        "measure": args.measure,
        "workers": args.workers,
    }
    base.update({k: v for k, v in overrides.items() if v is not None})
    if "inequality_id" not in base:
        raise QMonogamyError("an inequality id is required, on the command line or in --config")
    summary = run_campaign(CampaignConfig.from_dict(base))
    print(json.dumps(summary_dict(summary), indent=2))
    return EXIT_VIOLATIONS if summary.violations or summary.out_of_domain_violations else EXIT_OK


def cmd_figure1(args) -> int:
    from .harness import figure1_data

    unit = "nats" if args.nats else "bits"
    rows = figure1_data(args.pgrid, args.thetas, bits=not args.nats)
    _emit_rows(["p", "theta", f"coherence_{unit}", f"bound_{unit}"], rows, args.out)
    return EXIT_OK


def cmd_gbound(args) -> int:
    from .gbound import g_analytic, g_domain, negativity_envelope

    env = negativity_envelope(args.dstar, n_grid=args.hgrid, sweep=args.sweep, seed=args.seed)
    lo, hi = g_domain(args.dstar)
    xs = np.linspace(lo, hi, args.grid)
    ys = 2 * xs + 1
    rows = list(zip(xs.tolist(), ys.tolist(), np.atleast_1d(env.raw(ys)).tolist(),
                    np.atleast_1d(env(ys)).tolist(), np.atleast_1d(env(ys)).tolist(),
                    np.atleast_1d(g_analytic(args.dstar, xs)).tolist()))
    _emit_rows(["x", "y", "h", "co_h", "g_numeric", "g_analytic"], rows, args.out)
    y0, slope = env.final_chord()
    print(f"# final hull chord: y0={y0:.6g} slope={slope:.6g}", file=sys.stderr)
    return EXIT_OK


def cmd_crossover(args) -> int:
    from .monogamy import find_crossover, three_qubit_bounds

    x = find_crossover()
    uem, mei = three_qubit_bounds(x)
    print(f"crossover E2={x:.10f} bound={uem:.10f} (check {mei:.10f})")
    return EXIT_OK


def cmd_convexroof(args) -> int:
    from .convexroof import ConvexRoofConfig, estimate_convex_roof
    from .measures import eof_wootters
    from .qcore import BipartiteSplit, random_density_matrix

    if len(args.dims) != 2:
        raise QMonogamyError("convexroof needs a bipartite --dims such as 2x2")
    split = BipartiteSplit(*args.dims)
    rng = np.random.default_rng(args.seed)
    cfg = ConvexRoofConfig(restarts=args.restarts, seed=args.seed)
    two_qubit = args.dims == (2, 2)
    header = ["trial", "rank", "estimate"] + (["wootters", "abs_error"] if two_qubit else [])
    rows, worst = [], 0.0
    for i in range(args.trials):
        rank = int(rng.integers(1, split.dim + 1)) if args.rank is None else args.rank
        rho = random_density_matrix(split.dim, rank, rng, args.dims)
        value, _ = estimate_convex_roof(rho, split, K=args.K, cfg=cfg)
        row = [i, rank, value]
        if two_qubit:
            exact = eof_wootters(rho)
            worst = max(worst, abs(value - exact))
            row += [exact, abs(value - exact)]
        rows.append(row)
    _emit_rows(header, rows, args.out)
    if two_qubit:
        print(f"# max abs error vs Wootters: {worst:.3e}", file=sys.stderr)
    return EXIT_OK


def cmd_scan_symmetric(args) -> int:
    from .monogamy import symmetric_family_scan, symmetric_grid

    table = symmetric_family_scan(symmetric_grid(args.grid))
    rows = [(r.E1, r.E2, r.uem_bound, r.mei_bound, r.tighter, int(r.ok)) for r in table]
    _emit_rows(["E1", "E2", "uem_bound", "mei_bound", "tighter", "ok"], rows, args.out)
    return EXIT_OK if all(r.ok for r in table) else EXIT_VIOLATIONS


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qmonogamy", description="Monogamy-of-resources checks.")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run a seeded Monte Carlo campaign")
    v.add_argument("inequality_id", nargs="?",
                   help="resource, entanglement, negativity_g, usual or combined")
    v.add_argument("--dims", type=parse_dims)
    v.add_argument("--trials", type=int)
    v.add_argument("--seed", type=int)
    v.add_argument("--tol", type=float)
    v.add_argument("--out")
    v.add_argument("--measure", help="coherence | nonuniformity[:vn|:renyi:A|:tsallis:Q]")
    v.add_argument("--workers", type=int)
    v.add_argument("--config", help="JSON file with CampaignConfig fields; flags override it")
    v.set_defaults(func=cmd_verify)

    f = sub.add_parser("figure1", help="coherence of the dephased qubit against the bound")
    f.add_argument("--pgrid", type=parse_grid, default=parse_grid("0:1:0.01"))
    f.add_argument("--thetas", type=parse_thetas, default=parse_thetas("0,pi/8,pi/6,pi/4"))
    f.add_argument("--nats", action="store_true", help="report nats instead of bits")
    f.add_argument("--out")
    f.set_defaults(func=cmd_figure1)

    g = sub.add_parser("gbound", help="h, its convex envelope and g for a two-qubit A")
    g.add_argument("--dstar", type=int, choices=(2, 3, 4), required=True)
    g.add_argument("--grid", type=int, default=200)
    g.add_argument("--hgrid", type=int, default=2001, help="grid points for h on [1, d*]")
    g.add_argument("--sweep", type=int, default=10_000)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gbound)

    c = sub.add_parser("crossover", help="E2 where the three-qubit bounds meet")
    c.set_defaults(func=cmd_crossover)

    r = sub.add_parser("convexroof", help="convex-roof estimates on random mixed states")
    r.add_argument("--dims", type=parse_dims, default=(2, 2))
    r.add_argument("--trials", type=int, default=10)
    r.add_argument("--rank", type=int)
    r.add_argument("--K", type=int, default=8)
    r.add_argument("--restarts", type=int, default=16)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--out")
    r.set_defaults(func=cmd_convexroof)

    s = sub.add_parser("scan-symmetric", help="E1/E2 bounds over symmetric three-qubit states")
    s.add_argument("--grid", type=int, default=9)
    s.add_argument("--out")
    s.set_defaults(func=cmd_scan_symmetric)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on usage errors, which would read as "violations"
        return EXIT_ERROR if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (QMonogamyError, OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
