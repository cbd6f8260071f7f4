"""Command-line front end.

Subcommands write CSV or JSON files together with a JSON manifest
(``<out>.manifest.json``) recording the command line, the resolved
configuration and the output paths. ``mimocov replay MANIFEST`` re-runs a
recorded command.

Exit codes: 0 success, 2 usage, 3 numerical failure, 4 invalid campaign.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import sys
from datetime import datetime, timezone

import numpy as np

from . import __version__, analytic
from .errors import InvalidParameterError, NumericalFailureError, OutOfDomainError
from .monte_carlo import reproduce_table1, run_convergence_study, run_coverage
from .network_sim import MODES, SimConfig

CSV_SCHEMA = {
    "coverage": "coverage/1",
    "simulate": "simulate/1",
    "convergence": "convergence/1",
    "rate": "rate/1",
}

EXIT_USAGE = 2
EXIT_NUMERICAL = 3
EXIT_INVALID_CAMPAIGN = 4


class UsageError(Exception):
    pass


def _fmt(x):
    if x is None or (isinstance(x, float) and np.isnan(x)):
        return ""
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def _write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def _db_grid(args):
    if args.points < 1:
        raise UsageError("--points must be at least 1")
    if args.points == 1:
        return np.array([float(args.t_min_db)])
    if args.t_max_db <= args.t_min_db:
        raise UsageError("--t-max-db must exceed --t-min-db")
    return np.linspace(args.t_min_db, args.t_max_db, args.points)


_CONFIG_TYPES = {f.name: f.type for f in dataclasses.fields(SimConfig)}


def read_config_file(path):
    """Parse ``key = value`` lines (``#`` comments allowed) into SimConfig kwargs."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            key, value = (s.strip() for s in line.split("=", 1))
            if key not in _CONFIG_TYPES:
                raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
            typ = _CONFIG_TYPES[key]
            if key == "mode":
                out[key] = value
            elif key == "window_radius" and value.lower() in ("", "none"):
                out[key] = None
            elif typ in ("int", int) or key in ("M", "K", "L", "n_samples", "seed"):
                out[key] = int(value)
            else:
                out[key] = float(value)
    return out


def _sim_config(args, overrides):
    base = read_config_file(args.config) if getattr(args, "config", None) else {}
    for key, value in overrides.items():
        if value is not None:
            base[key] = value
    try:
        return SimConfig(**base)
    except (InvalidParameterError, TypeError) as exc:
        raise UsageError(str(exc)) from exc


def _manifest(args, argv, cfg, outputs, started, extra=None):
    entry = {
        "tool": "mimocov",
        "version": __version__,
        "command": args.command,
        "argv": list(argv),
        "config": dataclasses.asdict(cfg) if cfg is not None else None,
        "seed": cfg.seed if cfg is not None else None,
        "schema": CSV_SCHEMA[args.command],
        "started": started,
        "finished": datetime.now(timezone.utc).isoformat(),
        "outputs": list(outputs),
    }
    if extra:
        entry.update(extra)
    path = f"{outputs[0]}.manifest.json"
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(entry, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def cmd_coverage(args):
    db = _db_grid(args)
    rows = []
    for t_db in db:
        t = 10.0 ** (t_db / 10.0)
        if args.method == "closed":
            p = analytic.coverage_dl_closed(t, args.alpha) if t >= 1 else None
        elif args.method == "integral":
            p = analytic.coverage_dl(t, args.alpha, args.tol)
        else:
            p = analytic.coverage_baseline(t, args.alpha)
        rows.append((float(t_db), t, p, args.method))
    _write_csv(args.out, ["threshold_db", "threshold_linear", "coverage", "method"], rows)
    return None, [args.out], {}


def cmd_simulate(args):
    cfg = _sim_config(args, {
        "mode": args.mode, "alpha": args.alpha, "M": args.m_antennas, "K": args.k_pilots,
        "n_samples": args.samples, "seed": args.seed, "window_radius": args.window_radius,
        "lambda_b": args.lambda_b, "delta": args.delta,
    })
    db = _db_grid(args)
    campaign = run_coverage(cfg, 10.0 ** (db / 10.0), workers=args.workers)
    curve = campaign.results
    rows = [(float(d), p, lo, hi, cfg.mode, cfg.n_samples)
            for d, p, lo, hi in zip(db, curve.probabilities, campaign.ci_low, campaign.ci_high)]
    _write_csv(args.out, ["threshold_db", "coverage", "ci_low", "ci_high", "mode", "samples"], rows)
    extra = {"rejected_count": campaign.rejected_count, "valid": campaign.valid}
    return campaign.cfg, [args.out], extra, campaign


def cmd_rate(args):
    if args.l_block < 2:
        raise UsageError("--l-block must be at least 2")
    cfg = SimConfig(alpha=args.alpha, L=args.l_block)
    t = reproduce_table1(cfg, args.tol)
    report = {
        "alpha": args.alpha,
        "l_block": args.l_block,
        "rate_per_user_bps_hz": t.rate_per_user,
        "baseline_rate_bps_hz": t.baseline_rate,
        "k_opt": t.k_opt,
        "sum_rate_per_cell_bps_hz": t.sum_rate_per_cell,
        "rate_per_user_nats": t.rate_per_user_nats,
        "baseline_rate_nats": t.baseline_rate_nats,
        "sum_rate_per_cell_nats": t.sum_rate_per_cell_nats,
        "units": "bps/Hz = nats / ln 2",
        "tolerances": {"quadrature_abs_tol": args.tol},
    }
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return cfg, [args.out], {}


def _int_list(text):
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a comma-separated integer list: {text!r}") from exc
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def cmd_convergence(args):
    cfg = _sim_config(args, {"alpha": args.alpha, "K": args.k_pilots, "seed": args.seed,
                             "mode": "finite_dl", "M": max(args.m_list)})
    try:
        rows = run_convergence_study(cfg, args.m_list, args.samples, args.draws, args.workers)
    except InvalidParameterError as exc:
        raise UsageError(str(exc)) from exc
    _write_csv(args.out, ["m_antennas", "median_rel_gap", "p90_rel_gap"],
               [(r.M, r.median_rel_gap, r.p90_rel_gap) for r in rows])
    return cfg.resolved(), [args.out], {"realizations": args.samples, "draws": args.draws}


def build_parser():
    p = argparse.ArgumentParser(prog="mimocov", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"mimocov {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def grid_flags(sp):
        sp.add_argument("--t-min-db", type=float, default=-10.0)
        sp.add_argument("--t-max-db", type=float, default=30.0)
        sp.add_argument("--points", type=int, default=20)

    c = sub.add_parser("coverage", help="analytic coverage curve")
    c.add_argument("--alpha", type=float, default=4.0)
    grid_flags(c)
    c.add_argument("--method", choices=("integral", "closed", "baseline"), default="integral")
    c.add_argument("--tol", type=float, default=1e-8)
    c.add_argument("--out", default="coverage.csv")
    c.set_defaults(func=cmd_coverage)

    s = sub.add_parser("simulate", help="Monte Carlo coverage curve")
    s.add_argument("--config", help="key=value file with SimConfig defaults")
    s.add_argument("--mode", choices=MODES)
    s.add_argument("--alpha", type=float)
    s.add_argument("--m-antennas", type=int)
    s.add_argument("--k-pilots", type=int)
    s.add_argument("--samples", type=int)
    s.add_argument("--seed", type=int)
    s.add_argument("--window-radius", type=float)
    s.add_argument("--lambda-b", type=float)
    s.add_argument("--delta", type=float)
    s.add_argument("--workers", type=int, default=1)
    grid_flags(s)
    s.add_argument("--out", default="simulate.csv")
    s.set_defaults(func=cmd_simulate)

    r = sub.add_parser("rate", help="per-user and cell sum rates")
    r.add_argument("--alpha", type=float, default=4.0)
    r.add_argument("--l-block", type=int, default=16)
    r.add_argument("--tol", type=float, default=1e-8)
    r.add_argument("--out", default="rate.json")
    r.set_defaults(func=cmd_rate)

    v = sub.add_parser("convergence", help="finite-M SIR convergence study")
    v.add_argument("--config")
    v.add_argument("--m-list", type=_int_list, default=[16, 64, 256, 1024])
    v.add_argument("--alpha", type=float)
    v.add_argument("--k-pilots", type=int)
    v.add_argument("--samples", type=int, default=1000, help="number of realizations")
    v.add_argument("--draws", type=int, default=100, help="fading draws per realization")
    v.add_argument("--seed", type=int)
    v.add_argument("--workers", type=int, default=1)
    v.add_argument("--out", default="convergence.csv")
    v.set_defaults(func=cmd_convergence)

    rp = sub.add_parser("replay", help="re-run the command recorded in a manifest")
    rp.add_argument("manifest")
    rp.set_defaults(func=None)
    return p


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "replay":
        with open(args.manifest, encoding="utf-8") as fh:
            recorded = json.load(fh)
        return main(recorded["argv"])

    started = datetime.now(timezone.utc).isoformat()
    try:
        result = args.func(args)
    except (UsageError, OutOfDomainError, InvalidParameterError) as exc:
        parser.error(str(exc))
    except NumericalFailureError as exc:
        print(f"mimocov: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    cfg, outputs, extra = result[:3]
    _manifest(args, argv, cfg, outputs, started, extra)
    if len(result) > 3 and not result[3].valid:
        c = result[3]
        print(f"mimocov: invalid campaign: {c.rejected_count} of {c.cfg.n_samples} "
              "samples rejected; enlarge --window-radius", file=sys.stderr)
        return EXIT_INVALID_CAMPAIGN
    return 0


if __name__ == "__main__":
    sys.exit(main())
