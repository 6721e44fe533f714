"""Command-line entry point.

Every failure ends with a single line ``error: <kind>: <exception type>: <message>`` on stderr
and a nonzero exit code.
"""
from __future__ import annotations

import argparse
import logging
import math
import sys
from pathlib import Path

from .config import OutputOptions, load_config
from .experiments import ConfigError, ExperimentConfig, RunAborted, front_metrics, run_simulation
from .model import DegenerateStateError
from .storage import FormatError, load_snapshots, save_run, write_table
from .studies import compare_states, eoc_study, sweep_tau

EXIT_CONFIG = 2
EXIT_RUN = 3
EXIT_IO = 4

FAILURES = (
    (ConfigError, "config", EXIT_CONFIG),
    (FormatError, "format", EXIT_IO),
    (OSError, "io", EXIT_IO),
    ((RunAborted, DegenerateStateError, FloatingPointError), "run", EXIT_RUN),
    (ValueError, "config", EXIT_CONFIG),
)


def parse_tau_range(text: str) -> list[float]:
    """``start:stop:step`` (stop exclusive) or a comma separated list."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"tau range must be start:stop:step, got {text!r}")
        start, stop, stride = (float(p) for p in parts)
        if stride <= 0:
            raise ConfigError("tau step must be positive")
        n = math.ceil((stop - start) / stride - 1e-12)
        return [start + i * stride for i in range(max(n, 0))]
    return [float(p) for p in text.split(",") if p.strip()]


def parse_levels(text: str) -> list[int]:
    try:
        return [int(p) for p in text.split(",") if p.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad grid levels {text!r}") from exc


def _load(args) -> tuple[ExperimentConfig, OutputOptions, tuple[float, ...]]:
    if args.config:
        return load_config(args.config)
    return ExperimentConfig.preset("exp1"), OutputOptions(), ()


def _out_dir(args, cfg: ExperimentConfig) -> Path:
    out = args.out or cfg.output_dir
    if not out:
        raise ConfigError("no output directory given (use --out or [output] dir)")
    return Path(out)


def cmd_simulate(args) -> int:
    cfg, output, _ = _load(args)
    params = cfg.params
    if args.tau is not None:
        params = params.replace(tau=args.tau)
    if args.chi is not None:
        params = params.replace(chi=args.chi)
    changes = {"params": params}
    if args.grid is not None:
        changes["n"] = args.grid
    if args.t_final is not None:
        changes["t_final"] = args.t_final
        changes["snapshot_times"] = tuple(t for t in cfg.snapshot_times if t <= args.t_final)
    cfg = cfg.with_(**changes)
    out = _out_dir(args, cfg)
    result = run_simulation(cfg, progress=args.verbose)
    save_run(result, out, csv_too=output.csv)
    m = front_metrics(result.final, result.grid, output.front_threshold)
    print(f"steps={result.report.steps} rejected={result.report.rejected} "
          f"front_position={m.front_position:.6g} front_height={m.front_height:.6g} "
          f"mass_c1={m.mass_c1:.10g} mass_c2={m.mass_c2:.10g} out={out}")
    return 0


def cmd_eoc(args) -> int:
    cfg, _, _ = _load(args)
    out = _out_dir(args, cfg)
    study = eoc_study(cfg, parse_levels(args.levels))
    out.mkdir(parents=True, exist_ok=True)
    rows = [(r.component, r.n_coarse, r.n_fine, r.l1, r.eoc_l1, r.l2, r.eoc_l2)
            for r in study.rows]
    write_table(out / "eoc.csv", ["component", "n_coarse", "n_fine", "l1", "eoc_l1", "l2",
                                  "eoc_l2"], rows)
    write_table(out / "cost.csv", ["n", "n_cells", "steps", "wall_time"],
                [(r.grid.nx, r.grid.n_cells, r.report.steps, r.report.wall_time)
                 for r in study.runs])
    for row in rows:
        print(",".join(str(v) for v in row))
    return 0


def cmd_sweep(args) -> int:
    cfg, output, taus = _load(args)
    if args.tau:
        taus = tuple(parse_tau_range(args.tau))
    out = _out_dir(args, cfg)
    rows = sweep_tau(cfg, taus, output.front_threshold)
    out.mkdir(parents=True, exist_ok=True)
    table = []
    for r in rows:
        m = r.metrics
        vals = (m.front_position, m.front_height, m.mass_c1, m.mass_c2) if m else ("",) * 4
        table.append((r.tau, "ok" if r.ok else "failed", *vals, r.steps, r.error))
    write_table(out / "sweep.csv", ["tau", "status", "front_position", "front_height",
                                    "mass_c1", "mass_c2", "steps", "error"], table)
    for row in table:
        print(",".join(str(v) for v in row))
    return 0 if all(r.ok for r in rows) else EXIT_RUN


def cmd_compare(args) -> int:
    grid_a, states_a = load_snapshots(args.run_a)
    grid_b, states_b = load_snapshots(args.run_b)
    if grid_a != grid_b:
        raise ConfigError(f"grids differ: {grid_a.nx}x{grid_a.ny} on [{grid_a.a},{grid_a.b}] vs "
                          f"{grid_b.nx}x{grid_b.ny} on [{grid_b.a},{grid_b.b}]")
    times = sorted(set(states_a) & set(states_b))
    if not times:
        raise ConfigError("runs share no snapshot time")
    print("t,component,linf,l1,rel_linf")
    for t in times:
        for d in compare_states(states_a[t].data, states_b[t].data, grid_a):
            print(f"{t!r},{d.component},{d.linf!r},{d.l1!r},{d.rel_linf!r}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="invasim", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="run one simulation")
    s.add_argument("--config")
    s.add_argument("--tau", type=float)
    s.add_argument("--chi", type=float)
    s.add_argument("--grid", type=int)
    s.add_argument("--t-final", type=float)
    s.add_argument("--out")
    s.set_defaults(func=cmd_simulate)

    e = sub.add_parser("eoc", help="grid convergence study")
    e.add_argument("--config")
    e.add_argument("--levels", default="25,50,100,200")
    e.add_argument("--out")
    e.set_defaults(func=cmd_eoc)

    w = sub.add_parser("sweep", help="front metrics across delays")
    w.add_argument("--config")
    w.add_argument("--tau", help="start:stop:step or comma list")
    w.add_argument("--out")
    w.set_defaults(func=cmd_sweep)

    c = sub.add_parser("compare", help="difference norms of two run directories")
    c.add_argument("run_a")
    c.add_argument("run_b")
    c.set_defaults(func=cmd_compare)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except Exception as exc:  # noqa: BLE001 - mapped to an exit code below
        for kinds, name, code in FAILURES:
            if isinstance(exc, kinds):
                message = str(exc).replace("\n", " ")
                print(f"error: {name}: {type(exc).__name__}: {message}", file=sys.stderr)
                return code
        raise


if __name__ == "__main__":
    sys.exit(main())
