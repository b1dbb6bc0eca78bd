"""Command-line entry points.

    archsim run --config run.cfg --out results/
    archsim sweep --out sweep_results/ [--config sweep.cfg] [--parallelism 4]
    archsim analyze sweep_results/measurements.csv --out analysis/
    archsim render results/trace.csv --config results/effective_config.txt \
        --step 30 --format ascii

Every command returns 0 on success and 1 with a message on stderr
otherwise.  A run directory holds the trace, the per-step summary, the
single-row measurement CSV, and an effective-config sidecar that can be
fed back through --config to reproduce the run exactly.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

from . import analysis, config as configmod, render
from .engine import read_trace_csv, run, write_summary_csv, write_trace_csv
from .errors import ArchsimError
from .metrics import detect_arch_onset
from .sweep import (
    MeasurementRow,
    SweepConfig,
    run_sweep,
    write_errors_csv,
    write_measurements_csv,
)
from .world import build_world

TABLE_HEADER = [
    "c", "w", "W", "n_replicates", "n_detected", "arch_rate",
    "T_mean", "T_sd", "M_mean", "M_sd", "m_mean", "m_sd",
]
REGRESSION_HEADER = ["c", "slope", "intercept", "r_squared", "t_stat", "n"]
TRENDS_HEADER = ["trend", "pearson_r", "n_cells", "n_saturated_excluded"]


def _fail(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return 1


def _load_config(path):
    if path is None:
        return {}
    p = Path(path)
    if not p.exists():
        raise ArchsimError(f"config file not found: {p}")
    return configmod.load_config_file(p)


def _write_table_csv(stats, path) -> None:
    opt = lambda v: "" if v is None else round(v, 6)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TABLE_HEADER)
        for s in stats:
            writer.writerow(
                [
                    s.c, s.w, s.W, s.n_replicates, s.n_detected,
                    round(s.arch_rate, 6), opt(s.T_mean), opt(s.T_sd),
                    opt(s.M_mean), opt(s.M_sd), opt(s.m_mean), opt(s.m_sd),
                ]
            )


def cmd_run(args) -> int:
    try:
        values = _load_config(args.config)
        sim_config = configmod.sim_config_from_mapping(values, seed=args.seed)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)

        records = run(sim_config)
        grid = build_world(sim_config.W, sim_config.L, sim_config.w)
        measurement = detect_arch_onset(records, grid)

        write_trace_csv(records, out / "trace.csv")
        write_summary_csv(records, out / "summary.csv")
        row = MeasurementRow(
            c=sim_config.c, w=sim_config.w, W=sim_config.W, seed=sim_config.seed,
            replicate=0, arch_detected=measurement.arch_detected,
            T=measurement.T, M=measurement.M, m=measurement.m,
            cluster_size=measurement.cluster_size,
        )
        write_measurements_csv([row], out / "measurement.csv")
        (out / "effective_config.txt").write_text(
            configmod.dump_sim_config(sim_config)
        )
        if args.format is not None:
            step = args.step if args.step is not None else records[-1].t
            frame = next((r for r in records if r.t == step), None)
            if frame is None:
                return _fail(f"step {step} outside trace 0..{records[-1].t}")
            if args.format == "ascii":
                (out / f"frame_{step}.txt").write_text(
                    render.ascii_frame(frame, grid) + "\n"
                )
            else:
                (out / f"frame_{step}.svg").write_text(render.svg_frame(frame, grid))
        last = records[-1]
        print(
            f"run finished: {last.exited_count}/{last.agent_count} exited "
            f"in {last.t} steps; arch_detected={int(measurement.arch_detected)}"
            + (f" T={measurement.T} M={measurement.M} m={measurement.m}"
               if measurement.arch_detected else "")
        )
        return 0
    except (ArchsimError, OSError) as exc:
        return _fail(str(exc))


def cmd_sweep(args) -> int:
    try:
        values = _load_config(args.config)
        sweep_config = configmod.sweep_config_from_mapping(values, base_seed=args.seed)
        sweep_config.validate()
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)

        def progress(done, total, task):
            c, w, rep = task
            print(f"[{done}/{total}] c={c} w={w} replicate={rep}", flush=True)

        rows, errors = run_sweep(
            sweep_config, parallelism=args.parallelism,
            progress=progress if args.verbose else None,
        )
        write_measurements_csv(rows, out / "measurements.csv")
        _write_table_csv(analysis.aggregate(rows) if rows else [], out / "sweep_table.csv")
        sidecar = configmod.dump_sweep_config(sweep_config)
        sidecar += "# per-run seed = first 8 bytes of sha256('base_seed:c:w:replicate')\n"
        (out / "effective_config.txt").write_text(sidecar)
        if errors:
            write_errors_csv(errors, out / "errors.csv")
            return _fail(f"{len(errors)} of {len(rows) + len(errors)} cells failed "
                         f"(see {out / 'errors.csv'})")
        print(f"sweep finished: {len(rows)} runs -> {out / 'measurements.csv'}")
        return 0
    except (ArchsimError, OSError) as exc:
        return _fail(str(exc))


def cmd_analyze(args) -> int:
    try:
        from .sweep import read_measurements_csv

        rows = read_measurements_csv(args.measurements)
        if not rows:
            return _fail(f"{args.measurements}: no measurement rows")
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)

        stats = analysis.aggregate(rows)
        _write_table_csv(stats, out / "sweep_table.csv")

        fits = analysis.regression_by_c(rows, per_replicate=args.per_replicate)
        with open(out / "regression.csv", "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(REGRESSION_HEADER)
            for c, fit in sorted(fits.items()):
                t_stat = "" if fit.t_stat is None else round(fit.t_stat, 6)
                writer.writerow(
                    [c, round(fit.slope, 6), round(fit.intercept, 6),
                     round(fit.r_squared, 6), t_stat, fit.n]
                )

        with open(out / "trends.csv", "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(TRENDS_HEADER)
            try:
                trends = analysis.compute_trends(rows)
                for name, r in [
                    ("T_vs_inverse_cw", trends.T_vs_inverse_cw),
                    ("M_vs_c_over_w", trends.M_vs_c_over_w),
                    ("m_vs_cw", trends.m_vs_cw),
                ]:
                    writer.writerow(
                        [name, round(r, 6), trends.n_cells, trends.n_saturated_excluded]
                    )
            except ArchsimError:
                pass  # too few usable cells: leave header-only trends file

        for c, fit in sorted(fits.items()):
            points = [
                (s.w, s.T_mean)
                for s in stats
                if s.c == c and s.T_mean is not None
            ]
            svg = render.svg_scatter(
                points, fit=fit,
                title=f"mean onset time vs exit width, c={c}",
                xlabel="exit width w (cells)", ylabel="mean T (steps)",
            )
            (out / f"T_vs_w_c{c}.svg").write_text(svg)
        print(f"analysis written to {out} ({len(fits)} regression fits)")
        return 0
    except (ArchsimError, OSError) as exc:
        return _fail(str(exc))


def cmd_render(args) -> int:
    try:
        records = read_trace_csv(args.trace)
        values = _load_config(args.config)
        sim_config = configmod.sim_config_from_mapping(values)
        grid = build_world(sim_config.W, sim_config.L, sim_config.w)
        step = args.step if args.step is not None else records[-1].t
        frame = next((r for r in records if r.t == step), None)
        if frame is None:
            return _fail(f"step {step} outside trace 0..{records[-1].t}")
        text = (
            render.ascii_frame(frame, grid) + "\n"
            if args.format == "ascii"
            else render.svg_frame(frame, grid)
        )
        if args.out:
            Path(args.out).write_text(text)
        else:
            sys.stdout.write(text)
        return 0
    except (ArchsimError, OSError) as exc:
        return _fail(str(exc))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="archsim",
        description="Grid microsimulation of pedestrian egress and exit arching",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="simulate one crowd and record its trace")
    p_run.add_argument("--config", required=True,
                       help="run config file (key = value lines)")
    p_run.add_argument("--out", required=True, help="output directory")
    p_run.add_argument("--seed", type=int, help="override the config seed")
    p_run.add_argument("--format", choices=("ascii", "svg"),
                       help="also render one frame in this format")
    p_run.add_argument("--step", type=int, help="step to render (default: last)")
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="run the full c x w factorial experiment")
    p_sweep.add_argument("--config", help="sweep config file")
    p_sweep.add_argument("--out", required=True, help="output directory")
    p_sweep.add_argument("--parallelism", type=int, default=1,
                         help="worker processes (default 1)")
    p_sweep.add_argument("--seed", type=int, help="override base_seed")
    p_sweep.add_argument("--verbose", action="store_true",
                         help="print per-cell progress")
    p_sweep.set_defaults(func=cmd_sweep)

    p_an = sub.add_parser("analyze", help="aggregate, regress, and plot measurements")
    p_an.add_argument("measurements", help="measurements CSV from a sweep")
    p_an.add_argument("--out", required=True, help="output directory")
    p_an.add_argument("--per-replicate", action="store_true",
                      help="regress raw replicates instead of cell means")
    p_an.set_defaults(func=cmd_analyze)

    p_render = sub.add_parser("render", help="draw one frame of a recorded trace")
    p_render.add_argument("trace", help="trace CSV from a run")
    p_render.add_argument("--config", required=True,
                          help="the run's effective_config.txt (world geometry)")
    p_render.add_argument("--step", type=int, help="step to draw (default: last)")
    p_render.add_argument("--format", choices=("ascii", "svg"), default="ascii")
    p_render.add_argument("--out", help="output file (default: stdout)")
    p_render.set_defaults(func=cmd_render)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
