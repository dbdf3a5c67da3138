"""Command-line front end.

Commands: analytic, simulate, validate, reproduce-table2. Configuration is a
flat INI file with [scenario], [sim] and [trunc] sections whose keys are the
dataclass field names; command-line flags override config values.

Exit codes: 0 success, 1 usage/config error, 2 numerical failure,
3 partial reproduction failure.
"""

import argparse
import configparser
import dataclasses
import os
import sys
import time

import numpy as np

from . import analytic, benchmarks, mcsim, metrics
from .analytic import SeriesModel, Truncation
from .curves import write_response_csv
from .errors import (
    DomainError,
    NumericalError,
    UndefinedMetricError,
    ValidationError,
)
from .metrics import CurvePair
from .scenario import Scenario, validate_regime

SIM_DEFAULTS = dict(
    dt=1e-5,
    horizon=3.5,
    n_molecules=1000,
    replications=20,
    seed=0,
    bin_width=0.01,
    tube_length=3500.0,
    early_exit_sigma=10.0,
)

_INT_KEYS = {"n_emit", "n_molecules", "replications", "seed", "m_max", "n_max", "l_max"}


class _Parser(argparse.ArgumentParser):
    # usage errors must exit 1, not argparse's default 2
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _parse_section(cp, section, cls):
    if not cp.has_section(section):
        return {}
    valid = {f.name for f in dataclasses.fields(cls)}
    out = {}
    for key, raw in cp.items(section):
        if key not in valid:
            raise ValidationError([f"unknown key '{key}' in [{section}]"])
        try:
            out[key] = int(raw) if key in _INT_KEYS else float(raw)
        except ValueError:
            raise ValidationError([f"bad value for '{key}' in [{section}]: {raw!r}"])
    return out


def load_config(path):
    if not os.path.isfile(path):
        raise ValidationError([f"config file not found: {path}"])
    cp = configparser.ConfigParser()
    cp.read(path)
    known = {"scenario", "sim", "trunc"}
    extra = set(cp.sections()) - known
    if extra:
        raise ValidationError([f"unknown config sections: {sorted(extra)}"])
    return (
        _parse_section(cp, "scenario", Scenario),
        _parse_section(cp, "sim", mcsim.SimConfig),
        _parse_section(cp, "trunc", Truncation),
    )


def _assemble(args, need_scenario):
    if args.config:
        sc_kw, sim_kw, tr_kw = load_config(args.config)
    else:
        sc_kw, sim_kw, tr_kw = {}, {}, {}
    if need_scenario and not sc_kw:
        raise ValidationError(
            ["this command needs a [scenario] section; pass --config <file>"]
        )

    sim_kw = {**SIM_DEFAULTS, **sim_kw}
    if args.seed is not None:
        sim_kw["seed"] = args.seed
    if args.replications is not None:
        sim_kw["replications"] = args.replications
    if args.dt is not None:
        sim_kw["dt"] = args.dt
    if args.no_early_exit:
        sim_kw["early_exit_sigma"] = 0.0

    if args.trunc is not None:
        tr_kw = {"m_max": args.trunc[0], "n_max": args.trunc[1]}

    scenario = Scenario(**sc_kw) if sc_kw else None
    sim_cfg = mcsim.SimConfig(**sim_kw)
    trunc = Truncation(**tr_kw)
    grid_step = args.grid_step if args.grid_step is not None else 0.01
    if not (grid_step > 0.0):
        raise ValidationError([f"--grid-step must be > 0, got {grid_step}"])

    out_dir = args.out
    os.makedirs(out_dir, exist_ok=True)
    return scenario, sim_cfg, trunc, grid_step, out_dir


def _time_grid(horizon, grid_step):
    n = int(np.floor(horizon / grid_step + 1e-9))
    return np.arange(n + 1) * grid_step


def _print_regime(scenario):
    report = validate_regime(scenario)
    print(f"reynolds = {report.reynolds:.6g}")
    print(f"peclet = {report.peclet:.6g}")
    print(f"laminar = {report.laminar}")
    print(f"flow_dominated = {report.flow_dominated}")
    if not report.laminar:
        print("warning: flow is not laminar; the model assumes laminar flow",
              file=sys.stderr)
    if not report.flow_dominated:
        print("warning: Peclet number below the flow-dominated threshold; "
              "the series approximation degrades", file=sys.stderr)
    return report


def _write_manifest(path, entries):
    with open(path, "w", newline="\n") as f:
        for key, value in entries:
            f.write(f"{key} = {value}\n")


def cmd_analytic(args):
    scenario, sim_cfg, trunc, grid_step, out_dir = _assemble(args, need_scenario=True)
    _print_regime(scenario)
    model = SeriesModel(scenario, trunc)
    grid = _time_grid(sim_cfg.horizon, grid_step)
    prob = analytic.arrival_probability(model, grid)
    rate = analytic.arrival_rate(model, grid)
    write_response_csv(prob, os.path.join(out_dir, "arrival_probability.csv"))
    write_response_csv(rate, os.path.join(out_dir, "arrival_rate.csv"))
    print(f"wrote {out_dir}/arrival_probability.csv and {out_dir}/arrival_rate.csv")
    return 0


def cmd_simulate(args):
    scenario, sim_cfg, _, _, out_dir = _assemble(args, need_scenario=True)
    t0 = time.perf_counter()
    ens = mcsim.run_ensemble(scenario, sim_cfg)
    wall = time.perf_counter() - t0
    mcsim.write_cdf_csv(ens, os.path.join(out_dir, "empirical_cdf.csv"))
    mcsim.write_rate_csv(ens, os.path.join(out_dir, "rate_histogram.csv"))
    _write_manifest(
        os.path.join(out_dir, "manifest.txt"),
        [
            ("command", "simulate"),
            ("seed", sim_cfg.seed),
            ("dt", sim_cfg.dt),
            ("horizon", sim_cfg.horizon),
            ("n_molecules", sim_cfg.n_molecules),
            ("replications", sim_cfg.replications),
            ("bin_width", sim_cfg.bin_width),
            ("tube_length", sim_cfg.tube_length),
            ("early_exit_sigma", sim_cfg.early_exit_sigma),
            ("n_total", ens.n_total),
            ("absorbed", ens.n_absorbed),
            ("exited", ens.n_exited),
            ("alive", ens.n_alive),
            ("overshoot_clamps", ens.overshoot_clamps),
            ("final_ratio", repr(ens.final_ratio)),
            ("wall_time_s", f"{wall:.3f}"),
        ],
    )
    print(f"absorbed {ens.n_absorbed}/{ens.n_total} (ratio {ens.final_ratio:.4f})")
    return 0


def cmd_validate(args):
    scenario, sim_cfg, trunc, grid_step, out_dir = _assemble(args, need_scenario=True)
    model = SeriesModel(scenario, trunc)
    grid = _time_grid(sim_cfg.horizon, grid_step)
    theory = analytic.arrival_probability(model, grid)
    write_response_csv(theory, os.path.join(out_dir, "arrival_probability.csv"))
    if args.self_validate:
        pair = CurvePair(times=theory.times, test=theory.values,
                         reference=theory.values)
        example_id = "self"
    else:
        ens = mcsim.run_ensemble(scenario, sim_cfg)
        mcsim.write_cdf_csv(ens, os.path.join(out_dir, "empirical_cdf.csv"))
        pair = metrics.align(theory, ens, grid_step)
        example_id = "custom"
    row = (
        example_id,
        metrics.rmse(pair),
        metrics.nmse(pair),
        metrics.nrmse(pair),
        len(pair),
        sim_cfg.seed,
    )
    metrics.write_metrics_csv([row], os.path.join(out_dir, "metrics.csv"))
    print(f"{example_id}: rmse={row[1]:.6g} nmse={row[2]:.6g} nrmse={row[3]:.6g}")
    return 0


def cmd_reproduce_table2(args):
    _, sim_cfg, trunc, grid_step, out_dir = _assemble(args, need_scenario=False)
    t0 = time.perf_counter()

    def progress(row):
        status = "ok" if row.passed else "FAIL"
        print(
            f"{row.example_id}: Re={row.re:.6g} Pe={row.pe:.6g} "
            f"nrmse={row.nrmse:.4f} (expected {row.expected_nrmse:.4f}) "
            f"[{status}] {row.wall_time_s:.1f}s",
            flush=True,
        )

    rows, artifacts = benchmarks.run_all(
        sim_cfg, trunc, grid_step, progress=progress
    )
    benchmarks.write_summary_csv(rows, os.path.join(out_dir, "reproduce_summary.csv"))
    metrics.write_metrics_csv(
        [
            (r.example_id, r.rmse, r.nmse, r.nrmse, r.n_samples, r.seed)
            for r in rows
        ],
        os.path.join(out_dir, "metrics.csv"),
    )
    for ex_id, art in artifacts.items():
        sub = os.path.join(out_dir, ex_id)
        os.makedirs(sub, exist_ok=True)
        write_response_csv(art["theory"], os.path.join(sub, "arrival_probability.csv"))
        mcsim.write_cdf_csv(art["ensemble"], os.path.join(sub, "empirical_cdf.csv"))
        mcsim.write_rate_csv(art["ensemble"], os.path.join(sub, "rate_histogram.csv"))
    wall = time.perf_counter() - t0
    _write_manifest(
        os.path.join(out_dir, "manifest.txt"),
        [
            ("command", "reproduce-table2"),
            ("seed", sim_cfg.seed),
            ("dt", sim_cfg.dt),
            ("replications", sim_cfg.replications),
            ("n_molecules", sim_cfg.n_molecules),
            ("early_exit_sigma", sim_cfg.early_exit_sigma),
            ("trunc", f"{trunc.m_max},{trunc.n_max}"),
            ("grid_step", grid_step),
            ("wall_time_s", f"{wall:.3f}"),
        ],
    )
    n_fail = sum(not r.passed for r in rows)
    mean_nrmse = sum(r.nrmse for r in rows) / len(rows)
    print(f"mean nrmse {mean_nrmse:.4f}; {len(rows) - n_fail}/{len(rows)} rows ok; "
          f"total {wall:.1f}s")
    if n_fail:
        print(f"error: {n_fail} row(s) outside tolerance", file=sys.stderr)
        return 3
    return 0


def _trunc_pair(text):
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("expected M,N")
    return int(parts[0]), int(parts[1])


def build_parser():
    parser = _Parser(prog="tubemc", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    specs = [
        ("analytic", cmd_analytic, "write the analytic response curves"),
        ("simulate", cmd_simulate, "run the Monte Carlo simulator"),
        ("validate", cmd_validate, "compare theory against simulation"),
        ("reproduce-table2", cmd_reproduce_table2,
         "rerun the six benchmark examples and check Re/Pe/NRMSE"),
    ]
    for name, func, help_text in specs:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", default=None, help="INI config file")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--grid-step", type=float, default=None,
                       dest="grid_step", help="metric/curve grid step, s")
        p.add_argument("--trunc", type=_trunc_pair, default=None,
                       metavar="M,N", help="series truncation orders")
        p.add_argument("--replications", type=int, default=None)
        p.add_argument("--dt", type=float, default=None)
        p.add_argument("--no-early-exit", action="store_true",
                       dest="no_early_exit")
        if name == "validate":
            p.add_argument("--self-validate", action="store_true",
                           dest="self_validate",
                           help="compare the theory curve against itself")
        p.set_defaults(func=func)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValidationError, DomainError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (NumericalError, UndefinedMetricError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
