"""Command-line surface.

Subcommands: walk, birkhoff, rate, tails, lyapunov, nonplanar, density,
validate.  Exit codes: 0 success, 1 validation error, 2 runtime error.
Diagnostics go to stderr; data goes to files (or stdout for report-style
subcommands).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys

import numpy as np

from .io import ConfigError, ExperimentConfig, ResultSet, emit_results, \
    parse_config, parse_results
from .lattice import ReductionError
from .measures import nonplanarity_check, pushforward_density_check
from .stats import (chernoff_tail, conjugation_growth, estimate_rate,
                    expansion_set_mass, lyapunov_check)
from .walk import run_birkhoff, run_ensemble

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RUNTIME = 2


def _log(*parts):
    print(*parts, file=sys.stderr)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="latticewalk",
        description="Random walks on the space of unimodular lattices")
    sub = parser.add_subparsers(dest="command")
    for name, help_text in [
        ("walk", "run the walk ensemble and write estimate series"),
        ("birkhoff", "single-trajectory running averages"),
        ("rate", "fit an exponential convergence rate from a results file"),
        ("tails", "Chernoff / expansion-set / conjugation-growth tail curves"),
        ("lyapunov", "adjoint-product Lyapunov exponents over a v grid"),
        ("nonplanar", "Monte Carlo non-planarity certificate for the curve"),
        ("density", "pushforward density reconstruction diagnostic (k = 1)"),
        ("validate", "parse and validate the config only"),
    ]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="config file path")
        p.add_argument("--seed", type=int, default=None,
                       help="override the config seed")
        p.add_argument("--trials", type=int, default=None,
                       help="override the trial count")
        p.add_argument("--steps", type=int, default=None,
                       help="override the step count")
        p.add_argument("--out", default=None,
                       help="override the output directory")
        p.add_argument("--format", choices=("csv", "json"), default=None,
                       help="override the output format")
        p.add_argument("--workers", type=int, default=1,
                       help="worker threads for ensemble runs")
    return parser


def _out_path(cfg: ExperimentConfig, args, stem: str) -> str:
    directory = args.out or cfg.output_dir
    fmt = args.format or cfg.output_format
    return os.path.join(directory, f"{stem}.{fmt}"), fmt


def _estimates_resultset(cfg, args, result) -> ResultSet:
    rows = []
    wcfg = result.config
    for oi, obs in enumerate(wcfg.observables):
        for n, mean, stderr, count in result.series(oi):
            rows.append((n, obs.name, mean, stderr, count, result.aborted))
    return ResultSet(kind="estimates", rows=tuple(rows),
                     config_hash=cfg.config_hash(), seed=wcfg.seed)


def _cmd_walk(cfg: ExperimentConfig, args) -> int:
    wcfg = cfg.walk_config(seed=args.seed, trials=args.trials,
                           steps=args.steps)
    _log(f"walk: {wcfg.trials} trials x {wcfg.steps} steps, seed {wcfg.seed}")
    result = run_ensemble(wcfg, n_workers=max(1, args.workers))
    rs = _estimates_resultset(cfg, args, result)
    path, fmt = _out_path(cfg, args, "estimates")
    emit_results(rs, fmt, path)
    _log(f"walk: wrote {path} ({result.aborted} aborted trials)")
    return EXIT_OK


def _cmd_birkhoff(cfg: ExperimentConfig, args) -> int:
    wcfg = cfg.walk_config(seed=args.seed, trials=1, steps=max(cfg.steps, 1))
    total = args.steps or cfg.steps
    _log(f"birkhoff: single trajectory of {total} steps, seed {wcfg.seed}")
    result = run_birkhoff(wcfg, total)
    rows = []
    for oi, obs in enumerate(wcfg.observables):
        for gi, n in enumerate(result.checkpoints):
            rows.append((int(n), obs.name, float(result.averages[gi, oi]),
                         float(result.stderrs[gi, oi]), 1, 0))
    rs = ResultSet(kind="estimates", rows=tuple(rows),
                   config_hash=cfg.config_hash(), seed=wcfg.seed)
    path, fmt = _out_path(cfg, args, "birkhoff")
    emit_results(rs, fmt, path)
    _log(f"birkhoff: wrote {path} ({len(result.excursions)} excursions)")
    return EXIT_OK


def _cmd_rate(cfg: ExperimentConfig, args) -> int:
    directory = args.out or cfg.output_dir
    fmt = args.format or cfg.output_format
    src = os.path.join(directory, f"estimates.{fmt}")
    if not os.path.exists(src):
        _log(f"rate: missing estimates file {src}; run `walk` first")
        return EXIT_RUNTIME
    estimates = parse_results(src)
    by_obs: dict[str, list] = {}
    for n, obs, mean, stderr, trials, aborted in estimates.rows:
        by_obs.setdefault(obs, []).append((n, mean, stderr))
    rows = []
    for oi, obs in enumerate(cfg.observables):
        name = obs.name
        if name not in by_obs:
            continue
        hm = obs.haar_mean(cfg.dims)
        if hm is None:
            _log(f"rate: no Haar mean available for {name}; skipped")
            continue
        fit = estimate_rate(by_obs[name], hm)
        if fit.floor_reached:
            _log(f"rate: {name}: noise floor reached at n={fit.floor_n} "
                 f"({fit.points_used} signal points)")
            continue
        rows.append((name, fit.eta_hat, fit.c_hat, fit.r2, fit.eta_lo,
                     fit.eta_hi, fit.n_min, fit.n_max))
    rs = ResultSet(kind="rate", rows=tuple(rows),
                   config_hash=cfg.config_hash(), seed=cfg.seed)
    path, fmt = _out_path(cfg, args, "rate")
    emit_results(rs, fmt, path)
    _log(f"rate: wrote {path}")
    return EXIT_OK


def _tail_resultset(cfg, curve) -> ResultSet:
    rows = [(n, p, lo, hi, tr) for n, p, lo, hi, tr in
            zip(curve.ns, curve.probs, curve.lo, curve.hi, curve.trials)]
    return ResultSet(kind="tails", rows=tuple(rows),
                     config_hash=cfg.config_hash(), seed=cfg.seed)


def _cmd_tails(cfg: ExperimentConfig, args) -> int:
    trials = args.trials or cfg.trials
    seed = cfg.seed if args.seed is None else args.seed
    n_grid = (10, 20, 40, 80)
    epsilon = 0.05
    rng = lambda tag: np.random.default_rng([seed, tag])
    _log(f"tails: {trials} trials per n over n in {n_grid}")
    cher = chernoff_tail(cfg.diagonal_law, 0, epsilon, n_grid, trials,
                         rng=rng(1))
    expa = expansion_set_mass(cfg.diagonal_law, n_grid, trials, rng=rng(2))
    grow = conjugation_growth(cfg.diagonal_law, cfg.unipotent_law, n_grid,
                              trials, float(np.exp(cfg.diagonal_law.beta)),
                              rng=rng(3))
    for stem, curve in [("tails_chernoff", cher), ("tails_expansion", expa),
                        ("tails_growth", grow)]:
        path, fmt = _out_path(cfg, args, stem)
        emit_results(_tail_resultset(cfg, curve), fmt, path)
        _log(f"tails: wrote {path}")
    return EXIT_OK


def _cmd_lyapunov(cfg: ExperimentConfig, args) -> int:
    trials = args.trials or 100
    n = args.steps or 200
    seed = cfg.seed if args.seed is None else args.seed
    k0 = cfg.dims.k0
    vr = np.random.default_rng([seed, 99])
    vs = []
    for _ in range(20):
        m = vr.standard_normal((k0, k0))
        m -= np.trace(m) / k0 * np.eye(k0)
        vs.append(m)
    wcfg = cfg.walk_config(seed=seed, trials=trials, steps=n)
    _log(f"lyapunov: {trials} trials x {n} steps, 20 directions")
    report = lyapunov_check(wcfg, vs, n, trials)
    rows = []
    for vi in range(len(vs)):
        for tr in range(trials):
            rows.append((tr, f"lyapunov[v{vi:02d}]",
                         float(report.exponents[tr, vi]), 0.0, 1, 0))
    rs = ResultSet(kind="estimates", rows=tuple(rows),
                   config_hash=cfg.config_hash(), seed=seed)
    path, fmt = _out_path(cfg, args, "lyapunov")
    emit_results(rs, fmt, path)
    _log(f"lyapunov: wrote {path}; {report.nonpositive_pairs} nonpositive "
         f"(trial, v) pairs, {report.underflows} underflows")
    return EXIT_OK


def _cmd_nonplanar(cfg: ExperimentConfig, args) -> int:
    trials = args.trials or 1_000_000
    seed = cfg.seed if args.seed is None else args.seed
    report = nonplanarity_check(cfg.unipotent_law.curve, trials,
                                rng=np.random.default_rng([seed, 4]))
    print(json.dumps(dataclasses.asdict(report)))
    return EXIT_OK


def _cmd_density(cfg: ExperimentConfig, args) -> int:
    if cfg.dims.k != 1:
        _log("density: analytic comparison requires k = 1")
        return EXIT_RUNTIME
    samples = args.trials or 1_000_000
    seed = cfg.seed if args.seed is None else args.seed
    curve = cfg.unipotent_law.curve
    ts = np.linspace(0, 1, 513)
    vals = curve.value(ts)[:, 0]
    lo, hi = float(vals.min()), float(vals.max())
    edges = np.linspace(lo, hi, 201)
    diag = pushforward_density_check([1.0], curve, edges, samples,
                                     rng=np.random.default_rng([seed, 5]))
    rows = []
    for c in range(edges.size - 1):
        rows.append((float(edges[c]), float(edges[c + 1]),
                     float(diag.hist_mass[c]), float(diag.analytic_mass[c]),
                     float(diag.density_at_centers[c])))
    rs = ResultSet(kind="density", rows=tuple(rows),
                   config_hash=cfg.config_hash(), seed=seed)
    path, fmt = _out_path(cfg, args, "density")
    emit_results(rs, fmt, path)
    _log(f"density: wrote {path}; TV discrepancy {diag.tv_discrepancy:.4f}, "
         f"{diag.flagged_cells} flagged cells")
    return EXIT_OK


def _cmd_validate(cfg: ExperimentConfig, args) -> int:
    _log("config OK")
    _log(json.dumps(cfg.raw, indent=2))
    return EXIT_OK


_COMMANDS = {
    "walk": _cmd_walk,
    "birkhoff": _cmd_birkhoff,
    "rate": _cmd_rate,
    "tails": _cmd_tails,
    "lyapunov": _cmd_lyapunov,
    "nonplanar": _cmd_nonplanar,
    "density": _cmd_density,
    "validate": _cmd_validate,
}


def cli_dispatch(argv) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return EXIT_VALIDATION if err.code else EXIT_OK
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_VALIDATION
    try:
        cfg = parse_config(args.config)
    except ConfigError as err:
        for e in err.errors:
            _log(f"config error: {e}")
        return EXIT_VALIDATION
    try:
        return _COMMANDS[args.command](cfg, args)
    except (ReductionError, OSError, RuntimeError, NotImplementedError) as err:
        _log(f"runtime error: {err}")
        return EXIT_RUNTIME


def main() -> None:
    sys.exit(cli_dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
