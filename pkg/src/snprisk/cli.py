"""Command line entry point: ``snprisk <command> --config FILE``.

Exit codes: 0 on success, 2 when the config does not validate (the message
names the offending file line), 3 when the computation fails numerically
(the message carries the scenario hash).
"""

from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
from typing import Optional

import numpy as np

from . import __version__
from .arrivals import ExponentialLaw, HomogeneousPoisson, Renewal
from .config import COMMANDS, DEFAULTS, ConfigError, ExperimentConfig, load_config
from .estimators import TailRatioCurve, extremal_index_blocks, h2_diagnostic
from .heavytail import sample_rows
from .risk import (
    CONDITIONAL,
    NotAvailable,
    RiskReport,
    _jsonable,
    content_hash,
    extremal_index,
    mc_indicator,
    numeric_limit_trace,
)
from .seqmodel import IdentityMatrix, empirical_spectral_measure, spectral_atoms_closed
from .snp import ExponentialShock, kdem_chain, path_supremum, path_trace, simulate_path

__all__ = ["main", "build_parser"]


def _progress(msg: str) -> None:
    print(f"snprisk: {msg}", file=sys.stderr, flush=True)


def _thresholds(cfg: ExperimentConfig, marginal) -> list:
    kind, vals = cfg.thresholds_or_levels()
    if kind == "thresholds":
        return vals
    return [float(marginal.isf(1.0 - q)) for q in vals]


def _settings(cfg: ExperimentConfig):
    n = cfg.number("run", "n_paths", DEFAULTS["run"]["n_paths"], positive=True, integer=True)
    method = cfg.choice("run", "method", ("plain", "conditional"), "plain")
    sup_mode = cfg.choice("run", "sup_mode", ("skeleton", "skeleton+terminal", "dense"), "skeleton+terminal")
    return n, method, sup_mode


def _risk_entries(cfg, rng, workers, indicators):
    scn = cfg.risk_scenario()
    n, method, sup_mode = _settings(cfg)
    entries = []
    for x in _thresholds(cfg, scn.marginal):
        for ind in indicators:
            m = method if ind in CONDITIONAL else "plain"
            _progress(f"{ind} at x={x:.6g} with {n} paths")
            entries.append(mc_indicator(scn, ind, x, n, rng, workers, m, sup_mode))
    return entries


def cmd_indicators(cfg, rng, workers, command):
    if command in ("tail-ratio", "ruin"):
        indicators = [command]
    else:
        indicators = cfg.words("run", "indicators", DEFAULTS["run"]["indicators"])
    report = RiskReport(_risk_entries(cfg, rng, workers, indicators))
    return {"entries": report.as_dict()["entries"]}, report.to_csv()


def cmd_convergence(cfg, rng, workers, command):
    indicator = cfg.words("run", "indicators", "tail-ratio")[0]
    entries = _risk_entries(cfg, rng, workers, [indicator])
    ref = entries[0].closed_form_constant
    curve = TailRatioCurve(np.array([e.threshold for e in entries]), np.array([e.mc_estimate for e in entries]),
                           np.array([e.ci_half_width for e in entries]), math.nan if ref is None else ref)
    dev = curve.deviations
    results = {
        "indicator": indicator,
        "reference": ref,
        "entries": [e.__dict__ for e in entries],
        "deviation_shrinking": bool(np.all(np.diff(dev) <= 0)) if ref is not None else None,
    }
    return results, curve.to_csv()


def cmd_spectral(cfg, rng, workers, command):
    scn = cfg.sequence_scenario()
    n, _, _ = _settings(cfg)
    kind, vals = cfg.thresholds_or_levels()
    opts = {"threshold": vals[-1]} if kind == "thresholds" else {"level": vals[-1]}
    min_exc = cfg.number("sequence", "min_exceedances", "200", positive=True, integer=True)
    _progress(f"spectral estimate with batches of {n}")
    est = empirical_spectral_measure(scn, n, rng, min_exceedances=min_exc, workers=workers, **opts)
    results = {
        "threshold": est.threshold,
        "n_exceedances": est.n_exceedances,
        "n_samples": est.n_samples,
        "weights": est.weights.tolist(),
        "ci_half_width": est.ci_half_width.tolist(),
        "moment": est.moment.tolist(),
    }
    if isinstance(scn.matrix, IdentityMatrix):
        try:
            atoms = spectral_atoms_closed(scn.length, j_max=len(est.weights), horizon=scn.horizon)
            results["closed_form_atoms"] = atoms.probabilities.tolist()
        except ValueError:
            results["closed_form_atoms"] = "not-available"
    return results, est.to_csv()


def cmd_extremal(cfg, rng, workers, command):
    scn = cfg.risk_scenario()
    grid = cfg.numbers("extremal", "t_grid", DEFAULTS["extremal"]["t_grid"])
    results = {}
    for mode in cfg.words("extremal", "modes", DEFAULTS["extremal"]["modes"]):
        if mode not in ("numeric-limit", "paper-closed-form", "embedded-chain"):
            raise cfg.error("extremal", "modes", f"unknown mode {mode!r}")
        try:
            results[mode] = extremal_index(scn, mode, T_grid=grid)
        except NotAvailable as exc:
            results[mode] = f"not-available: {exc}"
    Ts, theta, diag = numeric_limit_trace(scn, grid)
    results["numeric_trace"] = {"T": Ts.tolist(), "theta_T": theta.tolist(), "extrapolated": diag.tolist()}
    if cfg.has("extremal", "n_steps") and isinstance(scn.shock, ExponentialShock):
        steps = cfg.number("extremal", "n_steps", positive=True, integer=True)
        block = cfg.number("extremal", "block_size", "100", positive=True, integer=True)
        level = cfg.number("extremal", "level", "0.999")
        if isinstance(scn.counting, HomogeneousPoisson):
            gaps = ExponentialLaw(scn.counting.rate)
        elif isinstance(scn.counting, Renewal):
            gaps = scn.counting.interarrival
        else:
            raise cfg.error("counting", "kind", "the simulated chain needs i.i.d. inter-arrivals")
        _progress(f"simulating {steps} chain steps")
        chain = kdem_chain(scn.shock.omega, gaps, scn.marginal, steps, rng, burn_in=1000)
        results["blocks_estimate"] = extremal_index_blocks(chain, block, level=level)
    return results, None


def cmd_h2(cfg, rng, workers, command):
    marginal = cfg.marginal()
    length = cfg.number("h2", "length", "5", positive=True, integer=True)
    if length < 2:
        raise cfg.error("h2", "length", "need a sequence length of at least 2")
    n, _, _ = _settings(cfg)
    kind, vals = cfg.thresholds_or_levels()
    pairs = [(i, j) for i in range(length) for j in range(i + 1, length)]
    opts = {"thresholds": vals} if kind == "thresholds" else {"levels": vals}
    report = h2_diagnostic(lambda m, g: sample_rows(marginal, g, m, length), pairs, n, rng,
                           bound=cfg.number("h2", "bound", "0.05"), **opts)
    results = {
        "thresholds": report.thresholds.tolist(),
        "ratios": report.ratios.tolist(),
        "worst_pairs": [list(p) for p in report.worst_pairs],
        "passed": report.passed,
        "decreasing": report.decreasing,
    }
    return results, None


def cmd_simulate_path(cfg, rng, workers, command):
    scn = cfg.risk_scenario()
    path = simulate_path(scn.marginal, scn.counting, scn.shock, scn.horizon, rng)
    dt = cfg.number("path", "dt", repr(scn.horizon / 1e4), positive=True)
    sk = path_supremum(path, scn.shock, "skeleton")
    skt = path_supremum(path, scn.shock, "skeleton+terminal")
    dense = path_supremum(path, scn.shock, "dense", dt)
    t, y = path_trace(path, scn.shock, dt)
    buf = io.StringIO()
    buf.write("t,Y\n")
    for a, b in zip(t, y):
        buf.write(f"{float(a)!r},{float(b)!r}\n")
    results = {
        "count": path.arrivals.count,
        "times": path.times.tolist(),
        "shocks": path.shocks.tolist(),
        "terminal": float(np.asarray(y)[-1]) if len(y) else 0.0,
        "supremum": {"skeleton": sk.value, "skeleton+terminal": skt.value, "dense": dense.value},
        "supremum_disagreement": bool(dense.value > skt.value * (1 + 1e-9) + 1e-12),
        "warnings": [w for w in (sk.warning,) if w],
    }
    return results, buf.getvalue()


HANDLERS = {
    "simulate-path": cmd_simulate_path,
    "tail-ratio": cmd_indicators,
    "ruin": cmd_indicators,
    "indicators": cmd_indicators,
    "spectral": cmd_spectral,
    "extremal-index": cmd_extremal,
    "convergence-study": cmd_convergence,
    "h2-check": cmd_h2,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, metavar="PATH", help="INI experiment file")
    common.add_argument("--seed", type=int, help="override [run] seed")
    common.add_argument("--workers", type=int, help="worker threads (default: [run] workers)")
    common.add_argument("--out", metavar="DIR", help="directory for result files (default: results)")
    common.add_argument("--stdout", action="store_true", help="print the JSON report on standard output")
    parser = argparse.ArgumentParser(prog="snprisk", description="Heavy-tailed shot noise risk experiments.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("run", parents=[common], help="run the command named in [run] command")
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=f"{name} experiment")
    return parser


def _resolved_text(resolved: dict) -> str:
    lines = []
    for section, vals in resolved.items():
        lines.append(f"[{section}]")
        lines.extend(f"{k} = {v}" for k, v in vals.items())
        lines.append("")
    return "\n".join(lines)


def main(argv: Optional[list] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            if not 0 <= args.seed < 2**64:
                raise ConfigError("--seed must be an unsigned 64-bit integer", "<command line>", 0)
            cfg.set("run", "seed", str(args.seed))
        seed = cfg.seed
        if seed is None:
            raise cfg.error("run", "seed", "a seed is required (set [run] seed or pass --seed)")
        command = args.command
        if command == "run":
            command = cfg.choice("run", "command", COMMANDS, DEFAULTS["run"]["command"])
        cfg.set("run", "command", command)
        if args.workers is not None:
            if args.workers < 1:
                raise ConfigError("--workers must be >= 1", "<command line>", 0)
            cfg.set("run", "workers", str(args.workers))
        workers = cfg.number("run", "workers", "1", positive=True, integer=True)
        cfg.validate(command)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    resolved = cfg.resolved()
    scenario_hash = content_hash(resolved)
    sys.stderr.write(_resolved_text(resolved))
    rng = np.random.default_rng(seed)
    try:
        results, csv_text = HANDLERS[command](cfg, rng, workers, command)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ArithmeticError, FloatingPointError, RuntimeError, ValueError, NotAvailable) as exc:
        print(f"numeric failure in scenario {scenario_hash}: {exc}", file=sys.stderr)
        return 3

    report = _jsonable({
        "command": command,
        "config": resolved,
        "seed": seed,
        "input_hash": content_hash({"config": resolved, "seed": seed}),
        "results": results,
    })
    text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if args.stdout:
        sys.stdout.write(text)
    if args.out is not None or not args.stdout:
        out = args.out or "results"
        os.makedirs(out, exist_ok=True)
        with open(os.path.join(out, f"{command}.json"), "w") as fh:
            fh.write(text)
        if csv_text is not None:
            with open(os.path.join(out, f"{command}.csv"), "w", newline="") as fh:
                fh.write(csv_text)
        _progress(f"wrote {os.path.join(out, command + '.json')}")
    return 0


def main_entry() -> None:
    sys.exit(main())
