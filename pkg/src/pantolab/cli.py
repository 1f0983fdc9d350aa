"""Command-line front end: reproducible classify / simulate / verify runs.

Configuration is a JSON file with model / sim / analysis / output sections.
Dotted-path flags override file values (--sim.n-paths=20000), the
PANTO_SEED environment variable overrides the file's master seed, and
explicit flags override both. Every run writes a manifest JSON holding
the tool version and the fully resolved configuration; feeding a manifest
back in as --config reproduces the run byte for byte (clear PANTO_SEED
first, since the environment outranks file values).

Exit codes are a stable contract:
  0 success, 2 configuration error, 3 regime unsupported (the analytic
  theory declines the model), 4 verdict failure, 5 numeric failure.
"""

from __future__ import annotations

import argparse
import copy
import csv
import json
import os
import sys

import numpy as np

from . import __version__, detsolver, exponents, linalg, models, sdesim, stats

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_REGIME = 3
EXIT_VERDICT = 4
EXIT_NUMERIC = 5

MAX_DUMPED_PATHS = 1024


class ConfigError(Exception):
    """Invalid or missing configuration."""


def default_config() -> dict:
    return {
        "model": {},
        "sim": {
            "h": None,
            "T": 100.0,
            "n_paths": 1000,
            "master_seed": 0,
            "x0": 1.0,
            "threads": os.cpu_count() or 1,
        },
        "analysis": {
            "p": 2,
            "window": None,
            "tolerances": {"default": 0.15},
            "mode": "sharp",
            "as_check": True,
            "n_nodes": 32,
        },
        "output": {
            "directory": "panto_out",
            "formats": ["csv", "json"],
            "plot": False,
            "dump_paths": False,
        },
    }


def _deep_merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for key, val in override.items():
        if isinstance(val, dict) and isinstance(out.get(key), dict):
            out[key] = _deep_merge(out[key], val)
        else:
            out[key] = copy.deepcopy(val)
    return out


def _parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _apply_override(config: dict, dotted: str, value) -> None:
    path = [part.replace("-", "_") for part in dotted.split(".")]
    node = config
    for part in path[:-1]:
        if not isinstance(node.get(part), dict):
            node[part] = {}
        node = node[part]
    node[path[-1]] = value


def load_config(path: str | None, overrides, seed_flag=None,
                threads_flag=None, output_dir_flag=None,
                env=None) -> dict:
    """Resolve the effective configuration.

    Precedence, lowest to highest: built-in defaults, config file,
    PANTO_SEED environment variable (seed only), dotted overrides and
    explicit flags.
    """
    env = os.environ if env is None else env
    config = default_config()
    if path is not None:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                loaded = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ConfigError("config root must be a JSON object")
        if "config" in loaded and "tool_version" in loaded:
            loaded = loaded["config"]  # manifest replay
        config = _deep_merge(config, loaded)
    if "PANTO_SEED" in env:
        try:
            config["sim"]["master_seed"] = int(env["PANTO_SEED"])
        except ValueError as exc:
            raise ConfigError(f"PANTO_SEED must be an integer: "
                              f"{env['PANTO_SEED']!r}") from exc
    for dotted, value in overrides:
        _apply_override(config, dotted, value)
    if seed_flag is not None:
        config["sim"]["master_seed"] = seed_flag
    if threads_flag is not None:
        config["sim"]["threads"] = threads_flag
    if output_dir_flag is not None:
        config["output"]["directory"] = output_dir_flag
    return config


def _build_model(config: dict):
    section = config.get("model") or {}
    if not section:
        raise ConfigError("config has no model section")
    section = {k: v for k, v in section.items() if k != "family"}
    return models.model_from_dict(section)


def _initial_condition(config: dict) -> models.InitialCondition:
    x0 = config["sim"].get("x0", 1.0)
    if isinstance(x0, dict):
        return models.InitialCondition.from_dict(x0).validate()
    if isinstance(x0, list):
        return models.InitialCondition("deterministic", x0)
    return models.InitialCondition("deterministic", float(x0))


def _json_dump(obj, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, sort_keys=True, indent=2)
        fh.write("\n")


def write_manifest(config: dict, out_dir: str) -> str:
    os.makedirs(out_dir, exist_ok=True)
    manifest = {"tool_version": __version__, "config": config}
    path = os.path.join(out_dir, "manifest.json")
    _json_dump(manifest, path)
    return path


def _resolved_window(config: dict) -> tuple:
    window = config["analysis"].get("window")
    T = float(config["sim"]["T"])
    if window is None:
        return (max(1.0, T / 4.0), T)
    if (not isinstance(window, (list, tuple)) or len(window) != 2):
        raise ConfigError(f"analysis.window must be [T0, T1], got {window!r}")
    return (float(window[0]), float(window[1]))


def _print_report(report) -> None:
    d = report.to_dict()
    print(json.dumps(d, sort_keys=True, indent=2))
    width = max(len(k) for k in d)
    print()
    for key in sorted(d):
        print(f"  {key:<{width}}  {d[key]}")


def _classify(config: dict):
    model = _build_model(config)
    p = int(config["analysis"].get("p", 2))
    mode = config["analysis"].get("mode", "sharp")
    return exponents.classify(model, p=p, mode=mode)


def cmd_classify(config: dict) -> int:
    report = _classify(config)
    out_dir = config["output"]["directory"]
    write_manifest(config, out_dir)
    _print_report(report)
    if "json" in config["output"].get("formats", []):
        _json_dump(report.to_dict(), os.path.join(out_dir, "classify.json"))
    return EXIT_REGIME if report.regime == "unsupported" else EXIT_OK


def _write_plot_script(out_dir: str, regime: str, analytic_value: float,
                       anchor_t: float, anchor_m: float) -> str:
    """Gnuplot script drawing the empirical curve and the analytic slope."""
    path = os.path.join(out_dir, "plot.plt")
    if regime == "polynomial":
        scales = "set logscale xy"
        overlay = f"{anchor_m:.17g} * (x / {anchor_t:.17g})**({analytic_value:.17g})"
    else:
        scales = "set logscale y"
        overlay = (f"{anchor_m:.17g} * exp({analytic_value:.17g} "
                   f"* (x - {anchor_t:.17g}))")
    lines = [
        "# gnuplot script: empirical moment curve vs analytic rate",
        "set datafile separator ','",
        scales,
        "set xlabel 't'",
        "set ylabel 'moment estimate'",
        "set key left bottom",
        f"plot 'moments.csv' skip 1 using 1:2 with linespoints "
        f"title 'empirical', \\",
        f"     {overlay} with lines dashtype 2 title 'analytic'",
    ]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    return path


def _simulate_ensemble(config: dict, model) -> sdesim.Ensemble:
    sim = config["sim"]
    h = sim.get("h")
    if h is None:
        h = min(0.01, sdesim.max_step(model))
        config["sim"]["h"] = h  # manifests record the resolved step
    return sdesim.simulate_ensemble(
        model, _initial_condition(config), float(h), float(sim["T"]),
        int(sim["n_paths"]), int(sim["master_seed"]),
        n_threads=int(config["sim"].get("threads", 1)))


def cmd_verify(config: dict) -> int:
    model = _build_model(config)
    p = int(config["analysis"].get("p", 2))
    mode = config["analysis"].get("mode", "sharp")
    report = exponents.classify(model, p=p, mode=mode)
    out_dir = config["output"]["directory"]
    os.makedirs(out_dir, exist_ok=True)

    if report.regime == "unsupported":
        write_manifest(config, out_dir)
        _print_report(report)
        print("regime unsupported: nothing to verify")
        return EXIT_REGIME

    ensemble = _simulate_ensemble(config, model)
    write_manifest(config, out_dir)
    T = float(config["sim"]["T"])
    window = _resolved_window(config)
    do_as = bool(config["analysis"].get("as_check", True)) and T >= 100.0
    as_kind = report.regime  # polynomial or exponential
    bundle = stats.collect(ensemble, p_orders=(p,),
                           n_nodes=int(config["analysis"].get("n_nodes", 32)),
                           as_kinds=(as_kind,) if do_as else ())
    curve = bundle.curves[p]

    if report.regime == "polynomial":
        mean_est = stats.fit_polynomial_exponent(curve, window)
    else:
        mean_est = stats.fit_exponential_rate(curve, window)
    estimates = [mean_est]
    if do_as:
        estimates.append(bundle.as_estimates[as_kind])

    verdict = stats.verify_report(report, estimates,
                                  config["analysis"]["tolerances"])

    formats = config["output"].get("formats", [])
    if "csv" in formats:
        curve.to_csv(os.path.join(out_dir, "moments.csv"))
    if "json" in formats:
        _json_dump({"analytic": report.to_dict(),
                    "empirical": [e.to_dict() for e in estimates]},
                   os.path.join(out_dir, "exponents.json"))
        _json_dump(verdict.to_dict(), os.path.join(out_dir, "verdict.json"))
    if config["output"].get("plot"):
        sel = curve.t_nodes >= window[0] * (1 - 1e-12)
        anchor_i = int(np.argmax(sel)) if sel.any() else 0
        analytic_value = (report.alpha_mean if report.regime == "polynomial"
                          else report.exp_rate_mean)
        _write_plot_script(out_dir, report.regime, analytic_value,
                           float(curve.t_nodes[anchor_i]),
                           float(curve.m_hat[anchor_i]))

    for check in verdict.checks:
        status = "pass" if check.passed else "FAIL"
        print(f"{status}  {check.kind} ({check.claim}): empirical "
              f"{check.empirical:.6g} vs analytic {check.analytic:.6g} "
              f"(tol {check.tolerance:.3g}, margin {check.margin:.3g})")
    print(f"verdict: {'pass' if verdict.passed else 'fail'}")
    return EXIT_OK if verdict.passed else EXIT_VERDICT


def cmd_simulate(config: dict) -> int:
    model = _build_model(config)
    ensemble = _simulate_ensemble(config, model)
    out_dir = config["output"]["directory"]
    os.makedirs(out_dir, exist_ok=True)
    write_manifest(config, out_dir)
    dump = bool(config["output"].get("dump_paths", False))
    if dump and ensemble.n_paths > MAX_DUMPED_PATHS:
        raise ConfigError(f"refusing to dump {ensemble.n_paths} paths "
                          f"(limit {MAX_DUMPED_PATHS})")
    d = models.dimension(model)
    summary_path = os.path.join(out_dir, "summary.csv")
    with open(summary_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        if d == 1:
            writer.writerow(["path_index", "x_end", "overflow", "freeze_index"])
        else:
            writer.writerow(["path_index"] + [f"x_end_{j+1}" for j in range(d)]
                            + ["overflow", "freeze_index"])
        for traj in ensemble:
            idx = traj.seed.path_index
            if dump:
                traj.to_csv(os.path.join(out_dir, f"path_{idx:05d}.csv"))
            end = traj.values[-1]
            fi = "" if traj.freeze_index is None else str(traj.freeze_index)
            if d == 1:
                writer.writerow([str(idx), f"{end:.17g}",
                                 str(int(traj.overflow)), fi])
            else:
                writer.writerow([str(idx)] + [f"{v:.17g}" for v in end]
                                + [str(int(traj.overflow)), fi])
    print(f"wrote {summary_path}")
    return EXIT_OK


def cmd_det(config: dict) -> int:
    section = config.get("model") or {}
    if not section:
        raise ConfigError("config has no model section")
    a = float(section.get("a", 0.0))
    b = section.get("b", 0.0)
    q = section.get("q", 0.5)
    b_list = [float(x) for x in b] if isinstance(b, list) else [float(b)]
    q_list = [float(x) for x in q] if isinstance(q, list) else [float(q)]
    sim = config["sim"]
    x0 = sim.get("x0", 1.0)
    if not np.isscalar(x0):
        raise ConfigError("det needs a scalar x0")
    sol = detsolver.solve_multi_pantograph_ode(
        a, b_list, q_list, float(x0), float(sim["T"]), sim.get("h"))
    out_dir = config["output"]["directory"]
    os.makedirs(out_dir, exist_ok=True)
    write_manifest(config, out_dir)
    path = os.path.join(out_dir, "det.csv")
    sol.to_csv(path)
    print(f"wrote {path} ({len(sol.values)} nodes, final x = "
          f"{sol.values[-1]:.17g})")
    return EXIT_OK


def cmd_moments(config: dict) -> int:
    model = _build_model(config)
    ensemble = _simulate_ensemble(config, model)
    out_dir = config["output"]["directory"]
    os.makedirs(out_dir, exist_ok=True)
    write_manifest(config, out_dir)
    p = int(config["analysis"].get("p", 2))
    curve = stats.estimate_moment_curve(
        ensemble, p, n_nodes=int(config["analysis"].get("n_nodes", 32)))
    path = os.path.join(out_dir, "moments.csv")
    curve.to_csv(path)
    print(f"wrote {path}")
    return EXIT_OK


_COMMANDS = {
    "classify": cmd_classify,
    "verify": cmd_verify,
    "simulate": cmd_simulate,
    "det": cmd_det,
    "moments": cmd_moments,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="panto",
        description="Growth-exponent laboratory for stochastic pantograph "
                    "equations: analytic classification, Euler-Maruyama "
                    "simulation, and statistical verification.")
    parser.add_argument("command", choices=sorted(_COMMANDS),
                        help="classify | det | moments | simulate | verify")
    parser.add_argument("--config", help="JSON config file (or a manifest "
                                         "from a previous run)")
    parser.add_argument("--seed", type=int, default=None,
                        help="override sim.master_seed")
    parser.add_argument("--threads", type=int, default=None,
                        help="worker threads for ensemble simulation")
    parser.add_argument("--output-dir", default=None,
                        help="override output.directory")
    parser.add_argument("--version", action="version",
                        version=f"panto {__version__}")
    return parser


def _split_overrides(extras):
    overrides = []
    for item in extras:
        if not item.startswith("--") or "=" not in item:
            raise ConfigError(f"unrecognized argument {item!r} (overrides "
                              f"use --section.key=value)")
        dotted, _, raw = item[2:].partition("=")
        if not dotted or "." not in dotted:
            raise ConfigError(f"override {item!r} needs a dotted path like "
                              f"--sim.n-paths=100")
        overrides.append((dotted, _parse_value(raw)))
    return overrides


def main(argv=None) -> int:
    parser = _build_parser()
    args, extras = parser.parse_known_args(argv)
    try:
        overrides = _split_overrides(extras)
        config = load_config(args.config, overrides, seed_flag=args.seed,
                             threads_flag=args.threads,
                             output_dir_flag=args.output_dir)
        return _COMMANDS[args.command](config)
    except (ConfigError, models.ModelError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (exponents.RegimeError, linalg.SpectrumError) as exc:
        print(f"regime not covered: {exc}", file=sys.stderr)
        return EXIT_REGIME
    except (linalg.LinalgError, exponents.ExponentError, stats.StatsError,
            detsolver.DetSolverError, sdesim.SdeSimError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
