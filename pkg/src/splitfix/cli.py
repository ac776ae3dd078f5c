"""Command-line runner.

    splitfix run --scenario two_balls --lambda 0.5 --iters 10000 --plot

Writes ``<scenario>_trace.csv``, ``<scenario>_summary.{txt,json}`` and,
with ``--plot``, ``<scenario>.svg`` into ``--out`` (default:
``$SPLITFIX_OUT_DIR`` or the working directory).

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .analysis import NoConvergenceError, estimate_displacement, solve_shifted_fixed_point
from .plot import emit_plot
from .scenarios import SCENARIOS, build_scenario
from .splitting import DivergenceError, StopRule, iterate


EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

TRACE_VERSION = "splitfix-trace v1"


@dataclass
class RunConfig:
    scenario: str
    lam: float = 0.5
    x0: tuple = (0.0, 0.0)
    max_iters: int = 100_000
    shadow_tol: float = 1e-10
    out_dir: str = "."
    format: str = "csv"
    plot: bool = False
    thin: int = 1
    overrides: dict = field(default_factory=dict)

    def validate(self):
        if self.scenario not in SCENARIOS:
            raise ValueError(f"unknown scenario {self.scenario!r}; choose from {sorted(SCENARIOS)}")
        if not (0.0 < self.lam <= 1.0):
            raise ValueError(f"--lambda must lie in (0, 1], got {self.lam}")
        if self.thin < 1:
            raise ValueError(f"--thin must be >= 1, got {self.thin}")
        if self.format not in ("csv", "json"):
            raise ValueError(f"--format must be csv or json, got {self.format!r}")
        if self.max_iters < 1:
            raise ValueError("--iters must be positive")
        if not self.shadow_tol > 0:
            raise ValueError("--tol must be positive")


def _num(x: float) -> str:
    return f"{x:.17g}"


def _vec(x) -> str:
    return "n/a" if x is None else "(" + ", ".join(_num(float(c)) for c in x) + ")"


def write_trace_csv(path: Path, trace, xbar=None, thin: int = 1):
    d = trace.dim
    cols = ["n"]
    cols += [f"x{i + 1}" for i in range(d)]
    cols += [f"s{i + 1}" for i in range(d)]
    cols += [f"t{i + 1}" for i in range(d)]
    cols.append("step_norm")
    if xbar is not None:
        cols.append("dist_shadow_xbar")
    rows = list(range(0, len(trace), thin))
    if rows[-1] != len(trace) - 1:
        rows.append(len(trace) - 1)
    step_norms = np.linalg.norm(trace.step_diff, axis=1)
    with open(path, "w") as fh:
        fh.write(f"# {TRACE_VERSION}\n")
        fh.write(",".join(cols) + "\n")
        for n in rows:
            vals = [*trace.governing[n], *trace.shadow[n], *trace.reflected_shadow[n], step_norms[n]]
            if xbar is not None:
                vals.append(np.linalg.norm(trace.shadow[n] - xbar))
            fh.write(str(n) + "," + ",".join(_num(float(v)) for v in vals) + "\n")


def read_trace_csv(path) -> tuple[list[str], np.ndarray]:
    with open(path) as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    cols = lines[0].strip().split(",")
    data = np.array([[float(v) for v in ln.strip().split(",")] for ln in lines[1:]])
    return cols, data


def summarize(cfg: RunConfig, spec, ref, trace) -> dict:
    summary = {
        "scenario": cfg.scenario,
        "lambda": cfg.lam,
        "x0": list(map(float, spec.x0)),
        "params": dict(spec.params),
        "iterations": len(trace),
        "stop_reason": trace.stop_reason,
        "shadow_final": trace.shadow[-1].tolist(),
        "reflected_shadow_final": trace.reflected_shadow[-1].tolist(),
        "v_ref": ref.v.tolist(),
        "xbar_ref": None if ref.xbar is None else ref.xbar.tolist(),
        "reflected_shadow_limit_ref": (
            None if ref.reflected_shadow_limit is None else ref.reflected_shadow_limit.tolist()
        ),
        "consistent": ref.consistent,
    }
    if cfg.lam < 1.0 and len(trace) >= 20:
        est = estimate_displacement(trace)
        summary["v_est"] = est.v.tolist()
        summary["v_tail_residual"] = est.tail_residual
        summary["v_error"] = float(np.linalg.norm(est.v - ref.v))
    else:
        reason = "lambda=1" if cfg.lam >= 1.0 else "trace too short"
        summary["v_est"] = f"n/a ({reason})"
    if ref.xbar is not None:
        summary["shadow_error"] = float(np.linalg.norm(trace.shadow[-1] - ref.xbar))

    # the shifted iteration needs averagedness, so lambda=1 runs borrow lambda=1/2;
    # the closed-form v is used because Fix(v + T) is empty for any other shift
    lam_fix = cfg.lam if cfg.lam < 1.0 else 0.5
    try:
        sol = solve_shifted_fixed_point(
            spec.A, spec.B, lam_fix, ref.v, spec.x0, StopRule(max_iters=cfg.max_iters)
        )
    except NoConvergenceError as exc:
        summary["normal_solution"] = "not found (Z empty)"
        summary["normal_solution_detail"] = str(exc)
    else:
        summary["normal_solution"] = "found"
        summary["xbar_est"] = sol.xbar.tolist()
        summary["fixed_point"] = sol.y.tolist()
        summary["fixed_point_residual"] = sol.residual
        if ref.xbar is not None:
            summary["xbar_error"] = float(np.linalg.norm(sol.xbar - ref.xbar))
    return summary


def format_summary_text(summary: dict) -> str:
    lines = []
    for key, value in summary.items():
        if isinstance(value, dict):
            for k, v in value.items():
                lines.append(f"{key}.{k}={_num(v) if isinstance(v, float) else v}")
        elif isinstance(value, list):
            lines.append(f"{key}={_vec(value)}")
        elif isinstance(value, float):
            lines.append(f"{key}={_num(value)}")
        elif value is None:
            lines.append(f"{key}=n/a")
        else:
            lines.append(f"{key}={value}")
    return "\n".join(lines) + "\n"


def run(cfg: RunConfig) -> int:
    try:
        cfg.validate()
        spec, ref = build_scenario(cfg.scenario, cfg.lam, cfg.x0, cfg.overrides)
    except (ValueError, KeyError) as exc:
        msg = exc.args[0] if exc.args else str(exc)
        print(f"splitfix: configuration error: {msg}", file=sys.stderr)
        return EXIT_CONFIG

    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    try:
        trace = iterate(spec.split, spec.x0, StopRule(cfg.max_iters, cfg.shadow_tol))
        summary = summarize(cfg, spec, ref, trace)
    except (DivergenceError, FloatingPointError) as exc:
        print(f"splitfix: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC

    write_trace_csv(out / f"{cfg.scenario}_trace.csv", trace, ref.xbar, cfg.thin)
    if cfg.format == "json":
        text = json.dumps(summary, indent=2) + "\n"
        (out / f"{cfg.scenario}_summary.json").write_text(text)
    else:
        text = format_summary_text(summary)
        (out / f"{cfg.scenario}_summary.txt").write_text(text)
    if cfg.plot:
        emit_plot(trace, ref, out / f"{cfg.scenario}.svg", sets=spec.sets)
    sys.stdout.write(text)
    return EXIT_OK


def _parse_x0(text: str) -> tuple:
    try:
        vals = tuple(float(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"--x0 expects comma-separated numbers, got {text!r}")
    if not all(np.isfinite(vals)):
        raise argparse.ArgumentTypeError("--x0 entries must be finite")
    return vals


def _parse_set(text: str) -> tuple[str, float]:
    key, sep, value = text.partition("=")
    if not sep or not key:
        raise argparse.ArgumentTypeError(f"--set expects name=value, got {text!r}")
    try:
        return key.strip(), float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"--set value for {key!r} is not a number: {value!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="splitfix", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("run", help="run one scenario and write trace + summary")
    p.add_argument("--scenario", required=True, help=f"one of {sorted(SCENARIOS)}")
    p.add_argument("--lambda", dest="lam", type=float, default=0.5)
    p.add_argument("--x0", type=_parse_x0, default=(0.0, 0.0))
    p.add_argument("--iters", type=int, default=100_000)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--thin", type=int, default=1)
    p.add_argument("--out", default=os.environ.get("SPLITFIX_OUT_DIR", "."))
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--plot", action="store_true")
    p.add_argument("--set", dest="overrides", type=_parse_set, action="append", default=[])
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    cfg = RunConfig(
        scenario=args.scenario,
        lam=args.lam,
        x0=args.x0,
        max_iters=args.iters,
        shadow_tol=args.tol,
        out_dir=args.out,
        format=args.format,
        plot=args.plot,
        thin=args.thin,
        overrides=dict(args.overrides),
    )
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
