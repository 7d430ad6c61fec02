"""Command-line entry point: sample / umax / constants / verify / simulate / tailprobe.

Results go to stdout (JSON) or to files (CSV/JSON); logs go to stderr.  Every
flag can also come from a JSON config file (``--config``), with explicit
flags taking precedence.  Exit codes: 0 success, 1 validation error, 2
runtime error.  ``--threads`` affects speed only, never results.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import geometry, kernels, limits, montecarlo, sampler


class CliError(Exception):
    """A validation problem: bad flags, bad config, bad input values."""


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 by default; route through CliError instead
    # so every validation failure uniformly exits 1 with a one-line message.
    def error(self, message: str) -> None:  # type: ignore[override]
        raise CliError(f"{message} (see '{self.prog} --help')")


def _build_parser() -> _Parser:
    parser = _Parser(prog="betapoly", description=__doc__)
    parser.add_argument("--config", type=str, default=None, help="JSON config file")
    parser.add_argument(
        "--threads",
        type=int,
        default=None,
        help="worker processes for simulation (default: available parallelism)",
    )
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("sample", help="draw disk points and dump them to CSV")
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--count", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", type=str, default=None)

    p = sub.add_parser("umax", help="exact subset maximum for a point file")
    p.add_argument("--in", dest="in_path", type=str, default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--objective", type=str, default=None, choices=["perimeter", "area"])
    p.add_argument("--brute-force", dest="brute_force", action="store_true", default=None)

    p = sub.add_parser("constants", help="closed-form limit-law constants")
    p.add_argument("--objective", type=str, default=None, choices=["perimeter", "area"])
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--json", dest="as_json", action="store_true", default=None)

    p = sub.add_parser("verify", help="finite-difference check of a kernel's maximizer data")
    p.add_argument("--kernel", type=str, default=None, choices=["perimeter", "area"])
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--step", type=float, default=None, help="override all FD steps")
    p.add_argument("--json", dest="as_json", action="store_true", default=None)

    p = sub.add_parser("simulate", help="Monte Carlo of the scaled deficiency")
    p.add_argument("--objective", type=str, default=None, choices=["perimeter", "area"])
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--N", dest="N_list", type=str, default=None, help="comma-separated sizes")
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--delta", type=float, default=None, help="consistency cutoff (default 0.01)")
    p.add_argument("--out-dir", dest="out_dir", type=str, default=None)

    p = sub.add_parser("tailprobe", help="direct estimate of the near-maximum tail")
    p.add_argument("--objective", type=str, default=None, choices=["perimeter", "area"])
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--eps", type=str, default=None, help="comma-separated epsilons")
    p.add_argument("--draws", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out-dir", dest="out_dir", type=str, default=None)

    return parser


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise CliError(f"cannot read config file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise CliError(f"config file is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise CliError("config file must hold a JSON object")
    return cfg


def _merged(args: argparse.Namespace, cfg: dict, command: str, key: str, default=None):
    flag = getattr(args, key, None)
    if flag is not None:
        return flag
    section = cfg.get(command, {})
    if not isinstance(section, dict):
        raise CliError(f"config section {command!r} must be an object")
    if key in section:
        return section[key]
    return default


def _require(value, flag: str):
    if value is None:
        raise CliError(f"missing required flag {flag}")
    return value


def _parse_num_list(raw, flag: str, cast) -> tuple:
    if isinstance(raw, (list, tuple)):
        items = raw
    else:
        items = str(raw).split(",")
    try:
        return tuple(cast(str(x).strip()) for x in items if str(x).strip())
    except ValueError as exc:
        raise CliError(f"bad value for {flag}: {raw!r}") from exc


def _dump_json(obj: dict) -> None:
    json.dump(obj, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")


def _log(msg: str) -> None:
    print(msg, file=sys.stderr)


def _cmd_sample(args, cfg) -> int:
    beta = float(_require(_merged(args, cfg, "sample", "beta"), "--beta"))
    count = int(_require(_merged(args, cfg, "sample", "count"), "--count"))
    seed = int(_require(_merged(args, cfg, "sample", "seed"), "--seed"))
    out = _require(_merged(args, cfg, "sample", "out"), "--out")
    points = sampler.sample_batch(sampler.BetaParams(beta), count, sampler.SeedPolicy(seed))
    sampler.write_points_csv(out, points)
    _log(f"wrote {count} points to {out}")
    return 0


def _cmd_umax(args, cfg) -> int:
    in_path = _require(_merged(args, cfg, "umax", "in_path"), "--in")
    n = int(_require(_merged(args, cfg, "umax", "n"), "--n"))
    objective = geometry.Objective.parse(
        _require(_merged(args, cfg, "umax", "objective"), "--objective")
    )
    brute = bool(_merged(args, cfg, "umax", "brute_force", default=False))
    points = sampler.read_points_csv(in_path)
    fn = geometry.umax_bruteforce if brute else geometry.umax
    result = fn(points, n, objective)
    _dump_json(
        {
            "value": result.value,
            "vertex_indices": list(result.vertex_indices),
            "vertex_count": result.vertex_count,
        }
    )
    return 0


def _constants_payload(objective: geometry.Objective, n: int, beta: float) -> dict:
    law = limits.law_for(objective, n, beta)
    return {
        "M": law.M,
        "A": law.A,
        "B": law.B,
        "C": law.C,
        "K_n": limits.compute_K(n, beta),
        "I": kernels.analytic_I(objective, n, beta),
    }


def _cmd_constants(args, cfg) -> int:
    objective = geometry.Objective.parse(
        _require(_merged(args, cfg, "constants", "objective"), "--objective")
    )
    n = int(_require(_merged(args, cfg, "constants", "n"), "--n"))
    beta = float(_require(_merged(args, cfg, "constants", "beta"), "--beta"))
    payload = _constants_payload(objective, n, beta)
    if _merged(args, cfg, "constants", "as_json", default=False):
        _dump_json(payload)
    else:
        for key in ("M", "A", "B", "C", "K_n", "I"):
            print(f"{key} = {payload[key]:.12g}")
    return 0


def _cmd_verify(args, cfg) -> int:
    kind = _require(_merged(args, cfg, "verify", "kernel"), "--kernel")
    n = int(_require(_merged(args, cfg, "verify", "n"), "--n"))
    objective = geometry.Objective.parse(kind)
    spec = kernels.kernel_for(objective, n)
    step = _merged(args, cfg, "verify", "step")
    if step is not None:
        step = float(step)
        analysis = kernels.analyze_maximizer(
            spec, gradient_step=step, hessian_step=step, radial_step=step
        )
    else:
        analysis = kernels.analyze_maximizer(spec)
    payload = {
        "gradient_residual": float(np.max(np.abs(analysis.angular_gradient))),
        "det_negG": analysis.det_negG,
        "analytic_det": kernels.analytic_det_negG(objective, n),
        "radial_partials": [float(x) for x in analysis.radial_partials],
        "analytic_partials": kernels.analytic_radial_partial(objective, n),
        "A6_pass": analysis.a6_pass,
        "A7_pass": analysis.a7_pass,
    }
    if _merged(args, cfg, "verify", "as_json", default=False):
        _dump_json(payload)
    else:
        for key, val in payload.items():
            print(f"{key} = {val}")
    return 0


def _cmd_simulate(args, cfg, threads: int) -> int:
    objective = geometry.Objective.parse(
        _require(_merged(args, cfg, "simulate", "objective"), "--objective")
    )
    n = int(_require(_merged(args, cfg, "simulate", "n"), "--n"))
    beta = float(_require(_merged(args, cfg, "simulate", "beta"), "--beta"))
    N_list = _parse_num_list(_require(_merged(args, cfg, "simulate", "N_list"), "--N"), "--N", int)
    trials = int(_require(_merged(args, cfg, "simulate", "trials"), "--trials"))
    seed = int(_require(_merged(args, cfg, "simulate", "seed"), "--seed"))
    delta = float(_merged(args, cfg, "simulate", "delta", default=0.01))
    out_dir = Path(_require(_merged(args, cfg, "simulate", "out_dir"), "--out-dir"))

    config = montecarlo.SimConfig(
        objective=objective,
        n=n,
        beta=beta,
        N_list=N_list,
        trials=trials,
        master_seed=seed,
        consistency_delta=delta,
        out_dir=out_dir,
    )
    law = limits.law_for(objective, n, beta)
    out_dir.mkdir(parents=True, exist_ok=True)

    start = time.perf_counter()
    records = montecarlo.run_trials(config, threads=threads)
    elapsed = time.perf_counter() - start
    compute = sum(r.wall_time for r in records)
    _log(
        f"simulated {len(records)} trials in {elapsed:.1f}s wall "
        f"({compute:.1f}s of single-trial compute on {threads} worker(s))"
    )

    montecarlo.write_trials_csv(out_dir / "trials.csv", records)
    summary = montecarlo.build_summary(config, records, law)
    with open(out_dir / "summary.json", "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    largest = max(N_list)
    ecdf = montecarlo.EmpiricalCDF.from_samples([r.T for r in records if r.N == largest])
    montecarlo.write_ecdf_csv(out_dir / "ecdf.csv", ecdf, law)
    _log(f"wrote trials.csv, summary.json, ecdf.csv to {out_dir}")
    return 0


def _cmd_tailprobe(args, cfg) -> int:
    objective = geometry.Objective.parse(
        _require(_merged(args, cfg, "tailprobe", "objective"), "--objective")
    )
    n = int(_require(_merged(args, cfg, "tailprobe", "n"), "--n"))
    beta = float(_require(_merged(args, cfg, "tailprobe", "beta"), "--beta"))
    eps = _parse_num_list(_require(_merged(args, cfg, "tailprobe", "eps"), "--eps"), "--eps", float)
    draws = int(_require(_merged(args, cfg, "tailprobe", "draws"), "--draws"))
    seed = int(_require(_merged(args, cfg, "tailprobe", "seed"), "--seed"))
    out_dir = Path(_require(_merged(args, cfg, "tailprobe", "out_dir"), "--out-dir"))

    out_dir.mkdir(parents=True, exist_ok=True)
    start = time.perf_counter()
    result = montecarlo.tail_probe(objective, n, beta, eps, draws, seed)
    _log(f"tail probe finished in {time.perf_counter() - start:.1f}s")

    prefactor = montecarlo.tail_prefactor(objective, n, beta)
    C = limits.shape_C(n, beta)
    montecarlo.write_tail_csv(out_dir / "tail.csv", result, prefactor, C)
    summary = {
        "objective": objective.value,
        "n": n,
        "beta": beta,
        "draws_per_epsilon": result.draws_per_epsilon,
        "epsilon_grid": list(result.epsilon_grid),
        "hits": list(result.hits),
        "hit_probabilities": list(result.hit_probabilities),
        "fitted_slope": result.fitted_slope,
        "slope_stderr": result.slope_stderr,
        "fitted_log_prefactor": result.fitted_log_prefactor,
        "log_prefactor_stderr": result.log_prefactor_stderr,
        "predicted_slope": C,
        "predicted_log_prefactor": math.log(prefactor),
    }
    with open(out_dir / "tail_summary.json", "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    _log(f"wrote tail.csv, tail_summary.json to {out_dir}")
    return 0


def dispatch(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = _load_config(args.config)
        threads = args.threads if args.threads is not None else cfg.get("threads")
        threads = int(threads) if threads is not None else (os.cpu_count() or 1)
        if threads < 1:
            raise CliError(f"--threads must be >= 1, got {threads}")
        if args.command is None:
            raise CliError("no subcommand given; expected one of "
                           "sample, umax, constants, verify, simulate, tailprobe")
        if args.command == "sample":
            return _cmd_sample(args, cfg)
        if args.command == "umax":
            return _cmd_umax(args, cfg)
        if args.command == "constants":
            return _cmd_constants(args, cfg)
        if args.command == "verify":
            return _cmd_verify(args, cfg)
        if args.command == "simulate":
            return _cmd_simulate(args, cfg, threads)
        if args.command == "tailprobe":
            return _cmd_tailprobe(args, cfg)
        raise CliError(f"unknown subcommand {args.command!r}")
    except (CliError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # anything not a validation problem exits 2
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


def main(argv: list[str] | None = None) -> int:
    return dispatch(argv)


if __name__ == "__main__":
    sys.exit(main())
