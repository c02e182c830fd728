"""Command-line front end: ``glimm-wedge {riemann,run,study,probe}``.

Exit codes: 0 on success, 1 for malformed flags or configuration, 2 for
numerical failures (vacuum, sonic defect, CFL violation, non-convergence).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path
from typing import Sequence

from .diagnostics import check_f_monotone, fit_l1_constant, functional_report
from .errors import ConfigError, GlimmWedgeError
from .glimm import profile_from_dict, run, wave_log
from .interactions import CASES, ProbeSampler, interaction_probe
from .io import (
    SOLUTION_COLUMNS,
    WAVE_COLUMNS,
    RunConfig,
    read_json,
    run_tag,
    solution_rows,
    write_csv,
    write_json,
)
from .params import GasParams
from .riemann import solve_boundary, solve_interior
from .similarity import StudyConfig, similarity_study
from .state import FlowState

log = logging.getLogger("glimm_wedge")


class _Parser(argparse.ArgumentParser):
    """Argument parser whose usage errors exit with code 1."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _state(text: str) -> FlowState:
    try:
        rho, v = (float(t) for t in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected 'rho,v', got {text!r}") from exc
    return FlowState(rho, v)


# ---------------------------------------------------------------------------
# shared helpers
# ---------------------------------------------------------------------------


def _params_from_flags(args: argparse.Namespace, defaults: dict) -> GasParams:
    """Model constants from ``--config`` (if given), overridden by explicit flags."""
    data = dict(defaults)
    if args.config:
        data.update(read_json(args.config))
    for key in ("gamma", "a_inf", "tau", "b0"):
        value = getattr(args, key, None)
        if value is not None:
            data[key] = value
    return GasParams.from_dict(data)


def _out_dir(path: str | None) -> Path | None:
    if path is None:
        return None
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _wave_json(w) -> dict:
    return {"kind": w.kind.value, "strength": w.strength, "speed_lo": w.speed_lo, "speed_hi": w.speed_hi}


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_riemann(args: argparse.Namespace) -> int:
    """Solve one interior or boundary Riemann problem and print the fan."""
    p = _params_from_flags(args, {"gamma": 1.4, "a_inf": 1.0, "tau": 0.0, "b0": -0.5})
    if args.boundary:
        fan = solve_boundary(args.left, p)
        result = {
            "mode": "boundary",
            "params": p.to_dict(),
            "left": list(fan.left),
            "top": list(fan.top),
            "z2": fan.z2,
            "waves": [_wave_json(w) for w in fan.waves],
        }
    else:
        if args.right is None:
            raise ConfigError("--right is required unless --boundary is given")
        fan = solve_interior(args.left, args.right, p)
        result = {
            "mode": "interior",
            "params": p.to_dict(),
            "left": list(fan.left),
            "middle": list(fan.middle),
            "right": list(fan.right),
            "z": list(fan.z),
            "waves": [_wave_json(w) for w in fan.waves],
        }
    text = json.dumps(result, sort_keys=True, indent=2)
    print(text)
    out = _out_dir(args.out)
    if out is not None:
        (out / "riemann.json").write_text(text + "\n", encoding="utf-8")
    return 0


def cmd_run(args: argparse.Namespace) -> int:
    """Run the scheme from a config file and export states, waves and diagnostics."""
    if not args.config:
        raise ConfigError("run needs --config")
    cfg = RunConfig.from_dict(read_json(args.config), seed=args.seed)
    out = _out_dir(args.out) or Path(".")
    profile = profile_from_dict(cfg.profile)
    log.info("running %d columns, %d cells per column", cfg.mesh.k_max, cfg.mesh.y_depth)
    sol = run(cfg.params, cfg.mesh, cfg.theta(), profile)
    report = functional_report(sol, cfg.weights)
    mono = check_f_monotone(report)
    if report.entries and not mono.hypothesis_ok:
        log.warning("smallness (gamma - 1 + tau^2) F(0) = %.4g exceeds 0.05", mono.smallness)
    fit = fit_l1_constant(sol)

    manifest = cfg.manifest()
    tag = run_tag(cfg.params.gamma, cfg.params.a_inf, cfg.params.tau, cfg.seed, cfg.mesh.dx)
    write_json(out / f"manifest_{tag}.json", manifest)
    write_csv(out / f"solution_{tag}.csv", SOLUTION_COLUMNS, solution_rows(sol))
    write_csv(out / f"waves_{tag}.csv", WAVE_COLUMNS, wave_log(sol))
    columns = ("k", "L1", "L2", "L", "Q", "F", "tv", "sup")
    write_csv(out / f"functional_{tag}.csv", columns, report.rows())
    f = report.F
    summary = {
        "manifest": manifest,
        "columns": int(sol.rho.shape[0]),
        "F_initial": float(f[0]) if f.size else None,
        "F_final": float(f[-1]) if f.size else None,
        "F_violations": len(mono.violations),
        "F_worst_increase": mono.worst_increase,
        "smallness": mono.smallness,
        "smallness_ok": mono.hypothesis_ok,
        "l1_constant": fit.constant,
        "bottom_clean": sol.bottom_clean,
        "lost_waves": sol.lost_waves,
    }
    write_json(out / f"report_{tag}.json", summary, manifest)
    if args.plot:
        from .plotting import plot_density, plot_functional

        plot_density(sol, out / f"density_{tag}.png")
        plot_functional(report, out / f"functional_{tag}.png")
    print(f"wrote {out}/*_{tag}.*  F: {summary['F_initial']} -> {summary['F_final']}  violations: {len(mono.violations)}")
    return 0


def cmd_study(args: argparse.Namespace) -> int:
    """Run a slenderness family and export distances, uniformity and the two-Mach demo."""
    data = read_json(args.config) if args.config else {}
    if args.seed is not None:
        data["seed"] = args.seed
    config = StudyConfig.from_dict(data)
    out = _out_dir(args.out) or Path(".")
    report = similarity_study(config, threads=args.threads, progress=log.info)
    manifest = {"study": config.to_dict(), "mesh": report.mesh.to_dict()}
    tag = run_tag(config.gamma, config.a_inf, config.taus, config.seed, report.mesh.dx)
    write_json(out / f"study_{tag}.json", report.to_dict(), manifest)
    write_csv(out / f"distances_{tag}.csv", ("tau", "distance"), report.distances)
    write_csv(out / f"uniformity_{tag}.csv", ("tau", "tv_sup", "sup_norm"), report.uniformity)
    demo_cols = ("mach_inf", "theta_wedge", "K", "tau", "sigma_exact", "shock_angle", "angle_over_theta")
    write_csv(out / f"demo_{tag}.csv", demo_cols, report.demo)
    if args.plot:
        from .plotting import plot_distances

        plot_distances(report.distances, out / f"distances_{tag}.png")
    for row in report.distances:
        print(f"tau = {row['tau']:<8g} distance = {row['distance']:.6e}")
    print(f"monotone: {report.monotone}  final/first: {report.final_ratio:.4g}")
    return 0


def _probe_one(job) -> dict:
    case_id, params, seed, n = job
    rep = interaction_probe(case_id, ProbeSampler(seed=seed), params, n)
    return rep.summary()


def cmd_probe(args: argparse.Namespace) -> int:
    """Sample interaction configurations and report the fitted constants per case."""
    case_ids = args.case or sorted(CASES)
    for cid in case_ids:
        if cid not in CASES:
            raise ConfigError(f"unknown probe case {cid!r}; expected one of {sorted(CASES)}")
    if args.samples < 0:
        raise ConfigError("--samples must be nonnegative")
    p = _params_from_flags(args, {"gamma": 1.05, "a_inf": 1.0, "tau": 0.0, "b0": -0.5})
    seed = 0 if args.seed is None else args.seed
    jobs = []
    for cid in case_ids:
        q = p
        if CASES[cid].tau0_only and p.tau != 0.0:
            log.warning("%s is defined at tau = 0 only; probing with tau = 0", cid)
            q = replace(p, tau=0.0)
        jobs.append((cid, q, seed, args.samples))
    if args.threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.threads) as pool:
            rows = list(pool.map(_probe_one, jobs))
    else:
        rows = [_probe_one(job) for job in jobs]
    manifest = {"cases": case_ids, "params": p.to_dict(), "seed": seed, "samples": args.samples}
    payload = {"manifest": manifest, "cases": rows}
    out = _out_dir(args.out)
    if out is not None:
        tag = run_tag(p.gamma, p.a_inf, p.tau, seed, 0.0)
        write_json(out / f"probe_{tag}.json", payload, manifest)
        cols = ("case", "gamma", "tau", "statistic", "requested", "used", "fitted", "one_sided", "min", "max", "n_exact")
        write_csv(out / f"probe_{tag}.csv", cols, rows)
    for row in rows:
        print(
            f"{row['case']:<8} {row['statistic']:<12} used {row['used']:>6}/{row['requested']:<6} "
            f"fitted {row['fitted']:.6g}  min {row['min']}  max {row['max']}"
            + (f"  exact {row['n_exact']}" if row["n_exact"] is not None else "")
        )
    return 0


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="glimm-wedge", description="Glimm scheme for supersonic flow past a slender wedge.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress")
    sub = parser.add_subparsers(dest="command", required=True)

    def model_flags(sp: argparse.ArgumentParser) -> None:
        sp.add_argument("--config", help="JSON file with gamma, a_inf, tau, b0")
        sp.add_argument("--gamma", type=float)
        sp.add_argument("--a-inf", dest="a_inf", type=float)
        sp.add_argument("--tau", type=float)
        sp.add_argument("--b0", type=float)
        sp.add_argument("--out", help="output directory")

    sp = sub.add_parser("riemann", help="solve one Riemann problem")
    model_flags(sp)
    sp.add_argument("--left", type=_state, required=True, metavar="RHO,V")
    sp.add_argument("--right", type=_state, metavar="RHO,V")
    sp.add_argument("--boundary", action="store_true", help="solve the wall problem for --left")
    sp.set_defaults(func=cmd_riemann)

    sp = sub.add_parser("run", help="run the scheme from a config file")
    sp.add_argument("--config", help="run config (JSON)")
    sp.add_argument("--out", help="output directory")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--threads", type=int, default=1, help="accepted for symmetry; a run is sequential")
    sp.add_argument("--plot", action="store_true", help="also write PNG figures")
    sp.set_defaults(func=cmd_run)

    sp = sub.add_parser("study", help="slenderness family against the tau = 0 limit")
    sp.add_argument("--config", help="study config (JSON); defaults apply when omitted")
    sp.add_argument("--out", help="output directory")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--threads", type=int, default=1)
    sp.add_argument("--plot", action="store_true", help="also write PNG figures")
    sp.set_defaults(func=cmd_study)

    sp = sub.add_parser("probe", help="sample wave-interaction estimates")
    model_flags(sp)
    sp.add_argument("--case", action="append", help="case id (repeatable); all cases when omitted")
    sp.add_argument("--samples", type=int, default=1000)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--threads", type=int, default=1)
    sp.set_defaults(func=cmd_probe)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if getattr(args, "threads", 1) < 1:
        parser.error("--threads must be at least 1")
    try:
        return args.func(args)
    except GlimmWedgeError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except (ArithmeticError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
