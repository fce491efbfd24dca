"""Command line entry point: ``emhroute run | oracle | validate | example-config``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import checks, reporting
from .channel import check_reachability
from .config import ConfigError, ExperimentConfig, office_config_text, load_config
from .learner import run_experiment
from .metrics import compare
from .model import DeploymentError, load_deployment
from .oracle import rank_routings
from .routing_space import DEFAULT_ENUMERATION_LIMIT, SpaceTooLarge

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_BAD_INPUT = 2


def _run_one(job):
    cfg, policy, seed = job
    return policy, seed, run_experiment(
        cfg.deployment,
        policy,
        cfg.iterations,
        cfg.K,
        seed,
        epsilon0=cfg.epsilon0,
        payoff_mode=cfg.payoff_mode,
        association=cfg.association_cost,
        keep_cycles=cfg.verbose_cycles,
    )


def _check_deployment(cfg: ExperimentConfig) -> None:
    problems = cfg.deployment.problems()
    if problems:
        raise DeploymentError("; ".join(problems))
    check_reachability(cfg.deployment)


def cmd_run(cfg: ExperimentConfig, out: Path) -> int:
    _check_deployment(cfg)
    jobs = [(cfg, p, s) for s in cfg.seeds for p in cfg.policies]
    if cfg.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(_run_one, jobs))
    else:
        results = [_run_one(j) for j in jobs]
    traces = {(p, s): tr for p, s, tr in results}

    out.mkdir(parents=True, exist_ok=True)
    comparisons = {}
    for (policy, seed), tr in traces.items():
        reporting.write_trace(tr, out / f"trace_{policy.lower()}_seed{seed}.csv")
        if cfg.verbose_cycles:
            reporting.write_cycle_dump(tr, out / f"cycles_{policy.lower()}_seed{seed}.csv")
    for seed in cfg.seeds:
        if ("SH", seed) in traces and ("EMH", seed) in traces:
            c = compare(traces["SH", seed], traces["EMH", seed])
            comparisons[seed] = c
            reporting.write_comparison(c, out / f"comparison_seed{seed}.csv")
            print(
                f"seed={seed} T={cfg.iterations} rho({cfg.iterations})={c.rho[-1]:.4f} "
                f"E_sh={c.E_sh[-1]:.6g} J E_emh={c.E_emh[-1]:.6g} J"
            )
        else:
            for p in cfg.policies:
                tr = traces[p, seed]
                print(f"seed={seed} policy={p} T={len(tr)} mean e_b={tr.e_b.mean():.6g} J")

    if cfg.plots and comparisons:
        from . import plotting

        for seed, c in comparisons.items():
            plotting.plot_bottleneck(c, out / f"bottleneck_seed{seed}.png")
            plotting.plot_saving_ratio(c, out / f"saving_ratio_seed{seed}.png")
        if len(comparisons) > 1:
            plotting.plot_saving_ratio_bundle(comparisons, out / "saving_ratio_all_seeds.png")
    return EXIT_OK


def cmd_oracle(cfg: ExperimentConfig, limit: int, out: Path | None) -> int:
    _check_deployment(cfg)
    try:
        ranked = rank_routings(cfg.deployment, limit, cfg.K)
    except SpaceTooLarge as exc:
        print(
            f"refusing: constrained space has {exc.cardinality} routings, "
            f"enumeration limit is {exc.limit} (raise --limit)",
            file=sys.stderr,
        )
        return EXIT_FAILED
    rows = reporting.oracle_rows(ranked)
    print(",".join(reporting.ORACLE_HEADER))
    for row in rows:
        print(",".join(row))
    if out is not None:
        reporting.write_csv_atomic(out, reporting.ORACLE_HEADER, rows)
    return EXIT_OK


def cmd_validate(config_path: str | None) -> int:
    d = load_deployment(config_path) if config_path else None
    results = checks.run_checks(d)
    for name, ok, detail in results:
        print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    return EXIT_OK if all(ok for _, ok, _ in results) else EXIT_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="emhroute", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run seeded SH/EMH experiments and write CSVs and figures")
    run.add_argument("--config", required=True)
    run.add_argument("--out", help="output directory (default: experiment.output_dir)")
    run.add_argument("--workers", type=int)
    run.add_argument("--seeds", type=int, nargs="+")
    run.add_argument("--iterations", "-T", type=int)
    run.add_argument("--cycles", "-K", type=int)
    run.add_argument("--policies", nargs="+", choices=["SH", "EMH"])
    run.add_argument("--verbose-cycles", action="store_true", help="also dump per-cycle CSVs")
    run.add_argument("--freeze-payoffs", action="store_true", help="never refresh payoffs on exploit")
    run.add_argument("--no-association", action="store_true", help="do not charge association energy")
    run.add_argument("--no-plots", action="store_true")

    orc = sub.add_parser("oracle", help="measure every constrained routing (deterministic channel)")
    orc.add_argument("--config", required=True)
    orc.add_argument("--limit", type=int, default=DEFAULT_ENUMERATION_LIMIT)
    orc.add_argument("--out", help="also write the ranked table as CSV")

    val = sub.add_parser("validate", help="run the built-in invariant checks")
    val.add_argument("--config", help="additionally check this deployment's energy invariants")

    sub.add_parser("example-config", help="print the packaged nine-station office config")
    return parser


def _apply_overrides(cfg: ExperimentConfig, args) -> ExperimentConfig:
    changes = {
        "workers": args.workers,
        "seeds": args.seeds,
        "iterations": args.iterations,
        "cycles": args.cycles,
        "policies": args.policies,
    }
    data = {k: v for k, v in vars(cfg).items()}
    data.update({k: v for k, v in changes.items() if v is not None})
    if args.verbose_cycles:
        data["verbose_cycles"] = True
    if args.freeze_payoffs:
        data["payoff_mode"] = "freeze"
    if args.no_association:
        data["association_cost"] = False
    if args.no_plots:
        data["plots"] = False
    return ExperimentConfig(**data)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        if args.command == "example-config":
            sys.stdout.write(office_config_text())
            return EXIT_OK
        if args.command == "validate":
            return cmd_validate(args.config)
        cfg = load_config(args.config)
        if args.command == "run":
            cfg = _apply_overrides(cfg, args)
            out = Path(args.out or cfg.output_dir)
            return cmd_run(cfg, out)
        return cmd_oracle(cfg, args.limit, Path(args.out) if args.out else None)
    except (ConfigError, DeploymentError, json.JSONDecodeError, TypeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
