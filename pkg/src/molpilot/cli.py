"""Command-line interface: run, bench, eval, report.

Exit codes for ``run``: 0 success, 2 budget exhausted, 1 error or bad
usage.  Bearer tokens are read from the environment variable named by
--token-env and are never echoed or logged.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .agent.llm import LlmConfig
from .bench import (
    aggregate,
    outcome_from_log,
    render_matrix,
    render_report,
    transition_matrix,
)
from .chem.smiles import SmilesError, parse_smiles
from .config import ConfigError, load_target_config
from .docking import AdapterConfig
from .optimize import GAConfig
from .runlog import RunLog
from .runner import RunConfig, build_evaluator, derive_requirements, run_target
from .scoring.metrics import DiversityUndefined, diversity, is_high_quality


def _add_run_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--policy", choices=("llm", "fallback"), default="fallback")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--budget", type=int, default=10)
    parser.add_argument("--docker", choices=("surrogate", "external"),
                        default="surrogate")
    parser.add_argument("--generator", choices=("builtin", "external"),
                        default="builtin")
    parser.add_argument("--count", type=int, default=100,
                        help="molecules per generate action")
    parser.add_argument("--ga-population", type=int, default=100)
    parser.add_argument("--ga-generations", type=int, default=50)
    parser.add_argument("--docker-cmd", default=None,
                        help="external docking command template "
                             "({ligand} {pocket} {out})")
    parser.add_argument("--docker-pattern", default=r"Affinity:\s*(-?\d+(?:\.\d+)?)")
    parser.add_argument("--generator-cmd", default=None,
                        help="external generator command template "
                             "({pocket} {count} {out})")
    parser.add_argument("--llm-endpoint", default=None)
    parser.add_argument("--llm-model", default="default")
    parser.add_argument("--token-env", default="MOLPILOT_LLM_TOKEN")
    parser.add_argument("--out-dir", default="runs")


def _run_config(args: argparse.Namespace) -> RunConfig:
    docking_adapter = None
    if args.docker == "external":
        if not args.docker_cmd:
            raise ValueError("--docker external requires --docker-cmd")
        docking_adapter = AdapterConfig(command_template=args.docker_cmd,
                                        affinity_pattern=args.docker_pattern)
    generator_adapter = None
    if args.generator == "external":
        if not args.generator_cmd:
            raise ValueError("--generator external requires --generator-cmd")
        generator_adapter = AdapterConfig(command_template=args.generator_cmd)
    llm = None
    if args.policy == "llm":
        if not args.llm_endpoint:
            raise ValueError("--policy llm requires --llm-endpoint")
        llm = LlmConfig(endpoint=args.llm_endpoint, model=args.llm_model,
                        token_env=args.token_env)
    return RunConfig(
        policy=args.policy, seed=args.seed, budget=args.budget,
        docker=args.docker, generator=args.generator,
        generation_count=args.count,
        ga=GAConfig(population_size=args.ga_population,
                    generations=args.ga_generations),
        docking_adapter=docking_adapter, generator_adapter=generator_adapter,
        llm=llm)


def cmd_run(args: argparse.Namespace) -> int:
    try:
        target = load_target_config(args.config)
        cfg = _run_config(args)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    run_id = f"{target.name}-seed{cfg.seed}"
    result = run_target(target, cfg, run_id=run_id)
    log_path = out_dir / f"{run_id}.ndjson"
    log_path.write_text(result.log.to_ndjson())
    report = render_report(target.name, result.log)
    report_path = out_dir / f"{run_id}.report.txt"
    report_path.write_text(report)
    print(report)
    print(f"run log: {log_path}")
    if result.outcome == "success":
        return 0
    if result.outcome == "budget_exhausted":
        return 2
    return 1


def cmd_bench(args: argparse.Namespace) -> int:
    config_dir = Path(args.configs)
    paths = sorted(config_dir.glob("*.json"))
    if not paths:
        print(f"error: no target configs found in {config_dir}", file=sys.stderr)
        return 1
    try:
        cfg = _run_config(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    def one(path: Path):
        try:
            target = load_target_config(path)
        except ConfigError as exc:
            return path.stem, None, str(exc)
        result = run_target(target, cfg, run_id=f"{target.name}-seed{cfg.seed}")
        (out_dir / f"{target.name}-seed{cfg.seed}.ndjson").write_text(
            result.log.to_ndjson())
        return target.name, result, None

    results = []
    if args.parallel > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=args.parallel) as pool:
            results = list(pool.map(one, paths))
    else:
        results = [one(path) for path in paths]

    outcomes = []
    dvs_values: dict[str, float] = {}
    logs = []
    for name, result, error in results:
        if error is not None:
            print(f"target {name}: config error, counted as failure ({error})",
                  file=sys.stderr)
            continue
        outcomes.append(outcome_from_log(name, result.log))
        logs.append(result.log)
        pool_entries = result.memory.entries(result.pool_ids) if result.pool_ids else []
        if len(pool_entries) >= 2:
            dvs_values[name] = diversity([e.fingerprint for e in pool_entries])
    if not outcomes:
        print("error: every target failed to load", file=sys.stderr)
        return 1
    agg = aggregate(outcomes, dvs_values)
    print(f"targets: {len(outcomes)}")
    print(f"TSR: {agg.tsr:.1f}%")
    print(f"mean HQ fraction: {agg.mean_hq_fraction:.3f}")
    for prop, frac in agg.property_pass_fractions.items():
        print(f"mean {prop} pass fraction: {frac:.3f}")
    print(f"DVS pass rate: {agg.dvs_pass_rate:.1f}%")
    print(render_matrix(transition_matrix(logs)))
    summary = {
        "tsr": agg.tsr,
        "mean_hq_fraction": agg.mean_hq_fraction,
        "property_pass_fractions": agg.property_pass_fractions,
        "dvs_pass_rate": agg.dvs_pass_rate,
        "per_target": agg.per_target,
    }
    (out_dir / "bench_summary.json").write_text(json.dumps(summary, indent=2))
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    try:
        target = load_target_config(args.target)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    cfg = RunConfig()
    evaluator = build_evaluator(target, cfg)
    requirements = derive_requirements(target, evaluator, cfg)
    rows = []
    fps = []
    text = Path(args.smiles_file).read_text() if args.smiles_file != "-" else sys.stdin.read()
    for lineno, line in enumerate(text.splitlines(), start=1):
        smi = line.split("\t")[0].strip()
        if not smi:
            continue
        try:
            graph = parse_smiles(smi)
        except SmilesError as exc:
            print(f"line {lineno}: skipped ({exc})", file=sys.stderr)
            continue
        profile = evaluator.profile(graph)
        fps.append(evaluator.fingerprint(graph))
        rows.append((smi, profile))
    print("SMILES,QED,SAScore,Lipinski,Novelty,Vina Score,HQ")
    for smi, p in rows:
        hq = is_high_quality(p, requirements.thresholds)
        print(f"{smi},{p.qed:.4f},{p.sas:.4f},{p.lrf},{p.nvt:.4f},{p.vna:.4f},"
              f"{'yes' if hq else 'no'}")
    try:
        print(f"# DVS: {diversity(fps):.4f}")
    except DiversityUndefined:
        print("# DVS: undefined (fewer than 2 molecules)")
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    logs = []
    for path in args.logs:
        try:
            logs.append(RunLog.from_ndjson(Path(path).read_text()))
        except Exception as exc:
            print(f"error: cannot read log {path}: {exc}", file=sys.stderr)
            return 1
    for path, log in zip(args.logs, logs):
        print(render_report(Path(path).stem, log))
    if logs:
        print(render_matrix(transition_matrix(logs)))
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="molpilot",
        description="Autonomous generate/optimize/screen loop for "
                    "pocket-targeted molecule discovery.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run the agent on one target config")
    p_run.add_argument("config")
    _add_run_flags(p_run)
    p_run.set_defaults(func=cmd_run)

    p_bench = sub.add_parser("bench", help="run every target config in a directory")
    p_bench.add_argument("configs")
    p_bench.add_argument("--parallel", type=int, default=1)
    _add_run_flags(p_bench)
    p_bench.set_defaults(func=cmd_bench)

    p_eval = sub.add_parser("eval", help="score a SMILES file against a target")
    p_eval.add_argument("smiles_file")
    p_eval.add_argument("--target", required=True)
    p_eval.set_defaults(func=cmd_eval)

    p_report = sub.add_parser("report", help="render reports from stored run logs")
    p_report.add_argument("logs", nargs="+")
    p_report.set_defaults(func=cmd_report)

    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
