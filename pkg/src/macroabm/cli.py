"""Command-line entry point.

    macroabm run --config configs/len.json --seed 7 --out runs/len
    macroabm metrics --run runs/len
    macroabm validate-config --config configs/covid.json
    macroabm golden-prompt --fixture configs/reference_prompt_fixture.json

Exit codes: 0 success, 1 configuration or usage error, 2 runtime abort.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from pathlib import Path

from macroabm.core import POLICY_NAMES, AgentState, ConfigError, SimConfig, TaxSchedule
from macroabm.llm.client import ChatError
from macroabm.llm.prompts import PromptError, build_decision_prompt
from macroabm.policies import EconObservation
from macroabm.records import read_months_csv
from macroabm.simulation import SimulationAbort, analyze, run_simulation, write_analysis

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad flags; we reserve 2 for runtime aborts
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(f"{self.prog}: error: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="macroabm", description="LLM-household macroeconomic simulator")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="simulate and write outputs")
    run.add_argument("--config", required=True)
    run.add_argument("--seed", type=int)
    run.add_argument("--policy", choices=POLICY_NAMES)
    run.add_argument("--months", type=int)
    run.add_argument("--out")

    metrics = sub.add_parser("metrics", help="recompute indicators and regressions of a finished run")
    metrics.add_argument("--run", required=True, dest="run_dir")

    check = sub.add_parser("validate-config", help="check a config file")
    check.add_argument("--config", required=True)

    prompt = sub.add_parser("golden-prompt", help="render a decision prompt from a fixture")
    prompt.add_argument("--fixture", required=True)
    return parser


def _load_config(args) -> SimConfig:
    config = SimConfig.from_json(args.config)
    changes = {}
    if getattr(args, "seed", None) is not None:
        changes["seed"] = args.seed
    if getattr(args, "months", None) is not None:
        changes["num_months"] = args.months
    if getattr(args, "policy", None) is not None:
        changes["policy"] = dataclasses.replace(config.policy, name=args.policy)
    if getattr(args, "out", None) is not None:
        changes["output_dir"] = args.out
    return config.replace(**changes).validate() if changes else config


def cmd_run(args) -> int:
    config = _load_config(args)
    out = config.output_dir or f"runs/{config.policy.name.lower()}-seed{config.seed}"
    result = run_simulation(config, output_dir=out)
    years = result.years
    print(f"wrote {out}: {len(result.months)} months, {len(years)} years")
    if years:
        mean_u = sum(y.unemployment for y in years) / len(years)
        print(f"mean unemployment {mean_u:.4f}, final price {result.months[-1].price:.4f}")
    return EXIT_OK


def cmd_metrics(args) -> int:
    run_dir = Path(args.run_dir)
    manifest_path = run_dir / "manifest.json"
    if not manifest_path.exists() or not (run_dir / "months.csv").exists():
        raise ConfigError(f"run: {run_dir} has no manifest.json/months.csv")
    manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    months = read_months_csv(run_dir / "months.csv")
    analysis = analyze(months, manifest["num_agents"], manifest["initial_price"], manifest["initial_mean_wage"])
    written = write_analysis(run_dir, analysis)
    print(f"rewrote {', '.join(written)} in {run_dir}")
    return EXIT_OK


def cmd_validate(args) -> int:
    config = SimConfig.from_json(args.config)
    print(f"ok: {args.config} (policy {config.policy.name}, {config.num_agents} agents, {config.num_months} months)")
    return EXIT_OK


def load_prompt_fixture(path: str | Path) -> tuple[AgentState, EconObservation]:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
        agent = AgentState(**raw["agent"])
        obs = dict(raw["observation"])
        obs["date"] = tuple(obs.get("date", (2001, 1)))
        obs["interventions"] = tuple(obs.get("interventions", ()))
        if "tax_schedule" in obs:
            obs["tax_schedule"] = TaxSchedule(**{k: tuple(v) for k, v in obs["tax_schedule"].items()})
        return agent, EconObservation(**obs)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise ConfigError(f"fixture: {exc}") from exc


def cmd_golden_prompt(args) -> int:
    agent, obs = load_prompt_fixture(args.fixture)
    print(build_decision_prompt(agent, obs))
    return EXIT_OK


COMMANDS = {"run": cmd_run, "metrics": cmd_metrics, "validate-config": cmd_validate, "golden-prompt": cmd_golden_prompt}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_CONFIG
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, PromptError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SimulationAbort, ChatError) as exc:
        print(f"run aborted: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
