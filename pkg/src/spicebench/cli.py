"""The ``spicebench`` command.

Subcommands mirror the library surface: ``parse``, ``lint``, ``classify``,
``simulate``, ``bench run``, ``bench score``, ``dataset export``. Structured
results (JSON/CSV) go to stdout and diagnostics to stderr; nothing is ever
colorized, so NO_COLOR needs no special handling. Exit codes: 0 success,
1 domain failure (parse error, invalid lint, non-convergence), 2 usage or
configuration error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .errors import SpicebenchError
from .harness import (
    DatasetStore,
    HttpProvider,
    ReplayProvider,
    default_prompt_template,
    default_suite_path,
    load_run_records,
    load_tasks,
    run_benchmark,
    score,
)
from .lint import TaskRequirements, lint
from .metrics import compute_metrics
from .netlist import flatten, parse_netlist, serialize
from .sim import SimOptions, dc_operating_point, dc_sweep, effective_temperature, transient


class ConfigError(SpicebenchError):
    """Bad configuration or usage; maps to exit code 2."""


@dataclass
class CliConfig:
    provider: dict = field(default_factory=dict)
    bench: dict = field(default_factory=dict)
    sim: dict = field(default_factory=dict)
    paths: dict = field(default_factory=dict)
    base_dir: Path = Path(".")

    @staticmethod
    def load(path: str | Path) -> "CliConfig":
        path = Path(path)
        try:
            blob = json.loads(path.read_text())
        except (OSError, json.JSONDecodeError) as err:
            raise ConfigError(f"cannot read config {path}: {err}") from err
        if not isinstance(blob, dict):
            raise ConfigError(f"config {path} must be a JSON object")
        return CliConfig(
            provider=blob.get("provider", {}),
            bench=blob.get("bench", {}),
            sim=blob.get("sim", {}),
            paths=blob.get("paths", {}),
            base_dir=path.parent,
        )

    def resolve(self, key: str, default: str | None = None) -> Path | None:
        raw = self.paths.get(key, default)
        if raw is None:
            return None
        p = Path(raw)
        return p if p.is_absolute() else self.base_dir / p

    def sim_options(self) -> SimOptions:
        known = {"abstol", "reltol", "vntol", "gmin", "max_newton_iter", "temp_celsius"}
        overrides = {k: v for k, v in self.sim.items() if k in known}
        return SimOptions(**overrides)


def _read_netlist(path: str):
    try:
        text = Path(path).read_text(errors="replace")
    except OSError as err:
        raise SpicebenchError(f"cannot read {path}: {err}") from err
    return parse_netlist(text)


def _requirements_from_args(args) -> TaskRequirements:
    if args.task:
        if "#" not in args.task:
            raise ConfigError("--task expects suite.json#<task-id>")
        suite_path, _, raw_id = args.task.partition("#")
        try:
            task_id = int(raw_id)
        except ValueError:
            raise ConfigError(f"bad task id {raw_id!r}") from None
        from .harness.tasks import load_task

        return load_task(suite_path, task_id).requirements
    if args.requirements:
        blob = json.loads(Path(args.requirements).read_text())
        return TaskRequirements(
            required_analyses=frozenset(blob.get("analyses", [])),
            supply_rail=float(blob["rail"]),
            input_nodes=tuple(blob.get("inputs", [])),
            output_nodes=tuple(blob.get("outputs", [])),
            requires_temp=bool(blob.get("requires_temp", False)),
        )
    raise ConfigError("one of --task or --requirements is required")


def cmd_parse(args) -> int:
    netlist = _read_netlist(args.file)
    sys.stdout.write(serialize(netlist))
    return 0


def cmd_lint(args) -> int:
    requirements = _requirements_from_args(args)
    netlist = flatten(_read_netlist(args.file))
    report = lint(netlist, requirements)
    sys.stdout.write(json.dumps(report.to_dict(), indent=2) + "\n")
    return 0 if report.valid else 1


def cmd_classify(args) -> int:
    netlist = flatten(_read_netlist(args.file))
    sys.stdout.write(json.dumps(compute_metrics(netlist).to_dict(), indent=2) + "\n")
    return 0


def cmd_simulate(args) -> int:
    netlist = flatten(_read_netlist(args.file))
    options = SimOptions()
    if args.op:
        solution = dc_operating_point(netlist, options)
        blob = {
            "analysis": "op",
            "node_voltages": {k: solution.node_voltages[k] for k in sorted(solution.node_voltages)},
            "source_currents": {k: solution.source_currents[k] for k in sorted(solution.source_currents)},
            "iterations": solution.iterations_used,
            "temperature_c": effective_temperature(netlist, options),
        }
        sys.stdout.write(json.dumps(blob, indent=2) + "\n")
        return 0
    if args.dc:
        source, start, stop, step = args.dc
        sweep = dc_sweep(netlist, source, float(start), float(stop), float(step), options)
        nodes = sorted(sweep.solutions[0].node_voltages) if sweep.solutions else []
        blob = {
            "analysis": "dc",
            "source": sweep.source,
            "values": sweep.values,
            "node_voltages": {n: sweep.voltages(n) for n in nodes},
        }
        sys.stdout.write(json.dumps(blob, indent=2) + "\n")
        return 0
    if args.tran:
        tstep, tstop = (float(x) for x in args.tran)
        trace = transient(netlist, tstep, tstop, options)
        if args.csv:
            trace.to_csv(args.csv)
            blob = {
                "analysis": "tran",
                "csv": str(args.csv),
                "samples": len(trace.times),
                "nodes": sorted(trace.voltages),
            }
            sys.stdout.write(json.dumps(blob, indent=2) + "\n")
        else:
            import io

            buffer = io.StringIO()
            names = sorted(trace.voltages)
            buffer.write("time," + ",".join(names) + "\n")
            for i, t in enumerate(trace.times):
                row = [f"{t:.9e}"] + [f"{trace.voltages[n][i]:.9e}" for n in names]
                buffer.write(",".join(row) + "\n")
            sys.stdout.write(buffer.getvalue())
        return 0
    raise ConfigError("one of --op, --dc, or --tran is required")


def _build_provider(kind: str, config: CliConfig):
    if kind == "replay":
        replay_dir = config.resolve("replay")
        if replay_dir is None:
            raise ConfigError("replay provider needs paths.replay in the config")
        return ReplayProvider(replay_dir)
    if kind == "live":
        p = config.provider
        for required in ("endpoint", "model"):
            if required not in p:
                raise ConfigError(f"provider config needs {required!r}")
        api_key = None
        key_env = p.get("api_key_env")
        if key_env:
            api_key = os.environ.get(key_env)
            if not api_key:
                raise ConfigError(f"environment variable {key_env} is not set")
        return HttpProvider(
            endpoint=p["endpoint"],
            model=p["model"],
            temperature=float(p.get("temperature", 0.2)),
            max_tokens=int(p.get("max_tokens", 2048)),
            api_key=api_key,
            timeout=float(p.get("timeout", 60.0)),
        )
    raise ConfigError(f"unknown provider kind {kind!r}")


def cmd_bench_run(args) -> int:
    config = CliConfig.load(args.config)
    suite_path = args.suite or config.resolve("suite") or default_suite_path()
    tasks = load_tasks(suite_path)
    provider = _build_provider(args.provider, config)

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    dataset_path = config.resolve("dataset") or (out_dir / "dataset.jsonl")
    records = run_benchmark(
        tasks,
        provider,
        n_attempts=int(config.bench.get("n_attempts", 3)),
        max_iters=int(config.bench.get("max_iters", 3)),
        options=config.sim_options(),
        records_path=out_dir / "records.jsonl",
        dataset=DatasetStore(dataset_path),
        template=default_prompt_template(),
        concurrency=int(config.provider.get("concurrency", 1)),
    )
    summary = {
        "tasks": len(records),
        "passes": sum(r.c for r in records),
        "records": str(out_dir / "records.jsonl"),
        "dataset": str(dataset_path),
    }
    sys.stdout.write(json.dumps(summary, indent=2) + "\n")
    return 0


def cmd_bench_score(args) -> int:
    records = load_run_records(args.records)
    suite_path = args.suite or default_suite_path()
    tasks = load_tasks(suite_path)
    ks = [int(k) for k in args.k.split(",") if k.strip()]
    table = score(records, ks, tasks)
    sys.stdout.write(table.render_text())
    if args.csv:
        Path(args.csv).write_text(table.render_csv())
        sys.stderr.write(f"wrote {args.csv}\n")
    return 0


def cmd_dataset_export(args) -> int:
    store = DatasetStore(args.store)
    out = store.export(args.out)
    sys.stdout.write(json.dumps({"records": len(store), "path": str(out)}) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spicebench",
        description="SPICE netlist tooling and LLM circuit-generation benchmarking",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="parse and canonically serialize a netlist")
    p.add_argument("file")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("lint", help="rule-check a netlist against task requirements")
    p.add_argument("file")
    p.add_argument("--task", help="suite.json#<task-id>")
    p.add_argument("--requirements", help="JSON file with a requirements object")
    p.set_defaults(func=cmd_lint)

    p = sub.add_parser("classify", help="circuit metrics and difficulty tier")
    p.add_argument("file")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("simulate", help="DC operating point, DC sweep, or transient")
    p.add_argument("file")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--op", action="store_true", help="DC operating point")
    group.add_argument("--dc", nargs=4, metavar=("SRC", "START", "STOP", "STEP"))
    group.add_argument("--tran", nargs=2, metavar=("TSTEP", "TSTOP"))
    p.add_argument("--csv", help="write the transient waveform CSV here")
    p.set_defaults(func=cmd_simulate)

    bench = sub.add_parser("bench", help="benchmark running and scoring")
    bench_sub = bench.add_subparsers(dest="bench_command", required=True)

    p = bench_sub.add_parser("run", help="run the generate/validate/repair loop")
    p.add_argument("--suite", help="task suite JSON (default: packaged suite)")
    p.add_argument("--config", required=True, help="CLI config JSON")
    p.add_argument("--provider", choices=["live", "replay"], required=True)
    p.add_argument("--out", required=True, help="output directory for records")
    p.set_defaults(func=cmd_bench_run)

    p = bench_sub.add_parser("score", help="Pass@k score table from run records")
    p.add_argument("--records", required=True, help="records file or directory")
    p.add_argument("--k", default="1,5", help="comma-separated k values")
    p.add_argument("--suite", help="task suite JSON (default: packaged suite)")
    p.add_argument("--csv", help="also write the table as CSV here")
    p.set_defaults(func=cmd_bench_score)

    dataset = sub.add_parser("dataset", help="dataset store operations")
    dataset_sub = dataset.add_subparsers(dest="dataset_command", required=True)
    p = dataset_sub.add_parser("export", help="export the JSONL store")
    p.add_argument("--store", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_dataset_export)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as err:
        sys.stderr.write(f"config error: {err}\n")
        return 2
    except SpicebenchError as err:
        sys.stderr.write(f"error: {err}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
