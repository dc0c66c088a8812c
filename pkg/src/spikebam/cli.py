"""Command line front-end.

Subcommands::

    run              all seeds x conditions, artifacts and reports
    simulate         one seed and one condition
    analyze DIR      recompute reports from stored runs
    validate-config  check a configuration and print its hash
    oracle           engine vs brute-force equivalence on the microcircuits

Configuration comes from ``--config`` (key = value text, see
:mod:`spikebam.config`); flags override file values.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Dict, List, Sequence

from . import storage
from .analysis import CorrelationReport
from .config import CONDITIONS, ConfigError, ExperimentConfig, build_config, load_config, parse_text
from .engine import run_experiment, simulate

log = logging.getLogger("spikebam")

_CONDITION_FLAGS = {"topdown": ("topdown",), "no-topdown": ("no_topdown",), "both": CONDITIONS}


def _parse_seeds(text: str) -> tuple:
    """``N`` means seeds 1..N; a comma list is taken literally."""
    try:
        if "," in text:
            return tuple(int(x) for x in text.split(",") if x.strip())
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"--seeds expects N or a comma list, got {text!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError(f"--seeds N needs N >= 1, got {n}")
    return tuple(range(1, n + 1))


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="key = value configuration file")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--builtin", action="store_true", help="use the built-in glyph pairs (default)")
    src.add_argument("--patterns", type=Path, help="glyph file with 10 stimulus pairs")
    p.add_argument("--seeds", type=_parse_seeds, help="N (seeds 1..N) or a comma separated list")
    p.add_argument("--condition", choices=sorted(_CONDITION_FLAGS), help="which condition(s) to simulate")
    p.add_argument("--out", type=Path, help="output directory")
    p.add_argument("--no-topdown-mode", choices=("disable_caap", "remove_feedback"))
    p.add_argument("--inhibitory-stdp", choices=("magnitude", "signed"))
    p.add_argument("--workers", type=int, help="parallel runs")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spikebam", description=__doc__.split("\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="full experiment with reports")
    _common(p)
    p = sub.add_parser("simulate", help="a single seed and condition")
    _common(p)
    p.add_argument("--seed", type=int, help="seed to simulate (default: first configured seed)")
    p = sub.add_parser("analyze", help="recompute reports from a run directory")
    p.add_argument("dir", type=Path, nargs="?", help="output directory of an earlier run")
    p.add_argument("--out", type=Path, dest="out", help="same as DIR")
    p = sub.add_parser("validate-config", help="check a configuration")
    _common(p)
    p = sub.add_parser("oracle", help="engine vs brute-force equivalence suite")
    p.add_argument("--config", type=Path)
    p.add_argument("--steps", type=int, default=1000)
    return parser


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    values: Dict[str, object] = {}
    if getattr(args, "config", None) is not None:
        try:
            values.update(parse_text(Path(args.config).read_text()))
        except OSError as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc.strerror}") from None
    if getattr(args, "builtin", False):
        values["patterns"] = "builtin"
    if getattr(args, "patterns", None) is not None:
        values["patterns"] = str(args.patterns)
    if getattr(args, "seeds", None) is not None:
        values["seeds"] = args.seeds
    if getattr(args, "condition", None) is not None:
        values["conditions"] = _CONDITION_FLAGS[args.condition]
    if getattr(args, "out", None) is not None:
        values["out_dir"] = str(args.out)
    if getattr(args, "no_topdown_mode", None) is not None:
        values["no_topdown_mode"] = args.no_topdown_mode
    if getattr(args, "inhibitory_stdp", None) is not None:
        values["inhibitory_stdp"] = args.inhibitory_stdp
    if getattr(args, "workers", None) is not None:
        values["workers"] = args.workers
    config = build_config(values)
    if not config.use_builtin and not Path(config.patterns).is_file():
        raise ConfigError(f"patterns: no such file {config.patterns!r}")
    return config


def _prepare_out(path: Path) -> Path:
    try:
        path.mkdir(parents=True, exist_ok=True)
        probe = path / ".write-test"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        raise OSError(f"output directory {path} is not writable: {exc.strerror}") from None
    return path


def report_header(config_hash: str, records) -> List[str]:
    seeds = sorted({r.seed for r in records})
    conds = sorted({r.condition for r in records})
    return [
        f"config_hash={config_hash}",
        f"seed={','.join(str(s) for s in seeds)}",
        f"condition={','.join(conds)}",
    ]


def write_config(out: Path, config: ExperimentConfig) -> None:
    text = f"# config_hash={config.hash()}\n# seed={','.join(str(s) for s in config.seeds)}\n" + config.to_text()
    (out / "config.txt").write_text(text)


def _write_report(out: Path, config_hash: str, records) -> CorrelationReport:
    report = CorrelationReport.from_records(records, report_header(config_hash, records))
    report.write(out)
    return report


def cmd_run(args) -> int:
    config = config_from_args(args)
    out = _prepare_out(Path(config.out_dir))
    write_config(out, config)
    records = run_experiment(config)
    for r in records:
        storage.save_record(r, out, config.replay_log)
    report = _write_report(out, config.hash(), records)
    print(report.summary(), end="")
    print(f"wrote {len(records)} runs to {out}")
    return 0


def cmd_simulate(args) -> int:
    config = config_from_args(args)
    if len(config.conditions) != 1:
        raise ConfigError("simulate needs exactly one condition (--condition topdown or no-topdown)")
    seed = args.seed if args.seed is not None else config.seeds[0]
    config = build_config({"seeds": (seed,)}, base=config)
    out = _prepare_out(Path(config.out_dir))
    write_config(out, config)
    record = simulate(config, seed, config.conditions[0])
    run_dir = storage.save_record(record, out, config.replay_log)
    print(f"seed={seed} condition={record.condition} associative spikes={int(record.outputs.sum())} -> {run_dir}")
    return 0


def cmd_analyze(args) -> int:
    out = args.dir or args.out
    if out is None:
        raise ConfigError("analyze needs a run directory")
    cfg_file = Path(out) / "config.txt"
    if not cfg_file.exists():
        raise storage.StorageError(f"{out}: no config.txt")
    expected = storage.read_header(cfg_file).get("config_hash")
    if load_config(cfg_file).hash() != expected:
        raise storage.StorageError(f"{cfg_file}: contents do not match its config_hash header")
    records, h = storage.load_runs(Path(out), expected)
    report = _write_report(Path(out), h, records)
    print(report.summary(), end="")
    return 0


def cmd_validate(args) -> int:
    config = config_from_args(args)
    print(f"ok config_hash={config.hash()}")
    return 0


def cmd_oracle(args) -> int:
    from .oracle import circuit_params, compare, microcircuits

    if args.config:
        config = load_config(args.config)
        params = (config.kernel, config.window, config.thresholds)
        mode = config.inhibitory_stdp
    else:
        params, mode = circuit_params(), "magnitude"
    failed = 0
    for circuit in microcircuits(args.steps):
        res = compare(circuit, *params, args.steps, mode)
        status = "PASS" if res.ok else "FAIL"
        failed += not res.ok
        print(f"{status} {circuit.name}: {res.describe()}")
    return 1 if failed else 0


COMMANDS = {
    "run": cmd_run,
    "simulate": cmd_simulate,
    "analyze": cmd_analyze,
    "validate-config": cmd_validate,
    "oracle": cmd_oracle,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, storage.StorageError, OSError) as exc:
        print(f"spikebam {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
