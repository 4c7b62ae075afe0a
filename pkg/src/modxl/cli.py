"""Command-line entry point.

Subcommands ``pattern``, ``resolution``, ``multiuser`` and ``validate``.
Exit status is 0 on success, 1 when validation fails and 2 on a bad
configuration.
"""

from __future__ import annotations

import argparse
import json
import sys

from .config import load_run_config
from .errors import ConfigError
from .experiments import PRESETS, preset_config, run
from .validate import validate_oracles

EXIT_OK, EXIT_VALIDATION, EXIT_CONFIG = 0, 1, 2


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="modxl", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for name, kinds in (("pattern", "fig3..fig7"), ("resolution", "resolution"),
                        ("multiuser", "fig9..fig11")):
        p = sub.add_parser(name, help=f"run a {name} experiment")
        src = p.add_mutually_exclusive_group(required=True)
        src.add_argument("--config", help="JSON run config")
        src.add_argument("--preset", choices=sorted(PRESETS),
                         help=f"built-in configuration ({kinds})")
        p.add_argument("--seed", type=int,
                       help="run a single seed instead of the configured list")
        p.add_argument("--out", help="output path")
        p.add_argument("--threads", type=int, help="worker threads")
    v = sub.add_parser("validate", help="run the oracle self-checks")
    v.add_argument("--level", choices=("fast", "full"), default="fast")
    v.add_argument("--config", help="JSON object of tolerance overrides")
    v.add_argument("--seed", type=int, help="accepted for uniformity; unused")
    v.add_argument("--out", help="write the JSON report here")
    v.add_argument("--threads", type=int, help="accepted for uniformity; unused")
    return ap


def _load(args):
    cfg = load_run_config(args.config) if args.config else preset_config(args.preset)
    if cfg.experiment != args.command:
        raise ConfigError(f"config describes a {cfg.experiment!r} experiment, "
                          f"not {args.command!r}")
    if args.seed is not None:
        if not 0 <= args.seed < 2 ** 64:
            raise ConfigError("--seed must be an unsigned 64-bit integer")
        cfg.seeds = [args.seed]
    if args.threads is not None:
        if args.threads < 1:
            raise ConfigError("--threads must be >= 1")
        cfg.threads = args.threads
    if args.out:
        cfg.out = args.out
    return cfg


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.command == "validate":
            tol = None
            if args.config:
                with open(args.config) as fh:
                    tol = json.load(fh)
            try:
                report = validate_oracles(args.level, tol)
            except ValueError as exc:
                raise ConfigError(str(exc)) from exc
            text = json.dumps(report.to_dict(), indent=1)
            if args.out:
                with open(args.out, "w") as fh:
                    fh.write(text + "\n")
            for c in report.checks:
                status = "PASS" if c.passed else "FAIL"
                print(f"{status} {c.name}: measured={c.measured:.3g} "
                      f"tolerance={c.tolerance:.3g}")
            return EXIT_OK if report.passed else EXIT_VALIDATION
        cfg = _load(args)
        written = run(cfg)
        for path in (written if isinstance(written, tuple) else (written,)):
            print(path)
        return EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
