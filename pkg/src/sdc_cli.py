#!/usr/bin/env python3
"""
Command line entry point for the superdense coding experiments

Exit codes: 0 ok (protocol failures are data), 2 usage, 3 domain error,
4 unreadable input, 5 report could not be written.
"""

import argparse
import asyncio
import logging
import sys
from typing import List, Optional, TextIO

from src.config_manager import ConfigManager
from src.experiment_system import ExperimentSystem
from src.results_manager import ResultsManager, write_report
from src.sdc_classes import COMMANDS, OUTPUT_FORMATS
from src.sdc_errors import ArgumentError, InputError, ReportWriteError

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DOMAIN = 3
EXIT_INPUT = 4
EXIT_IO = 5


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sdc",
        description="Superdense coding of quantum states: protocol simulations and bound calculators",
    )
    parser.add_argument("command", choices=COMMANDS, help="実行する実験")
    # None means "take it from experiment_defaults.json"
    parser.add_argument("--d", type=int, help="dimension of Bob's share / the entangled pair")
    parser.add_argument("--d-a", dest="d_a", type=int, help="dimension of Alice's transmitted register")
    parser.add_argument("--d-a1", dest="d_a1", type=int, help="dimension of the part Alice keeps (share)")
    parser.add_argument("--epsilon", type=float, help="flatness tolerance in (0, 1]")
    parser.add_argument("--trials", type=int, help="Monte Carlo trials")
    parser.add_argument("--ensemble-size", dest="ensemble_size", type=int, help="number n of shared isometries")
    parser.add_argument("--seed", type=lambda s: int(s, 0), help="64-bit seed (falls back to SDC_SEED)")
    parser.add_argument("--state", help="mes, product, haar or file:<path>")
    parser.add_argument("--output", choices=OUTPUT_FORMATS, help="report format")
    parser.add_argument("--l", type=int, help="half the qubit count of the communicated state (resources)")
    parser.add_argument("--workers", type=int, help="concurrent trial chunks")
    parser.add_argument("--save", action="store_true", help="also save the report under results_dir")
    parser.add_argument("--results-dir", dest="results_dir", help="where --save writes reports")
    parser.add_argument("--config", help="path to an alternative defaults JSON file")
    parser.add_argument("--verbose", "-v", action="store_true", help="debug logging on stderr")
    return parser


def main(argv: Optional[List[str]] = None, stdout: Optional[TextIO] = None) -> int:
    stdout = stdout if stdout is not None else sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE

    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)

    overrides = {k: v for k, v in vars(args).items() if k not in ("command", "config", "verbose")}
    try:
        manager = ConfigManager(args.config) if args.config else ConfigManager()
        config = manager.build_config(args.command, overrides)
        config.validate()
    except ArgumentError as e:
        print(f"{parser.prog}: error: {e}", file=sys.stderr)
        return EXIT_USAGE

    try:
        report = asyncio.run(ExperimentSystem(config).run())
        text = write_report(report, config.output)
        if config.save:
            path = ResultsManager(config.results_dir).save_report(report, config.output)
            logger.info("saved %s", path)
        stdout.write(text)
        stdout.flush()
    except InputError as e:
        print(f"❌ 入力エラー: {e}", file=sys.stderr)
        return EXIT_INPUT
    except ArgumentError as e:
        print(f"❌ ドメインエラー: {e}", file=sys.stderr)
        return EXIT_DOMAIN
    except (ReportWriteError, OSError) as e:
        print(f"❌ 書き込みエラー: {e}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
