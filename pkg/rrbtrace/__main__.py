#!/usr/bin/env python3
"""Command-line entry point: simulate, sniff, featurize, train and evaluate."""

import argparse
import logging
import sys
from pathlib import Path
from typing import NoReturn

from .commands import (
    DEFAULT_ITERATIONS,
    cmd_attack,
    cmd_cdf,
    cmd_dataset,
    cmd_simulate,
    cmd_sniff,
    cmd_synthesize,
    cmd_train_eval,
)
from .errors import RrbError, handle_error
from .forest import Variant
from .profiles import DEFAULT_SESSION_SUBFRAMES
from .sniffer import DEFAULT_BIN_SUBFRAMES

USAGE_EXIT_CODE = 1


class UsageParser(argparse.ArgumentParser):
    """Argument parser whose usage errors exit with code 1."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        print(f"\033[31m{self.prog}: error: {message}\033[0m", file=sys.stderr)
        sys.exit(USAGE_EXIT_CODE)


def _rnti(text: str) -> int:
    return int(text, 0)


def build_parser() -> UsageParser:
    parser = UsageParser(
        prog="rrbtrace",
        description="Radio resource block side-channel toolkit",
        epilog="Examples:\n"
               "  rrbtrace simulate --config cell.json --out run/\n"
               "  rrbtrace sniff --log run/dci_log.csv --rnti 4242 --bin 100 --out victim.csv\n"
               "  rrbtrace attack --out attack/ --seed 42",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG logging")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=UsageParser)

    simulate = sub.add_parser("simulate", help="run a cell simulation and write its DCI log")
    simulate.add_argument("--config", type=Path, required=True, help="simulation JSON document")
    simulate.add_argument("--out", type=Path, required=True, help="output directory")

    sniff = sub.add_parser("sniff", help="reconstruct one victim's throughput from a DCI log")
    sniff.add_argument("--log", type=Path, required=True, help="grant CSV; rar_events.csv must sit beside it")
    sniff.add_argument("--rnti", type=_rnti, required=True, help="victim C-RNTI (decimal or 0x hex)")
    sniff.add_argument("--bin", type=int, default=DEFAULT_BIN_SUBFRAMES, help="bin width in subframes")
    sniff.add_argument("--out", type=Path, required=True, help="trace CSV to write")
    sniff.add_argument("--config", type=Path, help="simulation JSON whose cell parameters apply")

    dataset = sub.add_parser("dataset", help="extract feature rows from a labeled traces directory")
    dataset.add_argument("--traces", type=Path, required=True, help="directory of <label>/<trace>.csv")
    dataset.add_argument("--out", type=Path, required=True, help="feature CSV to write")
    dataset.add_argument("--average-group", type=int, metavar="K",
                         help="average each label's iterations in groups of K before featurizing")

    train = sub.add_parser("train-eval", help="train an ensemble and report held-out metrics")
    train.add_argument("--dataset", type=Path, required=True)
    train.add_argument("--variant", choices=[v.value for v in Variant], default=Variant.RANDOM_FOREST.value)
    train.add_argument("--out-model", type=Path, required=True)
    train.add_argument("--out-report", type=Path, required=True)
    train.add_argument("--seed", type=int, default=42)
    train.add_argument("--estimators", type=int, default=100)
    train.add_argument("--train-fraction", type=float, default=0.7)
    train.add_argument("--jobs", type=int, default=1)

    cdf = sub.add_parser("cdf", help="export per-direction CDFs of a trace")
    cdf.add_argument("--trace", type=Path, required=True)
    cdf.add_argument("--out", type=Path, required=True, help="output directory")
    cdf.add_argument("--raw", action="store_true", help="use raw bytes instead of normalized throughput")

    synthesize = sub.add_parser("synthesize", help="simulate and sniff every catalogue class")
    synthesize.add_argument("--out", type=Path, required=True)
    synthesize.add_argument("--iterations", type=int, default=DEFAULT_ITERATIONS)
    synthesize.add_argument("--duration", type=int, default=DEFAULT_SESSION_SUBFRAMES)
    synthesize.add_argument("--seed", type=int, default=42)
    synthesize.add_argument("--jobs", type=int, default=1)

    attack = sub.add_parser("attack", help="end-to-end: synthesize, featurize, train and evaluate both variants")
    attack.add_argument("--out", type=Path, required=True)
    attack.add_argument("--seed", type=int, default=42)
    attack.add_argument("--iterations", type=int, default=DEFAULT_ITERATIONS)
    attack.add_argument("--duration", type=int, default=DEFAULT_SESSION_SUBFRAMES)
    attack.add_argument("--estimators", type=int, default=100)
    attack.add_argument("--jobs", type=int, default=1)
    return parser


def configure_logging(verbosity: int) -> None:
    level = logging.WARNING if verbosity == 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")


def run(args: argparse.Namespace) -> None:
    match args.command:
        case "simulate":
            cmd_simulate(args.config, args.out)
        case "sniff":
            cmd_sniff(args.log, args.rnti, args.bin, args.out, args.config)
        case "dataset":
            cmd_dataset(args.traces, args.out, args.average_group)
        case "train-eval":
            cmd_train_eval(args.dataset, Variant(args.variant), args.out_model, args.out_report,
                           args.seed, args.estimators, args.train_fraction, args.jobs)
        case "cdf":
            cmd_cdf(args.trace, args.out, normalized=not args.raw)
        case "synthesize":
            cmd_synthesize(args.out, args.iterations, args.duration, args.seed, args.jobs)
        case "attack":
            cmd_attack(args.out, args.seed, args.iterations, args.duration, args.estimators, args.jobs)


def main(argv: list[str] | None = None) -> None:
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose)
    try:
        run(args)
    except RrbError as error:
        handle_error(error)


if __name__ == "__main__":
    main()
