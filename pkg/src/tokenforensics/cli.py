"""Command-line entry point.

Exit codes: 0 success, 1 usage error (bad or missing flags and inputs),
2 data error (inputs present but unusable).
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .pipeline import (
    DEFAULT_MAX_DEPTH,
    DataError,
    UsageError,
    run_detect,
    run_graph,
    run_ingest,
    run_report,
    run_scan,
    run_synth,
)

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2

log = logging.getLogger("tokenforensics")


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad flags; route that through our usage code instead
    def error(self, message: str):
        raise UsageError(message)


def _positive(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return n


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="tokenforensics", description="Counterfeit token and scam forensics over exported ledger files.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)

    def common(sp, *, targets=True, config=True):
        sp.add_argument("--ledger", type=Path, help="directory of exported ledger files")
        if targets:
            sp.add_argument("--targets", type=Path, help="JSON list of official target tokens")
        sp.add_argument("--labels", type=Path, help="labels JSON (defaults to labels.json in the ledger dir)")
        if config:
            sp.add_argument("--config", type=Path, help="detector settings (TOML, or JSON by suffix)")
        sp.add_argument("--out", type=Path, required=False, help="output directory")
        sp.add_argument("--threads", type=_positive, default=os.cpu_count() or 1, help="worker threads (default: all cores)")

    common(sub.add_parser("ingest", help="validate and index ledger files"), targets=False, config=False)
    common(sub.add_parser("scan", help="find counterfeit candidates and apply filters"), config=False)
    common(sub.add_parser("detect", help="detect airdrop and arbitrage scams"))
    g = sub.add_parser("graph", help="creator, holder and money-flow graphs plus token stats")
    common(g)
    g.add_argument("--max-depth", type=_positive, default=DEFAULT_MAX_DEPTH, help="money-flow hop limit")
    common(sub.add_parser("report", help="merge everything into report.json"))
    s = sub.add_parser("synth", help="generate a synthetic ledger with ground truth")
    s.add_argument("--scenario", type=Path, help="scenario file (TOML, or JSON by suffix)")
    s.add_argument("--out", type=Path, help="output directory")
    return p


def run(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
        if args.command is None:
            raise UsageError("a subcommand is required")
        if args.out is None:
            raise UsageError("--out is required")
        cmd = args.command
        if cmd == "synth":
            m = run_synth(args.scenario, args.out)
        elif cmd == "ingest":
            m = run_ingest(args.ledger, args.labels, args.out, args.threads)
        elif cmd == "scan":
            m = run_scan(args.ledger, args.targets, args.labels, args.out, args.threads)
        elif cmd == "detect":
            m = run_detect(args.ledger, args.targets, args.labels, args.config, args.out, args.threads)
        elif cmd == "graph":
            m = run_graph(args.ledger, args.targets, args.labels, args.config, args.out, args.threads, args.max_depth)
        else:
            m = run_report(args.ledger, args.targets, args.labels, args.config, args.out, args.threads)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    log.info("%s wrote %d files to %s", m.stage, len(m.outputs), args.out)
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
