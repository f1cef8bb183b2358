"""
Command-line entry point.

    python -m weierkern curve check fixtures/fixture.json
    python -m weierkern kernel eval fixtures/fixture.json --variant g4 --x=2,-2,-1 --y=-1,-1,1

Results go to stdout (or --output) as JSON; failures print
{"error": {"kind": ..., "detail": ...}} and exit with 2 (usage),
3 (pole or branch point) or 4 (no convergence).
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

from pydantic import BaseModel

from .commands import COMMANDS
from .config import get_settings
from .errors import NonFiniteError, WeierkernError
from .logging_setup import log_error_with_context, setup_logging

logger = logging.getLogger(__name__)

LOG_LEVELS = ["DEBUG", "INFO", "WARNING", "ERROR"]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="weierkern",
                                     description="Weierstrass kernels and correlators on algebraic curves")
    parser.add_argument("--seed", type=int, default=0, help="seed for every randomized step")
    parser.add_argument("--output", type=Path, help="write the JSON result here instead of stdout")
    parser.add_argument("--log-level", type=str.upper, choices=LOG_LEVELS,
                        help="console log level (default from WEIERKERN_LOG_LEVEL)")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for module in COMMANDS:
        module.register(subparsers)
    return parser


def render(model: BaseModel, exclude_none: bool = False) -> str:
    try:
        return json.dumps(model.model_dump(mode="json", by_alias=True, exclude_none=exclude_none),
                          indent=2, allow_nan=False)
    except ValueError as exc:
        raise NonFiniteError(f"non-finite number in {type(model).__name__}") from exc


def write_output(text: str, output: Optional[Path]) -> None:
    if output is None:
        print(text)
        return
    output.parent.mkdir(parents=True, exist_ok=True)
    output.write_text(text + "\n", encoding="utf-8")


def fail(exc: WeierkernError, context: str) -> int:
    log_error_with_context(exc, context)
    print(json.dumps(exc.to_payload(), indent=2))
    return exc.exit_code


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        settings = get_settings()
    except WeierkernError as exc:
        setup_logging(args.log_level or "WARNING")
        return fail(exc, "settings")
    setup_logging(args.log_level or settings.log_level, settings.log_dir)
    logger.info("weierkern %s (seed %d, %d thread(s))", args.command, args.seed, settings.threads)
    try:
        model = args.handler(args)
        text = render(model, getattr(args, "exclude_none", False))
    except WeierkernError as exc:
        return fail(exc, args.command)
    write_output(text, args.output)
    return 0


if __name__ == "__main__":
    sys.exit(main())
