# agent/tools/common.py
"""Argument types, inputs, outputs and seeds shared by the subcommands."""
from __future__ import annotations

import argparse
import contextlib
import math
import sys
from typing import IO, Iterator

from pydantic import ValidationError

from core.errors import InputError, InvalidArgumentError, UsageError
from core.graph import BipartiteGraph
from core.ingest import IngestOptions, load_graph
from core.planted import make_planted_bipartite
from core.rng import fresh_seed
from core.weighting import check_tau
from data.southern_women import southern_women
from logs.logger import get_logger, kv

logger = get_logger(__name__)

BUILTIN_PREFIX = "builtin:"
BUILTINS = ("southern-women", "planted")


def tau_type(text: str) -> float:
    try:
        return check_tau(float(text))
    except (ValueError, InvalidArgumentError):
        raise argparse.ArgumentTypeError(f"threshold must be a finite number >= 0, got {text!r}") from None


def log_base_type(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        value = math.nan
    if not (math.isfinite(value) and value > 1.0):
        raise argparse.ArgumentTypeError(f"log base must be a finite number > 1, got {text!r}")
    return value


def count_type(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        value = 0
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected an integer >= 1, got {text!r}")
    return value


def add_input(parser: argparse.ArgumentParser, what: str = "edge list") -> None:
    parser.add_argument(
        "input",
        help=f"{what} path, or {' / '.join(BUILTIN_PREFIX + b for b in BUILTINS)}",
    )


def ingest_options(args: argparse.Namespace) -> IngestOptions:
    try:
        return IngestOptions(
            delimiter=args.delimiter,
            has_header=args.has_header,
            weight_column=args.weight_column,
            min_rating=args.min_rating,
        )
    except ValidationError as e:
        raise UsageError(f"invalid input options: {e.errors()[0]['msg']}") from e


def resolve_seed(args: argparse.Namespace) -> int:
    """The ``--seed`` value, or a fresh one that is logged so the run can be repeated."""
    if args.seed is None:
        args.seed = fresh_seed()
        logger.warning(kv("no --seed given; drew a fresh one", seed=args.seed))
    return args.seed


def load_input(args: argparse.Namespace) -> BipartiteGraph:
    source: str = args.input
    if source.startswith(BUILTIN_PREFIX):
        name = source[len(BUILTIN_PREFIX):]
        if name == "southern-women":
            return southern_women()
        if name == "planted":
            return make_planted_bipartite(seed=resolve_seed(args)).graph
        raise UsageError(f"unknown builtin {name!r}; known: {', '.join(BUILTINS)}")
    return load_graph(source, ingest_options(args))


@contextlib.contextmanager
def output_stream(args: argparse.Namespace) -> Iterator[IO[str]]:
    """``-o`` file (created or truncated) or stdout."""
    if args.output in (None, "-"):
        yield sys.stdout
        sys.stdout.flush()
        return
    try:
        stream = open(args.output, "w", encoding="utf-8", newline="")
    except OSError as e:
        raise InputError(f"cannot write {args.output}: {e.strerror or e}") from e
    with stream:
        yield stream
