# core/ingest.py
"""Delimited-text readers and writers.

Inputs are ``user<delim>object[<delim>weight]`` records. The same module reads
and writes the intermediate dumps that let the CLI stages be chained through
files (tf-idf audit dumps, filtered edge lists, projected edge lists,
partitions).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterator

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator

from core.errors import EmptyGraphError, InputError, ParseError
from core.graph import BipartiteGraph, ProjectedGraph, Side, TfidfWeights, check_side
from logs.logger import get_logger, kv

logger = get_logger(__name__)

COMMENT_PREFIXES = ("#", "%")
EDGE_HEADER = ("user", "object", "weight")
TFIDF_HEADER = ("user", "object", "w_old", "f", "idf", "w_new")
PROJECTED_HEADER = ("source", "target", "weight")
PARTITION_HEADER = ("node", "community")


class IngestOptions(BaseModel):
    model_config = ConfigDict(frozen=True)

    delimiter: str | None = "\t"
    has_header: bool = False
    weight_column: int | None = None
    min_rating: float | None = None
    keep_zero_weights: bool = False

    @field_validator("delimiter")
    @classmethod
    def _single_byte(cls, value: str | None) -> str | None:
        if value is not None and len(value.encode("utf-8")) != 1:
            raise ValueError("delimiter must be a single byte")
        return value

    @field_validator("weight_column")
    @classmethod
    def _weight_after_keys(cls, value: int | None) -> int | None:
        if value is not None and value < 2:
            raise ValueError("weight column must come after the user and object columns")
        return value


@dataclass(frozen=True)
class EdgeRecord:
    user: str
    object: str
    weight: float | None = None

    def __post_init__(self):
        if not self.user or not self.object:
            raise ValueError("user and object keys must be non-empty")
        if self.weight is not None and (not math.isfinite(self.weight) or self.weight < 0):
            raise ValueError(f"weight must be finite and >= 0, got {self.weight}")

    @property
    def value(self) -> float:
        return 1.0 if self.weight is None else self.weight


@dataclass(frozen=True)
class LoadSummary:
    rows_read: int
    rows_dropped: int
    duplicates_merged: int
    users: int
    objects: int
    edges: int
    max_columns: int


def _open(path: str | Path) -> IO[bytes]:
    try:
        return open(path, "rb")
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror or e}") from e


def _lines(stream: IO[bytes]) -> Iterator[tuple[int, str]]:
    for line_number, raw in enumerate(stream, start=1):
        try:
            line = raw.decode("utf-8")
        except UnicodeDecodeError as e:
            raise ParseError(f"invalid UTF-8 at byte {e.start + 1}", line_number) from e
        yield line_number, line.rstrip("\r\n")


def _rows(stream: IO[bytes], delimiter: str | None) -> Iterator[tuple[int, list[str]]]:
    """Yield (line number, fields) for data lines, skipping blanks and comments."""
    for line_number, line in _lines(stream):
        if not line.strip() or line.lstrip().startswith(COMMENT_PREFIXES):
            continue
        fields = line.split() if delimiter is None else line.split(delimiter)
        yield line_number, [f.strip() for f in fields]


def _comments(path: str | Path) -> dict[str, str]:
    """``# key=value`` pairs from comment lines."""
    found: dict[str, str] = {}
    with _open(path) as stream:
        for _, line in _lines(stream):
            line = line.strip()
            if not line.startswith("#"):
                continue
            for token in line[1:].split():
                if "=" in token:
                    key, _, value = token.partition("=")
                    found[key] = value
    return found


def parse_record(fields: list[str], line_number: int, weight_column: int | None) -> EdgeRecord:
    if len(fields) < 2:
        raise ParseError(f"expected at least 2 columns, found {len(fields)}", line_number)
    column = weight_column if weight_column is not None else (2 if len(fields) > 2 else None)
    weight = None
    if column is not None:
        if column >= len(fields):
            raise ParseError(f"weight column {column} outside a {len(fields)}-column record", line_number)
        try:
            weight = float(fields[column])
        except ValueError:
            raise ParseError(f"weight {fields[column]!r} is not a number", line_number) from None
    try:
        return EdgeRecord(fields[0], fields[1], weight)
    except ValueError as e:
        raise ParseError(str(e), line_number) from e


def read_edge_list(path: str | Path, options: IngestOptions | None = None) -> tuple[BipartiteGraph, LoadSummary]:
    options = options or IngestOptions()
    users: dict[str, int] = {}
    objects: dict[str, int] = {}
    merged: dict[tuple[int, int], float] = {}
    rows_read = dropped = duplicates = max_columns = 0
    header_pending = options.has_header

    with _open(path) as stream:
        for line_number, fields in _rows(stream, options.delimiter):
            if header_pending:
                header_pending = False
                continue
            rows_read += 1
            max_columns = max(max_columns, len(fields))
            record = parse_record(fields, line_number, options.weight_column)
            weight = record.value
            # filter individual ratings before any merging
            if options.min_rating is not None and weight < options.min_rating:
                dropped += 1
                continue
            if weight == 0.0 and not options.keep_zero_weights:
                dropped += 1
                continue
            u = users.setdefault(record.user, len(users))
            o = objects.setdefault(record.object, len(objects))
            if (u, o) in merged:
                duplicates += 1
                merged[(u, o)] += weight
            else:
                merged[(u, o)] = weight

    if not merged:
        raise EmptyGraphError(f"{path}: no edges left after reading {rows_read} rows")

    pairs = np.array(list(merged.keys()), dtype=np.int64)
    graph = BipartiteGraph.build(users, objects, pairs[:, 0], pairs[:, 1], list(merged.values()))
    summary = LoadSummary(
        rows_read=rows_read,
        rows_dropped=dropped,
        duplicates_merged=duplicates,
        users=graph.n_users,
        objects=graph.n_objects,
        edges=graph.n_edges,
        max_columns=max_columns,
    )
    logger.info(kv("load summary", path=path, **vars(summary)))
    return graph, summary


def load_edge_list(path: str | Path, options: IngestOptions | None = None) -> BipartiteGraph:
    graph, _ = read_edge_list(path, options)
    return graph


def _first_row(path: str | Path, delimiter: str | None = "\t") -> tuple[str, ...]:
    with _open(path) as stream:
        for _, fields in _rows(stream, delimiter):
            return tuple(fields)
    return ()


def load_graph(path: str | Path, options: IngestOptions | None = None) -> BipartiteGraph:
    """Read a raw edge list, an edge-list dump or a tf-idf dump, by header."""
    options = options or IngestOptions()
    header = _first_row(path, options.delimiter)
    if header == TFIDF_HEADER:
        return read_tfidf_dump(path)
    if header == EDGE_HEADER:
        return load_edge_list(path, options.model_copy(update={"has_header": True}))
    return load_edge_list(path, options)


# dumps

def _fmt(value: float) -> str:
    return repr(float(value))


def write_edge_list(graph: BipartiteGraph, stream: IO[str]) -> None:
    stream.write("\t".join(EDGE_HEADER) + "\n")
    for user, obj, weight in graph.triples():
        stream.write(f"{user}\t{obj}\t{_fmt(weight)}\n")


def write_tfidf_dump(graph: BipartiteGraph, stream: IO[str]) -> None:
    """Per-edge audit rows: user, object, w_old, f, idf, w_new."""
    tfidf = graph.tfidf
    if tfidf is None:
        raise InputError("graph carries no tf-idf weights; run tfidf first")
    stream.write(f"# tfidf log_base={_fmt(tfidf.log_base)} normalizer={tfidf.normalizer}\n")
    stream.write("\t".join(TFIDF_HEADER) + "\n")
    idf = tfidf.object_idf[graph.object_idx]
    for i, (user, obj, w_new) in enumerate(graph.triples()):
        stream.write(
            f"{user}\t{obj}\t{_fmt(tfidf.original[i])}\t{_fmt(tfidf.tf[i])}\t{_fmt(idf[i])}\t{_fmt(w_new)}\n"
        )


def read_tfidf_dump(path: str | Path) -> BipartiteGraph:
    meta = _comments(path)
    log_base = float(meta.get("log_base", math.e))
    normalizer = meta.get("normalizer", "max")

    users: dict[str, int] = {}
    objects: dict[str, int] = {}
    rows: list[tuple[int, int, float, float, float, float]] = []
    with _open(path) as stream:
        for line_number, fields in _rows(stream, "\t"):
            if tuple(fields) == TFIDF_HEADER:
                continue
            if len(fields) != len(TFIDF_HEADER):
                raise ParseError(f"expected {len(TFIDF_HEADER)} columns, found {len(fields)}", line_number)
            try:
                w_old, f, idf, w_new = (float(v) for v in fields[2:])
            except ValueError:
                raise ParseError("non-numeric weight column", line_number) from None
            u = users.setdefault(fields[0], len(users))
            o = objects.setdefault(fields[1], len(objects))
            rows.append((u, o, w_old, f, idf, w_new))

    if not rows:
        raise EmptyGraphError(f"{path}: tf-idf dump holds no edges")
    data = np.array(rows, dtype=np.float64)
    u_idx = data[:, 0].astype(np.int64)
    o_idx = data[:, 1].astype(np.int64)
    # the user's max edge may have been filtered away; w_old / f still recovers it
    tf = data[:, 3]
    implied_max = np.divide(data[:, 2], tf, out=np.zeros_like(tf), where=tf > 0)
    user_max = np.zeros(len(users))
    np.maximum.at(user_max, u_idx, implied_max)
    object_idf = np.zeros(len(objects))
    object_idf[o_idx] = data[:, 4]
    tfidf = TfidfWeights(
        original=data[:, 2], tf=data[:, 3], user_max=user_max,
        object_idf=object_idf, log_base=log_base, normalizer=normalizer,
    )
    return BipartiteGraph.build(users, objects, u_idx, o_idx, data[:, 5], tfidf)


def write_projected_edge_list(graph: ProjectedGraph, stream: IO[str]) -> None:
    stream.write(f"# side={graph.side} nodes={graph.n_nodes}\n")
    touched = np.zeros(graph.n_nodes, dtype=bool)
    touched[graph.source] = True
    touched[graph.target] = True
    for i in np.flatnonzero(~touched):
        stream.write(f"# isolated\t{graph.nodes[i]}\n")
    stream.write("\t".join(PROJECTED_HEADER) + "\n")
    for a, b, w in graph.edges():
        stream.write(f"{a}\t{b}\t{_fmt(w)}\n")


def read_projected_edge_list(path: str | Path, side: Side | None = None) -> ProjectedGraph:
    meta = _comments(path)
    side = check_side(side or meta.get("side", "users"))
    nodes: dict[str, int] = {}
    edges: list[tuple[int, int, float]] = []
    isolated: list[str] = []
    seen: set[tuple[int, int]] = set()
    with _open(path) as stream:
        for line_number, line in _lines(stream):
            if line.startswith("# isolated\t"):
                isolated.append(line.split("\t", 1)[1])
                continue
            if not line.strip() or line.lstrip().startswith(COMMENT_PREFIXES):
                continue
            fields = [f.strip() for f in line.split("\t")]
            if tuple(fields) == PROJECTED_HEADER:
                continue
            if len(fields) not in (2, 3):
                raise ParseError(f"expected 2 or 3 columns, found {len(fields)}", line_number)
            try:
                weight = float(fields[2]) if len(fields) == 3 else 1.0
            except ValueError:
                raise ParseError(f"weight {fields[2]!r} is not a number", line_number) from None
            if not math.isfinite(weight) or weight <= 0:
                raise ParseError(f"projected edge weight must be positive, got {fields[2]!r}", line_number)
            a = nodes.setdefault(fields[0], len(nodes))
            b = nodes.setdefault(fields[1], len(nodes))
            if a == b:
                raise ParseError("self-loop in projected edge list", line_number)
            pair = (min(a, b), max(a, b))
            if pair in seen:
                raise ParseError(f"duplicate edge {fields[0]!r}-{fields[1]!r}", line_number)
            seen.add(pair)
            edges.append((a, b, weight))
    for label in isolated:
        nodes.setdefault(label, len(nodes))
    return ProjectedGraph.from_edges(nodes, side, edges)


def write_partition(labels: tuple[str, ...], assignment: tuple[int, ...], stream: IO[str],
                    modularity: float | None = None) -> None:
    if modularity is not None:
        stream.write(f"# modularity={_fmt(modularity)}\n")
    stream.write("\t".join(PARTITION_HEADER) + "\n")
    for label, community in zip(labels, assignment):
        stream.write(f"{label}\t{community}\n")
