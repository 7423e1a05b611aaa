# core/experiment.py
"""Threshold sweep on a tf-idf weighted network against random removal.

For every threshold the filtered network is projected and partitioned, then
the same number of edges is removed uniformly at random ``replicates`` times
and the random networks go through the same pipeline. Every random stream is
keyed by (threshold index, replicate index, stream) under the master seed;
replicate 0 is the real network.
"""
from __future__ import annotations

import csv
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Literal, Optional

import numpy as np
from dotenv import dotenv_values
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from core import __version__
from core.community import louvain
from core.errors import EmptyGraphError, InputError, InvalidArgumentError
from core.graph import BipartiteGraph, Side, content_hash, projected_density
from core.projection import project
from core.rng import RNG_ALGORITHM, SeedLike, make_rng
from core.weighting import filter_by_threshold, tfidf_reweight
from logs.logger import get_logger, kv

logger = get_logger(__name__)

DEFAULT_THRESHOLDS: tuple[float, ...] = (0.1,) + tuple(0.5 * i for i in range(1, 13))
STREAM_REMOVAL = 0
STREAM_LOUVAIN = 1

CONFIG_KEYS = {
    "THRESHOLDS": "thresholds",
    "REPLICATES": "replicates",
    "MASTER_SEED": "master_seed",
    "PROJECTION_SIDE": "projection_side",
    "USE_WEIGHTS": "use_weights",
    "MAX_THRESHOLD": "max_threshold",
    "LOG_BASE": "log_base",
    "WORKERS": "workers",
    "LOUVAIN_SEED_POLICY": "louvain_seed_policy",
}

CSV_COLUMNS = ("tau", "metric", "real", "random_mean", "random_std")
SERIES_FILES = {
    "edges_users.csv": ("edges_removed_ratio", "users_remaining"),
    "density.csv": ("projected_density",),
    "modularity.csv": ("modularity",),
}


class SweepConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    thresholds: tuple[float, ...] = DEFAULT_THRESHOLDS
    replicates: int = Field(default=100, ge=1)
    master_seed: int = Field(default=0, ge=0)
    projection_side: Side = "users"
    use_weights: bool = True
    max_threshold: Optional[float] = None
    log_base: float = math.e
    workers: int = Field(default=1, ge=1)
    louvain_seed_policy: Literal["derived-per-run"] = "derived-per-run"

    @field_validator("thresholds", mode="before")
    @classmethod
    def _split(cls, value):
        if isinstance(value, str):
            return tuple(float(v) for v in value.replace(";", ",").split(",") if v.strip())
        return value

    @field_validator("thresholds")
    @classmethod
    def _ascending(cls, value: tuple[float, ...]) -> tuple[float, ...]:
        if not value:
            raise ValueError("at least one threshold is required")
        if any(not math.isfinite(t) or t < 0 for t in value):
            raise ValueError("thresholds must be finite and >= 0")
        if any(b <= a for a, b in zip(value, value[1:])):
            raise ValueError("thresholds must be strictly ascending")
        return value

    @field_validator("log_base")
    @classmethod
    def _base(cls, value: float) -> float:
        if not math.isfinite(value) or value <= 1:
            raise ValueError("log base must be a finite number > 1")
        return value

    @property
    def effective_thresholds(self) -> tuple[float, ...]:
        if self.max_threshold is None:
            return self.thresholds
        return tuple(t for t in self.thresholds if t <= self.max_threshold)


def read_sweep_file(path: str | Path) -> dict[str, str | None]:
    if not Path(path).is_file():
        raise InputError(f"sweep config {path} does not exist")
    try:
        return dotenv_values(path, encoding="utf-8")
    except UnicodeDecodeError as e:
        raise InputError(f"sweep config {path} is not valid UTF-8") from e


def load_sweep_config(path: str | Path, **overrides) -> SweepConfig:
    """Read a KEY=value sweep configuration; ``overrides`` win over the file."""
    raw = read_sweep_file(path)
    unknown = sorted(set(raw) - set(CONFIG_KEYS))
    if unknown:
        raise InputError(f"{path}: unknown config key(s) {', '.join(unknown)}; known: {', '.join(CONFIG_KEYS)}")
    values = {CONFIG_KEYS[k]: v for k, v in raw.items() if v not in (None, "")}
    values.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return SweepConfig(**values)
    except ValidationError as e:
        error = e.errors()[0]
        where = ".".join(str(p) for p in error["loc"])
        raise InputError(f"{path}: {where}: {error['msg']}") from e


class Measurement(BaseModel):
    users_remaining: int
    objects_remaining: int
    edges: int
    projected_edges: Optional[int] = None
    projected_density: Optional[float] = None
    modularity: Optional[float] = None
    communities: Optional[int] = None


class Summary(BaseModel):
    mean: Optional[float]
    std: Optional[float]
    count: int


def summarize(values: list[Optional[float]]) -> Summary:
    """Mean and population std over the non-null values."""
    present = np.array([v for v in values if v is not None], dtype=np.float64)
    if present.size == 0:
        return Summary(mean=None, std=None, count=0)
    return Summary(mean=float(present.mean()), std=float(present.std()), count=int(present.size))


class SweepRow(BaseModel):
    tau: float
    edges_removed: int
    edges_removed_ratio: float
    real: Measurement
    random: list[Measurement]

    def real_value(self, metric: str) -> Optional[float]:
        if metric == "edges_removed_ratio":
            return self.edges_removed_ratio
        return getattr(self.real, metric)

    def random_summary(self, metric: str) -> Summary:
        if metric == "edges_removed_ratio":
            return Summary(mean=self.edges_removed_ratio, std=0.0, count=len(self.random))
        return summarize([getattr(m, metric) for m in self.random])

    @property
    def random_users_remaining_mean(self) -> float:
        return self.random_summary("users_remaining").mean  # type: ignore[return-value]

    @property
    def random_projected_density_mean(self) -> Optional[float]:
        return self.random_summary("projected_density").mean

    @property
    def random_modularity_mean(self) -> Optional[float]:
        return self.random_summary("modularity").mean


class Provenance(BaseModel):
    version: str = __version__
    rng_algorithm: str = RNG_ALGORITHM
    master_seed: int
    seed_key: str = "SeedSequence(master_seed, spawn_key=(tau_index, replicate, stream)); replicate 0 is real"
    streams: dict[str, int] = {"removal": STREAM_REMOVAL, "louvain": STREAM_LOUVAIN}
    content_hash: str
    n_users: int
    n_objects: int
    n_edges: int


class SweepReport(BaseModel):
    config: SweepConfig
    provenance: Provenance
    rows: list[SweepRow]

    def series(self, metric: str) -> list[dict]:
        out = []
        for row in self.rows:
            summary = row.random_summary(metric)
            out.append({
                "tau": row.tau, "metric": metric, "real": row.real_value(metric),
                "random_mean": summary.mean, "random_std": summary.std,
            })
        return out


# pipeline pieces

def random_baseline(graph: BipartiteGraph, edges_to_remove: int, seed: SeedLike) -> BipartiteGraph:
    """Remove a uniform random set of exactly ``edges_to_remove`` edges, then isolated nodes."""
    if not 0 <= edges_to_remove <= graph.n_edges:
        raise InvalidArgumentError(f"cannot remove {edges_to_remove} of {graph.n_edges} edges")
    rng = make_rng(seed)
    keep = np.ones(graph.n_edges, dtype=bool)
    keep[rng.choice(graph.n_edges, size=edges_to_remove, replace=False)] = False
    return graph.subgraph(keep)


def measure(graph: BipartiteGraph, side: Side, use_weights: bool, louvain_seed: SeedLike) -> Measurement:
    if graph.is_empty():
        return Measurement(users_remaining=0, objects_remaining=0, edges=0)
    projected = project(graph, side)
    result = louvain(projected, louvain_seed, use_weights)
    return Measurement(
        users_remaining=graph.n_users,
        objects_remaining=graph.n_objects,
        edges=graph.n_edges,
        projected_edges=projected.n_edges,
        projected_density=projected_density(projected) if projected.n_nodes >= 2 else None,
        modularity=result.modularity,
        communities=result.partition.community_count if result.modularity is not None else None,
    )


_worker_graph: BipartiteGraph | None = None


def _init_worker(graph: BipartiteGraph) -> None:
    global _worker_graph
    _worker_graph = graph


def _replicate(task: tuple[int, int, int, int, str, bool]) -> tuple[int, int, Measurement]:
    master_seed, tau_index, replicate, removed, side, use_weights = task
    graph = _worker_graph
    assert graph is not None
    random_graph = random_baseline(graph, removed, (master_seed, tau_index, replicate, STREAM_REMOVAL))
    metrics = measure(random_graph, side, use_weights, (master_seed, tau_index, replicate, STREAM_LOUVAIN))
    return tau_index, replicate, metrics


def run_sweep(graph: BipartiteGraph, config: SweepConfig | None = None) -> SweepReport:
    config = config or SweepConfig()
    if graph.is_empty():
        raise EmptyGraphError("cannot sweep an empty graph")
    thresholds = config.effective_thresholds
    if not thresholds:
        raise InvalidArgumentError(f"no threshold at or below max_threshold={config.max_threshold}")

    weighted = tfidf_reweight(graph, log_base=config.log_base)
    m = weighted.n_edges
    logger.info(kv("sweep start", thresholds=len(thresholds), replicates=config.replicates,
                   edges=m, workers=config.workers, seed=config.master_seed))

    real: dict[int, tuple[int, Measurement]] = {}
    tasks: list[tuple[int, int, int, int, str, bool]] = []
    for t, tau in enumerate(thresholds):
        filtered = filter_by_threshold(weighted, tau)
        removed = filtered.edges_removed
        real[t] = (removed, measure(filtered.graph, config.projection_side, config.use_weights,
                                    (config.master_seed, t, 0, STREAM_LOUVAIN)))
        for r in range(1, config.replicates + 1):
            tasks.append((config.master_seed, t, r, removed, config.projection_side, config.use_weights))

    results: dict[tuple[int, int], Measurement] = {}
    if config.workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=min(config.workers, os.cpu_count() or 1),
                                 initializer=_init_worker, initargs=(weighted,)) as pool:
            for t, r, metrics in pool.map(_replicate, tasks, chunksize=max(1, len(tasks) // (4 * config.workers))):
                results[(t, r)] = metrics
    else:
        _init_worker(weighted)
        for task in tasks:
            t, r, metrics = _replicate(task)
            results[(t, r)] = metrics

    rows = []
    for t, tau in enumerate(thresholds):
        removed, measurement = real[t]
        row = SweepRow(
            tau=tau,
            edges_removed=removed,
            edges_removed_ratio=removed / m,
            real=measurement,
            random=[results[(t, r)] for r in range(1, config.replicates + 1)],
        )
        rows.append(row)
        logger.info(kv("threshold done", tau=tau, removed_ratio=round(row.edges_removed_ratio, 4),
                       real_q=measurement.modularity, random_q=row.random_modularity_mean))

    provenance = Provenance(
        master_seed=config.master_seed,
        content_hash=content_hash(graph),
        n_users=graph.n_users,
        n_objects=graph.n_objects,
        n_edges=graph.n_edges,
    )
    return SweepReport(config=config, provenance=provenance, rows=rows)


def _cell(value: Optional[float]) -> str:
    return "" if value is None else repr(float(value))


def write_report(report: SweepReport, directory: str | Path) -> list[Path]:
    """One CSV per series family plus ``report.json``."""
    directory = Path(directory)
    try:
        directory.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise InputError(f"cannot create output directory {directory}: {e.strerror or e}") from e
    written = []
    for name, metrics in SERIES_FILES.items():
        path = directory / name
        with open(path, "w", encoding="utf-8", newline="") as stream:
            writer = csv.writer(stream, lineterminator="\n")
            writer.writerow(CSV_COLUMNS)
            for metric in metrics:
                for point in report.series(metric):
                    writer.writerow([repr(point["tau"]), metric, _cell(point["real"]),
                                     _cell(point["random_mean"]), _cell(point["random_std"])])
        written.append(path)
    path = directory / "report.json"
    path.write_text(json.dumps(report.model_dump(mode="json"), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    written.append(path)
    logger.info(kv("report written", directory=directory, files=len(written)))
    return written
