import os
from pathlib import Path

import numpy as np
import pytest

from core.graph import BipartiteGraph
from core.rng import make_rng
from data.southern_women import southern_women

# users 1..5, objects a..f
TOY_TRIPLES = [
    ("1", "a", 3.0), ("1", "b", 2.0), ("1", "d", 2.0),
    ("2", "a", 1.0), ("2", "b", 2.0), ("2", "d", 1.0),
    ("3", "c", 2.0), ("3", "d", 1.0), ("3", "e", 1.0),
    ("4", "d", 1.0), ("4", "e", 3.0),
    ("5", "f", 2.0), ("5", "c", 1.0),
]


@pytest.fixture
def toy():
    return BipartiteGraph.from_triples(TOY_TRIPLES)


@pytest.fixture
def women():
    return southern_women()


def write_lines(path: Path, lines) -> Path:
    path.write_text("".join(f"{line}\n" for line in lines), encoding="utf-8")
    return path


@pytest.fixture
def toy_file(tmp_path):
    return write_lines(tmp_path / "toy.tsv", [f"{u}\t{o}\t{w:g}" for u, o, w in TOY_TRIPLES])


def random_bipartite(rng: np.random.Generator, max_users: int = 10, max_objects: int = 10,
                     integer_weights: bool = True) -> BipartiteGraph:
    """Small random graph in which every node has at least one edge."""
    n_u = int(rng.integers(1, max_users + 1))
    n_o = int(rng.integers(1, max_objects + 1))
    present = rng.random((n_u, n_o)) < rng.uniform(0.2, 0.8)
    for u in range(n_u):
        if not present[u].any():
            present[u, rng.integers(n_o)] = True
    for o in range(n_o):
        if not present[:, o].any():
            present[rng.integers(n_u), o] = True
    rows, cols = np.nonzero(present)
    if integer_weights:
        weights = rng.integers(1, 6, size=len(rows)).astype(float)
    else:
        weights = rng.uniform(0.1, 10.0, size=len(rows))
    return BipartiteGraph.build([f"u{i}" for i in range(n_u)], [f"o{j}" for j in range(n_o)], rows, cols, weights)


def set_partitions(items):
    """Every partition of ``items`` as a list of blocks."""
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for smaller in set_partitions(rest):
        for i in range(len(smaller)):
            yield smaller[:i] + [[first] + smaller[i]] + smaller[i + 1:]
        yield [[first]] + smaller


def dataset_path(name: str) -> Path | None:
    """Path from BIPARTITE_DATASET_<NAME>, if the dataset was supplied."""
    value = os.getenv(f"BIPARTITE_DATASET_{name.upper()}")
    return Path(value) if value else None


@pytest.fixture
def rng():
    return make_rng(12345)
