"""Shared helpers: exhaustive partition tables and synthetic posteriors."""

from functools import lru_cache

import numpy as np
import pytest

from postclust import (
    DrawMatrix,
    Metric,
    Partition,
    binder,
    enumerate_partitions,
    vi,
)


@lru_cache(maxsize=None)
def all_partitions(n: int) -> tuple[Partition, ...]:
    return tuple(enumerate_partitions(n))


@lru_cache(maxsize=None)
def distance_matrix(n: int, metric: Metric) -> np.ndarray:
    """Dense pairwise distances over every partition of n items."""
    parts = all_partitions(n)
    fn = vi if metric is Metric.VI else binder
    out = np.zeros((len(parts), len(parts)))
    for i, p in enumerate(parts):
        for j in range(i + 1, len(parts)):
            out[i, j] = out[j, i] = fn(p, parts[j])
    return out


@lru_cache(maxsize=None)
def partition_index(n: int) -> dict[tuple[int, ...], int]:
    return {p.labels: i for i, p in enumerate(all_partitions(n))}


def bell_numbers(limit: int) -> list[int]:
    """Bell numbers B_1..B_limit via the Bell triangle."""
    out = []
    row = [1]
    for _ in range(limit):
        nxt = [row[-1]]
        for v in row:
            nxt.append(nxt[-1] + v)
        row = nxt
        out.append(row[0])
    return out


def crp_row(rng: np.random.Generator, n: int, alpha: float = 1.0) -> list[int]:
    """One partition sampled sequentially from the CRP seating process."""
    labels = [0]
    counts = [1]
    for _ in range(1, n):
        total = len(labels) + alpha
        probs = np.array(counts + [alpha]) / total
        pick = int(rng.choice(len(probs), p=probs))
        if pick == len(counts):
            counts.append(1)
        else:
            counts[pick] += 1
        labels.append(pick)
    return labels


def synthetic_draws(
    rng: np.random.Generator,
    n: int,
    m: int,
    support: int | None = None,
) -> DrawMatrix:
    """Random posterior draws; with ``support`` set, draws resample from
    that many distinct partitions with random weights."""
    if support is None:
        rows = [crp_row(rng, n) for _ in range(m)]
        return DrawMatrix(np.asarray(rows, dtype=np.int64))
    pool = [crp_row(rng, n) for _ in range(support)]
    weights = rng.dirichlet(np.ones(len(pool)))
    picks = rng.choice(len(pool), size=m, p=weights)
    return DrawMatrix(np.asarray([pool[p] for p in picks], dtype=np.int64))


@pytest.fixture
def rng():
    return np.random.default_rng(20240814)
