"""Shared test helpers: independent brute-force oracles and random instances."""

from __future__ import annotations

import itertools

import numpy as np
import pytest

from scert.certificates import ClassDiff, ClassifierAtPoint, ClassWise, Uniform
from scert.geometry import FinitePoints


def brute_support(points: np.ndarray, direction: np.ndarray) -> float:
    """Support of a point cloud by direct enumeration."""
    return float(np.max(np.asarray(points) @ np.asarray(direction)))


def brute_pairwise_differences(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """All pairwise differences a_i - b_j (the sum with the negated set)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return (a[:, None, :] - b[None, :, :]).reshape(-1, a.shape[1])


def vertex_enum_max(objective, normals, offsets, tol=1e-9):
    """Maximum of objective over a bounded 2D halfspace intersection by
    enumerating pairwise line intersections (the LP test oracle)."""
    objective = np.asarray(objective, dtype=float)
    normals = np.asarray(normals, dtype=float)
    offsets = np.asarray(offsets, dtype=float)
    best = None
    m = normals.shape[0]
    for i, j in itertools.combinations(range(m), 2):
        mat = np.vstack([normals[i], normals[j]])
        if abs(np.linalg.det(mat)) < 1e-12:
            continue
        vertex = np.linalg.solve(mat, np.array([offsets[i], offsets[j]]))
        if np.all(normals @ vertex <= offsets + tol):
            value = float(objective @ vertex)
            if best is None or value > best:
                best = value
    return best


def unit_directions(n: int, dim: int = 2, seed: int = 0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    dirs = rng.standard_normal((n, dim))
    return dirs / np.linalg.norm(dirs, axis=1, keepdims=True)


def consistent_instance(rng: np.random.Generator, k: int = 3, sites: int = 30):
    """A random 2D instance whose class-wise, uniform, and class-difference
    gradient sets all come from the same per-site gradients, so the
    certificate lattice provably nests."""
    grads = rng.standard_normal((sites, k, 2))
    logits = rng.uniform(0.0, 1.0, size=k)
    top = int(np.argmax(logits))
    per_class = tuple(FinitePoints(grads[:, i, :]) for i in range(k))
    union = FinitePoints(grads.reshape(-1, 2))
    pairs = {}
    for i in range(k):
        for j in range(k):
            if i != j:
                pairs[(i, j)] = FinitePoints(grads[:, i, :] - grads[:, j, :])
    return {
        "logits": logits,
        "top": top,
        "uniform": ClassifierAtPoint(logits, Uniform(union)),
        "class_wise": ClassifierAtPoint(logits, ClassWise(per_class)),
        "class_diff": ClassifierAtPoint(logits, ClassDiff(pairs)),
        "gradients": grads,
    }


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
