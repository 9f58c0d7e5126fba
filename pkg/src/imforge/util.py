"""Seed derivation and shared RNG plumbing.

A single 64-bit root seed reproduces a whole run: every stochastic stage
derives its own stream seed by hashing the root together with a fixed label,
so adding a stage never perturbs the streams of existing ones.
"""

from __future__ import annotations

import hashlib
import random

import numpy as np

MASK64 = (1 << 64) - 1


def derive_seed(root: int, label: str) -> int:
    """Derive a 64-bit stream seed from a root seed and a label."""
    digest = hashlib.sha256(f"{root & MASK64}:{label}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def stream_rng(root: int, label: str) -> random.Random:
    return random.Random(derive_seed(root, label))


def np_rng(root: int, label: str) -> np.random.Generator:
    return np.random.default_rng(derive_seed(root, label))


def peel_to_complete(vertices: list[int], connected: set[tuple[int, int]]) -> list[int]:
    """Largest-effort subset whose pairs are all in ``connected``.

    Greedy peeling: repeatedly drop the vertex with the most missing pairs
    (ties to the higher id, so low ids survive), until no pair is missing.
    ``connected`` holds unordered pairs of vertex ids.
    """
    alive = list(vertices)
    norm = {tuple(sorted(p)) for p in connected}
    while True:
        missing: dict[int, int] = {v: 0 for v in alive}
        bad = 0
        for i, u in enumerate(alive):
            for v in alive[i + 1:]:
                if tuple(sorted((u, v))) not in norm:
                    missing[u] += 1
                    missing[v] += 1
                    bad += 1
        if bad == 0:
            return alive
        worst = max(alive, key=lambda v: (missing[v], v))
        alive.remove(worst)
