"""Graph sources: random regular graphs, quadratic-residue graphs, files.

Random regular generation uses the stub-pairing model with the usual repair
loop (collided stubs go back into the pot and are reshuffled); for degrees
above n/2 the complement is generated instead.  Everything is a pure
function of its arguments and the seed.
"""

from __future__ import annotations

import os

from .errors import BadModulusError, GenerationFailedError, ParityError
from .graphs import Graph, build_graph, format_edge_list, parse_edge_list
from .util import stream_rng


def _pairing_attempt(n: int, d: int, rng) -> set[tuple[int, int]] | None:
    """One pairing-model attempt; returns None when stuck."""
    edges: set[tuple[int, int]] = set()
    stubs = list(range(n)) * d
    while stubs:
        rng.shuffle(stubs)
        leftovers: list[int] = []
        it = iter(stubs)
        for s1, s2 in zip(it, it):
            if s1 > s2:
                s1, s2 = s2, s1
            if s1 != s2 and (s1, s2) not in edges:
                edges.add((s1, s2))
            else:
                leftovers += [s1, s2]
        if len(leftovers) == len(stubs):
            # no progress is possible iff every leftover pair collides
            ok = False
            distinct = sorted(set(leftovers))
            for i, a in enumerate(distinct):
                for b in distinct[i + 1:]:
                    if (a, b) not in edges:
                        ok = True
                        break
                if ok:
                    break
            if not ok:
                return None
        stubs = leftovers
    return edges


def random_regular(n: int, d: int, seed: int) -> Graph:
    """Uniform-ish simple d-regular graph on n vertices, deterministic in seed."""
    if not (0 < d < n):
        raise ParityError(f"need 0 < d < n, got d={d}, n={n}")
    if (n * d) % 2 != 0:
        raise ParityError(f"n*d must be even, got n={n}, d={d}")
    if d > n // 2:
        comp = random_regular(n, n - 1 - d, seed) if n - 1 - d > 0 else build_graph(n, [])
        return comp.complement()
    rng = stream_rng(seed, f"random-regular:{n}:{d}")
    budget = max(100, 100 * n // max(1, d))
    for _ in range(budget):
        edges = _pairing_attempt(n, d, rng)
        if edges is not None:
            return build_graph(n, edges)
    raise GenerationFailedError(f"no simple {d}-regular graph found in {budget} attempts")


def _is_prime(q: int) -> bool:
    if q < 2:
        return False
    if q % 2 == 0:
        return q == 2
    # deterministic Miller-Rabin for 64-bit inputs
    d, r = q - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if a % q == 0:
            continue
        x = pow(a, d, q)
        if x in (1, q - 1):
            continue
        for _ in range(r - 1):
            x = x * x % q
            if x == q - 1:
                break
        else:
            return False
    return True


def paley(q: int) -> Graph:
    """Quadratic-residue graph on a prime q = 1 (mod 4): a ~ b iff a - b is
    a nonzero square mod q.  Degree (q-1)/2."""
    if not _is_prime(q) or q % 4 != 1:
        raise BadModulusError(f"q={q} is not a prime congruent to 1 mod 4")
    residues = {(x * x) % q for x in range(1, q)}
    edges = [(a, b) for a in range(q) for b in range(a + 1, q) if (b - a) % q in residues]
    return build_graph(q, edges)


def load_graph(path: str | os.PathLike) -> Graph:
    """Read a graph from the canonical edge-list text format."""
    with open(path, "r", encoding="ascii") as fh:
        return parse_edge_list(fh.read())


def save_graph(g: Graph, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(format_edge_list(g))
