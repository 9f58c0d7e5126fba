"""Standalone constructive gadgets: even cycles, vertex expansions,
length-adjusting connectors, and the bipartite clique immersion with
uniform length-4 paths.

An adjuster couples two expansion ends through a small center set that
realizes connector paths of k+1 consecutive even-spaced lengths; chaining
adjusters adds their flexibilities.  All constructions are best-effort and
meant to be validated by the certifier.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .certify import EmbeddingCertificate, IMMERSION
from .errors import (
    BadSizeError,
    ExpansionFailedError,
    NoConnectionError,
    NoEvenCycleError,
    NoPathError,
    PreconditionFailedError,
    StuckError,
)
from .expanders import short_avoiding_path
from .graphs import Graph, normalize_edge, view_minus
from .util import np_rng


def _parity_distances(view, target: int, banned_edge) -> dict[tuple[int, int], int]:
    """Shortest walk lengths to ``target`` by parity (bipartite double cover
    BFS); used as an admissible pruning bound for simple-path search."""
    dist: dict[tuple[int, int], int] = {(target, 0): 0}
    queue = deque([(target, 0)])
    while queue:
        v, par = queue.popleft()
        d = dist[(v, par)]
        for w in view.neighbors(v):
            if banned_edge and normalize_edge(v, w) == banned_edge:
                continue
            state = (w, par ^ 1)
            if state not in dist:
                dist[state] = d + 1
                queue.append(state)
    return dist


def _shortest_odd_path(view, start: int, target: int, banned_edge,
                       bound: int) -> Optional[list[int]]:
    """Shortest simple odd-length path start..target avoiding one edge,
    of length <= bound; DFS with parity-walk-distance pruning."""
    if bound < 1:
        return None
    dist = _parity_distances(view, target, banned_edge)
    best: Optional[list[int]] = None
    best_len = bound + 1
    path = [start]
    on_path = {start}

    def dfs(v: int, length: int) -> None:
        nonlocal best, best_len
        if v == target:
            if length % 2 == 1 and length < best_len:
                best = list(path)
                best_len = length
            return
        need_parity = (1 - length) % 2
        h = dist.get((v, need_parity))
        if h is None or length + h >= best_len:
            return
        for w in view.neighbors(v):
            if w in on_path:
                continue
            if banned_edge and normalize_edge(v, w) == banned_edge:
                continue
            path.append(w)
            on_path.add(w)
            dfs(w, length + 1)
            path.pop()
            on_path.remove(w)

    dfs(start, 0)
    return best


def shortest_even_cycle(g, cap: Optional[int] = None) -> Optional[list[int]]:
    """A simple cycle of minimum even length (optionally at most ``cap``),
    as a vertex list, or None.

    For every edge (u, v) the shortest odd simple u-v path avoiding that
    edge closes into an even cycle; the global minimum over edges is exact.
    """
    n = g.n if isinstance(g, Graph) else g.base.n
    limit = min(cap, n) if cap is not None else n
    if limit < 4:
        return None
    best: Optional[list[int]] = None
    best_len = limit + 1
    for u, v in g.edges():
        path = _shortest_odd_path(g, u, v, (u, v), best_len - 1)
        if path is not None and len(path) < best_len:
            best = path
            best_len = len(path)
            if best_len == 4:
                break
    return best


@dataclass(frozen=True)
class Expansion:
    """A root plus vertices listed in BFS discovery order, every one within
    the growth radius of the root inside the induced subgraph."""

    root: int
    vertices: tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.vertices)


def grow_expansion(view, root: int, size: int, radius: int,
                   forbidden: Iterable[int] = ()) -> Expansion:
    """BFS-grow an expansion of the root to the requested size."""
    banned = set(forbidden)
    if not view.contains_vertex(root) or root in banned:
        raise ExpansionFailedError(f"root {root} unavailable")
    order = [root]
    seen = {root}
    frontier = [root]
    depth = 0
    while len(order) < size and frontier and depth < radius:
        depth += 1
        nxt = []
        for u in frontier:
            for w in view.neighbors(u):
                if w in seen or w in banned:
                    continue
                seen.add(w)
                order.append(w)
                nxt.append(w)
                if len(order) == size:
                    break
            if len(order) == size:
                break
        frontier = nxt
    if len(order) < size:
        raise ExpansionFailedError(f"only {len(order)} of {size} vertices within radius {radius}")
    return Expansion(root, tuple(order))


def trim_expansion(expansion: Expansion, new_size: int) -> Expansion:
    """Prefix of the BFS order: still an expansion of the same root, with
    all root distances preserved."""
    if not (1 <= new_size <= expansion.size):
        raise BadSizeError(f"size {new_size} outside 1..{expansion.size}")
    return Expansion(expansion.root, expansion.vertices[:new_size])


@dataclass
class Adjuster:
    """Two cores with expansion ends and a center set realizing connector
    paths of lengths ell, ell+2, ..., ell+2k."""

    u1: int
    u2: int
    end1: Expansion
    end2: Expansion
    center: tuple[int, ...]
    k: int
    ell: int
    realizers: list[list[int]]
    d_size: int
    m: int

    def vertices(self) -> set[int]:
        return set(self.center) | set(self.end1.vertices) | set(self.end2.vertices)

    def to_json(self) -> str:
        payload = {
            "u1": self.u1,
            "u2": self.u2,
            "ends": [list(self.end1.vertices), list(self.end2.vertices)],
            "A": sorted(self.center),
            "k": self.k,
            "ell": self.ell,
            "realizers": self.realizers,
        }
        return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def _canonical_cycle(cycle: list[int]) -> list[int]:
    """Rotate/reflect so the minimum id leads and its smaller neighbor follows."""
    i = cycle.index(min(cycle))
    rot = cycle[i:] + cycle[:i]
    if rot[-1] < rot[1]:
        rot = [rot[0]] + rot[1:][::-1]
    return rot


def build_1_adjuster(g: Graph, removed_vertices: Iterable[int] = (),
                     removed_edges: Iterable[tuple[int, int]] = (),
                     d_size: int = 1, m: int = 1,
                     cycle_cap: Optional[int] = None) -> Adjuster:
    """Seed adjuster from a shortest even cycle: the two cores sit at
    distance r-1 along a 2r-cycle, the two arcs realize lengths r-1 and r+1,
    and the ends are expansions grown off the cycle.

    The cycle cap defaults to m/16 when that is at least 4 (the asymptotic
    regime) and is otherwise unbounded, so small hosts stay usable.
    """
    view = view_minus(g, removed_vertices, removed_edges)
    if cycle_cap is None:
        cycle_cap = m // 16 if m // 16 >= 4 else None
    cycle = shortest_even_cycle(view, cycle_cap)
    if cycle is None:
        raise NoEvenCycleError(f"no even cycle within cap {cycle_cap}")
    cycle = _canonical_cycle(cycle)
    r = len(cycle) // 2
    v1 = cycle[0]
    v2 = cycle[r - 1]
    arc_short = cycle[:r]
    arc_long = [cycle[0]] + cycle[r - 1:][::-1]
    center = tuple(sorted(set(cycle) - {v1, v2}))
    off_cycle = set(cycle)
    end1 = grow_expansion(view, v1, d_size, m, forbidden=off_cycle - {v1})
    end2 = grow_expansion(view, v2, d_size, m,
                          forbidden=(off_cycle - {v2}) | set(end1.vertices))
    return Adjuster(u1=v1, u2=v2, end1=end1, end2=end2, center=center,
                    k=1, ell=r - 1, realizers=[arc_short, arc_long],
                    d_size=d_size, m=m)


def _orient(path: list[int], first: int) -> list[int]:
    return list(path) if path[0] == first else list(reversed(path))


def _path_inside(view, members: set[int], start: int, target: int) -> list[int]:
    """BFS path between two vertices staying inside a vertex set."""
    if start == target:
        return [start]
    parent = {start: None}
    frontier = [start]
    while frontier:
        nxt = []
        for u in sorted(frontier):
            for w in view.neighbors(u):
                if w not in members or w in parent:
                    continue
                parent[w] = u
                if w == target:
                    out = [w]
                    while parent[out[-1]] is not None:
                        out.append(parent[out[-1]])
                    return out[::-1]
                nxt.append(w)
        frontier = nxt
    raise NoConnectionError(f"end not internally connected from {start} to {target}")


def chain_adjusters(g: Graph, first: Adjuster, second: Optional[Adjuster],
                    removed_vertices: Iterable[int] = (),
                    removed_edges: Iterable[tuple[int, int]] = (),
                    m: int = 1) -> Adjuster:
    """Link one end of each adjuster by a short path, producing an adjuster
    whose flexibility is the sum of the two.

    The connector is extended through the used ends to their cores; the new
    center set is both old centers plus the connector, and the composed
    realizers cover every length ell+2i for i = 0..k1+k2.
    """
    if second is None:
        return first
    if first.vertices() & second.vertices():
        raise NoConnectionError("adjusters must be vertex-disjoint")
    centers = set(first.center) | set(second.center)
    view = view_minus(g, set(removed_vertices) | centers, removed_edges)
    x1 = set(first.end1.vertices) | set(first.end2.vertices)
    x2 = set(second.end1.vertices) | set(second.end2.vertices)
    try:
        mid = short_avoiding_path(view, x1, x2, max_len=m)
    except NoPathError as err:
        raise NoConnectionError(str(err)) from err

    used1 = first.end1 if mid[0] in set(first.end1.vertices) else first.end2
    new_end1 = first.end2 if used1 is first.end1 else first.end1
    core_used1 = used1.root
    core_new1 = first.u2 if core_used1 == first.u1 else first.u1
    used2 = second.end1 if mid[-1] in set(second.end1.vertices) else second.end2
    new_end2 = second.end2 if used2 is second.end1 else second.end1
    core_used2 = used2.root
    core_new2 = second.u2 if core_used2 == second.u1 else second.u1

    head = _path_inside(view, set(used1.vertices), core_used1, mid[0])
    tail = _path_inside(view, set(used2.vertices), mid[-1], core_used2)
    connector = head + mid[1:] + tail[1:] if len(mid) > 1 else head + tail[1:]
    if len(set(connector)) != len(connector):
        raise NoConnectionError("connector revisits a vertex")

    k_new = first.k + second.k
    ell_new = first.ell + second.ell + (len(connector) - 1)
    realizers: list[list[int]] = []
    for i in range(k_new + 1):
        i1 = min(i, first.k)
        i2 = i - i1
        part1 = _orient(first.realizers[i1], core_new1)
        part2 = _orient(second.realizers[i2], core_used2)
        rev_connector = connector if connector[0] == core_used1 else connector[::-1]
        composed = part1 + rev_connector[1:] + part2[1:]
        if len(set(composed)) != len(composed):
            raise NoConnectionError("composed realizer is not simple")
        realizers.append(composed)

    center_new = tuple(sorted((centers | set(connector)) - {core_new1, core_new2}))
    d_new = min(first.d_size, second.d_size)
    if new_end1.size > d_new:
        new_end1 = trim_expansion(new_end1, d_new)
    if new_end2.size > d_new:
        new_end2 = trim_expansion(new_end2, d_new)
    m_new = max(first.m, second.m, m)
    if len(center_new) > 10 * m_new * k_new:
        m_new = math.ceil(len(center_new) / (10 * k_new))
    return Adjuster(u1=core_new1, u2=core_new2, end1=new_end1, end2=new_end2,
                    center=center_new, k=k_new, ell=ell_new,
                    realizers=realizers, d_size=d_new, m=m_new)


def bipartite_k3_immersion(g: Graph, a_side: Sequence[int], b_side: Sequence[int],
                           p: int, seed: int = 0,
                           mode: str = "best-effort") -> EmbeddingCertificate:
    """Clique immersion with p branch vertices on one side of a bipartite
    graph, every connecting path of length exactly 4.

    A hub b is chosen by exact scoring over a seeded candidate set
    (neighborhood size squared against the bad-pair count); branch vertices
    come from hub neighbors without too many low-codegree partners, and each
    pair is joined through a lightly-loaded middle vertex by a path
    u - b_i - a - b_j - v with globally edge-disjoint steps.
    """
    a_list = sorted(set(a_side))
    b_list = sorted(set(b_side))
    n1, n2 = len(a_list), len(b_list)
    if p < 0 or n1 == 0 or n2 == 0:
        raise PreconditionFailedError("need nonempty sides and p >= 0")
    a_pos = {v: i for i, v in enumerate(a_list)}
    mat = np.zeros((n1, n2), dtype=np.float32)
    b_pos = {v: i for i, v in enumerate(b_list)}
    for i, u in enumerate(a_list):
        for w in g.neighbors(u):
            j = b_pos.get(w)
            if j is not None:
                mat[i, j] = 1.0
    alpha = float(mat.sum()) / (n1 * n2)
    if mode == "strict":
        bound = min(alpha * n1 / 16, alpha * alpha * n2 / 192)
        if p > bound:
            raise PreconditionFailedError(f"p={p} exceeds the density bound {bound:.3f}")
    if p <= 1:
        branch = a_list[:p]
        return EmbeddingCertificate(kind=IMMERSION, branch=branch, pairs={}, ell=3)

    rng = np_rng(seed, "k3-hub")
    if n2 <= 64:
        candidates = list(range(n2))
    else:
        candidates = sorted(rng.choice(n2, size=64, replace=False).tolist())
    ex = alpha * n1
    ey = max(3 * p * n1 * n1 / (2 * n2), 1e-12)
    best_score = -math.inf
    best_j = candidates[0]
    for j in candidates:
        col = mat[:, j]
        x = float(col.sum())
        rows = np.nonzero(col)[0]
        if rows.size:
            codeg = mat[rows] @ mat[rows].T
            bad = (codeg < 3 * p)
            np.fill_diagonal(bad, False)
            y = float(bad.sum()) / 2
        else:
            y = 0.0
        score = x * x - (ex * ex / (2 * ey)) * y
        if score > best_score:
            best_score = score
            best_j = j
    hub = b_list[best_j]
    rows = np.nonzero(mat[:, best_j])[0]
    codeg = mat[rows] @ mat[rows].T
    bad = (codeg < 3 * p)
    np.fill_diagonal(bad, False)
    bad_counts = bad.sum(axis=1)
    keep = rows[bad_counts <= len(rows) / 16]
    a2 = [a_list[i] for i in keep.tolist()]
    if len(a2) < p:
        raise PreconditionFailedError(
            f"hub {hub} leaves only {len(a2)} usable branch candidates for p={p}")
    branch = a2[:p]
    pool = a2[p:]
    codeg_of = {a_list[i]: {a_list[j]: int(codeg[ri, rj])
                            for rj, j in enumerate(rows.tolist())}
                for ri, i in enumerate(rows.tolist())}

    used_edges: set[tuple[int, int]] = set()
    used_b: set[int] = set()
    occupancy = {a: 0 for a in pool}
    pairs: dict[tuple[int, int], list[int]] = {}
    for i in range(p):
        for j in range(i + 1, p):
            u, v = branch[i], branch[j]
            path = None
            for a in pool:
                if codeg_of[u].get(a, 0) < 3 * p or codeg_of[v].get(a, 0) < 3 * p:
                    continue
                if occupancy[a] > p:
                    continue
                na = set(g.neighbors(a))
                bi = next((w for w in g.neighbors(u)
                           if w in na and normalize_edge(u, w) not in used_edges
                           and normalize_edge(a, w) not in used_edges), None)
                if bi is None:
                    continue
                bj = next((w for w in g.neighbors(v)
                           if w in na and w != bi
                           and normalize_edge(v, w) not in used_edges
                           and normalize_edge(a, w) not in used_edges), None)
                if bj is None:
                    continue
                path = [u, bi, a, bj, v]
                break
            if path is None:
                raise StuckError((u, v))
            for x, y in zip(path, path[1:]):
                used_edges.add(normalize_edge(x, y))
            for w in (path[1], path[3]):
                if w not in used_b:
                    used_b.add(w)
                    for a in pool:
                        if g.has_edge(a, w):
                            occupancy[a] += 1
            pairs[(i, j)] = path
    return EmbeddingCertificate(kind=IMMERSION, branch=branch, pairs=pairs, ell=3)
