"""Sublinear-expansion machinery: the expansion profile, robustness audits,
short path routing around forbidden sets, star packing, and units.

A unit is the tree-like gadget used to anchor one branch vertex of an
immersion: a center, edge-disjoint branch paths to a set of star centers,
and vertex-disjoint stars whose leaves form the unit's exterior.  Units are
built greedily; the construction is best-effort and every result is meant to
be validated by the independent certifier, never trusted from bookkeeping.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .errors import DomainError, InsufficientStarsError, NoPathError, UnitFailedError
from .graphs import Edge, Graph, GraphView, normalize_edge, view_minus
from .util import stream_rng


@dataclass(frozen=True)
class ExpanderParams:
    """Expansion profile parameters; k is the degree-scaled threshold."""

    eps1: float = 0.125
    eps2: float = 0.2
    k: float = 1.0


def rho(x: float, params: ExpanderParams) -> float:
    """Expansion ratio profile: 0 below k/5, else eps1 / ln^2(15x/k)."""
    if x < params.k / 5:
        return 0.0
    return params.eps1 / math.log(15 * x / params.k) ** 2


def mix_length_m(n: int, d: int, params: ExpanderParams) -> float:
    """Path-length scale (2/eps1) * ln^3(15n / (eps2 d))."""
    if n <= 0 or d <= 0:
        raise DomainError(f"need positive n, d; got n={n}, d={d}")
    ratio = 15 * n / (params.eps2 * d)
    if ratio <= 1:
        raise DomainError("eps2*d must stay below 15n")
    return (2 / params.eps1) * math.log(ratio) ** 3


@dataclass
class ExpansionAudit:
    """Sampled search for a robust-expansion counterexample."""

    passed: bool
    trials: int
    witness_set: Optional[tuple[int, ...]] = None
    witness_edges: Optional[tuple[Edge, ...]] = None


def _boundary_adversary(g: Graph, x_set: set[int], budget: int) -> tuple[set[Edge], set[int]]:
    """Delete boundary edges so as to erase outside neighbors greedily,
    cheapest neighbor (fewest edges into X) first; returns (deleted edges,
    surviving neighborhood)."""
    into: dict[int, list[Edge]] = {}
    for u in x_set:
        for w in g.neighbors(u):
            if w not in x_set:
                into.setdefault(w, []).append(normalize_edge(u, w))
    removed: set[Edge] = set()
    survivors = set(into)
    for w in sorted(into, key=lambda w: (len(into[w]), w)):
        if len(into[w]) <= budget:
            removed.update(into[w])
            budget -= len(into[w])
            survivors.discard(w)
        else:
            break
    return removed, survivors


def robust_expansion_audit(g: Graph, params: ExpanderParams, d_ref: float,
                           trials: int, seed: int) -> ExpansionAudit:
    """Try to refute robust expansion: sample subsets X in the admissible
    size window (random sets plus BFS balls), hit each with the greedy
    boundary adversary, and check the surviving neighborhood.

    Passing means no counterexample was found.
    """
    n = g.n
    lo = max(1, math.ceil(params.k / 2))
    hi = n // 2
    if lo > hi:
        return ExpansionAudit(passed=True, trials=0)
    rng = stream_rng(seed, "robust-expansion-audit")
    candidates: list[set[int]] = []
    verts = list(range(n))
    for _ in range(trials):
        size = rng.randint(lo, hi)
        candidates.append(set(rng.sample(verts, size)))
    for root in rng.sample(verts, min(n, max(1, trials // 4))):
        ball = [root]
        seen = {root}
        queue = deque([root])
        while queue and len(ball) < hi:
            u = queue.popleft()
            for w in g.neighbors(u):
                if w not in seen:
                    seen.add(w)
                    ball.append(w)
                    queue.append(w)
                    if len(ball) >= hi:
                        break
        if len(ball) >= lo:
            candidates.append(set(ball[:max(lo, min(len(ball), hi))]))
    checked = 0
    for x_set in candidates:
        if not (lo <= len(x_set) <= hi):
            continue
        checked += 1
        need = rho(len(x_set), params) * len(x_set)
        budget = int(d_ref * rho(len(x_set), params) * len(x_set))
        removed, survivors = _boundary_adversary(g, x_set, budget)
        if len(survivors) < need:
            return ExpansionAudit(passed=False, trials=checked,
                                  witness_set=tuple(sorted(x_set)),
                                  witness_edges=tuple(sorted(removed)))
    return ExpansionAudit(passed=True, trials=checked)


def short_avoiding_path(view: GraphView, x1: Iterable[int], x2: Iterable[int],
                        max_len: int) -> list[int]:
    """BFS-shortest path from X1 to X2 in the view, touching X1 and X2 only
    at its endpoints, of length at most max_len.

    Ties break toward ascending vertex ids, so the result is deterministic.
    A common active vertex of X1 and X2 yields the zero-length path.
    """
    x1_set = {v for v in x1 if view.contains_vertex(v)}
    x2_set = {v for v in x2 if view.contains_vertex(v)}
    if not x1_set or not x2_set:
        raise NoPathError(max_len, "empty endpoint set in the view")
    common = x1_set & x2_set
    if common:
        return [min(common)]
    parent: dict[int, int] = {}
    frontier = sorted(x1_set)
    visited = set(x1_set)
    depth = 0
    while frontier and depth < max_len:
        depth += 1
        nxt = []
        for u in frontier:
            for w in view.neighbors(u):
                if w in visited:
                    continue
                if w in x2_set:
                    path = [w, u]
                    while path[-1] not in x1_set:
                        path.append(parent[path[-1]])
                    path.reverse()
                    return path
                if w in x1_set:
                    continue  # other sources are not internal vertices
                visited.add(w)
                parent[w] = u
                nxt.append(w)
        frontier = sorted(nxt)
    raise NoPathError(max_len)


@dataclass(frozen=True)
class StarSpec:
    count: int
    size: int


@dataclass
class Star:
    center: int
    leaves: tuple[int, ...]

    def edges(self) -> list[Edge]:
        return [normalize_edge(self.center, leaf) for leaf in self.leaves]


def pack_stars(view: GraphView, specs: Sequence[StarSpec],
               order_seed: int | None = None) -> list[Star]:
    """Greedy vertex-disjoint star packing matching the specs in order.

    Candidate centers are tried in ascending (available degree, id) order,
    or in seeded random order when order_seed is given; leaves are the
    lowest-id available neighbors.  Raises when a spec cannot be filled,
    reporting the best leaf count seen for it.
    """
    used: set[int] = set()
    out: list[Star] = []
    for index, spec in enumerate(specs):
        for _ in range(spec.count):
            candidates = [v for v in view.active_vertices() if v not in used]
            if order_seed is None:
                candidates.sort(key=lambda v: (view.degree(v), v))
            else:
                rng = stream_rng(order_seed, f"pack-stars:{index}:{len(out)}")
                rng.shuffle(candidates)
            best_available = 0
            chosen = None
            for c in candidates:
                avail = [w for w in view.neighbors(c) if w not in used]
                best_available = max(best_available, len(avail))
                if len(avail) >= spec.size:
                    chosen = Star(c, tuple(sorted(avail)[:spec.size]))
                    break
            if chosen is None:
                raise InsufficientStarsError(index, best_available)
            used.add(chosen.center)
            used.update(chosen.leaves)
            out.append(chosen)
    return out


@dataclass
class Unit:
    """Center, edge-disjoint branch paths to star centers, and the stars.

    ``branches[i]`` runs from the center to ``stars[i].center``; the exterior
    is the union of the stored star leaves.
    """

    center: int
    branches: list[list[int]]
    stars: list[Star]
    h_params: tuple[int, int, int]

    @property
    def star_centers(self) -> list[int]:
        return [s.center for s in self.stars]

    def exterior(self) -> set[int]:
        out: set[int] = set()
        for s in self.stars:
            out.update(s.leaves)
        return out

    def branch_edges(self) -> set[Edge]:
        out: set[Edge] = set()
        for path in self.branches:
            out.update(normalize_edge(a, b) for a, b in zip(path, path[1:]))
        return out

    def pendant_edges(self) -> set[Edge]:
        out: set[Edge] = set()
        for s in self.stars:
            out.update(s.edges())
        return out

    def all_edges(self) -> set[Edge]:
        return self.branch_edges() | self.pendant_edges()

    def branch_vertices(self) -> set[int]:
        out: set[int] = set()
        for path in self.branches:
            out.update(path)
        return out

    def interior_vertices(self) -> set[int]:
        """Vertices strictly inside branch paths (center and star centers
        excluded)."""
        out: set[int] = set()
        for path in self.branches:
            out.update(path[1:-1])
        return out

    def to_json(self) -> str:
        payload = {
            "center": self.center,
            "branches": self.branches,
            "stars": [{"center": s.center, "leaves": list(s.leaves)} for s in self.stars],
        }
        return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def _build_unit_at(view: GraphView, center: int, h1: int, h2: int, h3: int,
                   n_stars: int) -> tuple[Optional[Unit], str]:
    """Attempt the unit construction from one candidate center.

    Returns (unit, stage_reached); unit is None on failure and the stage
    names where the construction ran out of room.
    """
    pool_view = GraphView(view.base,
                          view.removed_vertices | {center},
                          view.removed_edges, ())
    # stars first, centers in ascending (degree, id) order; each grabs up to
    # twice its required size so the prune step has slack
    used: set[int] = set()
    stars: list[Star] = []
    candidates = sorted(pool_view.active_vertices(),
                        key=lambda v: (pool_view.degree(v), v))
    for c in candidates:
        if len(stars) >= n_stars:
            break
        if c in used:
            continue
        avail = [w for w in pool_view.neighbors(c) if w not in used]
        if len(avail) >= h2:
            star = Star(c, tuple(sorted(avail)[:min(len(avail), 2 * h2)]))
            used.add(c)
            used.update(star.leaves)
            stars.append(star)
    if len(stars) < h1:
        return None, "stars"

    star_edges: set[Edge] = set()
    for s in stars:
        star_edges.update(s.edges())
    used_edges: set[Edge] = set()
    connected: list[tuple[Star, list[int]]] = []
    for star in stars:
        if len(connected) >= n_stars:
            break
        bfs_view = GraphView(view.base, view.removed_vertices,
                             view.removed_edges | frozenset(star_edges) |
                             frozenset(used_edges), ())
        try:
            path = short_avoiding_path(bfs_view, [center], [star.center], h3)
        except NoPathError:
            continue
        used_edges.update(normalize_edge(a, b) for a, b in zip(path, path[1:]))
        connected.append((star, path))
    if len(connected) < h1:
        return None, "connect"

    # prune: a star consumed by branch interiors loses its slot
    interiors: set[int] = set()
    for _, path in connected:
        interiors.update(path[1:-1])
    survivors: list[tuple[Star, list[int]]] = []
    for star, path in connected:
        eaten = sum(1 for leaf in star.leaves if leaf in interiors)
        if eaten * 2 >= len(star.leaves):
            continue
        free = [leaf for leaf in star.leaves if leaf not in interiors]
        if len(free) < h2:
            continue
        survivors.append((Star(star.center, tuple(free[:h2])), path))
    if len(survivors) < h1:
        return None, "prune"
    kept = survivors[:h1]
    return Unit(center, [path for _, path in kept], [s for s, _ in kept],
                (h1, h2, h3)), "done"


def build_unit(g: Graph, removed_vertices: Iterable[int], removed_edges: Iterable[Edge],
               h1: int, h2: int, h3: int, seed: int = 0,
               max_center_trials: int = 8) -> Unit:
    """Build one unit in the graph minus the forbidden vertex and edge sets.

    Candidate centers are tried by descending available degree (plus a few
    seeded extras); branch paths avoid forbidden vertices, star edges, and
    previously used edges, and stars half-eaten by branch interiors are
    discarded before the final trim to (h1, h2).
    """
    view = view_minus(g, removed_vertices, removed_edges)
    ranked = sorted(view.active_vertices(), key=lambda v: (-view.degree(v), v))
    candidates = ranked[:max_center_trials]
    extra_pool = ranked[max_center_trials:]
    if extra_pool:
        rng = stream_rng(seed, "build-unit-centers")
        candidates += rng.sample(extra_pool, min(4, len(extra_pool)))
    n_stars = h1 + max(1, h1 // 4)
    stage_rank = {"stars": 0, "connect": 1, "prune": 2}
    worst_stage = "stars"
    for center in candidates:
        unit, stage = _build_unit_at(view, center, h1, h2, h3, n_stars)
        if unit is not None:
            return unit
        if stage_rank[stage] > stage_rank[worst_stage]:
            worst_stage = stage
    raise UnitFailedError(worst_stage)


def collect_units(g: Graph, count: int, h1: int, h2: int, h3: int,
                  seed: int = 0) -> list[Unit]:
    """Collect up to ``count`` edge-disjoint units with distinct centers.

    Each unit is built in the graph minus all edges of its predecessors and
    minus their centers; stops early (without raising) when construction
    fails, leaving the partial collection to the caller.
    """
    units: list[Unit] = []
    forbidden_vertices: set[int] = set()
    forbidden_edges: set[Edge] = set()
    for i in range(count):
        try:
            unit = build_unit(g, forbidden_vertices, forbidden_edges,
                              h1, h2, h3, seed=seed + i)
        except UnitFailedError:
            break
        units.append(unit)
        forbidden_vertices.add(unit.center)
        forbidden_edges.update(unit.all_edges())
    return units
