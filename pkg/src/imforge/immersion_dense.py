"""Dense-case clique immersion: partition the host, replace non-adjacent
pairs inside the branch set by length-2 paths through dedicated middle
parts (triangle matching per color class of a round-robin factorization),
then link the leftovers greedily by paths of length three.

All path families (lengths 1, 2, 3) stay globally edge-disjoint through a
single shared ledger of used edges.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .certify import IMMERSION, EmbeddingCertificate
from .errors import (
    DegenerateTError,
    IncompleteEmbeddingError,
    PreconditionFailedError,
)
from .graphs import Edge, Graph, build_graph, normalize_edge, pair_density
from .nibble import edge_disjoint_triangles
from .spectral import SpectralReport
from .util import derive_seed, peel_to_complete

STRICT = "strict"
BEST_EFFORT = "best-effort"


@dataclass
class PartitionScheme:
    """Branch set F split into cells of size t, remainder into cells of
    size s; cell 0 on each side holds the short leftover."""

    n: int
    d: int
    eta: float
    c: float
    q: float
    f: int
    t: int
    s: int
    m1: int
    m2: int
    v_parts: list[tuple[int, ...]]
    u_parts: list[tuple[int, ...]]

    @property
    def f_set(self) -> tuple[int, ...]:
        return tuple(v for part in self.v_parts for v in part)


def dense_partition(g: Graph, report: SpectralReport, eta: float,
                    seed: int = 0) -> PartitionScheme:
    """Formula-exact partition sizes; F is the lowest-id block and both
    sides are split sequentially (the seed is reserved for future shuffled
    variants)."""
    n, d = g.n, report.d
    c = d / n
    q = 1 - c
    f = math.floor((1 - eta) * d)
    t = math.floor(c * eta * eta * d / 10)
    if t < 1:
        raise DegenerateTError(f"cell size t = 0 for d={d}, eta={eta}")
    m1 = f // t
    s = math.ceil(q * t / c)
    m2 = (n - f) // s
    f_verts = list(range(f))
    v0_size = f - m1 * t
    v_parts = [tuple(f_verts[:v0_size])]
    for i in range(m1):
        v_parts.append(tuple(f_verts[v0_size + i * t: v0_size + (i + 1) * t]))
    rest = list(range(f, n))
    u0_size = (n - f) - m2 * s
    u_parts = [tuple(rest[:u0_size])]
    for j in range(m2):
        u_parts.append(tuple(rest[u0_size + j * s: u0_size + (j + 1) * s]))
    return PartitionScheme(n=n, d=d, eta=eta, c=c, q=q, f=f, t=t, s=s,
                           m1=m1, m2=m2, v_parts=v_parts, u_parts=u_parts)


@dataclass
class RedBlackGraph:
    """Cross-part complement pairs inside F (red), host edges leaving F
    (black), and the leftover bucket of intra-part or cell-0 pairs."""

    scheme: PartitionScheme
    red: dict[tuple[int, int], list[Edge]]
    black: frozenset[Edge]
    e0: list[Edge]

    @property
    def red_total(self) -> int:
        return sum(len(v) for v in self.red.values())

    def e0_bound(self) -> float:
        sch = self.scheme
        return sch.t * sch.f + sch.m1 * sch.t * (sch.t - 1) / 2


def build_red_black(g: Graph, scheme: PartitionScheme) -> RedBlackGraph:
    f_set = set(scheme.f_set)
    black = set()
    for u in f_set:
        for w in g.neighbors(u):
            if w not in f_set:
                black.add(normalize_edge(u, w))
    red: dict[tuple[int, int], list[Edge]] = {}
    for j in range(1, scheme.m1 + 1):
        for k in range(j + 1, scheme.m1 + 1):
            pairs = [normalize_edge(a, b)
                     for a in scheme.v_parts[j] for b in scheme.v_parts[k]
                     if not g.has_edge(a, b)]
            if pairs:
                red[(j, k)] = sorted(pairs)
    e0 = []
    v0 = set(scheme.v_parts[0])
    for part in scheme.v_parts[1:]:
        for i, a in enumerate(part):
            for b in part[i + 1:]:
                if not g.has_edge(a, b):
                    e0.append(normalize_edge(a, b))
    for a in sorted(v0):
        for b in scheme.f_set:
            if b > a and not g.has_edge(a, b):
                e0.append(normalize_edge(a, b))
    return RedBlackGraph(scheme=scheme, red=red, black=frozenset(black),
                         e0=sorted(set(e0)))


@dataclass
class Factorization:
    """Proper edge coloring of the complete graph on part labels 1..m1."""

    m1: int
    classes: list[list[tuple[int, int]]]

    @property
    def chi(self) -> int:
        return len(self.classes)


def one_factorization(m1: int) -> Factorization:
    """Round-robin (circle method) coloring: m1 - 1 perfect matchings for
    even m1, m1 near-perfect matchings for odd m1."""
    if m1 < 2:
        raise ValueError("need at least two parts")
    classes: list[list[tuple[int, int]]] = []
    if m1 % 2 == 0:
        mod = m1 - 1
        for r in range(mod):
            cls = [(min(m1 - 1, r) + 1, max(m1 - 1, r) + 1)]
            for i in range(1, m1 // 2):
                a = (r + i) % mod
                b = (r - i) % mod
                cls.append((min(a, b) + 1, max(a, b) + 1))
            classes.append(sorted(cls))
    else:
        for r in range(m1):
            cls = []
            for i in range(1, (m1 + 1) // 2):
                a = (r + i) % m1
                b = (r - i) % m1
                cls.append((min(a, b) + 1, max(a, b) + 1))
            classes.append(sorted(cls))
    return Factorization(m1=m1, classes=classes)


def replace_red_edges(g: Graph, rb: RedBlackGraph, fact: Factorization,
                      beta: float = 0.2, seed: int = 0,
                      used: Optional[set[Edge]] = None,
                      ) -> tuple[dict[Edge, list[int]], list[Edge], dict]:
    """Replace red pairs by length-2 paths with both steps leaving F.

    Color class i works inside the middle cell U_i (cells are reused
    round-robin when there are fewer cells than classes, with the shared
    ledger keeping everything edge-disjoint).  Returns (replacements keyed
    by red pair, un-replaced red pairs, counters).
    """
    sch = rb.scheme
    if used is None:
        used = set()
    two_paths: dict[Edge, list[int]] = {}
    leftovers: list[Edge] = []
    reused_cells = sch.m2 < fact.chi
    for ci, cls in enumerate(fact.classes, start=1):
        if sch.m2 < 1:
            break
        u_idx = ci if not reused_cells else (ci - 1) % sch.m2 + 1
        u_cell = sch.u_parts[u_idx]
        for (j, k) in cls:
            reds = rb.red.get((j, k), [])
            if not reds:
                continue
            vj, vk = sch.v_parts[j], sch.v_parts[k]
            local = list(vj) + list(vk) + list(u_cell)
            pos = {v: i for i, v in enumerate(local)}
            edges = [(pos[a], pos[b]) for a, b in reds]
            for side in (vj, vk):
                for a in side:
                    for u in u_cell:
                        e = normalize_edge(a, u)
                        if e in rb.black and e not in used:
                            edges.append((pos[a], pos[u]))
            mini = build_graph(len(local), edges)
            parts = (range(len(vj)),
                     range(len(vj), len(vj) + len(vk)),
                     range(len(vj) + len(vk), len(local)))
            triangles, _, _ = edge_disjoint_triangles(
                mini, parts, beta=beta,
                seed=derive_seed(seed, f"red-replace:{ci}:{j}:{k}"))
            replaced: set[Edge] = set()
            for tri in triangles:
                back = sorted(local[x] for x in tri)
                a = next(v for v in back if v in set(vj))
                b = next(v for v in back if v in set(vk))
                u = next(v for v in back if v in set(u_cell))
                pair = normalize_edge(a, b)
                two_paths[pair] = [pair[0], u, pair[1]]
                used.add(normalize_edge(a, u))
                used.add(normalize_edge(b, u))
                replaced.add(pair)
            leftovers.extend(p for p in reds if p not in replaced)
    counters = {"reds_total": rb.red_total,
                "reds_replaced_2path": len(two_paths),
                "cells_reused": reused_cells}
    return two_paths, sorted(leftovers), counters


def greedy_three_paths(g: Graph, pairs: Sequence[Edge], used: set[Edge],
                       f_set: Iterable[int],
                       cap_per_vertex: Optional[int] = None,
                       ) -> tuple[dict[Edge, list[int]], list[Edge]]:
    """Link pairs inside F by paths of length three through outside
    vertices, falling back to a length-2 path when the free neighborhoods
    intersect; every edge is taken from and recorded in ``used``.

    ``cap_per_vertex`` optionally limits how many paths may pass through
    one outside vertex.
    """
    f_members = set(f_set)
    free_nbrs: dict[int, set[int]] = {}

    def free_of(v: int) -> set[int]:
        if v not in free_nbrs:
            free_nbrs[v] = {w for w in g.neighbors(v)
                            if w not in f_members
                            and normalize_edge(v, w) not in used}
        return free_nbrs[v]

    def consume(a: int, b: int) -> None:
        e = normalize_edge(a, b)
        used.add(e)
        for x, y in ((a, b), (b, a)):
            if x in free_nbrs and y in free_nbrs[x]:
                free_nbrs[x].discard(y)

    load: dict[int, int] = {}

    def loaded(v: int) -> bool:
        return cap_per_vertex is not None and load.get(v, 0) >= cap_per_vertex

    out: dict[Edge, list[int]] = {}
    stuck: list[Edge] = []
    for pair in pairs:
        u, v = pair
        nu, nv = free_of(u), free_of(v)
        common = sorted(w for w in nu & nv if not loaded(w))
        path = None
        if common:
            w = common[0]
            path = [u, w, v]
        else:
            for a in sorted(nu):
                if loaded(a):
                    continue
                hits = nv.intersection(g.neighbors(a))
                for b in sorted(hits):
                    if loaded(b) or normalize_edge(a, b) in used:
                        continue
                    path = [u, a, b, v]
                    break
                if path:
                    break
        if path is None:
            stuck.append(pair)
            continue
        for x, y in zip(path, path[1:]):
            consume(x, y)
        for w in path[1:-1]:
            load[w] = load.get(w, 0) + 1
        out[pair] = path
    return out, stuck


@dataclass
class DenseDiagnostics:
    n: int
    d: int
    lam: float
    eta: float
    t: int
    m1: int
    m2: int
    reds_total: int
    reds_replaced_2path: int
    pairs_3path: int
    stuck: int
    achieved_order: int
    epsilon: float = 0.0
    delta: float = 0.0
    k_required: float = 0.0
    gap_ok: bool = False
    degenerate_fallback: bool = False


def regularity_prerequisites(c: float, eta: float) -> tuple[float, float, float]:
    """(epsilon, delta, K) governing the partition-regularity hypotheses."""
    eps = min(c, 1 - c, eta) ** 2 / 64
    delta = min(c * eta * eta, (1 - c) * eta * eta) / 20
    k_required = 10 / (eps * eps * delta)
    return eps, delta, k_required


def audit_partition_regularity(g: Graph, scheme: PartitionScheme, eps: float,
                               sample: int = 8) -> list[dict]:
    """Report pair densities of sampled cells against the c and q targets;
    data for diagnostics, not assertions (small hosts routinely miss)."""
    rows = []
    checked = 0
    for j in range(1, scheme.m1 + 1):
        for k in range(j + 1, scheme.m1 + 1):
            if checked >= sample:
                return rows
            dens = pair_density(g, scheme.v_parts[j], scheme.v_parts[k])
            rows.append({"pair": (f"V{j}", f"V{k}"), "density": dens,
                         "target": scheme.c, "within": abs(dens - scheme.c) <= eps,
                         "complement_density": 1 - dens,
                         "complement_target": scheme.q})
            checked += 1
    return rows


def build_dense_immersion(g: Graph, report: SpectralReport, eta: float,
                          seed: int = 0, mode: str = BEST_EFFORT,
                          beta: Optional[float] = None,
                          ) -> tuple[EmbeddingCertificate, DenseDiagnostics]:
    """Clique immersion over the branch set F with paths of lengths 1-3.

    Host edges inside F serve directly as length-1 paths; cross-cell
    complement pairs are replaced by 2-paths through the middle cells; the
    rest is linked by the greedy 3-path stage.  Strict mode fails on any
    degenerate parameter or unlinked pair; best-effort peels the branch set
    to the largest fully connected subset.
    """
    c = report.d / g.n
    eps, delta, k_required = regularity_prerequisites(c, eta)
    gap_ok = report.d >= k_required * report.lam
    if beta is None:
        beta = max(min(c * eta * eta / 10, 0.9), 0.01)
    scheme = None
    degenerate = False
    try:
        scheme = dense_partition(g, report, eta, seed)
    except DegenerateTError:
        if mode == STRICT:
            raise PreconditionFailedError(
                f"degenerate cell size for d={report.d}, eta={eta}") from None
        degenerate = True
    if mode == STRICT and not gap_ok:
        raise PreconditionFailedError(
            f"need d >= K*lambda with K={k_required:.1f}, have d={report.d}, "
            f"lambda={report.lam:.3f}")

    if scheme is not None:
        f_list = list(scheme.f_set)
    else:
        f_list = list(range(math.floor((1 - eta) * report.d)))
    f_set = set(f_list)
    used: set[Edge] = {normalize_edge(u, v) for u in f_list for v in g.neighbors(u)
                       if v in f_set}
    paths: dict[Edge, list[int]] = {}
    for e in sorted(used):
        paths[e] = [e[0], e[1]]

    two_paths: dict[Edge, list[int]] = {}
    leftovers: list[Edge] = []
    counters = {"reds_total": 0, "reds_replaced_2path": 0}
    if scheme is not None and scheme.m1 >= 2:
        rb = build_red_black(g, scheme)
        fact = one_factorization(scheme.m1)
        if mode == STRICT and scheme.m2 < fact.chi:
            raise PreconditionFailedError(
                f"need m2 >= chi, got m2={scheme.m2}, chi={fact.chi}")
        two_paths, leftovers, counters = replace_red_edges(
            g, rb, fact, beta=beta, seed=seed, used=used)
        leftovers = sorted(set(leftovers) | set(rb.e0))
    else:
        leftovers = sorted(normalize_edge(a, b)
                           for i, a in enumerate(f_list) for b in f_list[i + 1:]
                           if not g.has_edge(a, b))
        if scheme is not None:
            counters["reds_total"] = len(leftovers)
    paths.update(two_paths)

    three_paths, stuck = greedy_three_paths(g, leftovers, used, f_set)
    paths.update(three_paths)

    if mode == STRICT and stuck:
        raise IncompleteEmbeddingError(f"{len(stuck)} pairs unlinked: {stuck[:5]}")
    if stuck:
        connected = {pair for pair in paths}
        chosen = peel_to_complete(f_list, connected)
    else:
        chosen = f_list

    branch = sorted(chosen)
    index = {v: i for i, v in enumerate(branch)}
    cert_pairs: dict[tuple[int, int], list[int]] = {}
    for a_pos, a in enumerate(branch):
        for b in branch[a_pos + 1:]:
            path = paths[normalize_edge(a, b)]
            if path[0] != a:
                path = list(reversed(path))
            cert_pairs[(index[a], index[b])] = path
    cert = EmbeddingCertificate(kind=IMMERSION, branch=branch, pairs=cert_pairs,
                                ell=None)
    diag = DenseDiagnostics(
        n=g.n, d=report.d, lam=report.lam, eta=eta,
        t=scheme.t if scheme else 0,
        m1=scheme.m1 if scheme else 0,
        m2=scheme.m2 if scheme else 0,
        reds_total=counters.get("reds_total", 0),
        reds_replaced_2path=counters.get("reds_replaced_2path", 0),
        pairs_3path=len(three_paths),
        stuck=len(stuck),
        achieved_order=len(branch),
        epsilon=eps, delta=delta, k_required=k_required, gap_ok=gap_ok,
        degenerate_fallback=degenerate,
    )
    return cert, diag
