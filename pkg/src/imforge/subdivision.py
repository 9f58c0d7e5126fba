"""Balanced clique subdivisions: disjoint stars, a sampled leaf reservoir,
a robustness certificate for the expansion property behind fixed-length
routing, and vertex-disjoint connections of one exact length.

Every connecting path is star edge + fixed-length path + star edge, so the
certificate is balanced: all paths share one total length.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .certify import SUBDIVISION, EmbeddingCertificate
from .errors import (
    InsufficientStarsError,
    PreconditionFailedError,
    RoutingFailedError,
    SampleFailedError,
)
from .graphs import Graph
from .spectral import SpectralReport
from .util import derive_seed, np_rng, peel_to_complete

STRICT = "strict"
BEST_EFFORT = "best-effort"
VARIANT_FIXED = "d0-3"
VARIANT_POWER = "d0-power"


@dataclass
class StarSystem:
    """Vertex-disjoint stars: centers become branch vertices, leaves the
    attachment points for the fixed-length connections."""

    centers: list[int]
    leaf_sets: list[tuple[int, ...]]
    reservoir: set[int] = field(default_factory=set)
    chosen: dict[tuple[int, int], int] = field(default_factory=dict)

    @property
    def t(self) -> int:
        return len(self.centers)

    def all_vertices(self) -> set[int]:
        out = set(self.centers)
        for leaves in self.leaf_sets:
            out.update(leaves)
        return out


def pack_disjoint_stars(g: Graph, report: SpectralReport, eta: float,
                        t: Optional[int] = None) -> StarSystem:
    """Greedily pack t = floor((1-eta)d) vertex-disjoint stars with
    floor((1-eta/2)d) leaves each, centers in ascending id order."""
    d = report.d
    if t is None:
        t = math.floor((1 - eta) * d)
    size = max(1, math.floor((1 - eta / 2) * d))
    used: set[int] = set()
    centers: list[int] = []
    leaf_sets: list[tuple[int, ...]] = []
    for v in range(g.n):
        if len(centers) == t:
            break
        if v in used:
            continue
        avail = [w for w in g.neighbors(v) if w not in used and w != v]
        if len(avail) < size:
            continue
        leaves = tuple(avail[:size])
        centers.append(v)
        leaf_sets.append(leaves)
        used.add(v)
        used.update(leaves)
    if len(centers) < t:
        raise InsufficientStarsError(0, len(centers))
    return StarSystem(centers=centers, leaf_sets=leaf_sets)


def star_packing_precondition(g: Graph, report: SpectralReport, eta: float) -> bool:
    return 2 / eta <= report.d <= eta * math.sqrt(g.n)


def draw_reservoir(g: Graph, centers: Iterable[int], eta: float, seed: int) -> set[int]:
    """One Bernoulli(1 - eta/4) draw over the non-center vertices."""
    u_set = set(centers)
    pool = [v for v in range(g.n) if v not in u_set]
    rng = np_rng(seed, "reservoir")
    mask = rng.random(len(pool)) < (1 - eta / 4)
    return {v for v, hit in zip(pool, mask) if hit}


def reservoir_conditions(g: Graph, stars: StarSystem, eta: float,
                         sample: set[int]) -> tuple[bool, bool, dict]:
    """Re-verify the two acceptance events from scratch: enough sampled
    leaves per star, and enough neighbors outside centers and sample for
    every vertex."""
    d = max(len(g.neighbors(stars.centers[0])), 1) if stars.centers else 1
    u_set = set(stars.centers)
    need_leaves = (1 - eta) * d
    leaf_ok = all(sum(1 for leaf in leaves if leaf in sample) >= need_leaves
                  for leaves in stars.leaf_sets)
    need_outside = eta * eta * d / 8
    worst_outside = math.inf
    outside_ok = True
    for v in range(g.n):
        outside = sum(1 for w in g.neighbors(v)
                      if w not in u_set and w not in sample)
        worst_outside = min(worst_outside, outside)
        if outside < need_outside:
            outside_ok = False
    return leaf_ok, outside_ok, {
        "need_leaves": need_leaves,
        "need_outside": need_outside,
        "worst_outside": worst_outside,
    }


def sample_reservoir(g: Graph, stars: StarSystem, eta: float, seed: int,
                     retries: int = 10) -> set[int]:
    """Retry Bernoulli draws until both acceptance events hold."""
    for attempt in range(retries):
        sample = draw_reservoir(g, stars.centers, eta,
                                derive_seed(seed, f"reservoir-try:{attempt}"))
        leaf_ok, outside_ok, _ = reservoir_conditions(g, stars, eta, sample)
        if leaf_ok and outside_ok:
            return sample
    raise SampleFailedError(retries)


@dataclass(frozen=True)
class PAlphaParams:
    """Inputs of the robust-expansion certificate and routing formulas."""

    n0: float
    d0: int
    alpha: float
    beta: float

    def __post_init__(self):
        if not (3 <= self.d0 < self.n0):
            raise PreconditionFailedError(f"need 3 <= d0 < n0, got {self.d0}, {self.n0}")
        if abs(self.beta - (2 * self.alpha - 1)) > 1e-12:
            raise PreconditionFailedError("beta must equal 2*alpha - 1")


def p_alpha_certificate(n: int, d: int, lam: float,
                        params: PAlphaParams) -> tuple[bool, float]:
    """Evaluate 1 - alpha > n0(1 + 4 d0)/(2n) + (lambda/d)(1 + sqrt(2 d0));
    returns (pass, margin)."""
    rhs = (params.n0 * (1 + 4 * params.d0)) / (2 * n) \
        + (lam / d) * (1 + math.sqrt(2 * params.d0))
    margin = (1 - params.alpha) - rhs
    return margin > 0, margin


def fixed_path_length(n0: float, d0: int) -> int:
    """Exact connection length 2*ceil(log(n0/16)/log(d0-1)) + 3, guarding
    the ceiling against float error at integer ratios."""
    ratio = math.log(n0 / 16) / math.log(d0 - 1)
    nearest = round(ratio)
    if abs(ratio - nearest) < 1e-9:
        ceil_val = nearest
    else:
        ceil_val = math.ceil(ratio)
    return 2 * ceil_val + 3


def audit_sprime(g: Graph, s_prime: set[int], beta: float) -> tuple[bool, float]:
    """Check |N(x) & S'| <= beta * d(x) for every vertex; returns the pass
    flag and the worst load ratio."""
    worst = 0.0
    for v in range(g.n):
        deg = g.degree(v)
        if deg == 0:
            continue
        hits = sum(1 for w in g.neighbors(v) if w in s_prime)
        worst = max(worst, hits / deg)
    return worst <= beta, worst


def _grow_level_tree(g: Graph, root: int, depth: int, blocked: set[int],
                     taken: set[int], flip: bool) -> tuple[list[list[int]], dict[int, int]]:
    """Leveled tree of simple paths from the root: each level picks fresh
    vertices outside everything blocked or already taken."""
    levels = [[root]]
    parent: dict[int, int] = {}
    seen = {root}
    for _ in range(depth):
        nxt: list[int] = []
        frontier = sorted(levels[-1], reverse=flip)
        for u in frontier:
            for w in sorted(g.neighbors(u), reverse=flip):
                if w in seen or w in blocked or w in taken:
                    continue
                seen.add(w)
                parent[w] = u
                nxt.append(w)
        levels.append(nxt)
    return levels, parent


def _extract(parent: dict[int, int], root: int, leaf: int) -> list[int]:
    path = [leaf]
    while path[-1] != root:
        path.append(parent[path[-1]])
    return path[::-1]


def _route_all(g: Graph, pairs: Sequence[tuple[int, int]], s_prime: set[int],
               length: int, drop_failures: bool,
               ) -> tuple[dict[tuple[int, int], list[int]], list[tuple[int, int]]]:
    """Shared routing engine; see connect_fixed_length for the contract."""
    half_depth = (length - 3) // 2 + 1
    used: set[int] = set()
    routed: list[tuple[tuple[int, int], list[int]]] = []
    failed: list[tuple[int, int]] = []

    def route(pair: tuple[int, int], flip: bool) -> Optional[list[int]]:
        a, b = pair
        blocked = (s_prime - {a, b})
        levels_a, parent_a = _grow_level_tree(g, a, half_depth, blocked, used | {b}, flip)
        taken_a = {v for lvl in levels_a for v in lvl}
        levels_b, parent_b = _grow_level_tree(g, b, half_depth, blocked,
                                              used | taken_a, flip)
        top_a = set(levels_a[half_depth])
        top_b = set(levels_b[half_depth])
        best_edge = None
        for x in sorted(top_a):
            for y in sorted(g.neighbors(x)):
                if y in top_b:
                    best_edge = (x, y)
                    break
            if best_edge:
                break
        if best_edge is None:
            return None
        x, y = best_edge
        left = _extract(parent_a, a, x)
        right = _extract(parent_b, b, y)
        return left + right[::-1]

    def commit(pair, path):
        routed.append((pair, path))
        used.update(path)

    for pair in pairs:
        path = route(pair, flip=False)
        if path is None and routed:
            # rollback: free the most recent path, route this pair first,
            # then redo the freed pair with flipped frontier ordering
            prev_pair, prev_path = routed.pop()
            for v in prev_path:
                used.discard(v)
            path = route(pair, flip=False)
            if path is not None:
                commit(pair, path)
            redo = route(prev_pair, flip=True)
            if redo is not None:
                commit(prev_pair, redo)
            if path is None or redo is None:
                victim = pair if path is None else prev_pair
                if drop_failures:
                    failed.append(victim)
                    continue
                raise RoutingFailedError(victim)
            continue
        if path is None:
            if drop_failures:
                failed.append(pair)
                continue
            raise RoutingFailedError(pair)
        commit(pair, path)
    return dict(routed), failed


def connect_fixed_length(g: Graph, pairs: Sequence[tuple[int, int]],
                         s_prime: set[int], params: PAlphaParams,
                         seed: int = 0,
                         length: Optional[int] = None,
                         ) -> list[list[int]]:
    """Vertex-disjoint paths of one exact length between the given pairs.

    Interior vertices avoid S' and all previously used vertices.  Routing
    grows leveled trees from both endpoints and joins their top levels by
    the lexicographically first edge; one rollback (unroute the previous
    pair, route this one, re-route the other with flipped frontier order)
    is attempted before giving up on a pair.
    """
    ok, worst = audit_sprime(g, s_prime, params.beta)
    if not ok:
        raise PreconditionFailedError(
            f"S' load {worst:.3f} exceeds beta={params.beta:.3f}")
    length = fixed_path_length(params.n0, params.d0) if length is None else length
    if length < 3 or length % 2 == 0:
        raise PreconditionFailedError(f"connection length must be odd and >= 3, got {length}")
    by_pair, _ = _route_all(g, pairs, s_prime, length, drop_failures=False)
    return [by_pair[p] for p in pairs]


@dataclass
class SubdivisionDiagnostics:
    n: int
    d: int
    lam: float
    eta: float
    variant: str
    t: int
    length: int
    length_formula: int
    n0: float
    d0: int
    p_alpha_pass: bool
    p_alpha_margin: float
    reservoir_attempts: int
    reservoir_strict: bool
    achieved_order: int
    failed_pairs: int
    stage: str = "done"


def variant_params(n: int, eta: float, variant: str) -> tuple[int, float, float, float]:
    """(d0, n0, alpha, beta) for the chosen parameterization."""
    alpha = 1 - eta * eta / 16
    beta = 2 * alpha - 1
    if variant == VARIANT_FIXED:
        d0 = 3
        n0 = eta * eta * n / 256
    elif variant == VARIANT_POWER:
        d0 = max(3, math.floor(n ** eta))
        n0 = (eta / 8) * n ** (1 - eta)
    else:
        raise PreconditionFailedError(f"unknown variant {variant!r}")
    return d0, n0, alpha, beta


def build_balanced_subdivision(g: Graph, report: SpectralReport, eta: float,
                               eps: float = 0.05, seed: int = 0,
                               mode: str = BEST_EFFORT,
                               variant: str = VARIANT_FIXED,
                               retries: int = 10,
                               ) -> tuple[EmbeddingCertificate, SubdivisionDiagnostics]:
    """Balanced clique subdivision: stars give branch vertices and
    per-pair leaves; leaves of each pair are joined by vertex-disjoint
    paths of one exact length.

    Strict mode enforces the spectral window, the expansion certificate,
    and both reservoir events; best-effort proceeds with the best sample
    it saw and peels branch vertices whose pairs failed to route.
    """
    n, d, lam = g.n, report.d, report.lam
    d0, n0_formula, alpha, beta = variant_params(n, eta, variant)
    # keep the routing depth usable on small hosts
    n0 = max(n0_formula, 16 * (d0 - 1))
    params = PAlphaParams(n0=n0, d0=d0, alpha=alpha, beta=beta)
    pa_pass, pa_margin = p_alpha_certificate(n, d, lam, params)
    length_formula = fixed_path_length(n0_formula, d0) if n0_formula > 16 else -1
    length = fixed_path_length(n0, d0)

    if mode == STRICT:
        if not (2048 * lam / (eta * eta) < d <= eta * n ** (0.5 - eps)):
            raise PreconditionFailedError(
                f"spectral window fails: lambda={lam:.3f}, d={d}, n={n}")
        if not pa_pass:
            raise PreconditionFailedError(f"expansion certificate margin {pa_margin:.3g}")

    t_target = math.floor((1 - eta) * d)
    try:
        stars = pack_disjoint_stars(g, report, eta, t=t_target)
    except InsufficientStarsError as err:
        if mode == STRICT:
            raise
        stars = pack_disjoint_stars(g, report, eta, t=err.found)

    stage = "stars"
    reservoir_strict = True
    attempts = 0
    sample: Optional[set[int]] = None
    if mode == STRICT:
        sample = sample_reservoir(g, stars, eta, seed, retries=retries)
    else:
        best_sample, best_count = None, -1
        for attempt in range(retries):
            attempts = attempt + 1
            cand = draw_reservoir(g, stars.centers, eta,
                                  derive_seed(seed, f"reservoir-try:{attempt}"))
            leaf_ok, outside_ok, _ = reservoir_conditions(g, stars, eta, cand)
            if leaf_ok and outside_ok:
                sample = cand
                break
            count = sum(1 for leaves in stars.leaf_sets
                        for leaf in leaves if leaf in cand)
            if leaf_ok and count > best_count:
                best_sample, best_count = cand, count
        if sample is None:
            reservoir_strict = False
            sample = best_sample if best_sample is not None else draw_reservoir(
                g, stars.centers, eta, derive_seed(seed, "reservoir-fallback"))
    stars.reservoir = sample
    stage = "reservoir"

    # per-pair leaves: the rank of the partner among the other centers
    t = stars.t
    pools = [sorted(set(leaves) & sample) for leaves in stars.leaf_sets]
    while any(len(pool) < t - 1 for pool in pools) and t > 1:
        worst = min(range(t), key=lambda i: len(pools[i]))
        del pools[worst], stars.centers[worst], stars.leaf_sets[worst]
        t = stars.t
    chosen: dict[tuple[int, int], int] = {}
    for i in range(t):
        others = [j for j in range(t) if j != i]
        for rank, j in enumerate(others):
            chosen[(i, j)] = pools[i][rank]
    stars.chosen = chosen
    s_prime = set(stars.centers) | set(chosen.values())
    stage = "leaves"

    pair_keys = [(i, j) for i in range(t) for j in range(i + 1, t)]
    leaf_pairs = [(chosen[(i, j)], chosen[(j, i)]) for (i, j) in pair_keys]
    sp_ok, sp_load = audit_sprime(g, s_prime, beta)
    if mode == STRICT and not sp_ok:
        raise PreconditionFailedError(f"S' load {sp_load:.3f} exceeds beta")
    by_leaf_pair, failed_leaf = _route_all(g, leaf_pairs, s_prime, length,
                                           drop_failures=(mode != STRICT))
    routed: dict[tuple[int, int], list[int]] = {}
    failed: list[tuple[int, int]] = []
    for key, pair in zip(pair_keys, leaf_pairs):
        if pair in by_leaf_pair:
            routed[key] = by_leaf_pair[pair]
        else:
            failed.append(key)
    stage = "routing"

    connected = {(stars.centers[i], stars.centers[j]) for (i, j) in routed}
    if failed:
        kept_centers = peel_to_complete(list(stars.centers), connected)
    else:
        kept_centers = list(stars.centers)
    kept_idx = [stars.centers.index(c) for c in sorted(kept_centers)]
    branch = [stars.centers[i] for i in kept_idx]
    cert_pairs: dict[tuple[int, int], list[int]] = {}
    for a_pos, i in enumerate(kept_idx):
        for b_pos, j in enumerate(kept_idx[a_pos + 1:], start=a_pos + 1):
            mid = routed[(i, j)]  # star indices ascend with center ids
            if mid[0] != chosen[(i, j)]:
                mid = list(reversed(mid))
            cert_pairs[(a_pos, b_pos)] = [stars.centers[i]] + mid + [stars.centers[j]]
    lengths = {len(p) - 1 for p in cert_pairs.values()}
    ell = (lengths.pop() - 1) if len(lengths) == 1 and cert_pairs else None
    cert = EmbeddingCertificate(kind=SUBDIVISION, branch=branch,
                                pairs=cert_pairs, ell=ell)
    diag = SubdivisionDiagnostics(
        n=n, d=d, lam=lam, eta=eta, variant=variant, t=len(branch),
        length=length, length_formula=length_formula, n0=n0, d0=d0,
        p_alpha_pass=pa_pass, p_alpha_margin=pa_margin,
        reservoir_attempts=attempts, reservoir_strict=reservoir_strict,
        achieved_order=len(branch), failed_pairs=len(failed), stage=stage)
    return cert, diag
