import pytest

from imforge.certify import verify, verify_adjuster
from imforge.errors import (
    BadSizeError,
    ExpansionFailedError,
    NoConnectionError,
    NoEvenCycleError,
    PreconditionFailedError,
)
from imforge.gadgets import (
    bipartite_k3_immersion,
    build_1_adjuster,
    chain_adjusters,
    grow_expansion,
    shortest_even_cycle,
    trim_expansion,
)
from imforge.graphs import build_graph, view_minus

from helpers import complete, complete_bipartite, cycle, path, petersen, star


def brute_even_girth(g):
    """Exhaustive simple-cycle search; oracle for small graphs only."""
    best = None

    def dfs(start, v, visited, length):
        nonlocal best
        if best is not None and length >= best:
            return
        for w in g.neighbors(v):
            if w == start and length + 1 >= 3:
                total = length + 1
                if total % 2 == 0 and (best is None or total < best):
                    best = total
            elif w > start and w not in visited:
                dfs(start, w, visited | {w}, length + 1)

    for s in range(g.n):
        dfs(s, s, {s}, 0)
    return best


def cycle_length(c):
    return len(c) if c is not None else None


def test_even_cycle_c6():
    assert cycle_length(shortest_even_cycle(cycle(6))) == 6


def test_even_cycle_k4():
    assert cycle_length(shortest_even_cycle(complete(4))) == 4


def test_even_cycle_petersen():
    g = petersen()
    assert brute_even_girth(g) == 6
    found = shortest_even_cycle(g)
    assert cycle_length(found) == 6
    for a, b in zip(found, found[1:] + found[:1]):
        assert g.has_edge(a, b)


def test_even_cycle_tree_and_odd_cycle():
    assert shortest_even_cycle(path(7)) is None
    assert shortest_even_cycle(cycle(5)) is None


def test_even_cycle_bowtie_has_none():
    # two triangles sharing a vertex: closed even walks exist, even cycles do not
    g = build_graph(5, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)])
    assert brute_even_girth(g) is None
    assert shortest_even_cycle(g) is None


def test_even_cycle_cap():
    assert shortest_even_cycle(cycle(8), cap=6) is None
    assert cycle_length(shortest_even_cycle(cycle(8), cap=8)) == 8


def test_even_cycle_matches_brute_force_on_circulants():
    for n, steps in ((9, (1, 2)), (10, (1, 3)), (11, (2, 3)), (12, (1, 5))):
        edges = {tuple(sorted((v, (v + s) % n))) for s in steps for v in range(n)}
        g = build_graph(n, edges)
        assert cycle_length(shortest_even_cycle(g)) == brute_even_girth(g)


def test_trim_expansion():
    g = star(5)
    exp = grow_expansion(view_minus(g), 0, size=6, radius=1)
    assert exp.vertices == (0, 1, 2, 3, 4, 5)
    assert trim_expansion(exp, 1).vertices == (0,)
    assert trim_expansion(exp, 6) == exp
    assert trim_expansion(exp, 3).vertices == (0, 1, 2)
    with pytest.raises(BadSizeError):
        trim_expansion(exp, 0)
    with pytest.raises(BadSizeError):
        trim_expansion(exp, 7)


def test_grow_expansion_radius_limit():
    g = path(6)
    with pytest.raises(ExpansionFailedError):
        grow_expansion(view_minus(g), 0, size=4, radius=2)
    exp = grow_expansion(view_minus(g), 0, size=3, radius=2)
    assert exp.vertices == (0, 1, 2)


def test_1_adjuster_c6():
    g = cycle(6)
    adj = build_1_adjuster(g, d_size=1, m=1)
    assert adj.ell == 2 and adj.k == 1
    assert sorted(len(p) - 1 for p in adj.realizers) == [2, 4]
    assert adj.end1.vertices == (adj.u1,) and adj.end2.vertices == (adj.u2,)
    report = verify_adjuster(g, adj)
    assert report.valid, report.violations


def test_1_adjuster_petersen():
    g = petersen()
    adj = build_1_adjuster(g, d_size=2, m=2)
    assert adj.ell == 2  # seeded from a 6-cycle
    report = verify_adjuster(g, adj)
    assert report.valid, report.violations


def test_1_adjuster_tree():
    with pytest.raises(NoEvenCycleError):
        build_1_adjuster(path(8), d_size=1, m=1)


def two_c6_bridge():
    edges = [(i, (i + 1) % 6) for i in range(6)]
    edges += [(6 + i, 6 + (i + 1) % 6) for i in range(6)]
    edges.append((2, 6))  # joins core 2 of the first cycle to core 6 of the second
    return build_graph(12, edges)


def test_chain_adjusters_k2():
    g = two_c6_bridge()
    a1 = build_1_adjuster(g, removed_vertices=range(6, 12), d_size=1, m=1)
    a2 = build_1_adjuster(g, removed_vertices=range(6), d_size=1, m=1)
    chained = chain_adjusters(g, a1, a2, m=3)
    assert chained.k == 2
    assert sorted(len(p) - 1 for p in chained.realizers) == [chained.ell,
                                                             chained.ell + 2,
                                                             chained.ell + 4]
    report = verify_adjuster(g, chained)
    assert report.valid, report.violations


def test_chain_adjusters_identity():
    g = cycle(6)
    a1 = build_1_adjuster(g, d_size=1, m=1)
    assert chain_adjusters(g, a1, None) is a1


def test_chain_adjusters_disconnected():
    edges = [(i, (i + 1) % 6) for i in range(6)]
    edges += [(6 + i, 6 + (i + 1) % 6) for i in range(6)]
    g = build_graph(12, edges)
    a1 = build_1_adjuster(g, removed_vertices=range(6, 12), d_size=1, m=1)
    a2 = build_1_adjuster(g, removed_vertices=range(6), d_size=1, m=1)
    with pytest.raises(NoConnectionError):
        chain_adjusters(g, a1, a2, m=5)


def test_k3_immersion_p1():
    g = complete_bipartite(4, 4)
    cert = bipartite_k3_immersion(g, range(4), range(4, 8), p=1, seed=0)
    assert len(cert.branch) == 1 and cert.pairs == {}
    assert verify(g, cert).valid


def test_k3_immersion_k64_384():
    g = complete_bipartite(64, 384)
    cert = bipartite_k3_immersion(g, range(64), range(64, 448), p=2, seed=1,
                                  mode="strict")
    report = verify(g, cert)
    assert report.valid, report.violations
    assert report.length_histogram == {4: 1}
    path4 = next(iter(cert.pairs.values()))
    # middles alternate sides: B, A, B
    assert path4[1] >= 64 and path4[3] >= 64 and path4[2] < 64


def test_k3_immersion_strict_precondition():
    g = complete_bipartite(8, 8)
    with pytest.raises(PreconditionFailedError):
        bipartite_k3_immersion(g, range(8), range(8, 16), p=5, seed=0, mode="strict")


def test_k3_immersion_medium_random():
    import random

    rng = random.Random(99)
    n1, n2 = 64, 1280
    edges = [(i, n1 + j) for i in range(n1) for j in range(n2) if rng.random() < 0.7]
    g = build_graph(n1 + n2, edges)
    from imforge.graphs import pair_density

    alpha = pair_density(g, range(n1), range(n1, n1 + n2))
    p = int(min(alpha * n1 / 16, alpha * alpha * n2 / 192))
    cert = bipartite_k3_immersion(g, range(n1), range(n1, n1 + n2), p=p, seed=2,
                                  mode="strict")
    report = verify(g, cert)
    assert report.valid, report.violations
    assert set(report.length_histogram) == {4}
    assert report.path_count == p * (p - 1) // 2


def test_adjuster_json_shape():
    import json

    g = cycle(6)
    adj = build_1_adjuster(g, d_size=1, m=1)
    obj = json.loads(adj.to_json())
    assert set(obj) == {"u1", "u2", "ends", "A", "k", "ell", "realizers"}
    assert obj["k"] == 1 and len(obj["realizers"]) == 2
