import math

import pytest

from imforge.errors import DomainError, InsufficientStarsError, NoPathError, UnitFailedError
from imforge.expanders import (
    ExpanderParams,
    StarSpec,
    Unit,
    build_unit,
    collect_units,
    mix_length_m,
    pack_stars,
    rho,
    robust_expansion_audit,
    short_avoiding_path,
)
from imforge.generators import paley
from imforge.graphs import build_graph, normalize_edge, view_minus
from imforge.spectral import adjacency_spectrum

from helpers import complete, cycle, path, star


P = ExpanderParams(eps1=0.125, eps2=0.2, k=100.0)


def test_rho_below_threshold():
    assert rho(10, P) == 0.0


def test_rho_value():
    # direct evaluation: 0.125 / ln(3)^2
    expect = 0.125 / math.log(3) ** 2
    assert abs(rho(20, P) - expect) < 1e-12
    assert abs(rho(20, P) - 0.1036) < 5e-4


def test_rho_monotone_after_threshold():
    xs = [20, 40, 80, 200, 1000, 10 ** 6]
    vals = [rho(x, P) for x in xs]
    assert all(a >= b for a, b in zip(vals, vals[1:]))


def test_mix_length_value():
    params = ExpanderParams(eps1=0.125, eps2=0.2)
    m = mix_length_m(10 ** 6, 10 ** 3, params)
    assert abs(m - 16 * math.log(75000) ** 3) < 1e-9
    assert abs(m - 22632) < 5


def test_mix_length_unit_ratio():
    # at 15n/(eps2 d) = e the log cube is 1 and m collapses to 2/eps1;
    # nudge eps2 so the ratio hits e exactly at integer n and d
    n, d = 100, 10
    params = ExpanderParams(eps1=0.125, eps2=15 * n / (d * math.e))
    assert abs(mix_length_m(n, d, params) - 2 / params.eps1) < 1e-12


def test_mix_length_monotone_in_n():
    params = ExpanderParams()
    ms = [mix_length_m(n, 50, params) for n in (10 ** 3, 10 ** 4, 10 ** 5, 10 ** 6)]
    assert all(a < b for a, b in zip(ms, ms[1:]))


def test_mix_length_domain():
    with pytest.raises(DomainError):
        mix_length_m(0, 10, ExpanderParams())
    with pytest.raises(DomainError):
        mix_length_m(1, 10 ** 9, ExpanderParams())


def test_robust_audit_complete_graph_passes():
    g = complete(20)
    params = ExpanderParams(eps1=0.125, eps2=0.2, k=10.0)
    audit = robust_expansion_audit(g, params, d_ref=19, trials=40, seed=1)
    assert audit.passed


def test_robust_audit_bridge_witness():
    # two 10-cliques joined by one edge: a clique-sized BFS ball is a witness
    # once the adversary deletes the bridge
    edges = [(u, v) for u in range(10) for v in range(u + 1, 10)]
    edges += [(10 + u, 10 + v) for u in range(10) for v in range(u + 1, 10)]
    edges.append((9, 10))
    g = build_graph(20, edges)
    params = ExpanderParams(eps1=0.125, eps2=0.2, k=10.0)
    audit = robust_expansion_audit(g, params, d_ref=9, trials=8, seed=2)
    assert not audit.passed
    assert audit.witness_set is not None and len(audit.witness_set) == 10
    assert audit.witness_edges is not None


def test_robust_audit_paley101_passes():
    g = paley(101)
    r = adjacency_spectrum(g)
    assert r.d >= 2 * r.lam  # spectral hypothesis behind guaranteed expansion
    params = ExpanderParams(eps1=0.125, eps2=0.2, k=0.2 * r.d)
    audit = robust_expansion_audit(g, params, d_ref=r.d, trials=100, seed=3)
    assert audit.passed


def test_short_path_zero_length():
    view = view_minus(cycle(6))
    assert short_avoiding_path(view, [2, 3], [3, 4], 5) == [3]


def test_short_path_path_graph_budget():
    g = path(6)
    view = view_minus(g)
    assert short_avoiding_path(view, [0], [5], 5) == [0, 1, 2, 3, 4, 5]
    with pytest.raises(NoPathError):
        short_avoiding_path(view, [0], [5], 4)


def test_short_path_k5_avoiding_edges():
    g = complete(5)
    w = [(0, 2), (0, 3), (0, 4)]
    view = view_minus(g, set(), w)
    assert short_avoiding_path(view, [0], [4], 3) == [0, 1, 4]


def test_short_path_respects_removed_vertices():
    g = cycle(6)
    view = view_minus(g, {1})
    assert short_avoiding_path(view, [0], [2], 6) == [0, 5, 4, 3, 2]


def test_short_path_endpoints_only_in_terminals():
    g = complete(6)
    view = view_minus(g)
    x1, x2 = {0, 1}, {4, 5}
    p = short_avoiding_path(view, x1, x2, 4)
    assert p[0] in x1 and p[-1] in x2
    assert not (set(p[1:-1]) & (x1 | x2))
    assert len(set(p)) == len(p)


def test_pack_stars_single_star_graph():
    g = star(5)
    packed = pack_stars(view_minus(g), [StarSpec(count=1, size=5)])
    assert packed[0].center == 0 and packed[0].leaves == (1, 2, 3, 4, 5)


def test_pack_stars_k9_three_disjoint():
    g = complete(9)
    packed = pack_stars(view_minus(g), [StarSpec(count=3, size=2)])
    seen = set()
    for s in packed:
        block = {s.center, *s.leaves}
        assert not (block & seen)
        seen |= block
    assert len(seen) == 9


def test_pack_stars_c4_insufficient():
    with pytest.raises(InsufficientStarsError) as err:
        pack_stars(view_minus(cycle(4)), [StarSpec(count=1, size=3)])
    assert err.value.index == 0 and err.value.found == 2


def check_unit_structure(g, unit: Unit):
    h1, h2, h3 = unit.h_params
    assert len(unit.stars) == h1
    assert len(unit.branches) == h1
    seen_edges = set()
    for branch, s in zip(unit.branches, unit.stars):
        assert branch[0] == unit.center and branch[-1] == s.center
        assert len(branch) - 1 <= h3
        for a, b in zip(branch, branch[1:]):
            e = normalize_edge(a, b)
            assert g.has_edge(a, b)
            assert e not in seen_edges  # branches pairwise edge-disjoint
            seen_edges.add(e)
    star_vertices = set()
    for s in unit.stars:
        assert len(s.leaves) >= h2
        block = {s.center, *s.leaves}
        assert not (block & star_vertices)
        star_vertices |= block
        for leaf in s.leaves:
            assert g.has_edge(s.center, leaf)
    assert not (unit.interior_vertices() & unit.exterior())


def test_build_unit_recovers_spider():
    # a graph that is exactly a (2,2,1)-unit: center 0, stars at 1 and 2
    g = build_graph(7, [(0, 1), (0, 2), (1, 3), (1, 4), (2, 5), (2, 6)])
    unit = build_unit(g, (), (), h1=2, h2=2, h3=1, seed=0)
    assert unit.center == 0
    assert sorted(unit.star_centers) == [1, 2]
    check_unit_structure(g, unit)


def test_build_unit_k20():
    g = complete(20)
    unit = build_unit(g, (), (), h1=3, h2=2, h3=1, seed=0)
    check_unit_structure(g, unit)
    verts = {unit.center} | unit.exterior() | set(unit.star_centers)
    for b in unit.branches:
        verts.update(b)
    assert len(verts) == 10  # 1 center + 3 star centers + 6 leaves
    assert all(len(b) == 2 for b in unit.branches)  # single-edge branches


def test_build_unit_c6_fails_at_stars():
    with pytest.raises(UnitFailedError) as err:
        build_unit(cycle(6), (), (), h1=3, h2=2, h3=1, seed=0)
    assert err.value.stage == "stars"


def test_build_unit_respects_forbidden_sets():
    g = complete(20)
    forbidden_v = {0, 1}
    forbidden_e = {(2, 3), (2, 4)}
    unit = build_unit(g, forbidden_v, forbidden_e, h1=3, h2=2, h3=2, seed=0)
    check_unit_structure(g, unit)
    touched = {unit.center} | unit.branch_vertices() | unit.exterior()
    assert not (touched & forbidden_v)
    assert not (unit.all_edges() & {normalize_edge(*e) for e in forbidden_e})


def test_collect_units_k30():
    g = complete(30)
    units = collect_units(g, count=2, h1=2, h2=2, h3=1, seed=0)
    assert len(units) == 2
    assert units[0].center != units[1].center
    all_edges = sorted(e for u in units for e in u.all_edges())
    assert len(all_edges) == len(set(all_edges))  # pairwise edge-disjoint
    for u in units:
        check_unit_structure(g, u)


def test_collect_units_zero():
    assert collect_units(complete(10), count=0, h1=2, h2=2, h3=1) == []


def test_collect_units_impossible():
    assert collect_units(cycle(6), count=1, h1=3, h2=2, h3=1) == []


def test_pack_stars_seeded_order_is_deterministic():
    g = complete(12)
    a = pack_stars(view_minus(g), [StarSpec(count=2, size=3)], order_seed=5)
    b = pack_stars(view_minus(g), [StarSpec(count=2, size=3)], order_seed=5)
    assert [(s.center, s.leaves) for s in a] == [(s.center, s.leaves) for s in b]
    # still a valid disjoint packing
    seen = set()
    for s in a:
        block = {s.center, *s.leaves}
        assert not (block & seen)
        seen |= block


def test_unit_json_shape():
    import json

    g = complete(20)
    unit = build_unit(g, (), (), h1=2, h2=2, h3=1, seed=0)
    obj = json.loads(unit.to_json())
    assert set(obj) == {"center", "branches", "stars"}
    assert obj["center"] == unit.center
