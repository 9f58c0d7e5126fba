"""Small named graphs used as oracles across the test suite."""

from itertools import combinations

from imforge.graphs import Graph, build_graph


def complete(n: int) -> Graph:
    return build_graph(n, combinations(range(n), 2))


def cycle(n: int) -> Graph:
    return build_graph(n, [(i, (i + 1) % n) for i in range(n)])


def path(n: int) -> Graph:
    return build_graph(n, [(i, i + 1) for i in range(n - 1)])


def petersen() -> Graph:
    # outer 5-cycle 0..4, inner pentagram 5..9, spokes i -- i+5
    edges = [(i, (i + 1) % 5) for i in range(5)]
    edges += [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    edges += [(i, i + 5) for i in range(5)]
    return build_graph(10, edges)


def complete_bipartite(a: int, b: int) -> Graph:
    return build_graph(a + b, [(i, a + j) for i in range(a) for j in range(b)])


def complete_tripartite(a: int, b: int, c: int) -> Graph:
    edges = []
    pa = list(range(a))
    pb = list(range(a, a + b))
    pc = list(range(a + b, a + b + c))
    for x in pa:
        edges += [(x, y) for y in pb] + [(x, y) for y in pc]
    for x in pb:
        edges += [(x, y) for y in pc]
    return build_graph(a + b + c, edges)


def hypercube(dim: int) -> Graph:
    n = 1 << dim
    edges = [(v, v ^ (1 << b)) for v in range(n) for b in range(dim) if v < v ^ (1 << b)]
    return build_graph(n, edges)


def half_graph(k: int) -> Graph:
    """Bipartite half graph: a_i ~ b_j iff i <= j, with a_i = i, b_j = k + j."""
    return build_graph(2 * k, [(i, k + j) for i in range(k) for j in range(k) if i <= j])


def star(leaves: int) -> Graph:
    return build_graph(leaves + 1, [(0, i) for i in range(1, leaves + 1)])
