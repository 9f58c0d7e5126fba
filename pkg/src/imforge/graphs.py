"""Immutable simple graphs, deletion views, and the basic counting queries.

A ``Graph`` is a simple undirected graph on vertices ``0..n-1`` with sorted
adjacency lists; it never changes after construction, so it is safe to share
between pipelines and threads.  A ``GraphView`` answers the same queries as
the graph obtained by deleting a vertex set and an edge set, without copying
anything.  Neighbor iteration is always in ascending vertex order, which
keeps every greedy routine downstream deterministic.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence

import numpy as np

from .errors import (
    EmptySideError,
    OutOfRangeError,
    OverlapError,
    ParseError,
    SameVertexError,
    SelfLoopError,
)

Edge = tuple[int, int]


def normalize_edge(u: int, v: int) -> Edge:
    """Return the pair ordered as (min, max)."""
    return (u, v) if u < v else (v, u)


class Graph:
    """Simple undirected graph with fixed vertex set 0..n-1."""

    __slots__ = ("_n", "_adj", "_edges", "_matrix")

    def __init__(self, n: int, adjacency: tuple[tuple[int, ...], ...], edges: frozenset[Edge]):
        self._n = n
        self._adj = adjacency
        self._edges = edges
        self._matrix: np.ndarray | None = None

    @property
    def n(self) -> int:
        return self._n

    @property
    def m(self) -> int:
        return len(self._edges)

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self._adj[v]

    def has_edge(self, u: int, v: int) -> bool:
        return normalize_edge(u, v) in self._edges

    def edge_set(self) -> frozenset[Edge]:
        return self._edges

    def edges(self) -> list[Edge]:
        """All edges as (u, v) with u < v, lexicographically sorted."""
        return sorted(self._edges)

    def degrees(self) -> list[int]:
        return [len(a) for a in self._adj]

    def is_regular(self) -> bool:
        if self._n == 0:
            return True
        d0 = len(self._adj[0])
        return all(len(a) == d0 for a in self._adj)

    def adjacency_matrix(self) -> np.ndarray:
        """Dense 0/1 adjacency matrix (cached; int8)."""
        if self._matrix is None:
            mat = np.zeros((self._n, self._n), dtype=np.int8)
            for u, v in self._edges:
                mat[u, v] = 1
                mat[v, u] = 1
            self._matrix = mat
        return self._matrix

    def complement(self) -> "Graph":
        missing = []
        for u in range(self._n):
            adj_u = set(self._adj[u])
            for v in range(u + 1, self._n):
                if v not in adj_u:
                    missing.append((u, v))
        return build_graph(self._n, missing)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self._n == other._n and self._edges == other._edges

    def __hash__(self) -> int:
        return hash((self._n, self._edges))

    def __repr__(self) -> str:
        return f"Graph(n={self._n}, m={self.m})"


def build_graph(n: int, edge_list: Iterable[tuple[int, int]]) -> Graph:
    """Build a Graph from an edge list, deduplicating repeated pairs.

    Raises OutOfRangeError for an endpoint >= n (or < 0) and SelfLoopError
    for a loop; parallel edges are silently collapsed.
    """
    if n < 0:
        raise OutOfRangeError(f"negative vertex count {n}")
    edges = set()
    for u, v in edge_list:
        u, v = int(u), int(v)  # accept numpy integers
        if not (0 <= u < n) or not (0 <= v < n):
            raise OutOfRangeError(f"edge ({u}, {v}) outside 0..{n - 1}")
        if u == v:
            raise SelfLoopError(f"loop at vertex {u}")
        edges.add(normalize_edge(u, v))
    adj: list[list[int]] = [[] for _ in range(n)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    adjacency = tuple(tuple(sorted(a)) for a in adj)
    return Graph(n, adjacency, frozenset(edges))


class GraphView:
    """Read-only view of a graph minus a vertex set U and an edge set W.

    Queries agree with the graph that would be obtained by materializing the
    deletions.  Vertices in U report no neighbors.  Pairs of W that are not
    edges of the base graph are recorded in ``ignored_pairs`` rather than
    rejected.
    """

    __slots__ = ("base", "removed_vertices", "removed_edges", "ignored_pairs")

    def __init__(self, base: Graph, removed_vertices: frozenset[int],
                 removed_edges: frozenset[Edge], ignored_pairs: tuple[Edge, ...]):
        self.base = base
        self.removed_vertices = removed_vertices
        self.removed_edges = removed_edges
        self.ignored_pairs = ignored_pairs

    @property
    def n(self) -> int:
        return self.base.n

    def contains_vertex(self, v: int) -> bool:
        return 0 <= v < self.base.n and v not in self.removed_vertices

    def active_vertices(self) -> list[int]:
        return [v for v in range(self.base.n) if v not in self.removed_vertices]

    def neighbors(self, v: int) -> list[int]:
        if v in self.removed_vertices:
            return []
        out = []
        for w in self.base.neighbors(v):
            if w in self.removed_vertices:
                continue
            if normalize_edge(v, w) in self.removed_edges:
                continue
            out.append(w)
        return out

    def degree(self, v: int) -> int:
        return len(self.neighbors(v))

    def has_edge(self, u: int, v: int) -> bool:
        if u in self.removed_vertices or v in self.removed_vertices:
            return False
        e = normalize_edge(u, v)
        return e not in self.removed_edges and e in self.base.edge_set()

    def edges(self) -> list[Edge]:
        out = []
        for u, v in self.base.edges():
            if u in self.removed_vertices or v in self.removed_vertices:
                continue
            if (u, v) in self.removed_edges:
                continue
            out.append((u, v))
        return out

    def edge_count(self) -> int:
        return len(self.edges())

    def materialize(self) -> Graph:
        """Copy the view into a standalone Graph (same vertex ids)."""
        return build_graph(self.base.n, self.edges())

    def __repr__(self) -> str:
        return (f"GraphView(base={self.base!r}, |U|={len(self.removed_vertices)}, "
                f"|W|={len(self.removed_edges)})")


def view_minus(g: Graph, removed_vertices: Iterable[int] = (),
               removed_edges: Iterable[tuple[int, int]] = ()) -> GraphView:
    """View of g with a vertex set and an edge set deleted.

    Unknown pairs in the edge set are ignored (and recorded); vertex ids
    outside 0..n-1 are rejected.
    """
    u_set = frozenset(removed_vertices)
    for v in u_set:
        if not (0 <= v < g.n):
            raise OutOfRangeError(f"removed vertex {v} outside 0..{g.n - 1}")
    w_norm = set()
    ignored = []
    for a, b in removed_edges:
        e = normalize_edge(a, b)
        if e in g.edge_set():
            w_norm.add(e)
        else:
            ignored.append(e)
    return GraphView(g, u_set, frozenset(w_norm), tuple(sorted(set(ignored))))


def edges_between(g, a_side: Iterable[int], b_side: Iterable[int]) -> int:
    """Number of edges with one endpoint in each (disjoint) side."""
    b_set = set(b_side)
    count = 0
    for u in a_side:
        for w in g.neighbors(u):
            if w in b_set:
                count += 1
    return count


def pair_density(g, a_side: Sequence[int], b_side: Sequence[int]) -> float:
    """Edge density e(A,B) / (|A||B|) between two disjoint nonempty sets."""
    a_set, b_set = set(a_side), set(b_side)
    if not a_set or not b_set:
        raise EmptySideError("density needs two nonempty sides")
    if a_set & b_set:
        raise OverlapError("density sides must be disjoint")
    return edges_between(g, a_set, b_set) / (len(a_set) * len(b_set))


def codegree(g, u: int, v: int) -> int:
    """Number of common neighbors of two distinct vertices."""
    if u == v:
        raise SameVertexError(f"codegree of {u} with itself")
    nu = g.neighbors(u)
    nv = set(g.neighbors(v))
    return sum(1 for w in nu if w in nv)


def parse_edge_list(text: str) -> Graph:
    """Parse the canonical edge-list text format.

    Line 1 is "n m"; each of the following m lines is "u v" with
    0 <= u < v < n.  Errors carry 1-based line numbers.
    """
    lines = text.splitlines()
    if not lines or not lines[0].strip():
        raise ParseError(1, "missing header")
    head = lines[0].split()
    if len(head) != 2:
        raise ParseError(1, f"expected 'n m', got {lines[0]!r}")
    try:
        n, m = int(head[0]), int(head[1])
    except ValueError:
        raise ParseError(1, f"non-integer header {lines[0]!r}") from None
    edges = []
    for i in range(m):
        lineno = i + 2
        if lineno - 1 >= len(lines) or not lines[lineno - 1].strip():
            raise ParseError(lineno, "missing edge line")
        parts = lines[lineno - 1].split()
        if len(parts) != 2:
            raise ParseError(lineno, f"expected 'u v', got {lines[lineno - 1]!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(lineno, f"non-integer endpoints {lines[lineno - 1]!r}") from None
        if u == v:
            raise ParseError(lineno, f"self-loop at {u}")
        if not (0 <= u < n) or not (0 <= v < n):
            raise ParseError(lineno, f"endpoint outside 0..{n - 1}")
        edges.append((u, v))
    return build_graph(n, edges)


def format_edge_list(g: Graph) -> str:
    """Serialize a Graph to the canonical edge-list text format."""
    lines = [f"{g.n} {g.m}"]
    lines.extend(f"{u} {v}" for u, v in g.edges())
    return "\n".join(lines) + "\n"
