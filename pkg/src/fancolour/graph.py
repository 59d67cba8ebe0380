"""Simple undirected graphs: path/fan enumeration, longest paths, density.

Vertices are 0..n-1. Graphs are immutable after construction, so they can be
shared freely between runs and threads. All iteration orders are fixed
(adjacency lists sorted, edges as (min, max) pairs) to keep every downstream
algorithm deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence


class GraphFormatError(ValueError):
    """Raised for malformed graph text input."""


class Graph:
    """Undirected simple graph with sorted adjacency lists."""

    __slots__ = ("n", "edges", "adj")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = ()):
        if n < 0:
            raise ValueError("vertex count must be nonnegative")
        seen = set()
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u},{v}) out of range for n={n}")
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            e = (u, v) if u < v else (v, u)
            if e in seen:
                raise ValueError(f"duplicate edge {e}")
            seen.add(e)
        self.n = n
        self.edges = frozenset(seen)
        adj: list[list[int]] = [[] for _ in range(n)]
        for u, v in seen:
            adj[u].append(v)
            adj[v].append(u)
        self.adj = tuple(tuple(sorted(a)) for a in adj)

    def degree(self, u: int) -> int:
        return len(self.adj[u])

    def max_degree(self) -> int:
        return max((len(a) for a in self.adj), default=0)

    def has_edge(self, u: int, v: int) -> bool:
        if u > v:
            u, v = v, u
        return (u, v) in self.edges

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def __eq__(self, other):
        return (
            isinstance(other, Graph)
            and self.n == other.n
            and self.edges == other.edges
        )

    def __hash__(self):
        return hash((self.n, self.edges))

    def __repr__(self):
        return f"Graph(n={self.n}, m={len(self.edges)})"

    # -- standard constructions -------------------------------------------

    @classmethod
    def cycle(cls, n: int) -> "Graph":
        if n < 3:
            raise ValueError("cycle needs at least 3 vertices")
        return cls(n, [(i, (i + 1) % n) for i in range(n)])

    @classmethod
    def complete(cls, n: int) -> "Graph":
        return cls(n, [(i, j) for i in range(n) for j in range(i + 1, n)])

    @classmethod
    def path(cls, n: int) -> "Graph":
        return cls(n, [(i, i + 1) for i in range(n - 1)])

    # -- subgraphs ---------------------------------------------------------

    def induced(self, vertices: Sequence[int]) -> tuple["Graph", tuple[int, ...]]:
        """Induced subgraph on `vertices`; returns (subgraph, id map back)."""
        vs = tuple(sorted(set(vertices)))
        index = {v: i for i, v in enumerate(vs)}
        edges = [
            (index[u], index[v])
            for u, v in self.edges
            if u in index and v in index
        ]
        return Graph(len(vs), edges), vs


def neighbourhood_subgraph(g: Graph, u: int) -> tuple[Graph, tuple[int, ...]]:
    """Induced subgraph on N(u), with the map from local ids back to g."""
    if not 0 <= u < g.n:
        raise ValueError(f"vertex {u} out of range")
    return g.induced(g.adj[u])


@dataclass(frozen=True)
class PathCopy:
    """A copy of the path on k-1 vertices, canonically oriented.

    `vertices` is the traversal order; canonical means vertices[0] <
    vertices[-1], so each unordered copy is reported exactly once.
    """

    vertices: tuple[int, ...]

    @property
    def edge_set(self) -> frozenset[tuple[int, int]]:
        vs = self.vertices
        return frozenset(
            (vs[i], vs[i + 1]) if vs[i] < vs[i + 1] else (vs[i + 1], vs[i])
            for i in range(len(vs) - 1)
        )


def enumerate_path_copies(f: Graph, k: int) -> list[PathCopy]:
    """All canonical copies of the path on k-1 vertices in f.

    Empty result iff f is P_{k-1}-free. For k=3 this is one copy per edge.
    """
    if k < 3:
        raise ValueError("k must be at least 3")
    length = k - 1
    out: list[PathCopy] = []
    adj = f.adj
    seq: list[int] = []
    in_seq = [False] * f.n

    def extend():
        if len(seq) == length:
            if seq[0] < seq[-1]:
                out.append(PathCopy(tuple(seq)))
            return
        for w in adj[seq[-1]]:
            if not in_seq[w]:
                seq.append(w)
                in_seq[w] = True
                extend()
                seq.pop()
                in_seq[w] = False

    for s in range(f.n):
        seq = [s]
        in_seq[s] = True
        extend()
        in_seq[s] = False
    out.sort(key=lambda c: c.vertices)
    return out


def is_path_free(f: Graph, k: int) -> bool:
    """True iff f contains no path on k-1 vertices."""
    nverts = k - 1
    if nverts <= 1:
        return f.n < nverts
    adj = f.adj
    in_seq = [False] * f.n

    def extend(v, depth):
        if depth == nverts:
            return True
        for w in adj[v]:
            if not in_seq[w]:
                in_seq[w] = True
                if extend(w, depth + 1):
                    return True
                in_seq[w] = False
        return False

    for s in range(f.n):
        in_seq[s] = True
        if extend(s, 1):
            return False
        in_seq[s] = False
    return True


def is_connected(g: Graph) -> bool:
    if g.n == 0:
        return False
    seen = [False] * g.n
    stack = [0]
    seen[0] = True
    count = 1
    while stack:
        v = stack.pop()
        for w in g.adj[v]:
            if not seen[w]:
                seen[w] = True
                count += 1
                stack.append(w)
    return count == g.n


def longest_path(f: Graph) -> tuple[int, ...]:
    """A maximum-length path in a connected graph.

    Deterministic: among maximum-length paths, returns the lexicographically
    least vertex sequence in DFS enumeration order. Exhaustive search; meant
    for neighbourhood-sized inputs.
    """
    if f.n == 0:
        raise ValueError("empty graph")
    if not is_connected(f):
        raise ValueError("longest_path requires a connected graph")
    adj = f.adj
    best: list[int] = []
    seq: list[int] = []
    in_seq = [False] * f.n

    def extend():
        nonlocal best
        if len(seq) > len(best) or (len(seq) == len(best) and seq < best):
            best = list(seq)
        for w in adj[seq[-1]]:
            if not in_seq[w]:
                seq.append(w)
                in_seq[w] = True
                extend()
                seq.pop()
                in_seq[w] = False

    for s in range(f.n):
        seq = [s]
        in_seq[s] = True
        extend()
        in_seq[s] = False
    return tuple(best)


def count_fans_per_vertex(g: Graph, k: int) -> list[int]:
    """Per vertex u, the number of canonical P_{k-1} copies in G[N(u)].

    Each such copy together with the hub u is a fan of order k centred at u.
    """
    if k < 3:
        raise ValueError("k must be at least 3")
    counts = []
    for u in range(g.n):
        sub, _ = neighbourhood_subgraph(g, u)
        counts.append(len(enumerate_path_copies(sub, k)))
    return counts


def average_degree(f: Graph) -> Fraction:
    """Exact average degree 2|E|/|V|."""
    if f.n == 0:
        raise ValueError("average degree of the empty graph is undefined")
    return Fraction(2 * len(f.edges), f.n)


def max_average_degree(f: Graph, cap: int = 20) -> Fraction:
    """mad(f): max average degree over nonempty induced subgraphs.

    Exhaustive (2^n); refuses graphs larger than `cap` vertices.
    """
    if f.n == 0:
        raise ValueError("mad of the empty graph is undefined")
    if f.n > cap:
        raise ValueError(f"mad computation capped at {cap} vertices")
    adj_mask = [0] * f.n
    for u, v in f.edges:
        adj_mask[u] |= 1 << v
        adj_mask[v] |= 1 << u
    best = Fraction(0)
    for mask in range(1, 1 << f.n):
        size = bin(mask).count("1")
        degsum = 0  # counts each internal edge twice, which is exactly 2|E|
        rest = mask
        while rest:
            v = (rest & -rest).bit_length() - 1
            rest &= rest - 1
            degsum += bin(adj_mask[v] & mask).count("1")
        best = max(best, Fraction(degsum, size))
    return best


def write_graph(g: Graph, path: str) -> None:
    """Write the text format: `p n m` header then one `e u v` line per edge."""
    lines = [f"p {g.n} {len(g.edges)}"]
    lines.extend(f"e {u} {v}" for u, v in g.sorted_edges())
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_graph(path: str) -> Graph:
    """Parse the text format; rejects self-loops and duplicate edges."""
    n = None
    m = None
    edges: list[tuple[int, int]] = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("c"):
                continue
            parts = line.split()
            if parts[0] == "p":
                if n is not None:
                    raise GraphFormatError(f"line {lineno}: repeated header")
                if len(parts) != 3:
                    raise GraphFormatError(f"line {lineno}: bad header")
                n, m = int(parts[1]), int(parts[2])
            elif parts[0] == "e":
                if n is None:
                    raise GraphFormatError(f"line {lineno}: edge before header")
                if len(parts) != 3:
                    raise GraphFormatError(f"line {lineno}: bad edge line")
                edges.append((int(parts[1]), int(parts[2])))
            else:
                raise GraphFormatError(f"line {lineno}: unknown record {parts[0]!r}")
    if n is None:
        raise GraphFormatError("missing `p` header")
    if m != len(edges):
        raise GraphFormatError(f"header declares {m} edges, found {len(edges)}")
    try:
        return Graph(n, edges)
    except ValueError as exc:
        raise GraphFormatError(str(exc)) from exc
