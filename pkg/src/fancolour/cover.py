"""Covers of graphs, partial colourings, residual covers, and flaws.

A cover pairs a base graph with per-vertex colour lists plus cross-list
matchings on base edges; its size-n independent sets encode proper list
colourings. Colour ids are dense ints allocated vertex by vertex, so the list
of vertex u is the contiguous range colours_of(u). Within-list clique edges
are implicit: an assignment holds at most one colour per vertex by
construction, so only cross edges are materialised (these are exactly the
edges of H*).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .graph import Graph

BLANK = 0
COLOURED = 1
UNCOLOURED = 2


class Cover:
    """Cover (L, H) of a base graph; immutable after construction.

    `naturals_per_vertex` fixes list sizes and retains the natural-number
    identity of each colour for output. `cross_pairs` are colour-id pairs and
    must sit on base edges, at most one partner per colour per neighbouring
    vertex (the per-edge matching condition).
    """

    __slots__ = ("base", "list_start", "owner", "natural", "conflicts", "_tables")

    def __init__(
        self,
        base: Graph,
        naturals_per_vertex: Sequence[Sequence[int]],
        cross_pairs: Iterable[tuple[int, int]],
    ):
        self._tables = None
        if len(naturals_per_vertex) != base.n:
            raise ValueError("need one colour list per base vertex")
        self.base = base
        starts = [0]
        owner: list[int] = []
        natural: list[int] = []
        for u, lst in enumerate(naturals_per_vertex):
            if len(set(lst)) != len(lst):
                raise ValueError(f"list of vertex {u} repeats a natural")
            for nat in lst:
                owner.append(u)
                natural.append(nat)
            starts.append(len(owner))
        self.list_start = tuple(starts)
        self.owner = tuple(owner)
        self.natural = tuple(natural)

        ncols = len(owner)
        conflicts: list[list[int]] = [[] for _ in range(ncols)]
        partner_seen = set()
        for x, y in cross_pairs:
            u, v = owner[x], owner[y]
            if u == v:
                raise ValueError(f"cross edge {x}-{y} inside one list")
            if not base.has_edge(u, v):
                raise ValueError(f"cross edge {x}-{y} off the base edge set")
            if (x, v) in partner_seen or (y, u) in partner_seen:
                raise ValueError(f"matching violated at cross edge {x}-{y}")
            partner_seen.add((x, v))
            partner_seen.add((y, u))
            conflicts[x].append(y)
            conflicts[y].append(x)
        self.conflicts = tuple(tuple(sorted(c)) for c in conflicts)

    # -- colour bookkeeping -------------------------------------------------

    def engine_tables(self):
        """Read-only CSR arrays shared by every run over this cover."""
        if self._tables is None:
            from array import array

            conf_start = [0]
            conf_flat: list[int] = []
            for x in range(self.num_colours):
                conf_flat.extend(self.conflicts[x])
                conf_start.append(len(conf_flat))
            self._tables = (
                array("i", self.list_start),
                array("i", self.owner),
                array("i", conf_start),
                array("i", conf_flat) if conf_flat else array("i", [0]),
            )
        return self._tables

    @property
    def num_colours(self) -> int:
        return len(self.owner)

    def colours_of(self, u: int) -> range:
        return range(self.list_start[u], self.list_start[u + 1])

    def list_size(self, u: int) -> int:
        return self.list_start[u + 1] - self.list_start[u]

    def uniform_q(self) -> int:
        sizes = {self.list_size(u) for u in range(self.base.n)}
        if len(sizes) > 1:
            raise ValueError(f"ragged list sizes {sorted(sizes)}")
        return sizes.pop() if sizes else 0

    def cross_pairs(self) -> list[tuple[int, int]]:
        return [(x, y) for x in range(self.num_colours) for y in self.conflicts[x] if x < y]

    def edge_matching(self, u: int, v: int) -> list[tuple[int, int]]:
        """Cross pairs (x, y) with x in L(u), y in L(v)."""
        return [
            (x, y)
            for x in self.colours_of(u)
            for y in self.conflicts[x]
            if self.owner[y] == v
        ]

    def naturals_of(self, u: int) -> list[int]:
        return [self.natural[x] for x in self.colours_of(u)]

    # -- derived covers -----------------------------------------------------

    def without_base_edges(self, removed: Iterable[tuple[int, int]]) -> "Cover":
        """Same lists, with all cross edges on the given base edges dropped."""
        removed_set = {(u, v) if u < v else (v, u) for u, v in removed}
        keep = [
            (x, y)
            for x, y in self.cross_pairs()
            if _edge_key(self.owner[x], self.owner[y]) not in removed_set
        ]
        lists = [self.naturals_of(u) for u in range(self.base.n)]
        return Cover(self.base, lists, keep)

    def restrict(
        self, vertices: Sequence[int], colour_alive
    ) -> tuple["Cover", tuple[int, ...], list[int]]:
        """Compacted cover on `vertices` keeping colours with colour_alive(x).

        Returns (cover, vertex map back, colour map back).
        """
        sub_base, vmap = self.base.induced(vertices)
        colour_map: list[int] = []
        local_of = {}
        lists = []
        for v in vmap:
            lst = []
            for x in self.colours_of(v):
                if colour_alive(x):
                    local_of[x] = len(colour_map)
                    colour_map.append(x)
                    lst.append(self.natural[x])
            lists.append(lst)
        vset = set(vmap)
        pairs = []
        for x in colour_map:
            for y in self.conflicts[x]:
                if x < y and y in local_of and self.owner[y] in vset:
                    pairs.append((local_of[x], local_of[y]))
        return Cover(sub_base, lists, pairs), vmap, colour_map


def _edge_key(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


def build_list_cover(g: Graph, lists: Sequence[Sequence[int]]) -> Cover:
    """Cover from a list assignment: equal naturals on a base edge conflict."""
    cover = Cover(g, lists, [])
    # recompute cross pairs from natural equality; Cover() above validated lists
    pairs = []
    for u, v in g.sorted_edges():
        by_nat = {cover.natural[y]: y for y in cover.colours_of(v)}
        for x in cover.colours_of(u):
            y = by_nat.get(cover.natural[x])
            if y is not None:
                pairs.append((x, y))
    return Cover(g, lists, pairs)


def uniform_lists(n: int, q: int) -> list[list[int]]:
    """The q-list assignment L(u) = {1, ..., q} for every vertex."""
    return [list(range(1, q + 1)) for _ in range(n)]


class PartialColouring:
    """State sigma: each vertex blank, a list colour, or an incident edge."""

    __slots__ = ("cover", "state", "value")

    def __init__(self, cover: Cover):
        self.cover = cover
        self.state = [BLANK] * cover.base.n
        self.value = [-1] * cover.base.n

    def copy(self) -> "PartialColouring":
        other = PartialColouring.__new__(PartialColouring)
        other.cover = self.cover
        other.state = list(self.state)
        other.value = list(self.value)
        return other

    # -- queries -------------------------------------------------------------

    def is_blank(self, u: int) -> bool:
        return self.state[u] == BLANK

    def is_coloured(self, u: int) -> bool:
        return self.state[u] == COLOURED

    def is_uncoloured(self, u: int) -> bool:
        return self.state[u] == UNCOLOURED

    def colour_of(self, u: int) -> Optional[int]:
        return self.value[u] if self.state[u] == COLOURED else None

    def unc_edge(self, u: int) -> Optional[tuple[int, int]]:
        if self.state[u] != UNCOLOURED:
            return None
        return _edge_key(u, self.value[u])

    def ind(self) -> set[int]:
        return {
            self.value[u]
            for u in range(self.cover.base.n)
            if self.state[u] == COLOURED
        }

    def blank_vertices(self) -> list[int]:
        return [u for u, s in enumerate(self.state) if s == BLANK]

    def coloured_vertices(self) -> list[int]:
        return [u for u, s in enumerate(self.state) if s == COLOURED]

    def unc_vertices(self) -> list[int]:
        return [u for u, s in enumerate(self.state) if s == UNCOLOURED]

    # -- mutation --------------------------------------------------------------

    def set_blank(self, u: int) -> None:
        self.state[u] = BLANK
        self.value[u] = -1

    def set_colour(self, u: int, x: int) -> None:
        if self.cover.owner[x] != u:
            raise ValueError(f"colour {x} is not on the list of vertex {u}")
        self.state[u] = COLOURED
        self.value[u] = x

    def set_uncoloured(self, u: int, e: tuple[int, int]) -> None:
        a, b = e
        if u not in (a, b):
            raise ValueError(f"vertex {u} not on edge {e}")
        if not self.cover.base.has_edge(a, b):
            raise ValueError(f"{e} is not a base edge")
        self.state[u] = UNCOLOURED
        self.value[u] = b if u == a else a

    def validate(self) -> None:
        """Raise AssertionError if this is not a valid partial colouring."""
        cov = self.cover
        assigned = set()
        for u in range(cov.base.n):
            if self.state[u] == COLOURED:
                x = self.value[u]
                assert cov.owner[x] == u, f"colour {x} off-list at {u}"
                assigned.add(x)
            elif self.state[u] == UNCOLOURED:
                w = self.value[u]
                assert cov.base.has_edge(u, w), f"bad uncoloured marker at {u}"
        for x in assigned:
            for y in cov.conflicts[x]:
                assert y not in assigned, f"assigned colours {x},{y} conflict"
        # at most one endpoint of an edge may carry that edge as its marker
        for u in range(cov.base.n):
            if self.state[u] == UNCOLOURED:
                w = self.value[u]
                assert not (
                    self.state[w] == UNCOLOURED and self.value[w] == u
                ), f"both endpoints of {u},{w} marked uncoloured with that edge"


def all_blank(cover: Cover) -> PartialColouring:
    return PartialColouring(cover)


class ResidualCover:
    """View of H_sigma: surviving colours, residual lists, cross degrees.

    Snapshot semantics: survival is computed from sigma at construction time.
    Colours are kept under their global ids (tombstoned view); use compact()
    for a standalone cover, e.g. as sampler input.
    """

    __slots__ = ("cover", "alive", "blank")

    def __init__(self, cover: Cover, sigma: PartialColouring):
        assigned = sigma.ind()
        self.cover = cover
        self.alive = [
            all(y not in assigned for y in cover.conflicts[x])
            for x in range(cover.num_colours)
        ]
        self.blank = [sigma.state[u] == BLANK for u in range(cover.base.n)]

    def base_vertices(self) -> list[int]:
        return [u for u, b in enumerate(self.blank) if b]

    def list_of(self, u: int) -> list[int]:
        return [x for x in self.cover.colours_of(u) if self.alive[x]]

    def list_size(self, u: int) -> int:
        return sum(1 for x in self.cover.colours_of(u) if self.alive[x])

    def deg_star(self, x: int) -> int:
        """Degree of x in H*_sigma: surviving conflicts on blank vertices."""
        if not self.alive[x]:
            raise ValueError(f"colour {x} was eliminated by sigma")
        return sum(
            1
            for y in self.cover.conflicts[x]
            if self.alive[y] and self.blank[self.cover.owner[y]]
        )

    def compact(self, vertices: Optional[Sequence[int]] = None):
        """Standalone cover on the given vertices (default: all blank ones)."""
        verts = self.base_vertices() if vertices is None else vertices
        alive = self.alive
        return self.cover.restrict(verts, lambda x: alive[x])


def residual_cover(c: Cover, sigma: PartialColouring) -> ResidualCover:
    return ResidualCover(c, sigma)


def deg_star(c: Cover, sigma: PartialColouring, x: int) -> int:
    return ResidualCover(c, sigma).deg_star(x)


def is_B_flawed(c: Cover, sigma: PartialColouring, u: int, params) -> bool:
    """B_u: u not coloured, and too few colours or too much competition."""
    if sigma.state[u] == COLOURED:
        return False
    res = ResidualCover(c, sigma)
    lst = res.list_of(u)
    if len(lst) < params.ell:
        return True
    threshold = params.ell / 8
    return any(res.deg_star(x) > threshold for x in lst)


@dataclass(frozen=True, order=True)
class Flaw:
    """B_u or U_u^e; the field order gives the fixed total order on flaws."""

    is_u: int  # 0 for B flaws, 1 for U flaws: every B precedes every U
    vertex: int
    edge: Optional[tuple[int, int]] = None

    @staticmethod
    def b(u: int) -> "Flaw":
        return Flaw(0, u)

    @staticmethod
    def u(u: int, e: tuple[int, int]) -> "Flaw":
        return Flaw(1, u, _edge_key(*e))


def least_flaw(c: Cover, sigma: PartialColouring, params) -> Optional[Flaw]:
    """Least present flaw under the fixed order, or None if flawless."""
    for u in range(c.base.n):
        if is_B_flawed(c, sigma, u, params):
            return Flaw.b(u)
    for u in range(c.base.n):
        if sigma.state[u] == UNCOLOURED:
            return Flaw.u(u, sigma.unc_edge(u))
    return None


# -- list-assignment files ----------------------------------------------------


def write_lists(lists: Sequence[Sequence[int]], path: str) -> None:
    obj = {str(u): list(lst) for u, lst in enumerate(lists)}
    with open(path, "w") as fh:
        json.dump(obj, fh, sort_keys=True, indent=0)
        fh.write("\n")


def read_lists(path: str) -> list[list[int]]:
    with open(path) as fh:
        obj = json.load(fh)
    n = len(obj)
    lists: list[list[int]] = [[] for _ in range(n)]
    for key, val in obj.items():
        u = int(key)
        if not 0 <= u < n:
            raise ValueError(f"list file: vertex id {u} out of range 0..{n - 1}")
        lists[u] = [int(c) for c in val]
    return lists
