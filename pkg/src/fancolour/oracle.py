"""Brute-force ground truth for the probabilistic and combinatorial claims.

Exponential by design; every cap is a hard error, never a silent truncation.
These routines share only the Graph/Cover plumbing with the code they check:
distributions are enumerated directly, colourings found by backtracking, and
the transition law of the B-action is rebuilt from its definition.
"""

from __future__ import annotations

from typing import Optional, Sequence

from .cover import COLOURED, UNCOLOURED, Cover, PartialColouring
from .graph import Graph
from .hardcore import CapExceeded
from .resampler import Params, remove_edges


def _independent_sets_of_cover(c: Cover) -> list[frozenset[int]]:
    """Every independent set of H, one vertex choice at a time."""
    n = c.base.n
    out: list[frozenset[int]] = []
    current: list[int] = []

    def rec(u: int, forbidden: frozenset[int]):
        if u == n:
            out.append(frozenset(current))
            return
        rec(u + 1, forbidden)
        for x in c.colours_of(u):
            if x not in forbidden:
                current.append(x)
                rec(u + 1, forbidden | frozenset(c.conflicts[x]))
                current.pop()

    rec(0, frozenset())
    return out


def exact_hardcore_distribution(c: Cover, lam, cap: int = 20) -> dict:
    """Full map independent set -> probability under the hard-core model."""
    if c.num_colours > cap:
        raise CapExceeded(f"{c.num_colours} colours exceeds oracle cap {cap}")
    sets = _independent_sets_of_cover(c)
    weights = [lam ** len(s) for s in sets]
    z = sum(weights)
    return {s: w / z for s, w in zip(sets, weights)}


def exact_list_colouring(
    g: Graph, lists: Sequence[Sequence[int]], cap: int = 30
) -> Optional[list[int]]:
    """Proper list colouring by backtracking, or None after exhaustion."""
    if g.n > cap:
        raise CapExceeded(f"{g.n} vertices exceeds oracle cap {cap}")
    assignment: list[Optional[int]] = [None] * g.n

    def rec(u: int) -> bool:
        if u == g.n:
            return True
        for nat in sorted(lists[u]):
            if all(assignment[v] != nat for v in g.adj[u]):
                assignment[u] = nat
                if rec(u + 1):
                    return True
                assignment[u] = None
        return False

    if rec(0):
        return [int(x) for x in assignment]  # type: ignore[arg-type]
    return None


def min_edges_to_pkfree(f: Graph, k: int, cap: int = 20) -> int:
    """Minimum number of edge deletions leaving no path on k-1 vertices.

    Maximises the kept edge set instead: edges are added one by one, and an
    addition is legal only if it creates no path on k-1 vertices through the
    new edge (sound and complete for any fixed addition order).
    """
    edges = f.sorted_edges()
    m = len(edges)
    if m > cap:
        raise CapExceeded(f"{m} edges exceeds oracle cap {cap}")
    adj: list[set[int]] = [set() for _ in range(f.n)]
    best = 0

    def has_path_through(u: int, v: int, nverts: int) -> bool:
        extra = nverts - 2

        def paths_from(s: int, length: int, banned: set[int]):
            if length == 0:
                yield banned
                return
            for w in adj[s]:
                if w not in banned:
                    yield from paths_from(w, length - 1, banned | {w})

        for left in range(extra + 1):
            for used in paths_from(u, left, {u, v}):
                for _ in paths_from(v, extra - left, used):
                    return True
        return False

    def dfs(idx: int, kept: int):
        nonlocal best
        if kept + (m - idx) <= best:
            return
        if idx == m:
            best = max(best, kept)
            return
        u, v = edges[idx]
        adj[u].add(v)
        adj[v].add(u)
        if not has_path_through(u, v, k - 1):
            dfs(idx + 1, kept + 1)
        adj[u].remove(v)
        adj[v].remove(u)
        dfs(idx + 1, kept)

    dfs(0, 0)
    return m - best


def transition_signature(sigma: PartialColouring, u: int) -> tuple:
    """Canonical description of sigma restricted to N(u); the B-action never
    changes anything else."""
    out = []
    for v in sigma.cover.base.adj[u]:
        s = sigma.state[v]
        if s == COLOURED:
            out.append((v, "C", sigma.value[v]))
        elif s == UNCOLOURED:
            out.append((v, "U", sigma.unc_edge(v)))
        else:
            out.append((v, "B", None))
    return tuple(out)


def address_b_transition_oracle(
    u: int, sigma: PartialColouring, c: Cover, p: Params, cap: int = 12
) -> dict:
    """Exact law of the B_u action's output: enumerate every sampleable set
    J0 with probability lam^|J0|/Z and push it through the deterministic
    uncolouring. Keys are transition_signature tuples."""
    sigma2 = sigma.copy()
    for v in c.base.adj[u]:
        if sigma2.state[v] == COLOURED:
            sigma2.set_blank(v)
    assigned = sigma2.ind()
    fverts = [v for v in c.base.adj[u] if sigma2.state[v] != UNCOLOURED]
    local, vmap, colmap = c.restrict(
        fverts, lambda x: all(y not in assigned for y in c.conflicts[x])
    )
    if local.num_colours > cap:
        raise CapExceeded(f"{local.num_colours} colours exceeds oracle cap {cap}")
    hat = remove_edges(local.base, local, p.k).cover_hat
    j_sets = _independent_sets_of_cover(hat)
    z = sum(p.lam ** len(j) for j in j_sets)
    local_edges = sorted((vmap[a], vmap[b]) for a, b in local.base.edges)
    dist: dict[tuple, float] = {}
    for j in j_sets:
        weight = (p.lam ** len(j)) / z
        chosen = {c.owner[colmap[x]]: colmap[x] for x in j}
        unc_new: dict[int, int] = {}
        while True:
            mono = None
            for v, w in local_edges:
                x = chosen.get(v)
                y = chosen.get(w)
                if x is not None and y is not None and y in c.conflicts[x]:
                    mono = (v, w)
                    break
            if mono is None:
                break
            v, w = mono
            unc_new[v] = w
            del chosen[v]
        tau = sigma2.copy()
        for v, x in chosen.items():
            tau.set_colour(v, x)
        for v, w in unc_new.items():
            tau.set_uncoloured(v, (v, w))
        sig = transition_signature(tau, u)
        dist[sig] = dist.get(sig, 0.0) + weight
    return dist


def verify_colouring(
    g: Graph, lists: Sequence[Sequence[int]], colouring: Sequence[int]
) -> list[str]:
    """Violations of properness/list membership; empty list means valid."""
    problems = []
    if len(colouring) != g.n:
        problems.append(f"colouring has {len(colouring)} entries for {g.n} vertices")
        return problems
    for u in range(g.n):
        if colouring[u] not in set(lists[u]):
            problems.append(f"vertex {u}: colour {colouring[u]} not in its list")
    for u, v in g.sorted_edges():
        if colouring[u] == colouring[v]:
            problems.append(f"edge {u},{v} monochromatic with colour {colouring[u]}")
    return problems
