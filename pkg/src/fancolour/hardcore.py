"""Hard-core model machinery: partition functions, exact sampling, occupancy.

Exact computation comes in two independent flavours: full enumeration (the
oracle route, via independent-set size histograms) and the divide-and-conquer
recursion on covers whose base graph has no path on k-1 vertices (peel a
longest path per component, condition on its colours, recurse). The sampler
follows the same recursion through exact conditional marginals, so its draws
are exactly hard-core distributed.

Fugacities may be floats or fractions.Fraction; with Fraction inputs the
partition functions are exact rationals.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Union

from . import _core
from .cover import Cover
from .graph import Graph

Numeric = Union[float, Fraction]


class CapExceeded(ValueError):
    """An exhaustive routine was asked to exceed its configured cap."""


class PathFreeViolation(ValueError):
    """The base graph contains a path on k-1 vertices."""


# -- Lambert W -----------------------------------------------------------------

_BRANCH_POINT = -math.exp(-1)


def lambert_w(x: float) -> float:
    """Upper branch of the inverse of w -> w e^w, for x >= -1/e.

    Halley iteration; initial guess log(1+x) for x >= 0, series guesses on
    the negative range. Stops at |w e^w - x| <= 1e-12 * max(1, |x|).
    """
    if x < _BRANCH_POINT:
        raise ValueError(f"lambert_w domain error: {x} < -1/e")
    if x == 0.0:
        return 0.0
    if x >= 0.0:
        w = math.log1p(x)
    elif x > -0.25:
        w = x
    else:
        p = math.sqrt(2.0 * (math.e * x + 1.0))
        w = -1.0 + p - p * p / 3.0 + 11.0 * p**3 / 72.0
    tol = 1e-12 * max(1.0, abs(x))
    for _ in range(200):
        ew = math.exp(w)
        f = w * ew - x
        if abs(f) <= tol:
            return w
        wp1 = w + 1.0
        if abs(wp1) < 1e-14:
            wp1 = 1e-14 if wp1 >= 0 else -1e-14
        # Halley step
        denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1)
        w -= f / denom
        if w < -1.0:
            w = -1.0 + 1e-12
    ew = math.exp(w)
    if abs(w * ew - x) <= tol:
        return w
    raise ArithmeticError(f"lambert_w failed to converge at x={x}")


# -- occupancy certificates ------------------------------------------------------


@dataclass(frozen=True)
class OccupancyCertificate:
    """Witness (beta, gamma) for the local occupancy inequality at fugacity lam."""

    beta: float
    gamma: float
    lam: float

    def __post_init__(self):
        if self.beta <= 0 or self.gamma <= 0 or self.lam <= 0:
            raise ValueError("beta, gamma, lam must all be positive")


def derive_occupancy_certificate(
    a: float, d: float, lam: float
) -> tuple[OccupancyCertificate, float]:
    """Optimal (beta, gamma) for graphs whose neighbourhoods have mad <= a.

    Returns the certificate and the achieved value of beta + gamma*d,
    which equals ((1+lam)/lam) * D / W(D) for D = d (1+lam)^a log(1+lam).
    The closed-form identities are re-verified to 1e-9 relative.
    """
    if a < 0:
        raise ValueError("a must be nonnegative")
    if d <= 0:
        raise ValueError("d must be positive")
    if lam <= 0:
        raise ValueError("lam must be positive")
    log1l = math.log1p(lam)
    big_d = d * (1.0 + lam) ** a * log1l
    if big_d <= 0:
        raise ValueError("degenerate parameters: d*(1+lam)^a*log(1+lam) <= 0")
    w = lambert_w(big_d)
    ratio = (1.0 + lam) / lam
    gamma = ratio * (1.0 + lam) ** a * log1l / (1.0 + w)
    # the definition of beta, with the exponent evaluated in log space to
    # dodge overflow: (1+lam)^E = exp(E log(1+lam))
    exponent = (1.0 + lam) ** (1.0 + a) / (gamma * lam) - a
    beta = gamma * math.exp(exponent * log1l) / (math.e * log1l)

    beta_closed = ratio * big_d / (w * (1.0 + w))
    _check_close(beta, beta_closed, "beta closed form")
    value = beta + gamma * d
    value_closed = ratio * big_d / w
    _check_close(value, value_closed, "beta+gamma*d closed form")
    y_star = w / log1l
    g_at_star = (lam / (1.0 + lam)) * (
        beta * (1.0 + lam) ** (-y_star) + gamma * y_star * (1.0 + lam) ** (-a)
    )
    _check_close(g_at_star, 1.0, "stationary value g(y*)")
    return OccupancyCertificate(beta, gamma, lam), value


def _check_close(got: float, want: float, label: str, rtol: float = 1e-9) -> None:
    if abs(got - want) > rtol * max(1.0, abs(want)):
        raise ArithmeticError(f"{label}: {got} vs {want}")


# -- brute-force partition functions -----------------------------------------------


@dataclass(frozen=True)
class HardCoreInstance:
    """A cover (or plain graph, for oracle paths) with a fugacity."""

    cover: Union[Cover, Graph]
    lam: Numeric

    def __post_init__(self):
        if self.lam <= 0:
            raise ValueError("fugacity must be positive")


def _conflict_masks(obj: Union[Cover, Graph]) -> tuple[int, list[int]]:
    """Items and pairwise-conflict bitmasks whose independent subsets are I(H)."""
    if isinstance(obj, Graph):
        masks = [0] * obj.n
        for u, v in obj.edges:
            masks[u] |= 1 << v
            masks[v] |= 1 << u
        return obj.n, masks
    ncols = obj.num_colours
    masks = [0] * ncols
    for u in range(obj.base.n):
        block = 0
        for x in obj.colours_of(u):
            block |= 1 << x
        for x in obj.colours_of(u):
            masks[x] |= block & ~(1 << x)  # within-list clique
    for x in range(ncols):
        for y in obj.conflicts[x]:
            masks[x] |= 1 << y
    return ncols, masks


def independent_set_histogram(obj: Union[Cover, Graph], cap: int = 24) -> list[int]:
    """hist[s] = number of independent sets of size s in H (or the graph)."""
    nitems, masks = _conflict_masks(obj)
    if nitems > cap:
        raise CapExceeded(f"{nitems} items exceeds brute-force cap {cap}")
    return _core.size_histogram(masks, nitems)


def partition_function_bruteforce(
    inst: HardCoreInstance, cap: int = 24
) -> tuple[Numeric, Numeric]:
    """(Z, lam*Z') by full enumeration; exact for Fraction fugacities."""
    hist = independent_set_histogram(inst.cover, cap)
    lam = inst.lam
    z = hist[0] * (lam**0)
    s1 = z - z  # zero of the right numeric type
    power = lam**0
    for s in range(1, len(hist)):
        power = power * lam
        if hist[s]:
            z = z + hist[s] * power
            s1 = s1 + s * hist[s] * power
    return z, s1


def occupancy_fraction(g: Graph, lam: Numeric, cap: int = 24) -> Numeric:
    """Exact E|I|/n at fugacity lam, i.e. lam Z'/(n Z)."""
    if g.n == 0:
        raise ValueError("occupancy fraction of the empty graph is undefined")
    z, s1 = partition_function_bruteforce(HardCoreInstance(g, lam), cap)
    return s1 / (g.n * z)


# -- the path-free recursion -------------------------------------------------------


class HardCoreSampler:
    """Exact hard-core sampling and Z on covers of P_{k-1}-free base graphs.

    Per connected component: if edgeless, colours are independent per vertex;
    otherwise peel a longest path P (at most k-2 vertices, or the
    precondition fails), enumerate the independent sets J of H[L(P)], weight
    each by lam^|J| * Z(rest | J), and recurse with k-1 on the rest, whose
    components are P_{k-2}-free. Everything is memoised by (vertex mask,
    surviving-colour mask, k), so repeated draws share the arithmetic.
    """

    def __init__(self, cover: Cover, lam: Numeric, k: int):
        if k < 3:
            raise ValueError("k must be at least 3")
        if lam <= 0:
            raise ValueError("fugacity must be positive")
        self.cover = cover
        self.lam = lam
        self.k = k
        base = cover.base
        self.nv = base.n
        self.vadj = [0] * base.n
        for u, v in base.edges:
            self.vadj[u] |= 1 << v
            self.vadj[v] |= 1 << u
        self.vert_cols = [0] * base.n
        for u in range(base.n):
            for x in cover.colours_of(u):
                self.vert_cols[u] |= 1 << x
        self.col_conf = [0] * cover.num_colours
        for x in range(cover.num_colours):
            for y in cover.conflicts[x]:
                self.col_conf[x] |= 1 << y
        self.full_vmask = (1 << base.n) - 1
        self.full_cmask = (1 << cover.num_colours) - 1
        self._zc: dict = {}
        self._cands: dict = {}
        self._paths: dict = {}
        self._comps: dict = {}
        self._edgeless: dict = {}
        self._opts: dict = {}
        self._cum: dict = {}
        self._compcols: dict = {}

    # -- structure helpers ----------------------------------------------------

    def _components(self, vmask: int) -> list[int]:
        got = self._comps.get(vmask)
        if got is not None:
            return got
        comps = []
        rest = vmask
        while rest:
            seed = rest & (-rest)
            comp = seed
            frontier = seed
            while frontier:
                v = (frontier & -frontier).bit_length() - 1
                frontier &= frontier - 1
                grow = self.vadj[v] & vmask & ~comp
                comp |= grow
                frontier |= grow
            comps.append(comp)
            rest &= ~comp
        self._comps[vmask] = comps
        return comps

    def _is_edgeless(self, vmask: int) -> bool:
        got = self._edgeless.get(vmask)
        if got is not None:
            return got
        result = True
        rest = vmask
        while rest:
            v = (rest & -rest).bit_length() - 1
            rest &= rest - 1
            if self.vadj[v] & vmask:
                result = False
                break
        self._edgeless[vmask] = result
        return result

    def _longest_path(self, vmask: int, cap: int) -> tuple[int, ...]:
        """Longest path inside vmask; raises if it exceeds cap vertices."""
        cached = self._paths.get(vmask)
        if cached is not None:
            return cached
        verts = _bits(vmask)
        best: list[int] = []
        seq: list[int] = []

        def extend(seen: int):
            nonlocal best
            if len(seq) > len(best):
                best = list(seq)
                if len(best) > cap:
                    raise PathFreeViolation(
                        f"found a path on {len(best)} vertices; expected "
                        f"P_{cap + 1}-free input"
                    )
            rest = self.vadj[seq[-1]] & vmask & ~seen
            while rest:
                w = (rest & -rest).bit_length() - 1
                rest &= rest - 1
                seq.append(w)
                extend(seen | (1 << w))
                seq.pop()

        for s in verts:
            seq = [s]
            extend(1 << s)
        path = tuple(best)
        self._paths[vmask] = path
        return path

    # -- partition function -----------------------------------------------------

    def partition_function(self) -> Numeric:
        return self._z_any(self.full_vmask, self.full_cmask, self.k)

    def _z_any(self, vmask: int, cmask: int, k: int) -> Numeric:
        z = self.lam**0
        for comp in self._components(vmask):
            z = z * self._z_comp(comp, self._norm(comp, cmask), k)
        return z

    def _norm(self, vmask: int, cmask: int) -> int:
        cols = self._compcols.get(vmask)
        if cols is None:
            cols = 0
            rest = vmask
            while rest:
                v = (rest & -rest).bit_length() - 1
                rest &= rest - 1
                cols |= self.vert_cols[v]
            self._compcols[vmask] = cols
        return cmask & cols

    def _z_comp(self, vmask: int, cmask: int, k: int) -> Numeric:
        key = (vmask, cmask, k)
        got = self._zc.get(key)
        if got is not None:
            return got
        if self._is_edgeless(vmask):
            z = self.lam**0
            rest = vmask
            while rest:
                v = (rest & -rest).bit_length() - 1
                rest &= rest - 1
                z = z * (1 + (self.vert_cols[v] & cmask).bit_count() * self.lam)
        else:
            if k <= 3:
                raise PathFreeViolation("base graph has an edge but k=3 needs P_2-free")
            cands = self._branch_candidates(vmask, cmask, k)
            z = sum(w for _, w, _, _ in cands)
        self._zc[key] = z
        return z

    def _branch_candidates(self, vmask: int, cmask: int, k: int):
        key = (vmask, cmask, k)
        got = self._cands.get(key)
        if got is not None:
            return got
        path = self._longest_path(vmask, k - 2)
        path_vmask = 0
        path_cols = 0
        for v in path:
            path_vmask |= 1 << v
            path_cols |= self.vert_cols[v]
        sub_vmask = vmask & ~path_vmask
        out = []
        choice: list[int] = []

        def assemble(i: int, conf: int, weight):
            if i == len(path):
                sub_cmask = (cmask & ~path_cols) & ~conf
                w = weight * self._z_any(sub_vmask, sub_cmask, k - 1)
                out.append((tuple(choice), w, sub_vmask, sub_cmask))
                return
            v = path[i]
            assemble(i + 1, conf, weight)  # no colour at v
            opts = self.vert_cols[v] & cmask
            while opts:
                x = (opts & -opts).bit_length() - 1
                opts &= opts - 1
                if conf & (1 << x):
                    continue  # conflicts with an earlier choice
                choice.append(x)
                assemble(i + 1, conf | self.col_conf[x], weight * self.lam)
                choice.pop()

        assemble(0, 0, self.lam**0)
        self._cands[key] = out
        return out

    # -- sampling ------------------------------------------------------------------

    def sample(self, rng) -> set[int]:
        """One exact draw from the hard-core model on H; returns colour ids."""
        return set(_bits(self.sample_mask(rng)))

    def sample_mask(self, rng) -> int:
        """Same draw as sample(), returned as a colour bitmask."""
        return self._sample_rec(self.full_vmask, self.full_cmask, self.k, rng)

    def _vertex_options(self, v: int, cm: int):
        key = self.vert_cols[v] & cm
        got = self._opts.get(key)
        if got is None:
            bits = _bits(key)
            lam = float(self.lam)
            got = (
                [(1.0 + i * lam) / (1.0 + len(bits) * lam) for i in range(1, len(bits))],
                1.0 / (1.0 + len(bits) * lam) if bits else 1.0,
                bits,
            )
            self._opts[key] = got
        return got

    def _branch_cumulative(self, comp: int, cm: int, k: int):
        key = (comp, cm, k)
        got = self._cum.get(key)
        if got is None:
            cands = self._branch_candidates(comp, cm, k)
            total = float(self._z_comp(comp, cm, k))
            acc = 0.0
            cum = []
            for cand in cands:
                acc += float(cand[1])
                cum.append(acc / total)
            got = (cum, cands)
            self._cum[key] = got
        return got

    def _sample_rec(self, vmask: int, cmask: int, k: int, rng) -> int:
        out = 0
        for comp in self._components(vmask):
            cm = self._norm(comp, cmask)
            if self._is_edgeless(comp):
                rest = comp
                while rest:
                    v = (rest & -rest).bit_length() - 1
                    rest &= rest - 1
                    thresholds, p_blank, bits = self._vertex_options(v, cm)
                    if not bits:
                        continue
                    t = rng.random()
                    if t >= p_blank:
                        idx = bisect_right(thresholds, t)
                        out |= 1 << bits[idx]
            else:
                if k <= 3:
                    raise PathFreeViolation(
                        "base graph has an edge but k=3 needs P_2-free"
                    )
                cum, cands = self._branch_cumulative(comp, cm, k)
                idx = bisect_right(cum, rng.random())
                if idx >= len(cands):
                    idx = len(cands) - 1
                choice, _, sub_vmask, sub_cmask = cands[idx]
                for x in choice:
                    out |= 1 << x
                out |= self._sample_rec(sub_vmask, sub_cmask, k - 1, rng)
        return out

    def top_marginals(self):
        """Per component with edges: the exact law of I restricted to L(P).

        Returns a list of (path, [(colour tuple, probability)]); each inner
        probability list sums to 1.
        """
        result = []
        for comp in self._components(self.full_vmask):
            cm = self._norm(comp, self.full_cmask)
            if self._is_edgeless(comp):
                continue
            cands = self._branch_candidates(comp, cm, self.k)
            total = self._z_comp(comp, cm, self.k)
            path = self._longest_path(comp, self.k - 2)
            result.append((path, [(c, w / total) for c, w, _, _ in cands]))
        return result


def _bits(mask: int) -> list[int]:
    out = []
    while mask:
        out.append((mask & -mask).bit_length() - 1)
        mask &= mask - 1
    return out


def partition_function_pkfree(c: Cover, lam: Numeric, k: int) -> Numeric:
    """Exact Z via the longest-path recursion; raises PathFreeViolation
    if the base graph turns out to contain a path on k-1 vertices."""
    return HardCoreSampler(c, lam, k).partition_function()


def sample_hardcore(c: Cover, lam: Numeric, k: int, rng) -> set[int]:
    """One exact hard-core draw on a cover with P_{k-1}-free base graph."""
    return HardCoreSampler(c, lam, k).sample(rng)


# -- local occupancy checking ----------------------------------------------------------


@lru_cache(maxsize=None)
def _subgraph_histogram(y: int, edges: tuple[tuple[int, int], ...]) -> tuple[int, ...]:
    masks = [0] * y
    for i, j in edges:
        masks[i] |= 1 << j
        masks[j] |= 1 << i
    return tuple(_core.size_histogram(masks, y))


def _z_and_mean_terms(hist, lam: float) -> tuple[float, float]:
    z = 0.0
    s1 = 0.0
    power = 1.0
    for s, count in enumerate(hist):
        if s:
            power *= lam
        z += count * power
        s1 += s * count * power
    return z, s1


@lru_cache(maxsize=None)
def _subgraph_lhs(
    y: int, edges: tuple[tuple[int, int], ...], lam: float, beta: float, gamma: float
) -> float:
    """Occupancy inequality LHS for one relabelled subgraph shape; cached so
    exhaustive scans across many graphs share the arithmetic."""
    hist = _subgraph_histogram(y, edges)
    z, s1 = _z_and_mean_terms(hist, lam)
    return beta * (lam / (1.0 + lam)) / z + gamma * s1 / z


def check_strong_local_occupancy(
    g: Graph, cert: OccupancyCertificate, exhaustive_cap: int = 8
) -> tuple[bool, Optional[tuple[int, tuple[int, ...], tuple[tuple[int, int], ...]]]]:
    """Exhaustively test the occupancy inequality on every subgraph of every
    neighbourhood (all vertex subsets, all edge subsets; the empty graph is
    excluded). Returns (ok, witness); the witness names (u, vertices, edges)
    in g's labels for the first violated subgraph.
    """
    lam, beta, gamma = cert.lam, cert.beta, cert.gamma
    for u in range(g.n):
        nb = g.adj[u]
        d = len(nb)
        if d > exhaustive_cap:
            raise CapExceeded(
                f"neighbourhood of {u} has {d} vertices, cap {exhaustive_cap}"
            )
        local_edges = [
            (i, j)
            for i in range(d)
            for j in range(i + 1, d)
            if g.has_edge(nb[i], nb[j])
        ]
        for smask in range(1, 1 << d):
            chosen = [i for i in range(d) if smask >> i & 1]
            rank = {i: r for r, i in enumerate(chosen)}
            y = len(chosen)
            inner = [
                (rank[i], rank[j])
                for i, j in local_edges
                if smask >> i & 1 and smask >> j & 1
            ]
            for emask in range(1 << len(inner)):
                sub_edges = tuple(
                    sorted(inner[t] for t in range(len(inner)) if emask >> t & 1)
                )
                lhs = _subgraph_lhs(y, sub_edges, lam, beta, gamma)
                if lhs < 1.0 - 1e-9:
                    witness_vertices = tuple(nb[i] for i in chosen)
                    witness_edges = tuple(
                        (nb[chosen[i]], nb[chosen[j]]) for i, j in sub_edges
                    )
                    return False, (u, witness_vertices, witness_edges)
    return True, None


# -- sparse lower bounds ------------------------------------------------------------------


@dataclass(frozen=True)
class LogZBounds:
    """Analytic lower bounds vs exact values for a sparse graph."""

    integrated_bound: float  # (y/a)(1-(1+lam)^-a); limit y log(1+lam) at a=0
    expanded_bound: float  # y log(1+lam)(1 - (a/2) log(1+lam))
    actual_log_z: float
    mean_bound: float  # (lam/(1+lam)) y (1+lam)^-a
    actual_mean: float  # lam Z'/Z


def log_z_lower_bounds(f: Graph, lam: float, a: float) -> LogZBounds:
    """Evaluate the sparse hard-core bounds for a graph of average degree <= a."""
    from .graph import average_degree

    avg = average_degree(f)
    if float(avg) > a + 1e-12:
        raise ValueError(f"average degree {float(avg)} exceeds a={a}")
    y = f.n
    hist = independent_set_histogram(f)
    z, s1 = _z_and_mean_terms(hist, lam)
    log1l = math.log1p(lam)
    if a > 0:
        integrated = (y / a) * (1.0 - (1.0 + lam) ** (-a))
    else:
        integrated = y * log1l
    expanded = y * log1l * (1.0 - (a / 2.0) * log1l)
    mean_bound = (lam / (1.0 + lam)) * y * (1.0 + lam) ** (-a)
    return LogZBounds(
        integrated_bound=integrated,
        expanded_bound=expanded,
        actual_log_z=math.log(z),
        mean_bound=mean_bound,
        actual_mean=s1 / z,
    )
