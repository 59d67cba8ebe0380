"""Phase 1: the flaw-driven stochastic local search.

Starting all-blank, repeatedly address the least flaw: B_u (too few surviving
colours at u, or a colour with too many surviving conflicts) is fixed by
blanking u's neighbourhood, removing one edge per long path so the
neighbourhood cover becomes exactly sampleable, drawing a fresh hard-core
set, and uncolouring one endpoint of each monochromatic removed edge; U_u^e
is fixed by resampling u's colour from the residual hard-core marginal.

Flaw bookkeeping is incremental: the backend engine maintains surviving-list
sizes and cross-degrees under every transition, so the per-step flaw scan is
O(n) instead of a full recount.
"""

from __future__ import annotations

import json
import math
import time
from array import array
from dataclasses import dataclass, field
from typing import Optional

from . import _core
from .cover import (
    BLANK,
    COLOURED,
    UNCOLOURED,
    Cover,
    PartialColouring,
)
from .graph import Graph, enumerate_path_copies
from .hardcore import HardCoreSampler, derive_occupancy_certificate


@dataclass
class Params:
    """All derived run constants; see derive_params."""

    delta_max: int
    k: int
    t: float
    epsilon: float
    a: float
    lam: float
    ell: float
    beta: float
    gamma: float
    r: float
    q: float
    psi: float
    psi_b: float
    psi_u: float
    mode: str
    delta: float = 0.25
    hypothesis_flags: dict = field(default_factory=dict)
    hypothesis_values: dict = field(default_factory=dict)

    def t0_bound(self, n: int, m: Optional[int] = None) -> float:
        """Step-count bound: log2 of the state-weight total plus the weight
        corrections, evaluated with the run's psi values."""
        if m is None:
            m = n * self.delta_max / 2
        t0 = n * math.log2(1.0 + 2.0 * self.delta_max * self.lam)
        t0 += n * math.log2(1.0 + self.psi_b)
        t0 += n * max(0.0, math.log2(1.0 / self.psi_b))
        t0 += 2 * m * max(0.0, math.log2(1.0 / self.psi_u))
        return t0

    def step_budget(self, n: int, m: Optional[int] = None) -> int:
        """Default budget: twice the T0 bound, floored at 10^4 for desk scale."""
        return max(int(math.ceil(2.0 * self.t0_bound(n, m))), 10_000)

    @property
    def ell_int(self) -> int:
        return int(math.floor(self.ell))


def derive_params(
    delta_max: int,
    k: int,
    t: float,
    epsilon: float,
    lam: Optional[float] = None,
    ell: Optional[float] = None,
    q: Optional[float] = None,
) -> Params:
    """Compute run constants.

    Theorem mode (lam/ell omitted) applies the asymptotic recipe:
    log(1+lam) = 1/(a log(D/sqrt t)) and ell = (40a/log(D/sqrt t)) *
    (D/sqrt t)^(eps/(1+eps)), with a = k-3+sqrt(2t); it needs t > 0 and
    a > 0. Manual mode takes lam and ell (and optionally q) directly.
    Hypothesis failures at the given scale are reported in the flags,
    never raised.
    """
    if k < 3:
        raise ValueError("k must be at least 3")
    if t < 0:
        raise ValueError("t must be nonnegative")
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if delta_max < 1:
        raise ValueError("delta_max must be at least 1")
    a = k - 3 + math.sqrt(2.0 * t)
    manual = lam is not None or ell is not None
    if manual:
        if lam is None or ell is None:
            raise ValueError("manual mode needs both lam and ell")
        if lam <= 0 or ell <= 0:
            raise ValueError("lam and ell must be positive")
        mode = "manual"
    else:
        if t <= 0 or a <= 0:
            raise ValueError(
                "theorem mode needs t > 0 and k-3+sqrt(2t) > 0; "
                "use manual mode (lam, ell) for these parameters"
            )
        log_ratio = math.log(delta_max / math.sqrt(t))
        if log_ratio <= 0:
            raise ValueError("theorem mode needs delta_max > sqrt(t)")
        lam = math.expm1(1.0 / (a * log_ratio))
        ell = (40.0 * a / log_ratio) * (delta_max / math.sqrt(t)) ** (
            epsilon / (1.0 + epsilon)
        )
        mode = "theorem"

    log_delta = math.log(delta_max) if delta_max > 1 else 0.0
    ratio77 = 7.0 * log_delta / ell
    if ratio77 < 1.0:
        r = (lam / (1.0 + lam)) * ell / (1.0 - math.sqrt(ratio77))
        # the certificate enters the colour bound as r(beta + gamma*D/r), so
        # the optimal choice minimises beta + gamma*d at d = D/r
        cert, _ = derive_occupancy_certificate(a, delta_max / r, lam)
        beta, gamma = cert.beta, cert.gamma
        q_theorem = r * beta + gamma * delta_max
    else:
        r = math.nan
        q_theorem = math.nan
        cert, _ = derive_occupancy_certificate(a, float(delta_max), lam)
        beta, gamma = cert.beta, cert.gamma
    q_run = float(q) if q is not None else q_theorem

    one_plus = 1.0 + ell * lam
    psi = 4.0 * one_plus / (one_plus + 4.0 * t * lam)
    psi_b = psi / (4.0 * delta_max**3)
    psi_u = psi * lam / one_plus

    log1l = math.log1p(lam)
    ineq_denom = log1l * (1.0 - (a / 2.0) * log1l)
    ineq_rhs = (
        math.log(8.0 * delta_max**4) / ineq_denom if ineq_denom > 0 else math.inf
    )
    if t > 0 and delta_max > math.sqrt(t):
        colour_target = (1.0 + epsilon) * delta_max / math.log(delta_max / math.sqrt(t))
    else:
        colour_target = math.nan
    t_range_cap = (
        delta_max ** (2.0 * epsilon / (1.0 + 2.0 * epsilon)) / log_delta**2
        if log_delta > 0
        else math.inf
    )

    flags = {
        "delta_ge_64": delta_max >= 64,
        "ell_gt_7_log_delta": ell > 7.0 * log_delta,
        "t_le_ell_over_40": t <= ell / 40.0,
        "inequality_4_1": ell / 8.0 >= ineq_rhs,
        "t_in_upper_range": t <= t_range_cap,
        "q_le_colour_target": bool(q_run <= colour_target)
        if not math.isnan(colour_target) and not math.isnan(q_run)
        else False,
    }
    values = {
        "7_log_delta": 7.0 * log_delta,
        "inequality_4_1_rhs": ineq_rhs,
        "t_upper_range_cap": t_range_cap,
        "colour_target": colour_target,
        "q_theorem": q_theorem,
    }
    return Params(
        delta_max=delta_max,
        k=k,
        t=t,
        epsilon=epsilon,
        a=a,
        lam=lam,
        ell=ell,
        beta=beta,
        gamma=gamma,
        r=r,
        q=q_run,
        psi=psi,
        psi_b=psi_b,
        psi_u=psi_u,
        mode=mode,
        hypothesis_flags=flags,
        hypothesis_values=values,
    )


# -- Remove --------------------------------------------------------------------


@dataclass(frozen=True)
class RemoveResult:
    removed_edges: tuple[tuple[int, int], ...]
    cover_hat: Cover


def remove_edges(f: Graph, h_prime: Cover, k: int) -> RemoveResult:
    """Deterministic Remove: one edge per path copy, skipping copies already
    hit, lexicographically least edge first. The result is a cover of f
    minus the selected edges (all their cross matchings dropped), whose base
    is P_{k-1}-free."""
    if h_prime.base.n != f.n or h_prime.base.edges != f.edges:
        raise ValueError("h_prime must be a cover of f")
    removed: set[tuple[int, int]] = set()
    for copy in enumerate_path_copies(f, k):
        edges = sorted(copy.edge_set)
        if not any(e in removed for e in edges):
            removed.add(edges[0])
    if not removed:
        return RemoveResult((), h_prime)
    kept_base = Graph(f.n, [e for e in f.edges if e not in removed])
    owner = h_prime.owner
    kept_pairs = [
        (x, y)
        for x, y in h_prime.cross_pairs()
        if (min(owner[x], owner[y]), max(owner[x], owner[y])) not in removed
    ]
    lists = [h_prime.naturals_of(u) for u in range(f.n)]
    return RemoveResult(tuple(sorted(removed)), Cover(kept_base, lists, kept_pairs))


# -- run state -------------------------------------------------------------------


class BudgetExceeded(Exception):
    """Raised when a run hits its step budget; carries the state and report."""

    def __init__(self, message, sigma=None, report=None):
        super().__init__(message)
        self.sigma = sigma
        self.report = report


@dataclass
class RunReport:
    """Per-run telemetry; serialised as the run-report JSON."""

    seed: Optional[int] = None
    steps: int = 0
    b_flaws_addressed: int = 0
    u_flaws_addressed: int = 0
    uncolourings: int = 0
    removed_edge_totals: int = 0
    outcome: str = "pending"
    hypothesis_flags: dict = field(default_factory=dict)
    wall_ms: float = 0.0
    resamplings: Optional[int] = None
    phase2_outcome: Optional[str] = None
    verified: Optional[bool] = None

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "steps": self.steps,
            "b_flaws_addressed": self.b_flaws_addressed,
            "u_flaws_addressed": self.u_flaws_addressed,
            "uncolourings": self.uncolourings,
            "removed_edge_totals": self.removed_edge_totals,
            "outcome": self.outcome,
            "hypothesis_flags": self.hypothesis_flags,
            "wall_ms": self.wall_ms,
            "resamplings": self.resamplings,
            "phase2_outcome": self.phase2_outcome,
            "verified": self.verified,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


class _Run:
    """One phase-1 run: the backend engine plus the action implementations."""

    def __init__(self, cover: Cover, params: Params, rng, sigma=None, debug=False):
        self.cover = cover
        self.p = params
        self.rng = rng
        self.debug = debug
        n = cover.base.n
        ncols = cover.num_colours
        list_start, owner, conf_start, conf_flat = cover.engine_tables()
        heavy_min = int(math.floor(params.ell / 8.0)) + 1
        self.state = array("i", [BLANK] * n)
        self.value = array("i", [-1] * n)
        self.elim = array("i", [0] * ncols)
        degstar = array(
            "i", [len(cover.conflicts[x]) for x in range(ncols)]
        )
        n_alive = array("i", [cover.list_size(u) for u in range(n)])
        n_heavy = array(
            "i",
            [
                sum(1 for x in cover.colours_of(u) if degstar[x] >= heavy_min)
                for u in range(n)
            ],
        )
        self.eng = _core.Engine(
            n,
            ncols,
            float(params.ell),
            heavy_min,
            list_start,
            owner,
            conf_start,
            conf_flat,
            self.state,
            self.value,
            self.elim,
            degstar,
            n_alive,
            n_heavy,
        )
        self.steps = 0
        self.b_count = 0
        self.u_count = 0
        self.uncolourings = 0
        self.removed_total = 0
        self.remove_over_budget = 0  # calls where |R| exceeded Params.t
        if sigma is not None:
            for u in range(n):
                if sigma.state[u] != BLANK:
                    self.eng.apply(u, sigma.state[u], sigma.value[u])

    def export_sigma(self) -> PartialColouring:
        pc = PartialColouring(self.cover)
        pc.state = list(self.state)
        pc.value = list(self.value)
        return pc

    # -- actions ------------------------------------------------------------

    def address_b(self, u: int) -> None:
        cover = self.cover
        eng = self.eng
        state = self.state
        fverts = [v for v in cover.base.adj[u] if state[v] != UNCOLOURED]
        for v in fverts:
            if state[v] == COLOURED:
                eng.apply(v, BLANK, -1)
        elim = self.elim
        local, vmap, colmap = cover.restrict(fverts, lambda x: elim[x] == 0)
        rres = remove_edges(local.base, local, self.p.k)
        self.removed_total += len(rres.removed_edges)
        if len(rres.removed_edges) > self.p.t:
            self.remove_over_budget += 1
        j_local = sample_from_cover(rres.cover_hat, self.p.lam, self.p.k, self.rng)
        chosen: dict[int, int] = {}
        for xl in sorted(j_local):
            xg = colmap[xl]
            chosen[cover.owner[xg]] = xg
        for v in fverts:
            xg = chosen.get(v)
            if xg is not None:
                eng.apply(v, COLOURED, xg)
        local_edges = sorted(
            (vmap[a], vmap[b]) for a, b in local.base.edges
        )
        conflicts = cover.conflicts
        while True:
            mono = None
            for v, w in local_edges:
                x = chosen.get(v)
                if x is None:
                    continue
                y = chosen.get(w)
                if y is not None and y in conflicts[x]:
                    mono = (v, w)
                    break
            if mono is None:
                break
            v, w = mono
            eng.apply(v, UNCOLOURED, w)
            del chosen[v]
            self.uncolourings += 1

    def address_u(self, u: int) -> None:
        cover = self.cover
        elim = self.elim
        alive = [x for x in cover.colours_of(u) if elim[x] == 0]
        lam = self.p.lam
        t = self.rng.random() * (1.0 + len(alive) * lam)
        if t < 1.0:
            self.eng.apply(u, BLANK, -1)
        else:
            idx = min(int((t - 1.0) / lam), len(alive) - 1)
            self.eng.apply(u, COLOURED, alive[idx])


def sample_from_cover(hat: Cover, lam, k: int, rng) -> set[int]:
    """Sampler entry used by the actions; one draw per call."""
    return HardCoreSampler(hat, lam, k).sample(rng)


# -- public operations ----------------------------------------------------------------


def address_B(
    u: int, sigma: PartialColouring, c: Cover, p: Params, rng, debug: bool = False
) -> PartialColouring:
    """One execution of the B_u action from state sigma; returns the new state."""
    if debug:
        from .cover import is_B_flawed

        assert sigma.state[u] != COLOURED, "address_B needs u not coloured"
        assert is_B_flawed(c, sigma, u, p), "address_B called without B_u present"
    run = _Run(c, p, rng, sigma=sigma, debug=debug)
    run.address_b(u)
    tau = run.export_sigma()
    if debug:
        tau.validate()
        assert tau.state[u] == sigma.state[u] and tau.value[u] == sigma.value[u]
    return tau


def address_U(
    u: int, e: tuple[int, int], sigma: PartialColouring, p: Params, rng
) -> PartialColouring:
    """The two-outcome resampling for U_u^e: blank with probability
    1/(1+|L_sigma(u)| lam), else a uniform surviving colour."""
    if sigma.unc_edge(u) != (min(e), max(e)):
        raise ValueError(f"sigma({u}) is not the edge {e}")
    run = _Run(sigma.cover, p, rng, sigma=sigma)
    run.address_u(u)
    return run.export_sigma()


def run_phase1(
    c: Cover,
    p: Params,
    rng,
    budget: Optional[int] = None,
    debug: bool = False,
    seed: Optional[int] = None,
) -> tuple[PartialColouring, RunReport]:
    """Iterate least-flaw / address from all-blank until flawless.

    Raises BudgetExceeded (carrying the state and report) when the step
    budget runs out first.
    """
    n = c.base.n
    m = len(c.base.edges)
    if budget is None:
        budget = p.step_budget(n, m)
    run = _Run(c, p, rng, debug=debug)
    start = time.perf_counter()
    report = RunReport(seed=seed, hypothesis_flags=dict(p.hypothesis_flags))

    def fill(outcome: str) -> RunReport:
        report.steps = run.steps
        report.b_flaws_addressed = run.b_count
        report.u_flaws_addressed = run.u_count
        report.uncolourings = run.uncolourings
        report.removed_edge_totals = run.removed_total
        report.outcome = outcome
        report.hypothesis_flags["remove_sets_within_t"] = (
            run.remove_over_budget == 0
        )
        report.wall_ms = (time.perf_counter() - start) * 1000.0
        return report

    while True:
        u = run.eng.least_b_flaw()
        if u < 0:
            w = run.eng.first_uncoloured()
            if w < 0:
                return run.export_sigma(), fill("flawless")
            if run.steps >= budget:
                raise BudgetExceeded(
                    f"no flawless state within {budget} steps",
                    sigma=run.export_sigma(),
                    report=fill("budget_exceeded"),
                )
            run.address_u(w)
            run.u_count += 1
        else:
            if run.steps >= budget:
                raise BudgetExceeded(
                    f"no flawless state within {budget} steps",
                    sigma=run.export_sigma(),
                    report=fill("budget_exceeded"),
                )
            run.address_b(u)
            run.b_count += 1
        run.steps += 1
        if debug:
            run.export_sigma().validate()
