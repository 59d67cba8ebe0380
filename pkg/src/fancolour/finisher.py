"""Phase 2: complete a flawless partial colouring by uniform resampling.

Residual lists are truncated to exactly ell colours (the ell smallest ids,
for reproducibility), every blank vertex draws uniformly, and while any cross
edge is monochromatic the lowest-indexed violated edge has both endpoints
redrawn. Flawlessness makes this a textbook Moser-Tardos instance: violation
probability 1/ell^2 per edge against dependency degree at most ell^2/4, both
of which are re-verified on the actual truncated cover before the loop runs.
"""

from __future__ import annotations

import math
from typing import Optional

from .cover import Cover, PartialColouring, least_flaw, residual_cover
from .resampler import BudgetExceeded, Params


def run_phase2(
    c: Cover,
    sigma: PartialColouring,
    p: Params,
    rng,
    budget: Optional[int] = None,
) -> tuple[list[int], int]:
    """Extend flawless sigma to a full colouring.

    Returns (colour id per vertex, resampling count). Raises ValueError if
    sigma is not flawless and BudgetExceeded if the resampling budget (default
    n^1.5) runs out.
    """
    n = c.base.n
    flaw = least_flaw(c, sigma, p)
    if flaw is not None:
        raise ValueError(f"sigma is not flawless: {flaw} present")
    ell = p.ell_int
    if ell < 1:
        raise ValueError("phase 2 needs ell >= 1")
    if budget is None:
        budget = int(math.ceil(n**1.5))

    res = residual_cover(c, sigma)
    blanks = sigma.blank_vertices()
    trunc: dict[int, list[int]] = {}
    for u in blanks:
        lst = res.list_of(u)
        if len(lst) < ell:
            raise ValueError(f"vertex {u} has {len(lst)} < ell surviving colours")
        trunc[u] = lst[:ell]

    _assert_moser_tardos_condition(c, trunc, ell)

    pick: dict[int, int] = {}
    for u in blanks:
        pick[u] = trunc[u][_uniform_index(rng, ell)]

    blank_set = set(blanks)
    blank_edges = sorted(
        (u, v) for u, v in c.base.edges if u in blank_set and v in blank_set
    )
    conflicts = c.conflicts
    resamplings = 0
    while True:
        violated = None
        for u, v in blank_edges:
            if pick[v] in conflicts[pick[u]]:
                violated = (u, v)
                break
        if violated is None:
            break
        if resamplings >= budget:
            raise BudgetExceeded(
                f"phase 2 exceeded {budget} resamplings", sigma=sigma
            )
        resamplings += 1
        u, v = violated
        pick[u] = trunc[u][_uniform_index(rng, ell)]
        pick[v] = trunc[v][_uniform_index(rng, ell)]

    colouring = [-1] * n
    for u in range(n):
        if sigma.is_coloured(u):
            colouring[u] = sigma.value[u]
        else:
            colouring[u] = pick[u]
    _assert_proper(c, colouring)
    return colouring, resamplings


def _uniform_index(rng, size: int) -> int:
    return min(int(rng.random() * size), size - 1)


def _assert_moser_tardos_condition(c: Cover, trunc: dict[int, list[int]], ell: int):
    """Recompute the per-edge violation probability and dependency degree on
    the truncated cover; flawlessness guarantees both bounds hold."""
    surviving = {x for lst in trunc.values() for x in lst}
    incident: dict[int, int] = {}
    for u, lst in trunc.items():
        assert len(lst) == ell, "truncation must leave exactly ell colours"
        incident[u] = sum(
            1
            for x in lst
            for y in c.conflicts[x]
            if y in surviving and c.owner[y] in trunc
        )
    for u, lst in trunc.items():
        for x in lst:
            for y in c.conflicts[x]:
                if y in surviving and c.owner[y] in trunc:
                    gamma_bound = incident[u] + incident[c.owner[y]]
                    assert gamma_bound <= ell * ell / 4.0, (
                        f"dependency degree {gamma_bound} exceeds ell^2/4"
                    )


def _assert_proper(c: Cover, colouring: list[int]) -> None:
    for u, x in enumerate(colouring):
        assert c.owner[x] == u, f"colour {x} off-list at vertex {u}"
    for u, v in c.base.edges:
        assert colouring[v] not in c.conflicts[colouring[u]], (
            f"monochromatic edge {u},{v}"
        )
