"""Pure-Python backend for the hot kernels.

Mirrors `_fastcore` (the Cython extension) exactly: same classes, same
signatures, same integer semantics, and no RNG use, so runs are bit-identical
whichever backend is selected.
"""

from __future__ import annotations

BLANK = 0
COLOURED = 1
UNCOLOURED = 2


def size_histogram(masks, nitems):
    """hist[s] = number of independent item subsets of size s.

    `masks[i]` is the conflict bitmask of item i. Enumeration is a standard
    include/exclude recursion over ascending item ids; exponential by design.
    """
    hist = [0] * (nitems + 1)

    def rec(cand, size):
        hist[size] += 1
        while cand:
            low = cand & (-cand)
            i = low.bit_length() - 1
            cand &= cand - 1
            rec(cand & ~masks[i], size + 1)

    rec((1 << nitems) - 1, 0)
    return hist


class Engine:
    """Incremental flaw-state counters over a fixed cover.

    The caller allocates and initialises every array (all-blank start state);
    the engine only performs the per-transition propagation:

      elim[x]    assigned colours conflicting with x; x survives iff 0
      degstar[x] surviving conflicts of x sitting on blank vertices
      n_alive[u] surviving colours on u's list
      n_heavy[u] surviving colours on u's list with degstar >= heavy_min

    B_u is present iff u is not coloured and (n_alive[u] < ell or
    n_heavy[u] > 0).
    """

    def __init__(self, n, ncols, ell, heavy_min, list_start, owner,
                 conf_start, conf_flat, state, value, elim, degstar,
                 n_alive, n_heavy):
        self.n = n
        self.ncols = ncols
        self.ell = ell
        self.heavy_min = heavy_min
        self.list_start = list_start
        self.owner = owner
        self.conf_start = conf_start
        self.conf_flat = conf_flat
        self.state = state
        self.value = value
        self.elim = elim
        self.degstar = degstar
        self.n_alive = n_alive
        self.n_heavy = n_heavy

    # -- degstar transitions ------------------------------------------------

    def _degstar_inc(self, w):
        old = self.degstar[w]
        self.degstar[w] = old + 1
        if old + 1 == self.heavy_min and self.elim[w] == 0:
            self.n_heavy[self.owner[w]] += 1

    def _degstar_dec(self, w):
        old = self.degstar[w]
        self.degstar[w] = old - 1
        if old == self.heavy_min and self.elim[w] == 0:
            self.n_heavy[self.owner[w]] -= 1

    def _colour_died(self, z):
        self.n_alive[self.owner[z]] -= 1
        if self.degstar[z] >= self.heavy_min:
            self.n_heavy[self.owner[z]] -= 1
        if self.state[self.owner[z]] == BLANK:
            for idx in range(self.conf_start[z], self.conf_start[z + 1]):
                self._degstar_dec(self.conf_flat[idx])

    def _colour_revived(self, z):
        self.n_alive[self.owner[z]] += 1
        if self.degstar[z] >= self.heavy_min:
            self.n_heavy[self.owner[z]] += 1
        if self.state[self.owner[z]] == BLANK:
            for idx in range(self.conf_start[z], self.conf_start[z + 1]):
                self._degstar_inc(self.conf_flat[idx])

    def apply(self, v, new_state, new_value):
        """Transition vertex v; propagates every counter consequence."""
        old_state = self.state[v]
        old_value = self.value[v]
        if old_state == COLOURED:
            y0 = old_value
            for idx in range(self.conf_start[y0], self.conf_start[y0 + 1]):
                z = self.conf_flat[idx]
                self.elim[z] -= 1
                if self.elim[z] == 0:
                    self._colour_revived(z)
        if old_state == BLANK and new_state != BLANK:
            for x in range(self.list_start[v], self.list_start[v + 1]):
                if self.elim[x] == 0:
                    for idx in range(self.conf_start[x], self.conf_start[x + 1]):
                        self._degstar_dec(self.conf_flat[idx])
        elif old_state != BLANK and new_state == BLANK:
            for x in range(self.list_start[v], self.list_start[v + 1]):
                if self.elim[x] == 0:
                    for idx in range(self.conf_start[x], self.conf_start[x + 1]):
                        self._degstar_inc(self.conf_flat[idx])
        self.state[v] = new_state
        self.value[v] = new_value
        if new_state == COLOURED:
            y0 = new_value
            for idx in range(self.conf_start[y0], self.conf_start[y0 + 1]):
                z = self.conf_flat[idx]
                self.elim[z] += 1
                if self.elim[z] == 1:
                    self._colour_died(z)

    # -- flaw queries ---------------------------------------------------------

    def b_flawed(self, u):
        return self.state[u] != COLOURED and (
            self.n_alive[u] < self.ell or self.n_heavy[u] > 0
        )

    def least_b_flaw(self):
        ell = self.ell
        state = self.state
        n_alive = self.n_alive
        n_heavy = self.n_heavy
        for u in range(self.n):
            if state[u] != COLOURED and (n_alive[u] < ell or n_heavy[u] > 0):
                return u
        return -1

    def first_uncoloured(self):
        state = self.state
        for u in range(self.n):
            if state[u] == UNCOLOURED:
                return u
        return -1
