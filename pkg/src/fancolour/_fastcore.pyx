# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled backend for the hot kernels; see _purecore for the reference.

Both backends must stay behaviourally identical: integer counters only, no
RNG, same public signatures. The histogram kernel takes the compiled path
only up to 63 items and defers to the arbitrary-width Python ints otherwise.
"""

from cpython cimport array

cdef int BLANK = 0
cdef int COLOURED = 1
cdef int UNCOLOURED = 2


def size_histogram(masks, nitems):
    """hist[s] = number of independent item subsets of size s."""
    if nitems > 63:
        return _size_histogram_wide(masks, nitems)
    cdef unsigned long long cmasks[64]
    cdef long long hist[65]
    cdef int i
    for i in range(nitems):
        cmasks[i] = masks[i]
    for i in range(nitems + 1):
        hist[i] = 0
    _hist_rec(cmasks, hist, ((<unsigned long long>1) << nitems) - 1, 0)
    return [hist[i] for i in range(nitems + 1)]


cdef void _hist_rec(unsigned long long* masks, long long* hist,
                    unsigned long long cand, int size) noexcept:
    hist[size] += 1
    cdef unsigned long long low
    cdef int i
    while cand:
        low = cand & (~cand + 1)
        i = _bit_index(low)
        cand &= cand - 1
        _hist_rec(masks, hist, cand & ~masks[i], size + 1)


cdef inline int _bit_index(unsigned long long low) noexcept:
    cdef int i = 0
    while low > 1:
        low >>= 1
        i += 1
    return i


def _size_histogram_wide(masks, nitems):
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


cdef class Engine:
    """Incremental flaw-state counters; mirror of _purecore.Engine."""

    cdef int n, ncols, heavy_min
    cdef double ell
    cdef int[::1] list_start, owner, conf_start, conf_flat
    cdef int[::1] state, value, elim, degstar, n_alive, n_heavy

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

    cdef inline void _degstar_inc(self, int w) noexcept:
        cdef int old = self.degstar[w]
        self.degstar[w] = old + 1
        if old + 1 == self.heavy_min and self.elim[w] == 0:
            self.n_heavy[self.owner[w]] += 1

    cdef inline void _degstar_dec(self, int w) noexcept:
        cdef int old = self.degstar[w]
        self.degstar[w] = old - 1
        if old == self.heavy_min and self.elim[w] == 0:
            self.n_heavy[self.owner[w]] -= 1

    cdef void _colour_died(self, int z) noexcept:
        cdef int idx
        self.n_alive[self.owner[z]] -= 1
        if self.degstar[z] >= self.heavy_min:
            self.n_heavy[self.owner[z]] -= 1
        if self.state[self.owner[z]] == BLANK:
            for idx in range(self.conf_start[z], self.conf_start[z + 1]):
                self._degstar_dec(self.conf_flat[idx])

    cdef void _colour_revived(self, int z) noexcept:
        cdef int idx
        self.n_alive[self.owner[z]] += 1
        if self.degstar[z] >= self.heavy_min:
            self.n_heavy[self.owner[z]] += 1
        if self.state[self.owner[z]] == BLANK:
            for idx in range(self.conf_start[z], self.conf_start[z + 1]):
                self._degstar_inc(self.conf_flat[idx])

    def apply(self, int v, int new_state, int new_value):
        cdef int old_state = self.state[v]
        cdef int old_value = self.value[v]
        cdef int idx, x, y0, z
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

    def b_flawed(self, int u):
        return self.state[u] != COLOURED and (
            self.n_alive[u] < self.ell or self.n_heavy[u] > 0
        )

    def least_b_flaw(self):
        cdef int u
        for u in range(self.n):
            if self.state[u] != COLOURED and (
                self.n_alive[u] < self.ell or self.n_heavy[u] > 0
            ):
                return u
        return -1

    def first_uncoloured(self):
        cdef int u
        for u in range(self.n):
            if self.state[u] == UNCOLOURED:
                return u
        return -1
