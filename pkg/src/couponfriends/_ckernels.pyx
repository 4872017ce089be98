# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels. Mirrors ``_pykernels`` draw-for-draw."""
from libc.stdint cimport uint64_t, int64_t, uint8_t
from libc.stdlib cimport malloc, calloc, free

import numpy as np

cdef extern from *:
    ctypedef unsigned long long u128 "unsigned __int128"

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL

cdef enum:
    NULL_S = 0
    SURPLUS = 1
    BARTER = 2


ctypedef struct gen_t:
    uint64_t s0, s1, s2, s3


cdef inline uint64_t _mix64(uint64_t x) nogil:
    cdef uint64_t z = x + GOLDEN
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline void _seed(gen_t* g, uint64_t key) nogil:
    g.s0 = _mix64(key)
    g.s1 = _mix64(key + GOLDEN)
    g.s2 = _mix64(key + 2 * GOLDEN)
    g.s3 = _mix64(key + 3 * GOLDEN)
    if g.s0 == 0 and g.s1 == 0 and g.s2 == 0 and g.s3 == 0:
        g.s0 = GOLDEN


cdef inline uint64_t _trial_key(uint64_t seed, uint64_t index) nogil:
    return _mix64(_mix64(seed) ^ index)


cdef inline uint64_t _rotl(uint64_t x, int k) nogil:
    return (x << k) | (x >> (64 - k))


cdef inline uint64_t _next(gen_t* g) nogil:
    cdef uint64_t result = _rotl(g.s1 * 5, 7) * 9
    cdef uint64_t t = g.s1 << 17
    g.s2 ^= g.s0
    g.s3 ^= g.s1
    g.s1 ^= g.s2
    g.s0 ^= g.s3
    g.s2 ^= t
    g.s3 = _rotl(g.s3, 45)
    return result


cdef inline uint64_t _bounded(gen_t* g, uint64_t k) nogil:
    cdef u128 prod = <u128>_next(g) * k
    cdef uint64_t low = <uint64_t>prod
    cdef uint64_t threshold
    if low < k:
        threshold = (0 - k) % k
        while low < threshold:
            prod = <u128>_next(g) * k
            low = <uint64_t>prod
    return <uint64_t>(prod >> 64)


cdef inline void _pair(gen_t* g, int64_t m, int64_t* i, int64_t* j) nogil:
    cdef int64_t a = <int64_t>_bounded(g, m)
    cdef int64_t b = <int64_t>_bounded(g, m - 1)
    if b >= a:
        b += 1
    if a < b:
        i[0] = a
        j[0] = b
    else:
        i[0] = b
        j[0] = a


cdef inline void _load(gen_t* g, uint64_t[::1] state):
    g.s0 = state[0]
    g.s1 = state[1]
    g.s2 = state[2]
    g.s3 = state[3]


cdef inline void _store(gen_t* g, uint64_t[::1] state):
    state[0] = g.s0
    state[1] = g.s1
    state[2] = g.s2
    state[3] = g.s3


cdef inline int64_t _interact(int64_t* a, int64_t* b, int64_t n, int strategy,
                              int64_t* log) nogil:
    """Returns the transfer count. If ``log`` is non-NULL, writes triples
    (coupon, giver side, receiver side) to it; it needs room for 3n entries."""
    cdef int64_t c, i, j, x, y, moves = 0
    if strategy == SURPLUS:
        for c in range(n):
            x = a[c]
            y = b[c]
            if x >= 2 and y == 0:
                a[c] = x - 1
                b[c] = 1
                if log != NULL:
                    log[3 * moves] = c
                    log[3 * moves + 1] = 0
                    log[3 * moves + 2] = 1
                moves += 1
            elif y >= 2 and x == 0:
                b[c] = y - 1
                a[c] = 1
                if log != NULL:
                    log[3 * moves] = c
                    log[3 * moves + 1] = 1
                    log[3 * moves + 2] = 0
                moves += 1
    elif strategy == BARTER:
        for i in range(n):
            if a[i] < 2 or b[i] != 0:
                continue
            for j in range(n):
                if b[j] >= 2 and a[j] == 0:
                    a[i] -= 1
                    b[i] += 1
                    b[j] -= 1
                    a[j] += 1
                    if log != NULL:
                        log[3 * moves] = i
                        log[3 * moves + 1] = 0
                        log[3 * moves + 2] = 1
                        log[3 * moves + 3] = j
                        log[3 * moves + 4] = 1
                        log[3 * moves + 5] = 0
                    moves += 2
                    break
    return moves


cdef inline int64_t _missing(int64_t* counts, int64_t total) nogil:
    cdef int64_t k, miss = 0
    for k in range(total):
        if counts[k] == 0:
            miss += 1
    return miss


def next_u64(uint64_t[::1] state):
    cdef gen_t g
    _load(&g, state)
    cdef uint64_t x = _next(&g)
    _store(&g, state)
    return x


def bounded(uint64_t[::1] state, uint64_t k):
    cdef gen_t g
    _load(&g, state)
    cdef uint64_t x = _bounded(&g, k)
    _store(&g, state)
    return x


def sample_pairs(uint64_t[::1] state, int64_t m, int64_t count):
    cdef gen_t g
    out = np.empty((count, 2), dtype=np.int64)
    cdef int64_t[:, ::1] o = out
    cdef int64_t r
    _load(&g, state)
    with nogil:
        for r in range(count):
            _pair(&g, m, &o[r, 0], &o[r, 1])
    _store(&g, state)
    return out


def collect(uint64_t[::1] state, int64_t[:, ::1] counts, int64_t r_c):
    cdef gen_t g
    cdef int64_t v, k
    cdef int64_t m = counts.shape[0], n = counts.shape[1]
    _load(&g, state)
    with nogil:
        for v in range(m):
            for k in range(r_c):
                counts[v, _bounded(&g, n)] += 1
    _store(&g, state)


def exchange(uint64_t[::1] state, int64_t[:, ::1] counts, int64_t r_e,
             int strategy, trace=None):
    cdef gen_t g
    cdef int64_t m = counts.shape[0], n = counts.shape[1]
    cdef int64_t r, i = 0, j = 0, moves, t, total = 0
    cdef int64_t* log = NULL
    if trace is not None:
        log = <int64_t*>malloc(3 * (n + 1) * sizeof(int64_t))
        if log == NULL:
            raise MemoryError()
    _load(&g, state)
    try:
        if log == NULL:
            with nogil:
                for r in range(r_e):
                    _pair(&g, m, &i, &j)
                    total += _interact(&counts[i, 0], &counts[j, 0], n, strategy, NULL)
        else:
            for r in range(r_e):
                _pair(&g, m, &i, &j)
                moves = _interact(&counts[i, 0], &counts[j, 0], n, strategy, log)
                total += moves
                ends = (i, j)
                trace.append((r, i, j, tuple(
                    (log[3 * t], ends[log[3 * t + 1]], ends[log[3 * t + 2]])
                    for t in range(moves))))
    finally:
        free(log)
    _store(&g, state)
    return total


def until_m_sets(uint64_t[::1] state, int64_t n, int64_t m):
    cdef gen_t g
    _load(&g, state)
    cdef int64_t draws = _until(&g, n, m)
    _store(&g, state)
    if draws < 0:
        raise MemoryError()
    return draws


cdef int64_t _until(gen_t* g, int64_t n, int64_t m) nogil:
    cdef int64_t* seen = <int64_t*>calloc(n, sizeof(int64_t))
    cdef int64_t deficit = n, draws = 0, c
    if seen == NULL:
        return -1
    while deficit:
        c = <int64_t>_bounded(g, n)
        draws += 1
        seen[c] += 1
        if seen[c] == m:
            deficit -= 1
    free(seen)
    return draws


def run_trials(uint64_t seed, int64_t start, int64_t stop, int64_t n, int64_t m,
               int64_t r_c, int64_t r_e, int strategy):
    cdef int64_t size = stop - start
    completed = np.zeros(size, dtype=np.uint8)
    miss_c = np.zeros(size, dtype=np.int64)
    miss_f = np.zeros(size, dtype=np.int64)
    ncomp = np.zeros(size, dtype=np.int64)
    cdef uint8_t[::1] comp_v = completed
    cdef int64_t[::1] mc_v = miss_c, mf_v = miss_f, nc_v = ncomp
    cdef int64_t* counts = <int64_t*>malloc(m * n * sizeof(int64_t))
    cdef gen_t g
    cdef int64_t k, v, c, s, i = 0, j = 0, done
    if counts == NULL:
        raise MemoryError()
    with nogil:
        for k in range(size):
            _seed(&g, _trial_key(seed, <uint64_t>(start + k)))
            for c in range(m * n):
                counts[c] = 0
            for v in range(m):
                for s in range(r_c):
                    counts[v * n + <int64_t>_bounded(&g, n)] += 1
            mc_v[k] = _missing(counts, m * n)
            for s in range(r_e):
                _pair(&g, m, &i, &j)
                _interact(&counts[i * n], &counts[j * n], n, strategy, NULL)
            mf_v[k] = _missing(counts, m * n)
            done = 0
            for v in range(m):
                if _missing(&counts[v * n], n) == 0:
                    done += 1
            nc_v[k] = done
            comp_v[k] = done == m
    free(counts)
    return completed, miss_c, miss_f, ncomp


def until_m_sets_batch(uint64_t seed, int64_t start, int64_t stop, int64_t n, int64_t m):
    out = np.empty(stop - start, dtype=np.int64)
    cdef int64_t[::1] o = out
    cdef gen_t g
    cdef int64_t k, draws
    for k in range(stop - start):
        _seed(&g, _trial_key(seed, <uint64_t>(start + k)))
        with nogil:
            draws = _until(&g, n, m)
        if draws < 0:
            raise MemoryError()
        o[k] = draws
    return out
