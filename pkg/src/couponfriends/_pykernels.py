"""Pure-Python kernels.

Reference implementation of the hot loops; ``_ckernels.pyx`` mirrors every
function here and must consume the generator identically. State vectors are
``numpy.uint64`` arrays of length 4 (xoshiro256**), updated in place.
"""
import numpy as np

MASK = 0xFFFFFFFFFFFFFFFF
GOLDEN = 0x9E3779B97F4A7C15

NULL = 0
SURPLUS_TO_NEEDY = 1
MUTUAL_BARTER = 2


def mix64(x):
    """One splitmix64 step taken from state ``x``; returns the output word."""
    z = (x + GOLDEN) & MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
    return z ^ (z >> 31)


def derive_key(seed, *coords):
    h = mix64(seed & MASK)
    for c in coords:
        h = mix64(h ^ (c & MASK))
    return h


def seed_state(key):
    """Expand a 64-bit key into a xoshiro256** state with splitmix64."""
    out = []
    x = key & MASK
    for _ in range(4):
        out.append(mix64(x))
        x = (x + GOLDEN) & MASK
    if not any(out):
        out[0] = GOLDEN
    return out


def _rotl(x, k):
    return ((x << k) | (x >> (64 - k))) & MASK


class _Gen:
    """Local xoshiro256** over Python ints; loaded from and stored to arrays."""

    __slots__ = ("s0", "s1", "s2", "s3")

    def __init__(self, words):
        self.s0, self.s1, self.s2, self.s3 = (int(w) for w in words)

    def store(self, state):
        state[0] = self.s0
        state[1] = self.s1
        state[2] = self.s2
        state[3] = self.s3

    def next(self):
        s0, s1, s2, s3 = self.s0, self.s1, self.s2, self.s3
        result = (_rotl((s1 * 5) & MASK, 7) * 9) & MASK
        t = (s1 << 17) & MASK
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl(s3, 45)
        self.s0, self.s1, self.s2, self.s3 = s0, s1, s2, s3
        return result

    def bounded(self, k):
        # Lemire's multiply-shift with rejection; exact uniform on [0, k)
        prod = self.next() * k
        low = prod & MASK
        if low < k:
            threshold = ((1 << 64) - k) % k
            while low < threshold:
                prod = self.next() * k
                low = prod & MASK
        return prod >> 64

    def pair(self, m):
        i = self.bounded(m)
        j = self.bounded(m - 1)
        if j >= i:
            j += 1
        return (i, j) if i < j else (j, i)


def next_u64(state):
    g = _Gen(state)
    x = g.next()
    g.store(state)
    return x


def bounded(state, k):
    g = _Gen(state)
    x = g.bounded(k)
    g.store(state)
    return x


def sample_pairs(state, m, count):
    g = _Gen(state)
    out = np.empty((count, 2), dtype=np.int64)
    for r in range(count):
        out[r] = g.pair(m)
    g.store(state)
    return out


def interact(a, b, strategy):
    """Apply one interaction's rule to lists ``a`` and ``b`` in place.

    Returns ``(coupon, giver, receiver)`` triples with sides encoded 0 for
    ``a`` and 1 for ``b``, in commit order.
    """
    moves = []
    n = len(a)
    if strategy == SURPLUS_TO_NEEDY:
        for c in range(n):
            x, y = a[c], b[c]
            if x >= 2 and y == 0:
                a[c] = x - 1
                b[c] = 1
                moves.append((c, 0, 1))
            elif y >= 2 and x == 0:
                b[c] = y - 1
                a[c] = 1
                moves.append((c, 1, 0))
    elif strategy == MUTUAL_BARTER:
        for i in range(n):
            if a[i] < 2 or b[i] != 0:
                continue
            for j in range(n):
                if b[j] >= 2 and a[j] == 0:
                    a[i] -= 1
                    b[i] += 1
                    b[j] -= 1
                    a[j] += 1
                    moves.append((i, 0, 1))
                    moves.append((j, 1, 0))
                    break
    return moves


def collect(state, counts, r_c):
    g = _Gen(state)
    m, n = counts.shape
    for v in range(m):
        row = [0] * n
        for _ in range(r_c):
            row[g.bounded(n)] += 1
        counts[v] += row
    g.store(state)


def exchange(state, counts, r_e, strategy, trace=None):
    """Run ``r_e`` interactions in place; returns the number of transfers.

    When ``trace`` is a list, one ``(round, i, j, transfers)`` tuple is
    appended per interaction, transfers being ``(coupon, from, to)``.
    """
    g = _Gen(state)
    m, n = counts.shape
    rows = [list(map(int, r)) for r in counts]
    total = 0
    for r in range(r_e):
        i, j = g.pair(m)
        moves = interact(rows[i], rows[j], strategy)
        total += len(moves)
        if trace is not None:
            ends = (i, j)
            trace.append((r, i, j, tuple((c, ends[s], ends[d]) for c, s, d in moves)))
    counts[:] = rows
    g.store(state)
    return total


def until_m_sets(state, n, m):
    g = _Gen(state)
    seen = [0] * n
    deficit = n
    draws = 0
    while deficit:
        c = g.bounded(n)
        draws += 1
        seen[c] += 1
        if seen[c] == m:
            deficit -= 1
    g.store(state)
    return draws


def _missing(rows):
    return sum(r.count(0) for r in rows)


def run_trials(seed, start, stop, n, m, r_c, r_e, strategy):
    """Batch of independent trials keyed ``(seed, index)`` for index in [start, stop).

    Returns arrays ``completed``, ``missing_after_collection``,
    ``missing_final``, ``collectors_complete``.
    """
    size = stop - start
    completed = np.zeros(size, dtype=np.uint8)
    miss_c = np.zeros(size, dtype=np.int64)
    miss_f = np.zeros(size, dtype=np.int64)
    ncomp = np.zeros(size, dtype=np.int64)
    for k in range(size):
        g = _Gen(seed_state(derive_key(seed, start + k)))
        rows = []
        for _ in range(m):
            row = [0] * n
            for _ in range(r_c):
                row[g.bounded(n)] += 1
            rows.append(row)
        miss_c[k] = _missing(rows)
        for _ in range(r_e):
            i, j = g.pair(m)
            interact(rows[i], rows[j], strategy)
        miss_f[k] = _missing(rows)
        done = sum(1 for row in rows if 0 not in row)
        ncomp[k] = done
        completed[k] = done == m
    return completed, miss_c, miss_f, ncomp


def until_m_sets_batch(seed, start, stop, n, m):
    out = np.empty(stop - start, dtype=np.int64)
    for k in range(stop - start):
        state = seed_state(derive_key(seed, start + k))
        out[k] = until_m_sets(state, n, m)
    return out
