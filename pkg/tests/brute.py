"""Brute-force reference computations, independent of the package code paths."""
from fractions import Fraction
from itertools import combinations, product


def seq_success(n, r_c):
    """P(a uniform length-r_c sequence over n symbols uses all n), by enumeration."""
    seqs = list(product(range(n), repeat=r_c))
    good = sum(1 for s in seqs if len(set(s)) == n)
    return Fraction(good, n**r_c)


def seq_at_least(n, m, T):
    seqs = list(product(range(n), repeat=T))
    good = sum(1 for s in seqs if all(s.count(c) >= m for c in range(n)))
    return Fraction(good, n**T)


def give_surplus(a, b):
    """Surplus-to-needy, written out independently: each coupon, each direction."""
    a, b = list(a), list(b)
    for c in range(len(a)):
        if a[c] > 1 and b[c] < 1:
            a[c], b[c] = a[c] - 1, b[c] + 1
        elif b[c] > 1 and a[c] < 1:
            a[c], b[c] = a[c] + 1, b[c] - 1
    return a, b


def two_phase(n, m, r_c, r_e):
    """Exact success under surplus-to-needy by enumerating every draw sequence
    of every collector and every ordered sequence of pair meetings."""
    pairs = list(combinations(range(m), 2))
    draw_seqs = list(product(range(n), repeat=r_c))
    good = 0
    total = 0
    for joint in product(draw_seqs, repeat=m):
        start = [[seq.count(c) for c in range(n)] for seq in joint]
        for meetings in product(pairs, repeat=r_e):
            rows = [list(r) for r in start]
            for i, j in meetings:
                rows[i], rows[j] = give_surplus(rows[i], rows[j])
            total += 1
            good += all(min(r) > 0 for r in rows)
    return Fraction(good, total)
