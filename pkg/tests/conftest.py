"""Shared fixtures and brute-force oracles.

The oracles here deliberately avoid the dynamic-programming code under test:
alignments are enumerated exhaustively and edit distances come from a
breadth-first search over single-edit neighbours.
"""

import itertools
from collections import deque
from fractions import Fraction
from math import comb

import pytest

from reinflect.data import MSD, Dataset, Triple

OP_RANK = {"match": 0, "sub": 1, "del": 2, "ins": 3}


def enumerate_alignments(a, b):
    """Every alignment of a and b as a list of (op, a_part, b_part)."""
    if not a and not b:
        yield []
        return
    if a and b:
        op = "match" if a[0] == b[0] else "sub"
        for rest in enumerate_alignments(a[1:], b[1:]):
            yield [(op, a[0], b[0])] + rest
    if a:
        for rest in enumerate_alignments(a[1:], b):
            yield [("del", a[0], "")] + rest
    if b:
        for rest in enumerate_alignments(a, b[1:]):
            yield [("ins", "", b[0])] + rest


def brute_alignment(a, b):
    """(minimum cost, preferred min-cost alignment as (a_part, b_part) pairs).

    Preference is the lexicographically smallest op sequence under
    match < sub < del < ins, read from the start of the strings.
    """
    best = None
    for al in enumerate_alignments(a, b):
        cost = sum(op != "match" for op, _, _ in al)
        key = (cost, [OP_RANK[op] for op, _, _ in al])
        if best is None or key < best[0]:
            best = (key, al)
    (cost, _), al = best
    return cost, [(x, y) for _, x, y in al]


def neighbours(s, alphabet):
    for i in range(len(s)):
        yield s[:i] + s[i + 1:]
        for c in alphabet:
            if c != s[i]:
                yield s[:i] + c + s[i + 1:]
    for i in range(len(s) + 1):
        for c in alphabet:
            yield s[:i] + c + s[i:]


def bfs_distances(source, alphabet, max_len, max_depth=None):
    """Shortest single-edit path length from source to every string <= max_len."""
    dist = {source: 0}
    queue = deque([source])
    while queue:
        s = queue.popleft()
        if max_depth is not None and dist[s] >= max_depth:
            continue
        for t in neighbours(s, alphabet):
            if len(t) <= max_len and t not in dist:
                dist[t] = dist[s] + 1
                queue.append(t)
    return dist


def all_strings(alphabet, max_len):
    for n in range(max_len + 1):
        for chars in itertools.product(alphabet, repeat=n):
            yield "".join(chars)


def exact_sign_p(wins_a, wins_b):
    """Two-sided sign test p from exact binomial probabilities (Fractions)."""
    n = wins_a + wins_b
    if n == 0:
        return Fraction(1)
    pmf = [Fraction(comb(n, i), 2**n) for i in range(n + 1)]
    observed = pmf[wins_a]
    # two-sided: total mass of outcomes no more likely than the observed one
    p = sum(q for q in pmf if q <= observed)
    return min(p, Fraction(1))


@pytest.fixture
def elative():
    return MSD.parse("N;IN+ABL;SG")


@pytest.fixture
def koti(elative):
    return Dataset("fin", [Triple("koti", elative, "kodista")])
