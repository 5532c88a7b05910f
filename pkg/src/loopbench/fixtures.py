"""Bundled tables and small constructors used by tests and the CLI.

``t16``/``t27`` load the two bundled .tbl files.  The constructors build
well-known groups (and the order-16 Cayley loop) directly, mostly for use
as oracles against the analysis code.
"""

from __future__ import annotations

import functools
import itertools
import random
from importlib import resources
from pathlib import Path

from .tables import LoopTable, loads_table, normalize_table

BUNDLED = ("t16.tbl", "t27.tbl")


def fixture_path(name: str) -> Path:
    """Filesystem path of a bundled .tbl file ('t16.tbl' or 't16')."""
    if not name.endswith(".tbl"):
        name += ".tbl"
    p = resources.files("loopbench.data").joinpath(name)
    with resources.as_file(p) as concrete:
        return Path(concrete)


@functools.cache
def t16() -> LoopTable:
    return loads_table(resources.files("loopbench.data").joinpath("t16.tbl").read_text())


@functools.cache
def t27() -> LoopTable:
    return loads_table(resources.files("loopbench.data").joinpath("t27.tbl").read_text())


def cyclic_group(n: int) -> LoopTable:
    return LoopTable([[(i + j) % n for j in range(n)] for i in range(n)])


def boolean_group(k: int) -> LoopTable:
    n = 2 ** k
    return LoopTable([[i ^ j for j in range(n)] for i in range(n)])


def dihedral_group(m: int) -> LoopTable:
    """Order 2m; rotations at 0..m-1, reflections at m..2m-1."""
    n = 2 * m

    def mul(i, j):
        ri, si = i % m, i >= m
        rj, sj = j % m, j >= m
        if not si and not sj:
            return (ri + rj) % m
        if not si and sj:
            return m + (rj - ri) % m
        if si and not sj:
            return m + (ri + rj) % m
        return (rj - ri) % m

    return LoopTable([[mul(i, j) for j in range(n)] for i in range(n)])


def symmetric_group(m: int) -> LoopTable:
    """S_m on sorted permutation tuples; composition applies the left factor first."""
    elems = sorted(itertools.permutations(range(m)))
    index = {p: i for i, p in enumerate(elems)}
    rows = []
    for p in elems:
        rows.append([index[tuple(q[v] for v in p)] for q in elems])
    return LoopTable(rows)


def direct_product(A: LoopTable, B: LoopTable) -> LoopTable:
    nb = B.n
    n = A.n * nb
    rows = [[0] * n for _ in range(n)]
    for a in A.elements():
        for x in B.elements():
            row = rows[a * nb + x]
            for b in A.elements():
                for y in B.elements():
                    row[b * nb + y] = A.mul(a, b) * nb + B.mul(x, y)
    return LoopTable(rows)


# Fano-plane triples for the octonion basis: e_a e_b = e_c cyclically.
_FANO = ((1, 2, 3), (1, 4, 5), (1, 7, 6), (2, 4, 6), (2, 5, 7), (3, 4, 7), (3, 6, 5))


def cayley_loop() -> LoopTable:
    """The order-16 loop of unit octonions {+-e_0 .. +-e_7}.

    Index i + 8s encodes (-1)^s e_i.  Nonassociative, diassociative, and
    conjugacy closed: the classical example of an extra loop.
    """
    sign = {}
    for a, b, c in _FANO:
        sign[(a, b)] = (c, 0)
        sign[(b, c)] = (a, 0)
        sign[(c, a)] = (b, 0)
        sign[(b, a)] = (c, 1)
        sign[(c, b)] = (a, 1)
        sign[(a, c)] = (b, 1)

    def base_mul(i, j):
        if i == 0:
            return j, 0
        if j == 0:
            return i, 0
        if i == j:
            return 0, 1
        return sign[(i, j)]

    rows = [[0] * 16 for _ in range(16)]
    for u in range(16):
        i, s1 = u % 8, u // 8
        for v in range(16):
            j, s2 = v % 8, v // 8
            k, s3 = base_mul(i, j)
            rows[u][v] = k + 8 * ((s1 + s2 + s3) % 2)
    return LoopTable(rows)


_GROUP_BUILDERS = [
    lambda: cyclic_group(2), lambda: cyclic_group(3), lambda: cyclic_group(4),
    lambda: cyclic_group(5), lambda: cyclic_group(6), lambda: cyclic_group(7),
    lambda: cyclic_group(8), lambda: cyclic_group(9), lambda: cyclic_group(12),
    lambda: boolean_group(2), lambda: boolean_group(3),
    lambda: dihedral_group(3), lambda: dihedral_group(4), lambda: dihedral_group(5),
    lambda: symmetric_group(3),
    lambda: direct_product(cyclic_group(2), cyclic_group(4)),
    lambda: direct_product(cyclic_group(3), cyclic_group(3)),
    lambda: direct_product(cyclic_group(2), cyclic_group(6)),
    lambda: direct_product(cyclic_group(2), symmetric_group(3)),
    lambda: direct_product(cyclic_group(4), cyclic_group(4)),
]


def random_group(rng: random.Random) -> LoopTable:
    """A random small group with randomly scrambled element labels."""
    Q = rng.choice(_GROUP_BUILDERS)()
    relabel = list(Q.elements())
    rng.shuffle(relabel)
    grid = [[relabel[Q.mul(a, b)] for b in Q.elements()] for a in Q.elements()]
    scrambled = [[0] * Q.n for _ in range(Q.n)]
    for a in Q.elements():
        for b in Q.elements():
            scrambled[relabel[a]][relabel[b]] = grid[a][b]
    return normalize_table(scrambled)
