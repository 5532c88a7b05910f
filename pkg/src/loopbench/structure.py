"""Structural invariants of a loop table.

Nuclei, center, subloop closure and enumeration, normality and quotients,
associators, inner mappings, automorphism groups, and the prime-power
center checks.  Everything here is a pure function of an immutable table.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Optional

from .tables import LoopError, LoopTable, Perm, subtable


class OrderTooLarge(LoopError):
    def __init__(self, n: int, bound: int):
        self.n, self.bound = n, bound
        super().__init__(f"order {n} exceeds the desk-scale bound {bound}")


class NotSubloop(LoopError):
    pass


class NotNormal(LoopError):
    def __init__(self, witness):
        self.witness = witness
        super().__init__(f"coset multiplication ill-defined, witness {witness}")


class NotPrimePower(LoopError):
    pass


class NotCC(LoopError):
    pass


DESK_BOUND = 64


# -- autotopisms ---------------------------------------------------------------

@dataclass(frozen=True)
class Autotopism:
    """A verified triple (alpha, beta, gamma) with y.alpha * z.beta = (y*z).gamma."""

    alpha: Perm
    beta: Perm
    gamma: Perm

    @classmethod
    def of(cls, Q: LoopTable, alpha: Perm, beta: Perm, gamma: Perm) -> "Autotopism":
        if not is_autotopism(Q, alpha, beta, gamma):
            raise LoopError("not an autotopism")
        return cls(alpha, beta, gamma)


def is_autotopism(Q: LoopTable, alpha: Perm, beta: Perm, gamma: Perm) -> bool:
    for y in Q.elements():
        ay = alpha(y)
        for z in Q.elements():
            if Q.mul(ay, beta(z)) != gamma(Q.mul(y, z)):
                return False
    return True


# -- nuclei and center ----------------------------------------------------------

def nuclei(Q: LoopTable) -> tuple[frozenset[int], frozenset[int], frozenset[int], frozenset[int]]:
    """(N_left, N_middle, N_right, N) by direct scans."""
    def compute():
        n = Q.n
        nl, nm, nr = set(), set(), set()
        for a in range(n):
            if all(Q.mul(a, Q.mul(x, y)) == Q.mul(Q.mul(a, x), y)
                   for x in range(n) for y in range(n)):
                nl.add(a)
            if all(Q.mul(Q.mul(x, a), y) == Q.mul(x, Q.mul(a, y))
                   for x in range(n) for y in range(n)):
                nm.add(a)
            if all(Q.mul(x, Q.mul(y, a)) == Q.mul(Q.mul(x, y), a)
                   for x in range(n) for y in range(n)):
                nr.add(a)
        return (frozenset(nl), frozenset(nm), frozenset(nr),
                frozenset(nl & nm & nr))

    cache = Q._cache
    if "nuclei" not in cache:
        cache["nuclei"] = compute()
    return cache["nuclei"]


def nucleus(Q: LoopTable) -> frozenset[int]:
    return nuclei(Q)[3]


def center(Q: LoopTable) -> frozenset[int]:
    """Commuting elements of the nucleus.

    On CC tables the nucleus restriction is provably redundant; this is
    re-verified here every time rather than assumed.
    """
    from .identities import is_cc

    def compute():
        N = nucleus(Q)
        z = frozenset(a for a in N
                      if all(Q.mul(a, y) == Q.mul(y, a) for y in Q.elements()))
        if is_cc(Q):
            commuting = frozenset(a for a in Q.elements()
                                  if all(Q.mul(a, y) == Q.mul(y, a) for y in Q.elements()))
            if commuting != z:
                raise AssertionError("central elements of a CC table escape the nucleus")
        return z

    cache = Q._cache
    if "center" not in cache:
        cache["center"] = compute()
    return cache["center"]


def nuclear_inverse(Q: LoopTable, a: int) -> int:
    """Inverse of a nuclear element (two-sided inside the group N)."""
    return Q.rho()(a)


# -- subloops -------------------------------------------------------------------

@dataclass(frozen=True)
class SubloopInfo:
    members: frozenset[int]
    is_normal: bool
    generators: tuple[int, ...]

    @property
    def order(self) -> int:
        return len(self.members)


def close_subset(Q: LoopTable, seed: Iterable[int]) -> frozenset[int]:
    """Least superset of seed+{0} closed under mul, ldiv and rdiv."""
    members = set(seed) | {0}
    frontier = list(members)
    seen = set(members)
    while frontier:
        new = []
        for a in frontier:
            for b in seen | set(new):
                for v in (Q.mul(a, b), Q.mul(b, a), Q.ldiv(a, b), Q.ldiv(b, a),
                          Q.rdiv(a, b), Q.rdiv(b, a)):
                    if v not in seen and v not in new:
                        new.append(v)
        seen.update(new)
        frontier = new
    return frozenset(seen)


def generate_subloop(Q: LoopTable, seed: Iterable[int]) -> SubloopInfo:
    members = close_subset(Q, seed)
    return SubloopInfo(members, is_normal(Q, members), tuple(sorted(set(seed))))


def is_subloop(Q: LoopTable, members: Iterable[int]) -> bool:
    s = set(members)
    if 0 not in s:
        return False
    return all(Q.mul(a, b) in s and Q.ldiv(a, b) in s and Q.rdiv(a, b) in s
               for a in s for b in s)


def associates(Q: LoopTable, A: Iterable[int], B: Iterable[int], C: Iterable[int]) -> bool:
    """Whether x*(y*z) = (x*y)*z for all x in A, y in B, z in C."""
    A, B, C = list(A), list(B), list(C)
    for x in A:
        for y in B:
            xy = Q.mul(x, y)
            for z in C:
                if Q.mul(x, Q.mul(y, z)) != Q.mul(xy, z):
                    return False
    return True


def subset_associates(Q: LoopTable, S: Iterable[int]) -> bool:
    S = list(S)
    return associates(Q, S, S, S)


def associator(Q: LoopTable, x: int, y: int, z: int) -> tuple[int, int]:
    """(paren, bracket): (x*yz) \\ (xy*z) and (x*yz) / (xy*z)."""
    a = Q.mul(x, Q.mul(y, z))
    b = Q.mul(Q.mul(x, y), z)
    return Q.ldiv(a, b), Q.rdiv(a, b)


# -- inner mappings --------------------------------------------------------------

def inner_maps(Q: LoopTable, x: int, y: int) -> tuple[Perm, Perm]:
    """(R(x,y), L(x,y)) = (R_x R_y R_{xy}^-1, L_x L_y L_{yx}^-1)."""
    rxy = Q.right(x) * Q.right(y) * Q.right(Q.mul(x, y)).inv()
    lxy = Q.left(x) * Q.left(y) * Q.left(Q.mul(y, x)).inv()
    return rxy, lxy


def t_map(Q: LoopTable, x: int) -> Perm:
    return Q.t_map(x)


def is_automorphism(Q: LoopTable, p: Perm) -> bool:
    if p(0) != 0:
        return False
    return all(p(Q.mul(x, y)) == Q.mul(p(x), p(y))
               for x in Q.elements() for y in Q.elements())


# -- automorphism groups ----------------------------------------------------------

def _order_profile(Q: LoopTable) -> list[tuple[int, int]]:
    """(left-power orbit length, right-power orbit length) per element."""
    prof = []
    for x in Q.elements():
        m, cur = 1, Q.mul(0, x)
        while cur != 0:
            cur = Q.mul(cur, x)
            m += 1
        k, cur = 1, Q.mul(x, 0)
        while cur != 0:
            cur = Q.mul(x, cur)
            k += 1
        prof.append((m, k))
    return prof


def find_generators(Q: LoopTable) -> list[int]:
    """A small generating sequence, greedily extending by the least outsider."""
    gens: list[int] = []
    covered = close_subset(Q, gens)
    while len(covered) < Q.n:
        x = min(set(Q.elements()) - covered)
        gens.append(x)
        covered = close_subset(Q, gens)
    return gens


def _extend_map(src: LoopTable, dst: LoopTable, seeds: list[tuple[int, int]]) -> Optional[list[int]]:
    """Close a partial element map under products, or None on conflict.

    The map sends src elements to dst elements, starts from 0 -> 0 plus the
    seed pairs, and is forced along all products of already-mapped elements.
    Every processed pair is verified, so a returned total map is an
    isomorphism candidate verified on all products of mapped elements.
    """
    n = src.n
    image = [-1] * n
    used = [False] * dst.n
    image[0] = 0
    used[0] = True
    known = [0]
    queue = list(seeds)
    while queue:
        a, b = queue.pop()
        if image[a] == b:
            continue
        if image[a] != -1 or used[b]:
            return None
        image[a] = b
        used[b] = True
        for c in known:
            for (u, v) in ((a, c), (c, a), (a, a)):
                p, q = src.mul(u, v), dst.mul(image[u], image[v])
                if image[p] == -1:
                    queue.append((p, q))
                elif image[p] != q:
                    return None
        known.append(a)
    return image


def _hom_search(src: LoopTable, dst: LoopTable, find_all: bool) -> list[Perm]:
    """Bijective product-preserving maps src -> dst by generator backtracking."""
    gens = find_generators(src)
    sprof = _order_profile(src)
    dprof = _order_profile(dst)
    out: list[Perm] = []

    def extend(base: list[int], gi: int):
        if gi == len(gens):
            if all(v != -1 for v in base):
                out.append(Perm(base))
            return
        g = gens[gi]
        if base[g] != -1:
            extend(base, gi + 1)
            return
        candidates = [b for b in dst.elements() if dprof[b] == sprof[g]]
        candidates.sort(key=lambda b: (dprof[b], b))
        for b in candidates:
            image = _restart(base, g, b)
            if image is not None:
                extend(image, gi + 1)
                if out and not find_all:
                    return

    def _restart(base: list[int], g: int, b: int) -> Optional[list[int]]:
        pairs = [(a, base[a]) for a in range(src.n) if base[a] > 0]
        pairs.append((g, b))
        return _extend_map(src, dst, pairs)

    start = [-1] * src.n
    start[0] = 0
    extend(start, 0)
    return out


def automorphisms(Q: LoopTable, bound: int = DESK_BOUND) -> list[Perm]:
    """The full automorphism group, sorted by image tuple."""
    if Q.n > bound:
        raise OrderTooLarge(Q.n, bound)

    def compute():
        auts = _hom_search(Q, Q, find_all=True)
        for p in auts:
            if not is_automorphism(Q, p):
                raise AssertionError("search produced a non-automorphism")
        return sorted(auts)

    cache = Q._cache
    if "automorphisms" not in cache:
        cache["automorphisms"] = compute()
    return list(cache["automorphisms"])


def is_nuclear_automorphism(Q: LoopTable, p: Perm) -> bool:
    N = nucleus(Q)
    return all(Q.ldiv(x, p(x)) in N for x in Q.elements())


def nuclear_automorphisms(Q: LoopTable, bound: int = DESK_BOUND) -> list[Perm]:
    """Automorphisms moving every x within x*N, sorted by image tuple.

    Checked to be a normal subgroup of the full automorphism group.
    """
    def compute():
        auts = automorphisms(Q, bound)
        naut = [p for p in auts if is_nuclear_automorphism(Q, p)]
        nset = set(naut)
        for p in naut:
            if p.inv() not in nset:
                raise AssertionError("nuclear automorphisms not closed under inverse")
            for q in naut:
                if p * q not in nset:
                    raise AssertionError("nuclear automorphisms not closed under product")
        for a in auts:
            ai = a.inv()
            for p in naut:
                if ai * p * a not in nset:
                    raise AssertionError("nuclear automorphisms not normal in Aut")
        return naut

    cache = Q._cache
    if "nuclear_automorphisms" not in cache:
        cache["nuclear_automorphisms"] = compute()
    return list(cache["nuclear_automorphisms"])


def is_isomorphic(Q1: LoopTable, Q2: LoopTable) -> Optional[Perm]:
    """An isomorphism Q1 -> Q2 if one exists, else None."""
    if Q1.n != Q2.n:
        return None
    if sorted(_order_profile(Q1)) != sorted(_order_profile(Q2)):
        return None
    found = _hom_search(Q1, Q2, find_all=False)
    return found[0] if found else None


# -- normality and quotients -------------------------------------------------------

def _coset_partition(Q: LoopTable, H: frozenset[int]) -> Optional[list[frozenset[int]]]:
    """Left cosets x*H sorted by least member, or None if they overlap."""
    cosets: dict[frozenset[int], None] = {}
    membership: dict[int, frozenset[int]] = {}
    for x in Q.elements():
        cs = frozenset(Q.mul(x, h) for h in H)
        for e in cs:
            prev = membership.get(e)
            if prev is not None and prev != cs:
                return None
            membership[e] = cs
        cosets[cs] = None
    return sorted(cosets, key=min)


def is_normal(Q: LoopTable, H: Iterable[int]) -> bool:
    """Whether x ~ y iff x in y*H is a congruence of the table."""
    H = frozenset(H)
    if not is_subloop(Q, H):
        raise NotSubloop(f"{sorted(H)} is not closed")
    return _normality_witness(Q, H) is None


def _normality_witness(Q: LoopTable, H: frozenset[int]):
    parts = _coset_partition(Q, H)
    if parts is None:
        return ("partition",)
    cid = {}
    for i, cs in enumerate(parts):
        for e in cs:
            cid[e] = i
    k = len(parts)
    prod = [[-1] * k for _ in range(k)]
    for x in Q.elements():
        for y in Q.elements():
            i, j, v = cid[x], cid[y], cid[Q.mul(x, y)]
            if prod[i][j] == -1:
                prod[i][j] = v
            elif prod[i][j] != v:
                return (x, y)
    return None


def is_normal_via_inner(Q: LoopTable, H: Iterable[int]) -> bool:
    """Normality as invariance under the inner mapping generators."""
    H = frozenset(H)
    if not is_subloop(Q, H):
        raise NotSubloop(f"{sorted(H)} is not closed")
    for x in Q.elements():
        tx = Q.t_map(x)
        if any(tx(h) not in H for h in H):
            return False
        for y in Q.elements():
            rxy, lxy = inner_maps(Q, x, y)
            if any(rxy(h) not in H or lxy(h) not in H for h in H):
                return False
    return True


def quotient(Q: LoopTable, H: Iterable[int]) -> tuple[LoopTable, list[int]]:
    """The coset table and the projection map (cosets sorted by least member)."""
    H = frozenset(H)
    if not is_subloop(Q, H):
        raise NotSubloop(f"{sorted(H)} is not closed")
    witness = _normality_witness(Q, H)
    if witness is not None:
        raise NotNormal(witness)
    parts = _coset_partition(Q, H)
    cid = {}
    for i, cs in enumerate(parts):
        for e in cs:
            cid[e] = i
    k = len(parts)
    rows = [[0] * k for _ in range(k)]
    reps = [min(cs) for cs in parts]
    for i, a in enumerate(reps):
        for j, b in enumerate(reps):
            rows[i][j] = cid[Q.mul(a, b)]
    return LoopTable(rows), [cid[x] for x in Q.elements()]


def all_subloops(Q: LoopTable, bound: int = DESK_BOUND) -> list[SubloopInfo]:
    """Every subloop, as closures of iteratively extended generator sets."""
    if Q.n > bound:
        raise OrderTooLarge(Q.n, bound)

    def compute():
        found: dict[frozenset[int], tuple[int, ...]] = {frozenset({0}): ()}
        frontier = [frozenset({0})]
        while frontier:
            nxt = []
            for H in frontier:
                for y in Q.elements():
                    if y in H:
                        continue
                    K = close_subset(Q, H | {y})
                    if K not in found:
                        found[K] = found[H] + (y,)
                        nxt.append(K)
            frontier = nxt
        return found

    cache = Q._cache
    if "all_subloops" not in cache:
        cache["all_subloops"] = compute()
    found = cache["all_subloops"]
    infos = [SubloopInfo(H, is_normal(Q, H), gens) for H, gens in found.items()]
    infos.sort(key=lambda s: (s.order, sorted(s.members)))
    return infos


def lagrange_check(Q: LoopTable, bound: int = DESK_BOUND) -> bool:
    """Strong Lagrange: |K| divides |H| whenever K, H are subloops with K <= H."""
    subs = all_subloops(Q, bound)
    for hi in subs:
        for ki in subs:
            if ki.members <= hi.members and hi.order % ki.order != 0:
                return False
    return True


# -- prime-power center structure ----------------------------------------------------

@dataclass(frozen=True)
class CenterTowerReport:
    prime: int
    exponent: int           # |Q| = p^exponent
    center_exponent: int    # |Z(Q)| = p^center_exponent
    tower: tuple[frozenset[int], ...]  # normal subloops of orders p^0..p^exponent
    center_ok: bool         # center_exponent not in {0, exponent-1}

    def lines(self) -> list[str]:
        out = [
            f"order = {self.prime}^{self.exponent}",
            f"center_order = {self.prime}^{self.center_exponent}",
            f"center_exponent_admissible = {'yes' if self.center_ok else 'no'}",
        ]
        for m, H in enumerate(self.tower):
            out.append(f"normal_subloop_order_{self.prime}^{m} = {sorted(H)}")
        return out


def _prime_power(n: int) -> Optional[tuple[int, int]]:
    for p in range(2, n + 1):
        if n % p == 0:
            k = 0
            while n % p == 0:
                n //= p
                k += 1
            return (p, k) if n == 1 else None
    return None


def center_tower_check(Q: LoopTable) -> CenterTowerReport:
    """Verify the prime-power center constraints and exhibit a normal tower.

    For |Q| = p^n a CC table must have |Z| = p^r with r outside {0, n-1},
    and a normal subloop of order p^m for every m <= n.  The tower is built
    from a central subgroup of order p and recursion through the quotient.
    """
    from .identities import is_cc

    pp = _prime_power(Q.n)
    if pp is None:
        raise NotPrimePower(f"order {Q.n} is not a prime power")
    p, k = pp
    if not is_cc(Q):
        raise NotCC("center tower requires a conjugacy closed table")

    Z = center(Q)
    zpp = _prime_power(len(Z)) if len(Z) > 1 else (p, 0)
    if zpp is None or zpp[0] != p:
        raise AssertionError("center order is not a power of the same prime")
    r = zpp[1]
    center_ok = r != 0 and r != k - 1

    tower = _normal_tower(Q)
    for m, H in enumerate(tower):
        if len(H) != p ** m or not is_normal(Q, H):
            raise AssertionError("normal tower construction failed")
    return CenterTowerReport(p, k, r, tuple(tower), center_ok)


def _normal_tower(Q: LoopTable) -> list[frozenset[int]]:
    if Q.n == 1:
        return [frozenset({0})]
    p, _ = _prime_power(Q.n)
    Z = sorted(center(Q))
    z = next(x for x in Z if x != 0)
    m = Q.element_order(z)
    while m % p == 0 and m > p:
        z = Q.power(z, p)
        m = Q.element_order(z)
    P = close_subset(Q, {z})
    quo, proj = quotient(Q, P)
    tower_above = _normal_tower(quo)
    tower = [frozenset({0})]
    for H1 in tower_above:
        pre = frozenset(x for x in Q.elements() if proj[x] in H1)
        tower.append(pre)
    return tower
