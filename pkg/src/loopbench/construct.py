"""Building new loops from old: semidirect products and holomorphs.

The external semidirect product of loops A and K along an action map
``phi: A -> Sym(K)`` multiplies pairs by ``(a, x)(b, y) = (a*b, phi_b(x)*y)``.
Pairs are flattened a-major, so (a, x) lives at index a*|K| + x and the
identity pair lands on 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from .tables import LoopError, LoopTable, Perm, subtable
from . import structure
from .structure import (
    NotCC,
    NotSubloop,
    Autotopism,
    is_autotopism,
    is_automorphism,
    is_nuclear_automorphism,
    nucleus,
)


class BadAction(LoopError):
    pass


class NotHomomorphism(LoopError):
    pass


class NotComplementary(LoopError):
    pass


class TriplesFail(LoopError):
    def __init__(self, which: str, witness: tuple[int, int, int]):
        self.which = which
        self.witness = witness
        super().__init__(f"triple {which} fails to associate at {witness}")


@dataclass(frozen=True)
class ActionMap:
    """An assignment a -> phi_a of permutations of K, one per element of A.

    phi of the identity must be the identity permutation, and every phi_a
    must fix the identity of K.  Both are enforced at construction.
    """

    domain: LoopTable
    codomain: LoopTable
    maps: tuple[Perm, ...]

    def __post_init__(self):
        if len(self.maps) != self.domain.n:
            raise BadAction(f"need {self.domain.n} permutations, got {len(self.maps)}")
        if any(len(p) != self.codomain.n for p in self.maps):
            raise BadAction("permutation degree differs from |K|")
        if not self.maps[0].is_identity():
            raise BadAction("phi of the identity is not the identity permutation")
        for a, p in enumerate(self.maps):
            if p(0) != 0:
                raise BadAction(f"phi_{a} moves the identity of K")

    def __call__(self, a: int) -> Perm:
        return self.maps[a]

    def is_homomorphism_into_aut(self) -> bool:
        K = self.codomain
        if any(not is_automorphism(K, p) for p in self.maps):
            return False
        A = self.domain
        return all(self.maps[A.mul(a, b)] == self.maps[a] * self.maps[b]
                   for a in A.elements() for b in A.elements())


def trivial_action(A: LoopTable, K: LoopTable) -> ActionMap:
    return ActionMap(A, K, tuple(Perm.identity(K.n) for _ in A.elements()))


def semidirect(A: LoopTable, K: LoopTable, phi: ActionMap) -> LoopTable:
    """The external semidirect product A x| K, flattened a-major."""
    if phi.domain != A or phi.codomain != K:
        raise BadAction("action map was built for different factors")
    na, nk = A.n, K.n
    rows = [[0] * (na * nk) for _ in range(na * nk)]
    for a in A.elements():
        for x in K.elements():
            src = a * nk + x
            row = rows[src]
            for b in A.elements():
                ab = A.mul(a, b) * nk
                pb = phi(b)
                for y in K.elements():
                    row[b * nk + y] = ab + K.mul(pb(x), y)
    return LoopTable(rows)


def check_semidirect_theorem(A: LoopTable, K: LoopTable, phi: ActionMap) -> tuple[bool, bool, bool]:
    """Evaluate the three equivalent conditions for A x| K to be CC.

    Returns (product is CC, every phi_b is nuclear, all U/V triples are
    autotopisms of K), each computed independently.  The three are asserted
    equal before returning.
    """
    from .identities import is_cc

    if not is_cc(A):
        raise NotCC("left factor is not conjugacy closed")
    if not is_cc(K):
        raise NotCC("right factor is not conjugacy closed")
    if not phi.is_homomorphism_into_aut():
        raise NotHomomorphism("phi is not a homomorphism into Aut(K)")

    cc = is_cc(semidirect(A, K, phi))
    nuclear = all(is_nuclear_automorphism(K, phi(b)) for b in A.elements())

    triples = True
    for b in A.elements():
        pb = phi(b)
        for x in K.elements():
            xb = pb(x)
            u = (K.left(xb) * K.right(x).inv(), K.left(x), K.left(xb))
            v = (K.right(x), K.right(xb) * K.left(x).inv(), K.right(xb))
            if not (is_autotopism(K, *u) and is_autotopism(K, *v)):
                triples = False
                break
        if not triples:
            break

    if not (cc == nuclear == triples):
        raise AssertionError("semidirect CC criteria disagree; table or code is corrupt")
    return cc, nuclear, triples


def perm_group_table(perms: list[Perm]) -> tuple[LoopTable, list[Perm]]:
    """The Cayley table of a set of permutations closed under composition.

    Elements are sorted by image tuple; index 0 is the identity.  The table
    entry (i, j) is the index of perms[i] * perms[j] (apply i first).
    """
    elems = sorted(set(perms))
    if not elems or not elems[0].is_identity():
        raise LoopError("permutation set lacks the identity")
    index = {p: i for i, p in enumerate(elems)}
    rows = []
    for p in elems:
        row = []
        for q in elems:
            pq = p * q
            if pq not in index:
                raise LoopError("permutation set is not closed under composition")
            row.append(index[pq])
        rows.append(row)
    return LoopTable(rows), elems


def holomorph_action(Q: LoopTable, subgroup: Optional[Iterable[Perm]] = None) -> ActionMap:
    """The natural action of the nuclear automorphism group on Q.

    ``subgroup`` restricts to a composition-closed subset of the nuclear
    automorphisms; by default the whole group acts.
    """
    from .identities import is_cc

    if not is_cc(Q):
        raise NotCC("holomorph construction requires a conjugacy closed table")
    perms = list(subgroup) if subgroup is not None else structure.nuclear_automorphisms(Q)
    if subgroup is not None:
        allowed = set(structure.nuclear_automorphisms(Q))
        if any(p not in allowed for p in perms):
            raise BadAction("subgroup contains a non-nuclear automorphism")
    table, elems = perm_group_table(perms)
    return ActionMap(table, Q, tuple(elems))


def holomorph(Q: LoopTable, subgroup: Optional[Iterable[Perm]] = None) -> LoopTable:
    """NAut(Q) acting naturally on Q; the result is checked to be CC."""
    from .identities import is_cc

    act = holomorph_action(Q, subgroup)
    product = semidirect(act.domain, Q, act)
    if not is_cc(product):
        raise AssertionError("holomorph of a CC table failed the CC check")
    return product


def internal_decompose(Q: LoopTable, A: Iterable[int], K: Iterable[int]) -> ActionMap:
    """Recognize Q as an internal semidirect product of subloops A and K.

    Checks normality of K, complementarity (Q = AK with A meet K trivial),
    and the three associating-triple conditions, then returns the action
    a -> (restriction of R_a L_a^-1 to K) on the relabeled factors.  The
    external product built from the result is verified isomorphic to Q via
    (a, x) -> a*x.
    """
    A, K = frozenset(A), frozenset(K)
    if not structure.is_subloop(Q, A):
        raise NotSubloop(f"{sorted(A)} is not closed")
    if not structure.is_subloop(Q, K):
        raise NotSubloop(f"{sorted(K)} is not closed")
    if not structure.is_normal(Q, K):
        raise structure.NotNormal(("K", sorted(K)))
    if A & K != {0}:
        raise NotComplementary(f"A meet K = {sorted(A & K)}")
    products = {Q.mul(a, x) for a in A for x in K}
    if len(A) * len(K) != Q.n or len(products) != Q.n:
        raise NotComplementary("products A*K do not cover Q uniquely")

    full = frozenset(Q.elements())
    for which, (S1, S2, S3) in (("(K,A,K)", (K, A, K)),
                                ("(A,A,K)", (A, A, K)),
                                ("(A,K,Q)", (A, K, full))):
        witness = _assoc_witness(Q, S1, S2, S3)
        if witness is not None:
            raise TriplesFail(which, witness)

    At, amap = subtable(Q, A)
    Kt, kmap = subtable(Q, K)
    aback = sorted(A)
    kback = sorted(K)
    maps = []
    for ai in range(At.n):
        a = aback[ai]
        images = []
        for xi in range(Kt.n):
            x = kback[xi]
            y = Q.ldiv(a, Q.mul(x, a))  # x R_a L_a^-1
            if y not in kmap:
                raise BadAction(f"conjugation by {a} leaves K at {x}")
            images.append(kmap[y])
        maps.append(Perm(images))
    act = ActionMap(At, Kt, tuple(maps))

    ext = semidirect(At, Kt, act)
    iso = [0] * Q.n
    for ai, a in enumerate(aback):
        for xi, x in enumerate(kback):
            iso[ai * Kt.n + xi] = Q.mul(a, x)
    if sorted(iso) != list(Q.elements()):
        raise AssertionError("internal decomposition is not bijective")
    for u in range(Q.n):
        for v in range(Q.n):
            if iso[ext.mul(u, v)] != Q.mul(iso[u], iso[v]):
                raise AssertionError("external product disagrees with Q")
    return act


def _assoc_witness(Q: LoopTable, S1, S2, S3) -> Optional[tuple[int, int, int]]:
    for x in sorted(S1):
        for y in sorted(S2):
            xy = Q.mul(x, y)
            for z in sorted(S3):
                if Q.mul(x, Q.mul(y, z)) != Q.mul(xy, z):
                    return (x, y, z)
    return None
