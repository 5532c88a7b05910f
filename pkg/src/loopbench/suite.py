"""The fixture verification battery.

Every structural statement the package knows about, checked exhaustively on
concrete tables.  Each check declares what it needs (conjugacy closedness,
power-associativity, ...) and is run on every supplied loop that qualifies;
the battery result records pass/fail with a witness string on failure.

Conventions: x^-1 written below means the two-sided inverse of a
power-associative element; J is the common value of the inverse maps when
they coincide.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Callable

from .tables import LoopTable, Perm
from .identities import (
    AAIP,
    EXTRA,
    LCC,
    RCC,
    check_identity,
    classify,
    is_cc,
    is_pa,
    wip_elements,
)
from .structure import (
    all_subloops,
    associates,
    associator,
    center_tower_check,
    close_subset,
    inner_maps,
    is_autotopism,
    is_automorphism,
    is_normal,
    is_normal_via_inner,
    lagrange_check,
    nuclear_automorphisms,
    nuclear_inverse,
    nuclei,
    nucleus,
    quotient,
    _prime_power,
)
from .construct import check_semidirect_theorem, internal_decompose, semidirect, trivial_action


@dataclass
class BatteryResult:
    check: str
    loop_name: str
    passed: bool
    detail: str = ""


class _Failure(Exception):
    def __init__(self, detail: str):
        self.detail = detail


def _require(cond: bool, detail: str):
    if not cond:
        raise _Failure(detail)


# Applicability guards ---------------------------------------------------------

def _any(Q):
    return True


def _cc(Q):
    return is_cc(Q)


def _cc_pa(Q):
    return is_cc(Q) and is_pa(Q)


def _cc_prime_power(Q):
    return is_cc(Q) and _prime_power(Q.n) is not None


def _small(limit):
    def guard(Q):
        return Q.n <= limit
    return guard


def _cc_small(limit):
    def guard(Q):
        return is_cc(Q) and Q.n <= limit
    return guard


def _holomorph_feasible(Q):
    # the holomorph has order |NAut| * n; keep the product desk-scale
    return (is_cc(Q) and Q.n <= 32
            and len(nuclear_automorphisms(Q)) * Q.n <= 300)


# -- generic loop checks ---------------------------------------------------------

def check_cancellation(Q: LoopTable):
    for x in Q.elements():
        for y in Q.elements():
            _require(Q.ldiv(x, Q.mul(x, y)) == y, f"x\\(xy) != y at {(x, y)}")
            _require(Q.mul(x, Q.ldiv(x, y)) == y, f"x(x\\y) != y at {(x, y)}")
            _require(Q.rdiv(Q.mul(x, y), y) == x, f"(xy)/y != x at {(x, y)}")
            _require(Q.mul(Q.rdiv(x, y), y) == x, f"(x/y)y != x at {(x, y)}")


def check_translations_bijective(Q: LoopTable):
    full = set(Q.elements())
    for x in Q.elements():
        _require(set(Q.left(x)) == full, f"L_{x} not bijective")
        _require(set(Q.right(x)) == full, f"R_{x} not bijective")


def check_inverse_uniqueness(Q: LoopTable):
    rho, lam = Q.rho(), Q.lam()
    for x in Q.elements():
        rights = [z for z in Q.elements() if Q.mul(x, z) == 0]
        lefts = [z for z in Q.elements() if Q.mul(z, x) == 0]
        _require(rights == [rho(x)], f"right inverse of {x} not unique")
        _require(lefts == [lam(x)], f"left inverse of {x} not unique")


def check_inverse_maps_vs_d(Q: LoopTable):
    d1 = Q.d_map(0)
    _require(Q.rho() == d1, "rho != D_1")
    _require(Q.lam() == d1.inv(), "lambda != D_1^-1")


def check_fg_defining(Q: LoopTable):
    # F_x = L_x R_x^-1 and G_x = R_x L_x^-1 hold by construction in any loop
    for x in Q.elements():
        f, g = Q.fg(x)
        _require(f == Q.left(x) * Q.right(x).inv(), f"F_{x} != L R^-1")
        _require(g == Q.right(x) * Q.left(x).inv(), f"G_{x} != R L^-1")


def check_wip_forms(Q: LoopTable):
    wip_elements(Q)  # raises internally if the four phrasings ever disagree


def check_power_agreement(Q: LoopTable):
    from .identities import is_pa_element
    from .tables import NotPowerAssociative

    for x in Q.elements():
        pa = is_pa_element(Q, x)
        try:
            Q.power(x, 5)
            agreed = True
        except NotPowerAssociative:
            agreed = False
        # left/right agreement is implied by <x> being a group
        if pa:
            _require(agreed, f"power() rejects power-associative {x}")
        if agreed:
            _require(Q.power(x, 0) == 0, f"x^0 != 1 at {x}")
            _require(Q.power(x, -1) == Q.rho()(x), f"x^-1 != rho(x) at {x}")


# -- conjugacy closed checks -------------------------------------------------------

def check_cc_paths_agree(Q: LoopTable):
    dsl = check_identity(Q, RCC).holds and check_identity(Q, LCC).holds
    _require(dsl == is_cc(Q), "identity-DSL CC check disagrees with is_cc")


def check_fg_inverse(Q: LoopTable):
    ident = Perm.identity(Q.n)
    for x in Q.elements():
        f, g = Q.fg(x)
        _require(f * g == ident and g * f == ident, f"F G != I at {x}")


def check_fg_factorizations(Q: LoopTable):
    rho, lam = Q.rho(), Q.lam()
    for x in Q.elements():
        f, g = Q.fg(x)
        _require(f == Q.right(rho(x)) * Q.left(x), f"F_x != R_xp L_x at {x}")
        _require(g == Q.left(lam(x)) * Q.right(x), f"G_x != L_xl R_x at {x}")
        dx = Q.d_map(x)
        _require(f == rho * Q.left(x) * dx.inv(), f"F_x != rho L_x D_x^-1 at {x}")
        _require(g == lam * Q.right(x) * dx, f"G_x != lam R_x D_x at {x}")


def check_f_g_pointwise_forms(Q: LoopTable):
    rho, lam = Q.rho(), Q.lam()
    for x in Q.elements():
        f, g = Q.fg(x)
        for y in Q.elements():
            _require(f(y) == Q.mul(x, Q.mul(y, rho(x))), f"f(x,y) != x(y x^r) at {(x, y)}")
            _require(f(y) == Q.rdiv(x, Q.mul(x, rho(y))), f"f(x,y) != x/(x y^r) at {(x, y)}")
            _require(g(y) == Q.mul(Q.mul(lam(x), y), x), f"g(x,y) != (x^l y)x at {(x, y)}")
            _require(g(y) == Q.ldiv(Q.mul(lam(y), x), x), f"g(x,y) != (y^l x)\\x at {(x, y)}")


def check_lr_conjugation(Q: LoopTable):
    for x in Q.elements():
        lx, rx = Q.left(x), Q.right(x)
        lxi, rxi = lx.inv(), rx.inv()
        f, g = Q.fg(x)
        rho, lam = Q.rho(), Q.lam()
        for y in Q.elements():
            ly, ry = Q.left(y), Q.right(y)
            _require(lx * ly * lxi == Q.left(g(y)), f"L conj fails at {(x, y)}")
            _require(rx * ry * rxi == Q.right(f(y)), f"R conj fails at {(x, y)}")
            _require(lxi * ly * lx == Q.left(f(y)), f"L inv conj fails at {(x, y)}")
            _require(rxi * ry * rx == Q.right(g(y)), f"R inv conj fails at {(x, y)}")
            # lemma items (3) and (4)
            _require(lxi * ry * lx == rxi * Q.right(Q.mul(x, y)),
                     f"LR mixed conj (3a) fails at {(x, y)}")
            _require(lxi * ry * lx == Q.right(Q.rdiv(y, rho(x))) * rxi,
                     f"LR mixed conj (3b) fails at {(x, y)}")
            _require(rxi * ly * rx == lxi * Q.left(Q.mul(y, x)),
                     f"RL mixed conj (3c) fails at {(x, y)}")
            _require(rxi * ly * rx == Q.left(Q.ldiv(lam(x), y)) * lxi,
                     f"RL mixed conj (3d) fails at {(x, y)}")
            _require(lx * ry * lxi == Q.right(rho(x)).inv() * Q.right(Q.ldiv(x, y)),
                     f"LR mixed conj (4a) fails at {(x, y)}")
            _require(lx * ry * lxi == Q.right(Q.mul(y, rho(x))) * Q.right(rho(x)).inv(),
                     f"LR mixed conj (4b) fails at {(x, y)}")
            _require(rx * ly * rxi == Q.left(lam(x)).inv() * Q.left(Q.rdiv(y, x)),
                     f"RL mixed conj (4c) fails at {(x, y)}")
            _require(rx * ly * rxi == Q.left(Q.mul(lam(x), y)) * Q.left(lam(x)).inv(),
                     f"RL mixed conj (4d) fails at {(x, y)}")


def check_fg_for_all_z(Q: LoopTable):
    # F_x = R_z L_x R_{xz}^-1 = D_z L_x D_{xz}^-1 for every z (likewise G)
    for x in Q.elements():
        f, g = Q.fg(x)
        for z in Q.elements():
            xz, zx = Q.mul(x, z), Q.mul(z, x)
            _require(f == Q.right(z) * Q.left(x) * Q.right(xz).inv(),
                     f"F via R_z fails at {(x, z)}")
            _require(f == Q.d_map(z) * Q.left(x) * Q.d_map(xz).inv(),
                     f"F via D_z fails at {(x, z)}")
            _require(g == Q.left(z) * Q.right(x) * Q.left(zx).inv(),
                     f"G via L_z fails at {(x, z)}")
            _require(g == Q.d_map(z).inv() * Q.right(x) * Q.d_map(zx),
                     f"G via D_z fails at {(x, z)}")


def check_cc_autotopisms(Q: LoopTable):
    for x in Q.elements():
        f, g = Q.fg(x)
        lx, rx = Q.left(x), Q.right(x)
        _require(is_autotopism(Q, f, lx, lx), f"(F,L,L) not an autotopism at {x}")
        _require(is_autotopism(Q, rx, g, rx), f"(R,G,R) not an autotopism at {x}")


def check_nucleus_autotopisms(Q: LoopTable):
    nl, nm, nr, _ = nuclei(Q)
    ident = Perm.identity(Q.n)
    for a in nl:
        la = Q.left(a)
        _require(is_autotopism(Q, la, ident, la), f"(L_a,I,L_a) fails at {a}")
    for a in nr:
        ra = Q.right(a)
        _require(is_autotopism(Q, ident, ra, ra), f"(I,R_a,R_a) fails at {a}")
    for a in nm:
        _require(is_autotopism(Q, Q.right(a).inv(), Q.left(a), ident),
                 f"(R_a^-1,L_a,I) fails at {a}")


def check_pre_aaip(Q: LoopTable):
    rho, lam = Q.rho(), Q.lam()
    for x in Q.elements():
        for y in Q.elements():
            v = Q.mul(Q.mul(x, Q.mul(y, rho(x))), Q.mul(x, rho(y)))
            _require(v == x, f"(x.yx^r).xy^r != x at {(x, y)}")
            w = Q.mul(Q.mul(lam(y), x), Q.mul(Q.mul(lam(x), y), x))
            _require(w == x, f"y^l x.(x^l y.x) != x at {(x, y)}")


def check_cc_mf(Q: LoopTable):
    rho, lam = Q.rho(), Q.lam()
    for x in Q.elements():
        for y in Q.elements():
            for z in Q.elements():
                lhs = Q.mul(x, Q.mul(Q.mul(y, z), x))
                rhs = Q.mul(Q.ldiv(lam(x), y), Q.mul(z, x))
                _require(lhs == rhs, f"x(yz.x) form fails at {(x, y, z)}")
                lhs2 = Q.mul(Q.mul(x, Q.mul(y, z)), x)
                rhs2 = Q.mul(Q.mul(x, y), Q.rdiv(z, rho(x)))
                _require(lhs2 == rhs2, f"(x.yz)x form fails at {(x, y, z)}")


def check_nuclei_coincide(Q: LoopTable):
    nl, nm, nr, n = nuclei(Q)
    _require(nl == nm == nr == n, f"nuclei differ: {sorted(nl)}/{sorted(nm)}/{sorted(nr)}")


def check_nucleus_normal(Q: LoopTable):
    N = nucleus(Q)
    byc = is_normal(Q, N)
    byi = is_normal_via_inner(Q, N)
    _require(byc and byi and byc == byi, "nucleus normality checks disagree")


def check_normality_paths_agree(Q: LoopTable):
    for info in all_subloops(Q):
        other = is_normal_via_inner(Q, info.members)
        _require(info.is_normal == other,
                 f"normality paths disagree on {sorted(info.members)}")


def check_quotient_by_nucleus_abelian(Q: LoopTable):
    quo, _ = quotient(Q, nucleus(Q))
    rep = classify(quo)
    _require(rep.is_group and rep.is_commutative,
             f"Q/N not an abelian group (order {quo.n})")


def check_associator_s3(Q: LoopTable):
    for x in Q.elements():
        for y in Q.elements():
            for z in Q.elements():
                p0, b0 = associator(Q, x, y, z)
                for perm in itertools.permutations((x, y, z)):
                    p, b = associator(Q, *perm)
                    _require(p == p0 and b == b0, f"associator moved under {perm}")


def check_associators_in_center_of_nucleus(Q: LoopTable):
    N = nucleus(Q)
    zn = {a for a in N if all(Q.mul(a, b) == Q.mul(b, a) for b in N)}
    for x in Q.elements():
        for y in Q.elements():
            for z in Q.elements():
                p, b = associator(Q, x, y, z)
                _require(p in zn and b in zn,
                         f"associator at {(x, y, z)} escapes Z(N)")


def check_nuc_assoc_relations(Q: LoopTable):
    N = nucleus(Q)
    normal = is_normal(Q, N)
    for a in N:
        ai = nuclear_inverse(Q, a)
        for x in Q.elements():
            for y in Q.elements():
                for z in Q.elements():
                    p = associator(Q, x, y, z)[0]
                    _require(associator(Q, Q.mul(a, x), y, z)[0] == p,
                             f"(ax,y,z) != (x,y,z) at {(a, x, y, z)}")
                    _require(associator(Q, Q.mul(x, a), y, z)[0]
                             == associator(Q, x, Q.mul(a, y), z)[0],
                             f"(xa,y,z) != (x,ay,z) at {(a, x, y, z)}")
                    _require(associator(Q, x, Q.mul(y, a), z)[0]
                             == associator(Q, x, y, Q.mul(a, z))[0],
                             f"(x,ya,z) != (x,y,az) at {(a, x, y, z)}")
                    conj = Q.mul(ai, Q.mul(associator(Q, x, y, z)[0], a))
                    _require(associator(Q, x, y, Q.mul(z, a))[0] == conj,
                             f"(x,y,za) != a^-1(x,y,z)a at {(a, x, y, z)}")
                    if normal:
                        _require(associator(Q, Q.mul(x, a), y, z)[0] == p
                                 and associator(Q, x, Q.mul(y, a), z)[0] == p
                                 and conj == p,
                                 f"normal-nucleus relations fail at {(a, x, y, z)}")


def check_inner_maps_are_automorphisms(Q: LoopTable):
    N = nucleus(Q)
    for x in Q.elements():
        for y in Q.elements():
            rxy, lxy = inner_maps(Q, x, y)
            _require(is_automorphism(Q, rxy), f"R({x},{y}) not an automorphism")
            _require(is_automorphism(Q, lxy), f"L({x},{y}) not an automorphism")
            _require(all(rxy(a) == a and lxy(a) == a for a in N),
                     f"inner map moves the nucleus at {(x, y)}")


def check_inner_maps_symmetric(Q: LoopTable):
    for x in Q.elements():
        for y in Q.elements():
            rxy, lxy = inner_maps(Q, x, y)
            ryx, lyx = inner_maps(Q, y, x)
            _require(rxy == ryx, f"R(x,y) != R(y,x) at {(x, y)}")
            _require(lxy == lyx, f"L(x,y) != L(y,x) at {(x, y)}")


def check_inner_maps_commute(Q: LoopTable):
    perms = set()
    for x in Q.elements():
        for y in Q.elements():
            rxy, lxy = inner_maps(Q, x, y)
            perms.add(rxy)
            perms.add(lxy)
    perms = sorted(perms)
    for i, p in enumerate(perms):
        for q in perms[i + 1:]:
            _require(p * q == q * p, "inner mappings fail to commute")


def check_inner_maps_in_center_of_naut(Q: LoopTable):
    naut = nuclear_automorphisms(Q)
    seen = set()
    for x in Q.elements():
        for y in Q.elements():
            for p in inner_maps(Q, x, y):
                if p in seen:
                    continue
                seen.add(p)
                _require(p in set(naut), f"inner map at {(x, y)} is not nuclear")
                for q in naut:
                    _require(p * q == q * p,
                             f"inner map at {(x, y)} not central in NAut")


def check_lr_assoc(Q: LoopTable):
    for x in Q.elements():
        for y in Q.elements():
            _, lyx = inner_maps(Q, y, x)
            for z in Q.elements():
                p, _ = associator(Q, x, y, z)
                _require(lyx(z) == Q.mul(z, nuclear_inverse(Q, p)),
                         f"zL(y,x) != z(x,y,z)^-1 at {(x, y, z)}")
            for z in Q.elements():
                ryz, _ = inner_maps(Q, y, z)
                _, b = associator(Q, x, y, z)
                _require(ryz(x) == Q.mul(nuclear_inverse(Q, b), x),
                         f"xR(y,z) != [x,y,z]^-1 x at {(x, y, z)}")


def check_assoc_inv(Q: LoopTable):
    lam = Q.lam()
    for x in Q.elements():
        for y in Q.elements():
            for z in Q.elements():
                p = associator(Q, x, y, z)[0]
                lhs = Q.mul(z, nuclear_inverse(Q, p))
                rhs = Q.mul(associator(Q, x, y, lam(z))[0], z)
                _require(lhs == rhs, f"z(x,y,z)^-1 != (x,y,z^l)z at {(x, y, z)}")


def check_commutative_cc_is_group(Q: LoopTable):
    rep = classify(Q)
    if rep.is_commutative:
        _require(rep.is_group, "commutative CC table is not a group")


def check_aaip_implies_extra(Q: LoopTable):
    if check_identity(Q, AAIP).holds:
        _require(check_identity(Q, EXTRA).holds, "AAIP CC table is not extra")


def check_associates_permutation_invariance(Q: LoopTable, rng_seed: int = 7):
    rng = random.Random(rng_seed)
    N = nucleus(Q)
    samples = [frozenset({0}), N, frozenset(close_subset(Q, {1 % Q.n}))]
    for _ in range(2):
        size = rng.randint(1, max(2, Q.n // 4))
        samples.append(frozenset(rng.sample(range(Q.n), size)))
    for A, B, C in itertools.product(samples, repeat=3):
        base = associates(Q, A, B, C)
        for pA, pB, pC in itertools.permutations((A, B, C)):
            _require(associates(Q, pA, pB, pC) == base,
                     "associating triple not permutation invariant")


def check_associating_pairs_generate_groups(Q: LoopTable):
    from .identities import is_group

    if is_group(Q):
        return  # every subset of a group associates
    for x in Q.elements():
        for y in range(x, Q.n):
            S = {x, y}
            if subset_associates_fast(Q, S):
                members = close_subset(Q, S)
                _require(associates(Q, members, members, members),
                         f"<{x},{y}> fails to associate")


def subset_associates_fast(Q: LoopTable, S) -> bool:
    S = list(S)
    return associates(Q, S, S, S)


def check_lagrange(Q: LoopTable):
    _require(lagrange_check(Q), "strong Lagrange fails")


def _prime_factors(n: int) -> list[int]:
    out, p = [], 2
    while n > 1:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    return out


def check_cauchy(Q: LoopTable):
    present = {Q.element_order(x) for x in Q.elements()}
    for p in _prime_factors(Q.n):
        _require(p in present, f"no element of order {p}")


def check_center_tower(Q: LoopTable):
    report = center_tower_check(Q)
    _require(report.center_ok,
             f"|Z| = {report.prime}^{report.center_exponent} inadmissible")


# -- power-associative CC checks -----------------------------------------------------

def _inv(Q: LoopTable, x: int) -> int:
    return Q.rho()(x)


def check_e_commutes_with_translations(Q: LoopTable):
    for x in Q.elements():
        e = Q.e_map(x)
        _require(e.commutes_with(Q.left(x)), f"E_x, L_x do not commute at {x}")
        _require(e.commutes_with(Q.right(x)), f"E_x, R_x do not commute at {x}")


def check_powers_lemma(Q: LoopTable):
    for x in Q.elements():
        e, lx, rx = Q.e_map(x), Q.left(x), Q.right(x)
        for j in range(-2, 3):
            for t in range(-2, 3):
                _require((rx ** -j) * (lx ** t) * (rx ** j) == (e ** (-j * t)) * (lx ** t),
                         f"translation commutation fails at {(x, j, t)}")
        for k in range(-6, 7):
            m = (k - 1) * k // 2
            xs = Q.power(x, k)
            _require(Q.right(xs) == (e ** m) * (rx ** k),
                     f"R_(x^n) formula fails at {(x, k)}")
            _require(Q.left(xs) == (e ** -m) * (lx ** k),
                     f"L_(x^n) formula fails at {(x, k)}")
            _require(Q.e_map(xs) == e ** (k * k),
                     f"E_(x^n) formula fails at {(x, k)}")


def check_lrd(Q: LoopTable):
    for x in Q.elements():
        xi = _inv(Q, x)
        dx, dxi = Q.d_map(x), Q.d_map(xi)
        _require(Q.right(x) * Q.left(x) == dxi * dx, f"R L != D_i D at {x}")
        _require(Q.left(x) * Q.right(x) == (dx * dxi).inv(), f"L R != (D D_i)^-1 at {x}")


def check_short_b(Q: LoopTable):
    for x in Q.elements():
        xi = _inv(Q, x)
        for y in Q.elements():
            yi = _inv(Q, y)
            _require(Q.mul(Q.mul(x, Q.mul(x, y)), Q.mul(yi, xi)) == x,
                     f"(x.xy).y^-1x^-1 != x at {(x, y)}")
            _require(Q.mul(Q.mul(xi, yi), Q.mul(Q.mul(y, x), x)) == x,
                     f"x^-1y^-1.(yx.x) != x at {(x, y)}")


def check_short_c(Q: LoopTable):
    for x in Q.elements():
        x3 = Q.power(x, 3)
        for y in Q.elements():
            yi = _inv(Q, y)
            r3 = Q.mul(Q.mul(Q.mul(y, x), x), x)
            _require(Q.mul(yi, r3) == x3, f"y^-1.(yR^3) != x^3 at {(x, y)}")
            l3 = Q.mul(x, Q.mul(x, Q.mul(x, y)))
            _require(Q.mul(l3, yi) == x3, f"(yL^3).y^-1 != x^3 at {(x, y)}")


def check_cubes_are_wip(Q: LoopTable):
    wips = wip_elements(Q)
    for x in Q.elements():
        _require(Q.power(x, 3) in wips, f"cube of {x} is not WIP")


def check_e6(Q: LoopTable):
    ident = Perm.identity(Q.n)
    for x in Q.elements():
        _require(Q.e_map(x) ** 6 == ident, f"E_x^6 != I at {x}")


def check_d2(Q: LoopTable):
    J = Q.rho()
    for x in Q.elements():
        xi = _inv(Q, x)
        x2 = Q.power(x, 2)
        _require(Q.d_map(x2) == Q.left(xi) * J * Q.right(x), f"D_(x^2) formula fails at {x}")
        _require(Q.d_map(x2).inv() == Q.right(xi) * J * Q.left(x),
                 f"D_(x^2)^-1 formula fails at {x}")
        for y in Q.elements():
            _require(Q.mul(y, Q.mul(_inv(Q, Q.mul(xi, y)), x)) == x2,
                     f"x^2 = y((x^-1 y)^-1 x) fails at {(x, y)}")
            _require(Q.mul(Q.mul(x, _inv(Q, Q.mul(y, xi))), y) == x2,
                     f"x^2 = (x(y x^-1)^-1)y fails at {(x, y)}")


def check_square_cube_pairs_generate_groups(Q: LoopTable):
    from .identities import is_group

    if is_group(Q):
        return  # subsets of a group associate outright
    for b in Q.elements():
        for c in Q.elements():
            for pair in ((b, Q.power(c, 6)), (Q.power(b, 2), Q.power(c, 3))):
                members = close_subset(Q, pair)
                _require(associates(Q, members, members, members),
                         f"<{pair[0]},{pair[1]}> not a group from (b,c)={(b, c)}")


def check_wip_power_stability(Q: LoopTable):
    wips = wip_elements(Q)
    for c in wips:
        for k in range(-6, 7):
            _require(Q.power(c, k) in wips, f"c^{k} not WIP for c={c}")


def check_wip_equations(Q: LoopTable):
    rho, lam = Q.rho(), Q.lam()
    for c in sorted(wip_elements(Q)):
        ci = _inv(Q, c)
        lc, rc = Q.left(c), Q.right(c)
        _require(Q.d_map(c) == Q.left(ci) * rho, f"D_c != L_c^-1 rho at {c}")
        _require(Q.d_map(c).inv() == Q.right(ci) * lam, f"D_c^-1 != R_c^-1 lam at {c}")
        _require(lam * lc * rho == rc.inv(), f"lam L_c rho != R_c^-1 at {c}")
        _require(rho * rc * lam == lc.inv(), f"rho R_c lam != L_c^-1 at {c}")
        _require(lc * rho * rc == rho, f"L_c rho R_c != rho at {c}")
        _require(rc * lam * lc == lam, f"R_c lam L_c != lam at {c}")


def check_wip_e2(Q: LoopTable):
    ident = Perm.identity(Q.n)
    for c in wip_elements(Q):
        _require(Q.e_map(c) ** 2 == ident, f"E_c^2 != I at {c}")


def check_wip_square_lemma(Q: LoopTable):
    for c in wip_elements(Q):
        ei = Q.e_map(c).inv()
        for x in Q.elements():
            lhs = Q.mul(x, Q.mul(ei(x), c))
            rhs = Q.mul(Q.power(x, 2), c)
            _require(lhs == rhs, f"x(xE^-1.c) != x^2 c at {(c, x)}")


def check_wip_ee(Q: LoopTable):
    from .identities import is_group

    if is_group(Q):
        return  # both sides of the equivalence hold outright
    for b in Q.elements():
        eb = Q.e_map(b)
        for c in Q.elements():
            ec = Q.e_map(c)
            fixed = ec(b) == b and eb(c) == c
            members = close_subset(Q, {b, c})
            grp = associates(Q, members, members, members)
            _require(grp == fixed, f"<b,c> group iff E-fixed fails at {(b, c)}")
            if c in wip_elements(Q):
                _require((ec(b) == b) == (eb(c) == c),
                         f"WIP symmetry of E-fixing fails at {(b, c)}")


def check_group2_group1(Q: LoopTable):
    from .identities import is_group

    if is_group(Q):
        return
    wips = wip_elements(Q)
    for c in wips:
        c2 = Q.power(c, 2)
        for b in Q.elements():
            b2 = Q.power(b, 2)
            for pair in ((b, c2), (b2, c)):
                members = close_subset(Q, pair)
                _require(associates(Q, members, members, members),
                         f"square/WIP pair {pair} generates a non-group")


def check_wip_cc_squares_nuclear(Q: LoopTable):
    # WIP CC tables put every square in the nucleus, making Q/N boolean
    if len(wip_elements(Q)) != Q.n:
        return
    N = nucleus(Q)
    for x in Q.elements():
        _require(Q.mul(x, x) in N, f"square of {x} escapes the nucleus")
    quo, _ = quotient(Q, N)
    rep = classify(quo)
    _require(rep.is_group and all(quo.mul(x, x) == 0 for x in quo.elements()),
             "Q/N is not a boolean group")


# -- extra loop checks -----------------------------------------------------------

def check_extra_loop_suite(Q: LoopTable):
    rep = classify(Q)
    if not rep.is_extra:
        return
    ident = Perm.identity(Q.n)
    for x in Q.elements():
        for y in Q.elements():
            rxy, lxy = inner_maps(Q, x, y)
            ryx, lyx = inner_maps(Q, y, x)
            _require(lxy == rxy == lyx == ryx, f"extra inner maps differ at {(x, y)}")
            _require(lxy * lxy == ident, f"L(x,y)^2 != I at {(x, y)}")
    for x in Q.elements():
        for y in Q.elements():
            for z in Q.elements():
                p, b = associator(Q, x, y, z)
                _require(p == b, f"two associators differ at {(x, y, z)}")
                _require(Q.mul(p, p) == 0, f"associator^2 != 1 at {(x, y, z)}")
                for w in (x, y, z):
                    _require(Q.mul(p, w) == Q.mul(w, p),
                             f"associator fails to commute with argument at {(x, y, z)}")
    if not rep.is_group:
        _require(Q.n % 16 == 0, f"nonassociative extra loop of order {Q.n}")


# -- construction checks -----------------------------------------------------------

def check_semidirect_theorem_consistency(Q: LoopTable):
    # trivial action: all three certificates must come back true
    from .fixtures import cyclic_group

    A = cyclic_group(2)
    res = check_semidirect_theorem(A, Q, trivial_action(A, Q))
    _require(res == (True, True, True), f"trivial action certificates {res}")


def check_holomorph_cc(Q: LoopTable):
    from .construct import holomorph

    H = holomorph(Q)  # raises if the holomorph fails its internal CC assertion
    _require(H.n == Q.n * len(nuclear_automorphisms(Q)), "holomorph order wrong")


def check_internal_external_roundtrip(Q: LoopTable):
    from .construct import holomorph_action
    from .structure import is_nuclear_automorphism

    act = holomorph_action(Q)
    prod = semidirect(act.domain, Q, act)
    sub_a = frozenset(a * Q.n for a in act.domain.elements())
    sub_k = frozenset(range(Q.n))
    rec = internal_decompose(prod, sub_a, sub_k)
    _require(rec.maps == act.maps, "recovered action differs from the input action")
    _require(rec.is_homomorphism_into_aut(), "recovered action not a homomorphism")
    for p in rec.maps:
        _require(is_nuclear_automorphism(rec.codomain, p), "recovered action not nuclear")


# -- battery assembly ---------------------------------------------------------------

CHECKS: list[tuple[str, Callable[[LoopTable], bool], Callable[[LoopTable], None]]] = [
    ("cancellation", _any, check_cancellation),
    ("translations-bijective", _any, check_translations_bijective),
    ("inverse-uniqueness", _any, check_inverse_uniqueness),
    ("inverse-maps-vs-d1", _any, check_inverse_maps_vs_d),
    ("fg-defining", _any, check_fg_defining),
    ("wip-forms-agree", _any, check_wip_forms),
    ("power-agreement", _any, check_power_agreement),
    ("cc-paths-agree", _any, check_cc_paths_agree),
    ("fg-inverse", _cc, check_fg_inverse),
    ("fg-factorizations", _cc, check_fg_factorizations),
    ("fg-pointwise-forms", _cc, check_f_g_pointwise_forms),
    ("fg-for-all-z", _cc, check_fg_for_all_z),
    ("translation-conjugation", _cc, check_lr_conjugation),
    ("cc-autotopisms", _cc, check_cc_autotopisms),
    ("nucleus-autotopisms", _any, check_nucleus_autotopisms),
    ("inverse-product-identities", _cc, check_pre_aaip),
    ("mixed-moufang-form", _cc, check_cc_mf),
    ("nuclei-coincide", _cc, check_nuclei_coincide),
    ("nucleus-normal", _cc, check_nucleus_normal),
    ("normality-paths-agree", _small(32), check_normality_paths_agree),
    ("quotient-by-nucleus-abelian", _cc, check_quotient_by_nucleus_abelian),
    ("associator-s3-symmetry", _cc, check_associator_s3),
    ("associators-central-in-nucleus", _cc, check_associators_in_center_of_nucleus),
    ("nuclear-associator-relations", _cc, check_nuc_assoc_relations),
    ("inner-maps-automorphic", _cc, check_inner_maps_are_automorphisms),
    ("inner-maps-symmetric", _cc, check_inner_maps_symmetric),
    ("inner-maps-commute", _cc, check_inner_maps_commute),
    ("inner-maps-central-in-naut", _cc_small(32), check_inner_maps_in_center_of_naut),
    ("inner-maps-vs-associators", _cc, check_lr_assoc),
    ("associator-inverse-shift", _cc, check_assoc_inv),
    ("commutative-cc-group", _cc, check_commutative_cc_is_group),
    ("aaip-implies-extra", _cc, check_aaip_implies_extra),
    ("associates-permutation-invariant", _cc, check_associates_permutation_invariance),
    ("associating-pairs-generate-groups", _cc, check_associating_pairs_generate_groups),
    ("lagrange-strong", _small(32), check_lagrange),
    ("cauchy-property", _cc_pa, check_cauchy),
    ("center-tower", _cc_prime_power, check_center_tower),
    ("e-commutes-with-translations", _cc_pa, check_e_commutes_with_translations),
    ("translation-power-calculus", _cc_pa, check_powers_lemma),
    ("rl-division-factorization", _cc_pa, check_lrd),
    ("double-product-collapse", _cc_pa, check_short_b),
    ("triple-translate-cube", _cc_pa, check_short_c),
    ("cubes-are-wip", _cc_pa, check_cubes_are_wip),
    ("e-sixth-power-trivial", _cc_pa, check_e6),
    ("square-division-formula", _cc_pa, check_d2),
    ("sixth-power-pairs-associate", _cc_pa, check_square_cube_pairs_generate_groups),
    ("wip-powers-stay-wip", _cc_pa, check_wip_power_stability),
    ("wip-element-equations", _cc_pa, check_wip_equations),
    ("wip-e-squared-trivial", _cc_pa, check_wip_e2),
    ("wip-square-product", _cc_pa, check_wip_square_lemma),
    ("two-generated-group-criterion", _cc_pa, check_wip_ee),
    ("square-wip-pairs-associate", _cc_pa, check_group2_group1),
    ("wip-cc-squares-nuclear", _cc, check_wip_cc_squares_nuclear),
    ("extra-loop-suite", _cc, check_extra_loop_suite),
    ("semidirect-trivial-action", _cc_small(32), check_semidirect_theorem_consistency),
    ("holomorph-stays-cc", _holomorph_feasible, check_holomorph_cc),
    ("semidirect-roundtrip", _holomorph_feasible, check_internal_external_roundtrip),
]


def run_battery(loops: dict[str, LoopTable]) -> list[BatteryResult]:
    """Run every applicable check on every loop; never raises."""
    results = []
    for name, Q in loops.items():
        for check_name, guard, fn in CHECKS:
            try:
                if not guard(Q):
                    continue
            except Exception as exc:  # guard crash counts as failure
                results.append(BatteryResult(check_name, name, False, f"guard error: {exc}"))
                continue
            try:
                fn(Q)
            except _Failure as f:
                results.append(BatteryResult(check_name, name, False, f.detail))
            except Exception as exc:
                results.append(BatteryResult(check_name, name, False, f"error: {exc}"))
            else:
                results.append(BatteryResult(check_name, name, True))
    return results


def battery_table(results: list[BatteryResult]) -> str:
    """Render results as one line per (check, loop)."""
    width = max(len(r.check) for r in results) if results else 0
    lines = []
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        line = f"{r.check.ljust(width)}  {r.loop_name:>8}  {status}"
        if r.detail:
            line += f"  {r.detail}"
        lines.append(line)
    return "\n".join(lines)
