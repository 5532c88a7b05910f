"""Universally quantified loop identities: a small term DSL plus checkers.

Grammar (whitespace is ignored):

    identity := expr '=' expr
    expr     := term (('\\' | '/') term)*        left-associative
    term     := factor ('*' factor)*             left-associative
    factor   := atom ('^l' | '^r')*              postfix inverse maps
    atom     := variable | '1' | '(' expr ')'
    variable := [a-z]+

Precedence from tightest to loosest: postfix, '*', then '\\' and '/'.
``x^l`` is the left inverse 1/x and ``x^r`` the right inverse x\\1.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Optional, Union

from .tables import LoopError, LoopTable, Perm


class ParseError(LoopError):
    def __init__(self, position: int, expected: set[str], found: str):
        self.position = position
        self.expected = frozenset(expected)
        self.found = found
        opts = ", ".join(sorted(expected))
        super().__init__(f"at position {position}: expected {opts}, found {found}")


class TooManyVariables(LoopError):
    def __init__(self, count: int, order: int, limit: int):
        self.count, self.order, self.limit = count, order, limit
        super().__init__(f"{order}^{count} assignments exceeds the limit {limit}")


# -- abstract syntax ---------------------------------------------------------

@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class One:
    pass


@dataclass(frozen=True)
class Mul:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class LDiv:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class RDiv:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class LInv:
    arg: "Term"


@dataclass(frozen=True)
class RInv:
    arg: "Term"


Term = Union[Var, One, Mul, LDiv, RDiv, LInv, RInv]


@dataclass(frozen=True)
class Identity:
    lhs: Term
    rhs: Term
    vars: tuple[str, ...]

    def __str__(self) -> str:
        return f"{print_term(self.lhs)} = {print_term(self.rhs)}"


def term_vars(t: Term, acc: list[str]) -> None:
    if isinstance(t, Var):
        if t.name not in acc:
            acc.append(t.name)
    elif isinstance(t, (Mul, LDiv, RDiv)):
        term_vars(t.left, acc)
        term_vars(t.right, acc)
    elif isinstance(t, (LInv, RInv)):
        term_vars(t.arg, acc)


# -- parser ------------------------------------------------------------------

_TOKENS = ("*", "\\", "/", "(", ")", "=", "^l", "^r", "1")


def _tokenize(src: str) -> list[tuple[str, int, str]]:
    """Yield (kind, position, text); kind is one of the tokens or 'var'."""
    out = []
    i = 0
    while i < len(src):
        c = src[i]
        if c.isspace():
            i += 1
            continue
        if c in "*\\/()=":
            out.append((c, i, c))
            i += 1
        elif c == "1":
            out.append(("1", i, c))
            i += 1
        elif c == "^":
            if i + 1 < len(src) and src[i + 1] in "lr":
                out.append(("^" + src[i + 1], i, src[i : i + 2]))
                i += 2
            else:
                raise ParseError(i + 1, {"l", "r"}, src[i + 1] if i + 1 < len(src) else "end of input")
        elif c.isalpha() and c.islower():
            j = i
            while j < len(src) and src[j].isalpha() and src[j].islower():
                j += 1
            out.append(("var", i, src[i:j]))
            i = j
        else:
            raise ParseError(i, {"variable", "1", "("}, repr(c))
    out.append(("end", len(src), "end of input"))
    return out


class _Parser:
    def __init__(self, src: str):
        self.tokens = _tokenize(src)
        self.pos = 0

    def peek(self) -> tuple[str, int, str]:
        return self.tokens[self.pos]

    def take(self, *kinds: str) -> tuple[str, int, str]:
        tok = self.tokens[self.pos]
        if tok[0] not in kinds:
            raise ParseError(tok[1], set(kinds), tok[2])
        self.pos += 1
        return tok

    def atom(self) -> Term:
        kind, pos, text = self.peek()
        if kind == "var":
            self.take("var")
            return Var(text)
        if kind == "1":
            self.take("1")
            return One()
        if kind == "(":
            self.take("(")
            t = self.expr()
            self.take(")")
            return t
        raise ParseError(pos, {"variable", "1", "("}, text)

    def factor(self) -> Term:
        t = self.atom()
        while self.peek()[0] in ("^l", "^r"):
            kind, _, _ = self.take("^l", "^r")
            t = LInv(t) if kind == "^l" else RInv(t)
        return t

    def term(self) -> Term:
        t = self.factor()
        while self.peek()[0] == "*":
            self.take("*")
            t = Mul(t, self.factor())
        return t

    def expr(self) -> Term:
        t = self.term()
        while self.peek()[0] in ("\\", "/"):
            kind, _, _ = self.take("\\", "/")
            rhs = self.term()
            t = LDiv(t, rhs) if kind == "\\" else RDiv(t, rhs)
        return t

    def identity(self) -> Identity:
        lhs = self.expr()
        self.take("=")
        rhs = self.expr()
        self.take("end")
        names: list[str] = []
        term_vars(lhs, names)
        term_vars(rhs, names)
        return Identity(lhs, rhs, tuple(names))


def parse_identity(src: str) -> Identity:
    """Parse 'lhs = rhs' in the DSL; vars are ordered by first occurrence."""
    return _Parser(src).identity()


def parse_term(src: str) -> Term:
    p = _Parser(src)
    t = p.expr()
    p.take("end")
    return t


# -- printer -----------------------------------------------------------------

_LEVEL_DIV, _LEVEL_MUL, _LEVEL_POST = 0, 1, 2


def _print(t: Term, level: int) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, One):
        return "1"
    if isinstance(t, LInv):
        return _print(t.arg, _LEVEL_POST + 1) + "^l"
    if isinstance(t, RInv):
        return _print(t.arg, _LEVEL_POST + 1) + "^r"
    if isinstance(t, Mul):
        s = _print(t.left, _LEVEL_MUL) + "*" + _print(t.right, _LEVEL_MUL + 1)
        own = _LEVEL_MUL
    else:
        op = "\\" if isinstance(t, LDiv) else "/"
        s = _print(t.left, _LEVEL_DIV) + op + _print(t.right, _LEVEL_DIV + 1)
        own = _LEVEL_DIV
    return "(" + s + ")" if own < level else s


def print_term(t: Term) -> str:
    """Minimal-parentheses form; parse_term(print_term(t)) == t."""
    return _print(t, _LEVEL_DIV)


# -- evaluation and checking --------------------------------------------------

def eval_term(Q: LoopTable, t: Term, env: dict[str, int]) -> int:
    if isinstance(t, Var):
        return env[t.name]
    if isinstance(t, One):
        return 0
    if isinstance(t, Mul):
        return Q.mul(eval_term(Q, t.left, env), eval_term(Q, t.right, env))
    if isinstance(t, LDiv):
        return Q.ldiv(eval_term(Q, t.left, env), eval_term(Q, t.right, env))
    if isinstance(t, RDiv):
        return Q.rdiv(eval_term(Q, t.left, env), eval_term(Q, t.right, env))
    if isinstance(t, LInv):
        return Q.lam()(eval_term(Q, t.arg, env))
    return Q.rho()(eval_term(Q, t.arg, env))


@dataclass(frozen=True)
class CheckResult:
    holds: bool
    witness: Optional[tuple[int, ...]]  # lexicographically least violation

    def __bool__(self) -> bool:
        return self.holds


DEFAULT_CASE_LIMIT = 10**9


def check_identity(Q: LoopTable, ident: Identity, case_limit: int = DEFAULT_CASE_LIMIT) -> CheckResult:
    """Check a universally quantified identity by plain enumeration.

    Returns the lexicographically least violating assignment when it fails.
    """
    k = len(ident.vars)
    if Q.n ** k > case_limit:
        raise TooManyVariables(k, Q.n, case_limit)
    env: dict[str, int] = {}
    for assignment in itertools.product(Q.elements(), repeat=k):
        for name, value in zip(ident.vars, assignment):
            env[name] = value
        if eval_term(Q, ident.lhs, env) != eval_term(Q, ident.rhs, env):
            return CheckResult(False, assignment)
    return CheckResult(True, None)


# -- the named identities used throughout -------------------------------------

RCC = parse_identity("x*(y*z) = ((x*y)/x)*(x*z)")
LCC = parse_identity("(z*y)*x = (z*x)*(x\\(y*x))")
ASSOCIATIVE = parse_identity("(x*y)*z = x*(y*z)")
COMMUTATIVE = parse_identity("x*y = y*x")
FLEXIBLE = parse_identity("x*(y*x) = (x*y)*x")
LEFT_ALTERNATIVE = parse_identity("x*(x*y) = (x*x)*y")
RIGHT_ALTERNATIVE = parse_identity("(x*y)*y = x*(y*y)")
MOUFANG = parse_identity("(z*x)*(y*z) = (z*(x*y))*z")
EXTRA = parse_identity("x*(y*(z*x)) = ((x*y)*z)*x")
AAIP = parse_identity("(x*y)^r = y^r*x^r")
AIP = parse_identity("(x*y)^r = x^r*y^r")
WIP = parse_identity("(y^l*c)^r = c\\y")
SQUARE_IDENTITY = parse_identity("x*x = 1")
CUBE_IDENTITY = parse_identity("(x*x)*x = 1")

NAMED_IDENTITIES: dict[str, Identity] = {
    "rcc": RCC,
    "lcc": LCC,
    "associative": ASSOCIATIVE,
    "commutative": COMMUTATIVE,
    "flexible": FLEXIBLE,
    "left_alternative": LEFT_ALTERNATIVE,
    "right_alternative": RIGHT_ALTERNATIVE,
    "moufang": MOUFANG,
    "extra": EXTRA,
    "aaip": AAIP,
    "aip": AIP,
    "wip": WIP,
    "exponent2": SQUARE_IDENTITY,
    "exponent3": CUBE_IDENTITY,
}


# -- property predicates -------------------------------------------------------

def _cached(Q: LoopTable, key: str, compute):
    cache = Q._cache
    if key not in cache:
        cache[key] = compute()
    return cache[key]


def _is_cc_definitional(Q: LoopTable) -> tuple[bool, Optional[tuple]]:
    n = Q.n
    rows = Q.rows
    for x in range(n):
        row_x = rows[x]
        for y in range(n):
            f = Q.rdiv(row_x[y], x)
            row_f = rows[f]
            row_y = rows[y]
            for z in range(n):
                if row_x[row_y[z]] != row_f[row_x[z]]:
                    return False, ("rcc", x, y, z)
    for x in range(n):
        col_x = Q.cols[x]
        for y in range(n):
            g = Q.ldiv(x, rows[y][x])
            col_g = Q.cols[g]
            for z in range(n):
                if col_x[rows[z][y]] != col_g[rows[z][x]]:
                    return False, ("lcc", x, y, z)
    return True, None


def _is_cc_conjugation(Q: LoopTable) -> bool:
    n = Q.n
    if n > 64:
        return _is_cc_conjugation_numpy(Q)
    rowset = set(Q.rows)
    colset = set(Q.cols)
    for x in range(n):
        lx = Q.left(x)
        lxi = lx.inv()
        rx = Q.right(x)
        rxi = rx.inv()
        for y in range(n):
            if tuple(lxi * Q.left(y) * lx) not in rowset:
                return False
            if tuple(rxi * Q.right(y) * rx) not in colset:
                return False
    return True


def _is_cc_conjugation_numpy(Q: LoopTable) -> bool:
    import numpy as np

    T = Q.asarray()
    n = Q.n
    rowset = {row.tobytes() for row in T}
    colset = {col.tobytes() for col in np.ascontiguousarray(T.T)}
    Tt = np.ascontiguousarray(T.T)
    for x in range(n):
        lx = T[x]
        lxi = np.argsort(lx)
        conj = T[:, lxi]          # conj[y] = L_y after L_x^-1
        conj = lx[conj]           # then L_x; rows are L_x^-1 L_y L_x
        for y in range(n):
            if conj[y].tobytes() not in rowset:
                return False
        rx = Tt[x]
        rxi = np.argsort(rx)
        conjr = Tt[:, rxi]
        conjr = rx[conjr]
        for y in range(n):
            if conjr[y].tobytes() not in colset:
                return False
    return True


def is_cc(Q: LoopTable) -> bool:
    """Conjugacy closedness, via the defining identities.

    The translation-conjugation characterization is computed independently
    and the two answers are required to agree.
    """
    def compute():
        if Q.n > 64:
            direct = _is_cc_definitional_numpy(Q)
        else:
            direct, _ = _is_cc_definitional(Q)
        conj = _is_cc_conjugation(Q)
        if direct != conj:
            raise AssertionError("CC checks disagree; table or code is corrupt")
        return direct

    return _cached(Q, "is_cc", compute)


def _is_cc_definitional_numpy(Q: LoopTable) -> bool:
    import numpy as np

    T = Q.asarray()
    n = Q.n
    idx = np.arange(n)
    # rdivpos[x][v] = z with z*x = v, i.e. positions within column x
    colpos = np.empty((n, n), dtype=np.int32)
    for x in range(n):
        colpos[x, T[:, x]] = idx
    rowpos = np.empty((n, n), dtype=np.int32)
    for x in range(n):
        rowpos[x, T[x]] = idx
    for x in range(n):
        f = colpos[x][T[x]]            # f[y] = (x*y)/x
        lhs = T[x][T]                  # lhs[y,z] = x*(y*z)
        rhs = T[f][:, T[x]]            # rhs[y,z] = f(x,y)*(x*z)
        if not np.array_equal(lhs, rhs):
            return False
        g = rowpos[x][T[:, x]]         # g[y] = x\(y*x)
        left = T[T, x]                 # left[z,y] = (z*y)*x
        zx = T[:, x]                    # zx[z] = z*x
        right = T[zx[:, None], g[None, :]]  # right[z,y] = (z*x)*g(x,y)
        if not np.array_equal(left, right):
            return False
    return True


def is_cc_witness(Q: LoopTable) -> Optional[tuple]:
    """First violating (side, x, y, z) of the CC identities, or None."""
    _, witness = _is_cc_definitional(Q)
    return witness


def is_pa_element(Q: LoopTable, a: int) -> bool:
    """Whether <a> is a group.

    The ground truth is closure plus an associativity scan; for CC tables
    the inverse-agreement shortcut is also evaluated and must agree.
    """
    from .structure import generate_subloop

    members = generate_subloop(Q, {a}).members
    sub = sorted(members)
    general = True
    for x in sub:
        if not general:
            break
        for y in sub:
            if not general:
                break
            for z in sub:
                if Q.mul(Q.mul(x, y), z) != Q.mul(x, Q.mul(y, z)):
                    general = False
                    break
    if is_cc(Q):
        fast = Q.rho()(a) == Q.lam()(a)
        if fast != general:
            raise AssertionError(f"PA shortcut disagrees with closure check at {a}")
    return general


def is_pa(Q: LoopTable) -> bool:
    return _cached(Q, "is_pa", lambda: all(is_pa_element(Q, a) for a in Q.elements()))


def pa_witness(Q: LoopTable) -> Optional[tuple[int]]:
    for a in Q.elements():
        if not is_pa_element(Q, a):
            return (a,)
    return None


def is_diassociative(Q: LoopTable) -> tuple[bool, Optional[tuple]]:
    """Whether every 2-generated subloop is a group.

    On failure returns ((x, y), (a, b, c)) with (a, b, c) an associativity
    violation inside <x, y>.
    """
    from .structure import generate_subloop

    if is_group(Q):
        return True, None
    for x in Q.elements():
        for y in range(x, Q.n):
            members = sorted(generate_subloop(Q, {x, y}).members)
            for a in members:
                for b in members:
                    ab = Q.mul(a, b)
                    for c in members:
                        if Q.mul(ab, c) != Q.mul(a, Q.mul(b, c)):
                            return False, ((x, y), (a, b, c))
    return True, None


def wip_elements(Q: LoopTable) -> frozenset[int]:
    """Elements c with lam . R_c . rho = L_c^-1.

    All four equivalent phrasings of the condition are computed and must
    agree pointwise before an element is admitted.
    """
    def compute():
        lam, rho = Q.lam(), Q.rho()
        out = set()
        for c in Q.elements():
            lc, rc = Q.left(c), Q.right(c)
            forms = (
                lam * rc * rho == lc.inv(),
                rho * lc * lam == rc.inv(),
                rc * rho * lc == rho,
                lc * lam * rc == lam,
            )
            if any(forms) != all(forms):
                raise AssertionError(f"WIP forms disagree at {c}")
            if forms[0]:
                out.add(c)
        return frozenset(out)

    return _cached(Q, "wip_elements", compute)


def has_wip(Q: LoopTable) -> bool:
    return len(wip_elements(Q)) == Q.n


def is_group(Q: LoopTable) -> bool:
    return _cached(Q, "is_group", lambda: bool(check_identity(Q, ASSOCIATIVE)))


@dataclass(frozen=True)
class PropertyReport:
    """Named property flags plus a re-checkable witness for each false flag.

    Witness shapes: identity-backed flags carry the least violating variable
    assignment of their defining identity; is_pa carries (element,);
    is_diassociative carries ((x, y), (a, b, c)); has_wip carries (c,);
    is_cc carries (side, x, y, z).
    """

    flags: dict[str, bool]
    witnesses: dict[str, tuple]

    def __getattr__(self, name: str) -> bool:
        try:
            return self.flags[name]
        except KeyError:
            raise AttributeError(name) from None

    def lines(self) -> list[str]:
        return [f"{k} = {'yes' if v else 'no'}" for k, v in sorted(self.flags.items())]


def classify(Q: LoopTable) -> PropertyReport:
    """Evaluate every named property of the table."""
    flags: dict[str, bool] = {}
    wit: dict[str, tuple] = {}

    def ident_flag(name: str, ident: Identity):
        res = check_identity(Q, ident)
        flags[name] = res.holds
        if not res.holds:
            wit[name] = res.witness

    flags["is_loop"] = True  # construction enforces the loop axioms
    ident_flag("is_group", ASSOCIATIVE)
    ident_flag("is_commutative", COMMUTATIVE)
    ident_flag("is_flexible", FLEXIBLE)
    ident_flag("is_left_alt", LEFT_ALTERNATIVE)
    ident_flag("is_right_alt", RIGHT_ALTERNATIVE)
    ident_flag("is_moufang", MOUFANG)
    ident_flag("has_aaip", AAIP)

    cc = is_cc(Q)
    flags["is_cc"] = cc
    if not cc:
        wit["is_cc"] = is_cc_witness(Q)

    pa = is_pa(Q)
    flags["is_pa"] = pa
    if not pa:
        wit["is_pa"] = pa_witness(Q)

    dia, dwit = is_diassociative(Q)
    flags["is_diassociative"] = dia
    if not dia:
        wit["is_diassociative"] = dwit

    wips = wip_elements(Q)
    flags["has_wip"] = len(wips) == Q.n
    if not flags["has_wip"]:
        c = min(set(Q.elements()) - wips)
        wit["has_wip"] = (c,)

    # AIP: rho = lambda and J = rho is an automorphism
    if Q.rho() == Q.lam():
        res = check_identity(Q, AIP)
        flags["has_aip"] = res.holds
        if not res.holds:
            wit["has_aip"] = res.witness
    else:
        flags["has_aip"] = False
        rho, lam = Q.rho(), Q.lam()
        y = next(y for y in Q.elements() if rho(y) != lam(y))
        wit["has_aip"] = (y,)

    # extra = the Fenyves identity; must equal cc & moufang on CC tables
    res = check_identity(Q, EXTRA)
    flags["is_extra"] = res.holds
    if not res.holds:
        wit["is_extra"] = res.witness
    if cc and flags["is_extra"] != (cc and flags["is_moufang"]):
        raise AssertionError("extra-loop characterizations disagree on a CC table")

    if flags["is_group"]:
        res = check_identity(Q, SQUARE_IDENTITY)
        flags["is_boolean_group"] = res.holds
        if not res.holds:
            wit["is_boolean_group"] = res.witness
    else:
        flags["is_boolean_group"] = False
        wit["is_boolean_group"] = wit["is_group"]

    return PropertyReport(flags, wit)
