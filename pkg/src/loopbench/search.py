"""Backtracking Latin-square completion with constraint propagation.

Models an order-n loop as the (n-1) x (n-1) free block of a table whose
identity row and column are fixed.  Search is depth-first with
minimum-remaining-values cell selection; propagation combines row/column
all-different reasoning with two-way inference over ground instances of
the required identities (an instance whose value is pinned down on one
side forces, or refutes, the single open cell on the other side).

Every completed table is re-validated against the full requirements with
the ordinary checkers before it is emitted.
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass
from typing import Callable, Iterable, Optional

from .tables import LoopError, LoopTable
from .identities import (
    AAIP,
    AIP,
    ASSOCIATIVE,
    COMMUTATIVE,
    CUBE_IDENTITY,
    EXTRA,
    FLEXIBLE,
    LCC,
    LEFT_ALTERNATIVE,
    MOUFANG,
    RCC,
    RIGHT_ALTERNATIVE,
    SQUARE_IDENTITY,
    WIP,
    Identity,
    LDiv,
    LInv,
    Mul,
    One,
    RDiv,
    RInv,
    Var,
    check_identity,
    has_wip,
    is_cc,
    is_diassociative,
    is_pa,
    parse_identity,
)
from .structure import OrderTooLarge, center, is_isomorphic, nucleus


class Unsatisfiable(LoopError):
    def __init__(self, stats: "SearchStats"):
        self.stats = stats
        super().__init__("search space exhausted without finding a model")


class SearchTimeout(LoopError):
    def __init__(self, stats: "SearchStats"):
        self.stats = stats
        super().__init__("search hit its time budget without finding a model")


@dataclass
class SearchStats:
    nodes: int = 0
    propagations: int = 0
    models: int = 0
    wall_time: float = 0.0
    outcome: str = "exhausted"  # or "limit"

    def lines(self) -> list[str]:
        return [
            f"models = {self.models}",
            f"nodes = {self.nodes}",
            f"outcome = {self.outcome}",
            f"propagations = {self.propagations}",
            f"wall_time = {self.wall_time:.3f}",
        ]


@dataclass(frozen=True)
class SearchSpec:
    order: int
    require: tuple[str, ...] = ()
    forbid: tuple[str, ...] = ()
    limit: Optional[int] = None
    iso_reduce: bool = False
    seed: int = 0
    lexmin_row1: bool = False

    def __post_init__(self):
        if self.order < 1:
            raise LoopError("order must be at least 1")


_PA_NECESSARY = parse_identity("x^l = x^r")

# identities used to propagate each named property during search
_FLAG_IDENTITIES: dict[str, list[Identity]] = {
    "cc": [RCC, LCC],
    "pa": [_PA_NECESSARY],
    "wip": [WIP],
    "extra": [EXTRA],
    "moufang": [MOUFANG],
    "flexible": [FLEXIBLE],
    "left_alternative": [LEFT_ALTERNATIVE],
    "right_alternative": [RIGHT_ALTERNATIVE],
    "commutative": [COMMUTATIVE],
    "associative": [ASSOCIATIVE],
    "group": [ASSOCIATIVE],
    "aaip": [AAIP],
    "aip": [_PA_NECESSARY, AIP],
    "boolean_group": [ASSOCIATIVE, SQUARE_IDENTITY],
    "exponent2": [SQUARE_IDENTITY],
    "exponent3": [CUBE_IDENTITY],
    "nonassociative": [],
    "diassociative": [],
}


def _ident_holds(ident: Identity) -> Callable[[LoopTable], bool]:
    return lambda Q: check_identity(Q, ident).holds


# the authoritative per-table check for each named property
_FLAG_CHECKERS: dict[str, Callable[[LoopTable], bool]] = {
    "cc": is_cc,
    "pa": is_pa,
    "wip": has_wip,
    "extra": _ident_holds(EXTRA),
    "moufang": _ident_holds(MOUFANG),
    "flexible": _ident_holds(FLEXIBLE),
    "left_alternative": _ident_holds(LEFT_ALTERNATIVE),
    "right_alternative": _ident_holds(RIGHT_ALTERNATIVE),
    "commutative": _ident_holds(COMMUTATIVE),
    "associative": _ident_holds(ASSOCIATIVE),
    "group": _ident_holds(ASSOCIATIVE),
    "aaip": _ident_holds(AAIP),
    "aip": lambda Q: Q.rho() == Q.lam() and check_identity(Q, AIP).holds,
    "boolean_group": lambda Q: check_identity(Q, ASSOCIATIVE).holds
    and check_identity(Q, SQUARE_IDENTITY).holds,
    "exponent2": _ident_holds(SQUARE_IDENTITY),
    "exponent3": _ident_holds(CUBE_IDENTITY),
    "nonassociative": lambda Q: not check_identity(Q, ASSOCIATIVE).holds,
    "diassociative": lambda Q: is_diassociative(Q)[0],
}

_ALIASES = {"exponent_3": "exponent3", "exponent_2": "exponent2", "nonassoc": "nonassociative"}


def _normalize_flag(name: str) -> str:
    key = name.strip().lower().replace("-", "_")
    for prefix in ("is_", "has_"):
        if key.startswith(prefix):
            key = key[len(prefix):]
    return _ALIASES.get(key, key)


@dataclass
class _Compiled:
    prop_idents: list[Identity]
    leaf_requires: list[tuple[str, Callable[[LoopTable], bool]]]
    leaf_forbids: list[tuple[str, Callable[[LoopTable], bool]]]


def _compile(spec: SearchSpec) -> _Compiled:
    prop: list[Identity] = []
    reqs: list[tuple[str, Callable[[LoopTable], bool]]] = []
    forb: list[tuple[str, Callable[[LoopTable], bool]]] = []
    for raw in spec.require:
        if "=" in raw:
            ident = parse_identity(raw)
            prop.append(ident)
            reqs.append((raw, _ident_holds(ident)))
            continue
        key = _normalize_flag(raw)
        if key == "nonassociative":
            forb.append(("associative", _FLAG_CHECKERS["associative"]))
            continue
        if key not in _FLAG_CHECKERS:
            raise LoopError(f"unknown property {raw!r}")
        prop.extend(_FLAG_IDENTITIES[key])
        reqs.append((key, _FLAG_CHECKERS[key]))
    for raw in spec.forbid:
        if "=" in raw:
            ident = parse_identity(raw)
            forb.append((raw, _ident_holds(ident)))
            continue
        key = _normalize_flag(raw)
        if key not in _FLAG_CHECKERS:
            raise LoopError(f"unknown property {raw!r}")
        forb.append((key, _FLAG_CHECKERS[key]))
    # drop duplicate propagation identities, keeping first occurrences
    seen = set()
    unique = []
    for ident in prop:
        if ident not in seen:
            seen.add(ident)
            unique.append(ident)
    return _Compiled(unique, reqs, forb)


class _Conflict(Exception):
    pass


class _LimitHit(Exception):
    pass


class _Deadline(Exception):
    pass


class _Solver:
    def __init__(self, spec: SearchSpec, compiled: _Compiled, stats: SearchStats,
                 emit: Callable[[LoopTable], None], deadline: Optional[float] = None):
        self.spec = spec
        self.compiled = compiled
        self.stats = stats
        self.emit = emit
        self.deadline = deadline
        n = self.n = spec.order
        self.full = (1 << n) - 1
        self.val = [-1] * (n * n)
        self.dom = [self.full] * (n * n)
        self.rowpos = [[-1] * n for _ in range(n)]
        self.colpos = [[-1] * n for _ in range(n)]
        self.unassigned = n * n
        self.pending: list[tuple[int, int]] = []
        self.touched: set[int] = set()
        rng = random.Random(spec.seed)
        self.value_order = list(range(n))
        if spec.seed:
            rng.shuffle(self.value_order)

    # -- state plumbing ----------------------------------------------------

    def snapshot(self):
        return (self.val[:], self.dom[:],
                [r[:] for r in self.rowpos], [c[:] for c in self.colpos],
                self.unassigned)

    def restore(self, snap):
        self.val, self.dom, self.rowpos, self.colpos, self.unassigned = (
            snap[0][:], snap[1][:], [r[:] for r in snap[2]], [c[:] for c in snap[3]], snap[4])
        self.pending.clear()
        self.touched.clear()

    def assign(self, cell: int, v: int) -> None:
        cur = self.val[cell]
        if cur != -1:
            if cur != v:
                raise _Conflict
            return
        if not (self.dom[cell] >> v) & 1:
            raise _Conflict
        n = self.n
        r, c = divmod(cell, n)
        if self.rowpos[r][v] != -1 or self.colpos[c][v] != -1:
            raise _Conflict
        self.val[cell] = v
        self.dom[cell] = 1 << v
        self.rowpos[r][v] = c
        self.colpos[c][v] = r
        self.unassigned -= 1
        self.touched.update((r, c, v))
        mask = ~(1 << v)
        row_base = r * n
        for j in range(n):
            if j != c:
                idx = row_base + j
                d = self.dom[idx] & mask
                if d != self.dom[idx]:
                    if d == 0:
                        raise _Conflict
                    self.dom[idx] = d
                    if self.val[idx] == -1 and d & (d - 1) == 0:
                        self.pending.append((idx, d.bit_length() - 1))
        for i in range(n):
            if i != r:
                idx = i * n + c
                d = self.dom[idx] & mask
                if d != self.dom[idx]:
                    if d == 0:
                        raise _Conflict
                    self.dom[idx] = d
                    if self.val[idx] == -1 and d & (d - 1) == 0:
                        self.pending.append((idx, d.bit_length() - 1))

    def _drain(self) -> bool:
        made = False
        while self.pending:
            cell, v = self.pending.pop()
            if self.val[cell] == -1:
                self.assign(cell, v)
                self.stats.propagations += 1
                made = True
        return made

    def _hidden_singles(self) -> bool:
        """Assign values with a single remaining slot in a row or column."""
        n = self.n
        made = False
        for r in range(n):
            base = r * n
            for v in range(n):
                if self.rowpos[r][v] != -1:
                    continue
                slot, count = -1, 0
                for j in range(n):
                    if (self.dom[base + j] >> v) & 1 and self.val[base + j] == -1:
                        slot, count = base + j, count + 1
                        if count > 1:
                            break
                if count == 0:
                    raise _Conflict
                if count == 1:
                    self.assign(slot, v)
                    self.stats.propagations += 1
                    made = True
        for c in range(n):
            for v in range(n):
                if self.colpos[c][v] != -1:
                    continue
                slot, count = -1, 0
                for i in range(n):
                    idx = i * n + c
                    if (self.dom[idx] >> v) & 1 and self.val[idx] == -1:
                        slot, count = idx, count + 1
                        if count > 1:
                            break
                if count == 0:
                    raise _Conflict
                if count == 1:
                    self.assign(slot, v)
                    self.stats.propagations += 1
                    made = True
        return made

    # -- partial-table term evaluation --------------------------------------

    def _eval(self, t, env) -> int:
        """Value of a term on the partial table, or -1 if undetermined."""
        if type(t) is Var:
            return env[t.name]
        if type(t) is One:
            return 0
        if type(t) is Mul:
            a = self._eval(t.left, env)
            if a < 0:
                return -1
            b = self._eval(t.right, env)
            if b < 0:
                return -1
            return self.val[a * self.n + b]
        if type(t) is LDiv:
            a = self._eval(t.left, env)
            if a < 0:
                return -1
            b = self._eval(t.right, env)
            if b < 0:
                return -1
            return self.rowpos[a][b]
        if type(t) is RDiv:
            a = self._eval(t.left, env)
            if a < 0:
                return -1
            b = self._eval(t.right, env)
            if b < 0:
                return -1
            return self.colpos[b][a]
        if type(t) is LInv:
            a = self._eval(t.arg, env)
            return -1 if a < 0 else self.colpos[a][0]
        a = self._eval(t.arg, env)  # RInv
        return -1 if a < 0 else self.rowpos[a][0]

    def _infer(self, t, target: int, env) -> None:
        """Force term t to evaluate to target, assigning one open cell if possible."""
        known = self._eval(t, env)
        if known != -1:
            if known != target:
                raise _Conflict
            return
        n = self.n
        if type(t) is Mul:
            a = self._eval(t.left, env)
            b = self._eval(t.right, env)
            if a >= 0 and b >= 0:
                self.assign(a * n + b, target)
                self.stats.propagations += 1
            elif a >= 0:
                c = self.rowpos[a][target]
                if c != -1:
                    self._infer(t.right, c, env)
            elif b >= 0:
                r = self.colpos[b][target]
                if r != -1:
                    self._infer(t.left, r, env)
        elif type(t) is LDiv:
            a = self._eval(t.left, env)
            b = self._eval(t.right, env)
            if a >= 0 and b >= 0:
                self.assign(a * n + target, b)
                self.stats.propagations += 1
            elif a >= 0:
                w = self.val[a * n + target]
                if w != -1:
                    self._infer(t.right, w, env)
            elif b >= 0:
                r = self.colpos[target][b]
                if r != -1:
                    self._infer(t.left, r, env)
        elif type(t) is RDiv:
            a = self._eval(t.left, env)
            b = self._eval(t.right, env)
            if a >= 0 and b >= 0:
                self.assign(target * n + b, a)
                self.stats.propagations += 1
            elif b >= 0:
                w = self.val[target * n + b]
                if w != -1:
                    self._infer(t.left, w, env)
            elif a >= 0:
                c = self.rowpos[target][a]
                if c != -1:
                    self._infer(t.right, c, env)
        elif type(t) is LInv:
            a = self._eval(t.arg, env)
            if a >= 0:
                self.assign(target * n + a, 0)
                self.stats.propagations += 1
            else:
                c = self.rowpos[target][0]
                if c != -1:
                    self._infer(t.arg, c, env)
        elif type(t) is RInv:
            a = self._eval(t.arg, env)
            if a >= 0:
                self.assign(a * n + target, 0)
                self.stats.propagations += 1
            else:
                r = self.colpos[target][0]
                if r != -1:
                    self._infer(t.arg, r, env)
        elif type(t) is One:
            if target != 0:
                raise _Conflict

    def _check_instance(self, ident: Identity, env) -> None:
        lv = self._eval(ident.lhs, env)
        rv = self._eval(ident.rhs, env)
        if lv >= 0 and rv >= 0:
            if lv != rv:
                raise _Conflict
        elif lv >= 0:
            self._infer(ident.rhs, lv, env)
        elif rv >= 0:
            self._infer(ident.lhs, rv, env)

    def _identity_pass(self, full: bool) -> None:
        if not self.compiled.prop_idents:
            self.touched.clear()
            return
        n = self.n
        marks = None if full else self.touched
        self.touched = set()
        for ident in self.compiled.prop_idents:
            k = len(ident.vars)
            env = dict.fromkeys(ident.vars, 0)
            if full or (marks is not None and len(marks) >= n):
                for assignment in _assignments(n, k):
                    for name, value in zip(ident.vars, assignment):
                        env[name] = value
                    self._check_instance(ident, env)
            else:
                seen = set()
                for pos in range(k):
                    for t in marks:
                        for rest in _assignments(n, k - 1):
                            assignment = rest[:pos] + (t,) + rest[pos:]
                            if assignment in seen:
                                continue
                            seen.add(assignment)
                            for name, value in zip(ident.vars, assignment):
                                env[name] = value
                            self._check_instance(ident, env)

    def propagate(self, full_scan: bool) -> None:
        first = full_scan
        while True:
            self._drain()
            if self._hidden_singles():
                continue
            if self.pending:
                continue
            before = self.unassigned
            self._identity_pass(full=first)
            first = False
            if self.pending or self.unassigned != before:
                continue
            if self.touched:
                continue
            break
        if self.spec.lexmin_row1:
            self._lexmin_guard()

    def _lexmin_guard(self) -> None:
        """Fail once some later row is provably lex-less than row 1."""
        n = self.n
        for r in range(2, n):
            for j in range(n):
                a, b = self.val[n + j], self.val[r * n + j]
                if a == -1 or b == -1 or a == b:
                    if a == -1 or b == -1:
                        break
                    continue
                if b < a:
                    raise _Conflict
                break

    # -- the search itself ----------------------------------------------------

    def solve(self) -> None:
        n = self.n
        try:
            for i in range(n):
                self.assign(i, i)
                if i:
                    self.assign(i * n, i)
            self.propagate(full_scan=True)
        except _Conflict:
            return
        self._dfs()

    def _choose_cell(self) -> int:
        best, best_count = -1, 1 << 62
        for cell in range(self.n * self.n):
            if self.val[cell] == -1:
                count = self.dom[cell].bit_count()
                if count < best_count:
                    best, best_count = cell, count
                    if count <= 2:
                        break
        return best

    def _dfs(self) -> None:
        if self.unassigned == 0:
            self._leaf()
            return
        cell = self._choose_cell()
        self.stats.nodes += 1
        if self.deadline is not None and self.stats.nodes % 256 == 0 and time.perf_counter() > self.deadline:
            raise _Deadline
        dom = self.dom[cell]
        snap = self.snapshot()
        for v in self.value_order:
            if not (dom >> v) & 1:
                continue
            try:
                self.assign(cell, v)
                self.propagate(full_scan=False)
            except _Conflict:
                self.restore(snap)
                continue
            self._dfs()
            self.restore(snap)

    def _leaf(self) -> None:
        n = self.n
        Q = LoopTable([self.val[r * n:(r + 1) * n] for r in range(n)])
        if self.spec.lexmin_row1 and n > 2:
            row1 = Q.rows[1]
            if any(Q.rows[r] < row1 for r in range(2, n)):
                return
        for _, checker in self.compiled.leaf_requires:
            if not checker(Q):
                return
        for _, checker in self.compiled.leaf_forbids:
            if checker(Q):
                return
        self.emit(Q)


def _assignments(n: int, k: int):
    if k == 0:
        yield ()
        return
    yield from itertools.product(range(n), repeat=k)


def find_models(spec: SearchSpec, max_constrained_order: int = 32,
                time_limit: Optional[float] = None) -> tuple[list[LoopTable], SearchStats]:
    """Enumerate loop tables satisfying the spec, depth-first.

    Exhaustive up to the applied symmetry breaking (identity row/column
    always fixed; optionally the lex-min first-row constraint).  Raises
    Unsatisfiable when the space is exhausted with no model; otherwise the
    stats record whether the enumeration completed or stopped at the limit.
    An optional wall-clock budget aborts with SearchTimeout if nothing was
    found in time (models found before the deadline are returned normally).
    """
    if (spec.require or spec.forbid) and spec.order > max_constrained_order:
        raise OrderTooLarge(spec.order, max_constrained_order)
    compiled = _compile(spec)
    stats = SearchStats()
    models: list[LoopTable] = []
    limit = spec.limit

    def emit(Q: LoopTable):
        models.append(Q)
        stats.models += 1
        if limit is not None and stats.models >= limit:
            raise _LimitHit

    start = time.perf_counter()
    deadline = None if time_limit is None else start + time_limit
    solver = _Solver(spec, compiled, stats, emit, deadline)
    try:
        solver.solve()
    except _LimitHit:
        stats.outcome = "limit"
    except _Deadline:
        stats.outcome = "deadline"
    stats.wall_time = time.perf_counter() - start
    if not models:
        if stats.outcome == "deadline":
            raise SearchTimeout(stats)
        raise Unsatisfiable(stats)
    if spec.iso_reduce:
        models = iso_reduce(models)
        stats.models = len(models)
    return models, stats


# -- isomorphism reduction ------------------------------------------------------

def _invariant_key(Q: LoopTable):
    from .structure import _order_profile

    return (Q.n, tuple(sorted(_order_profile(Q))), len(nucleus(Q)), len(center(Q)))


def iso_reduce(models: Iterable[LoopTable]) -> list[LoopTable]:
    """One representative per isomorphism class: the lex-least table seen.

    Classes are bucketed by cheap invariants first; within a bucket the
    full backtracking isomorphism test decides membership.
    """
    classes: list[tuple[object, list[LoopTable]]] = []
    for Q in models:
        key = _invariant_key(Q)
        for ckey, members in classes:
            if ckey == key and is_isomorphic(members[0], Q) is not None:
                members.append(Q)
                break
        else:
            classes.append((key, [Q]))
    out = [min(members, key=lambda Q: Q.rows) for _, members in classes]
    return out


# -- spec files -------------------------------------------------------------------

def parse_spec_file(text: str) -> SearchSpec:
    """Parse 'key = value' lines (order, require, forbid, limit, iso_reduce, seed).

    Values of require/forbid are comma-separated; entries containing '='
    are identities in the DSL.  '#' starts a comment.
    """
    fields: dict[str, object] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise LoopError(f"line {lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        key = key.strip().lower()
        value = value.strip()
        if key == "order":
            fields["order"] = int(value)
        elif key in ("require", "forbid"):
            items = tuple(s.strip() for s in value.split(",") if s.strip())
            fields[key] = items
        elif key == "limit":
            fields["limit"] = None if value.lower() in ("", "none") else int(value)
        elif key == "iso_reduce":
            fields["iso_reduce"] = value.lower() in ("1", "true", "yes", "on")
        elif key == "lexmin_row1":
            fields["lexmin_row1"] = value.lower() in ("1", "true", "yes", "on")
        elif key == "seed":
            fields["seed"] = int(value)
        else:
            raise LoopError(f"line {lineno}: unknown key {key!r}")
    if "order" not in fields:
        raise LoopError("spec file needs an order")
    return SearchSpec(**fields)  # type: ignore[arg-type]
