"""Finite loops as Cayley tables, plus the permutation calculus on them.

Conventions used everywhere in this package:

* Element 0 is the two-sided identity of every table.
* Permutations act on the right.  ``p * q`` means "apply p, then q",
  so ``(p * q)(x) == q(p(x))``.  Operator chains read left to right,
  e.g. ``Q.right(x) * Q.right(Q.rho()(x))`` applies R_x first.
"""

from __future__ import annotations

import itertools
from typing import Iterable, Iterator, Sequence

import numpy as np


class LoopError(ValueError):
    """Base class for everything this package raises on bad input."""


class OutOfRange(LoopError):
    def __init__(self, row: int, col: int, value):
        self.row, self.col, self.value = row, col, value
        super().__init__(f"entry ({row},{col}) = {value!r} is not an integer in range")


class NotLatinSquare(LoopError):
    def __init__(self, axis: str, index: int, value: int):
        self.axis, self.index, self.value = axis, index, value
        super().__init__(f"{axis} {index} repeats value {value}")


class NoIdentity(LoopError):
    def __init__(self, witness: int):
        self.witness = witness
        super().__init__(f"element 0 is not a two-sided identity (witness {witness})")


class NotPowerAssociative(LoopError):
    def __init__(self, element: int):
        self.element = element
        super().__init__(f"left and right powers of {element} disagree")


class TableFormatError(LoopError):
    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")


class Perm(tuple):
    """A permutation of 0..n-1 stored as its image tuple.

    Acts on the right: ``p * q`` applies p first, then q.
    """

    __slots__ = ()

    @classmethod
    def identity(cls, n: int) -> "Perm":
        return cls(range(n))

    def __call__(self, x: int) -> int:
        return self[x]

    def __mul__(self, other: "Perm") -> "Perm":  # type: ignore[override]
        return Perm(other[v] for v in self)

    def __rmul__(self, other):  # pragma: no cover - symmetry with __mul__
        return NotImplemented

    def inv(self) -> "Perm":
        out = [0] * len(self)
        for i, v in enumerate(self):
            out[v] = i
        return Perm(out)

    def __pow__(self, k: int) -> "Perm":  # type: ignore[override]
        if k < 0:
            return self.inv() ** (-k)
        result = Perm.identity(len(self))
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def is_identity(self) -> bool:
        return all(i == v for i, v in enumerate(self))

    def commutes_with(self, other: "Perm") -> bool:
        return self * other == other * self

    def cycles(self) -> list[tuple[int, ...]]:
        """Nontrivial cycles, each rotated to start at its least element."""
        seen = [False] * len(self)
        out = []
        for i in range(len(self)):
            if seen[i] or self[i] == i:
                continue
            cyc = [i]
            seen[i] = True
            j = self[i]
            while j != i:
                seen[j] = True
                cyc.append(j)
                j = self[j]
            out.append(tuple(cyc))
        return out

    def __repr__(self) -> str:
        cycs = self.cycles()
        if not cycs:
            return "Perm(id)"
        return "Perm" + "".join("(" + " ".join(map(str, c)) + ")" for c in cycs)


def _check_perm_of_range(values: Sequence[int], n: int) -> int | None:
    """Return a repeated value if ``values`` is not a permutation of 0..n-1."""
    seen = [False] * n
    for v in values:
        if seen[v]:
            return v
        seen[v] = True
    return None


class LoopTable:
    """An order-n loop: an n x n Latin square over 0..n-1 with identity 0.

    Instances are immutable once constructed; every analysis in this
    package is a pure function of the table, so tables are safe to share
    across threads.  Entry ``rows[i][j]`` is the product i*j.
    """

    __slots__ = ("n", "rows", "_cols", "_ldiv", "_rdiv", "_np", "_lam", "_rho", "_cache")

    def __init__(self, rows: Iterable[Iterable[int]]):
        grid = tuple(tuple(row) for row in rows)
        n = len(grid)
        if n == 0:
            raise TableFormatError(0, "empty table")
        for i, row in enumerate(grid):
            if len(row) != n:
                raise TableFormatError(i + 1, f"row {i} has {len(row)} entries, expected {n}")
            for j, v in enumerate(row):
                if not isinstance(v, int) or isinstance(v, bool) or not (0 <= v < n):
                    raise OutOfRange(i, j, v)
        for i, row in enumerate(grid):
            dup = _check_perm_of_range(row, n)
            if dup is not None:
                raise NotLatinSquare("row", i, dup)
        for j in range(n):
            dup = _check_perm_of_range([grid[i][j] for i in range(n)], n)
            if dup is not None:
                raise NotLatinSquare("column", j, dup)
        for i in range(n):
            if grid[0][i] != i or grid[i][0] != i:
                raise NoIdentity(i)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "rows", grid)
        object.__setattr__(self, "_cols", None)
        object.__setattr__(self, "_ldiv", None)
        object.__setattr__(self, "_rdiv", None)
        object.__setattr__(self, "_np", None)
        object.__setattr__(self, "_lam", None)
        object.__setattr__(self, "_rho", None)
        object.__setattr__(self, "_cache", {})

    def __setattr__(self, name, value):
        raise AttributeError("LoopTable is immutable")

    # -- basic operations -------------------------------------------------

    def elements(self) -> range:
        return range(self.n)

    def mul(self, x: int, y: int) -> int:
        return self.rows[x][y]

    @property
    def cols(self) -> tuple[tuple[int, ...], ...]:
        if self._cols is None:
            object.__setattr__(self, "_cols", tuple(zip(*self.rows)))
        return self._cols

    def _ldiv_table(self) -> tuple[tuple[int, ...], ...]:
        # ldiv[x][y] = z with x*z = y, i.e. the position of y in row x
        if self._ldiv is None:
            tab = []
            for row in self.rows:
                pos = [0] * self.n
                for z, v in enumerate(row):
                    pos[v] = z
                tab.append(tuple(pos))
            object.__setattr__(self, "_ldiv", tuple(tab))
        return self._ldiv

    def _rdiv_table(self) -> tuple[tuple[int, ...], ...]:
        # rdiv[x][y] = z with z*y = x, i.e. the position of x in column y
        if self._rdiv is None:
            tab = [[0] * self.n for _ in range(self.n)]
            for z, row in enumerate(self.rows):
                for y, v in enumerate(row):
                    tab[v][y] = z
            object.__setattr__(self, "_rdiv", tuple(tuple(r) for r in tab))
        return self._rdiv

    def ldiv(self, x: int, y: int) -> int:
        """x \\ y: the unique z with x*z = y."""
        return self._ldiv_table()[x][y]

    def rdiv(self, x: int, y: int) -> int:
        """x / y: the unique z with z*y = x."""
        return self._rdiv_table()[x][y]

    def asarray(self) -> np.ndarray:
        if self._np is None:
            arr = np.array(self.rows, dtype=np.int32)
            arr.setflags(write=False)
            object.__setattr__(self, "_np", arr)
        return self._np

    # -- translations and derived permutations ----------------------------

    def left(self, x: int) -> Perm:
        """L_x: y -> x*y (row x)."""
        return Perm(self.rows[x])

    def right(self, x: int) -> Perm:
        """R_x: y -> y*x (column x)."""
        return Perm(self.cols[x])

    def lam(self) -> Perm:
        """The left inverse map: y -> 1/y (the z with z*y = identity)."""
        if self._lam is None:
            object.__setattr__(self, "_lam", Perm(self.rdiv(0, y) for y in self.elements()))
        return self._lam

    def rho(self) -> Perm:
        """The right inverse map: y -> y\\1 (the z with y*z = identity)."""
        if self._rho is None:
            object.__setattr__(self, "_rho", Perm(self.ldiv(y, 0) for y in self.elements()))
        return self._rho

    def d_map(self, x: int) -> Perm:
        """D_x: y -> y\\x."""
        return Perm(self.ldiv(y, x) for y in self.elements())

    def fg(self, x: int) -> tuple[Perm, Perm]:
        """The conjugation-like maps F_x, G_x: F_x(y) = (xy)/x, G_x(y) = x\\(yx)."""
        f = Perm(self.rdiv(self.mul(x, y), x) for y in self.elements())
        g = Perm(self.ldiv(x, self.mul(y, x)) for y in self.elements())
        return f, g

    def e_map(self, x: int) -> Perm:
        """E_x = R_x R_{x^rho} (apply R_x first)."""
        return self.right(x) * self.right(self.rho()(x))

    def t_map(self, x: int) -> Perm:
        """T_x = R_x L_x^-1."""
        return self.right(x) * self.left(x).inv()

    # -- powers ------------------------------------------------------------

    def left_order(self, x: int) -> int:
        """Length of the R_x-orbit of the identity (left-bracketed powers)."""
        m, cur = 1, self.mul(0, x)
        while cur != 0:
            cur = self.mul(cur, x)
            m += 1
        return m

    def power(self, x: int, k: int) -> int:
        """x^k for a power-associative element x (x^0 = identity).

        Left- and right-bracketed power chains are recomputed and compared;
        a mismatch raises NotPowerAssociative rather than returning either.
        """
        powers = [0]
        cur = self.mul(0, x)
        while cur != 0:
            powers.append(cur)
            cur = self.mul(powers[-1], x)
        m = len(powers)  # x^m = identity
        cur = 0
        for i in range(1, m):
            cur = self.mul(x, cur)
            if cur != powers[i]:
                raise NotPowerAssociative(x)
        if self.mul(x, cur) != 0:
            raise NotPowerAssociative(x)
        return powers[k % m]

    def element_order(self, x: int) -> int:
        """Order of x in <x>; raises NotPowerAssociative if <x> is not a group."""
        self.power(x, 0)  # runs the agreement check
        return self.left_order(x)

    # -- dunder plumbing ----------------------------------------------------

    def __eq__(self, other) -> bool:
        return isinstance(other, LoopTable) and self.rows == other.rows

    def __hash__(self) -> int:
        return hash(self.rows)

    def __repr__(self) -> str:
        return f"LoopTable(order={self.n})"

    def pretty(self) -> str:
        w = len(str(self.n - 1))
        return "\n".join(" ".join(str(v).rjust(w) for v in row) for row in self.rows)


def validate_table(raw: Iterable[Iterable[int]]) -> LoopTable:
    """Validate a raw grid as a loop table (Latin square, identity 0)."""
    return LoopTable(raw)


def normalize_table(raw: Iterable[Iterable[int]]) -> LoopTable:
    """Relabel an arbitrary loop grid so its identity becomes element 0.

    The relabeling keeps the remaining elements in ascending order.  A grid
    without a two-sided identity is rejected.
    """
    grid = [list(row) for row in raw]
    n = len(grid)
    ident = None
    for e in range(n):
        if all(grid[e][i] == i for i in range(n)) and all(grid[i][e] == i for i in range(n)):
            ident = e
            break
    if ident is None:
        raise NoIdentity(-1)
    order = [ident] + [x for x in range(n) if x != ident]
    rank = {old: new for new, old in enumerate(order)}
    relabeled = [[rank[grid[a][b]] for b in order] for a in order]
    return LoopTable(relabeled)


# -- .tbl text format -------------------------------------------------------

def dumps_table(Q: LoopTable) -> str:
    """Serialize to the .tbl format: order line, then one row per line."""
    lines = [str(Q.n)]
    lines.extend(" ".join(str(v) for v in row) for row in Q.rows)
    return "\n".join(lines) + "\n"


def loads_table(text: str) -> LoopTable:
    """Parse the .tbl format.  '#' starts a comment line; blank lines ignored."""
    rows: list[list[int]] = []
    n = None
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.strip()
        if not line or line.startswith("#"):
            continue
        if n is None:
            try:
                n = int(line)
            except ValueError:
                raise TableFormatError(lineno, f"expected the order, got {line!r}") from None
            if n <= 0:
                raise TableFormatError(lineno, f"order must be positive, got {n}")
            continue
        try:
            row = [int(tok) for tok in line.split()]
        except ValueError:
            raise TableFormatError(lineno, f"non-integer entry in {line!r}") from None
        rows.append(row)
        if len(rows) > n:
            raise TableFormatError(lineno, f"more than {n} rows")
    if n is None:
        raise TableFormatError(0, "missing order line")
    if len(rows) != n:
        raise TableFormatError(0, f"expected {n} rows, found {len(rows)}")
    return LoopTable(rows)


def load_table(path) -> LoopTable:
    with open(path, "r", encoding="ascii") as fh:
        return loads_table(fh.read())


def save_table(Q: LoopTable, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(dumps_table(Q))


def subtable(Q: LoopTable, members: Iterable[int]) -> tuple[LoopTable, dict[int, int]]:
    """Extract a closed subset as its own LoopTable.

    Returns the relabeled table (members in ascending order, so 0 stays 0)
    and the old->new label map.  Raises LoopError if the set is not closed.
    """
    elems = sorted(set(members))
    rank = {x: i for i, x in enumerate(elems)}
    if 0 not in rank:
        raise LoopError("subset does not contain the identity")
    rows = []
    for a in elems:
        row = []
        for b in elems:
            v = Q.mul(a, b)
            if v not in rank:
                raise LoopError(f"subset not closed: {a}*{b} = {v}")
            row.append(rank[v])
        rows.append(row)
    return LoopTable(rows), rank
