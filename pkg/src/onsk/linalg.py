"""Sparse exact linear algebra over the Gaussian rationals.

Operators are dict-of-dicts over Scalar entries; eliminations use exact
division, so ranks and nullspaces carry no thresholds at all.
"""

from __future__ import annotations

from .field import ONE, ZERO, Scalar


class Operator:
    """Sparse matrix with Scalar entries, shape (nrows, ncols)."""

    __slots__ = ("nrows", "ncols", "rows")

    def __init__(self, nrows: int, ncols: int | None = None):
        self.nrows = nrows
        self.ncols = nrows if ncols is None else ncols
        self.rows: dict = {}

    @staticmethod
    def identity(n: int) -> "Operator":
        out = Operator(n)
        for i in range(n):
            out.rows[i] = {i: ONE}
        return out

    def copy(self) -> "Operator":
        out = Operator(self.nrows, self.ncols)
        out.rows = {r: dict(cols) for r, cols in self.rows.items()}
        return out

    def get(self, r: int, c: int) -> Scalar:
        return self.rows.get(r, {}).get(c, ZERO)

    def set(self, r: int, c: int, v: Scalar) -> None:
        row = self.rows.setdefault(r, {})
        if v.is_zero():
            row.pop(c, None)
            if not row:
                del self.rows[r]
        else:
            row[c] = v

    def add_to(self, r: int, c: int, v: Scalar) -> None:
        self.set(r, c, self.get(r, c) + v)

    def entries(self):
        for r, cols in self.rows.items():
            for c, v in cols.items():
                yield r, c, v

    def is_zero(self) -> bool:
        return not self.rows

    def __eq__(self, other):
        if not isinstance(other, Operator):
            return NotImplemented
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            return False
        return (self - other).is_zero()

    def __add__(self, other: "Operator") -> "Operator":
        out = self.copy()
        for r, c, v in other.entries():
            out.add_to(r, c, v)
        return out

    def __sub__(self, other: "Operator") -> "Operator":
        out = self.copy()
        for r, c, v in other.entries():
            out.add_to(r, c, -v)
        return out

    def scale(self, c: Scalar) -> "Operator":
        out = Operator(self.nrows, self.ncols)
        if not c.is_zero():
            out.rows = {r: {col: v * c for col, v in cols.items()} for r, cols in self.rows.items()}
        return out

    def __neg__(self) -> "Operator":
        return self.scale(-ONE)

    def __matmul__(self, other: "Operator") -> "Operator":
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch")
        out = Operator(self.nrows, other.ncols)
        orows = other.rows
        for r, cols in self.rows.items():
            acc: dict = {}
            for k, v in cols.items():
                krow = orows.get(k)
                if not krow:
                    continue
                for c, w in krow.items():
                    prev = acc.get(c)
                    nxt = v * w if prev is None else prev + v * w
                    acc[c] = nxt
            acc = {c: val for c, val in acc.items() if not val.is_zero()}
            if acc:
                out.rows[r] = acc
        return out

    def apply(self, vec: dict) -> dict:
        out: dict = {}
        for r, cols in self.rows.items():
            s = ZERO
            for c, v in cols.items():
                x = vec.get(c)
                if x is not None:
                    s = s + v * x
            if not s.is_zero():
                out[r] = s
        return out

    def transpose(self) -> "Operator":
        out = Operator(self.ncols, self.nrows)
        for r, c, v in self.entries():
            out.set(c, r, v)
        return out

    def dagger(self) -> "Operator":
        out = Operator(self.ncols, self.nrows)
        for r, c, v in self.entries():
            out.set(c, r, v.conj())
        return out

    def trace(self) -> Scalar:
        s = ZERO
        for r, cols in self.rows.items():
            v = cols.get(r)
            if v is not None:
                s = s + v
        return s

    def to_dense(self):
        return [[self.get(r, c) for c in range(self.ncols)] for r in range(self.nrows)]


def commutator(a: Operator, b: Operator) -> Operator:
    return a @ b - b @ a


def rref(rows):
    """In-place reduced row echelon form; returns the pivot column list."""
    if not rows:
        return []
    ncols = len(rows[0])
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = None
        for i in range(r, len(rows)):
            if not rows[i][c].is_zero():
                pivot = i
                break
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = rows[r][c].inverse()
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and not rows[i][c].is_zero():
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return pivots


def first_entry(op: Operator):
    """Lexicographically first nonzero entry as (row, col, value), or None."""
    best = None
    for r, c, v in op.entries():
        if best is None or (r, c) < (best[0], best[1]):
            best = (r, c, v)
    return best


def rank_rows(rows) -> int:
    work = [list(row) for row in rows]
    return len(rref(work))


def rank(op: Operator) -> int:
    return rank_rows(op.to_dense())


def nullspace_rows(rows, ncols):
    """Basis of the right nullspace of the given row list."""
    work = [list(row) for row in rows]
    pivots = rref(work)
    pivset = set(pivots)
    free = [c for c in range(ncols) if c not in pivset]
    basis = []
    for fc in free:
        vec = [ZERO] * ncols
        vec[fc] = ONE
        for r, pc in enumerate(pivots):
            vec[pc] = -work[r][fc]
        basis.append(vec)
    return basis
