"""Exact linear algebra over the rationals and prime fields.

Dense matrices are immutable row tuples. Elements of QQ are ``Fraction``;
elements of GF(p) are ints in ``range(p)``. Nothing here touches floats.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence


class Field:
    """A field of characteristic 0 (QQ) or a prime field GF(p)."""

    def __init__(self, modulus: int | None = None):
        if modulus is not None:
            if modulus < 2 or any(modulus % q == 0 for q in range(2, int(modulus**0.5) + 1)):
                raise ValueError(f"modulus {modulus} is not prime")
        self.modulus = modulus

    @property
    def characteristic(self) -> int:
        return self.modulus or 0

    @property
    def zero(self):
        return 0 if self.modulus else Fraction(0)

    @property
    def one(self):
        return 1 if self.modulus else Fraction(1)

    def __call__(self, x):
        p = self.modulus
        if p is None:
            return Fraction(x)
        if isinstance(x, str):
            x = Fraction(x)
        if isinstance(x, Fraction):
            return x.numerator * pow(x.denominator, -1, p) % p
        return int(x) % p

    def reduce(self, x):
        return x % self.modulus if self.modulus else x

    def inv(self, x):
        if x == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(x, -1, self.modulus) if self.modulus else 1 / x

    def __eq__(self, other):
        return isinstance(other, Field) and other.modulus == self.modulus

    def __hash__(self):
        return hash(("Field", self.modulus))

    def __repr__(self):
        return "QQ" if self.modulus is None else f"GF({self.modulus})"

    def spec(self) -> str:
        return repr(self)

    @classmethod
    def parse(cls, text: str | None) -> "Field":
        if text is None or text.strip().upper() in ("Q", "QQ", "RATIONALS"):
            return QQ
        t = text.strip().upper().replace(" ", "")
        for prefix in ("GF(", "F_", "GF"):
            if t.startswith(prefix):
                return GF(int(t[len(prefix):].rstrip(")")))
        raise ValueError(f"unknown field {text!r}")


QQ = Field()


def GF(p: int) -> Field:
    return Field(p)


def _fmt(x) -> str:
    return str(x)


class Mat:
    """Dense immutable matrix over a :class:`Field`."""

    __slots__ = ("field", "nrows", "ncols", "rows")

    def __init__(self, field: Field, rows: Iterable[Iterable], ncols: int | None = None):
        conv = field
        self.field = field
        self.rows = tuple(tuple(conv(x) for x in r) for r in rows)
        self.nrows = len(self.rows)
        if ncols is None:
            if not self.rows:
                raise ValueError("ncols required for a matrix with no rows")
            ncols = len(self.rows[0])
        self.ncols = ncols
        if any(len(r) != ncols for r in self.rows):
            raise ValueError("ragged matrix")

    @classmethod
    def _raw(cls, field: Field, rows: tuple, ncols: int) -> "Mat":
        m = object.__new__(cls)
        m.field = field
        m.rows = rows
        m.nrows = len(rows)
        m.ncols = ncols
        return m

    # constructors
    @classmethod
    def zeros(cls, field: Field, nrows: int, ncols: int) -> "Mat":
        z = field.zero
        return cls._raw(field, tuple((z,) * ncols for _ in range(nrows)), ncols)

    @classmethod
    def identity(cls, field: Field, n: int) -> "Mat":
        z, o = field.zero, field.one
        return cls._raw(field, tuple(tuple(o if i == j else z for j in range(n)) for i in range(n)), n)

    @classmethod
    def from_columns(cls, field: Field, cols: Sequence[Sequence], nrows: int) -> "Mat":
        if not cols:
            return cls.zeros(field, nrows, 0)
        return cls(field, zip(*cols), len(cols)) if nrows else cls.zeros(field, 0, len(cols))

    @classmethod
    def column(cls, field: Field, vec: Sequence) -> "Mat":
        return cls(field, ([x] for x in vec), 1)

    @classmethod
    def hstack(cls, field: Field, mats: Sequence["Mat"], nrows: int | None = None) -> "Mat":
        mats = list(mats)
        if nrows is None:
            nrows = mats[0].nrows
        ncols = sum(m.ncols for m in mats)
        rows = tuple(tuple(x for m in mats for x in m.rows[i]) for i in range(nrows))
        return cls._raw(field, rows, ncols)

    @classmethod
    def vstack(cls, field: Field, mats: Sequence["Mat"], ncols: int | None = None) -> "Mat":
        mats = list(mats)
        if ncols is None:
            ncols = mats[0].ncols
        rows = tuple(r for m in mats for r in m.rows)
        return cls._raw(field, rows, ncols)

    @classmethod
    def block(cls, field: Field, blocks: Sequence[Sequence["Mat"]]) -> "Mat":
        """Assemble a block matrix; all blocks in a row share nrows, in a column share ncols."""
        row_mats = [cls.hstack(field, brow) for brow in blocks]
        return cls.vstack(field, row_mats, row_mats[0].ncols)

    @classmethod
    def block_diag(cls, field: Field, mats: Sequence["Mat"]) -> "Mat":
        n = sum(m.nrows for m in mats)
        c = sum(m.ncols for m in mats)
        z = field.zero
        rows = []
        off = 0
        for m in mats:
            for r in m.rows:
                rows.append((z,) * off + r + (z,) * (c - off - m.ncols))
            off += m.ncols
        return cls._raw(field, tuple(rows), c) if n else cls.zeros(field, 0, c)

    # access
    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def col(self, j: int) -> tuple:
        return tuple(r[j] for r in self.rows)

    def columns(self) -> list[tuple]:
        return [self.col(j) for j in range(self.ncols)]

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "Mat":
        return Mat._raw(self.field, tuple(tuple(self.rows[i][j] for j in cols) for i in rows), len(cols))

    def with_entry(self, i: int, j: int, value) -> "Mat":
        rows = [list(r) for r in self.rows]
        rows[i][j] = self.field(value)
        return Mat(self.field, rows, self.ncols)

    # arithmetic
    def __matmul__(self, other: "Mat") -> "Mat":
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        F = self.field
        red = F.reduce
        cols = other.columns() if other.ncols else []
        z = F.zero
        out = []
        for r in self.rows:
            nz = [(k, x) for k, x in enumerate(r) if x]
            out.append(tuple(red(sum((x * c[k] for k, x in nz), z)) for c in cols))
        return Mat._raw(F, tuple(out), other.ncols)

    def apply(self, vec: Sequence) -> tuple:
        red = self.field.reduce
        z = self.field.zero
        return tuple(red(sum((a * b for a, b in zip(r, vec) if a), z)) for r in self.rows)

    def _zip(self, other: "Mat", op) -> "Mat":
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        red = self.field.reduce
        return Mat._raw(
            self.field,
            tuple(tuple(red(op(a, b)) for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows)),
            self.ncols,
        )

    def __add__(self, other: "Mat") -> "Mat":
        return self._zip(other, lambda a, b: a + b)

    def __sub__(self, other: "Mat") -> "Mat":
        return self._zip(other, lambda a, b: a - b)

    def __neg__(self) -> "Mat":
        red = self.field.reduce
        return Mat._raw(self.field, tuple(tuple(red(-a) for a in r) for r in self.rows), self.ncols)

    def scale(self, c) -> "Mat":
        c = self.field(c)
        red = self.field.reduce
        return Mat._raw(self.field, tuple(tuple(red(c * a) for a in r) for r in self.rows), self.ncols)

    @property
    def T(self) -> "Mat":
        if self.nrows == 0 or self.ncols == 0:
            return Mat.zeros(self.field, self.ncols, self.nrows)
        return Mat._raw(self.field, tuple(zip(*self.rows)), self.nrows)

    def __eq__(self, other):
        return isinstance(other, Mat) and self.shape == other.shape and self.rows == other.rows

    def __hash__(self):
        return hash((self.shape, self.rows))

    def is_zero(self) -> bool:
        return all(not x for r in self.rows for x in r)

    def is_identity(self) -> bool:
        return self.nrows == self.ncols and all(
            x == (1 if i == j else 0) for i, r in enumerate(self.rows) for j, x in enumerate(r)
        )

    def to_lists(self) -> list[list[str]]:
        return [[_fmt(x) for x in r] for r in self.rows]

    def __repr__(self):
        if self.nrows * self.ncols > 64:
            return f"Mat<{self.field!r} {self.nrows}x{self.ncols}>"
        return f"Mat({self.field!r}, {[[_fmt(x) for x in r] for r in self.rows]})"


def as_mat(field: Field, data, nrows: int | None = None, ncols: int | None = None) -> Mat:
    """Coerce nested lists (or a Mat) into a Mat, keeping explicit shapes for empty data."""
    if isinstance(data, Mat):
        return data
    data = [list(r) for r in data]
    if not data:
        return Mat.zeros(field, nrows or 0, ncols or 0)
    return Mat(field, data, ncols if ncols is not None else len(data[0]))


# ---------------------------------------------------------------- elimination

def rref(A: Mat) -> tuple[Mat, list[int]]:
    """Reduced row echelon form and pivot columns."""
    F = A.field
    red, inv = F.reduce, F.inv
    rows = [list(r) for r in A.rows]
    pivots: list[int] = []
    r = 0
    for c in range(A.ncols):
        if r == len(rows):
            break
        p = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        piv = rows[r]
        s = inv(piv[c])
        if s != 1:
            rows[r] = piv = [red(x * s) for x in piv]
        nzc = [j for j in range(c, A.ncols) if piv[j]]
        for i in range(len(rows)):
            if i != r:
                f = rows[i][c]
                if f:
                    row = rows[i]
                    for j in nzc:
                        row[j] = red(row[j] - f * piv[j])
        pivots.append(c)
        r += 1
    return Mat._raw(F, tuple(tuple(x) for x in rows), A.ncols), pivots


def rank(A: Mat) -> int:
    if isinstance(A, SparseMat):
        return A.rank()
    return len(rref(A)[1])


def kernel_basis(A: Mat) -> Mat:
    """Columns form a basis of the right kernel of ``A``."""
    F = A.field
    R, pivots = rref(A)
    free = [j for j in range(A.ncols) if j not in set(pivots)]
    cols = []
    for fj in free:
        v = [F.zero] * A.ncols
        v[fj] = F.one
        for i, pj in enumerate(pivots):
            v[pj] = F.reduce(-R.rows[i][fj])
        cols.append(v)
    return Mat.from_columns(F, cols, A.ncols)


def image_basis(A: Mat) -> Mat:
    """Independent columns of ``A`` spanning its column space."""
    _, pivots = rref(A)
    return A.submatrix(range(A.nrows), pivots)


class Inconsistent(NamedTuple):
    """Certificate: ``y @ A == 0`` while ``y . b != 0``."""

    y: tuple


def solve(A: Mat, b: Sequence) -> tuple | Inconsistent:
    """One solution of ``A x = b`` or an :class:`Inconsistent` certificate."""
    F = A.field
    if len(b) != A.nrows:
        raise ValueError(f"dimension mismatch: A has {A.nrows} rows, b has {len(b)}")
    if A.nrows == 0:
        return tuple(F.zero for _ in range(A.ncols))
    R, pivots = rref(Mat.hstack(F, [A, Mat.column(F, b), Mat.identity(F, A.nrows)]))
    n = A.ncols
    if n in pivots:
        i = pivots.index(n)
        return Inconsistent(tuple(R.rows[i][n + 1:]))
    x = [F.zero] * n
    for i, pj in enumerate(pivots):
        if pj < n:
            x[pj] = R.rows[i][n]
    return tuple(x)


def solve_matrix(A: Mat, B: Mat) -> Mat | None:
    """Solve ``A X = B`` columnwise; None when some column is inconsistent."""
    F = A.field
    if A.nrows == 0:
        return Mat.zeros(F, A.ncols, B.ncols)
    R, pivots = rref(Mat.hstack(F, [A, B]))
    n = A.ncols
    if any(p >= n for p in pivots):
        return None
    X = [[F.zero] * B.ncols for _ in range(n)]
    for i, pj in enumerate(pivots):
        X[pj] = list(R.rows[i][n:])
    return Mat(F, X, B.ncols)


def inverse(A: Mat) -> Mat:
    if A.nrows != A.ncols:
        raise ValueError("not square")
    X = solve_matrix(A, Mat.identity(A.field, A.nrows))
    if X is None or rank(A) != A.nrows:
        raise ValueError("matrix is singular")
    return X


class Quotient(NamedTuple):
    """``projection`` maps V-coordinates onto V/W; ``section`` lifts back to V-coordinates."""

    dim: int
    basis: Mat
    projection: Mat
    section: Mat


def quotient_basis(V_basis: Mat, W_basis: Mat) -> Quotient:
    F = V_basis.field
    r = V_basis.ncols
    if W_basis.ncols == 0:
        C = Mat.zeros(F, r, 0)
    else:
        C = solve_matrix(V_basis, W_basis) if r else None
        if C is None or V_basis @ C != W_basis:
            raise ValueError("W is not contained in span(V)")
    if rank(V_basis) != r:
        raise ValueError("V_basis columns are dependent")
    _, piv = rref(Mat.hstack(F, [C, Mat.identity(F, r)], r)) if r else (None, [])
    wcols = [p for p in piv if p < C.ncols]
    comp = [p - C.ncols for p in piv if p >= C.ncols]
    E = Mat.identity(F, r)
    M = Mat.hstack(F, [C.submatrix(range(r), wcols), E.submatrix(range(r), comp)], r)
    Minv = inverse(M)
    projection = Minv.submatrix(range(len(wcols), r), range(r))
    section = E.submatrix(range(r), comp)
    return Quotient(len(comp), V_basis @ section, projection, section)


def kron(A: Mat, B: Mat) -> Mat:
    """Kronecker product, left factor major."""
    F = A.field
    red = F.reduce
    rows = []
    for ra in A.rows:
        for rb in B.rows:
            rows.append(tuple(red(a * b) for a in ra for b in rb))
    return Mat._raw(F, tuple(rows), A.ncols * B.ncols) if rows else Mat.zeros(F, 0, A.ncols * B.ncols)


# ---------------------------------------------------------------- sparse

class SparseMat:
    """Row-sparse matrix used for large cochain differentials."""

    __slots__ = ("field", "nrows", "ncols", "rows")

    def __init__(self, field: Field, nrows: int, ncols: int, rows: dict[int, dict[int, object]] | None = None):
        self.field = field
        self.nrows = nrows
        self.ncols = ncols
        self.rows = rows if rows is not None else {}

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def add(self, i: int, j: int, v):
        if not v:
            return
        row = self.rows.setdefault(i, {})
        x = self.field.reduce(row.get(j, 0) + v)
        if x:
            row[j] = x
        else:
            del row[j]

    def to_dense(self) -> Mat:
        z = self.field.zero
        out = [[z] * self.ncols for _ in range(self.nrows)]
        for i, row in self.rows.items():
            for j, v in row.items():
                out[i][j] = v
        return Mat(self.field, out, self.ncols) if self.nrows else Mat.zeros(self.field, 0, self.ncols)

    @classmethod
    def from_dense(cls, A: Mat) -> "SparseMat":
        S = cls(A.field, A.nrows, A.ncols)
        for i, r in enumerate(A.rows):
            d = {j: x for j, x in enumerate(r) if x}
            if d:
                S.rows[i] = d
        return S

    def nnz(self) -> int:
        return sum(len(r) for r in self.rows.values())

    def rank(self) -> int:
        """Incremental echelon reduction, shortest rows first to limit fill-in."""
        F = self.field
        red, inv = F.reduce, F.inv
        pivots: dict[int, dict] = {}
        for row in sorted((r for r in self.rows.values() if r), key=len):
            r = dict(row)
            while r:
                c = min(r)
                p = pivots.get(c)
                if p is None:
                    s = inv(r[c])
                    pivots[c] = {j: red(v * s) for j, v in r.items()}
                    break
                f = r[c]
                for j, v in p.items():
                    x = red(r.get(j, 0) - f * v)
                    if x:
                        r[j] = x
                    else:
                        r.pop(j, None)
        return len(pivots)

    def __matmul__(self, other: "SparseMat") -> "SparseMat":
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch")
        out = SparseMat(self.field, self.nrows, other.ncols)
        for i, row in self.rows.items():
            acc: dict[int, object] = {}
            for k, v in row.items():
                orow = other.rows.get(k)
                if orow:
                    for j, w in orow.items():
                        acc[j] = acc.get(j, 0) + v * w
            red = self.field.reduce
            acc = {j: red(x) for j, x in acc.items()}
            acc = {j: x for j, x in acc.items() if x}
            if acc:
                out.rows[i] = acc
        return out

    def is_zero(self) -> bool:
        return all(not r for r in self.rows.values())
