"""Finite-dimensional algebras given by structure constants, their modules,
bimodules, and Hochschild cochain complexes.

Conventions: ``mul[a][b]`` is the coefficient vector of ``e_a * e_b``.
A left module stores ``left[a]``, the matrix of ``m -> e_a m``; a bimodule also
stores ``right[a]``, the matrix of ``m -> m e_a``, so ``right[ab] = right[b] @ right[a]``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .exalg import QQ, Field, Mat, SparseMat, as_mat, inverse, kernel_basis, kron, rank, rref


class AlgebraError(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    pass


def _vec_add(F, u, v):
    return tuple(F.reduce(a + b) for a, b in zip(u, v))


@dataclass(frozen=True, eq=False)
class Algebra:
    field: Field
    dim: int
    mul: tuple  # mul[a][b] -> tuple of coefficients
    unit: tuple
    name: str = ""
    _left: list = field(default_factory=list, repr=False)
    _right: list = field(default_factory=list, repr=False)

    def basis(self, a: int) -> tuple:
        F = self.field
        return tuple(F.one if k == a else F.zero for k in range(self.dim))

    def multiply(self, x: Sequence, y: Sequence) -> tuple:
        F = self.field
        acc = [F.zero] * self.dim
        for a, xa in enumerate(x):
            if not xa:
                continue
            for b, yb in enumerate(y):
                if not yb:
                    continue
                c = xa * yb
                for k, v in enumerate(self.mul[a][b]):
                    if v:
                        acc[k] += c * v
        return tuple(F.reduce(v) for v in acc)

    def left_regular(self, a: int) -> Mat:
        """Matrix of x -> e_a x."""
        if not self._left:
            for k in range(self.dim):
                self._left.append(Mat.from_columns(self.field, [self.mul[k][b] for b in range(self.dim)], self.dim))
        return self._left[a]

    def right_regular(self, a: int) -> Mat:
        """Matrix of x -> x e_a."""
        if not self._right:
            for k in range(self.dim):
                self._right.append(Mat.from_columns(self.field, [self.mul[b][k] for b in range(self.dim)], self.dim))
        return self._right[a]

    def left_mult(self, x: Sequence) -> Mat:
        return _combine(self.field, self.dim, [(c, self.left_regular(a)) for a, c in enumerate(x) if c])

    def right_mult(self, x: Sequence) -> Mat:
        return _combine(self.field, self.dim, [(c, self.right_regular(a)) for a, c in enumerate(x) if c])

    def structure_equal(self, other: "Algebra") -> bool:
        return self.field == other.field and self.mul == other.mul and self.unit == other.unit


def _combine(F: Field, n: int, terms, m: int | None = None) -> Mat:
    m = n if m is None else m
    acc = Mat.zeros(F, n, m)
    for c, M in terms:
        acc = acc + M.scale(c)
    return acc


def make_algebra(field: Field, dim: int, products: Mapping[tuple[int, int], Sequence] | Sequence,
                 unit: Sequence, name: str = "", check: bool = True) -> Algebra:
    """Build an algebra from ``{(i, j): coeffs}`` (missing pairs are zero) or a full table."""
    zero = tuple(field.zero for _ in range(dim))
    if isinstance(products, Mapping):
        mul = tuple(tuple(tuple(field(x) for x in products.get((a, b), zero)) for b in range(dim))
                    for a in range(dim))
    else:
        mul = tuple(tuple(tuple(field(x) for x in products[a][b]) for b in range(dim)) for a in range(dim))
    A = Algebra(field, dim, mul, tuple(field(x) for x in unit), name)
    if check:
        validate_algebra(A)
    return A


def validate_algebra(A: Algebra) -> Algebra:
    n = A.dim
    if len(A.unit) != n or len(A.mul) != n or any(len(r) != n for r in A.mul):
        raise AlgebraError("structure constants have the wrong shape")
    for a, b, c in itertools.product(range(n), repeat=3):
        lhs = A.multiply(A.mul[a][b], A.basis(c))
        rhs = A.multiply(A.basis(a), A.mul[b][c])
        if lhs != rhs:
            raise AlgebraError(f"not associative on basis triple ({a}, {b}, {c})")
    for a in range(n):
        e = A.basis(a)
        if A.multiply(A.unit, e) != e or A.multiply(e, A.unit) != e:
            raise AlgebraError(f"unit law fails on basis element {a}")
    return A


def ground_field(F: Field = QQ) -> Algebra:
    return make_algebra(F, 1, {(0, 0): [1]}, [1], "k")


def dual_numbers(F: Field = QQ) -> Algebra:
    """k[x]/(x^2) with basis (1, x)."""
    return make_algebra(F, 2, {(0, 0): [1, 0], (0, 1): [0, 1], (1, 0): [0, 1]}, [1, 0], "k[x]/x^2")


def product_algebra(parts: Sequence[Algebra], name: str = "") -> Algebra:
    F = parts[0].field
    n = sum(p.dim for p in parts)
    prods = {}
    off = 0
    unit = [F.zero] * n
    for p in parts:
        for a, b in itertools.product(range(p.dim), repeat=2):
            v = [F.zero] * n
            v[off:off + p.dim] = p.mul[a][b]
            prods[(off + a, off + b)] = v
        unit[off:off + p.dim] = p.unit
        off += p.dim
    return make_algebra(F, n, prods, unit, name or " x ".join(p.name for p in parts))


def split_pair(F: Field = QQ) -> Algebra:
    """k x k with basis (e1, e2)."""
    return product_algebra([ground_field(F), ground_field(F)], "k x k")


def matrix_algebra(n: int, F: Field = QQ, upper: bool = False) -> Algebra:
    """Full (or upper-triangular) n x n matrices with basis E_ij in row-major order."""
    units = [(i, j) for i in range(n) for j in range(n) if not upper or i <= j]
    idx = {u: k for k, u in enumerate(units)}
    prods = {}
    for (i, j), (k, l) in itertools.product(units, repeat=2):
        if j == k:
            v = [0] * len(units)
            v[idx[(i, l)]] = 1
            prods[(idx[(i, j)], idx[(k, l)])] = v
    unit = [1 if i == j else 0 for (i, j) in units]
    return make_algebra(F, len(units), prods, unit, f"{'T' if upper else 'M'}_{n}")


def upper_triangular(F: Field = QQ) -> Algebra:
    return matrix_algebra(2, F, upper=True)


def opposite(A: Algebra) -> Algebra:
    n = A.dim
    mul = tuple(tuple(A.mul[b][a] for b in range(n)) for a in range(n))
    return Algebra(A.field, n, mul, A.unit, f"{A.name}^op" if A.name else "")


def enveloping(A: Algebra) -> Algebra:
    """A ⊗ A^op with basis index ``a * dim + b`` for e_a ⊗ e_b."""
    F, n = A.field, A.dim
    Aop = opposite(A)
    mul = []
    for a, b in itertools.product(range(n), repeat=2):
        row = []
        for c, d in itertools.product(range(n), repeat=2):
            x, y = A.mul[a][c], Aop.mul[b][d]
            row.append(tuple(F.reduce(u * v) for u in x for v in y))
        mul.append(tuple(row))
    unit = tuple(F.reduce(u * v) for u in A.unit for v in A.unit)
    return Algebra(F, n * n, tuple(mul), unit, f"{A.name}^e" if A.name else "")


@dataclass(frozen=True, eq=False)
class AlgebraHom:
    source: Algebra
    target: Algebra
    matrix: Mat

    def __call__(self, x: Sequence) -> tuple:
        return self.matrix.apply(x)


def check_algebra_hom(phi: AlgebraHom) -> None:
    S, T, M = phi.source, phi.target, phi.matrix
    if M.shape != (T.dim, S.dim):
        raise AlgebraError(f"hom matrix has shape {M.shape}, expected {(T.dim, S.dim)}")
    if M.apply(S.unit) != T.unit:
        raise AlgebraError("hom does not preserve the unit")
    for a, b in itertools.product(range(S.dim), repeat=2):
        if M.apply(S.mul[a][b]) != T.multiply(M.col(a), M.col(b)):
            raise AlgebraError(f"hom does not preserve the product of basis pair ({a}, {b})")


def homs_between(S: Algebra, T: Algebra) -> list[Mat]:
    """All algebra homs S -> T for the tiny curated algebras (entries searched in {-1, 0, 1})."""
    F = S.field
    found = []
    for entries in itertools.product((0, 1, -1), repeat=S.dim * T.dim):
        M = Mat(F, [entries[r * S.dim:(r + 1) * S.dim] for r in range(T.dim)], S.dim)
        try:
            check_algebra_hom(AlgebraHom(S, T, M))
        except AlgebraError:
            continue
        found.append(M)
    return found


# ---------------------------------------------------------------- modules

@dataclass(frozen=True, eq=False)
class Module:
    """A left module: ``left[a]`` is the action of the basis element e_a."""

    algebra: Algebra
    dim: int
    left: tuple

    def act(self, x: Sequence) -> Mat:
        return _combine(self.algebra.field, self.dim, [(c, self.left[a]) for a, c in enumerate(x) if c])


@dataclass(frozen=True, eq=False)
class Bimodule(Module):
    """A bimodule symmetric over k; ``right[a]`` is the matrix of m -> m e_a."""

    right: tuple = ()

    def ract(self, x: Sequence) -> Mat:
        return _combine(self.algebra.field, self.dim, [(c, self.right[a]) for a, c in enumerate(x) if c])


class ModuleError(ValueError):
    pass


def validate_module(M: Module) -> Module:
    A = M.algebra
    if len(M.left) != A.dim or any(L.shape != (M.dim, M.dim) for L in M.left):
        raise ModuleError("left action has the wrong shape")
    if not M.act(A.unit).is_identity():
        raise ModuleError("unit does not act as the identity on the left")
    for a, b in itertools.product(range(A.dim), repeat=2):
        if M.left[a] @ M.left[b] != M.act(A.mul[a][b]):
            raise ModuleError(f"left action is not a representation on basis pair ({a}, {b})")
    if isinstance(M, Bimodule):
        if len(M.right) != A.dim or any(R.shape != (M.dim, M.dim) for R in M.right):
            raise ModuleError("right action has the wrong shape")
        if not M.ract(A.unit).is_identity():
            raise ModuleError("unit does not act as the identity on the right")
        for a, b in itertools.product(range(A.dim), repeat=2):
            if M.right[b] @ M.right[a] != M.ract(A.mul[a][b]):
                raise ModuleError(f"right action is not an anti-representation on basis pair ({a}, {b})")
            if M.left[a] @ M.right[b] != M.right[b] @ M.left[a]:
                raise ModuleError(f"left and right actions do not commute on basis pair ({a}, {b})")
    return M


def regular_module(A: Algebra) -> Module:
    return Module(A, A.dim, tuple(A.left_regular(a) for a in range(A.dim)))


def regular_bimodule(A: Algebra) -> Bimodule:
    return Bimodule(A, A.dim, tuple(A.left_regular(a) for a in range(A.dim)),
                    tuple(A.right_regular(a) for a in range(A.dim)))


def make_module(A: Algebra, left: Sequence, dim: int | None = None) -> Module:
    F = A.field
    dim = dim if dim is not None else (len(left[0]) if left else 0)
    return validate_module(Module(A, dim, tuple(as_mat(F, L, dim, dim) for L in left)))


def make_bimodule(A: Algebra, left: Sequence, right: Sequence, dim: int | None = None) -> Bimodule:
    F = A.field
    dim = dim if dim is not None else (len(left[0]) if left else 0)
    return validate_module(Bimodule(A, dim, tuple(as_mat(F, L, dim, dim) for L in left),
                                    tuple(as_mat(F, R, dim, dim) for R in right)))


def restrict_module(M: Module, phi: AlgebraHom) -> Module:
    """|M|_phi: a module over phi.source through phi: source -> M.algebra."""
    S = phi.source
    left = tuple(M.act(phi.matrix.col(a)) for a in range(S.dim))
    if isinstance(M, Bimodule):
        right = tuple(M.ract(phi.matrix.col(a)) for a in range(S.dim))
        return Bimodule(S, M.dim, left, right)
    return Module(S, M.dim, left)


def direct_sum(mods: Sequence[Module]) -> Module:
    A = mods[0].algebra
    F = A.field
    dim = sum(m.dim for m in mods)
    left = tuple(Mat.block_diag(F, [m.left[a] for m in mods]) if mods else Mat.zeros(F, 0, 0)
                 for a in range(A.dim))
    if all(isinstance(m, Bimodule) for m in mods):
        right = tuple(Mat.block_diag(F, [m.right[a] for m in mods]) for a in range(A.dim))
        return Bimodule(A, dim, left, right)
    return Module(A, dim, left)


def zero_module(A: Algebra, bimodule: bool = False) -> Module:
    F = A.field
    z = tuple(Mat.zeros(F, 0, 0) for _ in range(A.dim))
    return Bimodule(A, 0, z, z) if bimodule else Module(A, 0, z)


def bimodule_as_left_module(X: Bimodule) -> Module:
    """X as a left module over the enveloping algebra: (a ⊗ b)·m = a m b."""
    A = X.algebra
    Ae = enveloping(A)
    left = tuple(X.left[a] @ X.right[b] for a, b in itertools.product(range(A.dim), repeat=2))
    return Module(Ae, X.dim, left)


def hom_constraints(M: Module, N: Module) -> Mat:
    """Linear constraints on vec(η) (row-major dim N x dim M) for η: M -> N to be a module map."""
    F = M.algebra.field
    blocks = [_commutator_rows(F, M.left[a], N.left[a]) for a in range(M.algebra.dim)]
    if isinstance(M, Bimodule) and isinstance(N, Bimodule):
        blocks += [_commutator_rows(F, M.right[a], N.right[a]) for a in range(M.algebra.dim)]
    if not blocks:
        return Mat.zeros(F, 0, N.dim * M.dim)
    return Mat.vstack(F, blocks, N.dim * M.dim)


def _commutator_rows(F: Field, SM: Mat, SN: Mat) -> Mat:
    """Rows of the linear map η -> η SM - SN η on row-major vec(η)."""
    m, n = SM.nrows, SN.nrows
    return kron(Mat.identity(F, n), SM.T) - kron(SN, Mat.identity(F, m))


def unvec(F: Field, v: Sequence, nrows: int, ncols: int) -> Mat:
    return Mat(F, [v[r * ncols:(r + 1) * ncols] for r in range(nrows)], ncols) if nrows \
        else Mat.zeros(F, 0, ncols)


def vec(M: Mat) -> tuple:
    return tuple(x for r in M.rows for x in r)


def module_hom_space(M: Module, N: Module) -> list[Mat]:
    """Basis of Hom(M, N) (bimodule maps when both are bimodules)."""
    F = M.algebra.field
    K = kernel_basis(hom_constraints(M, N))
    return [unvec(F, K.col(j), N.dim, M.dim) for j in range(K.ncols)]


def is_module_map(eta: Mat, M: Module, N: Module) -> bool:
    if eta.shape != (N.dim, M.dim):
        return False
    ok = all(eta @ M.left[a] == N.left[a] @ eta for a in range(M.algebra.dim))
    if ok and isinstance(M, Bimodule) and isinstance(N, Bimodule):
        ok = all(eta @ M.right[a] == N.right[a] @ eta for a in range(M.algebra.dim))
    return ok


def center_dim(B: Algebra) -> int:
    F = B.field
    rows = []
    for b in range(B.dim):
        rows.append(B.right_regular(b) - B.left_regular(b))
    return B.dim - rank(Mat.vstack(F, rows, B.dim))


def derivation_dim(B: Algebra) -> int:
    """dim Der(B) from the linear system D(ab) = D(a)b + aD(b) on basis pairs."""
    F, n = B.field, B.dim
    rows = []
    for a, b in itertools.product(range(n), repeat=2):
        # unknown D stored row-major (n x n), D(e_c) = column c
        for r in range(n):
            row = [F.zero] * (n * n)
            for c, coef in enumerate(B.mul[a][b]):
                if coef:
                    row[r * n + c] += coef
            # - D(e_a) e_b : (right mult by e_b) applied to column a
            Rb = B.right_regular(b)
            La = B.left_regular(a)
            for s in range(n):
                row[s * n + a] -= Rb[r, s]
                row[s * n + b] -= La[r, s]
            rows.append([F.reduce(x) for x in row])
    return n * n - rank(Mat(F, rows, n * n))


# ---------------------------------------------------------------- Hochschild cochains

DEFAULT_BUDGET = 20_000


@dataclass(frozen=True)
class CochainComplex:
    """Cohomologically graded: ``diffs[n]`` maps C^n -> C^{n+1}."""

    field: Field
    dims: tuple[int, ...]
    diffs: tuple  # SparseMat per degree 0..len(dims)-2

    def check_square_zero(self) -> bool:
        return all((self.diffs[n + 1] @ self.diffs[n]).is_zero() for n in range(len(self.diffs) - 1))

    def cohomology_dims(self, top: int | None = None) -> list[int]:
        top = len(self.dims) - 2 if top is None else top
        if top > len(self.dims) - 2:
            raise ValueError(f"degree {top} beyond constructed range {len(self.dims) - 2}")
        ranks = [d.rank() for d in self.diffs[:top + 1]]
        return [self.dims[n] - ranks[n] - (ranks[n - 1] if n else 0) for n in range(top + 1)]


def _check_budget(dims: Sequence[int], budget: int):
    if max(dims) > budget:
        raise BudgetExceeded(f"cochain space of dimension {max(dims)} exceeds the budget {budget}; "
                             "lower the degree or use the reduced complex")


def bar_cochain_complex(B: Algebra, X: Bimodule, N: int = 3, budget: int = DEFAULT_BUDGET) -> CochainComplex:
    """Standard Hochschild cochains Hom(B^{⊗n}, X) for 0 <= n <= N+1."""
    if X.algebra is not B and not X.algebra.structure_equal(B):
        raise AlgebraError("bimodule is not over the given algebra")
    F, n, m = B.field, B.dim, X.dim
    dims = [n ** k * m for k in range(N + 2)]
    _check_budget(dims, budget)
    Lx = [X.left[a] for a in range(n)]
    Rx = [X.right[a] for a in range(n)]
    prods = [[[(k, v) for k, v in enumerate(B.mul[a][b]) if v] for b in range(n)] for a in range(n)]
    diffs = []
    for deg in range(N + 1):
        D = SparseMat(F, dims[deg + 1], dims[deg])
        for out in itertools.product(range(n), repeat=deg + 1):
            base_out = _tuple_index(out, n) * m
            rest = _tuple_index(out[1:], n) * m
            head = _tuple_index(out[:-1], n) * m
            La, Rb = Lx[out[0]], Rx[out[-1]]
            for r in range(m):
                row = base_out + r
                for x in range(m):
                    D.add(row, rest + x, La[r, x])
                sign_last = -1 if (deg + 1) % 2 else 1
                for x in range(m):
                    D.add(row, head + x, sign_last * Rb[r, x])
                for i in range(1, deg + 1):
                    sign = -1 if i % 2 else 1
                    a, b = out[i - 1], out[i]
                    for k, v in prods[a][b]:
                        t = out[:i - 1] + (k,) + out[i + 1:]
                        D.add(row, _tuple_index(t, n) * m + r, F.reduce(sign * v))
        diffs.append(D)
    return CochainComplex(F, tuple(dims), tuple(diffs))


def _tuple_index(t: Sequence[int], n: int) -> int:
    k = 0
    for a in t:
        k = k * n + a
    return k


def hochschild_dims(B: Algebra, X: Bimodule, N: int = 3, method: str = "auto",
                    idempotents: Sequence[Sequence] | None = None,
                    budget: int = DEFAULT_BUDGET) -> list[int]:
    """dim HH^n(B, X) for n = 0..N via the full bar complex or the reduced one."""
    if method == "bar" or (method == "auto" and idempotents is None
                           and X.dim * B.dim ** (N + 1) <= budget):
        C = bar_cochain_complex(B, X, N, budget)
    else:
        C = reduced_cochain_complex(B, X, N, idempotents, budget)
    return C.cohomology_dims(N)


@dataclass(frozen=True)
class PeirceBasis:
    """A basis of B adapted to orthogonal idempotents: the idempotents first, then
    elements u with e_s u e_t = u and u outside E = span(idempotents)."""

    change: Mat          # columns: new basis vectors in old coordinates
    inverse: Mat
    ends: tuple          # (s, t) for each non-idempotent basis vector
    n_idem: int


def peirce_basis(B: Algebra, idempotents: Sequence[Sequence]) -> PeirceBasis:
    F = B.field
    es = [tuple(F(x) for x in e) for e in idempotents]
    total = tuple(F.zero for _ in range(B.dim))
    for s, e in enumerate(es):
        if B.multiply(e, e) != e:
            raise AlgebraError(f"element {s} is not idempotent")
        for t, f in enumerate(es):
            if s != t and any(B.multiply(e, f)):
                raise AlgebraError(f"idempotents {s} and {t} are not orthogonal")
        total = _vec_add(F, total, e)
    if total != B.unit:
        raise AlgebraError("idempotents do not sum to the unit")
    cols = list(es)
    ends = []
    for s, e in enumerate(es):
        Le = B.left_mult(e)
        for t, f in enumerate(es):
            P = Le @ B.right_mult(f)
            for v in P.columns():
                trial = cols + [v]
                if rank(Mat.from_columns(F, trial, B.dim)) == len(trial):
                    cols.append(v)
                    ends.append((s, t))
    change = Mat.from_columns(F, cols, B.dim)
    return PeirceBasis(change, inverse(change), tuple(ends), len(es))


def reduced_cochain_complex(B: Algebra, X: Bimodule, N: int = 3,
                            idempotents: Sequence[Sequence] | None = None,
                            budget: int = DEFAULT_BUDGET) -> CochainComplex:
    """Normalized Hochschild cochains relative to E = span of orthogonal idempotents.

    Cochains are E-bimodule maps vanishing on E, so they are determined by
    their values on chains u_1 ⊗ ... ⊗ u_n of Peirce basis vectors with matching
    ends, each value lying in e_s X e_t. E is separable, so this complex has the
    same cohomology as the full bar complex.
    """
    F = B.field
    idempotents = idempotents or [B.unit]
    pb = peirce_basis(B, idempotents)
    k = pb.n_idem
    bar = list(range(len(pb.ends)))
    vecs = [pb.change.col(k + u) for u in bar]
    # products of bar elements in bar coordinates (E part dropped)
    prod: dict[tuple[int, int], list] = {}
    for u in bar:
        for w in bar:
            if pb.ends[u][1] == pb.ends[w][0]:
                c = pb.inverse.apply(B.multiply(vecs[u], vecs[w]))
                prod[(u, w)] = [(z, c[k + z]) for z in bar if c[k + z]]
    # adapted basis of X: blocks e_s X e_t
    xblocks: dict[tuple[int, int], list] = {}
    xcols = []
    for s, e in enumerate(idempotents):
        for t, f in enumerate(idempotents):
            P = X.act(e) @ X.ract(f)
            basis_cols = [P.col(j) for j in rref(P)[1]] if X.dim else []
            xblocks[(s, t)] = list(range(len(xcols), len(xcols) + len(basis_cols)))
            xcols += basis_cols
    if len(xcols) != X.dim:
        raise AlgebraError("bimodule does not decompose along the idempotents")
    Q = Mat.from_columns(F, xcols, X.dim) if X.dim else Mat.zeros(F, 0, 0)
    Qi = inverse(Q) if X.dim else Q
    Lx = [Qi @ X.act(v) @ Q for v in vecs]
    Rx = [Qi @ X.ract(v) @ Q for v in vecs]

    # degree 0 chains are the vertices (s,); higher ones are tuples of bar indices
    chains: list[list[tuple]] = [[(s,) for s in range(k)], [(u,) for u in bar]]
    for deg in range(2, N + 2):
        chains.append([ch + (u,) for ch in chains[-1] for u in bar
                       if pb.ends[u][0] == pb.ends[ch[-1]][1]])

    def ends_of(deg, ch):
        if deg == 0:
            return (ch[0], ch[0])
        return (pb.ends[ch[0]][0], pb.ends[ch[-1]][1])

    offsets = []
    dims = []
    for deg, layer in enumerate(chains):
        off, pos = {}, 0
        for ch in layer:
            off[ch] = pos
            pos += len(xblocks[ends_of(deg, ch)])
        offsets.append(off)
        dims.append(pos)
    _check_budget(dims, budget)

    diffs = []
    for deg in range(N + 1):
        D = SparseMat(F, dims[deg + 1], dims[deg])
        src_off = offsets[deg]
        for ch, row0 in offsets[deg + 1].items():
            s, t = ends_of(deg + 1, ch)
            out_rows = xblocks[(s, t)]
            # leading term u_1 · f(u_2, ...)
            if deg == 0:
                lead_src = (pb.ends[ch[0]][1],)
                tail_src = (pb.ends[ch[0]][0],)
            else:
                lead_src = ch[1:]
                tail_src = ch[:-1]
            L = Lx[ch[0]]
            in_cols = xblocks[ends_of(deg, lead_src)]
            base = src_off[lead_src]
            for a, r in enumerate(out_rows):
                for b, c in enumerate(in_cols):
                    D.add(row0 + a, base + b, L[r, c])
            # trailing term (-1)^{n+1} f(u_1, ..., u_n) · u_{n+1}
            R = Rx[ch[-1]]
            sign = -1 if (deg + 1) % 2 else 1
            in_cols = xblocks[ends_of(deg, tail_src)]
            base = src_off[tail_src]
            for a, r in enumerate(out_rows):
                for b, c in enumerate(in_cols):
                    D.add(row0 + a, base + b, F.reduce(sign * R[r, c]))
            # inner terms
            for i in range(1, deg + 1):
                sign = -1 if i % 2 else 1
                for z, coef in prod.get((ch[i - 1], ch[i]), ()):
                    tgt = ch[:i - 1] + (z,) + ch[i + 1:]
                    base = src_off[tgt]
                    for a in range(len(out_rows)):
                        D.add(row0 + a, base + a, F.reduce(sign * coef))
        diffs.append(D)
    return CochainComplex(F, tuple(dims), tuple(diffs))


def change_basis(B: Algebra, P: Mat) -> Algebra:
    """The same algebra written in the basis given by the columns of P."""
    F, n = B.field, B.dim
    Pi = inverse(P)
    cols = P.columns()
    mul = tuple(tuple(Pi.apply(B.multiply(cols[a], cols[b])) for b in range(n)) for a in range(n))
    return Algebra(F, n, mul, Pi.apply(B.unit), B.name)


def transport_bimodule(X: Bimodule, B2: Algebra, P: Mat, Q: Mat) -> Bimodule:
    """X over B2 = change_basis(B, P), with X itself re-expressed in the basis Q."""
    Qi = inverse(Q)
    cols = P.columns()
    left = tuple(Qi @ X.act(c) @ Q for c in cols)
    right = tuple(Qi @ X.ract(c) @ Q for c in cols)
    return Bimodule(B2, X.dim, left, right)


# ---------------------------------------------------------------- serialization

def algebra_from_dict(raw: Mapping, field: Field | None = None) -> Algebra:
    F = field or Field.parse(raw.get("field"))
    n = int(raw["dim"])
    prods = {(int(e["i"]), int(e["j"])): e["coeffs"] for e in raw.get("mul", [])}
    return make_algebra(F, n, prods, raw["unit"], raw.get("name", ""))


def algebra_to_dict(A: Algebra) -> dict:
    mul = []
    for a, b in itertools.product(range(A.dim), repeat=2):
        c = A.mul[a][b]
        if any(c):
            mul.append({"i": a, "j": b, "coeffs": [str(x) for x in c]})
    return {"field": A.field.spec(), "dim": A.dim, "unit": [str(x) for x in A.unit], "mul": mul,
            "name": A.name}


def bimodule_from_dict(A: Algebra, raw: Mapping) -> Module:
    dim = int(raw["dim"])
    if "right" in raw:
        return make_bimodule(A, raw["left"], raw["right"], dim)
    return make_module(A, raw["left"], dim)


def bimodule_to_dict(M: Module) -> dict:
    out = {"dim": M.dim, "left": [L.to_lists() for L in M.left]}
    if isinstance(M, Bimodule):
        out["right"] = [R.to_lists() for R in M.right]
    return out
