"""Bounded chain complexes over a field: cones, contractions, homotopy
equivalences read off cone contractions, and total complexes of augmented
double complexes with an explicit homotopy.

Grading is homological: ``Complex.d(n)`` maps X_n -> X_{n-1}. A homotopy is a
dict ``n -> Mat`` of degree-raising maps X_n -> X_{n+1} (or between two
complexes when it witnesses a chain homotopy).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .exalg import Field, Mat, inverse, kernel_basis, rank, rref, solve_matrix


class ComplexError(ValueError):
    pass


class NotContractible(ValueError):
    def __init__(self, degree: int):
        super().__init__(f"nonzero homology in degree {degree}")
        self.degree = degree


@dataclass(frozen=True)
class Complex:
    field: Field
    dims: tuple[int, ...]
    diffs: Mapping[int, Mat] = field(default_factory=dict)

    def __post_init__(self):
        for n, D in self.diffs.items():
            if D.shape != (self.dim(n - 1), self.dim(n)):
                raise ComplexError(f"d_{n} has shape {D.shape}, expected {(self.dim(n - 1), self.dim(n))}")

    @property
    def top(self) -> int:
        return len(self.dims) - 1

    def dim(self, n: int) -> int:
        return self.dims[n] if 0 <= n < len(self.dims) else 0

    def d(self, n: int) -> Mat:
        D = self.diffs.get(n)
        return D if D is not None else Mat.zeros(self.field, self.dim(n - 1), self.dim(n))

    def identity(self, n: int) -> Mat:
        return Mat.identity(self.field, self.dim(n))

    def check(self) -> "Complex":
        for n in range(1, self.top + 1):
            if not (self.d(n) @ self.d(n + 1)).is_zero():
                raise ComplexError(f"d_{n} d_{n + 1} != 0")
        return self


def make_complex(F: Field, dims: Sequence[int], diffs: Mapping[int, Sequence] | None = None) -> Complex:
    from .exalg import as_mat
    dims = tuple(dims)
    ds = {}
    for n, D in (diffs or {}).items():
        r = dims[n - 1] if n >= 1 else 0
        c = dims[n] if n < len(dims) else 0
        ds[n] = as_mat(F, D, r, c)
    return Complex(F, dims, ds).check()


def _zero(F, r, c):
    return Mat.zeros(F, r, c)


@dataclass(frozen=True)
class ChainMap:
    source: Complex
    target: Complex
    maps: Mapping[int, Mat]

    def __getitem__(self, n: int) -> Mat:
        M = self.maps.get(n)
        return M if M is not None else _zero(self.source.field, self.target.dim(n), self.source.dim(n))

    @property
    def top(self) -> int:
        return max(self.source.top, self.target.top)

    def check(self) -> "ChainMap":
        for n in range(1, self.top + 2):
            if self.target.d(n) @ self[n] != self[n - 1] @ self.source.d(n):
                raise ComplexError(f"not a chain map in degree {n}")
        return self


def compose(g: ChainMap, f: ChainMap) -> ChainMap:
    top = max(f.top, g.top)
    return ChainMap(f.source, g.target, {n: g[n] @ f[n] for n in range(top + 1)})


def identity_map(X: Complex) -> ChainMap:
    return ChainMap(X, X, {n: X.identity(n) for n in range(X.top + 1)})


def zero_map(X: Complex, Y: Complex) -> ChainMap:
    return ChainMap(X, Y, {})


def hget(h: Mapping[int, Mat], n: int, F: Field, rows: int, cols: int) -> Mat:
    M = h.get(n)
    return M if M is not None else _zero(F, rows, cols)


def homotopy_defect(f: ChainMap, g: ChainMap, h: Mapping[int, Mat], n: int) -> Mat:
    """(f - g) - (h d + d h) in degree n for h: X_n -> Y_{n+1}."""
    X, Y, F = f.source, f.target, f.source.field
    hn = hget(h, n, F, Y.dim(n + 1), X.dim(n))
    hm = hget(h, n - 1, F, Y.dim(n), X.dim(n - 1))
    return f[n] - g[n] - (hm @ X.d(n)) - (Y.d(n + 1) @ hn)


def is_homotopy(f: ChainMap, g: ChainMap, h: Mapping[int, Mat]) -> bool:
    top = max(f.top, g.top)
    return all(homotopy_defect(f, g, h, n).is_zero() for n in range(top + 1))


def is_contraction(X: Complex, s: Mapping[int, Mat]) -> bool:
    """s d + d s = id in every degree."""
    I = identity_map(X)
    return is_homotopy(I, zero_map(X, X), s)


# ---------------------------------------------------------------- cones

def cone(f: ChainMap, sign: int = -1) -> Complex:
    """C(f)_n = M_{n-1} ⊕ N_n with differential [[-d_M, 0], [f, d_N]].

    ``sign`` exists only so tests can build the mis-signed control.
    """
    M, N, F = f.source, f.target, f.source.field
    top = max(M.top + 1, N.top)
    dims = tuple(M.dim(n - 1) + N.dim(n) for n in range(top + 1))
    diffs = {}
    for n in range(1, top + 1):
        dM = M.d(n - 1)
        blocks = [[dM.scale(sign), _zero(F, M.dim(n - 2), N.dim(n))],
                  [f[n - 1], N.d(n)]]
        diffs[n] = _blocks(F, blocks, [M.dim(n - 2), N.dim(n - 1)], [M.dim(n - 1), N.dim(n)])
    return Complex(F, dims, diffs)


def _blocks(F, blocks, row_dims, col_dims) -> Mat:
    rows = []
    for brow, r in zip(blocks, row_dims):
        if r == 0:
            continue
        rows.append(Mat.hstack(F, brow, r))
    if not rows:
        return Mat.zeros(F, 0, sum(col_dims))
    return Mat.vstack(F, rows, sum(col_dims))


def cone_block(f: ChainMap, X: Mat, n_out: int, n_in: int) -> tuple[Mat, Mat, Mat, Mat]:
    """Split a map C(f)_{n_in} -> C(f)_{n_out} into [[MM, MN], [NM, NN]] blocks."""
    M = f.source
    r0, c0 = M.dim(n_out - 1), M.dim(n_in - 1)
    rr, cc = range(X.nrows), range(X.ncols)
    return (X.submatrix(rr[:r0], cc[:c0]), X.submatrix(rr[:r0], cc[c0:]),
            X.submatrix(rr[r0:], cc[:c0]), X.submatrix(rr[r0:], cc[c0:]))


# ---------------------------------------------------------------- contraction

def homology_dims(X: Complex) -> list[int]:
    ranks = [rank(X.d(n)) for n in range(X.top + 2)]
    return [X.dim(n) - ranks[n] - ranks[n + 1] for n in range(X.top + 1)]


def contraction(X: Complex) -> dict[int, Mat]:
    """A contracting homotopy s (s d + d s = id), or NotContractible with the first bad degree.

    X_n splits as ker d_n ⊕ span{e_j : j pivot column of d_n}; s inverts d on the
    pivot complement and vanishes on the complement of the boundaries.
    """
    F = X.field
    for n, h in enumerate(homology_dims(X)):
        if h:
            raise NotContractible(n)
    pivots = {n: rref(X.d(n))[1] for n in range(X.top + 2)}
    s = {}
    for n in range(X.top + 1):
        piv_up = pivots[n + 1]
        piv_here = pivots[n]
        dn1 = X.d(n + 1)
        boundary = dn1.submatrix(range(X.dim(n)), piv_up)
        E = Mat.identity(F, X.dim(n)).submatrix(range(X.dim(n)), piv_here)
        Q = Mat.hstack(F, [boundary, E], X.dim(n)) if X.dim(n) else Mat.zeros(F, 0, 0)
        Qi = inverse(Q) if X.dim(n) else Q
        take = Qi.submatrix(range(len(piv_up)), range(X.dim(n)))
        lift = Mat.identity(F, X.dim(n + 1)).submatrix(range(X.dim(n + 1)), piv_up)
        s[n] = lift @ take
    if not is_contraction(X, s):
        raise ComplexError("internal error: contraction identity failed")
    return s


@dataclass
class QisoReport:
    ok: bool
    certificates: dict = field(default_factory=dict)
    failing_object: str | None = None
    failing_degree: int | None = None


def is_relative_qiso(family: Mapping[str, ChainMap]) -> QisoReport:
    """Objectwise: every cone must be contractible over k."""
    certs = {}
    for obj, f in family.items():
        try:
            certs[obj] = contraction(cone(f))
        except NotContractible as exc:
            return QisoReport(False, certs, obj, exc.degree)
    return QisoReport(True, certs)


# ---------------------------------------------------------------- homotopy equivalences from cones

@dataclass(frozen=True)
class HomotopyEquivalence:
    """gamma: N -> M with alpha, delta and the off-diagonal beta read off a cone contraction.

    alpha[n]: M_{n-1} -> M_n, beta[n]: M_{n-1} -> N_{n+1}, gamma[n]: N_n -> M_n,
    delta[n]: N_n -> N_{n+1}, all indexed by the cone degree n.
    """

    gamma: ChainMap
    alpha: dict
    delta: dict
    beta: dict


def extract_homotopy_equivalence(f: ChainMap, s: Mapping[int, Mat]) -> HomotopyEquivalence:
    C = cone(f)
    if not is_contraction(C, s):
        raise ComplexError("s is not a contraction of the cone")
    M, N, F = f.source, f.target, f.source.field
    alpha, beta, gamma, delta = {}, {}, {}, {}
    for n in range(C.top + 1):
        sn = hget(s, n, F, C.dim(n + 1), C.dim(n))
        a, g, b, d = cone_block(f, sn, n + 1, n)
        alpha[n], gamma[n], beta[n], delta[n] = a, g, b, d
    top = max(M.top, N.top)
    gam = ChainMap(N, M, {n: gamma[n] for n in range(top + 1)})
    he = HomotopyEquivalence(gam, alpha, delta, beta)
    for name, ok in relations_hold(f, he).items():
        if not ok:
            raise ComplexError(f"relation {name} failed")
    return he


def relations_hold(f: ChainMap, he: HomotopyEquivalence) -> dict[str, bool]:
    """The four relations forced by s d + d s = id on the cone, degree by degree.

    With alpha[n]: M_{n-1} -> M_n we write alpha_k = alpha[k+1]: M_k -> M_{k+1}.
    """
    M, N, F = f.source, f.target, f.source.field
    top = max(M.top, N.top) + 1
    g = he.gamma

    def a(k):  # M_k -> M_{k+1}
        return hget(he.alpha, k + 1, F, M.dim(k + 1), M.dim(k))

    def dl(k):  # N_k -> N_{k+1}
        return hget(he.delta, k, F, N.dim(k + 1), N.dim(k))

    def b(k):  # M_k -> N_{k+2}
        return hget(he.beta, k + 1, F, N.dim(k + 2), M.dim(k))

    out = {"-a dM + g f - dM a = id_M": True, "-b dM + dl f + f a + dN b = 0": True,
           "dl dN + f g + dN dl = id_N": True, "g dN - dM g = 0": True}
    for k in range(top + 1):
        dM, dN = M.d(k), N.d(k)
        lhs = -(a(k - 1) @ dM) + g[k] @ f[k] - M.d(k + 1) @ a(k)
        if lhs != M.identity(k):
            out["-a dM + g f - dM a = id_M"] = False
        # M_k -> N_{k+1}
        lhs = -(b(k - 1) @ dM) + dl(k) @ f[k] + f[k + 1] @ a(k) + N.d(k + 2) @ b(k)
        if not lhs.is_zero():
            out["-b dM + dl f + f a + dN b = 0"] = False
        lhs = dl(k - 1) @ dN + f[k] @ g[k] + N.d(k + 1) @ dl(k)
        if lhs != N.identity(k):
            out["dl dN + f g + dN dl = id_N"] = False
        if k >= 1 and not (g[k - 1] @ dN - dM @ g[k]).is_zero():
            out["g dN - dM g = 0"] = False
    return out


def build_cone_contraction(f: ChainMap, gamma: ChainMap, sM: Mapping[int, Mat],
                           sN: Mapping[int, Mat]) -> dict[int, Mat]:
    """The explicit cone homotopy [[sM + g(sN f - f sM), g], [sN(f sM - sN f), -sN]].

    Preconditions: f g - id_N = sN d + d sN and g f - id_M = sM d + d sM.
    Returned keys are cone degrees: s[n]: C(f)_n -> C(f)_{n+1}.
    """
    M, N, F = f.source, f.target, f.source.field
    if not is_homotopy(compose(f, gamma), identity_map(N), sN):
        raise ComplexError("precondition f g - id_N = sN d + d sN fails")
    if not is_homotopy(compose(gamma, f), identity_map(M), sM):
        raise ComplexError("precondition g f - id_M = sM d + d sM fails")
    C = cone(f)

    def sm(k):
        return hget(sM, k, F, M.dim(k + 1), M.dim(k))

    def sn(k):
        return hget(sN, k, F, N.dim(k + 1), N.dim(k))

    s = {}
    for n in range(C.top + 1):
        k = n - 1  # the M summand of C_n is M_k
        mm = sm(k) + gamma[k + 1] @ (sn(k) @ f[k] - f[k + 1] @ sm(k))
        mn = gamma[n]
        nm = sn(n) @ (f[n] @ sm(k) - sn(k) @ f[k])
        nn = -sn(n)
        s[n] = _blocks(F, [[mm, mn], [nm, nn]], [M.dim(n), N.dim(n + 1)], [M.dim(k), N.dim(n)])
    if not is_contraction(C, s):
        raise ComplexError("explicit cone homotopy does not satisfy s d + d s = id")
    return s


# ---------------------------------------------------------------- double complexes

@dataclass(frozen=True)
class DoubleComplex:
    """X[h, i] (column h, row i) with horizontal d_i: X[h,i] -> X[h-1,i],
    vertical d^h: X[h,i] -> X[h,i-1], an augmentation column M_i with
    eps_i: X[0,i] -> M_i, and row contractions t[h, i]: X[h-1,i] -> X[h,i]
    (t[0, i]: M_i -> X[0,i]). Squares commute.
    """

    field: Field
    dims: Mapping[tuple[int, int], int]
    horizontal: Mapping[tuple[int, int], Mat]
    vertical: Mapping[tuple[int, int], Mat]
    aug: Complex
    eps: Mapping[int, Mat]
    t: Mapping[tuple[int, int], Mat]
    width: int
    height: int

    def dim(self, h: int, i: int) -> int:
        return self.dims.get((h, i), 0) if h >= 0 and i >= 0 else 0

    def dh(self, h: int, i: int) -> Mat:
        """Horizontal X[h,i] -> X[h-1,i] (h >= 1)."""
        return self.horizontal.get((h, i)) or _zero(self.field, self.dim(h - 1, i), self.dim(h, i))

    def dv(self, h: int, i: int) -> Mat:
        """Vertical X[h,i] -> X[h,i-1]."""
        return self.vertical.get((h, i)) or _zero(self.field, self.dim(h, i - 1), self.dim(h, i))

    def e(self, i: int) -> Mat:
        return self.eps.get(i) or _zero(self.field, self.aug.dim(i), self.dim(0, i))

    def th(self, h: int, i: int) -> Mat:
        src = self.aug.dim(i) if h == 0 else self.dim(h - 1, i)
        return self.t.get((h, i)) or _zero(self.field, self.dim(h, i), src)


def check_double_complex(D: DoubleComplex) -> None:
    """Squares, row contractions and contraction/vertical naturality; raises on the first failure."""
    D.aug.check()
    for i in range(D.height):
        for h in range(D.width):
            if h >= 2 and not (D.dh(h - 1, i) @ D.dh(h, i)).is_zero():
                raise ComplexError(f"horizontal d^2 != 0 at ({h},{i})")
            if i >= 2 and not (D.dv(h, i - 1) @ D.dv(h, i)).is_zero():
                raise ComplexError(f"vertical d^2 != 0 at ({h},{i})")
            if h >= 1 and i >= 1 and D.dv(h - 1, i) @ D.dh(h, i) != D.dh(h, i - 1) @ D.dv(h, i):
                raise ComplexError(f"square at ({h},{i}) does not commute")
        if i >= 1 and D.aug.d(i) @ D.e(i) != D.e(i - 1) @ D.dv(0, i):
            raise ComplexError(f"augmentation square at row {i} does not commute")
        if D.width > 1 and not (D.e(i) @ D.dh(1, i)).is_zero():
            raise ComplexError(f"eps d != 0 on row {i}")
        # row contraction
        if not (D.e(i) @ D.th(0, i)).is_identity():
            raise ComplexError(f"row {i}: eps t^0 != id")
        for h in range(D.width):
            left = (D.e(i) if h == 0 else D.dh(h, i))
            lhs = D.dh(h + 1, i) @ D.th(h + 1, i) + D.th(h, i) @ left
            if not lhs.is_identity():
                raise ComplexError(f"row {i}: d t + t d != id at column {h}")
        if i >= 1:
            if D.dv(0, i) @ D.th(0, i) != D.th(0, i - 1) @ D.aug.d(i):
                raise ComplexError(f"t^0 naturality square fails at row {i}")
            for h in range(1, D.width):
                if D.dv(h, i) @ D.th(h, i) != D.th(h, i - 1) @ D.dv(h - 1, i):
                    raise ComplexError(f"t naturality square fails at ({h},{i})")


@dataclass(frozen=True)
class TotalComplex:
    tot: Complex
    eps: ChainMap
    t0: ChainMap
    h: dict
    components: dict  # n -> list of (h, i) in block order


def total_complex(D: DoubleComplex, vertical_sign: bool = True) -> TotalComplex:
    """Tot_n = ⊕_{h+i=n} X[h,i] with d = d_horizontal + (-1)^h d_vertical.

    ``vertical_sign=False`` drops the (-1)^h; it exists for negative controls.

    Returns eps: Tot -> M, t0: M -> Tot, and h^n = (t_0^{n+1}, t_1^n, ..., t_n^1, 0),
    verifying eps t0 = id and h d + d h = id - t0 eps.
    """
    check_double_complex(D)
    F = D.field
    top = D.width + D.height - 2
    comps = {n: [(n - i, i) for i in range(n + 1) if 0 <= n - i < D.width and i < D.height]
             for n in range(top + 2)}
    offs = {}
    dims = []
    for n in range(top + 1):
        pos = 0
        for hi in comps[n]:
            offs[hi] = pos
            pos += D.dim(*hi)
        dims.append(pos)

    def assemble(n_out, n_in, entry):
        rows = sum(D.dim(*c) for c in comps.get(n_out, [])) if n_out <= top else 0
        cols = dims[n_in] if n_in <= top else 0
        acc = [[F.zero] * cols for _ in range(rows)]
        for src in comps.get(n_in, []):
            for tgt in comps.get(n_out, []) if n_out <= top else []:
                B = entry(tgt, src)
                if B is None:
                    continue
                r0, c0 = offs[tgt], offs[src]
                for r in range(B.nrows):
                    for c in range(B.ncols):
                        if B.rows[r][c]:
                            acc[r0 + r][c0 + c] = B.rows[r][c]
        return Mat(F, acc, cols) if rows else Mat.zeros(F, 0, cols)

    def dtot(tgt, src):
        (h, i), (h2, i2) = src, tgt
        if (h2, i2) == (h - 1, i):
            return D.dh(h, i)
        if (h2, i2) == (h, i - 1):
            return D.dv(h, i).scale(-1 if h % 2 and vertical_sign else 1)
        return None

    diffs = {n: assemble(n - 1, n, dtot) for n in range(1, top + 1)}
    tot = Complex(F, tuple(dims), diffs)
    if vertical_sign:
        tot.check()
    eps = {}
    t0 = {}
    for n in range(top + 1):
        Mn = D.aug.dim(n)
        E = [[F.zero] * dims[n] for _ in range(Mn)]
        T = [[F.zero] * Mn for _ in range(dims[n])]
        if (0, n) in offs and n < D.height:
            e, t = D.e(n), D.th(0, n)
            c0 = offs[(0, n)]
            for r in range(Mn):
                for c in range(D.dim(0, n)):
                    E[r][c0 + c] = e.rows[r][c]
            for r in range(D.dim(0, n)):
                for c in range(Mn):
                    T[c0 + r][c] = t.rows[r][c]
        eps[n] = Mat(F, E, dims[n]) if Mn else Mat.zeros(F, 0, dims[n])
        t0[n] = Mat(F, T, Mn) if dims[n] else Mat.zeros(F, 0, Mn)
    eps_map = ChainMap(tot, D.aug, eps).check()
    t0_map = ChainMap(D.aug, tot, t0).check()

    def hmap(tgt, src):
        (h, i), (h2, i2) = src, tgt
        if (h2, i2) == (h + 1, i) and h + 1 < D.width:
            return D.th(h + 1, i)
        return None

    hh = {n: assemble(n + 1, n, hmap) for n in range(top + 1)}
    if not all((eps[n] @ t0[n]).is_identity() for n in range(top + 1)):
        raise ComplexError("eps t0 != id")
    if not is_homotopy(identity_map(tot), compose(t0_map, eps_map), hh):
        raise ComplexError("h d + d h != id - t0 eps")
    return TotalComplex(tot, eps_map, t0_map, hh, comps)


# ---------------------------------------------------------------- serialization

def complex_to_dict(X: Complex) -> dict:
    return {"field": X.field.spec(), "dims": list(X.dims),
            "differentials": {str(n): X.d(n).to_lists() for n in range(1, X.top + 1)}}


def complex_from_dict(raw: Mapping) -> Complex:
    F = Field.parse(raw.get("field"))
    return make_complex(F, raw["dims"], {int(n): D for n, D in raw.get("differentials", {}).items()})


def dump_complex(X: Complex) -> str:
    return json.dumps(complex_to_dict(X), indent=1, sort_keys=True)


def cohomology_dims(X, degrees: Sequence[int] | None = None) -> list[int]:
    """Homology of a chain Complex or cohomology of a CochainComplex, degreewise."""
    if isinstance(X, Complex):
        hs = homology_dims(X)
    else:
        hs = X.cohomology_dims()
    if degrees is None:
        return hs
    bad = [n for n in degrees if not 0 <= n < len(hs)]
    if bad:
        raise ValueError(f"degree {bad[0]} beyond constructed range")
    return [hs[n] for n in degrees]


# ---------------------------------------------------------------- bar-row double complexes

def _mult_matrix(B) -> Mat:
    """mu: B ⊗ B -> B, column a*dim+b."""
    F = B.field
    return Mat.from_columns(F, [B.mul[a][b] for a in range(B.dim) for b in range(B.dim)], B.dim)


def _action_matrix(M) -> Mat:
    """B ⊗ M -> M, column a*dimM+m."""
    F = M.algebra.field
    return Mat.from_columns(F, [M.left[a].col(m) for a in range(M.algebra.dim) for m in range(M.dim)], M.dim)


def _bar_differential(B, M, h: int) -> Mat:
    """B^{⊗(h+1)} ⊗ M -> B^{⊗h} ⊗ M, sum of (-1)^j times merging factors j and j+1."""
    from .exalg import kron
    F = B.field
    n, m = B.dim, M.dim
    mu, act = _mult_matrix(B), _action_matrix(M)
    acc = Mat.zeros(F, n ** h * m, n ** (h + 1) * m)
    for j in range(h + 1):
        left = Mat.identity(F, n ** j)
        if j < h:
            piece = kron(kron(left, mu), Mat.identity(F, n ** (h - 1 - j) * m))
        else:
            piece = kron(left, act)
        acc = acc + (piece if j % 2 == 0 else -piece)
    return acc


def _unit_insert(B, src_dim: int) -> Mat:
    """x -> 1 ⊗ x."""
    from .exalg import kron
    return kron(Mat.column(B.field, B.unit), Mat.identity(B.field, src_dim))


def bar_double_complex(B, mods: Sequence, vmaps: Mapping[int, Mat], width: int) -> DoubleComplex:
    """Rows are bar resolutions B^{⊗(h+1)} ⊗ M_i truncated at ``width`` columns.

    ``mods`` are left B-modules M_0..M_{H-1}; ``vmaps[i]: M_i -> M_{i-1}`` are B-linear with
    square zero. Columns 0..width-2 are bar terms; the last column is the kernel of the
    previous horizontal map, so every row stays exact with contraction
    t^{last} = id - t d. Vertical maps are Id ⊗ d_M.
    """
    from .exalg import kron
    if width < 2:
        raise ComplexError("width must be at least 2")
    F = B.field
    H = len(mods)
    aug = Complex(F, tuple(M.dim for M in mods), {i: vmaps[i] for i in range(1, H) if i in vmaps}).check()
    dims, hor, ver, eps, t = {}, {}, {}, {}, {}
    kbasis = {}
    for i, M in enumerate(mods):
        eps[i] = _action_matrix(M)
        t[(0, i)] = _unit_insert(B, M.dim)
        for h in range(width - 1):
            dims[(h, i)] = B.dim ** (h + 1) * M.dim
            if h >= 1:
                hor[(h, i)] = _bar_differential(B, M, h)
                t[(h, i)] = _unit_insert(B, dims[(h - 1, i)])
        last = width - 1
        prev = eps[i] if last == 1 else hor[(last - 1, i)]
        K = kernel_basis(prev)
        kbasis[i] = K
        dims[(last, i)] = K.ncols
        hor[(last, i)] = K
        # t^{last}: x -> x - t d x, written in kernel coordinates
        tprev = t[(last - 1, i)]
        proj = Mat.identity(F, dims[(last - 1, i)]) - tprev @ prev
        coords = solve_matrix(K, proj)
        if coords is None:
            raise ComplexError("internal error: x - t d x not in the kernel")
        t[(last, i)] = coords
    for i in range(1, H):
        dM = aug.d(i)
        for h in range(width - 1):
            ver[(h, i)] = kron(Mat.identity(F, B.dim ** (h + 1)), dM)
        last = width - 1
        big = kron(Mat.identity(F, B.dim ** last), dM) if last >= 1 else None
        coords = solve_matrix(kbasis[i - 1], big @ kbasis[i])
        if coords is None:
            raise ComplexError("vertical map does not preserve the closing kernels")
        ver[(last, i)] = coords
    D = DoubleComplex(F, dims, hor, ver, aug, eps, t, width, H)
    check_double_complex(D)
    return D
