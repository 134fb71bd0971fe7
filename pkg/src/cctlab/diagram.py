"""Diagrams of algebras over a finite category and their modules.

A diagram is contravariant: a morphism v: i -> j carries an algebra hom
phi^v: A^j -> A^i (``homs[v]``), and a module carries T^v: M^j -> M^i with
T^v(a m) = phi^v(a) T^v(m). Functoriality reads phi^{g∘f} = phi^f phi^g.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .algkit import (Algebra, AlgebraError, AlgebraHom, Bimodule, Module, ModuleError, algebra_from_dict,
                     algebra_to_dict, bimodule_from_dict, bimodule_to_dict, check_algebra_hom,
                     hom_constraints, is_module_map, make_algebra, regular_bimodule, regular_module,
                     unvec, validate_algebra, vec, zero_module)
from .algkit import validate_module as validate_single
from .exalg import Field, Mat, as_mat, kernel_basis, kron, quotient_basis, rank
from .fincat import (CatKind, CommaCat, FinCat, Functor, category_from_dict, category_to_dict, classify,
                     comma_category, subdivide)


class DiagramError(ValueError):
    pass


# ---------------------------------------------------------------- diagrams

@dataclass(frozen=True, eq=False)
class Diagram:
    category: FinCat
    algebras: Mapping[str, Algebra]
    homs: Mapping[str, Mat]  # v -> matrix of phi^v: A^{cod v} -> A^{dom v}

    @property
    def field(self) -> Field:
        return next(iter(self.algebras.values())).field

    def phi(self, v: str) -> Mat:
        return self.homs[v]

    def dims(self) -> dict[str, int]:
        return {o: self.algebras[o].dim for o in self.category.objects}


def complete_homs(C: FinCat, algebras: Mapping[str, Algebra], homs: Mapping[str, Mat]) -> dict[str, Mat]:
    """Fill in identities and composites of the given homs; conflicting composites raise."""
    out = dict(homs)
    for o in C.objects:
        out.setdefault(C.identity[o], Mat.identity(algebras[o].field, algebras[o].dim))
    changed = True
    while changed:
        changed = False
        for (g, f), h in C.table.items():
            if f in out and g in out:
                val = out[f] @ out[g]
                if h not in out:
                    out[h] = val
                    changed = True
    missing = [m for m in C.dom if m not in out]
    if missing:
        raise DiagramError(f"no hom given for morphism {missing[0]!r}")
    return out


def validate_diagram(D: Diagram) -> Diagram:
    C = D.category
    for o in C.objects:
        if o not in D.algebras:
            raise DiagramError(f"no algebra at object {o!r}")
        validate_algebra(D.algebras[o])
    for v in C.dom:
        src, tgt = D.algebras[C.cod[v]], D.algebras[C.dom[v]]
        try:
            check_algebra_hom(AlgebraHom(src, tgt, D.homs[v]))
        except AlgebraError as exc:
            raise DiagramError(f"phi^{v}: {exc}") from None
        except KeyError:
            raise DiagramError(f"no hom for morphism {v!r}") from None
    for o in C.objects:
        if not D.homs[C.identity[o]].is_identity():
            raise DiagramError(f"phi of identity at {o!r} is not the identity")
    for (g, f), h in C.table.items():
        if D.homs[h] != D.homs[f] @ D.homs[g]:
            raise DiagramError(f"functoriality fails: phi^({g}∘{f}) != phi^{f} phi^{g}")
    return D


def make_diagram(C: FinCat, algebras: Mapping[str, Algebra], homs: Mapping[str, Sequence] | None = None,
                 check: bool = True) -> Diagram:
    F = next(iter(algebras.values())).field
    mats = {}
    for v, M in (homs or {}).items():
        mats[v] = as_mat(F, M, algebras[C.dom[v]].dim, algebras[C.cod[v]].dim)
    D = Diagram(C, dict(algebras), complete_homs(C, algebras, mats))
    return validate_diagram(D) if check else D


def constant_diagram(C: FinCat, A: Algebra) -> Diagram:
    return make_diagram(C, {o: A for o in C.objects}, {v: Mat.identity(A.field, A.dim) for v in C.dom})


def pullback_diagram(f: Functor, A: Diagram) -> Diagram:
    D = f.source
    return Diagram(D, {s: A.algebras[f.ob(s)] for s in D.objects}, {v: A.homs[f(v)] for v in D.dom})


def subdivide_diagram(A: Diagram, sub=None):
    """A' = d*A over C'. Returns (A', subdivision)."""
    sub = sub or subdivide(A.category)
    return pullback_diagram(sub.d, A), sub


# ---------------------------------------------------------------- modules

@dataclass(frozen=True, eq=False)
class DiagModule:
    """Objectwise modules (or bimodules) with transition maps T^v: M^{cod v} -> M^{dom v}."""

    diagram: Diagram
    spaces: Mapping[str, Module]
    T: Mapping[str, Mat]

    @property
    def bimodule(self) -> bool:
        return all(isinstance(M, Bimodule) for M in self.spaces.values())

    def dims(self) -> dict[str, int]:
        return {o: self.spaces[o].dim for o in self.diagram.category.objects}


def validate_module(M: DiagModule) -> DiagModule:
    A, C = M.diagram, M.diagram.category
    for o in C.objects:
        X = M.spaces[o]
        if X.algebra is not A.algebras[o] and not X.algebra.structure_equal(A.algebras[o]):
            raise ModuleError(f"module at {o!r} is over the wrong algebra")
        try:
            validate_single(X)
        except ModuleError as exc:
            raise ModuleError(f"at {o!r}: {exc}") from None
    for v in C.dom:
        i, j = C.dom[v], C.cod[v]
        Tv = M.T[v]
        Mi, Mj = M.spaces[i], M.spaces[j]
        if Tv.shape != (Mi.dim, Mj.dim):
            raise ModuleError(f"T^{v} has shape {Tv.shape}, expected {(Mi.dim, Mj.dim)}")
        phi = A.homs[v]
        for a in range(Mj.algebra.dim):
            if Tv @ Mj.left[a] != Mi.act(phi.col(a)) @ Tv:
                raise ModuleError(f"T^{v} is not linear for the left action of basis element {a}")
            if isinstance(Mj, Bimodule) and isinstance(Mi, Bimodule):
                if Tv @ Mj.right[a] != Mi.ract(phi.col(a)) @ Tv:
                    raise ModuleError(f"T^{v} is not linear for the right action of basis element {a}")
    for o in C.objects:
        if not M.T[C.identity[o]].is_identity():
            raise ModuleError(f"T of the identity at {o!r} is not the identity")
    for (g, f), h in C.table.items():
        if M.T[h] != M.T[f] @ M.T[g]:
            raise ModuleError(f"naturality fails: T^({g}∘{f}) != T^{f} T^{g}")
    return M


def complete_T(C: FinCat, spaces: Mapping[str, Module], T: Mapping[str, Mat]) -> dict[str, Mat]:
    out = dict(T)
    for o in C.objects:
        X = spaces[o]
        out.setdefault(C.identity[o], Mat.identity(X.algebra.field, X.dim))
    changed = True
    while changed:
        changed = False
        for (g, f), h in C.table.items():
            if f in out and g in out and h not in out:
                out[h] = out[f] @ out[g]
                changed = True
    for m in C.dom:
        di, dj = spaces[C.dom[m]].dim, spaces[C.cod[m]].dim
        if m not in out and di * dj == 0:
            out[m] = Mat.zeros(spaces[C.dom[m]].algebra.field, di, dj)
    missing = [m for m in C.dom if m not in out]
    if missing:
        raise ModuleError(f"no transition map for morphism {missing[0]!r}")
    return out


def make_module(A: Diagram, spaces: Mapping[str, Module], T: Mapping[str, Sequence] | None = None,
                check: bool = True) -> DiagModule:
    C, F = A.category, A.field
    mats = {v: as_mat(F, M, spaces[C.dom[v]].dim, spaces[C.cod[v]].dim) for v, M in (T or {}).items()}
    M = DiagModule(A, dict(spaces), complete_T(C, spaces, mats))
    return validate_module(M) if check else M


def regular_diag_module(A: Diagram, bimodule: bool = False) -> DiagModule:
    """A as a module (or bimodule) over itself, T^v = phi^v."""
    reg = regular_bimodule if bimodule else regular_module
    return DiagModule(A, {o: reg(A.algebras[o]) for o in A.category.objects}, dict(A.homs))


def zero_diag_module(A: Diagram, bimodule: bool = False) -> DiagModule:
    F = A.field
    return DiagModule(A, {o: zero_module(A.algebras[o], bimodule) for o in A.category.objects},
                      {v: Mat.zeros(F, 0, 0) for v in A.category.dom})


def pullback_module(f: Functor, N: DiagModule, A_pulled: Diagram | None = None) -> DiagModule:
    A_pulled = A_pulled or pullback_diagram(f, N.diagram)
    D = f.source
    return DiagModule(A_pulled, {s: N.spaces[f.ob(s)] for s in D.objects}, {v: N.T[f(v)] for v in D.dom})


def subdivide_module(M: DiagModule, sub=None, A_sub: Diagram | None = None) -> DiagModule:
    sub = sub or subdivide(M.diagram.category)
    return pullback_module(sub.d, M, A_sub)


# ---------------------------------------------------------------- maps

@dataclass(frozen=True, eq=False)
class DiagModuleMap:
    source: DiagModule
    target: DiagModule
    maps: Mapping[str, Mat]

    def __matmul__(self, other: "DiagModuleMap") -> "DiagModuleMap":
        return DiagModuleMap(other.source, self.target,
                             {o: self.maps[o] @ other.maps[o] for o in self.maps})

    def is_zero(self) -> bool:
        return all(m.is_zero() for m in self.maps.values())

    def is_identity(self) -> bool:
        return all(m.is_identity() for m in self.maps.values())

    def flat(self) -> tuple:
        objs = self.source.diagram.category.objects
        return tuple(x for o in objs for x in vec(self.maps[o]))


def check_module_map(eta: DiagModuleMap) -> None:
    M, N = eta.source, eta.target
    C = M.diagram.category
    for o in C.objects:
        if not is_module_map(eta.maps[o], M.spaces[o], N.spaces[o]):
            raise ModuleError(f"component at {o!r} is not a module map")
    for v in C.dom:
        i, j = C.dom[v], C.cod[v]
        if eta.maps[i] @ M.T[v] != N.T[v] @ eta.maps[j]:
            raise ModuleError(f"naturality square for {v!r} does not commute")


def identity_map(M: DiagModule) -> DiagModuleMap:
    F = M.diagram.field
    return DiagModuleMap(M, M, {o: Mat.identity(F, X.dim) for o, X in M.spaces.items()})


def pullback_map(f: Functor, eta: DiagModuleMap, source: DiagModule, target: DiagModule) -> DiagModuleMap:
    """(f*eta)^σ = eta^{fσ}; ``source``/``target`` are the pulled-back modules."""
    return DiagModuleMap(source, target, {s: eta.maps[f.ob(s)] for s in f.source.objects})


def hom_space(M: DiagModule, N: DiagModule) -> list[DiagModuleMap]:
    """Basis of natural module maps M -> N; two-sided linearity when both are bimodules."""
    if M.diagram.category is not N.diagram.category and \
            M.diagram.category.objects != N.diagram.category.objects:
        raise DiagramError("modules live over different diagrams")
    C, F = M.diagram.category, M.diagram.field
    objs = C.objects
    offs, pos = {}, 0
    for o in objs:
        offs[o] = pos
        pos += N.spaces[o].dim * M.spaces[o].dim
    total = pos
    blocks = []
    for o in objs:
        K = hom_constraints(M.spaces[o], N.spaces[o])
        if K.nrows:
            blocks.append(_embed_cols(F, K, offs[o], total))
    for v in C.non_identity():
        i, j = C.dom[v], C.cod[v]
        # eta^i T_M^v - T_N^v eta^j = 0 on row-major vecs
        ni, mj = N.spaces[i].dim, M.spaces[j].dim
        if ni * mj == 0:
            continue
        left = kron(Mat.identity(F, ni), M.T[v].T)      # vec(eta^i) -> vec(eta^i T_M)
        right = kron(N.T[v], Mat.identity(F, mj))       # vec(eta^j) -> vec(T_N eta^j)
        R = _embed_cols(F, left, offs[i], total) - _embed_cols(F, right, offs[j], total)
        blocks.append(R)
    S = Mat.vstack(F, blocks, total) if blocks else Mat.zeros(F, 0, total)
    Kb = kernel_basis(S)
    out = []
    for c in range(Kb.ncols):
        col = Kb.col(c)
        maps = {o: unvec(F, col[offs[o]:offs[o] + N.spaces[o].dim * M.spaces[o].dim],
                         N.spaces[o].dim, M.spaces[o].dim) for o in objs}
        out.append(DiagModuleMap(M, N, maps))
    return out


hom_space_bimod = hom_space


def _embed_cols(F: Field, B: Mat, offset: int, total: int) -> Mat:
    rows = []
    z = F.zero
    for r in B.rows:
        rows.append((z,) * offset + r + (z,) * (total - offset - B.ncols))
    return Mat._raw(F, tuple(rows), total) if rows else Mat.zeros(F, 0, total)


def maps_rank(maps: Sequence[DiagModuleMap]) -> int:
    if not maps:
        return 0
    F = maps[0].source.diagram.field
    return rank(Mat(F, [m.flat() for m in maps], len(maps[0].flat())))


# ---------------------------------------------------------------- f_!

@dataclass(frozen=True, eq=False)
class ShriekPushforward:
    """f_!N with the presentation data needed for units, counits and maps.

    For each object i, ``raw[i]`` lists the comma objects (w, σ) with the offset of
    A^i ⊗ N^σ inside the raw direct sum; ``proj[i]``/``sect[i]`` descend to the colimit.
    """

    functor: Functor
    source: DiagModule
    module: DiagModule
    comma: Mapping[str, CommaCat]
    raw: Mapping[str, list]
    raw_dim: Mapping[str, int]
    proj: Mapping[str, Mat]
    sect: Mapping[str, Mat]


def f_shriek(f: Functor, N: DiagModule, A: Diagram) -> ShriekPushforward:
    """Left Kan extension of N (over f*A) along f, as a module over A."""
    C, F = A.category, A.field
    commas, raws, rdims, projs, sects, spaces = {}, {}, {}, {}, {}, {}
    for i in C.objects:
        Ai = A.algebras[i]
        cc = comma_category(f, i)
        commas[i] = cc
        comps, pos = [], 0
        where = {}
        for name, (w, sigma) in cc.objects.items():
            n = N.spaces[sigma].dim
            comps.append((name, w, sigma, pos, n))
            where[name] = (pos, n)
            pos += Ai.dim * n
        total = pos
        rel_cols = []
        # balanced tensor relations a phi^w(b) ⊗ n - a ⊗ b n
        for name, w, sigma, off, n in comps:
            if n == 0:
                continue
            Ns = N.spaces[sigma]
            phi = A.homs[w]
            for b in range(Ns.algebra.dim):
                R = kron(Ai.right_mult(phi.col(b)), Mat.identity(F, n)) - kron(Mat.identity(F, Ai.dim), Ns.left[b])
                rel_cols += _shift_columns(R, off, total)
        # colimit identifications x - (Id ⊗ T^v) x along comma morphisms (u,τ) -> (w,σ)
        for mname, v in cc.morphisms.items():
            if f.source.is_identity(v):
                continue
            a_name, b_name = cc.category.dom[mname], cc.category.cod[mname]
            (pa, na), (pb, nb) = where[a_name], where[b_name]
            if nb == 0:
                continue
            moved = kron(Mat.identity(F, Ai.dim), N.T[v])  # A^i ⊗ N^σ -> A^i ⊗ N^τ
            for c in range(Ai.dim * nb):
                col = [F.zero] * total
                col[pb + c] = F.one
                for r in range(Ai.dim * na):
                    x = moved[r, c]
                    if x:
                        col[pa + r] = F.reduce(col[pa + r] - x)
                rel_cols.append(tuple(col))
        W = Mat.from_columns(F, rel_cols, total)
        q = quotient_basis(Mat.identity(F, total), W)
        raws[i], rdims[i], projs[i], sects[i] = comps, total, q.projection, q.section
        left = []
        for a in range(Ai.dim):
            big = Mat.block_diag(F, [kron(Ai.left_regular(a), Mat.identity(F, n)) for *_, n in comps]) \
                if comps else Mat.zeros(F, 0, 0)
            left.append(q.projection @ big @ q.section)
        spaces[i] = Module(Ai, q.dim, tuple(left))
    T = {}
    for v in C.dom:
        h, i = C.dom[v], C.cod[v]
        reidx = commas[i].reindex(v, commas[h])
        hpos = {name: (off, n) for name, _, _, off, n in raws[h]}
        phi = A.homs[v]
        big = [[F.zero] * rdims[i] for _ in range(rdims[h])]
        for name, w, sigma, off, n in raws[i]:
            tgt_off, _ = hpos[reidx[name]]
            blk = kron(phi, Mat.identity(F, n))
            for r in range(blk.nrows):
                for c in range(blk.ncols):
                    if blk[r, c]:
                        big[tgt_off + r][off + c] = blk[r, c]
        bigm = Mat(F, big, rdims[i]) if rdims[h] else Mat.zeros(F, 0, rdims[i])
        T[v] = projs[h] @ bigm @ sects[i]
    out = DiagModule(A, spaces, T)
    validate_module(out)
    return ShriekPushforward(f, N, out, commas, raws, rdims, projs, sects)


def _shift_columns(R: Mat, off: int, total: int) -> list[tuple]:
    F = R.field
    cols = []
    for c in range(R.ncols):
        col = [F.zero] * total
        for r in range(R.nrows):
            col[off + r] = R[r, c]
        cols.append(tuple(col))
    return cols


def f_shriek_map(P: ShriekPushforward, Q: ShriekPushforward, theta: DiagModuleMap) -> DiagModuleMap:
    """f_!(theta) for theta: P.source -> Q.source."""
    A = P.module.diagram
    F = A.field
    maps = {}
    for i in A.category.objects:
        Ai = A.algebras[i]
        qpos = {name: (off, n) for name, _, _, off, n in Q.raw[i]}
        big = [[F.zero] * P.raw_dim[i] for _ in range(Q.raw_dim[i])]
        for name, w, sigma, off, n in P.raw[i]:
            toff, tn = qpos[name]
            blk = kron(Mat.identity(F, Ai.dim), theta.maps[sigma])
            for r in range(blk.nrows):
                for c in range(blk.ncols):
                    if blk[r, c]:
                        big[toff + r][off + c] = blk[r, c]
        bigm = Mat(F, big, P.raw_dim[i]) if Q.raw_dim[i] else Mat.zeros(F, 0, P.raw_dim[i])
        maps[i] = Q.proj[i] @ bigm @ P.sect[i]
    return DiagModuleMap(P.module, Q.module, maps)


def shriek_unit(P: ShriekPushforward, pulled: DiagModule) -> DiagModuleMap:
    """N -> f*f_!N: n ↦ [1 ⊗ n] in the component (id, σ). ``pulled`` is f*(f_!N)."""
    f, N = P.functor, P.source
    A = P.module.diagram
    F = A.field
    maps = {}
    for sigma in f.source.objects:
        i = f.ob(sigma)
        Ai = A.algebras[i]
        key = P.comma[i].name_of(A.category.identity[i], sigma)
        pos = {name: (off, n) for name, _, _, off, n in P.raw[i]}
        off, n = pos[key]
        inc = kron(Mat.column(F, Ai.unit), Mat.identity(F, n))
        big = [[F.zero] * n for _ in range(P.raw_dim[i])]
        for r in range(inc.nrows):
            for c in range(n):
                big[off + r][c] = inc[r, c]
        bigm = Mat(F, big, n) if P.raw_dim[i] else Mat.zeros(F, 0, n)
        maps[sigma] = P.proj[i] @ bigm
    return DiagModuleMap(N, pulled, maps)


def shriek_counit(P: ShriekPushforward, M: DiagModule) -> DiagModuleMap:
    """f_!f*M -> M: a ⊗ m ↦ a T^w(m). ``P`` must be f_! of f*M."""
    A = M.diagram
    F = A.field
    maps = {}
    for i in A.category.objects:
        Mi = M.spaces[i]
        cols = []
        for name, w, sigma, off, n in P.raw[i]:
            Tw = M.T[w]
            for a in range(A.algebras[i].dim):
                blk = Mi.left[a] @ Tw
                cols += blk.columns()
        E = Mat.from_columns(F, cols, Mi.dim)
        maps[i] = E @ P.sect[i]
        # well-definedness: the raw map must kill the relations
        if not (E @ P.sect[i] @ P.proj[i] - E).is_zero():
            raise DiagramError(f"counit is not well defined at {i!r}")
    return DiagModuleMap(P.module, M, maps)


@dataclass
class AdjunctionReport:
    triangle_left: bool     # eps_{f_!N} ∘ f_!(unit_N) = id
    triangle_right: bool    # f*(eps_M) ∘ unit_{f*M} = id
    counit_invertible: bool
    hom_dims: tuple[int, int]
    bijection: bool

    @property
    def ok(self) -> bool:
        return self.triangle_left and self.triangle_right and self.bijection


def adjunction_data(f: Functor, N: DiagModule, M: DiagModule, require_invertible: bool = False) -> AdjunctionReport:
    A = M.diagram
    Af = N.diagram
    PN = f_shriek(f, N, A)
    pulled_PN = pullback_module(f, PN.module, Af)
    unitN = shriek_unit(PN, pulled_PN)
    check_module_map(unitN)
    # triangle 1: f_!N -> f_! f* f_! N -> f_!N
    PP = f_shriek(f, pulled_PN, A)
    fu = f_shriek_map(PN, PP, unitN)
    eps_PN = shriek_counit(PP, PN.module)
    tri1 = (eps_PN @ fu).is_identity()
    # triangle 2: f*M -> f* f_! f*M -> f*M
    fM = pullback_module(f, M, Af)
    PfM = f_shriek(f, fM, A)
    epsM = shriek_counit(PfM, M)
    check_module_map(epsM)
    unit_fM = shriek_unit(PfM, pullback_module(f, PfM.module, Af))
    tri2 = (pullback_map(f, epsM, pullback_module(f, PfM.module, Af), fM) @ unit_fM).is_identity()
    invertible = all(m.nrows == m.ncols and rank(m) == m.nrows for m in epsM.maps.values())
    # Hom(f_!N, M) -> Hom(N, f*M), xi ↦ f*(xi) ∘ unit
    left = hom_space(PN.module, M)
    right = hom_space(N, fM)
    images = [pullback_map(f, xi, pulled_PN, fM) @ unitN for xi in left]
    for im in images:
        check_module_map(im)
    bij = len(left) == len(right) and maps_rank(images) == len(right)
    return AdjunctionReport(tri1, tri2, invertible, (len(left), len(right)), bij)


# ---------------------------------------------------------------- the ! construction

@dataclass(frozen=True, eq=False)
class ShriekAlgebra:
    """A! over a poset: basis (i, j, b) for i <= j and b a basis element of A^i."""

    algebra: Algebra
    index: tuple          # position -> (i, j, b)
    position: Mapping     # (i, j, b) -> position
    idempotents: tuple    # 1_i phi^{ii} as coefficient vectors
    diagram: Diagram


def _require_poset(C: FinCat) -> None:
    if classify(C) != CatKind.POSET:
        raise DiagramError("the ! construction needs a poset base; subdivide first")


def _pairs(C: FinCat) -> list[tuple[str, str, str]]:
    """(i, j, morphism i -> j) for all i <= j, in object order."""
    out = []
    for i in C.objects:
        for j in C.objects:
            h = C.hom(i, j)
            if h:
                out.append((i, j, h[0]))
    return out


def shriek_algebra(A: Diagram, check: bool = True) -> ShriekAlgebra:
    C, F = A.category, A.field
    _require_poset(C)
    pairs = _pairs(C)
    index = []
    for i, j, _ in pairs:
        index += [(i, j, b) for b in range(A.algebras[i].dim)]
    pos = {key: n for n, key in enumerate(index)}
    mor = {(i, j): m for i, j, m in pairs}
    n = len(index)
    prods = {}
    for (h, i, b1), p in pos.items():
        Ah = A.algebras[h]
        phi = A.homs[mor[(h, i)]]
        for (i2, l, b2), q in pos.items():
            if i2 != i:
                continue
            val = Ah.multiply(Ah.basis(b1), phi.col(b2))
            vec_ = [F.zero] * n
            for c, x in enumerate(val):
                if x:
                    vec_[pos[(h, l, c)]] = x
            prods[(p, q)] = vec_
    idems = []
    for i in C.objects:
        e = [F.zero] * n
        for c, x in enumerate(A.algebras[i].unit):
            if x:
                e[pos[(i, i, c)]] = x
        idems.append(tuple(e))
    unit = [F.zero] * n
    for e in idems:
        unit = [F.reduce(a + b) for a, b in zip(unit, e)]
    B = make_algebra(F, n, prods, unit, "A!", check=check)
    return ShriekAlgebra(B, tuple(index), pos, tuple(idems), A)


def shriek_bimodule(M: DiagModule, SA: ShriekAlgebra, check: bool = True) -> Bimodule:
    """M! over A!: (a φ^{hi})(m φ^{ij}) = a T^{hi}(m) φ^{hj}, (m φ^{hi})(a φ^{ij}) = m φ^{hi}(a) φ^{hj}."""
    A = M.diagram
    C, F = A.category, A.field
    _require_poset(C)
    pairs = _pairs(C)
    mor = {(i, j): m for i, j, m in pairs}
    mindex = []
    for i, j, _ in pairs:
        mindex += [(i, j, m) for m in range(M.spaces[i].dim)]
    mpos = {key: n for n, key in enumerate(mindex)}
    dim = len(mindex)
    left, right = [], []
    for (h, i, b) in SA.index:
        v = mor[(h, i)]
        L = [[F.zero] * dim for _ in range(dim)]
        R = [[F.zero] * dim for _ in range(dim)]
        Mh = M.spaces[h]
        # left: e_(h,i,b) acting on m in component (i, j)
        act = Mh.left[b] @ M.T[v]                 # M^i -> M^h
        for (i2, j, m), c in mpos.items():
            if i2 != i:
                continue
            col = act.col(m)
            for r, x in enumerate(col):
                if x:
                    L[mpos[(h, j, r)]][c] = x
        # right: m in component (g, h) times e_(h,i,b) lands in (g, i)
        for (g, h2, m), c in mpos.items():
            if h2 != h:
                continue
            ract = M.spaces[g].ract(A.homs[mor[(g, h)]].col(b))
            col = ract.col(m)
            for r, x in enumerate(col):
                if x:
                    R[mpos[(g, i, r)]][c] = x
        left.append(Mat(F, L, dim) if dim else Mat.zeros(F, 0, 0))
        right.append(Mat(F, R, dim) if dim else Mat.zeros(F, 0, 0))
    X = Bimodule(SA.algebra, dim, tuple(left), tuple(right))
    if check:
        validate_single(X)
    return X


def shriek_map(eta: DiagModuleMap) -> Mat:
    """η!: block diagonal with η^i on each (i, j) component of M!."""
    A = eta.source.diagram
    C, F = A.category, A.field
    _require_poset(C)
    return Mat.block_diag(F, [eta.maps[i] for i, j, _ in _pairs(C)])


# ---------------------------------------------------------------- bundles

def diagram_from_dict(raw: Mapping, field: Field | None = None) -> Diagram:
    C = category_from_dict(raw["category"])
    F = field or Field.parse(raw.get("field"))
    algs = {str(o): algebra_from_dict(a, F) for o, a in raw["algebras"].items()}
    return make_diagram(C, algs, raw.get("homs", {}))


def diagram_to_dict(A: Diagram) -> dict:
    C = A.category
    return {"field": A.field.spec(), "category": category_to_dict(C),
            "algebras": {o: algebra_to_dict(A.algebras[o]) for o in C.objects},
            "homs": {v: A.homs[v].to_lists() for v in C.non_identity()}}


def module_from_dict(A: Diagram, raw: Mapping) -> DiagModule:
    spaces = {str(o): bimodule_from_dict(A.algebras[str(o)], m) for o, m in raw["modules"].items()}
    return make_module(A, spaces, raw.get("T", {}))


def module_to_dict(M: DiagModule) -> dict:
    C = M.diagram.category
    return {"modules": {o: bimodule_to_dict(M.spaces[o]) for o in C.objects},
            "T": {v: M.T[v].to_lists() for v in C.non_identity()}}
