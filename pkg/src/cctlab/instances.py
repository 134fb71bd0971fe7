"""Curated diagrams, per-algebra module lists, and seeded random instances."""

from __future__ import annotations

import itertools
import random

from .algkit import (Algebra, Bimodule, Module, _commutator_rows, direct_sum, dual_numbers, ground_field,
                     regular_bimodule, regular_module, split_pair, unvec, zero_module)
from .diagram import Diagram, DiagModule, constant_diagram, make_diagram, make_module
from .exalg import QQ, Field, Mat, kernel_basis, kron
from .fincat import FinCat, chain_category, parallel_pair, poset_category, validate_category


# ---------------------------------------------------------------- categories

def square_poset() -> FinCat:
    return poset_category("abcd", [("a", "b"), ("a", "c"), ("b", "d"), ("c", "d")])


def random_delta(rng: random.Random, max_objects: int = 5, max_morphisms: int = 8) -> FinCat:
    """A quiver on a DAG (parallel arrows allowed) modulo "paths of length >= L with equal ends agree".

    L = 1 gives a poset, larger L keeps short parallel paths distinct.
    """
    while True:
        n = rng.randint(1, max_objects)
        arrows = []
        for i, j in itertools.combinations(range(n), 2):
            k = rng.choice((0, 0, 1, 1, 2))
            arrows += [(f"a{len(arrows) + t}", i, j) for t in range(k)]
        L = rng.choice((1, 2, 3))
        C = _path_category(n, arrows, L, max_morphisms)
        if C is not None:
            return C


def _path_category(n: int, arrows, L: int, limit: int) -> FinCat | None:
    out = {i: [a for a in arrows if a[1] == i] for i in range(n)}
    paths = []  # tuples of arrow names, with endpoints
    layer = [((a[0],), a[1], a[2]) for a in arrows]
    while layer:
        paths += layer
        if len(paths) > 64:
            return None
        layer = [(p + (a[0],), s, a[2]) for p, s, t in layer for a in out[t]]

    def cls(p, s, t):
        return f"L{s}_{t}" if len(p) >= L else ".".join(p)

    mors = {}
    for p, s, t in paths:
        mors[cls(p, s, t)] = (str(s), str(t))
    if len(mors) > limit:
        return None
    by_class = {}
    for p, s, t in paths:
        by_class.setdefault(cls(p, s, t), (p, s, t))
    comp = []
    for g, (pg, sg, tg) in by_class.items():
        for f, (pf, sf, tf) in by_class.items():
            if tf == sg:
                # any representatives give the same class
                comp.append((g, f, cls(pf + pg, sf, tg)))
    return validate_category([str(i) for i in range(n)], [(m, s, t) for m, (s, t) in mors.items()], comp)


def random_poset(rng: random.Random, max_objects: int = 5) -> FinCat:
    n = rng.randint(1, max_objects)
    rel = [(str(i), str(j)) for i, j in itertools.combinations(range(n), 2) if rng.random() < 0.4]
    return poset_category([str(i) for i in range(n)], rel)


# ---------------------------------------------------------------- curated diagrams

def _p2() -> FinCat:
    return chain_category(2)


def curated_diagrams(F: Field = QQ) -> dict[str, Diagram]:
    """The five poset diagrams used by the SCCT and invariance suites."""
    k, kx, kk = ground_field(F), dual_numbers(F), split_pair(F)
    P2 = _p2()
    return {
        "const-k-P2": constant_diagram(P2, k),
        "dual-to-k-P2": make_diagram(P2, {"0": kx, "1": k}, {"0<1": [[1], [0]]}),
        "const-k-chain3": constant_diagram(chain_category(3), k),
        "split-to-k-P2": make_diagram(P2, {"0": kk, "1": k}, {"0<1": [[1], [1]]}),
        "const-k-square": constant_diagram(square_poset(), k),
    }


def parallel_pair_diagram(F: Field = QQ) -> Diagram:
    return constant_diagram(parallel_pair(), ground_field(F))


# ---------------------------------------------------------------- curated modules per algebra

def _one_dim_module(A: Algebra, chars: tuple, right: tuple | None = None) -> Module:
    F = A.field
    left = tuple(Mat(F, [[c]], 1) for c in chars)
    if right is None:
        return Module(A, 1, left)
    return Bimodule(A, 1, left, tuple(Mat(F, [[c]], 1) for c in right))


def module_choices(A: Algebra, bimodule: bool = False) -> list[Module]:
    """Small indecomposable (bi)modules for the curated algebras; the regular one otherwise."""
    reg = regular_bimodule(A) if bimodule else regular_module(A)
    name = A.name
    if name == "k":
        return [reg]
    if name == "k[x]/x^2":
        simple = _one_dim_module(A, (1, 0), (1, 0) if bimodule else None)
        return [reg, simple]
    if name == "k x k":
        if bimodule:
            return [reg] + [_one_dim_module(A, a, b) for a in ((1, 0), (0, 1)) for b in ((1, 0), (0, 1))]
        return [reg, _one_dim_module(A, (1, 0)), _one_dim_module(A, (0, 1))]
    if name == "T_2":
        if bimodule:
            return [reg, _one_dim_module(A, (1, 0, 0), (1, 0, 0)), _one_dim_module(A, (0, 0, 1), (0, 0, 1))]
        return [reg, _one_dim_module(A, (1, 0, 0)), _one_dim_module(A, (0, 0, 1))]
    return [reg]


def random_space(A: Algebra, rng: random.Random, bimodule: bool, max_summands: int = 2) -> Module:
    choices = module_choices(A, bimodule)
    k = rng.randint(0, max_summands)
    if k == 0:
        return zero_module(A, bimodule)
    return direct_sum([rng.choice(choices) for _ in range(k)])


# ---------------------------------------------------------------- random transition maps

def irreducible(C: FinCat) -> list[str]:
    """Non-identity morphisms that are not composites of two non-identity morphisms."""
    composite = {h for (g, f), h in C.table.items() if not C.is_identity(g) and not C.is_identity(f)}
    return [m for m in C.non_identity() if m not in composite]


def topological_order(C: FinCat) -> list[str]:
    order, seen = [], set()

    def visit(o):
        if o in seen:
            return
        seen.add(o)
        for m in C.out_of(o):
            if not C.is_identity(m):
                visit(C.cod[m])
        order.append(o)

    for o in C.objects:
        visit(o)
    return order  # sinks first


def sample_transitions(A: Diagram, spaces: dict, rng: random.Random, coeffs=(-2, -1, 0, 1, 2)) -> dict:
    """Random T^v satisfying linearity and functoriality, object by object from the sinks.

    At object h the unknowns are T^v for irreducible v out of h; every pair of
    factorizations r∘v = r'∘v' of a morphism out of h gives the linear
    condition T^v T^r = T^{v'} T^{r'} since everything downstream is fixed.
    """
    C, F = A.category, A.field
    irr = set(irreducible(C))
    T = {C.identity[o]: Mat.identity(F, spaces[o].dim) for o in C.objects}
    for h in topological_order(C):
        Mh = spaces[h]
        outs = [v for v in C.out_of(h) if v in irr]
        offs, pos = {}, 0
        for v in outs:
            offs[v] = pos
            pos += Mh.dim * spaces[C.cod[v]].dim
        total = pos
        rows = []

        def place(B, v):
            z = F.zero
            return [(z,) * offs[v] + r + (z,) * (total - offs[v] - B.ncols) for r in B.rows]

        for v in outs:
            i = C.cod[v]
            Mi = spaces[i]
            phi = A.homs[v]
            for a in range(Mi.algebra.dim):
                rows += place(_commutator_rows(F, Mi.left[a], Mh.act(phi.col(a))), v)
                if isinstance(Mi, Bimodule) and isinstance(Mh, Bimodule):
                    rows += place(_commutator_rows(F, Mi.right[a], Mh.ract(phi.col(a))), v)
        facts: dict[str, list] = {}
        for v in outs:
            for r in C.out_of(C.cod[v]):
                facts.setdefault(C.compose(r, v), []).append((v, r))
        for x, fs in facts.items():
            (v0, r0) = fs[0]
            for v1, r1 in fs[1:]:
                # vec(T^v T^r) = (I ⊗ (T^r)^T) vec(T^v)
                a = place(kron(Mat.identity(F, Mh.dim), T[r0].T), v0)
                b = place(kron(Mat.identity(F, Mh.dim), T[r1].T), v1)
                rows += [tuple(F.reduce(p - q) for p, q in zip(ra, rb)) for ra, rb in zip(a, b)]
        if total:
            S = Mat(F, rows, total) if rows else Mat.zeros(F, 0, total)
            K = kernel_basis(S)
            sol = [F.zero] * total
            for c in range(K.ncols):
                w = F(rng.choice(coeffs))
                if w:
                    sol = [F.reduce(s + w * x) for s, x in zip(sol, K.col(c))]
        else:
            sol = []
        for v in outs:
            i = C.cod[v]
            n = Mh.dim * spaces[i].dim
            T[v] = unvec(F, sol[offs[v]:offs[v] + n], Mh.dim, spaces[i].dim)
        for x, fs in facts.items():
            v, r = fs[0]
            T.setdefault(x, T[v] @ T[r])
    return T


def random_module(A: Diagram, rng: random.Random, bimodule: bool = False, max_summands: int = 2) -> DiagModule:
    spaces = {o: random_space(A.algebras[o], rng, bimodule, max_summands) for o in A.category.objects}
    T = sample_transitions(A, spaces, rng)
    return make_module(A, spaces, {v: m for v, m in T.items()})

