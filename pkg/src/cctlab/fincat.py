"""Finite categories, subdivision and comma categories.

Composition uses applicative order throughout: ``compose(g, f)`` is "f then g"
and requires ``cod(f) == dom(g)``.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple


class CategoryError(ValueError):
    pass


class CatKind(enum.IntEnum):
    GENERAL = 0
    DELTA = 1
    POSET = 2

    def __str__(self):
        return self.name.lower()


def identity_name(obj: str) -> str:
    return f"id_{obj}"


@dataclass(frozen=True, eq=False)
class FinCat:
    objects: tuple[str, ...]
    dom: Mapping[str, str]
    cod: Mapping[str, str]
    identity: Mapping[str, str]
    table: Mapping[tuple[str, str], str]
    _hom: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def morphisms(self) -> list[str]:
        return list(self.dom)

    def non_identity(self) -> list[str]:
        ids = set(self.identity.values())
        return [m for m in self.dom if m not in ids]

    def is_identity(self, m: str) -> bool:
        return self.identity[self.dom[m]] == m

    def hom(self, i: str, j: str) -> list[str]:
        if not self._hom:
            for m in self.dom:
                self._hom.setdefault((self.dom[m], self.cod[m]), []).append(m)
        return self._hom.get((i, j), [])

    def compose(self, g: str, f: str) -> str:
        if self.cod[f] != self.dom[g]:
            raise CategoryError(f"cannot compose {g} after {f}: cod({f}) != dom({g})")
        return self.table[(g, f)]

    def out_of(self, i: str) -> list[str]:
        return [m for m in self.dom if self.dom[m] == i]

    def __len__(self):
        return len(self.objects)

    def summary(self) -> dict:
        return {"objects": len(self.objects), "non_identity": len(self.non_identity()),
                "kind": str(classify(self))}


def validate_category(objects: Iterable[str], morphisms: Iterable[tuple[str, str, str]],
                      compose: Iterable[tuple[str, str, str]] = (),
                      identities: Mapping[str, str] | None = None) -> FinCat:
    """Build a FinCat, checking identities, closure and associativity.

    ``morphisms`` are ``(name, dom, cod)`` triples that do not include identities
    unless ``identities`` names them. ``compose`` holds ``(g, f, g∘f)`` entries;
    composites with identities are filled in automatically.
    """
    objects = tuple(objects)
    if len(set(objects)) != len(objects):
        raise CategoryError("duplicate object names")
    obj_set = set(objects)
    dom: dict[str, str] = {}
    cod: dict[str, str] = {}
    ident = dict(identities or {})
    for o in objects:
        ident.setdefault(o, identity_name(o))
    for o, m in ident.items():
        if o not in obj_set:
            raise CategoryError(f"identity for unknown object {o!r}")
        dom[m] = cod[m] = o
    for name, d, c in morphisms:
        if name in dom:
            if (dom[name], cod[name]) != (d, c) or ident.get(d) != name:
                raise CategoryError(f"duplicate morphism {name!r}")
            continue
        if d not in obj_set or c not in obj_set:
            raise CategoryError(f"dangling dom/cod for morphism {name!r}")
        dom[name], cod[name] = d, c
    if len(set(ident.values())) != len(ident):
        raise CategoryError("missing identity: identities are not distinct")

    table: dict[tuple[str, str], str] = {}
    for f in dom:
        table[(ident[cod[f]], f)] = f
        table[(f, ident[dom[f]])] = f
    for g, f, h in compose:
        for m in (g, f, h):
            if m not in dom:
                raise CategoryError(f"composition entry names unknown morphism {m!r}")
        if cod[f] != dom[g]:
            raise CategoryError(f"composition entry ({g}, {f}) is not composable")
        if (dom[h], cod[h]) != (dom[f], cod[g]):
            raise CategoryError(f"composition entry {g}∘{f} = {h} does not respect dom/cod")
        prev = table.get((g, f))
        if prev is not None and prev != h:
            raise CategoryError(f"conflicting composition entries for ({g}, {f})")
        table[(g, f)] = h
    C = FinCat(objects, dom, cod, ident, table)
    check_category(C)
    return C


def check_category(C: FinCat) -> None:
    """Raise CategoryError unless C satisfies closure, unit and associativity laws."""
    for m in C.dom:
        if C.dom[m] not in C.identity or C.cod[m] not in C.identity:
            raise CategoryError(f"missing identity for an endpoint of {m!r}")
    by_dom: dict[str, list[str]] = {}
    for m in C.dom:
        by_dom.setdefault(C.dom[m], []).append(m)
    for f in C.dom:
        for g in by_dom.get(C.cod[f], []):
            h = C.table.get((g, f))
            if h is None:
                raise CategoryError(f"incomplete table: missing compose({g}, {f})")
            if (C.dom[h], C.cod[h]) != (C.dom[f], C.cod[g]):
                raise CategoryError(f"compose({g}, {f}) = {h} does not respect dom/cod")
    for m in C.dom:
        if C.table[(C.identity[C.cod[m]], m)] != m or C.table[(m, C.identity[C.dom[m]])] != m:
            raise CategoryError(f"missing identity law for {m!r}")
    for f in C.dom:
        for g in by_dom.get(C.cod[f], []):
            gf = C.table[(g, f)]
            for h in by_dom.get(C.cod[g], []):
                if C.table[(h, gf)] != C.table[(C.table[(h, g)], f)]:
                    raise CategoryError(f"not associative at ({h}, {g}, {f})")


def poset_category(objects: Iterable[str], relations: Iterable[tuple[str, str]]) -> FinCat:
    """The poset generated by ``relations`` (transitively closed); morphism i→j is named ``i<j``."""
    objects = tuple(str(o) for o in objects)
    below = {o: {o} for o in objects}
    rel = {(str(i), str(j)) for i, j in relations if str(i) != str(j)}
    changed = True
    less = set(rel)
    while changed:
        changed = False
        for (a, b), (c, d) in itertools.product(list(less), list(less)):
            if b == c and (a, d) not in less:
                if a == d:
                    raise CategoryError(f"relations contain a cycle through {a!r}")
                less.add((a, d))
                changed = True
    for a, b in less:
        if a not in below or b not in below:
            raise CategoryError(f"relation ({a}, {b}) names unknown object")
    name = {(a, b): f"{a}<{b}" for a, b in less}
    comp = []
    for (a, b), (c, d) in itertools.product(less, less):
        if b == c:
            comp.append((name[(c, d)], name[(a, b)], name[(a, d)]))
    return validate_category(objects, [(name[p], *p) for p in sorted(less)], comp)


def classify(C: FinCat) -> CatKind:
    for i in C.objects:
        if len(C.hom(i, i)) > 1:
            return CatKind.GENERAL
    poset = True
    for i, j in itertools.combinations(C.objects, 2):
        a, b = C.hom(i, j), C.hom(j, i)
        if a and b:
            return CatKind.GENERAL
        if len(a) > 1 or len(b) > 1:
            poset = False
    return CatKind.POSET if poset else CatKind.DELTA


def leq(C: FinCat, i: str, j: str) -> bool:
    return bool(C.hom(i, j))


# ---------------------------------------------------------------- simplices

@dataclass(frozen=True)
class Simplex:
    vertices: tuple[str, ...]
    edges: tuple[str, ...]

    @property
    def dim(self) -> int:
        return len(self.edges)

    @property
    def first(self) -> str:
        return self.vertices[0]

    def name(self, poset: bool = False) -> str:
        if poset or not self.edges:
            return "(" + "<".join(self.vertices) + ")"
        parts = [self.vertices[0]]
        for e, v in zip(self.edges, self.vertices[1:]):
            parts += [e, v]
        return "(" + "|".join(parts) + ")"

    def composite(self, C: FinCat, s: int, t: int) -> str:
        """The morphism vertex s → vertex t (identity when s == t)."""
        m = C.identity[self.vertices[s]]
        for e in self.edges[s:t]:
            m = C.compose(e, m)
        return m

    def restrict(self, C: FinCat, f: tuple[int, ...]) -> "Simplex":
        """The face along a strictly increasing index map f."""
        return Simplex(tuple(self.vertices[k] for k in f),
                       tuple(self.composite(C, a, b) for a, b in zip(f, f[1:])))


class SimplexMap(NamedTuple):
    source: Simplex
    target: Simplex
    carrier: str
    witness: tuple[int, ...]


def _require_delta(C: FinCat) -> CatKind:
    kind = classify(C)
    if kind < CatKind.DELTA:
        raise CategoryError("subdivision requires a delta or a poset; got a general category "
                            "(nondegenerate simplices would not be finite)")
    return kind


def nondegenerate_simplices(C: FinCat) -> list[Simplex]:
    """All chains of non-identity morphisms, ordered by dimension."""
    _require_delta(C)
    out_edges: dict[str, list[str]] = {o: [] for o in C.objects}
    for m in C.non_identity():
        out_edges[C.dom[m]].append(m)
    result = [Simplex((o,), ()) for o in C.objects]
    layer = list(result)
    while layer:
        nxt = []
        for s in layer:
            for e in out_edges[s.vertices[-1]]:
                nxt.append(Simplex(s.vertices + (C.cod[e],), s.edges + (e,)))
        result += nxt
        layer = nxt
    return result


def simplex_maps(C: FinCat, tau: Simplex) -> list[SimplexMap]:
    """All maps out of ``tau`` (one per strictly increasing witness)."""
    p = tau.dim
    out = []
    for q in range(p + 1):
        for f in itertools.combinations(range(p + 1), q + 1):
            sigma = tau.restrict(C, f)
            out.append(SimplexMap(tau, sigma, tau.composite(C, 0, f[0]), f))
    return out


class Functor(NamedTuple):
    source: FinCat
    target: FinCat
    on_objects: Mapping[str, str]
    on_morphisms: Mapping[str, str]

    def __call__(self, m: str) -> str:
        return self.on_morphisms[m]

    def ob(self, o: str) -> str:
        return self.on_objects[o]


def identity_functor(C: FinCat) -> Functor:
    return Functor(C, C, {o: o for o in C.objects}, {m: m for m in C.dom})


def check_functor(F: Functor) -> None:
    D, C = F.source, F.target
    for o in D.objects:
        if F.ob(o) not in C.identity:
            raise CategoryError(f"object {o!r} maps outside the target")
        if F(D.identity[o]) != C.identity[F.ob(o)]:
            raise CategoryError(f"functor does not preserve the identity of {o!r}")
    for m in D.dom:
        fm = F(m)
        if (C.dom[fm], C.cod[fm]) != (F.ob(D.dom[m]), F.ob(D.cod[m])):
            raise CategoryError(f"functor does not preserve dom/cod of {m!r}")
    for (g, f), h in D.table.items():
        if C.compose(F(g), F(f)) != F(h):
            raise CategoryError(f"functor does not preserve composition {g}∘{f}")


class Subdivision(NamedTuple):
    category: FinCat
    d: Functor
    simplices: Mapping[str, Simplex]


def subdivide(C: FinCat) -> Subdivision:
    """The category of nondegenerate simplices of C and the initial-vertex functor to C."""
    kind = _require_delta(C)
    poset = kind == CatKind.POSET
    simplices = nondegenerate_simplices(C)
    names = {s: s.name(poset) for s in simplices}
    triples: dict[tuple[Simplex, Simplex, str], None] = {}
    for tau in simplices:
        for sm in simplex_maps(C, tau):
            triples.setdefault((sm.source, sm.target, sm.carrier), None)
    mor_name: dict[tuple, str] = {}
    dom, cod = {}, {}
    ident = {}
    for (tau, sigma, v) in triples:
        if tau == sigma:
            n = identity_name(names[tau])
            ident[names[tau]] = n
        else:
            n = f"{names[tau]}->{names[sigma]}"
            if n in dom:
                n = f"{n}@{v}"
        mor_name[(tau, sigma, v)] = n
        dom[n], cod[n] = names[tau], names[sigma]
    table = {}
    for (tau, sigma, u), n1 in mor_name.items():
        for (sigma2, omega, v), n2 in mor_name.items():
            if sigma2 == sigma:
                table[(n2, n1)] = mor_name[(tau, omega, C.compose(v, u))]
    objects = tuple(names[s] for s in simplices)
    Cp = FinCat(objects, dom, cod, ident, table)
    check_category(Cp)
    d = Functor(Cp, C,
                {names[s]: s.first for s in simplices},
                {n: v for (_, _, v), n in mor_name.items()})
    check_functor(d)
    return Subdivision(Cp, d, {names[s]: s for s in simplices})


def subdivide_functor(F: Functor, sub_D: Subdivision | None = None,
                      sub_C: Subdivision | None = None) -> Functor:
    """The induced functor D' → C' sending a chain to its image chain."""
    D, C = F.source, F.target
    sub_D = sub_D or subdivide(D)
    sub_C = sub_C or subdivide(C)
    for m in D.non_identity():
        if C.is_identity(F(m)):
            raise CategoryError(f"degenerate image: {m!r} is sent to an identity")
    by_simplex = {s: n for n, s in sub_C.simplices.items()}
    ob = {}
    for n, s in sub_D.simplices.items():
        img = Simplex(tuple(F.ob(v) for v in s.vertices), tuple(F(e) for e in s.edges))
        ob[n] = by_simplex[img]
    Dp, Cp = sub_D.category, sub_C.category
    mor = {}
    for m in Dp.dom:
        v = F(sub_D.d(m))
        src, tgt = ob[Dp.dom[m]], ob[Dp.cod[m]]
        hits = [x for x in Cp.hom(src, tgt) if sub_C.d(x) == v]
        mor[m] = hits[0]
    G = Functor(Dp, Cp, ob, mor)
    check_functor(G)
    return G


# ---------------------------------------------------------------- comma categories

@dataclass(frozen=True)
class CommaCat:
    """The comma category i/f: objects (w, σ) with w: i → fσ."""

    functor: Functor
    base: str
    category: FinCat
    objects: Mapping[str, tuple[str, str]]
    morphisms: Mapping[str, str]

    def name_of(self, w: str, sigma: str) -> str:
        return f"{w}:{sigma}"

    def reindex(self, v: str, other: "CommaCat") -> dict[str, str]:
        """For v: h → i (with ``other`` = h/f), the object map (w, σ) ↦ (w∘v, σ)."""
        C = self.functor.target
        if C.cod[v] != self.base or C.dom[v] != other.base:
            raise CategoryError(f"{v!r} does not go from {other.base!r} to {self.base!r}")
        return {n: other.name_of(C.compose(w, v), s) for n, (w, s) in self.objects.items()}


def comma_category(F: Functor, i: str) -> CommaCat:
    D, C = F.source, F.target
    objs: dict[str, tuple[str, str]] = {}
    for sigma in D.objects:
        for w in C.hom(i, F.ob(sigma)):
            objs[f"{w}:{sigma}"] = (w, sigma)
    dom, cod, ident, mors = {}, {}, {}, {}
    for a, (u, tau) in objs.items():
        for b, (w, sigma) in objs.items():
            for v in D.hom(tau, sigma):
                if C.compose(F(v), u) == w:
                    n = f"{v}:{a}" if D.is_identity(v) else f"{v}:{a}->{b}"
                    dom[n], cod[n] = a, b
                    mors[n] = v
                    if D.is_identity(v):
                        ident[a] = n
    by_key = {(dom[n], mors[n]): n for n in mors}
    table = {}
    for f, vf in mors.items():
        for g, vg in mors.items():
            if cod[f] == dom[g]:
                table[(g, f)] = by_key[(dom[f], D.compose(vg, vf))]
    cat = FinCat(tuple(objs), dom, cod, ident, table)
    check_category(cat)
    return CommaCat(F, i, cat, objs, mors)


# ---------------------------------------------------------------- serialization

def category_from_dict(raw: Mapping) -> FinCat:
    if "objects" not in raw:
        raise CategoryError("category description needs 'objects'")
    objects = [str(o) for o in raw["objects"]]
    if "relations" in raw:
        return poset_category(objects, [tuple(r) for r in raw["relations"]])
    mors = [(m["name"], str(m["dom"]), str(m["cod"])) for m in raw.get("morphisms", [])]
    comp = [(c["g"], c["f"], c["result"]) for c in raw.get("compose", [])]
    return validate_category(objects, mors, comp)


def category_to_dict(C: FinCat) -> dict:
    ids = set(C.identity.values())
    return {
        "objects": list(C.objects),
        "morphisms": [{"name": m, "dom": C.dom[m], "cod": C.cod[m]} for m in C.dom if m not in ids],
        "compose": [{"g": g, "f": f, "result": h} for (g, f), h in sorted(C.table.items())
                    if g not in ids and f not in ids],
    }


def chain_category(n: int) -> FinCat:
    """The poset 0 < 1 < ... < n-1."""
    return poset_category([str(k) for k in range(n)], [(str(a), str(a + 1)) for a in range(n - 1)])


def discrete_category(n: int) -> FinCat:
    return validate_category([str(k) for k in range(n)], [])


def parallel_pair() -> FinCat:
    return validate_category(["a", "b"], [("u", "a", "b"), ("v", "a", "b")])


def cyclic_group(order: int) -> FinCat:
    """One object, morphisms g^0..g^{order-1}; g^0 is the identity."""
    names = ["id_*"] + [f"g{k}" for k in range(1, order)]
    comp = [(names[a], names[b], names[(a + b) % order]) for a in range(order) for b in range(order)]
    return validate_category(["*"], [(n, "*", "*") for n in names[1:]], comp, identities={"*": "id_*"})
