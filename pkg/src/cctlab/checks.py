"""Verification suites. Each returns a CheckReport whose outcome is pass only
when every exact equality holds and every negative control is rejected."""

from __future__ import annotations

import hashlib
import json
import random
import time
from dataclasses import asdict, dataclass, field
from typing import Callable

from . import __version__
from .algkit import (AlgebraError, Bimodule, BudgetExceeded, ModuleError, dual_numbers, ground_field,
                     hochschild_dims, module_hom_space, regular_module, upper_triangular, validate_algebra)
from .algkit import validate_module as validate_single
from .diagram import (DiagModule, DiagModuleMap, DiagramError, adjunction_data, check_module_map, f_shriek,
                      hom_space,
                      maps_rank, pullback_map, pullback_module, regular_diag_module, shriek_algebra,
                      shriek_bimodule, shriek_counit, shriek_map, shriek_unit, subdivide_diagram,
                      subdivide_module, validate_module, f_shriek_map)
from .exalg import QQ, Field, Mat, rank
from .fincat import CategoryError, CatKind, classify, cyclic_group, parallel_pair, subdivide, validate_category
from .homalg import (ChainMap, Complex, ComplexError, DoubleComplex, bar_double_complex,
                     build_cone_contraction, check_double_complex, cone, contraction, extract_homotopy_equivalence,
                     homology_dims, is_contraction, relations_hold, total_complex)
from .instances import (curated_diagrams, parallel_pair_diagram, random_delta, random_module, random_poset)

CHECKS = ("prop21", "prop32", "prop37", "adjunction", "dstar-ff", "scct", "invariance", "gcct")


@dataclass
class CheckConfig:
    seed: int = 1
    max_degree: int = 3
    field: Field = QQ
    samples: int | None = None
    method: str = "reduced"

    def params(self) -> dict:
        return {"seed": self.seed, "max_degree": self.max_degree, "field": self.field.spec(),
                "samples": self.samples, "method": self.method}


@dataclass
class CheckReport:
    name: str
    params: dict
    outcome: bool = True
    witnesses: list = field(default_factory=list)
    controls: list = field(default_factory=list)
    failures: list = field(default_factory=list)
    wall_time: float = 0.0
    instance: str = ""

    def fail(self, msg: str) -> None:
        self.outcome = False
        self.failures.append(msg)

    def control(self, label: str, rejected: bool, detail: str = "") -> None:
        self.controls.append({"control": label, "rejected": rejected, "detail": detail})
        if not rejected:
            self.fail(f"negative control not rejected: {label}")

    def canonical(self) -> dict:
        d = asdict(self)
        d.pop("wall_time")
        return d

    def to_json(self) -> str:
        return json.dumps(self.canonical(), indent=1, sort_keys=True) + "\n"

    def summary_line(self) -> str:
        return f"{self.name:<11} {'PASS' if self.outcome else 'FAIL'}  " \
               f"{len(self.witnesses)} instances, {len(self.controls)} controls"


def content_hash(*parts) -> str:
    h = hashlib.sha256()
    for p in parts:
        h.update(json.dumps(p, sort_keys=True, default=str).encode())
        h.update(b"\0")
    return h.hexdigest()[:16]


def _rejects(fn: Callable, *errors) -> tuple[bool, str]:
    errors = errors or (ValueError,)
    try:
        fn()
    except errors as exc:
        return True, str(exc)
    return False, ""


# ---------------------------------------------------------------- prop21

def suite_prop21(cfg: CheckConfig, report: CheckReport) -> None:
    rng = random.Random(cfg.seed)
    n = cfg.samples or 100
    for label, gen in (("delta", random_delta), ("poset", random_poset)):
        bad = 0
        twice = 0
        for _ in range(n):
            C = gen(rng)
            sub = subdivide(C)
            kind = classify(sub.category)
            if kind != CatKind.POSET:
                bad += 1
                report.fail(f"subdivision of a random {label} classified {kind}")
            if len(sub.category.objects) <= 10:
                if classify(subdivide(sub.category).category) != CatKind.POSET:
                    report.fail(f"double subdivision of a random {label} is not a poset")
                twice += 1
        report.witnesses.append({"family": label, "count": n, "non_poset": bad, "double_checked": twice})
    sub = subdivide(parallel_pair())
    shape = (len(sub.category.objects), len(sub.category.non_identity()))
    report.witnesses.append({"family": "parallel pair", "objects": shape[0], "non_identity": shape[1],
                             "kind": str(classify(sub.category))})
    if shape != (4, 4) or classify(sub.category) != CatKind.POSET:
        report.fail(f"parallel pair subdivision has shape {shape}")
    report.control("parallel pair itself is not a poset", classify(parallel_pair()) != CatKind.POSET)
    ok, msg = _rejects(lambda: subdivide(cyclic_group(2)), CategoryError)
    report.control("group C2 rejected by subdivide", ok, msg)
    ok, msg = _rejects(lambda: validate_category(
        ["0", "1"], [("u", "0", "1"), ("v", "0", "1")], [("u", "id_0", "v")]), CategoryError)
    report.control("corrupted composition table rejected", ok, msg)


# ---------------------------------------------------------------- prop32

def _rand_invertible(F: Field, n: int, rng: random.Random) -> Mat:
    while True:
        M = Mat(F, [[rng.randint(-2, 2) for _ in range(n)] for _ in range(n)], n) if n else Mat.zeros(F, 0, 0)
        if rank(M) == n:
            return M


def _elementary_complex(F: Field, pieces: list[tuple[str, int]], top: int):
    """Direct sum of k[n] ("pt") and k -id-> k in degrees n+1 -> n ("seg")."""
    dims = [0] * (top + 1)
    slots = []
    for kind, n in pieces:
        if kind == "pt":
            slots.append((kind, n, dims[n]))
            dims[n] += 1
        else:
            slots.append((kind, n, dims[n], dims[n + 1]))
            dims[n] += 1
            dims[n + 1] += 1
    raw = {}
    for deg in range(1, top + 1):
        rows = [[F.zero] * dims[deg] for _ in range(dims[deg - 1])]
        for s in slots:
            if s[0] == "seg" and s[1] + 1 == deg:
                rows[s[2]][s[3]] = F.one
        raw[deg] = Mat(F, rows, dims[deg]) if dims[deg - 1] else Mat.zeros(F, 0, dims[deg])
    return Complex(F, tuple(dims), raw).check()


def _conjugate(X: Complex, Q: dict) -> Complex:
    from .exalg import inverse
    F = X.field
    diffs = {n: inverse(Q[n - 1]) @ X.d(n) @ Q[n] for n in range(1, X.top + 1)}
    return Complex(F, X.dims, diffs).check()


def random_qiso_instance(F: Field, rng: random.Random):
    """M, N = Q^{-1}(M ⊕ E)Q with E contractible, the inclusion f and an independent
    equivalence (gamma, sM, sN), plus a perturbed f' = f + dh + hd."""
    from .exalg import inverse
    top = rng.randint(0, 2)
    mp = [("pt", rng.randint(0, top)) for _ in range(rng.randint(0, 2))]
    if top:
        mp += [("seg", rng.randint(0, top - 1)) for _ in range(rng.randint(0, 1))]
        ep = [("seg", rng.randint(0, top - 1)) for _ in range(rng.randint(1, 2))]
    else:
        ep = []
    Mraw = _elementary_complex(F, mp, top)
    Eraw = _elementary_complex(F, ep, top)
    QM = {n: _rand_invertible(F, Mraw.dim(n), rng) for n in range(-1, top + 2)}
    M = _conjugate(Mraw, QM)
    E = _conjugate(Eraw, {n: _rand_invertible(F, Eraw.dim(n), rng) for n in range(-1, top + 2)})
    dims = tuple(M.dim(n) + E.dim(n) for n in range(top + 1))
    S = Complex(F, dims, {n: Mat.block_diag(F, [M.d(n), E.d(n)]) for n in range(1, top + 1)}).check()
    Q = {n: _rand_invertible(F, S.dim(n), rng) for n in range(-1, top + 2)}
    N = _conjugate(S, Q)
    Qi = {n: inverse(Q[n]) for n in Q}
    inc = {n: Mat.vstack(F, [Mat.identity(F, M.dim(n)), Mat.zeros(F, E.dim(n), M.dim(n))], M.dim(n))
           for n in range(top + 1)}
    proj = {n: Mat.hstack(F, [Mat.identity(F, M.dim(n)), Mat.zeros(F, M.dim(n), E.dim(n))], M.dim(n))
            for n in range(top + 1)}
    f = ChainMap(M, N, {n: Qi[n] @ inc[n] for n in range(top + 1)}).check()
    gamma = ChainMap(N, M, {n: proj[n] @ Q[n] for n in range(top + 1)}).check()
    sE = contraction(E)
    sN = {}
    for n in range(top + 1):
        blk = Mat.block_diag(F, [Mat.zeros(F, M.dim(n + 1), M.dim(n)), sE.get(n, Mat.zeros(F, E.dim(n + 1), E.dim(n)))])
        sN[n] = -(Qi[n + 1] @ blk @ Q[n]) if S.dim(n + 1) else Mat.zeros(F, 0, S.dim(n))
    # null-homotopic perturbation
    h = {n: Mat(F, [[rng.randint(-1, 1) for _ in range(M.dim(n))] for _ in range(N.dim(n + 1))], M.dim(n))
         if N.dim(n + 1) else Mat.zeros(F, 0, M.dim(n)) for n in range(top + 1)}
    pert = {}
    for n in range(top + 1):
        a = N.d(n + 1) @ h[n]
        b = h[n - 1] @ M.d(n) if n >= 1 else Mat.zeros(F, N.dim(n), M.dim(n))
        pert[n] = f[n] + a + b
    fp = ChainMap(M, N, pert).check()
    return f, gamma, {}, sN, fp


def suite_prop32(cfg: CheckConfig, report: CheckReport) -> None:
    rng = random.Random(cfg.seed)
    F = cfg.field
    n = cfg.samples or 50
    last = None
    for trial in range(n):
        f, gamma, sM, sN, fp = random_qiso_instance(F, rng)
        total = sum(f.source.dims) + sum(f.target.dims)
        w = {"trial": trial, "M": list(f.source.dims), "N": list(f.target.dims), "total_dim": total}
        # '<=' : explicit cone homotopy from equivalence data
        try:
            s = build_cone_contraction(f, gamma, sM, sN)
            w["build"] = is_contraction(cone(f), s)
        except ComplexError as exc:
            w["build"] = False
            report.fail(f"trial {trial}: build failed: {exc}")
        # '=>' : blocks of a contraction of the perturbed map's cone
        try:
            s2 = contraction(cone(fp))
            he = extract_homotopy_equivalence(fp, s2)
            rel = relations_hold(fp, he)
            w["extract"] = all(rel.values())
            sM2 = {k - 1: a for k, a in he.alpha.items() if k >= 1}
            sN2 = {k: -d for k, d in he.delta.items()}
            s3 = build_cone_contraction(fp, he.gamma, sM2, sN2)
            w["round_trip"] = is_contraction(cone(fp), s3)
        except (ComplexError, ValueError) as exc:
            w["extract"] = False
            report.fail(f"trial {trial}: extract/round trip failed: {exc}")
        if not (w.get("build") and w.get("extract") and w.get("round_trip")):
            report.fail(f"trial {trial}: identity failed")
        report.witnesses.append(w)
        last = (fp, s2) if w.get("extract") and sum(cone(fp).dims) else last
    # closed form for cone(id) on [k -id-> k], then the same s against a mis-signed cone
    one = Mat.identity(F, 1)
    K = Complex(F, (1, 1), {1: one})
    idK = ChainMap(K, K, {0: one, 1: one})
    C = cone(idK)
    s_closed = {n: _closed_cone_id(F, K, n) for n in range(C.top + 1)}
    if not is_contraction(C, s_closed):
        report.fail("cone(id) is not contracted by s = (0, id; 0, 0)")
    if F.characteristic == 2:
        report.controls.append({"control": "wrong sign in the cone differential", "rejected": None,
                                "detail": "signs are invisible in characteristic 2"})
    else:
        bad = cone(idK, sign=1)
        report.control("wrong sign in the cone differential",
                       not _square_zero(bad) or not is_contraction(bad, s_closed))
    if last:
        fp, s2 = last
        deg = next(k for k, m in s2.items() if m.nrows and m.ncols)
        m = s2[deg]
        broken = dict(s2)
        broken[deg] = m.with_entry(0, 0, m[0, 0] + 1)
        ok, msg = _rejects(lambda: extract_homotopy_equivalence(fp, broken), ComplexError)
        report.control("perturbed cone contraction rejected by extract", ok, msg)
    ok, msg = _rejects(lambda: contraction(Complex(F, (1,), {})), ValueError)
    report.control("complex k[0] has no contraction", ok, msg)


def _closed_cone_id(F: Field, M: Complex, n: int) -> Mat:
    """s = (0, id; 0, 0): C(id)_n = M_{n-1} ⊕ M_n -> M_n ⊕ M_{n+1}."""
    a, b = M.dim(n - 1), M.dim(n)
    c = M.dim(n + 1)
    top = Mat.hstack(F, [Mat.zeros(F, b, a), Mat.identity(F, b)], b)
    bot = Mat.zeros(F, c, a + b)
    return Mat.vstack(F, [top, bot], a + b)


def _square_zero(X: Complex) -> bool:
    return all((X.d(n) @ X.d(n + 1)).is_zero() for n in range(1, X.top + 1))


# ---------------------------------------------------------------- prop37

def curated_double_complexes(F: Field = QQ) -> dict[str, DoubleComplex]:
    k, kx = ground_field(F), dual_numbers(F)
    out = {}
    one = Mat.identity(F, 1)
    # single row X_{0,i} = M_i with eps = t^0 = id
    M = Complex(F, (1, 1), {1: one})
    out["single-row"] = DoubleComplex(F, {(0, 0): 1, (0, 1): 1}, {}, {(0, 1): one}, M,
                                      {0: one, 1: one}, {(0, 0): one, (0, 1): one}, 1, 2)
    # rows k -id-> k with zero augmentation
    Z = Complex(F, (0, 0), {})
    z10, z01 = Mat.zeros(F, 1, 0), Mat.zeros(F, 0, 1)
    out["two-column-acyclic"] = DoubleComplex(
        F, {(0, 0): 1, (1, 0): 1, (0, 1): 1, (1, 1): 1},
        {(1, 0): one, (1, 1): one}, {(0, 1): one, (1, 1): one}, Z,
        {0: z01, 1: z01}, {(0, 0): z10, (0, 1): z10, (1, 0): one, (1, 1): one}, 2, 2)
    K = regular_module(k)
    out["bar-k-w2"] = bar_double_complex(k, [K, K], {1: one}, 2)
    out["bar-k-w3"] = bar_double_complex(k, [K, K, K], {1: one, 2: Mat.zeros(F, 1, 1)}, 3)
    R = regular_module(kx)
    x = kx.right_regular(1)
    out["bar-dual-w3"] = bar_double_complex(kx, [R, R, R], {1: x, 2: x}, 3)
    out["bar-dual-w2-h4"] = bar_double_complex(kx, [R, R, R, R], {1: x, 2: x, 3: x}, 2)
    return out


def suite_prop37(cfg: CheckConfig, report: CheckReport) -> None:
    F = cfg.field
    Ds = curated_double_complexes(F)
    for name, D in Ds.items():
        try:
            T = total_complex(D)
            report.witnesses.append({"instance": name, "tot_dims": list(T.tot.dims),
                                     "tot_homology": homology_dims(T.tot), "aug_homology": homology_dims(D.aug),
                                     "eps_t0": True, "h_identity": True})
            if homology_dims(T.tot)[:D.aug.top + 1] != homology_dims(D.aug):
                report.fail(f"{name}: Tot and augmentation homology differ")
        except ComplexError as exc:
            report.fail(f"{name}: {exc}")
    D = Ds["bar-dual-w3"]
    ver = dict(D.vertical)
    key = (1, 1)
    m = ver[key]
    ver[key] = m.with_entry(0, 0, m[0, 0] + 1)
    broken = DoubleComplex(D.field, D.dims, D.horizontal, ver, D.aug, D.eps, D.t, D.width, D.height)
    ok, msg = _rejects(lambda: check_double_complex(broken), ComplexError)
    report.control("broken commuting square rejected", ok, msg)
    if F.characteristic == 2:
        report.controls.append({"control": "Tot without the (-1)^h sign fails", "rejected": None,
                                "detail": "signs are invisible in characteristic 2"})
    else:
        ok, msg = _rejects(lambda: total_complex(D, vertical_sign=False), ComplexError)
        report.control("Tot without the (-1)^h sign fails", ok, msg)
    t = dict(D.t)
    t[(1, 0)] = t[(1, 0)].scale(2)
    broken = DoubleComplex(D.field, D.dims, D.horizontal, D.vertical, D.aug, D.eps, t, D.width, D.height)
    ok, msg = _rejects(lambda: total_complex(broken), ComplexError)
    report.control("scaled row contraction rejected", ok, msg)


# ---------------------------------------------------------------- adjunction and d*

def _p2_chain_diagrams(F: Field):
    ds = curated_diagrams(F)
    return [(n, ds[n]) for n in ("const-k-P2", "dual-to-k-P2", "split-to-k-P2", "const-k-chain3")]


def _broken_naturality(F: Field) -> DiagModule:
    """Constant k over the 3-chain with T^{0<2} != T^{0<1} T^{1<2}."""
    A = curated_diagrams(F)["const-k-chain3"]
    M = regular_diag_module(A)
    T = dict(M.T)
    T["0<2"] = Mat(F, [[2]], 1) if F.characteristic != 2 else Mat(F, [[0]], 1)
    return DiagModule(A, M.spaces, T)


def _broken_map(F: Field) -> DiagModuleMap:
    """Scale one component of id on the regular module over P2: the square no longer commutes."""
    A = curated_diagrams(F)["dual-to-k-P2"]
    M = regular_diag_module(A)
    maps = {o: Mat.identity(F, X.dim) for o, X in M.spaces.items()}
    maps["1"] = Mat.zeros(F, 1, 1)
    return DiagModuleMap(M, M, maps)


def suite_adjunction(cfg: CheckConfig, report: CheckReport) -> None:
    rng = random.Random(cfg.seed)
    F = cfg.field
    n = cfg.samples or 24
    diags = _p2_chain_diagrams(F)
    subs = {name: subdivide_diagram(A) for name, A in diags}
    control_case = None
    for trial in range(n):
        name, A = diags[trial % len(diags)]
        Ap, sub = subs[name]
        M = random_module(A, rng)
        N = random_module(Ap, rng)
        r = adjunction_data(sub.d, N, M)
        report.witnesses.append({"trial": trial, "diagram": name, "M": M.dims(), "N": N.dims(),
                                 "triangles": [r.triangle_left, r.triangle_right],
                                 "counit_invertible": r.counit_invertible, "hom_dims": list(r.hom_dims),
                                 "bijection": r.bijection})
        if not (r.ok and r.counit_invertible):
            report.fail(f"trial {trial} on {name}: {r}")
        if control_case is None and sum(N.dims().values()):
            control_case = (A, Ap, sub, N)
    # f = identity: unit and counit are identities
    from .fincat import identity_functor
    name, A = diags[1]
    M = regular_diag_module(A)
    P = f_shriek(identity_functor(A.category), M, A)
    eps = shriek_counit(P, M)
    if not all(m.nrows == m.ncols and rank(m) == m.nrows for m in eps.maps.values()):
        report.fail("identity functor: counit not invertible")
    report.witnesses.append({"identity_functor": name, "dims": P.module.dims()})
    if control_case:
        A, Ap, sub, N = control_case
        PN = f_shriek(sub.d, N, A)
        pulled = pullback_module(sub.d, PN.module, Ap)
        unit = shriek_unit(PN, pulled)
        bad = DiagModuleMap(unit.source, unit.target, {o: m.scale(2) for o, m in unit.maps.items()})
        PP = f_shriek(sub.d, pulled, A)
        tri = (shriek_counit(PP, PN.module) @ f_shriek_map(PN, PP, bad)).is_identity()
        report.control("doubled unit breaks the triangle identity", not tri)
    ok, msg = _rejects(lambda: validate_module(_broken_naturality(F)), ModuleError)
    report.control("broken naturality square rejected", ok, msg)


def suite_dstar_ff(cfg: CheckConfig, report: CheckReport) -> None:
    rng = random.Random(cfg.seed)
    F = cfg.field
    n = cfg.samples or 25
    ds = list(curated_diagrams(F).items())
    subs = {name: subdivide_diagram(A) for name, A in ds}
    for trial in range(n):
        name, A = ds[trial % len(ds)]
        Ap, sub = subs[name]
        M, N = random_module(A, rng), random_module(A, rng)
        Mp, Np = subdivide_module(M, sub, Ap), subdivide_module(N, sub, Ap)
        left = hom_space(M, N)
        right = hom_space(Mp, Np)
        images = [pullback_map(sub.d, e, Mp, Np) for e in left]
        bij = len(left) == len(right) and maps_rank(images) == len(right)
        report.witnesses.append({"trial": trial, "diagram": name, "M": M.dims(), "N": N.dims(),
                                 "hom": len(left), "hom_subdivided": len(right), "bijection": bij})
        if not bij:
            report.fail(f"trial {trial} on {name}: {len(left)} vs {len(right)}")


    eta = _broken_map(F)
    ok, msg = _rejects(lambda: check_module_map(eta), ModuleError)
    report.control("map with a broken naturality square rejected", ok, msg)
    A = eta.source.diagram
    Ap, sub = subdivide_diagram(A)
    Mp = subdivide_module(eta.source, sub, Ap)
    ok, msg = _rejects(lambda: check_module_map(pullback_map(sub.d, eta, Mp, Mp)), ModuleError)
    report.control("its pullback along d is rejected too", ok, msg)


# ---------------------------------------------------------------- ! suites

def scct_instances(F: Field, rng: random.Random, per_diagram: int = 4):
    for name, A in curated_diagrams(F).items():
        reg = regular_diag_module(A, bimodule=True)
        pool = [("A", reg)] + [(f"rand{j}", random_module(A, rng, bimodule=True)) for j in range(per_diagram)]
        pairs = [(pool[0], pool[0])] + [(pool[j], pool[j + 1]) for j in range(len(pool) - 1)] + \
                [(pool[-1], pool[0])]
        yield name, A, pairs


def suite_scct(cfg: CheckConfig, report: CheckReport) -> None:
    rng = random.Random(cfg.seed)
    F = cfg.field
    control_done = False
    for name, A, pairs in scct_instances(F, rng, cfg.samples or 3):
        SA = shriek_algebra(A)
        cache = {}
        for (ln, M), (rn, N) in pairs:
            for lab, X in ((ln, M), (rn, N)):
                if lab not in cache:
                    cache[lab] = shriek_bimodule(X, SA)
            basis = hom_space(M, N)
            shriek_side = module_hom_space(cache[ln], cache[rn])
            imgs = [shriek_map(e) for e in basis]
            for e, im in zip(basis, imgs):
                if not all(im @ cache[ln].left[a] == cache[rn].left[a] @ im and
                           im @ cache[ln].right[a] == cache[rn].right[a] @ im for a in range(SA.algebra.dim)):
                    report.fail(f"{name}: eta! is not an (A!)^e-map")
            r = rank(Mat(F, [tuple(x for row in m.rows for x in row) for m in imgs],
                         cache[ln].dim * cache[rn].dim)) if imgs else 0
            bij = len(basis) == len(shriek_side) and r == len(shriek_side)
            report.witnesses.append({"diagram": name, "M": ln, "N": rn, "M_dims": M.dims(), "N_dims": N.dims(),
                                     "hom": len(basis), "hom_shriek": len(shriek_side), "bijection": bij})
            if not bij:
                report.fail(f"{name} ({ln}, {rn}): {len(basis)} vs {len(shriek_side)}")
        if not control_done:
            X = cache["A"]
            a = next(j for j in range(SA.algebra.dim) if X.left[j].nrows)
            left = list(X.left)
            left[a] = left[a].with_entry(0, 0, left[a][0, 0] + 1)
            bad = Bimodule(X.algebra, X.dim, tuple(left), X.right)
            ok, msg = _rejects(lambda: validate_single(bad), ModuleError)
            report.control("corrupted M! left action rejected", ok, msg)
            ok, msg = _rejects(lambda: validate_algebra(_corrupt_algebra(SA.algebra)), AlgebraError)
            report.control("corrupted A! structure constant rejected", ok, msg)
            control_done = True
    # spot: (constant k over P2)! has the structure constants of T_2
    SA = shriek_algebra(curated_diagrams(F)["const-k-P2"])
    same = SA.algebra.structure_equal(upper_triangular(F))
    report.witnesses.append({"spot": "(const k over P2)! == T_2", "equal": same})
    if not same:
        report.fail("(const k over P2)! does not match T_2")


def _corrupt_algebra(B):
    from .algkit import Algebra
    F = B.field
    mul = [list(r) for r in B.mul]
    for a in range(B.dim):
        for b in range(B.dim):
            if any(mul[a][b]):
                c = list(mul[a][b])
                c[0] = F.reduce(c[0] + 1)
                mul[a][b] = tuple(c)
                return Algebra(F, B.dim, tuple(tuple(r) for r in mul), B.unit, B.name)
    raise ValueError("nothing to corrupt")


def shriek_hh(A, M: DiagModule | None, N: int, method: str) -> list[int]:
    SA = shriek_algebra(A)
    X = shriek_bimodule(M if M is not None else regular_diag_module(A, True), SA)
    idem = SA.idempotents if method != "bar" else None
    return hochschild_dims(SA.algebra, X, N, method, idem)


def suite_invariance(cfg: CheckConfig, report: CheckReport) -> None:
    F, N = cfg.field, cfg.max_degree
    tables = {}
    for name, A in curated_diagrams(F).items():
        Ap, sub = subdivide_diagram(A)
        h = shriek_hh(A, None, N, cfg.method)
        hp = shriek_hh(Ap, None, N, cfg.method)
        w = {"diagram": name, "H(A!)": h, "H((A')!)": hp, "equal": h == hp}
        try:
            w["H(A!) full bar"] = shriek_hh(A, None, N, "bar")
            if w["H(A!) full bar"] != h:
                report.fail(f"{name}: full and reduced complexes disagree")
        except BudgetExceeded:
            w["H(A!) full bar"] = "over budget"
        tables[name] = h
        report.witnesses.append(w)
        if h != hp:
            report.fail(f"{name}: {h} != {hp}")
    expected = [1] + [0] * N
    if tables.get("const-k-P2") != expected:
        report.fail(f"constant k over P2 gives {tables.get('const-k-P2')}, expected {expected}")
    report.control("different diagrams are distinguished",
                   tables["const-k-P2"] != tables["dual-to-k-P2"])
    A = curated_diagrams(F)["const-k-P2"]
    ok, msg = _rejects(lambda: validate_algebra(_corrupt_algebra(shriek_algebra(A).algebra)), AlgebraError)
    report.control("corrupted A! structure constant rejected", ok, msg)


def suite_gcct(cfg: CheckConfig, report: CheckReport) -> None:
    F, N = cfg.field, cfg.max_degree
    A = parallel_pair_diagram(F)
    A1, s1 = subdivide_diagram(A)
    A2, s2 = subdivide_diagram(A1)
    h1 = shriek_hh(A1, None, N, cfg.method)
    h2 = shriek_hh(A2, None, N, cfg.method)
    report.witnesses.append({"diagram": "const-k-parallel-pair", "C'": len(A1.category.objects),
                             "C''": len(A2.category.objects),
                             "dim (A')!": shriek_algebra(A1).algebra.dim,
                             "dim (A'')!": shriek_algebra(A2).algebra.dim,
                             "H((A')!)": h1, "H((A'')!)": h2, "equal": h1 == h2})
    if h1 != h2:
        report.fail(f"{h1} != {h2}")
    ok, msg = _rejects(lambda: shriek_algebra(A), DiagramError)
    report.control("! over the non-poset parallel pair rejected", ok, msg)
    hp2 = shriek_hh(curated_diagrams(F)["const-k-P2"], None, N, cfg.method)
    report.control("circle and interval are distinguished", hp2 != h1)


SUITES: dict[str, Callable[[CheckConfig, CheckReport], None]] = {
    "prop21": suite_prop21, "prop32": suite_prop32, "prop37": suite_prop37,
    "adjunction": suite_adjunction, "dstar-ff": suite_dstar_ff, "scct": suite_scct,
    "invariance": suite_invariance, "gcct": suite_gcct,
}


def run_check(name: str, cfg: CheckConfig | None = None) -> CheckReport:
    if name not in SUITES:
        raise KeyError(f"unknown check {name!r}; choose from {', '.join(CHECKS)}")
    cfg = cfg or CheckConfig()
    report = CheckReport(name, cfg.params())
    report.instance = content_hash(name, cfg.params(), __version__)
    t = time.perf_counter()
    SUITES[name](cfg, report)
    report.wall_time = time.perf_counter() - t
    return report
