import itertools
import json
import random

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from cctlab.algkit import (dual_numbers, ground_field, is_module_map, product_algebra, regular_bimodule,
                           split_pair, upper_triangular, validate_algebra)
from cctlab.diagram import (DiagModuleMap, DiagramError, adjunction_data, check_module_map, constant_diagram,
                            diagram_from_dict, diagram_to_dict, f_shriek, hom_space, identity_map, make_diagram,
                            make_module, module_from_dict, module_to_dict, pullback_diagram, pullback_map,
                            regular_diag_module, shriek_algebra, shriek_bimodule, shriek_map,
                            subdivide_diagram, subdivide_module, zero_diag_module)
from cctlab.exalg import GF, QQ, Mat, rank
from cctlab.fincat import chain_category, discrete_category, identity_functor, parallel_pair, subdivide
from cctlab.instances import curated_diagrams, random_module

F3 = GF(3)


def count_maps_gf3(M, N):
    """Brute force: number of natural (bi)module maps M -> N over GF(3)."""
    C = M.diagram.category
    shapes = [(o, N.spaces[o].dim, M.spaces[o].dim) for o in C.objects]
    size = sum(r * c for _, r, c in shapes)
    count = 0
    for entries in itertools.product(range(3), repeat=size):
        maps, pos = {}, 0
        for o, r, c in shapes:
            maps[o] = Mat(F3, [entries[pos + k * c:pos + (k + 1) * c] for k in range(r)], c) if r else \
                Mat.zeros(F3, 0, c)
            pos += r * c
        if not all(is_module_map(maps[o], M.spaces[o], N.spaces[o]) for o in C.objects):
            continue
        if all(maps[C.dom[v]] @ M.T[v] == N.T[v] @ maps[C.cod[v]] for v in C.non_identity()):
            count += 1
    return count


def test_curated_diagrams_valid():
    ds = curated_diagrams()
    assert set(ds) == {"const-k-P2", "dual-to-k-P2", "const-k-chain3", "split-to-k-P2", "const-k-square"}


def test_non_multiplicative_hom_rejected():
    with pytest.raises(DiagramError):
        make_diagram(chain_category(2), {"0": dual_numbers(), "1": ground_field()}, {"0<1": [[1], [1]]})
    with pytest.raises(DiagramError):
        # e1 -> 1 + x, e2 -> 0 misses the unit
        make_diagram(chain_category(2), {"0": dual_numbers(), "1": split_pair()}, {"0<1": [[1, 0], [1, 0]]})


def test_functoriality_enforced():
    C = chain_category(3)
    kk = split_pair()
    algs = {"0": kk, "1": kk, "2": kk}
    swap = [[0, 1], [1, 0]]
    with pytest.raises(DiagramError):
        make_diagram(C, algs, {"0<1": swap, "1<2": swap, "0<2": swap})
    A = make_diagram(C, algs, {"0<1": swap, "1<2": swap})
    assert A.homs["0<2"].is_identity()


def test_pullback_examples():
    A = curated_diagrams()["dual-to-k-P2"]
    assert pullback_diagram(identity_functor(A.category), A).homs == A.homs
    Ap, sub = subdivide_diagram(A)
    names = {o: Ap.algebras[o].name for o in Ap.category.objects}
    assert names == {"(0)": "k[x]/x^2", "(0<1)": "k[x]/x^2", "(1)": "k"}


def test_parallel_pair_subdivided():
    A = constant_diagram(parallel_pair(), ground_field())
    Ap, sub = subdivide_diagram(A)
    assert len(Ap.category.objects) == 4
    assert all(Ap.algebras[o].dim == 1 for o in Ap.category.objects)
    assert all(Ap.homs[v].is_identity() for v in Ap.category.morphisms)


def test_pullback_module_examples():
    A = curated_diagrams()["dual-to-k-P2"]
    Ap, sub = subdivide_diagram(A)
    Mp = subdivide_module(regular_diag_module(A), sub, Ap)
    R = regular_diag_module(Ap)
    assert Mp.dims() == R.dims()
    assert all(Mp.T[v] == R.T[v] for v in Ap.category.morphisms)
    Z = subdivide_module(zero_diag_module(A), sub, Ap)
    assert set(Z.dims().values()) == {0}
    M = regular_diag_module(A)
    assert pullback_map(sub.d, identity_map(M), Mp, Mp).is_identity()


def test_hom_examples():
    A = curated_diagrams()["const-k-P2"]
    R = regular_diag_module(A)
    assert len(hom_space(R, R)) == 1
    assert hom_space(R, zero_diag_module(A)) == []
    Rb = regular_diag_module(A, True)
    assert len(hom_space(Rb, Rb)) == 1


@pytest.mark.parametrize("name", ["const-k-P2", "dual-to-k-P2", "split-to-k-P2"])
def test_hom_dims_match_enumeration(name):
    A = curated_diagrams(F3)[name]
    for bimod in (False, True):
        R = regular_diag_module(A, bimod)
        assert 3 ** len(hom_space(R, R)) == count_maps_gf3(R, R)


@given(st.integers(0, 10**6), st.sampled_from(["const-k-P2", "dual-to-k-P2", "split-to-k-P2"]), st.booleans())
def test_random_hom_dims_match_enumeration(seed, name, bimod):
    A = curated_diagrams(F3)[name]
    rng = random.Random(seed)
    M = random_module(A, rng, bimod, 1)
    N = random_module(A, rng, bimod, 1)
    assume(sum(M.spaces[o].dim * N.spaces[o].dim for o in A.category.objects) <= 7)
    assert 3 ** len(hom_space(M, N)) == count_maps_gf3(M, N)


def test_f_shriek_identity_functor():
    for A in curated_diagrams().values():
        M = regular_diag_module(A)
        P = f_shriek(identity_functor(A.category), M, A)
        assert P.module.dims() == M.dims()
        rep = adjunction_data(identity_functor(A.category), M, M)
        assert rep.ok and rep.counit_invertible


def test_d_shriek_of_pulled_back_regular():
    A = curated_diagrams()["const-k-P2"]
    Ap, sub = subdivide_diagram(A)
    M = regular_diag_module(A)
    P = f_shriek(sub.d, subdivide_module(M, sub, Ap), A)
    assert P.module.dims() == {"0": 1, "1": 1}
    rep = adjunction_data(sub.d, subdivide_module(M, sub, Ap), M)
    assert rep.ok and rep.counit_invertible


def test_d_shriek_of_edge_module():
    A = curated_diagrams()["const-k-P2"]
    Ap, sub = subdivide_diagram(A)
    k = ground_field()
    from cctlab.algkit import regular_module, zero_module
    spaces = {o: (regular_module(k) if o == "(0<1)" else zero_module(k)) for o in Ap.category.objects}
    N = make_module(Ap, spaces, {})
    P = f_shriek(sub.d, N, A)
    assert P.module.dims() == {"0": 1, "1": 0}


def test_f_shriek_functorial():
    from cctlab.diagram import f_shriek_map
    A = curated_diagrams()["dual-to-k-P2"]
    Ap, sub = subdivide_diagram(A)
    N = subdivide_module(regular_diag_module(A), sub, Ap)
    P = f_shriek(sub.d, N, A)
    basis = hom_space(N, N)
    for th in basis:
        m = f_shriek_map(P, P, th)
        check_module_map(m)
    assert f_shriek_map(P, P, identity_map(N)).is_identity()
    for a, b in itertools.product(basis, repeat=2):
        assert f_shriek_map(P, P, a @ b).flat() == (f_shriek_map(P, P, a) @ f_shriek_map(P, P, b)).flat()


def test_shriek_algebra_product_rule():
    SA = shriek_algebra(curated_diagrams()["const-k-P2"])
    B, pos = SA.algebra, SA.position
    e00, e01 = B.basis(pos[("0", "0", 0)]), B.basis(pos[("0", "1", 0)])
    assert B.multiply(e00, e01) == e01
    assert not any(B.multiply(e01, e01))


def _isomorphic_by_permutation(A, B):
    for perm in itertools.permutations(range(A.dim)):
        P = Mat(A.field, [[1 if perm[c] == r else 0 for c in range(A.dim)] for r in range(A.dim)])
        ok = all(P.apply(A.mul[a][b]) == B.mul[perm[a]][perm[b]] for a in range(A.dim) for b in range(A.dim))
        if ok and P.apply(A.unit) == B.unit:
            return True
    return False


def test_shriek_of_constant_p2_is_t2():
    SA = shriek_algebra(curated_diagrams()["const-k-P2"])
    assert SA.algebra.dim == 3
    assert _isomorphic_by_permutation(SA.algebra, upper_triangular())
    assert not _isomorphic_by_permutation(SA.algebra, product_algebra([ground_field()] * 3))


def test_shriek_over_discrete_poset_is_product():
    C = discrete_category(2)
    A = make_diagram(C, {"0": dual_numbers(), "1": split_pair()}, {})
    SA = shriek_algebra(A)
    assert SA.algebra.dim == 4
    assert _isomorphic_by_permutation(SA.algebra, product_algebra([dual_numbers(), split_pair()]))


def test_shriek_rejects_non_poset():
    with pytest.raises(DiagramError, match="poset"):
        shriek_algebra(constant_diagram(parallel_pair(), ground_field()))


def test_shriek_bimodule_examples():
    A = curated_diagrams()["dual-to-k-P2"]
    SA = shriek_algebra(A)
    R = regular_diag_module(A, True)
    X = shriek_bimodule(R, SA)
    assert X.dim == 5
    reg = regular_bimodule(SA.algebra)
    assert X.left == reg.left and X.right == reg.right


def test_shriek_left_action_uses_transition():
    A = curated_diagrams()["dual-to-k-P2"]
    SA = shriek_algebra(A)
    X = shriek_bimodule(regular_diag_module(A, True), SA)
    phi01 = SA.position[("0", "1", 0)]
    src = SA.position[("1", "1", 0)]
    col = X.left[phi01].col(src)
    # m = 1 in M^1 goes to T^{01}(1) = 1 in the (0, 1) component
    assert col[SA.position[("0", "1", 0)]] == 1 and sum(1 for x in col if x) == 1


def test_shriek_map_functorial():
    A = curated_diagrams()["split-to-k-P2"]
    R = regular_diag_module(A, True)
    n = shriek_bimodule(R, shriek_algebra(A)).dim
    assert shriek_map(identity_map(R)).is_identity()
    zero = DiagModuleMap(R, R, {o: Mat.zeros(QQ, d, d) for o, d in R.dims().items()})
    assert shriek_map(zero).is_zero() and shriek_map(zero).shape == (n, n)
    basis = hom_space(R, R)
    for a, b in itertools.product(basis, repeat=2):
        assert shriek_map(a @ b) == shriek_map(a) @ shriek_map(b)


@given(st.integers(0, 10**6), st.sampled_from(sorted(curated_diagrams())))
def test_shriek_dims_and_validity(seed, name):
    A = curated_diagrams()[name]
    SA = shriek_algebra(A)
    validate_algebra(SA.algebra)
    pairs = [(i, j) for i in A.category.objects for j in A.category.objects if A.category.hom(i, j)]
    assert SA.algebra.dim == sum(A.algebras[i].dim for i, _ in pairs)
    M = random_module(A, random.Random(seed), True, 1)
    X = shriek_bimodule(M, SA)
    assert X.dim == sum(M.spaces[i].dim for i, _ in pairs)
    for eta in hom_space(M, M)[:3]:
        assert is_module_map(shriek_map(eta), X, X)


def test_bundle_roundtrip():
    for A in curated_diagrams().values():
        raw = json.loads(json.dumps(diagram_to_dict(A)))
        B = diagram_from_dict(raw)
        assert B.homs == A.homs
        M = regular_diag_module(A, True)
        M2 = module_from_dict(B, json.loads(json.dumps(module_to_dict(M))))
        assert M2.dims() == M.dims() and M2.T == M.T


def test_bundle_field_override():
    A = curated_diagrams()["dual-to-k-P2"]
    B = diagram_from_dict(diagram_to_dict(A), GF(5))
    assert B.field == GF(5)


def test_adjunction_sample():
    A = curated_diagrams()["const-k-chain3"]
    Ap, sub = subdivide_diagram(A)
    rng = random.Random(4)
    for _ in range(3):
        N = random_module(Ap, rng, False, 1)
        M = random_module(A, rng, False, 1)
        rep = adjunction_data(sub.d, N, M)
        assert rep.ok
        assert rep.hom_dims[0] == rep.hom_dims[1]


def test_counit_invertible_and_pullback_full_faithful():
    A = curated_diagrams()["dual-to-k-P2"]
    Ap, sub = subdivide_diagram(A)
    rng = random.Random(9)
    for _ in range(3):
        M = random_module(A, rng, False, 2)
        N = random_module(A, rng, False, 2)
        Mp, Np = subdivide_module(M, sub, Ap), subdivide_module(N, sub, Ap)
        basis = hom_space(M, N)
        pulled = [pullback_map(sub.d, e, Mp, Np) for e in basis]
        assert len(hom_space(Mp, Np)) == len(basis)
        from cctlab.diagram import maps_rank
        assert maps_rank(pulled) == len(basis)
        rep = adjunction_data(sub.d, Mp, M)
        assert rep.counit_invertible


def test_subdivision_reused():
    A = curated_diagrams()["const-k-P2"]
    sub = subdivide(A.category)
    Ap, sub2 = subdivide_diagram(A, sub)
    assert sub2 is sub
    assert rank(Ap.homs[Ap.category.non_identity()[0]]) == 1
