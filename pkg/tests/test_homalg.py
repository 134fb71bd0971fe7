import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cctlab.algkit import dual_numbers, regular_bimodule, regular_module
from cctlab.checks import curated_double_complexes, random_qiso_instance
from cctlab.exalg import GF, QQ, Mat
from cctlab.homalg import (ChainMap, Complex, ComplexError, NotContractible, bar_double_complex,
                           build_cone_contraction, cohomology_dims, complex_from_dict, complex_to_dict, compose,
                           cone, contraction, dump_complex, extract_homotopy_equivalence, homology_dims,
                           identity_map, is_contraction, is_homotopy, is_relative_qiso, make_complex,
                           relations_hold, total_complex, zero_map)

one = Mat.identity(QQ, 1)
SEG = Complex(QQ, (1, 1), {1: one})     # k -id-> k in degrees 1 -> 0
PT = Complex(QQ, (1,), {})               # k in degree 0
ZERO = Complex(QQ, (0,), {})


def closed_form(M, n):
    """s = (0, id; 0, 0) on C(id_M)_n = M_{n-1} ⊕ M_n."""
    a, b, c = M.dim(n - 1), M.dim(n), M.dim(n + 1)
    top = Mat.hstack(QQ, [Mat.zeros(QQ, b, a), Mat.identity(QQ, b)], b)
    return Mat.vstack(QQ, [top, Mat.zeros(QQ, c, a + b)], a + b)


def test_cone_of_identity_contracted_by_closed_form():
    for M in (SEG, PT, make_complex(QQ, [2, 1, 1], {1: [[1], [0]], 2: [[0]]})):
        C = cone(identity_map(M))
        C.check()
        s = {n: closed_form(M, n) for n in range(C.top + 1)}
        assert is_contraction(C, s)


def test_cone_of_zero_source_is_target():
    N = make_complex(QQ, [1, 2], {1: [[1, 0]]})
    f = ChainMap(ZERO, N, {})
    C = cone(f)
    assert C.dims[:2] == N.dims
    assert homology_dims(C)[:2] == homology_dims(N)


def test_cone_of_segment_to_zero_is_exact():
    f = ChainMap(SEG, ZERO, {})
    assert all(h == 0 for h in homology_dims(cone(f)))


def test_contraction_examples():
    s = contraction(SEG)
    assert s[0] == one
    with pytest.raises(NotContractible) as exc:
        contraction(PT)
    assert exc.value.degree == 0


def test_relative_qiso():
    X = make_complex(QQ, [1, 1], {1: [[0]]})
    assert is_relative_qiso({"a": identity_map(X), "b": identity_map(SEG)}).ok
    bad = is_relative_qiso({"a": identity_map(X), "b": ChainMap(PT, ZERO, {})})
    assert not bad.ok and bad.failing_object == "b" and bad.failing_degree == 1
    smoke = is_relative_qiso({o: ChainMap(SEG, ZERO, {}) for o in "xyz"})
    assert smoke.ok


def test_extract_from_identity():
    f = identity_map(SEG)
    C = cone(f)
    s = {n: closed_form(SEG, n) for n in range(C.top + 1)}
    he = extract_homotopy_equivalence(f, s)
    assert all(he.gamma[n].is_identity() for n in range(2))
    assert all(m.is_zero() for m in he.alpha.values())
    assert all(m.is_zero() for m in he.delta.values())


def test_extract_for_map_to_zero():
    f = ChainMap(SEG, ZERO, {})
    he = extract_homotopy_equivalence(f, contraction(cone(f)))
    assert all(he.gamma[n].is_zero() for n in range(2))
    # g f - id = a d + d a with g = 0, so -a contracts the source
    sM = {k - 1: a for k, a in he.alpha.items() if k >= 1}
    assert is_contraction(SEG, {k: -m for k, m in sM.items()})


def test_build_from_identity_data():
    f = identity_map(SEG)
    s = build_cone_contraction(f, f, {}, {})
    assert all(s[n] == closed_form(SEG, n) for n in s)


def test_build_rejects_bad_precondition():
    f = ChainMap(SEG, SEG, {0: one, 1: one})
    g = ChainMap(SEG, SEG, {0: one.scale(2), 1: one.scale(2)})
    with pytest.raises(ComplexError, match="precondition"):
        build_cone_contraction(f, g, {}, {})


@given(st.integers(0, 10**6), st.sampled_from([QQ, GF(3)]))
def test_prop32_round_trip(seed, F):
    rng = random.Random(seed)
    f, gamma, sM, sN, fp = random_qiso_instance(F, rng)
    assert sum(f.source.dims) + sum(f.target.dims) <= 12
    s = build_cone_contraction(f, gamma, sM, sN)
    assert is_contraction(cone(f), s)
    he = extract_homotopy_equivalence(fp, contraction(cone(fp)))
    assert all(relations_hold(fp, he).values())
    sM2 = {k - 1: a for k, a in he.alpha.items() if k >= 1}
    sN2 = {k: -d for k, d in he.delta.items()}
    assert is_homotopy(compose(fp, he.gamma), identity_map(fp.target), sN2)
    assert is_contraction(cone(fp), build_cone_contraction(fp, he.gamma, sM2, sN2))


@given(st.integers(0, 10**6))
def test_cone_square_zero_and_mis_signed_cone(seed):
    rng = random.Random(seed)
    f, *_ = random_qiso_instance(QQ, rng)
    cone(f).check()
    assert is_contraction(cone(identity_map(SEG)), {n: closed_form(SEG, n) for n in range(3)})
    bad = cone(identity_map(SEG), sign=1)
    assert not is_contraction(bad, {n: closed_form(SEG, n) for n in range(3)})


@pytest.mark.parametrize("name", list(curated_double_complexes(QQ)))
def test_prop37_identities(name):
    D = curated_double_complexes(QQ)[name]
    T = total_complex(D)
    eps, t0, h = T.eps, T.t0, T.h
    assert all((eps[n] @ t0[n]).is_identity() for n in range(T.tot.top + 1))
    assert is_homotopy(identity_map(T.tot), compose(t0, eps), h)
    assert homology_dims(T.tot)[:D.aug.top + 1] == homology_dims(D.aug)


def test_single_row_tot_is_the_row():
    T = total_complex(curated_double_complexes(QQ)["single-row"])
    assert T.tot.dims == (1, 1)
    assert all(m.is_zero() for m in T.h.values())


def test_h_is_built_from_row_contractions():
    D = curated_double_complexes(QQ)["bar-dual-w3"]
    T = total_complex(D)
    # h^n restricted to the (h, i) block is t^{h+1} into (h+1, i), zero past the last column
    n = 2
    comps = T.components
    row_off = {c: sum(D.dim(*x) for x in comps[n + 1][:k]) for k, c in enumerate(comps[n + 1])}
    col_off = {c: sum(D.dim(*x) for x in comps[n][:k]) for k, c in enumerate(comps[n])}
    for (hh, i) in comps[n]:
        block = T.h[n].submatrix(range(T.tot.dim(n + 1)), range(col_off[(hh, i)], col_off[(hh, i)] + D.dim(hh, i)))
        if hh + 1 < D.width:
            tgt = (hh + 1, i)
            piece = block.submatrix(range(row_off[tgt], row_off[tgt] + D.dim(*tgt)), range(block.ncols))
            assert piece == D.th(hh + 1, i)
        else:
            assert block.is_zero()


def test_tot_without_sign_is_rejected():
    D = curated_double_complexes(QQ)["bar-dual-w3"]
    with pytest.raises(ComplexError):
        total_complex(D, vertical_sign=False)


def test_bar_rows_recover_augmentation_homology():
    B = dual_numbers()
    R = regular_module(B)
    x = B.right_regular(1)
    for width in (2, 3, 4):
        D = bar_double_complex(B, [R, R, R], {1: x, 2: x}, width)
        T = total_complex(D)
        assert homology_dims(T.tot)[:3] == [1, 0, 1]


def test_cohomology_dims_examples():
    assert cohomology_dims(SEG) == [0, 0]
    X = make_complex(QQ, [2, 3, 1])
    assert cohomology_dims(X) == [2, 3, 1]
    from cctlab.algkit import bar_cochain_complex
    B = dual_numbers()
    assert cohomology_dims(bar_cochain_complex(B, regular_bimodule(B), 2), [0, 1, 2]) == [2, 1, 1]
    with pytest.raises(ValueError):
        cohomology_dims(SEG, [5])


def test_complex_dump_roundtrip():
    X = make_complex(QQ, [2, 1, 1], {1: [["1/2"], [0]], 2: [[0]]})
    Y = complex_from_dict(complex_to_dict(X))
    assert Y.dims == X.dims and all(Y.d(n) == X.d(n) for n in (1, 2))
    golden = ('{\n "differentials": {\n  "1": [\n   [\n    "1/2"\n   ],\n   [\n    "0"\n   ]\n  ],\n'
              '  "2": [\n   [\n    "0"\n   ]\n  ]\n },\n "dims": [\n  2,\n  1,\n  1\n ],\n "field": "QQ"\n}')
    assert dump_complex(X) == golden


def test_make_complex_rejects_nonzero_square():
    with pytest.raises(ComplexError):
        make_complex(QQ, [1, 1, 1], {1: [[1]], 2: [[1]]})


def test_zero_map_homotopic_to_itself():
    assert is_homotopy(zero_map(SEG, SEG), zero_map(SEG, SEG), {})
