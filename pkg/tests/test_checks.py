import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cctlab.checks import CHECKS, SUITES, CheckConfig, CheckReport, content_hash, run_check
from cctlab.diagram import validate_module
from cctlab.exalg import GF, QQ
from cctlab.fincat import CatKind, classify
from cctlab.instances import curated_diagrams, irreducible, random_delta, random_module, topological_order


def test_all_checks_registered():
    assert set(CHECKS) == set(SUITES)


def test_unknown_check():
    with pytest.raises(KeyError, match="unknown check"):
        run_check("nope")


def test_report_json_is_canonical():
    a = run_check("prop32", CheckConfig(seed=3, samples=4))
    b = run_check("prop32", CheckConfig(seed=3, samples=4))
    assert a.to_json() == b.to_json()
    assert a.wall_time >= 0 and "wall_time" not in a.to_json()


def test_unrejected_control_fails_report():
    r = CheckReport("x", {})
    r.control("ok", True)
    assert r.outcome
    r.control("slipped", False)
    assert not r.outcome and "slipped" in r.failures[0]


def test_content_hash_depends_on_everything():
    base = content_hash("check", "prop21", {"seed": 1})
    assert base != content_hash("check", "prop21", {"seed": 2})
    assert base != content_hash("check", "prop32", {"seed": 1})
    assert base == content_hash("check", "prop21", {"seed": 1})


@pytest.mark.parametrize("name", ["prop21", "prop32", "prop37", "adjunction", "dstar-ff"])
@pytest.mark.parametrize("p", [2, 101])
def test_fast_suites_over_prime_fields(name, p):
    rep = run_check(name, CheckConfig(field=GF(p), samples=6))
    assert rep.outcome, rep.failures
    assert all(c["rejected"] in (True, None) for c in rep.controls)
    assert any(c["rejected"] for c in rep.controls)


def test_sign_control_not_applicable_in_characteristic_two():
    rep = run_check("prop32", CheckConfig(field=GF(2), samples=2))
    sign = [c for c in rep.controls if "sign" in c["control"]]
    assert sign and sign[0]["rejected"] is None


@given(st.integers(0, 10**6))
def test_random_deltas_within_bounds(seed):
    C = random_delta(random.Random(seed))
    assert len(C.objects) <= 5 and len(C.non_identity()) <= 8
    assert classify(C) >= CatKind.DELTA


@given(st.integers(0, 10**6), st.sampled_from(sorted(curated_diagrams())), st.booleans())
def test_random_modules_are_valid(seed, name, bimod):
    A = curated_diagrams(QQ)[name]
    M = random_module(A, random.Random(seed), bimod)
    validate_module(M)
    assert M.bimodule == bimod or not any(M.dims().values())


def test_topological_order_puts_sinks_first():
    A = curated_diagrams()["const-k-square"]
    order = topological_order(A.category)
    assert order[0] == "d" and order[-1] == "a"
    assert sorted(irreducible(A.category)) == ["a<b", "a<c", "b<d", "c<d"]
