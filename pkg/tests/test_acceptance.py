"""Acceptance criteria 1-10, one PASS/FAIL line each.

Run under pytest (lines appear in the terminal summary) or directly:
    python3 tests/test_acceptance.py
"""

import time

from cctlab.algkit import dual_numbers, hochschild_dims, regular_bimodule, upper_triangular
from cctlab.checks import CHECKS, CheckConfig, CheckReport, run_check, shriek_hh
from cctlab.diagram import shriek_algebra
from cctlab.exalg import QQ
from cctlab.instances import curated_diagrams

RESULTS: dict[int, tuple[bool, float, str]] = {}
_REPORTS: dict[str, tuple[CheckReport, float]] = {}

LIMITS = {1: 30, 2: 30, 3: 30, 4: 60, 5: 60, 6: 120, 7: 600, 8: 600}
TITLES = {
    1: "subdivision yields posets (prop21)",
    2: "cone contractions <-> homotopy equivalences (prop32)",
    3: "Tot homotopy identities (prop37)",
    4: "(d_!, d*) adjunction",
    5: "d* full and faithful",
    6: "! full and faithful (SCCT)",
    7: "HH invariance under subdivision",
    8: "GCCT chain over the parallel pair",
    9: "HH spot values",
    10: "negative controls rejected",
}


def report_for(name: str) -> tuple[CheckReport, float]:
    if name not in _REPORTS:
        t = time.perf_counter()
        rep = run_check(name, CheckConfig(seed=1, max_degree=3, field=QQ))
        _REPORTS[name] = (rep, time.perf_counter() - t)
    return _REPORTS[name]


def record(n: int, ok: bool, seconds: float, detail: str = "") -> None:
    RESULTS[n] = (ok, seconds, detail)
    print(line(n))


def line(n: int) -> str:
    ok, sec, detail = RESULTS[n]
    limit = f" (limit {LIMITS[n]} s)" if n in LIMITS else ""
    extra = f"  {detail}" if detail else ""
    return f"criterion {n:>2} {'PASS' if ok else 'FAIL'}  {TITLES[n]}  {sec:.1f} s{limit}{extra}"


def _suite_criterion(n: int, name: str, extra=lambda rep: (True, "")) -> None:
    rep, sec = report_for(name)
    ok_extra, detail = extra(rep)
    ok = rep.outcome and ok_extra and sec < LIMITS[n]
    if not rep.outcome:
        detail = "; ".join(rep.failures[:3])
    record(n, ok, sec, detail)
    assert rep.outcome, rep.failures
    assert ok_extra, detail
    assert sec < LIMITS[n], f"{sec:.1f} s over the {LIMITS[n]} s limit"


def test_criterion_1():
    def extra(rep):
        fam = {w["family"]: w for w in rep.witnesses}
        ok = fam["delta"]["count"] >= 100 and fam["poset"]["count"] >= 100 and \
            (fam["parallel pair"]["objects"], fam["parallel pair"]["non_identity"]) == (4, 4)
        return ok, f"{fam['delta']['count']} deltas, {fam['poset']['count']} posets, parallel pair 4/4"
    _suite_criterion(1, "prop21", extra)


def test_criterion_2():
    def extra(rep):
        ws = rep.witnesses
        ok = len(ws) >= 50 and max(w["total_dim"] for w in ws) <= 12 and \
            all(w["build"] and w["extract"] and w["round_trip"] for w in ws)
        return ok, f"{len(ws)} complexes, max total dim {max(w['total_dim'] for w in ws)}"
    _suite_criterion(2, "prop32", extra)


def test_criterion_3():
    def extra(rep):
        names = {w["instance"] for w in rep.witnesses}
        ok = {"bar-k-w2", "bar-dual-w3"} <= names
        return ok, f"{len(names)} double complexes incl. bar rows for k and k[x]/x^2"
    _suite_criterion(3, "prop37", extra)


def test_criterion_4():
    def extra(rep):
        trials = [w for w in rep.witnesses if "trial" in w]
        diagrams = {w["diagram"] for w in trials}
        ok = len(trials) >= 20 and "const-k-chain3" in diagrams and \
            all(w["counit_invertible"] and w["bijection"] and all(w["triangles"]) for w in trials)
        return ok, f"{len(trials)} instances over {len(diagrams)} diagrams"
    _suite_criterion(4, "adjunction", extra)


def test_criterion_5():
    def extra(rep):
        ws = rep.witnesses
        return len(ws) >= 20 and all(w["bijection"] for w in ws), f"{len(ws)} instances"
    _suite_criterion(5, "dstar-ff", extra)


def test_criterion_6():
    def extra(rep):
        pairs = [w for w in rep.witnesses if "hom" in w]
        diagrams = {w["diagram"] for w in pairs}
        ok = diagrams == set(curated_diagrams(QQ)) and all(w["bijection"] for w in pairs)
        return ok, f"{len(pairs)} bimodule pairs over {len(diagrams)} diagrams"
    _suite_criterion(6, "scct", extra)


def test_criterion_7():
    def extra(rep):
        ws = {w["diagram"]: w for w in rep.witnesses}
        ok = len(ws) == 5 and all(w["equal"] for w in ws.values()) and \
            ws["const-k-P2"]["H(A!)"] == [1, 0, 0, 0] == ws["const-k-P2"]["H((A')!)"]
        return ok, " ".join(f"{k}={tuple(w['H(A!)'])}" for k, w in ws.items())
    _suite_criterion(7, "invariance", extra)


def test_criterion_8():
    def extra(rep):
        w = rep.witnesses[0]
        h1, h2 = w["H((A')!)"], w["H((A'')!)"]
        return w["equal"] and h1 == h2, f"H((A')!)={tuple(h1)} H((A'')!)={tuple(h2)}"
    _suite_criterion(8, "gcct", extra)


def test_criterion_9():
    t = time.perf_counter()
    T2, D = upper_triangular(QQ), dual_numbers(QQ)
    t2 = hochschild_dims(T2, regular_bimodule(T2), 2, "bar")
    dn = hochschild_dims(D, regular_bimodule(D), 2, "bar")
    SA = shriek_algebra(curated_diagrams(QQ)["const-k-P2"]).algebra
    via_shriek = shriek_hh(curated_diagrams(QQ)["const-k-P2"], None, 2, "bar")
    ok = t2 == [1, 0, 0] and dn == [2, 1, 1] and SA.structure_equal(T2) and via_shriek == [1, 0, 0]
    record(9, ok, time.perf_counter() - t, f"T_2 {tuple(t2)}, k[x]/x^2 {tuple(dn)}, (const k P2)! {tuple(via_shriek)}")
    assert ok


def test_criterion_10():
    t = time.perf_counter()
    missing = []
    for name in CHECKS:
        rep, _ = report_for(name)
        if not any(c["rejected"] is True for c in rep.controls):
            missing.append(name)
        if any(c["rejected"] is False for c in rep.controls):
            missing.append(f"{name} (a control slipped through)")
    kinds = {c["control"] for name in CHECKS for c in report_for(name)[0].controls}
    wanted = ["broken naturality square rejected", "corrupted A! structure constant rejected",
              "wrong sign in the cone differential"]
    missing += [k for k in wanted if k not in kinds]
    # a control that is not rejected must turn the report red
    probe = CheckReport("probe", {})
    probe.control("unrejected mutation", False)
    ok = not missing and probe.outcome is False
    record(10, ok, time.perf_counter() - t, f"{sum(len(report_for(n)[0].controls) for n in CHECKS)} controls"
           if ok else f"missing: {missing}")
    assert ok


if __name__ == "__main__":
    import sys
    status = 0
    for n in range(1, 11):
        try:
            globals()[f"test_criterion_{n}"]()
        except AssertionError:
            status = 1
    sys.exit(status)
