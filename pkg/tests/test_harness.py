import numpy as np
import pytest

from qsp.errors import InputError
from qsp.harness import (
    CoidealRankOneFamily,
    Report,
    check_cylinder_coideal,
    check_cylinder_vogan,
    check_octagon_coideal,
    check_octagon_vogan,
    check_ribbon_coideal,
    check_ribbon_vogan,
    chi_n_value,
    lambda_from_trace,
    run_axioms,
    run_kz_suite,
    run_rank_one,
    t_of_lambda,
)
from qsp.rootsys import build_root_datum
from qsp.uqrep import QParams, build_irrep
from qsp.vogan10 import build_Mr

Q = 0.7


def test_report_pass_semantics():
    rep = Report("x", {}, {"a": 1e-12, "b": 2e-3}, {"a": 1e-9, "b": 1e-2})
    assert rep.passed
    rep2 = Report("x", {}, {"a": 1e-6}, {"a": 1e-9})
    assert not rep2.passed
    js = rep.to_json()
    assert js["pass"] and "residuals" in js


def test_lambda_from_trace_roundtrip():
    for lam in (0.5, 1.0, 2.0):
        fam = CoidealRankOneFamily(Q, t_of_lambda(lam, Q))
        c = fam.braid(fam.v)
        got = lambda_from_trace(c, Q)
        assert min(abs(g - lam) for g in got) < 1e-9
        assert got[0] == -got[1]


def test_lambda_from_trace_scalar_flagged():
    with pytest.raises(InputError):
        lambda_from_trace(0.1 * np.eye(2), Q)


def test_t_lambda_inverse():
    for lam in (0.3, 1.7):
        t = t_of_lambda(lam, Q)
        assert t == pytest.approx(
            Q ** -0.5 * (Q ** -lam - Q ** lam) / (1 / Q - Q))
    assert t_of_lambda(0.0, Q) == 0.0


def test_chi_n_value_recursion():
    # chi_0 at lambda equals the ev_{it} value i t
    lam = 0.9
    assert chi_n_value(0, lam, Q) == pytest.approx(1j * t_of_lambda(lam, Q))


@pytest.fixture(scope="module")
def fam():
    return CoidealRankOneFamily(Q, 0.3)


def test_coideal_octagon(fam):
    v = fam.module(1)
    assert check_octagon_coideal(fam, v, v) < 1e-9
    assert check_octagon_coideal(fam, fam.module(2), v) < 1e-9


def test_coideal_ribbon(fam):
    v = fam.module(1)
    assert check_ribbon_coideal(fam, v, v) < 1e-9
    assert check_ribbon_coideal(fam, fam.module(2), v) < 1e-9


def test_coideal_cylinder(fam):
    v = fam.module(1)
    res = check_cylinder_coideal(fam, v, v)
    assert max(res.values()) < 1e-9


def test_vogan_checks():
    qp = QParams(Q)
    datum = build_root_datum([("A", 1)])
    m = build_Mr(0.25, qp, 14)
    v = build_irrep(datum, datum.weight([1]), qp)
    assert check_octagon_vogan(m, v, v, qp) < 1e-9
    assert check_ribbon_vogan(m, v, v, qp) < 1e-9
    assert max(check_cylinder_vogan(m, v, v, qp).values()) < 1e-9


def test_axiom_suites_pass():
    for source, kw in (("coideal", {"t": 0.3}), ("kz", {"t": 1.0}),
                       ("vogan", {"r": 0.25})):
        rep = run_axioms(source, Q, **kw)
        assert rep.passed, (source, rep.residuals)


def test_axiom_unknown_source():
    with pytest.raises(InputError):
        run_axioms("nope", Q)


def test_kz_suite():
    rep = run_kz_suite(Q, lams=(0.0, 1.0))
    assert rep.passed, rep.residuals


def test_rank_one_probe():
    rep = run_rank_one(Q, 0.25)
    assert rep.passed, rep.residuals
    assert rep.info["matching_hypotheses"] == ["r+1"]
    assert rep.info["lambda_of_r"] == pytest.approx(1.25)
    assert rep.info["fusion"] == {"-1.25": 1, "0.75": 1}


def test_run_all_aggregates():
    from qsp.harness import reports_to_json, run_all
    import json
    reports = run_all(q=0.7, r=0.25, levels=10)
    assert len(reports) == 5
    assert all(rep.passed for rep in reports)
    payload = json.loads(reports_to_json(reports))
    assert {p["case"] for p in payload} == {
        "axioms[coideal]", "axioms[kz]", "axioms[vogan]", "kz-suite",
        "rank-one"}


def test_rank_one_fusion_q_independent():
    rep1 = run_rank_one(0.7, 1.0, levels=10)
    rep2 = run_rank_one(0.55, 1.0, levels=10)
    assert rep1.info["fusion"] == rep2.info["fusion"]
    assert rep1.info["matching_hypotheses"] == rep2.info["matching_hypotheses"]


def test_residual_keys_are_paper_tags():
    # every residual key carries a recognizable equation tag
    known = ("EqOct2", "EqRB2", "eq:Eg", "eq:RTKZ", "cyl-", "flatness",
             "sv[", "eig[", "trace-lambda", "vogan-", "exactly-one",
             "fusion", "character")
    for source, kw in (("coideal", {"t": 0.3}), ("kz", {}), ("vogan", {})):
        rep = run_axioms(source, Q, **kw)
        for key in rep.residuals:
            assert any(key.startswith(tag) or tag in key for tag in known), key
    rep = run_rank_one(Q, 0.25, levels=10)
    for key in rep.residuals:
        assert any(key.startswith(tag) or tag in key for tag in known), key
