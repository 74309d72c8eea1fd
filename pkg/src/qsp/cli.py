"""Command-line interface.

Exit codes: 0 pass, 1 check failed, 2 invalid input, 3 resource limit.
All subcommands emit JSON on stdout; --out writes it to a file instead.
"""

from __future__ import annotations

import json
import math
import sys

import click
import numpy as np

from .coideal import (
    CoidealParams,
    characters,
    character_relations_residual,
    counit_module,
    kmatrix_solve,
    no_parameter,
    validate_star,
)
from .diagrams import diagram_from_json, enumerate_admissible
from .errors import InputError, QspError, ResourceError
from .harness import (
    Report,
    lambda_from_trace,
    reports_to_json,
    run_axioms,
    run_kz_suite,
    run_rank_one,
)
from .kzmono import MonodromyProblem, psi as kz_psi, split_tensors, kz_coeffs
from .lusztig import BraidContext, verify_appB
from .rmatrix import rmat
from .rootsys import build_root_datum, parse_type_string, restrict_datum
from .uqrep import QParams, build_irrep, module_to_json
from .vogan10 import build_Mr, plain_block_eigenvalues, e_matrix_component_scalars


def _emit(obj, out):
    text = json.dumps(obj, indent=2, sort_keys=True)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        click.echo(text)


def _run(fn):
    try:
        return fn()
    except InputError as exc:
        click.echo(f"input error: {exc}", err=True)
        sys.exit(2)
    except ResourceError as exc:
        click.echo(f"resource error: {exc}", err=True)
        sys.exit(3)
    except QspError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)


def _exit_report(reports, out):
    payload = json.loads(reports_to_json(reports)) \
        if isinstance(reports, list) else reports.to_json()
    _emit(payload, out)
    ok = all(r["pass"] for r in payload) if isinstance(payload, list) \
        else payload["pass"]
    sys.exit(0 if ok else 1)


@click.group()
def main():
    """Quantum symmetric pair workbench."""


@main.group()
def diagram():
    """Satake diagram utilities."""


@diagram.command("check")
@click.option("--file", "path", required=True, type=click.Path(exists=True))
@click.option("--out", default=None)
def diagram_check(path, out):
    def go():
        with open(path, encoding="utf-8") as fh:
            diag = diagram_from_json(fh.read())
        return diag
    diag = _run(go)
    _emit({"admissible": True, "diagram": diag.to_json()}, out)


@diagram.command("list")
@click.option("--type", "typ", required=True)
@click.option("--rank", required=True, type=int)
@click.option("--out", default=None)
def diagram_list(typ, rank, out):
    def go():
        datum = build_root_datum([(typ, rank)])
        return [d.to_json() for d in enumerate_admissible(datum)]
    _emit(_run(go), out)


@main.group()
def rep():
    """Representation builders."""


@rep.command("build")
@click.option("--algebra", required=True)
@click.option("--weight", required=True)
@click.option("--q", required=True, type=float)
@click.option("--out", default=None)
def rep_build(algebra, weight, q, out):
    def go():
        datum = build_root_datum(parse_type_string(algebra))
        coords = [int(c) for c in weight.replace(",", " ").split()]
        return module_to_json(build_irrep(datum, datum.weight(coords), QParams(q)))
    _emit(_run(go), out)


@main.command("rmatrix")
@click.option("--algebra", required=True)
@click.option("--v", "vw", required=True)
@click.option("--w", "ww", required=True)
@click.option("--q", required=True, type=float)
@click.option("--out", default=None)
def rmatrix_cmd(algebra, vw, ww, q, out):
    def go():
        datum = build_root_datum(parse_type_string(algebra))
        qp = QParams(q)
        mv = build_irrep(datum, datum.weight(
            [int(c) for c in vw.replace(",", " ").split()]), qp)
        mw = build_irrep(datum, datum.weight(
            [int(c) for c in ww.replace(",", " ").split()]), qp)
        r = rmat(mv, mw)
        return {"convention": r.convention,
                "matrix": _cmat(r.matrix)}
    _emit(_run(go), out)


def _cmat(m):
    return [[[float(x.real), float(x.imag)] for x in row] for row in m]


@main.group()
def coideal():
    """Coideal subalgebra utilities."""


@coideal.command("validate")
@click.option("--diagram", "diagram_path", required=True,
              type=click.Path(exists=True))
@click.option("--c", "c_str", default=None,
              help="comma separated values per white vertex; default: "
                   "no-parameter solution")
@click.option("--s", "s_str", default=None)
@click.option("--q", required=True, type=float)
@click.option("--out", default=None)
def coideal_validate(diagram_path, c_str, s_str, q, out):
    def go():
        with open(diagram_path, encoding="utf-8") as fh:
            diag = diagram_from_json(fh.read())
        qp = QParams(q)
        params = no_parameter(diag, qp)
        if c_str:
            vals = [complex(x) for x in c_str.split(",")]
            params = CoidealParams(dict(zip(diag.white, vals)), params.s)
        if s_str:
            vals = [complex(x) for x in s_str.split(",")]
            params = CoidealParams(params.c, dict(zip(diag.white, vals)))
        ok, violations = validate_star(diag, params, qp)
        return {"star_invariant": ok, "violations": violations,
                "c": {str(r): [params.c[r].real if hasattr(params.c[r], 'real')
                               else params.c[r], 0.0] for r in diag.white}}
    payload = _run(go)
    _emit(payload, out)
    sys.exit(0 if payload["star_invariant"] else 1)


@main.command("kmatrix")
@click.option("--diagram", "diagram_path", required=True,
              type=click.Path(exists=True))
@click.option("--t", required=True, type=float)
@click.option("--rep", "rep_weight", default="1")
@click.option("--q", required=True, type=float)
@click.option("--out", default=None)
def kmatrix_cmd(diagram_path, t, rep_weight, q, out):
    def go():
        with open(diagram_path, encoding="utf-8") as fh:
            diag = diagram_from_json(fh.read())
        qp = QParams(q)
        datum = diag.datum
        params = no_parameter(diag, qp)
        if diag.datum.rank == 1:
            params = CoidealParams({1: q ** -2}, {1: 1j * t})
        x0 = counit_module(diag, params, qp)
        target = build_irrep(datum, datum.weight(
            [int(c) for c in rep_weight.replace(",", " ").split()]), qp)
        fund = build_irrep(datum, datum.fundamental_weight(1), qp)
        eta = kmatrix_solve(diag, params, qp, x0, target, fuse_from=fund)
        lam = None
        if eta.shape[0] == 2:
            lam = lambda_from_trace(eta, q)[0]
        from .coideal import tau_tau0_perm
        from .uqrep import twist_module
        sigma = tau_tau0_perm(diag)
        plain = x0.fuse(target).generator_matrices()
        twisted = x0.fuse(twist_module(target, sigma)).generator_matrices()
        resid = max(
            float(np.linalg.norm(eta @ twisted[k] - plain[k] @ eta))
            / max(float(np.linalg.norm(plain[k])), 1e-30)
            for k in plain)
        return {"eta": _cmat(eta),
                "singular_values": sorted(
                    float(x) for x in np.linalg.svd(eta, compute_uv=False)),
                "lambda_from_trace": lam,
                "residuals": {"twisted_intertwining": resid}}
    _emit(_run(go), out)


@main.group()
def kz():
    """Cyclotomic KZ monodromy."""


@kz.command("psi")
@click.option("--config", required=True, type=click.Path(exists=True))
@click.option("--out", default=None)
def kz_psi_cmd(config, out):
    def go():
        with open(config, encoding="utf-8") as fh:
            cfg = json.load(fh)
        if "a" in cfg:
            mats = [np.array([[complex(re, im) for re, im in row]
                              for row in cfg[key]])
                    for key in ("a", "b_plus", "b_minus")]
        else:
            ts = split_tensors()
            hbar = -1j * math.log(cfg["q"]) / math.pi
            mats = kz_coeffs(ts, cfg.get("lambda", 1.0),
                             cfg.get("spin2_1", 1), cfg.get("spin2_2", 1),
                             hbar)
        prob = MonodromyProblem(*mats,
                                series_order=cfg.get("series_order", 40))
        res = kz_psi(prob)
        return {"psi": _cmat(res.psi), "spread": res.spread,
                "tail_bound": res.tail_bound,
                "eig_condition": res.eig_condition}
    _emit(_run(go), out)


@kz.command("verify")
@click.option("--suite", default="su2")
@click.option("--q", required=True, type=float)
@click.option("--out", default=None)
def kz_verify(suite, q, out):
    if suite != "su2":
        click.echo(f"unknown suite {suite!r}", err=True)
        sys.exit(2)
    rep_ = _run(lambda: run_kz_suite(q))
    _exit_report(rep_, out)


@main.group()
def vogan():
    """Vogan-side twisted double."""


@vogan.command("e-matrix")
@click.option("--r", required=True, type=float)
@click.option("--q", required=True, type=float)
@click.option("--levels", default=20, type=int)
@click.option("--out", default=None)
def vogan_e_matrix(r, q, levels, out):
    def go():
        qp = QParams(q)
        datum = build_root_datum([("A", 1)])
        m = build_Mr(r, qp, levels)
        v = build_irrep(datum, datum.weight([1]), qp)
        blocks = plain_block_eigenvalues(m, v, qp)
        scalars, defect = e_matrix_component_scalars(m, v, qp)
        return {
            "eigenvalue_moduli_per_weight": {
                str(h): sorted(abs(x) for x in ev)
                for h, ev in blocks.items()},
            "component_scalars": {
                str(h): {"sub": [mu.real, mu.imag],
                         "quotient": None if lam is None
                         else [lam.real, lam.imag]}
                for h, (mu, lam) in scalars.items()},
            "chain_defect": defect,
            "expected": sorted([q ** (-r - 1.5), q ** (r + 0.5)]),
        }
    _emit(_run(go), out)


@main.group()
def verify():
    """Residual suites with pass/fail reports."""


@verify.command("rank-one")
@click.option("--q", required=True, type=float)
@click.option("--r", required=True, type=float)
@click.option("--levels", default=14, type=int)
@click.option("--out", default=None)
def verify_rank_one(q, r, levels, out):
    _exit_report(_run(lambda: run_rank_one(q, r, levels)), out)


@verify.command("axioms")
@click.option("--source", required=True,
              type=click.Choice(["coideal", "kz", "vogan"]))
@click.option("--q", required=True, type=float)
@click.option("--t", default=0.3, type=float)
@click.option("--r", default=0.25, type=float)
@click.option("--out", default=None)
def verify_axioms(source, q, t, r, out):
    _exit_report(_run(lambda: run_axioms(source, q, t=t, r=r)), out)


@verify.command("kz")
@click.option("--q", required=True, type=float)
@click.option("--out", default=None)
def verify_kz(q, out):
    _exit_report(_run(lambda: run_kz_suite(q)), out)


@verify.command("appendixB")
@click.option("--diagram", "diagram_path", required=True,
              type=click.Path(exists=True))
@click.option("--q", required=True, type=float)
@click.option("--out", default=None)
def verify_appendix_b(diagram_path, q, out):
    def go():
        with open(diagram_path, encoding="utf-8") as fh:
            diag = diagram_from_json(fh.read())
        if not diag.X:
            raise InputError("appendix-B checks need a nonempty blackened set")
        ctx = BraidContext(diag, QParams(q))
        sub, _, _ = restrict_datum(diag.datum, diag.X)
        residuals = {}
        for coords in ([1] * sub.rank, [2] * sub.rank):
            res = verify_appB(ctx, coords)
            for key, val in res.items():
                residuals[f"{key}[{coords}]"] = val
        return Report("appendixB", {"q": q, "X": list(diag.X)},
                      residuals, {k: 1e-8 for k in residuals})
    _exit_report(_run(go), out)


@verify.command("characters")
@click.option("--diagram", "diagram_path", required=True,
              type=click.Path(exists=True))
@click.option("--t", required=True, type=float)
@click.option("--q", default=0.7, type=float)
@click.option("--out", default=None)
def verify_characters(diagram_path, t, q, out):
    def go():
        with open(diagram_path, encoding="utf-8") as fh:
            diag = diagram_from_json(fh.read())
        qp = QParams(q)
        params = no_parameter(diag, qp)
        chi = characters(diag, qp, t)
        residuals = character_relations_residual(diag, params, qp, chi)
        return Report("characters", {"q": q, "t": t},
                      residuals, {k: 1e-10 for k in residuals})
    _exit_report(_run(go), out)


if __name__ == "__main__":
    main()
