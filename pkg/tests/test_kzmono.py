import math

import numpy as np
import pytest

from qsp.errors import AccuracyError, InputError, ResonanceError
from qsp.kzmono import (
    MonodromyProblem,
    d_coeff,
    flatness_residuals,
    kz_braid,
    kz_braid_commutes_with_k,
    kz_coeffs,
    mkz_consistency,
    psi,
    psi_commuting_oracle,
    resonance_check,
    spin_matrices,
    split_tensors,
    verify_eg,
    verify_octagon_kz,
)

TS = split_tensors()


def hbar_of(q):
    return -1j * math.log(q) / math.pi


def test_spin_matrices_relations():
    for j2 in (1, 2, 3):
        e, f, h = spin_matrices(j2)
        np.testing.assert_allclose(h @ e - e @ h, 2 * e, atol=1e-12)
        np.testing.assert_allclose(e @ f - f @ e, h, atol=1e-12)
        np.testing.assert_allclose(e.T, f, atol=1e-12)


def test_split_tensors_golden():
    e, f, h = TS.rep(1)
    np.testing.assert_allclose(TS.t_k(1, 1), -np.kron(f - e, f - e) / 2,
                               atol=1e-14)
    np.testing.assert_allclose(
        TS.t_m(1, 1), np.kron(h, h) / 2 + np.kron(e + f, e + f) / 2,
        atol=1e-14)
    np.testing.assert_allclose(
        TS.t_full(1, 1),
        np.kron(e, f) + np.kron(f, e) + np.kron(h, h) / 2, atol=1e-14)


def test_t_splits():
    for j2a, j2b in [(1, 1), (1, 2), (2, 2)]:
        np.testing.assert_allclose(
            TS.t_full(j2a, j2b), TS.t_k(j2a, j2b) + TS.t_m(j2a, j2b),
            atol=1e-13)


def test_casimir_on_fundamental():
    # full Casimir t-contraction acts as (varpi, varpi + 2rho) = 3/2
    e, f, h = TS.rep(1)
    cas = e @ f + f @ e + h @ h / 2
    np.testing.assert_allclose(cas, 1.5 * np.eye(2), atol=1e-13)


def test_sigma_involutive_and_conjugation():
    for j2 in (1, 2, 3):
        s = TS.sigma_matrix(j2)
        np.testing.assert_allclose(s @ s, np.eye(j2 + 1), atol=1e-12)
        e, f, h = TS.rep(j2)
        np.testing.assert_allclose(s @ e @ np.linalg.inv(s), -f, atol=1e-10)
        np.testing.assert_allclose(s @ h @ np.linalg.inv(s), -h, atol=1e-10)


def test_split_tensors_rejects_bad_sigma():
    with pytest.raises(InputError):
        split_tensors({"e": [1, 0, 0], "f": [0, 1, 0], "h": [0, 0, -1]})


def test_kz_coeffs_skew_hermitian():
    a, bp, bm = kz_coeffs(TS, 0.7, 1, 2, hbar_of(0.7))
    for m in (a, bp, bm):
        assert np.linalg.norm(m + m.conj().T) < 1e-12
    with pytest.raises(InputError):
        kz_coeffs(TS, 0.7, 1, 1, 0.3)


def test_d_commutes(q=0.7):
    a, bp, bm = kz_coeffs(TS, 1.0, 1, 1, hbar_of(q))
    d = d_coeff(TS, 1.0, 1, 1, hbar_of(q))
    for m in (a, bp, bm):
        assert np.linalg.norm(d @ m - m @ d) < 1e-12


def test_resonance_check():
    flags = resonance_check(np.diag([0.3, 1.3]))
    assert (1, 0, 1) in flags and len(flags) == 2  # both orderings reported
    assert resonance_check(np.diag([0.3, 0.9])) == []
    assert resonance_check(np.diag([0.5, 0.5])) == []  # zero difference ok


def test_psi_resonant_error():
    a = np.diag([0.0, 1.0])
    z = np.zeros((2, 2))
    with pytest.raises(ResonanceError):
        psi(MonodromyProblem(a, z, z))


def test_commuting_case():
    rng = np.random.default_rng(7)
    mats = [np.diag(rng.normal(size=3) * 0.4) for _ in range(3)]
    prob = MonodromyProblem(*mats)
    res = psi(prob)
    assert np.linalg.norm(res.psi - psi_commuting_oracle(prob)) < 1e-9
    assert res.spread < 1e-6


def test_zero_coefficients():
    z = np.zeros((3, 3))
    res = psi(MonodromyProblem(z, z, z))
    np.testing.assert_allclose(res.psi, np.eye(3), atol=1e-12)


def test_unitarity_skew_hermitian():
    a, bp, bm = kz_coeffs(TS, 1.2, 1, 1, hbar_of(0.55))
    res = psi(MonodromyProblem(a, bp, bm))
    n = a.shape[0]
    assert np.linalg.norm(res.psi.conj().T @ res.psi - np.eye(n)) < 1e-8


def test_shift_invariance():
    # Psi(a + D, b+, b-) = Psi(a, b+, b-) for D commuting with everything
    a, bp, bm = kz_coeffs(TS, 0.6, 1, 1, hbar_of(0.7))
    d = d_coeff(TS, 0.6, 1, 1, hbar_of(0.7))
    p1 = psi(MonodromyProblem(a, bp, bm)).psi
    p2 = psi(MonodromyProblem(a + d, bp, bm)).psi
    assert np.linalg.norm(p1 - p2) < 1e-7


def test_match_point_independence_reported():
    a, bp, bm = kz_coeffs(TS, 0.9, 1, 1, hbar_of(0.6))
    res = psi(MonodromyProblem(a, bp, bm))
    assert res.spread < 1e-6


def test_mkz_cross_route():
    a, bp, bm = kz_coeffs(TS, 0.8, 1, 1, hbar_of(0.7))
    assert mkz_consistency(MonodromyProblem(a, bp, bm)) < 1e-8


def test_tail_control_raises_when_impossible():
    big = 40.0 * np.eye(2)
    z = np.zeros((2, 2))
    with pytest.raises((AccuracyError, ResonanceError)):
        psi(MonodromyProblem(z, big, z, series_order=3, tail_target=1e-12))


@pytest.mark.parametrize("q", [0.5, 0.7, 0.9])
@pytest.mark.parametrize("lam", [0.0, 1.0])
def test_eg_identity(q, lam):
    a, bp, bm = kz_coeffs(TS, lam, 1, 1, hbar_of(q))
    assert verify_eg(a, bp, bm) < 1e-7


@pytest.mark.parametrize("q", [0.5, 0.7, 0.9])
@pytest.mark.parametrize("lam", [0.0, 1.0])
def test_octagon_suite(q, lam):
    res = verify_octagon_kz(TS, lam, 1, 1, hbar_of(q))
    assert res["rtkz"] < 1e-7
    assert res["octagon"] < 1e-7
    assert res["ribbon"] < 1e-7
    assert res["sigma_conj"] < 1e-9


def test_flatness():
    assert max(flatness_residuals(TS, 1.0, [1, 1], hbar_of(0.7)).values()) < 1e-10
    assert max(flatness_residuals(TS, 0.4, [1, 1, 1], hbar_of(0.7)).values()) < 1e-10


def test_kz_braid_golden():
    # q^{-1/2} [[i sinh', cosh'], [-cosh', i sinh']] after composing with g,
    # with sinh' = (q^lam - q^-lam)/2; the bare exponential is the
    # g-precomposed form with the same singular values
    q, lam = 0.7, 0.8
    braid = kz_braid(TS, lam, 1, hbar_of(q))
    g = np.array([[0.0, 1.0], [-1.0, 0.0]])
    sh = (q ** lam - q ** -lam) / 2
    ch = (q ** lam + q ** -lam) / 2
    disp = q ** -0.5 * np.array([[1j * sh, ch], [-ch, 1j * sh]])
    got = braid @ g
    assert min(np.linalg.norm(got - disp), np.linalg.norm(got + disp)) < 1e-12


def test_kz_braid_lambda_zero():
    q = 0.7
    braid = kz_braid(TS, 0.0, 1, hbar_of(q))
    np.testing.assert_allclose(braid, q ** -0.5 * np.eye(2), atol=1e-12)


@pytest.mark.parametrize("lam", [0.5, 1.0, 2.0])
def test_kz_braid_singular_values(lam):
    q = 0.7
    braid = kz_braid(TS, lam, 1, hbar_of(q))
    sv = sorted(np.linalg.svd(braid, compute_uv=False))
    want = sorted([q ** (lam - 0.5), q ** (-lam - 0.5)])
    np.testing.assert_allclose(sv, want, atol=1e-10)


def test_kz_braid_commutes_with_k():
    assert kz_braid_commutes_with_k(TS, 0.9, 1, hbar_of(0.7)) < 1e-12
    assert kz_braid_commutes_with_k(TS, 0.9, 2, hbar_of(0.7)) < 1e-12
