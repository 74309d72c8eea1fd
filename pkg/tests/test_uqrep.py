import numpy as np
import pytest

from qsp.algebra import AlgebraElement
from qsp.errors import InputError, ResourceError
from qsp.rootsys import build_root_datum, weyl_dimension
from qsp.uqrep import (
    QParams,
    act_tensor,
    build_irrep,
    casimir_scalar,
    decompose,
    relations_residual,
    star_residual,
    tensor,
    trivial_module,
)

A1 = build_root_datum([("A", 1)])
A2 = build_root_datum([("A", 2)])
QP = QParams(0.7)


def test_qparams_validation():
    with pytest.raises(InputError):
        QParams(1.2)
    with pytest.raises(InputError):
        QParams(-0.3)
    assert abs(np.exp(1j * np.pi * QP.hbar) - 0.7) < 1e-15
    assert QP.hbar.imag > 0


def test_su2_fundamental_golden():
    v = build_irrep(A1, A1.weight([1]), QP)
    q = 0.7
    assert v.dim == 2
    np.testing.assert_allclose(v.k_matrix(A1.simple_root(1)),
                               np.diag([q, 1 / q]), atol=1e-14)
    np.testing.assert_allclose(v.E[1], [[0, q ** 0.5], [0, 0]], atol=1e-14)
    np.testing.assert_allclose(v.F[1], [[0, 0], [q ** -0.5, 0]], atol=1e-14)


def test_trivial_module():
    t = trivial_module(A1, QP)
    assert t.dim == 1
    assert np.all(t.E[1] == 0)


def test_dimensions_match_weyl_formula():
    for datum, coords in [(A1, [1]), (A1, [2]), (A1, [3]), (A1, [5]),
                          (A2, [1, 0]), (A2, [0, 1]), (A2, [1, 1]), (A2, [2, 0])]:
        w = datum.weight(coords)
        m = build_irrep(datum, w, QParams(0.6))
        assert m.dim == weyl_dimension(datum, w)


def test_a2_adjoint_dim8():
    m = build_irrep(A2, A2.weight([1, 1]), QP)
    assert m.dim == 8


def test_relations_and_star_residuals():
    for datum, coords in [(A1, [3]), (A2, [1, 1]), (A2, [2, 0])]:
        m = build_irrep(datum, datum.weight(coords), QP)
        assert star_residual(m) < 1e-9
        for key, val in relations_residual(m).items():
            assert val < 1e-9, (coords, key, val)


def test_b2_module_relations():
    B2 = build_root_datum([("B", 2)])
    m = build_irrep(B2, B2.weight([0, 1]), QParams(0.55))
    assert m.dim == weyl_dimension(B2, B2.weight([0, 1]))
    assert star_residual(m) < 1e-9
    for key, val in relations_residual(m).items():
        assert val < 1e-9, (key, val)


def test_highest_weight_k_eigenvalue():
    m = build_irrep(A2, A2.weight([1, 0]), QP)
    chi = A2.weight([2, 1])
    k = m.k_matrix(chi)
    assert abs(k[0, 0] - QP.qpow(chi.pairing(m.highest))) < 1e-14


def test_dim_cap():
    with pytest.raises(ResourceError):
        build_irrep(A1, A1.weight([500]), QParams(0.7, dim_cap=100))


def test_tensor_with_trivial_is_identity():
    v = build_irrep(A1, A1.weight([1]), QP)
    t = trivial_module(A1, QP)
    vt = tensor(v, t)
    np.testing.assert_allclose(vt.E[1], v.E[1], atol=1e-14)
    np.testing.assert_allclose(vt.F[1], v.F[1], atol=1e-14)


def test_tensor_k_spectrum():
    v = build_irrep(A1, A1.weight([1]), QP)
    vv = tensor(v, v)
    spec = sorted(np.diag(vv.k_matrix(A1.simple_root(1))).real)
    q = 0.7
    assert np.allclose(spec, sorted([q ** 2, 1, 1, q ** -2]))


def test_tensor_weights_add():
    v = build_irrep(A2, A2.weight([1, 0]), QP)
    w = build_irrep(A2, A2.weight([0, 1]), QP)
    vw = tensor(v, w)
    assert vw.weights[0].coords == (v.weights[0] + w.weights[0]).coords


def test_decompose_clebsch_gordan():
    # classical Clebsch-Gordan oracle: 1/2 ox 1/2 = 1 + 0
    v = build_irrep(A1, A1.weight([1]), QP)
    vv = tensor(v, v)
    dec = decompose(vv)
    got = sorted((tuple(w.coords), mult) for w, mult, _ in dec)
    assert got == [((0,), 1), ((2,), 1)]


def test_decompose_su2_higher():
    # 1 ox 1/2 = 3/2 + 1/2
    v1 = build_irrep(A1, A1.weight([2]), QP)
    v = build_irrep(A1, A1.weight([1]), QP)
    dec = decompose(tensor(v1, v))
    got = sorted((tuple(w.coords), mult) for w, mult, _ in dec)
    assert got == [((1,), 1), ((3,), 1)]


def test_decompose_a2_fund_antifund():
    # character arithmetic oracle: V_{w1} ox V_{w2} = V_{w1+w2} + V_0
    v = build_irrep(A2, A2.weight([1, 0]), QP)
    w = build_irrep(A2, A2.weight([0, 1]), QP)
    dec = decompose(tensor(v, w))
    got = sorted((tuple(map(int, wt.coords)), mult) for wt, mult, _ in dec)
    assert got == [((0, 0), 1), ((1, 1), 1)]


def test_decompose_trivial_squared():
    t = trivial_module(A1, QP)
    dec = decompose(tensor(t, t))
    assert len(dec) == 1 and dec[0][0].is_zero()


def test_decompose_embeddings_unitary_and_intertwining():
    v = build_irrep(A1, A1.weight([1]), QP)
    vv = tensor(v, v)
    dec = decompose(vv)
    blocks = [emb for _, _, embs in dec for emb in embs]
    u = np.hstack(blocks)
    np.testing.assert_allclose(u.conj().T @ u, np.eye(vv.dim), atol=1e-9)
    # intertwining: F_vv emb = emb F_model
    for w, _, embs in dec:
        model = build_irrep(A1, w, QP)
        for emb in embs:
            assert np.linalg.norm(vv.F[1] @ emb - emb @ model.F[1]) < 1e-9
            assert np.linalg.norm(vv.E[1] @ emb - emb @ model.E[1]) < 1e-9


def test_decompose_with_multiplicity():
    # (1/2 ox 1/2) ox 1/2 = 3/2 + 1/2 + 1/2
    v = build_irrep(A1, A1.weight([1]), QP)
    m = tensor(tensor(v, v), v)
    dec = decompose(m)
    got = sorted((tuple(w.coords), mult) for w, mult, _ in dec)
    assert got == [((1,), 2), ((3,), 1)]
    u = np.hstack([emb for _, _, embs in dec for emb in embs])
    np.testing.assert_allclose(u.conj().T @ u, np.eye(m.dim), atol=1e-8)


def test_casimir_values():
    from fractions import Fraction
    assert casimir_scalar(A1, A1.weight([1])) == Fraction(3, 2)
    assert casimir_scalar(A1, A1.weight([0])) == 0
    assert casimir_scalar(A1, A1.weight([2])) == 4


def test_act_algebra_element():
    v = build_irrep(A1, A1.weight([1]), QP)
    e = AlgebraElement.e(A1, 1)
    f = AlgebraElement.f(A1, 1)
    k = AlgebraElement.k_alpha(A1, 1)
    comm = e * f - f * e
    q = 0.7
    rhs = (v.k_matrix(A1.simple_root(1)) -
           v.k_matrix(-1 * A1.simple_root(1))) / (q - 1 / q)
    np.testing.assert_allclose(v.act(comm), rhs, atol=1e-12)
    np.testing.assert_allclose(v.act(k * e), q ** 2 * v.act(e * k), atol=1e-12)


def test_act_wrong_datum():
    v = build_irrep(A1, A1.weight([1]), QP)
    with pytest.raises(InputError):
        v.act(AlgebraElement.e(A2, 1))


def test_coproduct_evaluation_matches_tensor():
    v = build_irrep(A1, A1.weight([1]), QP)
    w = build_irrep(A1, A1.weight([2]), QP)
    vw = tensor(v, w)
    for gen in [AlgebraElement.e(A1, 1), AlgebraElement.f(A1, 1),
                AlgebraElement.k_alpha(A1, 1)]:
        lhs = act_tensor(v, w, gen.coproduct())
        rhs = vw.act(gen)
        np.testing.assert_allclose(lhs, rhs, atol=1e-12)


def test_antipode_and_star_axioms():
    v = build_irrep(A1, A1.weight([1]), QP)
    e = AlgebraElement.e(A1, 1)
    # m (S ox id) Delta = eta eps: on E it gives 0
    total = np.zeros((2, 2), dtype=complex)
    for (w1, w2), c in e.coproduct().terms.items():
        x1 = AlgebraElement(A1, {w1: c}).antipode()
        x2 = AlgebraElement(A1, {w2: 1.0})
        total += v.act(x1 * x2)
    np.testing.assert_allclose(total, 0, atol=1e-12)
    # star on modules: act(x.star) == act(x)^dagger for a *-rep
    x = e * AlgebraElement.f(A1, 1) + 2j * AlgebraElement.k_alpha(A1, 1)
    np.testing.assert_allclose(v.act(x.star(QP)), v.act(x).conj().T, atol=1e-12)
