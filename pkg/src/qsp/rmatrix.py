"""R-matrices on pairs of weight modules.

Primary route: Cartan factor q^{-(wt ox wt)} composed with the quasi factor
built as an ordered product over positive roots,

    Qt = prod_k  sum_n  (q_b^{-1}-q_b)^n q_b^{-n(n-1)/2} / [n]_{q_b}!
                 (E_{beta_k})^n ox (F_{beta_k})^n,

root vectors coming from the braid operators along the canonical reduced
word of w_0.  The final convention (element vs. its flip vs. inverses) is
pinned at build time by the action on (E-singular) ox (F-singular) vectors,
which the quasi factor fixes, and the generator intertwining.

Independent oracle: solve the intertwining linear system directly and pin
the isotypic-block scalars by the same normalization.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import AlgebraElement
from .errors import ConsistencyError, UnsupportedOracleError
from .lusztig import braid_word_on_algebra
from .rootsys import beta_sequence, longest_element
from .uqrep import decompose, ribbon_diag, tensor

_PIN_TOL = 1e-9


def _cartan_factor(m, n, sign=-1):
    pair = np.empty((m.dim, n.dim))
    for i, wi in enumerate(m.weights):
        for j, wj in enumerate(n.weights):
            pair[i, j] = float(wi.pairing(wj))
    return (m.qp.q ** (sign * pair)).reshape(-1)


def _root_vector_mats(module):
    """E_beta, F_beta matrices along the canonical w_0 word, cached on the
    module object."""
    cache = getattr(module, "_root_vec_cache", None)
    if cache is not None:
        return cache
    datum, qp = module.datum, module.qp
    word = longest_element(datum, datum.vertices)
    betas = beta_sequence(datum, word)
    out = []
    for k, r in enumerate(word.letters):
        prefix = word.letters[:k]
        e_alg = braid_word_on_algebra(datum, qp, prefix, AlgebraElement.e(datum, r))
        f_alg = braid_word_on_algebra(datum, qp, prefix, AlgebraElement.f(datum, r))
        out.append((betas[k], module.act(e_alg), module.act(f_alg)))
    module._root_vec_cache = out
    return out


def _quasi_factor(m, n):
    """Ordered product of per-root exponential series on m ox n."""
    qp = m.qp
    roots_m = _root_vector_mats(m)
    roots_n = _root_vector_mats(n)
    total = np.eye(m.dim * n.dim, dtype=complex)
    # the beta_M factor sits leftmost; the opposite order breaks the
    # generator intertwining already for the two fundamentals of A2
    for (beta, e_m, _), (_, _, f_n) in reversed(list(zip(roots_m, roots_n))):
        qb = qp.qpow(beta.pairing(beta) / 2)
        coeff = 1.0
        acc = np.eye(m.dim * n.dim, dtype=complex)
        e_pow = np.eye(m.dim, dtype=complex)
        f_pow = np.eye(n.dim, dtype=complex)
        for k in range(1, m.dim + n.dim + 1):
            e_pow = e_pow @ e_m
            f_pow = f_pow @ f_n
            if np.linalg.norm(e_pow) < 1e-300 or np.linalg.norm(f_pow) < 1e-300:
                break
            coeff *= (1.0 / qb - qb) * qb ** (-(k - 1)) / _qint(k, qb)
            acc = acc + coeff * np.kron(e_pow, f_pow)
        total = total @ acc
    return total


def _qint(k, q):
    return sum(q ** (k - 1 - 2 * j) for j in range(k))


@dataclass
class RMatrix:
    matrix: np.ndarray
    source: tuple
    convention: str

    @property
    def dim(self):
        return self.matrix.shape[0]


def _intertwining_residual(mat, m, n):
    """max over generators of ||R Delta(x) - Delta^op(x) R|| (relative)."""
    datum = m.datum
    worst = 0.0
    for r in datum.vertices:
        gens = [AlgebraElement.e(datum, r), AlgebraElement.f(datum, r),
                AlgebraElement.k_alpha(datum, r)]
        for g in gens:
            d = _act_tensor(m, n, g.coproduct())
            dop = _act_tensor_op(m, n, g.coproduct())
            lhs = mat @ d
            rhs = dop @ mat
            scale = max(np.linalg.norm(lhs), np.linalg.norm(rhs), 1e-30)
            worst = max(worst, np.linalg.norm(lhs - rhs) / scale)
    return worst


def _act_tensor(m, n, tensor_element):
    from .uqrep import act_tensor
    return act_tensor(m, n, tensor_element)


def _act_tensor_op(m, n, tensor_element):
    """Evaluate the flipped element (Delta^op)."""
    out = np.zeros((m.dim * n.dim,) * 2, dtype=complex)
    for (w1, w2), coeff in tensor_element.terms.items():
        a = np.eye(m.dim, dtype=complex)
        for sym in w2:
            a = a @ m.symbol_matrix(sym)
        b = np.eye(n.dim, dtype=complex)
        for sym in w1:
            b = b @ n.symbol_matrix(sym)
        out += coeff * np.kron(a, b)
    return out


def _singular_indices(module):
    """(E-singular indices, F-singular indices)."""
    e_sing, f_sing = [], []
    for i in range(module.dim):
        if all(np.linalg.norm(module.E[r][:, i]) < 1e-10
               for r in module.datum.vertices):
            e_sing.append(i)
        if all(np.linalg.norm(module.F[r][:, i]) < 1e-10
               for r in module.datum.vertices):
            f_sing.append(i)
    return e_sing, f_sing


def _normalization_residual(mat, m, n):
    """Deviation from R(xi ox eta) = q^{-(wt xi, wt eta)} xi ox eta over all
    E-singular xi in m and F-singular eta in n."""
    qp = m.qp
    e_sing, _ = _singular_indices(m)
    _, f_sing = _singular_indices(n)
    if not e_sing or not f_sing:
        raise ConsistencyError("no extremal vectors to pin the convention")
    worst = 0.0
    for i in e_sing:
        for j in f_sing:
            idx = i * n.dim + j
            want = qp.qpow(-m.weights[i].pairing(n.weights[j]))
            col = mat[:, idx].copy()
            got = col[idx]
            col[idx] = 0.0
            dev = max(abs(got - want), np.max(np.abs(col)))
            worst = max(worst, dev)
    return worst


def rmat(m, n):
    """R-matrix on m ox n: quasi factor times Cartan factor, convention
    pinned by the extremal normalization and generator intertwining."""
    base = _quasi_factor(m, n) @ np.diag(_cartan_factor(m, n))
    flip = _flip_matrix(m.dim, n.dim)
    base_nm = _quasi_factor(n, m) @ np.diag(_cartan_factor(n, m))
    candidates = [
        ("R", base),
        ("R21", flip.T @ base_nm @ flip),
        ("Rinv", np.linalg.inv(base)),
        ("R21inv", flip.T @ np.linalg.inv(base_nm) @ flip),
    ]
    for tag, mat in candidates:
        if _normalization_residual(mat, m, n) < _PIN_TOL \
                and _intertwining_residual(mat, m, n) < _PIN_TOL:
            return RMatrix(mat, (m.label, n.label), tag)
    raise ConsistencyError("no R-matrix convention variant matches the "
                           "extremal normalization")


def _flip_matrix(d1, d2):
    """Permutation matrix P: v ox w -> w ox v, from (d1, d2) to (d2, d1)."""
    p = np.zeros((d2 * d1, d1 * d2))
    for i in range(d1):
        for j in range(d2):
            p[j * d1 + i, i * d2 + j] = 1.0
    return p


def rmat_oracle(m, n):
    """Independent construction: nullspace of the intertwining system plus
    the extremal normalization; multiplicity-free pairs only."""
    dec = decompose(tensor(m, n))
    if any(mult > 1 for _, mult, _ in dec):
        raise UnsupportedOracleError("tensor product is not multiplicity-free")
    datum = m.datum
    dim = m.dim * n.dim
    rows = []
    for r in datum.vertices:
        for g in [AlgebraElement.e(datum, r), AlgebraElement.f(datum, r),
                  AlgebraElement.k_alpha(datum, r)]:
            d = _act_tensor(m, n, g.coproduct())
            dop = _act_tensor_op(m, n, g.coproduct())
            # T d - dop T = 0 as linear operator on T (vectorized)
            rows.append(np.kron(np.eye(dim), d.T) - np.kron(dop, np.eye(dim)))
    system = np.vstack(rows)
    _, s, vh = np.linalg.svd(system)
    null_dim = int(np.sum(s < 1e-8 * s[0]))
    if null_dim == 0:
        raise ConsistencyError("intertwining system has no solution")
    basis = vh.conj().T[:, -null_dim:]
    # pin by the normalization on extremal vectors
    e_sing, _ = _singular_indices(m)
    _, f_sing = _singular_indices(n)
    eqs, rhs = [], []
    qp = m.qp
    for i in e_sing:
        for j in f_sing:
            idx = i * n.dim + j
            want = qp.qpow(-m.weights[i].pairing(n.weights[j]))
            for out in range(dim):
                row = basis[out * dim + idx, :]
                eqs.append(row)
                rhs.append(want if out == idx else 0.0)
    sol, *_ = np.linalg.lstsq(np.array(eqs), np.array(rhs), rcond=None)
    mat = (basis @ sol).reshape(dim, dim)
    resid = _normalization_residual(mat, m, n)
    if resid > 1e-7:
        raise ConsistencyError(f"oracle normalization residual {resid}")
    return RMatrix(mat, (m.label, n.label), "oracle")


def op_on_legs(mat, dims, legs):
    """Embed an operator acting on the given legs (a subset, in order) of a
    tensor product with the given leg dimensions."""
    n_legs = len(dims)
    perm = list(legs) + [i for i in range(n_legs) if i not in legs]
    sizes = [dims[p] for p in perm]
    rest = int(np.prod(sizes[len(legs):], initial=1))
    big = np.kron(mat, np.eye(rest))
    # permute back
    p = _leg_permutation(dims, perm)
    return p.T @ big @ p


def _leg_permutation(dims, perm):
    """Matrix of v_{i_0...} -> components reordered so that legs appear in
    ``perm`` order."""
    n = int(np.prod(dims))
    p = np.zeros((n, n))
    strides = _strides(dims)
    new_dims = [dims[q] for q in perm]
    new_strides = _strides(new_dims)
    for flat in range(n):
        idx = _unflatten(flat, dims, strides)
        new_flat = sum(idx[q] * new_strides[a] for a, q in enumerate(perm))
        p[new_flat, flat] = 1.0
    return p


def _strides(dims):
    out = [1] * len(dims)
    for i in range(len(dims) - 2, -1, -1):
        out[i] = out[i + 1] * dims[i + 1]
    return out


def _unflatten(flat, dims, strides):
    return [(flat // strides[i]) % dims[i] for i in range(len(dims))]


def ybe_residual(m):
    """||R12 R13 R23 - R23 R13 R12|| on m ox m ox m (relative)."""
    r = rmat(m, m).matrix
    dims = [m.dim] * 3
    r12 = op_on_legs(r, dims, (0, 1))
    r13 = op_on_legs(r, dims, (0, 2))
    r23 = op_on_legs(r, dims, (1, 2))
    lhs = r12 @ r13 @ r23
    rhs = r23 @ r13 @ r12
    return np.linalg.norm(lhs - rhs) / max(np.linalg.norm(lhs), 1e-30)


def hexagon_residuals(m, n, p):
    """Residuals of (Delta ox id)(R) = R13 R23 and (id ox Delta)(R) = R13 R12."""
    dims = [m.dim, n.dim, p.dim]
    mn = tensor(m, n)
    np_mod = tensor(n, p)
    lhs1 = rmat(mn, p).matrix
    r13 = op_on_legs(rmat(m, p).matrix, dims, (0, 2))
    r23 = op_on_legs(rmat(n, p).matrix, dims, (1, 2))
    res1 = np.linalg.norm(lhs1 - r13 @ r23) / max(np.linalg.norm(lhs1), 1e-30)
    lhs2 = rmat(m, np_mod).matrix
    r12 = op_on_legs(rmat(m, n).matrix, dims, (0, 1))
    res2 = np.linalg.norm(lhs2 - r13 @ r12) / max(np.linalg.norm(lhs2), 1e-30)
    return res1, res2


def ribbon_residual(m, n):
    """|| R21 R Delta(v) - v ox v || with v the ribbon element acting by
    q^{(mu, mu + 2 rho)} per isotypic block."""
    from .uqrep import casimir_scalar
    qp = m.qp
    r = rmat(m, n).matrix
    flip = _flip_matrix(m.dim, n.dim)
    r21 = flip.T @ rmat(n, m).matrix @ flip
    mn = tensor(m, n)
    delta_v = ribbon_diag(mn)
    if m.highest is None or n.highest is None:
        raise ConsistencyError("ribbon check needs irreducible factors")
    scal = qp.qpow(casimir_scalar(m.datum, m.highest)
                   + casimir_scalar(n.datum, n.highest))
    lhs = r21 @ r @ delta_v
    return np.linalg.norm(lhs - scal * np.eye(mn.dim)) / abs(scal)


def naturality_residual(f, m_src, m_dst, n):
    """|| (f ox 1) R_{m_src, n} - R_{m_dst, n} (f ox 1) ||."""
    lhs = np.kron(f, np.eye(n.dim)) @ rmat(m_src, n).matrix
    rhs = rmat(m_dst, n).matrix @ np.kron(f, np.eye(n.dim))
    return np.linalg.norm(lhs - rhs) / max(np.linalg.norm(rhs), 1e-30)
