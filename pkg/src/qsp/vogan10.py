"""Rank-one lowest-weight *-representations of the Vogan-side twisted
double, and the explicit twist braid.

The module M_r is spanned by an orthonormal ladder e_0, e_1, ... with

    K e_n = q^{-r+2n} e_n,
    q^{1/2} (q^{-1} - q) F e_n = q^{-n} ((1-q^{2n})(1+q^{2r+2-2n}))^{1/2} e_{n-1},

truncated at a level cap N; the top boundary rows of F^* are invalid and
excluded from residual checks.

The braid is

    E = R21_tilde (id ox nu_q)(R_tilde) (1 ox v^{-1}),

with both R-factors given by the rank-one series
sum_n c_n X^n ox Y^n q^{-H ox H / 2}, c_n = (q^{-1}-q)^n q^{-n(n-1)/2}/[n]_q!,
where (X, Y) = (F, E) for the flipped factor and (K F^*, F), with the sign
twist from nu_q(F) = -F, for the twisted one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError

def _phi(n, r, q):
    """F-ladder coefficient: F e_n = phi_n e_{n-1}."""
    rad = (1 - q ** (2 * n)) * (1 + q ** (2 * r + 2 - 2 * n))
    if rad < 0:
        raise InputError(f"negative radicand at level {n}")
    return q ** (-n) * math.sqrt(rad) / (q ** 0.5 * (1 / q - q))


@dataclass
class TruncatedModule:
    """Level-capped lowest-weight module: K diagonal, F lowering, F^* its
    adjoint (invalid on the top boundary)."""

    r: float
    qp: object
    cap: int
    k_diag: np.ndarray
    f_mat: np.ndarray
    h_diag: np.ndarray
    label: str = ""

    @property
    def dim(self):
        return len(self.k_diag)

    @property
    def fstar(self):
        return self.f_mat.conj().T

    def interior(self, margin=1):
        """Indices of levels at least ``margin`` below the cap."""
        return np.arange(self.dim - margin)


def build_Mr(r, qp, cap):
    """Truncation of M_r to levels 0..cap-1."""
    if cap < 2:
        raise InputError("truncation needs at least two levels")
    if abs(np.imag(r)) > 1e-14:
        raise InputError("the lowest-weight parameter r must be real")
    r = float(np.real(r))
    q = qp.q
    k = np.array([q ** (-r + 2 * n) for n in range(cap)], dtype=complex)
    h = np.array([-r + 2.0 * n for n in range(cap)])
    f = np.zeros((cap, cap), dtype=complex)
    for n in range(1, cap):
        f[n - 1, n] = _phi(n, r, q)
    return TruncatedModule(r, qp, cap, k, f, h, label=f"M[{r}]")


def relations_residual(module, margin=2):
    """Residuals of the three defining relations on the interior."""
    q = module.qp.q
    k = np.diag(module.k_diag)
    f = module.f_mat
    fs = module.fstar
    idx = module.interior(margin)
    out = {}

    def cut(m):
        return m[np.ix_(idx, idx)]

    lhs = k @ f - q ** -2 * f @ k
    out["KF"] = np.linalg.norm(cut(lhs))
    lhs = k @ fs - q ** 2 * fs @ k
    out["KF*"] = np.linalg.norm(cut(lhs))
    lhs = fs @ f - q ** 2 * f @ fs
    rhs = (np.eye(module.dim) + np.diag(module.k_diag ** -2)) / (q - 1 / q)
    out["F*F"] = np.linalg.norm(cut(lhs - rhs)) / np.linalg.norm(cut(rhs))
    return out


def coaction_tensor(module, v):
    """Action matrices on M ox V through the coaction: returns a
    TruncatedModule-like object over the product space."""
    kv = v.k_diag(v.datum.simple_root(1))
    kv_inv = 1 / kv
    ev = v.E[1]
    fv = v.F[1]
    eye_m = np.eye(module.dim)
    k = np.kron(np.diag(module.k_diag), np.diag(kv))
    f = np.kron(module.f_mat, np.diag(kv_inv)) + np.kron(eye_m, fv)
    # F^* viewed abstractly: F*_M ox K^{-1} + 1 ox K^{-1} E
    fstar = np.kron(module.fstar, np.diag(kv_inv)) \
        + np.kron(eye_m, np.diag(kv_inv) @ ev)
    h_v = np.array([float(w.coords[0]) for w in v.weights])
    h = (module.h_diag[:, None] + h_v[None, :]).reshape(-1)
    out = TruncatedModule(module.r, module.qp, module.cap,
                          np.diag(k).copy(), f, h,
                          label=f"{module.label}(.)V")
    out._fstar_coaction = fstar
    return out


def su2_series_coeff(n, q):
    """c_n = (q^{-1}-q)^n q^{-n(n-1)/2} / [n]_q!."""
    fact = 1.0
    for k in range(2, n + 1):
        fact *= sum(q ** (k - 1 - 2 * j) for j in range(k))
    return (1 / q - q) ** n * q ** (-n * (n - 1) / 2) / fact


def e_matrix(module, v, qp):
    """The twist braid on module ox V.

    R21_tilde = (sum c_n F^n ox E^n) q^{-H ox H/2} and
    (id ox nu)(R_tilde) = (sum c_n (-1)^n (K F^*)^n ox F^n) q^{-H ox H/2};
    both series terminate by nilpotency on V.  The last factor is the
    inverse ribbon scalar on V (blockwise for reducible V)."""
    q = qp.q
    dv = v.dim
    dm = module.dim
    fs = getattr(module, "_fstar_coaction", module.fstar)
    kfs = np.diag(module.k_diag) @ fs
    ev = v.E[1]
    fv = v.F[1]
    h_v = np.array([float(w.coords[0]) for w in v.weights])

    cartan = np.exp(np.log(q) * (-np.outer(module.h_diag, h_v) / 2)).reshape(-1)
    cartan = np.diag(cartan.astype(complex))

    a_series = np.eye(dm * dv, dtype=complex)
    b_series = np.eye(dm * dv, dtype=complex)
    f_pow = np.eye(dm, dtype=complex)
    e_pow = np.eye(dv, dtype=complex)
    kfs_pow = np.eye(dm, dtype=complex)
    fv_pow = np.eye(dv, dtype=complex)
    for n in range(1, dv):
        f_pow = f_pow @ module.f_mat
        e_pow = e_pow @ ev
        kfs_pow = kfs_pow @ kfs
        fv_pow = fv_pow @ fv
        c = su2_series_coeff(n, q)
        a_series += c * np.kron(f_pow, e_pow)
        b_series += c * (-1) ** n * np.kron(kfs_pow, fv_pow)

    from .uqrep import ribbon_diag
    v_inv = np.linalg.inv(ribbon_diag(v))
    return a_series @ cartan @ b_series @ cartan @ np.kron(np.eye(dm), v_inv)


def nu_twist_residual(module, v, qp, margin=3):
    """|| E (id ox nu) alpha(x) - alpha(x) E || on the truncation interior,
    for the generators x in {K, F, F^*}."""
    braid = e_matrix(module, v, qp)
    prod = coaction_tensor(module, v)
    nu_v = _nu_module(v)
    prod_tw = coaction_tensor(module, nu_v)
    dv = v.dim
    idx = _interior_indices(module, dv, margin)
    worst = 0.0
    pairs = [
        (np.diag(prod.k_diag), np.diag(prod_tw.k_diag)),
        (prod.f_mat, prod_tw.f_mat),
        (prod._fstar_coaction, prod_tw._fstar_coaction),
    ]
    for plain, twisted in pairs:
        diff = braid @ twisted - plain @ braid
        worst = max(worst, np.linalg.norm(diff[np.ix_(idx, idx)])
                    / max(np.linalg.norm(plain), 1e-30))
    return worst


def _nu_module(v):
    """The Vogan involution on su2 modules: E -> -E, F -> -F, K -> K."""
    from .uqrep import WeightModule
    return WeightModule(v.datum, v.qp, list(v.weights),
                        {1: -v.E[1]}, {1: -v.F[1]},
                        highest=v.highest, label=v.label + "^nu")


def _interior_indices(module, dv, margin):
    keep = []
    for n in range(module.dim):
        if n < module.dim - margin:
            keep.extend(range(n * dv, (n + 1) * dv))
    return np.array(keep)


def twist_to_plain(braid, v):
    """Compose with 1 ox K_chi^{-1}, K_chi acting by i^H: converts the
    nu-twisted braid into a plain module map."""
    h_v = np.array([float(w.coords[0]) for w in v.weights])
    kchi_inv = np.diag((1j ** h_v) ** -1)
    dm = braid.shape[0] // v.dim
    return braid @ np.kron(np.eye(dm), kchi_inv)


def plain_commutation_residual(module, v, qp, margin=3):
    """The plain braid commutes with the untwisted coaction on the
    interior."""
    plain = twist_to_plain(e_matrix(module, v, qp), v)
    prod = coaction_tensor(module, v)
    idx = _interior_indices(module, v.dim, margin)
    worst = 0.0
    for mat in (np.diag(prod.k_diag), prod.f_mat, prod._fstar_coaction):
        diff = plain @ mat - mat @ plain
        worst = max(worst, np.linalg.norm(diff[np.ix_(idx, idx)])
                    / max(np.linalg.norm(mat), 1e-30))
    return worst


def weight_blocks(module, v):
    """Total-weight spaces of module ox V as index lists, keyed by the
    H-eigenvalue."""
    prod = coaction_tensor(module, v)
    blocks = {}
    for i, hval in enumerate(prod.h_diag):
        blocks.setdefault(round(float(hval), 9), []).append(i)
    return blocks


def plain_block_eigenvalues(module, v, qp):
    """Eigenvalues of the plain (un-twisted) braid on each total-weight
    block, sorted descending by modulus and keyed by block weight.  The
    moduli are the invariant spectral data."""
    braid = twist_to_plain(e_matrix(module, v, qp), v)
    out = {}
    for hval, idx in sorted(weight_blocks(module, v).items()):
        sub = braid[np.ix_(idx, idx)]
        out[hval] = sorted(np.linalg.eigvals(sub), key=lambda z: -abs(z))
    return out


def e_matrix_component_scalars(module, v, qp, margin=3):
    """The braid's scalars on the two fused components, per total-weight
    block of the interior.

    The braid maps the ladder generated from the bottom vector under the
    nu-twisted coaction onto the ladder generated under the plain coaction;
    the scalar mu on these sub-lines and the scalar lam induced on the
    quotient are canonical.  Returns {weight: (mu, lam)} together with the
    worst parallelism defect, as ({...}, defect)."""
    braid = e_matrix(module, v, qp)
    prod = coaction_tensor(module, v)
    prod_tw = coaction_tensor(module, _nu_module(v))
    dim = module.dim * v.dim
    bottom = np.zeros(dim, dtype=complex)
    bottom[v.dim - 1] = 1.0   # e_0 ox e_-: lowest for both actions
    top = np.zeros(dim, dtype=complex)
    top[0] = 1.0              # e_0 ox e_+: generates the quotient classes
    blocks = weight_blocks(module, v)
    interior = set(_interior_indices(module, v.dim, margin).tolist())
    sub_chain, sub_chain_tw = bottom.copy(), bottom.copy()
    quot_chain, quot_chain_tw = top.copy(), top.copy()
    out = {}
    defect = 0.0
    first = True
    for hval in sorted(blocks):
        idx = blocks[hval]
        if not all(i in interior for i in idx):
            continue
        img = sub_img = braid @ sub_chain_tw
        nrm2 = (sub_chain.conj() @ sub_chain).real
        mu = (sub_chain.conj() @ sub_img) / nrm2
        defect = max(defect,
                     np.linalg.norm(img - mu * sub_chain) / math.sqrt(nrm2))
        lam = None
        if not first:
            # annihilator of the sub-line, against canonical quotient reps
            vperp = np.zeros(dim, dtype=complex)
            i1, i2 = idx[0], idx[1]
            vperp[i1] = -np.conj(sub_chain[i2])
            vperp[i2] = np.conj(sub_chain[i1])
            lam = (vperp.conj() @ (braid @ quot_chain_tw)) \
                / (vperp.conj() @ quot_chain)
            quot_chain = prod._fstar_coaction @ quot_chain
            quot_chain_tw = prod_tw._fstar_coaction @ quot_chain_tw
        out[hval] = (mu, lam)
        sub_chain = prod._fstar_coaction @ sub_chain
        sub_chain_tw = prod_tw._fstar_coaction @ sub_chain_tw
        first = False
    return out, defect


def fusion_check(module, v, qp, margin=2):
    """Lowest-weight vectors of module ox V inside the truncation: kernel
    of F within each interior weight block.  Returns
    {weight: multiplicity}."""
    if module.cap < 3:
        raise InputError("truncation too small for a fusion check")
    prod = coaction_tensor(module, v)
    blocks = weight_blocks(module, v)
    interior = set(_interior_indices(module, v.dim, margin).tolist())
    out = {}
    for hval, idx in blocks.items():
        if not all(i in interior for i in idx):
            continue
        sub = prod.f_mat[:, idx]
        if sub.shape[1] == 0:
            continue
        _, sv, _ = np.linalg.svd(sub)
        dim_ker = sum(1 for i in range(len(idx))
                      if i >= len(sv) or sv[i] < 1e-9 * max(sv[0], 1.0))
        if dim_ker:
            out[hval] = dim_ker
    return out


def e_matrix_block_symbolic(level):
    """Symbolic verification of the component scalars at a sample level.

    Over symbols q, u = q^r, builds the 2x2 braid block on
    {e_n ox e_+, e_{n+1} ox e_-} and the chain vectors of the two fused
    components, and returns the simplified defects of

        E s'_n = q^{-3/2} u^{-1} s_n        (submodule scalar),
        quotient scalar = u sqrt(q)          (via the annihilator of s_n),

    both of which must be zero."""
    import sympy as sp

    q = sp.symbols("q", positive=True)
    u = sp.symbols("u", positive=True)  # u = q^r
    n = int(level)

    def phi(k):
        rad = (1 - q ** (2 * k)) * (1 + u ** 2 * q ** (2 - 2 * k))
        return q ** (-k) * sp.sqrt(rad) / (sp.sqrt(q) * (1 / q - q))

    def block_at(m):
        cart = sp.diag(sp.sqrt(u) * q ** (-m), q ** (m + 1) / sp.sqrt(u))
        c1 = 1 / q - q
        kfs = u ** -1 * q ** (2 * m + 2) * phi(m + 1)
        b_fac = sp.Matrix([[1, 0], [-c1 * kfs / sp.sqrt(q), 1]])
        a_fac = sp.Matrix([[1, c1 * phi(m + 1) * sp.sqrt(q)], [0, 1]])
        return sp.expand(a_fac * cart * b_fac * cart * q ** sp.Rational(-3, 2))

    def transfer(m, sign):
        # alpha(F^*) block m-1 -> m in the (u1, u2) coordinates
        return sp.Matrix([[phi(m) / q if m >= 1 else 0, sign / sp.sqrt(q)],
                          [0, q * phi(m + 1)]])

    # chains from e_0 ox e_- (submodule) and e_0 ox e_+ (quotient classes)
    s_vec = sp.Matrix([1 / sp.sqrt(q), q * phi(1)])
    s_tw = sp.Matrix([-1 / sp.sqrt(q), q * phi(1)])
    q_vec = sp.Matrix([1, 0])
    q_tw = sp.Matrix([1, 0])
    for m in range(1, n + 1):
        s_vec = transfer(m, 1) * s_vec
        s_tw = transfer(m, -1) * s_tw
        q_vec = transfer(m, 1) * q_vec
        q_tw = transfer(m, -1) * q_tw

    blk = block_at(n)
    mu = q ** sp.Rational(-3, 2) / u
    sub_defect = sp.simplify(sp.expand(blk * s_tw - mu * s_vec))
    vperp = sp.Matrix([[-s_vec[1], s_vec[0]]])
    lam = u * sp.sqrt(q)
    quot_defect = sp.simplify(sp.expand(
        (vperp * blk * q_tw)[0] - lam * (vperp * q_vec)[0]))
    return sub_defect, quot_defect
