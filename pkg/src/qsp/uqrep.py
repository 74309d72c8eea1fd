"""Finite-dimensional admissible *-representations of the q-deformed
enveloping algebra.

Modules are built from the highest weight by spanning F-monomials level by
level; the invariant Hermitian form is accumulated through the adjoint law
E_r* = F_r K_r, the radical is quotiented by a relative threshold, and the
surviving vectors are orthonormalized by deterministic Gram-Schmidt in
(level, lexicographic) order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import InputError, NumericalDegeneracyError, ResourceError
from .rootsys import weyl_dimension

DIM_CAP_DEFAULT = 400
# Relative cut on spanning-vector norms when quotienting the radical of the
# invariant form.  Radical vectors computed in double precision have norm
# ~sqrt(machine eps) ~ 1.5e-8 relative, so the cut must sit well above that
# while staying far below any honest vector norm at desk scale.
RANK_THRESHOLD = 1e-6


@dataclass(frozen=True)
class QParams:
    """Deformation parameter 0 < q < 1 with hbar = -i ln(q)/pi."""

    q: float
    dim_cap: int = DIM_CAP_DEFAULT

    def __post_init__(self):
        if not (0.0 < self.q < 1.0):
            raise InputError("q must lie in (0, 1)")

    @property
    def hbar(self):
        return -1j * math.log(self.q) / math.pi

    def qpow(self, exponent):
        """q^exponent for a Fraction/float exponent."""
        if isinstance(exponent, Fraction):
            exponent = float(exponent)
        return self.q ** exponent

    def q_r(self, datum, r):
        return self.q ** datum.d[r - 1]


@dataclass
class WeightModule:
    """Orthonormal weight basis plus generator matrices.

    ``weights[i]`` is the weight of basis vector i; E[r], F[r] are dense
    complex matrices; K_omega is the diagonal q^{(omega, wt_i)}.
    """

    datum: object
    qp: QParams
    weights: list
    E: dict
    F: dict
    highest: object = None  # highest weight, when built as an irrep
    label: str = ""
    gram_diagnostics: dict = field(default_factory=dict)

    @property
    def dim(self):
        return len(self.weights)

    def k_matrix(self, omega):
        diag = np.array([self.qp.qpow(omega.pairing(w)) for w in self.weights],
                        dtype=complex)
        return np.diag(diag)

    def k_diag(self, omega):
        return np.array([self.qp.qpow(omega.pairing(w)) for w in self.weights],
                        dtype=complex)

    def weight_spaces(self):
        spaces = {}
        for i, w in enumerate(self.weights):
            spaces.setdefault(w.coords, []).append(i)
        return spaces

    def symbol_matrix(self, sym):
        kind = sym[0]
        if kind == "E":
            return self.E[sym[1]]
        if kind == "F":
            return self.F[sym[1]]
        if kind == "K":
            return self.k_matrix(self.datum.weight(sym[1]))
        raise InputError(f"unknown symbol {sym!r}")

    def act(self, element):
        """Evaluate an AlgebraElement."""
        if element.datum != self.datum:
            raise InputError("algebra element over a different datum")
        n = self.dim
        out = np.zeros((n, n), dtype=complex)
        for word, coeff in element.terms.items():
            m = np.eye(n, dtype=complex)
            for sym in word:
                m = m @ self.symbol_matrix(sym)
            out += coeff * m
        return out


def act(module, element):
    return module.act(element)


def act_tensor(m1, m2, tensor_element):
    """Evaluate a TensorElement on m1 ox m2."""
    n1, n2 = m1.dim, m2.dim
    out = np.zeros((n1 * n2, n1 * n2), dtype=complex)
    for (w1, w2), coeff in tensor_element.terms.items():
        a = np.eye(n1, dtype=complex)
        for sym in w1:
            a = a @ m1.symbol_matrix(sym)
        b = np.eye(n2, dtype=complex)
        for sym in w2:
            b = b @ m2.symbol_matrix(sym)
        out += coeff * np.kron(a, b)
    return out


def build_irrep(datum, varpi, qp, label=""):
    """Irreducible *-representation with highest weight varpi.

    Levels are processed in increasing height of varpi - wt; each weight
    space is spanned by F_r on the previous level, the Gram matrix computed
    through previously known E/F matrices, and the radical dropped at
    RANK_THRESHOLD relative to the largest vector norm.
    """
    if not (varpi.is_dominant() and varpi.is_integral()):
        raise InputError("highest weight must be dominant integral")
    target_dim = weyl_dimension(datum, varpi)
    if target_dim > qp.dim_cap:
        raise ResourceError(
            f"module dimension {target_dim} exceeds cap {qp.dim_cap}")

    verts = datum.vertices
    weights = [varpi]
    # per-level data: dict weight-coords -> list of basis indices
    level_index = [{varpi.coords: [0]}]
    # global matrices, grown dynamically
    E = {r: np.zeros((1, 1), dtype=complex) for r in verts}
    F = {r: np.zeros((1, 1), dtype=complex) for r in verts}
    min_kept, max_drop = math.inf, 0.0
    global_scale = 1.0

    level = 0
    while True:
        prev = level_index[level]
        # candidate weights at the next level
        cand = {}
        for wc, idxs in prev.items():
            w = datum.weight(wc)
            for r in verts:
                nw = w - datum.simple_root(r)
                cand.setdefault(nw.coords, []).extend((r, j) for j in idxs)
        cand = {wc: sorted(span) for wc, span in cand.items()}
        new_level = {}
        added = False
        for wc in sorted(cand, key=lambda c: tuple(map(float, c))):
            span = cand[wc]
            m = len(span)
            gram = np.zeros((m, m), dtype=complex)
            # <F_r e_j, F_s e_k> = <e_j, K_r^{-1} E_r F_s e_k>
            #   = <e_j, K_r^{-1} F_s E_r e_k> + delta_rs <e_j, K_r^{-1} c(K_r) e_k>
            for a, (r, j) in enumerate(span):
                for b, (s, k) in enumerate(span):
                    val = _pair_f_vectors(datum, qp, weights, E, F, r, j, s, k)
                    gram[a, b] = val
            # deterministic Gram-Schmidt over the spanning list; the drop
            # threshold is relative to the largest vector norm seen so far
            # in the whole construction, so pure-radical weight spaces
            # cannot self-normalize into fake basis vectors
            global_scale = max(global_scale,
                               math.sqrt(max(np.max(np.abs(np.diag(gram)).real), 0.0)))
            coeffs = []  # accepted columns: coefficient vectors over span
            for a in range(m):
                v = np.zeros(m, dtype=complex)
                v[a] = 1.0
                for c in coeffs:
                    v -= (c.conj() @ gram @ v) * c
                n2 = (v.conj() @ gram @ v).real
                norm = math.sqrt(max(n2, 0.0))
                if norm > RANK_THRESHOLD * global_scale:
                    coeffs.append(v / norm)
                    min_kept = min(min_kept, norm / global_scale)
                else:
                    max_drop = max(max_drop, norm / global_scale)
            if not coeffs:
                continue
            added = True
            base = len(weights)
            idxs = list(range(base, base + len(coeffs)))
            new_level[wc] = idxs
            weights.extend(datum.weight(wc) for _ in coeffs)
            if len(weights) > qp.dim_cap:
                raise ResourceError("dimension cap exceeded during build")
            # grow matrices
            for r in verts:
                E[r] = _grow(E[r], len(weights))
                F[r] = _grow(F[r], len(weights))
            cmat = np.array(coeffs).T  # span x new
            # F entries: F_s e_k = v_(s,k); <e_new_i, v_(s,k)> = (C^* G)_{i, (s,k)}
            proj = cmat.conj().T @ gram  # new x span
            for b, (s, k) in enumerate(span):
                for i_new, gi in zip(idxs, range(len(coeffs))):
                    F[s][i_new, k] += proj[gi, b]
            # E entries: E_r e_new_i = sum_span C[(s,k),i] E_r F_s e_k
            for r in verts:
                for gi, i_new in enumerate(idxs):
                    vec = np.zeros(base, dtype=complex)
                    for b, (s, k) in enumerate(span):
                        if abs(cmat[b, gi]) == 0.0:
                            continue
                        vec += cmat[b, gi] * _e_on_f_vector(
                            datum, qp, weights, E, F, r, s, k, base)
                    E[r][:base, i_new] += vec
        if not added:
            break
        level_index.append(new_level)
        level += 1

    dim = len(weights)
    if dim != target_dim:
        raise NumericalDegeneracyError(
            f"built dimension {dim} != Weyl dimension {target_dim}",
            {"min_kept": min_kept, "max_dropped": max_drop})
    mod = WeightModule(datum, qp, weights, E, F, highest=varpi,
                       label=label or f"V[{varpi}]",
                       gram_diagnostics={"min_kept": min_kept,
                                         "max_dropped": max_drop})
    return mod


def _grow(mat, n):
    old = mat.shape[0]
    if old == n:
        return mat
    out = np.zeros((n, n), dtype=complex)
    out[:old, :old] = mat
    return out


def _pair_f_vectors(datum, qp, weights, E, F, r, j, s, k):
    """<F_r e_j, F_s e_k> via the adjoint law."""
    base = len(weights)
    # K_r^{-1} F_s E_r e_k
    erk = E[r][:, k][:base]
    val = 0.0 + 0.0j
    if np.any(erk):
        fs_erk = F[s][:base, :base] @ erk
        kinv = qp.qpow(-datum.simple_root(r).pairing(weights[j]))
        val += kinv * fs_erk[j]
    if r == s:
        wk = weights[k]
        qr = qp.q_r(datum, r)
        kr = qp.qpow(datum.simple_root(r).pairing(wk))
        krinv_j = qp.qpow(-datum.simple_root(r).pairing(weights[j]))
        if j == k:
            val += krinv_j * (kr - 1.0 / kr) / (qr - 1.0 / qr)
    return val


def _e_on_f_vector(datum, qp, weights, E, F, r, s, k, base):
    """E_r F_s e_k as a vector over the first ``base`` basis vectors."""
    out = np.zeros(base, dtype=complex)
    erk = E[r][:base, k]
    if np.any(erk):
        out += F[s][:base, :base] @ erk
    if r == s:
        qr = qp.q_r(datum, r)
        kr = qp.qpow(datum.simple_root(r).pairing(weights[k]))
        out[k] += (kr - 1.0 / kr) / (qr - 1.0 / qr)
    return out


def trivial_module(datum, qp):
    verts = datum.vertices
    z = np.zeros((1, 1), dtype=complex)
    return WeightModule(datum, qp, [datum.zero_weight()],
                        {r: z.copy() for r in verts},
                        {r: z.copy() for r in verts},
                        highest=datum.zero_weight(), label="trivial")


def tensor(m1, m2, label=""):
    """Tensor product via the coproduct, product basis i-major."""
    if m1.datum != m2.datum:
        raise InputError("tensor of modules over different data")
    datum, qp = m1.datum, m1.qp
    weights = [w1 + w2 for w1 in m1.weights for w2 in m2.weights]
    E, F = {}, {}
    for r in datum.vertices:
        k1 = np.diag(m1.k_diag(datum.simple_root(r)))
        k2inv = np.diag(m2.k_diag(-1 * datum.simple_root(r)))
        i1, i2 = np.eye(m1.dim), np.eye(m2.dim)
        E[r] = np.kron(m1.E[r], i2) + np.kron(k1, m2.E[r])
        F[r] = np.kron(m1.F[r], k2inv) + np.kron(i1, m2.F[r])
    return WeightModule(datum, qp, weights, E, F,
                        label=label or f"({m1.label})ox({m2.label})")


def twist_module(module, perm, label_suffix="^tw"):
    """Precompose the representation with a diagram automorphism:
    pi^tw(E_r) = pi(E_{perm(r)}), weights permuted accordingly."""
    dat = module.datum

    def tw(w):
        coords = [None] * dat.rank
        for r in dat.vertices:
            coords[perm[r] - 1] = w.coords[r - 1]
        return dat.weight(coords)

    return WeightModule(dat, module.qp, [tw(w) for w in module.weights],
                        {r: module.E[perm[r]] for r in dat.vertices},
                        {r: module.F[perm[r]] for r in dat.vertices},
                        highest=None, label=module.label + label_suffix)


def casimir_scalar(datum, varpi):
    """(varpi, varpi + 2 rho), exact rational."""
    if not varpi.is_dominant():
        raise InputError("casimir_scalar expects a dominant weight")
    return varpi.pairing(varpi + 2 * datum.rho())


def ribbon_diag(module, decomposition=None):
    """Diagonal action of the ribbon element v = q^{(mu, mu+2rho)} per
    isotypic block, as a dense matrix."""
    if decomposition is None:
        decomposition = decompose(module)
    qp = module.qp
    out = np.zeros((module.dim, module.dim), dtype=complex)
    for varpi, _, embeddings in decomposition:
        scal = qp.qpow(casimir_scalar(module.datum, varpi))
        for emb in embeddings:
            out += scal * (emb @ emb.conj().T)
    return out


def decompose(module, tol=1e-8):
    """Orthogonal isotypic decomposition: list of (varpi, multiplicity,
    isometric embedding matrix of shape dim(module) x (mult*dim V_varpi))
    ... returned per copy: (varpi, mult, [embeddings])."""
    datum, qp = module.datum, module.qp
    spaces = module.weight_spaces()
    out = []
    total = 0
    for wc in sorted(spaces, key=lambda c: _height_key(module, c)):
        w = datum.weight(wc)
        if not (w.is_dominant() and w.is_integral()):
            continue
        idxs = spaces[wc]
        # kernel of all E_r restricted to this weight space
        stacked = np.vstack([module.E[r][:, idxs] for r in datum.vertices])
        if stacked.shape[0] == 0:
            kern = np.eye(len(idxs))
        else:
            _, s, vh = np.linalg.svd(stacked)
            smax = s[0] if len(s) else 0.0
            ker_dims = [i for i in range(len(idxs))
                        if i >= len(s) or s[i] <= tol * max(smax, 1.0)]
            if len(s) and any(
                    tol * max(smax, 1.0) < s[i] < math.sqrt(tol) * max(smax, 1.0)
                    for i in range(len(s))):
                raise NumericalDegeneracyError(
                    "singular values straddle the rank threshold",
                    {"weight": wc, "singular_values": s.tolist()})
            kern = vh.conj().T[:, ker_dims]
        mult = kern.shape[1]
        if mult == 0:
            continue
        embeddings = []
        for c in range(mult):
            hw = np.zeros(module.dim, dtype=complex)
            for pos, i in enumerate(idxs):
                hw[i] = kern[pos, c]
            # orthogonalize against previous copies at the same weight
            for prev in embeddings:
                hw -= prev[:, 0] * (prev[:, 0].conj() @ hw)
            nrm = np.linalg.norm(hw)
            if nrm < math.sqrt(tol):
                continue
            hw /= nrm
            emb = _grow_embedding(module, w, hw, qp)
            embeddings.append(emb)
        if embeddings:
            sub_dim = embeddings[0].shape[1]
            total += sub_dim * len(embeddings)
            out.append((w, len(embeddings), embeddings))
    if total != module.dim:
        raise NumericalDegeneracyError(
            f"decomposition dimensions {total} != {module.dim}", {})
    return out


def _height_key(module, coords):
    # dominant weights processed from the highest
    return tuple(-float(c) for c in coords)


def _grow_embedding(module, varpi, hw_vec, qp):
    """Isometric embedding V_varpi -> module sending the model highest
    weight vector to hw_vec, built level by level: each level of the model
    is spanned by F-images of the previous one, so a pseudo-inverse of the
    span map transports the embedding."""
    model = build_irrep(module.datum, varpi, qp)
    datum = module.datum
    emb = np.zeros((module.dim, model.dim), dtype=complex)
    emb[:, 0] = hw_vec
    from .rootsys import _alpha_coefficients
    levels = {}
    for i, w in enumerate(model.weights):
        ht = sum(_alpha_coefficients(varpi - w, datum.vertices).values())
        levels.setdefault(ht, []).append(i)
    heights = sorted(levels)
    for ha, hb in zip(heights, heights[1:]):
        prev, nxt = levels[ha], levels[hb]
        pairs = [(r, j) for r in datum.vertices for j in prev]
        span = np.array([[model.F[r][i, j] for (r, j) in pairs] for i in nxt])
        w = np.linalg.pinv(span)  # pairs x nxt; e_i = sum_pairs w[p,i] F_r e_j
        images = np.column_stack([module.F[r] @ emb[:, j] for (r, j) in pairs])
        emb[:, nxt] = images @ w
    return emb


def star_residual(module):
    """max_r ||E_r^dagger - F_r K_r|| / max(||E_r||, 1)."""
    worst = 0.0
    for r in module.datum.vertices:
        e = module.E[r]
        frkr = module.F[r] @ module.k_matrix(module.datum.simple_root(r))
        scale = max(np.linalg.norm(e), 1e-30)
        worst = max(worst, np.linalg.norm(e.conj().T - frkr) / scale)
    return worst


def relations_residual(module):
    """Relative residuals of the defining relations on the module."""
    datum, qp = module.datum, module.qp
    out = {}
    n = module.dim
    for r in datum.vertices:
        er, fr = module.E[r], module.F[r]
        qr = qp.q_r(datum, r)
        kr = module.k_matrix(datum.simple_root(r))
        krinv = module.k_matrix(-1 * datum.simple_root(r))
        lhs = er @ fr - fr @ er
        rhs = (kr - krinv) / (qr - 1.0 / qr)
        out[f"EF[{r}]"] = _rel(lhs - rhs, rhs)
        for s in datum.vertices:
            ks = module.k_matrix(datum.simple_root(s))
            lhs = ks @ er
            rhs = qp.qpow(datum.simple_root(s).pairing(datum.simple_root(r))) * (er @ ks)
            out[f"KE[{s},{r}]"] = _rel(lhs - rhs, rhs)
            if r != s:
                out[f"SerreE[{r},{s}]"] = _serre(module, r, s, module.E)
                out[f"SerreF[{r},{s}]"] = _serre(module, r, s, module.F)
                lhs = er @ module.F[s] - module.F[s] @ er
                out[f"EF[{r},{s}]"] = np.linalg.norm(lhs) / max(
                    np.linalg.norm(er) * np.linalg.norm(module.F[s]), 1e-30)
    del n
    return out


def _rel(diff, rhs):
    return np.linalg.norm(diff) / max(np.linalg.norm(rhs), 1e-30)


def _serre(module, r, s, mats):
    from .rootsys import qbinom
    datum, qp = module.datum, module.qp
    n_max = 1 - datum.a(r, s)
    qr = qp.q_r(datum, r)
    acc = np.zeros_like(mats[r])
    for n in range(n_max + 1):
        coeff = (-1) ** n * qbinom(n_max, n, qr)
        acc = acc + coeff * np.linalg.matrix_power(mats[r], n_max - n) \
            @ mats[s] @ np.linalg.matrix_power(mats[r], n)
    scale = max(np.linalg.norm(mats[r]) ** n_max * np.linalg.norm(mats[s]), 1e-30)
    return np.linalg.norm(acc) / scale


def module_to_json(module):
    return {
        "datum": module.datum.to_json(),
        "weights": [w.to_json() for w in module.weights],
        "q": module.qp.q,
        "E": {str(r): _mat_json(module.E[r]) for r in module.datum.vertices},
        "F": {str(r): _mat_json(module.F[r]) for r in module.datum.vertices},
    }


def _mat_json(m):
    return [[[float(x.real), float(x.imag)] for x in row] for row in np.asarray(m)]
