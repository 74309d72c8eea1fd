"""Numerical monodromy of the modified two-pole-plus-origin first-order
system

    H'(w) = ( b_- / (w+1) + a / w + b_+ / (w-1) ) H(w)

on (0, 1): Frobenius expansions H_0 ~ w^a at 0 and H_1 ~ (1-w)^{b_+} at 1,
adaptive Runge-Kutta in the middle, and the connection matrix
Psi = H_1(w)^{-1} H_0(w), checked to be independent of the match point.

The coefficient matrices for a symmetric pair are

    a = hbar (2 t^k_01 + C^k_1),  b_+ = hbar t_12,  b_- = hbar (t^k - t^m)_12

acting on X0 ox V1 ox V2, with the splitting t = t^k + t^m induced by the
involution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import expm

from .errors import AccuracyError, InputError, ResonanceError

def spin_matrices(j2):
    """Classical spin-j matrices (j2 = 2j), basis m = j, j-1, ..., -j:
    [h,e] = 2e, [e,f] = h, e^* = f."""
    if j2 < 0 or int(j2) != j2:
        raise InputError("spin label must be a nonnegative integer (2j)")
    dim = j2 + 1
    e = np.zeros((dim, dim))
    f = np.zeros((dim, dim))
    h = np.zeros((dim, dim))
    for idx in range(dim):
        m2 = j2 - 2 * idx  # 2m
        h[idx, idx] = m2
        if idx > 0:
            # e |j,m> = sqrt((j-m)(j+m+1)) |j,m+1>
            j, m = j2 / 2, m2 / 2
            e[idx - 1, idx] = math.sqrt((j - m) * (j + m + 1))
        if idx < dim - 1:
            j, m = j2 / 2, m2 / 2
            f[idx + 1, idx] = math.sqrt((j + m) * (j - m + 1))
    return e, f, h


def _star_coeffs(vec):
    """*-structure on sl2 coefficient vectors over (e, f, h):
    e* = f, f* = e, h* = h, antilinear."""
    e, f, h = vec
    return np.array([np.conj(f), np.conj(e), np.conj(h)])


def _herm_form(x, y):
    """<x, y> = (x, y^*) with (e,f) = 1, (h,h) = 2."""
    ys = _star_coeffs(y)
    return x[0] * ys[1] + x[1] * ys[0] + 2 * x[2] * ys[2]


@dataclass
class SymPairTensors:
    """Split invariant tensors of sl2 for an involution sigma.

    ``plus_basis`` / ``minus_basis`` are orthonormal bases of the +-1 / -1
    eigenspaces as coefficient vectors over (e, f, h).
    """

    sigma_mat: np.ndarray
    plus_basis: list
    minus_basis: list
    reps: dict = field(default_factory=dict)

    def rep(self, j2):
        if j2 not in self.reps:
            self.reps[j2] = spin_matrices(j2)
        return self.reps[j2]

    def vec_matrix(self, vec, j2):
        e, f, h = self.rep(j2)
        return vec[0] * e + vec[1] * f + vec[2] * h

    def sigma_matrix(self, j2):
        """Unitary implementing sigma on spin j, normalized to square to 1."""
        e, f, h = self.rep(j2)
        dim = j2 + 1
        rows = []
        for vec in (np.eye(3)):
            x = self.vec_matrix(vec, j2)
            sx = self.vec_matrix(self.sigma_mat @ vec, j2)
            rows.append(np.kron(np.eye(dim), x.T) - np.kron(sx, np.eye(dim)))
        _, sv, vh = np.linalg.svd(np.vstack(rows))
        null = [i for i in range(vh.shape[0])
                if i >= len(sv) or sv[i] < 1e-9 * sv[0]]
        if len(null) != 1:
            raise InputError("sigma does not integrate uniquely on this spin")
        s = vh.conj().T[:, null[0]].reshape(dim, dim)
        s2 = s @ s
        lam = np.trace(s2) / dim
        return s / np.sqrt(lam)

    def pair_tensor(self, basis, j2a, j2b):
        """sum_i X_i^* ox X_i over a basis, on spin j2a ox spin j2b."""
        da, db = j2a + 1, j2b + 1
        out = np.zeros((da * db, da * db), dtype=complex)
        for vec in basis:
            xs = self.vec_matrix(_star_coeffs(vec), j2a)
            x = self.vec_matrix(vec, j2b)
            out += np.kron(xs, x)
        return out

    def t_full(self, j2a, j2b):
        return self.pair_tensor(self.plus_basis + self.minus_basis, j2a, j2b)

    def t_k(self, j2a, j2b):
        return self.pair_tensor(self.plus_basis, j2a, j2b)

    def t_m(self, j2a, j2b):
        return self.pair_tensor(self.minus_basis, j2a, j2b)

    def casimir_k(self, j2):
        dim = j2 + 1
        out = np.zeros((dim, dim), dtype=complex)
        for vec in self.plus_basis:
            out += self.vec_matrix(_star_coeffs(vec), j2) \
                @ self.vec_matrix(vec, j2)
        return out

    def character_values(self, lam):
        """chi_lam on the +-eigenspace basis: determined by (f - e) -> i lam
        for the standard involution; in general chi is the linear functional
        with chi([k,k]) = 0 -- only defined when k is abelian."""
        if len(self.plus_basis) != 1:
            raise InputError("characters need an abelian fixed subalgebra")
        vec = self.plus_basis[0]
        # normalize against (f - e)/sqrt(2): chi(f - e) = i lam
        ref = np.array([-1.0, 1.0, 0.0]) / math.sqrt(2)
        overlap = _herm_form(vec, ref)
        if abs(abs(overlap) - 1) > 1e-10:
            raise InputError("fixed subalgebra is not the standard one")
        return [1j * lam / math.sqrt(2) * overlap]


def split_tensors(sigma_images=None):
    """Build SymPairTensors from sigma given by images of (e, f, h) as
    coefficient vectors over (e, f, h).  Default: the standard involution
    e -> -f, f -> -e, h -> -h."""
    if sigma_images is None:
        sigma_images = {"e": [0, -1, 0], "f": [-1, 0, 0], "h": [0, 0, -1]}
    cols = [np.array(sigma_images[k], dtype=complex) for k in ("e", "f", "h")]
    sig = np.column_stack(cols)
    if np.linalg.norm(sig @ sig - np.eye(3)) > 1e-12:
        raise InputError("sigma is not involutive")
    _check_lie_automorphism(sig)
    _check_star_preserving(sig)
    evals, evecs = np.linalg.eig(sig)
    plus, minus = [], []
    for i in range(3):
        (plus if abs(evals[i] - 1) < 1e-9 else minus).append(evecs[:, i])
    plus = _orthonormalize(plus)
    minus = _orthonormalize(minus)
    return SymPairTensors(sig, plus, minus)


def _check_lie_automorphism(sig):
    # brackets in the (e, f, h) coordinate algebra
    def bracket(x, y):
        e1, f1, h1 = x
        e2, f2, h2 = y
        return np.array([
            2 * (h1 * e2 - e1 * h2) * -1,
            -2 * (h1 * f2 - f1 * h2) * -1,
            e1 * f2 - f1 * e2,
        ])
    # [h,e] = 2e, [h,f] = -2f, [e,f] = h
    basis = np.eye(3)
    for i in range(3):
        for j in range(3):
            lhs = sig @ bracket(basis[:, i], basis[:, j])
            rhs = bracket(sig @ basis[:, i], sig @ basis[:, j])
            if np.linalg.norm(lhs - rhs) > 1e-10:
                raise InputError("sigma is not a Lie algebra automorphism")


def _check_star_preserving(sig):
    basis = np.eye(3)
    for i in range(3):
        lhs = _star_coeffs(sig @ basis[:, i])
        rhs = sig @ _star_coeffs(basis[:, i])
        if np.linalg.norm(lhs - rhs) > 1e-10:
            raise InputError("sigma does not preserve the *-structure")


def _orthonormalize(vecs):
    out = []
    for v in vecs:
        for u in out:
            v = v - _herm_form(v, u) * u
        nrm = _herm_form(v, v)
        if abs(nrm) < 1e-12:
            continue
        out.append(v / math.sqrt(nrm.real))
    return out


# ---------------------------------------------------------------------------
# coefficient assembly
# ---------------------------------------------------------------------------

def kz_coeffs(tensors, lam, j2a, j2b, hbar):
    """(a, b_+, b_-) on chi_lam ox V_a ox V_b."""
    if abs(np.real(hbar)) > 1e-14:
        raise InputError("hbar must be purely imaginary")
    chi = tensors.character_values(lam)
    da, db = j2a + 1, j2b + 1
    tk01 = np.zeros((da, da), dtype=complex)
    for val, vec in zip(chi, tensors.plus_basis):
        # t^k_01 = sum_i chi(X_i^*) pi(X_i); express X_i^* in the basis
        c = _herm_form(_star_coeffs(vec), tensors.plus_basis[0])
        tk01 += (c * val) * tensors.vec_matrix(vec, j2a)
    a = hbar * (2 * np.kron(tk01, np.eye(db))
                + np.kron(tensors.casimir_k(j2a), np.eye(db)))
    b_plus = hbar * tensors.t_full(j2a, j2b)
    b_minus = hbar * (tensors.t_k(j2a, j2b) - tensors.t_m(j2a, j2b))
    return a, b_plus, b_minus


def a02_coeff(tensors, lam, j2a, j2b, hbar):
    """hbar (2 t^k_02 + C^k_2) on chi ox V_a ox V_b."""
    chi = tensors.character_values(lam)
    da, db = j2a + 1, j2b + 1
    tk02 = np.zeros((db, db), dtype=complex)
    for val, vec in zip(chi, tensors.plus_basis):
        coeffs = _star_coeffs(vec)
        c = _herm_form(coeffs, tensors.plus_basis[0])
        tk02 += (c * val) * tensors.vec_matrix(vec, j2b)
    return hbar * (2 * np.kron(np.eye(da), tk02)
                   + np.kron(np.eye(da), tensors.casimir_k(j2b)))


def d_coeff(tensors, lam, j2a, j2b, hbar):
    """hbar (2 t^k_01 + 2 t^k_02 + 2 t^k_12 + C^k_1 + C^k_2)."""
    a = kz_coeffs(tensors, lam, j2a, j2b, hbar)[0]
    a02 = a02_coeff(tensors, lam, j2a, j2b, hbar)
    tk12 = hbar * tensors.t_k(j2a, j2b)
    return a + a02 + 2 * tk12


# ---------------------------------------------------------------------------
# the monodromy engine
# ---------------------------------------------------------------------------

@dataclass
class MonodromyProblem:
    a: np.ndarray
    b_plus: np.ndarray
    b_minus: np.ndarray
    series_order: int = 40
    match_points: tuple = (0.5, 0.4, 0.6)
    delta: float = 0.1
    rtol: float = 1e-10
    atol: float = 1e-12
    tail_target: float = 1e-12

    def __post_init__(self):
        self.a = np.asarray(self.a, dtype=complex)
        self.b_plus = np.asarray(self.b_plus, dtype=complex)
        self.b_minus = np.asarray(self.b_minus, dtype=complex)
        if not (self.a.shape == self.b_plus.shape == self.b_minus.shape):
            raise InputError("coefficient matrices must share a dimension")


@dataclass
class MonodromyResult:
    psi: np.ndarray
    spread: float
    tail_bound: float
    resonance_a: list
    resonance_b: list
    eig_condition: float


def resonance_check(mat, tol=1e-6):
    """Eigenvalue pairs differing by a nonzero integer (within tol)."""
    evals = np.linalg.eigvals(mat)
    flags = []
    for i in range(len(evals)):
        for j in range(len(evals)):
            diff = evals[i] - evals[j]
            nearest = round(diff.real)
            if nearest != 0 and abs(diff - nearest) < tol:
                flags.append((i, j, nearest))
    return flags


def _sylvester_series(res_mat, rhs_fn, order):
    """c_m solving m c_m - [res, c_m] = rhs_fn(m, c[0..m-1]), c_0 = 1."""
    n = res_mat.shape[0]
    evals, vecs = np.linalg.eig(res_mat)
    vinv = np.linalg.inv(vecs)
    cond = np.linalg.cond(vecs)
    coeffs = [np.eye(n, dtype=complex)]
    denom = np.empty((n, n), dtype=complex)
    for m in range(1, order + 1):
        rhs = rhs_fn(m, coeffs)
        rt = vinv @ rhs @ vecs
        for i in range(n):
            denom[i, :] = m - evals[i] + evals[None, :]
        if np.min(np.abs(denom)) < 1e-9:
            raise ResonanceError(
                f"Sylvester denominator ~0 at order {m} (resonance)")
        coeffs.append(vecs @ (rt / denom) @ vinv)
    return coeffs, cond


def _series_at_zero(problem):
    a, bp, bm = problem.a, problem.b_plus, problem.b_minus

    def rhs(m, coeffs):
        out = np.zeros_like(a)
        for k in range(m):
            sign = (-1) ** (m - 1 - k)
            out += (sign * bm - bp) @ coeffs[k]
        return out

    return _sylvester_series(a, rhs, problem.series_order)


def _series_at_one(problem):
    a, bp, bm = problem.a, problem.b_plus, problem.b_minus

    def rhs(m, coeffs):
        out = np.zeros_like(a)
        for k in range(m):
            out += -(a + 2.0 ** (-(m - k)) * bm) @ coeffs[k]
        return out

    return _sylvester_series(bp, rhs, problem.series_order)


def _eval_series(coeffs, x):
    out = np.zeros_like(coeffs[0])
    xp = 1.0
    for c in coeffs:
        out = out + xp * c
        xp *= x
    return out


def _tail_bound(coeffs, x):
    n = len(coeffs) - 1
    return np.linalg.norm(coeffs[n]) * x ** n / (1 - x)


def _choose_delta(coeffs, delta0, target):
    delta = delta0
    for _ in range(30):
        if _tail_bound(coeffs, delta) < target:
            return delta
        delta *= 0.5
    raise AccuracyError("series tail bound not reached; increase the order")


def _rhs_ode(problem):
    a, bp, bm = problem.a, problem.b_plus, problem.b_minus
    n = a.shape[0]

    def fn(w, y):
        h = y.reshape(n, n)
        return ((bm / (w + 1) + a / w + bp / (w - 1)) @ h).reshape(-1)

    return fn


def psi(problem):
    """Connection matrix Psi = H_1^{-1} H_0 with the spread over the match
    points reported; raises on resonance or accuracy failure."""
    res_a = resonance_check(problem.a)
    res_b = resonance_check(problem.b_plus)
    if res_a or res_b:
        raise ResonanceError(
            f"resonant residues: a -> {res_a}, b_+ -> {res_b}")
    coeffs0, cond0 = _series_at_zero(problem)
    coeffs1, cond1 = _series_at_one(problem)
    delta0 = _choose_delta(coeffs0, problem.delta, problem.tail_target)
    delta1 = _choose_delta(coeffs1, problem.delta, problem.tail_target)
    tail = max(_tail_bound(coeffs0, delta0), _tail_bound(coeffs1, delta1))

    h0_start = _eval_series(coeffs0, delta0) @ expm(math.log(delta0) * problem.a)
    h1_start = _eval_series(coeffs1, delta1) @ expm(math.log(delta1) * problem.b_plus)

    fn = _rhs_ode(problem)
    points = sorted(problem.match_points)
    h0_vals = _integrate_chain(fn, delta0, points, h0_start, problem)
    h1_vals = _integrate_chain(fn, 1 - delta1, points[::-1], h1_start, problem)

    psis = []
    for p in points:
        psis.append(np.linalg.solve(h1_vals[p], h0_vals[p]))
    spread = max(np.linalg.norm(x - psis[0]) for x in psis[1:]) if len(psis) > 1 else 0.0
    if spread > 1e-6:
        raise AccuracyError(f"match-point spread {spread:.2e} exceeds 1e-6")
    main = psis[points.index(problem.match_points[0])]
    return MonodromyResult(main, spread, tail, res_a, res_b, max(cond0, cond1))


def _integrate_chain(fn, start, points, h_start, problem):
    out = {}
    cur_w, cur_h = start, h_start
    for p in points:
        sol = solve_ivp(fn, (cur_w, p), cur_h.reshape(-1), method="DOP853",
                        rtol=problem.rtol, atol=problem.atol, dense_output=False)
        if not sol.success:
            raise AccuracyError(f"ODE integration failed: {sol.message}")
        cur_h = sol.y[:, -1].reshape(h_start.shape)
        cur_w = p
        out[p] = cur_h
    return out


def psi_commuting_oracle(problem):
    """Closed form for commuting coefficients: Psi = 2^{b_-}."""
    for x, y in ((problem.a, problem.b_plus), (problem.a, problem.b_minus),
                 (problem.b_plus, problem.b_minus)):
        if np.linalg.norm(x @ y - y @ x) > 1e-12:
            raise InputError("oracle requires commuting coefficients")
    return expm(math.log(2.0) * problem.b_minus)


def mkz_consistency(problem, z_target=0.81):
    """Independent-route check: integrate the square-root substituted form
    G'(z) = (a/2 / z + B(z)/(z-1)) G, B(z) = (b_+ + b_-)/2 + (b_+ - b_-)/(2 sqrt z),
    from G(delta^2) = H_0(delta) and compare with H_0 at w = sqrt(z_target)."""
    a, bp, bm = problem.a, problem.b_plus, problem.b_minus
    n = a.shape[0]
    coeffs0, _ = _series_at_zero(problem)
    delta = _choose_delta(coeffs0, problem.delta, problem.tail_target)
    h0 = _eval_series(coeffs0, delta) @ expm(math.log(delta) * a)

    tk = (bp + bm) / 2
    tm = (bp - bm) / 2

    def fn(z, y):
        g = y.reshape(n, n)
        bz = tk + tm / math.sqrt(z)
        return ((a / 2 / z + bz / (z - 1)) @ g).reshape(-1)

    sol = solve_ivp(fn, (delta ** 2, z_target), h0.reshape(-1),
                    method="DOP853", rtol=problem.rtol, atol=problem.atol)
    if not sol.success:
        raise AccuracyError(sol.message)
    g_end = sol.y[:, -1].reshape(n, n)

    fnw = _rhs_ode(problem)
    w_target = math.sqrt(z_target)
    h_end = _integrate_chain(fnw, delta, [w_target], h0, problem)[w_target]
    return np.linalg.norm(g_end - h_end) / max(np.linalg.norm(h_end), 1e-30)


# ---------------------------------------------------------------------------
# identity suites
# ---------------------------------------------------------------------------

def _mk_problem(a, bp, bm, **kw):
    return MonodromyProblem(a, bp, bm, **kw)


def verify_eg(a, b_plus, b_minus, **kw):
    """Residual of the eight-factor identity with c = -a - b_+ - b_-."""
    c = -a - b_plus - b_minus
    psi_a = psi(_mk_problem(a, b_plus, b_minus, **kw)).psi
    psi_c = psi(_mk_problem(c, b_plus, b_minus, **kw)).psi
    psi_c_swap = psi(_mk_problem(c, b_minus, b_plus, **kw)).psi
    psi_a_swap = psi(_mk_problem(a, b_minus, b_plus, **kw)).psi
    prod = np.linalg.inv(psi_a) @ expm(1j * math.pi * b_plus) @ psi_c \
        @ expm(1j * math.pi * c) @ np.linalg.inv(psi_c_swap) \
        @ expm(1j * math.pi * b_minus) @ psi_a_swap @ expm(1j * math.pi * a)
    return np.linalg.norm(prod - np.eye(a.shape[0]))


def verify_octagon_kz(tensors, lam, j2a, j2b, hbar, **kw):
    """Residuals of the twisted-octagon identity and its sigma-octagon and
    ribbon rearrangements.  Returns {'rtkz':, 'octagon':, 'ribbon':,
    'sigma_conj':}."""
    a, bp, bm = kz_coeffs(tensors, lam, j2a, j2b, hbar)
    a02 = a02_coeff(tensors, lam, j2a, j2b, hbar)
    d = d_coeff(tensors, lam, j2a, j2b, hbar)

    psi_a = psi(_mk_problem(a, bp, bm, **kw)).psi
    psi_021 = psi(_mk_problem(a02, bp, bm, **kw)).psi
    psi_a_sw = psi(_mk_problem(a, bm, bp, **kw)).psi
    psi_021_sw = psi(_mk_problem(a02, bm, bp, **kw)).psi

    epi = lambda m: expm(1j * math.pi * m)  # noqa: E731
    emi = lambda m: expm(-1j * math.pi * m)  # noqa: E731

    lhs = np.linalg.inv(psi_a) @ epi(bp) @ psi_021 @ epi(a02) \
        @ np.linalg.inv(psi_021_sw) @ epi(bm) @ psi_a_sw @ epi(a)
    res_rtkz = np.linalg.norm(lhs - epi(d))

    oct_lhs = np.linalg.inv(psi_a) @ emi(bp) @ psi_021 @ emi(a02) \
        @ np.linalg.inv(psi_021_sw) @ emi(bm) @ psi_a_sw
    res_oct = np.linalg.norm(oct_lhs - emi(d - a))

    rib_lhs = oct_lhs @ emi(a)
    res_rib = np.linalg.norm(rib_lhs - emi(d))

    # sigma applied to the last leg versus the b_+ <-> b_- swap
    s = tensors.sigma_matrix(j2b)
    conj = np.kron(np.eye(j2a + 1), s)
    swapped = np.linalg.inv(psi_021_sw) @ emi(bm) @ psi_a_sw
    direct = conj @ (np.linalg.inv(psi_021) @ emi(bp) @ psi_a) \
        @ np.linalg.inv(conj)
    res_sigma = np.linalg.norm(swapped - direct)
    return {"rtkz": res_rtkz, "octagon": res_oct, "ribbon": res_rib,
            "sigma_conj": res_sigma}


def flatness_residuals(tensors, lam, spins, hbar):
    """Commutator identities behind flatness, on chi ox V_{spins}.

    For ordered pairs (i, j): [tau_ij + nu_i + nu_j, mu_ij] and
    [tau_ij + nu_i + mu_ij, nu_j]; for triples additionally
    [tau_ij, tau_ik + tau_jk] and [mu_ik, tau_ij + mu_jk]."""
    n = len(spins)
    dims = [1] + [j2 + 1 for j2 in spins]
    chi = tensors.character_values(lam)

    def place_pair(mat, i, j):
        from .rmatrix import op_on_legs
        return op_on_legs(mat, dims, (i, j))

    def tau(i, j):
        return place_pair(tensors.t_full(spins[i - 1], spins[j - 1]), i, j)

    def mu(i, j):
        m = tensors.t_k(spins[i - 1], spins[j - 1]) \
            - tensors.t_m(spins[i - 1], spins[j - 1])
        return place_pair(m, i, j)

    def nu(i):
        j2 = spins[i - 1]
        tk0 = np.zeros((j2 + 1, j2 + 1), dtype=complex)
        for val, vec in zip(chi, tensors.plus_basis):
            c = _herm_form(_star_coeffs(vec), tensors.plus_basis[0])
            tk0 += (c * val) * tensors.vec_matrix(vec, j2)
        from .rmatrix import op_on_legs
        mat = 2 * tk0 + tensors.casimir_k(j2)
        return op_on_legs(mat, dims, (i,))

    out = {}

    def comm(x, y):
        return np.linalg.norm(x @ y - y @ x)

    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i == j:
                continue
            out[f"C[{i},{j}]"] = comm(tau(i, j) + nu(i) + nu(j), mu(i, j))
            out[f"D[{i},{j}]"] = comm(tau(i, j) + nu(i) + mu(i, j), nu(j))
            for k in range(1, n + 1):
                if k in (i, j):
                    continue
                out[f"A[{i},{j},{k}]"] = comm(tau(i, j), tau(i, k) + tau(j, k))
                out[f"B[{i},{j},{k}]"] = comm(mu(i, k), tau(i, j) + mu(j, k))
    return out


def kz_braid(tensors, lam, j2, hbar):
    """The braid e^{-pi i hbar (2 t^k_01 + C^k_1)} on chi_lam ox V."""
    chi = tensors.character_values(lam)
    tk0 = np.zeros((j2 + 1, j2 + 1), dtype=complex)
    for val, vec in zip(chi, tensors.plus_basis):
        c = _herm_form(_star_coeffs(vec), tensors.plus_basis[0])
        tk0 += (c * val) * tensors.vec_matrix(vec, j2)
    mat = 2 * tk0 + tensors.casimir_k(j2)
    return expm(-1j * math.pi * hbar * mat)


def kz_braid_commutes_with_k(tensors, lam, j2, hbar):
    """Residual of the braid commuting with the diagonal action of the
    fixed subalgebra."""
    braid = kz_braid(tensors, lam, j2, hbar)
    worst = 0.0
    for val, vec in zip(tensors.character_values(lam), tensors.plus_basis):
        diag = val * np.eye(j2 + 1) + tensors.vec_matrix(vec, j2)
        worst = max(worst, np.linalg.norm(braid @ diag - diag @ braid))
    return worst
