"""Exact root-system, Weyl-group and q-number combinatorics.

Everything in this module is computed over exact rationals
(``fractions.Fraction``); floating point enters only downstream, when a
numeric deformation parameter is supplied.

Weights are stored in fundamental-weight coordinates, so the coordinate of a
weight at vertex ``r`` is the Cartan pairing ``(mu, alpha_r^vee)``.  Simple
roots are the columns of the Cartan matrix in these coordinates.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from math import lcm

from .errors import InputError

CLASSICAL_TYPES = "ABCDEFG"

# Rank bounds per simple type; rank capped at 8 per component.
_RANK_BOUNDS = {
    "A": (1, 8),
    "B": (2, 8),
    "C": (2, 8),
    "D": (3, 8),
    "E": (6, 8),
    "F": (4, 4),
    "G": (2, 2),
}


def _cartan_block(typ, rank):
    """Cartan matrix of one simple component, Bourbaki numbering."""
    a = [[2 if i == j else 0 for j in range(rank)] for i in range(rank)]

    def bond(i, j, aij=-1, aji=-1):
        a[i][j] = aij
        a[j][i] = aji

    if typ in "ABCF":
        for i in range(rank - 1):
            bond(i, i + 1)
    if typ == "B":
        # alpha_rank short: arrow from rank-1 to rank
        a[rank - 1][rank - 2] = -2
    elif typ == "C":
        a[rank - 2][rank - 1] = -2
    elif typ == "D":
        for i in range(rank - 2):
            bond(i, i + 1)
        a[rank - 2][rank - 1] = 0
        a[rank - 1][rank - 2] = 0
        bond(rank - 3, rank - 1)
    elif typ == "E":
        # chain 1-3-4-5-...-rank, vertex 2 attached to 4
        for i in range(2, rank - 1):
            bond(i, i + 1)
        bond(0, 2)
        bond(1, 3)
        a[0][1] = 0
        a[1][0] = 0
        a[1][2] = 0
        a[2][1] = 0
    elif typ == "F":
        a[1][2] = -1
        a[2][1] = -2
    elif typ == "G":
        a[0][1] = -3
        a[1][0] = -1
    return a


def _symmetrizers(typ, rank):
    """d_r with d_r a_rs = d_s a_sr; short roots have square length 2."""
    if typ in "ADE":
        return [1] * rank
    if typ == "B":
        return [2] * (rank - 1) + [1]
    if typ == "C":
        return [1] * (rank - 1) + [2]
    if typ == "F":
        return [2, 2, 1, 1]
    if typ == "G":
        return [1, 3]
    raise InputError(f"unknown type {typ!r}")


def _det_int(mat):
    """Determinant of a small integer matrix, exact."""
    n = len(mat)
    if n == 0:
        return 1
    m = [[Fraction(x) for x in row] for row in mat]
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            return 0
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            det = -det
        det *= m[col][col]
        inv = 1 / m[col][col]
        for r in range(col + 1, n):
            f = m[r][col] * inv
            if f:
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return int(det)


def _inv_frac(mat):
    """Inverse of a matrix of Fractions (Gauss-Jordan, exact)."""
    n = len(mat)
    aug = [[Fraction(x) for x in row] + [Fraction(i == j) for j in range(n)]
           for i, row in enumerate(mat)]
    for col in range(n):
        piv = next(r for r in range(col, n) if aug[r][col] != 0)
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [x * inv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


@dataclass(frozen=True)
class RootDatum:
    """Cartan data of a semisimple type: vertex set, Cartan matrix,
    symmetrizers and the fundamental-weight Gram matrix.

    Vertices are numbered 1..rank across components, Bourbaki order within
    each component.
    """

    components: tuple  # ((type, rank), ...)
    cartan: tuple      # rows of the Cartan matrix (a_rs)
    d: tuple           # symmetrizers d_r
    d_A: int           # index of Q in P (lcm of component determinants)
    gram: tuple        # (varpi_r, varpi_s) as Fractions

    @property
    def rank(self):
        return len(self.d)

    @property
    def vertices(self):
        return tuple(range(1, self.rank + 1))

    def a(self, r, s):
        return self.cartan[r - 1][s - 1]

    def simple_root(self, r):
        """alpha_r in fundamental-weight coordinates (column r of A)."""
        return Weight(self, tuple(Fraction(self.cartan[s][r - 1])
                                  for s in range(self.rank)))

    def fundamental_weight(self, r):
        coords = [Fraction(0)] * self.rank
        coords[r - 1] = Fraction(1)
        return Weight(self, tuple(coords))

    def zero_weight(self):
        return Weight(self, (Fraction(0),) * self.rank)

    def rho(self):
        """Half sum of positive roots = sum of fundamental weights."""
        return Weight(self, (Fraction(1),) * self.rank)

    def weight(self, coords):
        coords = tuple(Fraction(c) for c in coords)
        if len(coords) != self.rank:
            raise InputError("weight coordinate length != rank")
        return Weight(self, coords)

    def component_of(self, r):
        """(type, rank, offset) of the simple component containing vertex r."""
        off = 0
        for typ, rk in self.components:
            if off < r <= off + rk:
                return typ, rk, off
            off += rk
        raise InputError(f"vertex {r} out of range")

    def neighbors(self, r):
        return tuple(s for s in self.vertices
                     if s != r and self.a(r, s) != 0)

    def to_json(self):
        return {
            "components": [[t, r] for t, r in self.components],
            "cartan_matrix": [list(row) for row in self.cartan],
            "d": list(self.d),
            "d_A": self.d_A,
        }


def build_root_datum(type_spec):
    """Build a RootDatum from a list of (type, rank) pairs.

    >>> build_root_datum([("A", 1)]).d_A
    2
    """
    if isinstance(type_spec, str):
        type_spec = parse_type_string(type_spec)
    comps = []
    for typ, rank in type_spec:
        typ = str(typ).upper()
        if typ not in CLASSICAL_TYPES:
            raise InputError(f"unknown Cartan type {typ!r}")
        lo, hi = _RANK_BOUNDS[typ]
        if not (lo <= rank <= hi):
            raise InputError(f"rank {rank} invalid for type {typ} (allowed {lo}..{hi})")
        comps.append((typ, int(rank)))
    if not comps:
        raise InputError("empty type specification")

    n = sum(rk for _, rk in comps)
    cartan = [[0] * n for _ in range(n)]
    d = []
    off = 0
    dets = []
    for typ, rk in comps:
        block = _cartan_block(typ, rk)
        for i in range(rk):
            for j in range(rk):
                cartan[off + i][off + j] = block[i][j]
        d.extend(_symmetrizers(typ, rk))
        dets.append(_det_int(block))
        off += rk

    d_A = lcm(*dets)
    # Gram matrix of fundamental weights: G = D B^{-1} D with B = diag(d) A.
    b = [[Fraction(d[i] * cartan[i][j]) for j in range(n)] for i in range(n)]
    binv = _inv_frac(b)
    gram = tuple(tuple(d[i] * binv[i][j] * d[j] for j in range(n)) for i in range(n))

    datum = RootDatum(tuple(comps), tuple(map(tuple, cartan)), tuple(d), d_A, gram)
    _check_datum_invariants(datum)
    return datum


def parse_type_string(s):
    """Parse 'A1', 'A2xA1', 'B3 x G2' into [(type, rank), ...]."""
    parts = s.replace(" ", "").split("x")
    spec = []
    for p in parts:
        if len(p) < 2 or p[0].upper() not in CLASSICAL_TYPES or not p[1:].isdigit():
            raise InputError(f"cannot parse type token {p!r}")
        spec.append((p[0].upper(), int(p[1:])))
    return spec


def _check_datum_invariants(datum):
    n = datum.rank
    for i in range(n):
        if datum.cartan[i][i] != 2:
            raise InputError("Cartan diagonal not 2")
        for j in range(n):
            if i != j and datum.cartan[i][j] > 0:
                raise InputError("positive off-diagonal Cartan entry")
            if datum.d[i] * datum.cartan[i][j] != datum.d[j] * datum.cartan[j][i]:
                raise InputError("d_r a_rs not symmetric")


@dataclass(frozen=True)
class Weight:
    """Weight in fundamental-weight coordinates; coords are Fractions."""

    datum: RootDatum
    coords: tuple

    def __add__(self, other):
        self._same(other)
        return Weight(self.datum, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other):
        self._same(other)
        return Weight(self.datum, tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self):
        return Weight(self.datum, tuple(-a for a in self.coords))

    def __rmul__(self, c):
        return Weight(self.datum, tuple(Fraction(c) * a for a in self.coords))

    def _same(self, other):
        if self.datum is not other.datum and self.datum != other.datum:
            raise InputError("weights over different data")

    def is_zero(self):
        return all(c == 0 for c in self.coords)

    def is_dominant(self):
        return all(c >= 0 for c in self.coords)

    def is_integral(self):
        return all(c.denominator == 1 for c in self.coords)

    def pairing(self, other):
        """Invariant form (mu, nu); short roots have square length 2."""
        self._same(other)
        g = self.datum.gram
        return sum(self.coords[i] * g[i][j] * other.coords[j]
                   for i in range(self.datum.rank)
                   for j in range(self.datum.rank)
                   if self.coords[i] and other.coords[j])

    def cartan_pairing(self, r):
        """(mu, alpha_r^vee) -- the r-th fundamental coordinate."""
        return self.coords[r - 1]

    def reflect(self, r):
        """s_r(mu) = mu - (mu, alpha_r^vee) alpha_r."""
        c = self.coords[r - 1]
        if c == 0:
            return self
        a = self.datum.cartan
        return Weight(self.datum, tuple(
            self.coords[s] - c * a[s][r - 1] for s in range(self.datum.rank)))

    def coroot(self):
        """2 mu / (mu, mu), as a Weight (valid when mu is a root)."""
        n2 = self.pairing(self)
        if n2 == 0:
            raise InputError("coroot of zero weight")
        return Weight(self.datum, tuple(2 * c / n2 for c in self.coords))

    def to_json(self):
        return [f"{c.numerator}/{c.denominator}" for c in self.coords]

    def __str__(self):
        return "(" + ", ".join(str(c) for c in self.coords) + ")"


def weight_from_json(datum, arr):
    return datum.weight([Fraction(s) for s in arr])


def root_datum_from_json(obj):
    if isinstance(obj, str):
        obj = json.loads(obj)
    return build_root_datum([(t, r) for t, r in obj["components"]])


@dataclass(frozen=True)
class WeylWord:
    """A word in the simple reflections, stored as a tuple of vertex indices."""

    datum: RootDatum
    letters: tuple

    def __len__(self):
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)


def weyl_act(datum, word, mu):
    """Apply the Weyl word to a weight: w = s_{r_1} ... s_{r_k} acting as a
    composition, leftmost letter applied last."""
    if isinstance(word, WeylWord):
        letters = word.letters
    else:
        letters = tuple(word)
    for r in reversed(letters):
        mu = mu.reflect(r)
    return mu


def _validate_subset(datum, subset):
    subset = tuple(sorted(set(subset)))
    for r in subset:
        if r not in datum.vertices:
            raise InputError(f"vertex {r} not in datum")
    return subset


def longest_element(datum, subset=None):
    """Reduced word for the longest element w_X of the parabolic subsystem.

    Deterministic: the lexicographically smallest reduced word, found by
    greedily choosing the smallest admissible first letter (exchange
    property: s_r can start a reduced word of w iff w^{-1} alpha_r < 0).
    """
    if subset is None:
        subset = datum.vertices
    subset = _validate_subset(datum, subset)
    if not subset:
        return WeylWord(datum, ())

    # Represent w and w^{-1} by their action on simple roots of the subsystem.
    pos = positive_roots_closure(datum, subset)
    n_pos = len(pos)

    # Track w^{-1} as image list of simple roots alpha_r, r in subset.
    winv = {r: datum.simple_root(r) for r in subset}
    # Start from w = w_X; we peel letters off the left. w_X sends every
    # positive root of the subsystem to a negative one, so initially any
    # r works;  maintain w explicitly as the composition of the remaining
    # reflections by tracking w^{-1} = (already-emitted word applied to w_X).
    # Simpler: build the word on the dominant-to-antidominant path but with
    # lex-min letter choice at each step, which yields the lex-smallest
    # reduced word of w_X^{-1} = w_X read in reverse; reverse at the end is
    # unnecessary because we instead run the exchange test directly.
    word = []
    # current = remaining element, as map alpha_r -> current^{-1}(alpha_r)
    # initialised with w_X computed via the antidominant path.
    wx = _wx_matrix(datum, subset, pos)
    cur_inv = dict(wx)  # w_X is an involution, so w_X^{-1} = w_X
    for _ in range(n_pos):
        for r in subset:
            img = cur_inv[r]
            if _is_negative_on(img, subset):
                break
        else:
            raise InputError("internal: no descent found")
        word.append(r)
        # cur <- s_r cur, so cur^{-1} <- cur^{-1} s_r and
        # (cur^{-1} s_r)(alpha_t) = cur^{-1}(alpha_t - a_{rt} alpha_r).
        cur_inv = {t: cur_inv[t] - datum.a(r, t) * cur_inv[r] for t in subset}
    return WeylWord(datum, tuple(word))


def _wx_matrix(datum, subset, pos):
    """Action of w_X on the simple roots of the subsystem: repeatedly reflect
    a strictly dominant weight of the subsystem to the antidominant chamber,
    recording the product."""
    # images of alpha_r under the identity
    images = {r: datum.simple_root(r) for r in subset}
    # dominant regular weight for the subsystem: sum of fundamentals on subset
    lam = datum.weight([1 if (r in subset) else 0 for r in datum.vertices])
    while True:
        r = next((r for r in subset if lam.coords[r - 1] > 0), None)
        if r is None:
            break
        lam = lam.reflect(r)
        images = {t: v.reflect(r) for t, v in images.items()}
    return images


def _is_negative_on(weight, subset):
    """Is the weight a negative root of the subsystem (all alpha-coefficients
    on the subset nonpositive, at least one negative)?  In fundamental
    coordinates a root of the subsystem has support only on subset columns;
    negativity is decided by the alpha-expansion."""
    coeffs = _alpha_coefficients(weight, subset)
    if coeffs is None:
        return False
    return all(c <= 0 for c in coeffs.values()) and any(c < 0 for c in coeffs.values())


def _alpha_coefficients(weight, subset):
    """Expand a weight supported on ZZ<alpha_r : r in subset>; None if not."""
    datum = weight.datum
    sub = list(subset)
    # Solve sum_t c_t alpha_t = weight in fundamental coordinates:
    # coords[s] = sum_t c_t a_{s+1, t}; restrict to rows s in subset gives a
    # square invertible system (Cartan matrix of the subsystem).
    a_sub = [[Fraction(datum.a(s, t)) for t in sub] for s in sub]
    rhs = [weight.coords[s - 1] for s in sub]
    coeffs = _solve_frac(a_sub, rhs)
    # check consistency on the rows outside the subset
    for s in datum.vertices:
        if s in subset:
            continue
        val = sum(c * datum.a(s, t) for c, t in zip(coeffs, sub))
        if val != weight.coords[s - 1]:
            return None
    return dict(zip(sub, coeffs))


def _solve_frac(a, rhs):
    n = len(a)
    aug = [row[:] + [rhs[i]] for i, row in enumerate(a)]
    for col in range(n):
        piv = next(r for r in range(col, n) if aug[r][col] != 0)
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [x * inv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return [aug[i][n] for i in range(n)]


def positive_roots_closure(datum, subset):
    """All positive roots of the subsystem: orbit of the simple roots under
    the subsystem reflections, intersected with the positive cone.  Brute
    force; used as the independent oracle and for lengths."""
    subset = _validate_subset(datum, subset)
    seen = {}
    frontier = [datum.simple_root(r) for r in subset]
    for w in frontier:
        seen[w.coords] = w
    while frontier:
        new = []
        for w in frontier:
            for r in subset:
                v = w.reflect(r)
                if v.coords not in seen:
                    seen[v.coords] = v
                    new.append(v)
        frontier = new
    out = []
    for w in seen.values():
        coeffs = _alpha_coefficients(w, subset)
        if coeffs is not None and all(c >= 0 for c in coeffs.values()):
            out.append(w)
    out.sort(key=lambda w: (sum(_alpha_coefficients(w, subset).values()), w.coords))
    return out


def positive_roots(datum, subset=None):
    """Positive roots of the subsystem enumerated along the canonical reduced
    word of w_X: beta_k = s_{r_1} ... s_{r_{k-1}} (alpha_{r_k})."""
    if subset is None:
        subset = datum.vertices
    subset = _validate_subset(datum, subset)
    if not subset:
        return []
    word = longest_element(datum, subset)
    return beta_sequence(datum, word)


def beta_sequence(datum, word):
    """beta_k enumeration attached to a reduced word."""
    betas = []
    for k, r in enumerate(word.letters):
        beta = datum.simple_root(r)
        for j in range(k - 1, -1, -1):
            beta = beta.reflect(word.letters[j])
        betas.append(beta)
    return betas


def rho_check(datum, subset):
    """rho_X^vee: half the sum of the positive coroots of the subsystem,
    represented as a weight via the invariant form."""
    subset = _validate_subset(datum, subset)
    acc = datum.zero_weight()
    for beta in positive_roots_closure(datum, subset):
        acc = acc + beta.coroot()
    return Fraction(1, 2) * acc


def qint(n, q):
    """[n]_q = (q^{-n} - q^n) / (q^{-1} - q)."""
    if n < 0:
        raise InputError("q-integer of negative n")
    if n == 0:
        return q * 0
    return sum(q ** (n - 1 - 2 * k) for k in range(n))


def qfact(n, q):
    """[n]_q! with [0]_q! = 1."""
    if n < 0:
        raise InputError("q-factorial of negative n")
    out = Fraction(1) if isinstance(q, (int, Fraction)) else (q * 0 + 1)
    for k in range(2, n + 1):
        out = out * qint(k, q)
    return out


def qbinom(m, n, q):
    """Gaussian binomial [m choose n]_q."""
    if n < 0 or n > m:
        raise InputError("q-binomial out of range")
    return qfact(m, q) / (qfact(n, q) * qfact(m - n, q))


def tau0(datum):
    """Diagram automorphism characterized by alpha_{tau0(r)} = -w_0 alpha_r."""
    w0 = longest_element(datum, datum.vertices)
    out = {}
    simple = {datum.simple_root(r).coords: r for r in datum.vertices}
    for r in datum.vertices:
        img = -weyl_act(datum, w0, datum.simple_root(r))
        out[r] = simple[img.coords]
    return out


def diagram_automorphisms(datum):
    """All permutations of the vertices preserving the Cartan matrix."""
    n = datum.rank
    verts = datum.vertices
    autos = []
    for perm in itertools.permutations(verts):
        mapping = dict(zip(verts, perm))
        if all(datum.a(mapping[r], mapping[s]) == datum.a(r, s)
               for r in verts for s in verts):
            autos.append(mapping)
        if n > 8:  # pragma: no cover - rank cap keeps this cheap
            break
    return autos


def restrict_datum(datum, subset):
    """Root datum of the subsystem spanned by a vertex subset.

    Returns (subdatum, vertex_map, scale): ``vertex_map[sub_vertex]`` is the
    ambient vertex, and the ambient form restricted to the subsystem equals
    ``scale`` times the subdatum form (the subdatum renormalizes short roots
    to square length 2).
    """
    subset = _validate_subset(datum, subset)
    if not subset:
        raise InputError("empty subset has no root datum")
    # connected components of the induced diagram
    remaining = set(subset)
    comps = []
    while remaining:
        seed = min(remaining)
        comp = {seed}
        frontier = [seed]
        while frontier:
            v = frontier.pop()
            for w in remaining - comp:
                if datum.a(v, w) != 0:
                    comp.add(w)
                    frontier.append(w)
        comps.append(sorted(comp))
        remaining -= comp
    # identify each component and bring it to Bourbaki order
    spec = []
    vertex_map = []
    for comp in comps:
        typ, order = _identify_component(datum, comp)
        spec.append((typ, len(comp)))
        vertex_map.extend(order)
    sub = build_root_datum(spec)
    # length scale: ambient square length of the subsystem's short roots / 2
    min_len = min(2 * datum.d[v - 1] for v in vertex_map)
    scale = Fraction(min_len, 2)
    for i, v in enumerate(vertex_map):
        if Fraction(2 * datum.d[v - 1]) != scale * 2 * sub.d[i]:
            raise InputError("subsystem length pattern does not match its type")
    return sub, {i + 1: v for i, v in enumerate(vertex_map)}, scale


def _identify_component(datum, comp):
    """Cartan type and Bourbaki-ordered ambient vertices of a connected
    induced subdiagram."""
    m = len(comp)
    for typ in CLASSICAL_TYPES:
        lo, hi = _RANK_BOUNDS[typ]
        if not (lo <= m <= hi) and not (typ == "A" and m == 1):
            continue
        block = _cartan_block(typ, m)
        for perm in itertools.permutations(comp):
            if all(datum.a(perm[i], perm[j]) == block[i][j]
                   for i in range(m) for j in range(m)):
                return typ, list(perm)
    raise InputError("could not identify subsystem type")


def weyl_dimension(datum, varpi):
    """Weyl dimension formula, exact."""
    if not varpi.is_dominant() or not varpi.is_integral():
        raise InputError("weight not dominant integral")
    rho = datum.rho()
    num = Fraction(1)
    den = Fraction(1)
    for beta in positive_roots_closure(datum, datum.vertices):
        num *= (varpi + rho).pairing(beta)
        den *= rho.pairing(beta)
    dim = num / den
    assert dim.denominator == 1
    return int(dim)
