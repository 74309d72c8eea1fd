"""Formal noncommutative polynomials in the generators E_r, F_r, K_omega.

An AlgebraElement is a complex-linear combination of words in the symbols

    ('E', r), ('F', r), ('K', coords)

where ``coords`` is a tuple of Fractions (fundamental-weight coordinates of
omega).  No normal ordering is attempted: the semantics of an element is its
evaluation on weight modules.  The coproduct and antipode act symbol-wise
and produce TensorElements / AlgebraElements.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .errors import InputError

def _k_sym(coords):
    return ("K", tuple(Fraction(c) for c in coords))


def normalize_word(word):
    """Canonical form of a word: adjacent K symbols merged, K_0 dropped.
    K_a K_b = K_{a+b} holds universally, so this is exact."""
    out = []
    for sym in word:
        if sym[0] == "K":
            coords = tuple(Fraction(c) for c in sym[1])
            if out and out[-1][0] == "K":
                coords = tuple(a + b for a, b in zip(out[-1][1], coords))
                out.pop()
            if any(coords):
                out.append(("K", coords))
        else:
            out.append(sym)
    return tuple(out)


class AlgebraElement:
    """dict word -> coefficient, word a tuple of symbols (canonicalized:
    adjacent K's merged, trivial K dropped)."""

    __slots__ = ("datum", "terms")

    def __init__(self, datum, terms=None):
        self.datum = datum
        self.terms = {}
        for word, coeff in (terms or {}).items():
            w = normalize_word(word)
            cur = self.terms.get(w, 0.0) + coeff
            if cur == 0:
                self.terms.pop(w, None)
            else:
                self.terms[w] = cur

    # -- constructors -----------------------------------------------------
    @classmethod
    def zero(cls, datum):
        return cls(datum, {})

    @classmethod
    def one(cls, datum):
        return cls(datum, {(): 1.0})

    @classmethod
    def e(cls, datum, r):
        return cls(datum, {(("E", r),): 1.0})

    @classmethod
    def f(cls, datum, r):
        return cls(datum, {(("F", r),): 1.0})

    @classmethod
    def k(cls, datum, weight):
        return cls(datum, {(_k_sym(weight.coords),): 1.0})

    @classmethod
    def k_alpha(cls, datum, r, power=1):
        return cls.k(datum, power * datum.simple_root(r))

    # -- ring operations ---------------------------------------------------
    def _add_term(self, word, coeff):
        word = normalize_word(word)
        cur = self.terms.get(word, 0.0) + coeff
        if cur == 0:
            self.terms.pop(word, None)
        else:
            self.terms[word] = cur

    def __add__(self, other):
        other = self._coerce(other)
        out = AlgebraElement(self.datum, self.terms)
        out.terms = dict(self.terms)
        for w, c in other.terms.items():
            out._add_term(w, c)
        return out

    def __sub__(self, other):
        return self + (-1) * self._coerce(other)

    def __neg__(self):
        return (-1) * self

    def __rmul__(self, scalar):
        if isinstance(scalar, AlgebraElement):
            return NotImplemented
        return AlgebraElement(self.datum,
                              {w: complex(scalar) * c for w, c in self.terms.items()
                               if scalar != 0})

    def __mul__(self, other):
        if not isinstance(other, AlgebraElement):
            return complex(other) * self
        out = AlgebraElement.zero(self.datum)
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                out._add_term(w1 + w2, c1 * c2)
        return out

    def _coerce(self, other):
        if isinstance(other, AlgebraElement):
            return other
        return complex(other) * AlgebraElement.one(self.datum)

    def map_symbols(self, fn):
        """Algebra endomorphism from a symbol-level map.

        ``fn(symbol)`` returns an AlgebraElement; the map is extended
        multiplicatively over words and linearly over terms.
        """
        out = AlgebraElement.zero(self.datum)
        for word, coeff in self.terms.items():
            acc = coeff * AlgebraElement.one(self.datum)
            for sym in word:
                acc = acc * fn(sym)
            for w, c in acc.terms.items():
                out._add_term(w, c)
        return out

    # -- Hopf structure ----------------------------------------------------
    def coproduct(self):
        """Delta as a TensorElement; Delta(E) = E ox 1 + K ox E,
        Delta(F) = F ox K^{-1} + 1 ox F, Delta(K) = K ox K."""
        out = TensorElement.zero(self.datum)
        for word, coeff in self.terms.items():
            acc = TensorElement.unit(self.datum, coeff)
            for sym in word:
                acc = acc * _delta_symbol(self.datum, sym)
            out += acc
        return out

    def antipode(self):
        """S(E_r) = -K_r^{-1} E_r, S(F_r) = -F_r K_r, S(K) = K^{-1};
        anti-homomorphism."""
        datum = self.datum
        out = AlgebraElement.zero(datum)
        for word, coeff in self.terms.items():
            acc = coeff * AlgebraElement.one(datum)
            for sym in reversed(word):
                acc = acc * _antipode_symbol(datum, sym)
            for w, c in acc.terms.items():
                out._add_term(w, c)
        return out

    def counit(self):
        tot = 0.0
        for word, coeff in self.terms.items():
            if all(s[0] == "K" for s in word):
                tot += coeff
        return tot

    def star(self, qp):
        """*-structure: E_r* = F_r K_r, F_r* = K_r^{-1} E_r, K* = K;
        antilinear anti-homomorphism.  Needs q only through nothing: the
        images are q-free, so qp is accepted for interface symmetry."""
        datum = self.datum
        out = AlgebraElement.zero(datum)
        for word, coeff in self.terms.items():
            acc = np.conj(coeff) * AlgebraElement.one(datum)
            for sym in reversed(word):
                acc = acc * _star_symbol(datum, sym)
            for w, c in acc.terms.items():
                out._add_term(w, c)
        return out

    def adjoint_action(self, y):
        """Ad_q(self)(y) = self_(1) y S(self_(2))."""
        delta = self.coproduct()
        out = AlgebraElement.zero(self.datum)
        for (w1, w2), c in delta.terms.items():
            x1 = AlgebraElement(self.datum, {w1: c})
            x2 = AlgebraElement(self.datum, {w2: 1.0})
            prod = x1 * y * x2.antipode()
            for w, cc in prod.terms.items():
                out._add_term(w, cc)
        return out

    def __repr__(self):
        bits = []
        for word, coeff in sorted(self.terms.items(), key=lambda kv: str(kv[0])):
            syms = "*".join(_sym_str(s) for s in word) or "1"
            bits.append(f"({coeff:.4g})*{syms}")
        return " + ".join(bits) or "0"


def _sym_str(sym):
    if sym[0] == "K":
        return "K[" + ",".join(str(c) for c in sym[1]) + "]"
    return f"{sym[0]}{sym[1]}"


def _delta_symbol(datum, sym):
    kind = sym[0]
    if kind == "K":
        return TensorElement(datum, {((sym,), (sym,)): 1.0})
    r = sym[1]
    kr = (_k_sym(datum.simple_root(r).coords),)
    krinv = (_k_sym((-datum.simple_root(r)).coords),)
    if kind == "E":
        return TensorElement(datum, {((sym,), ()): 1.0, (kr, (sym,)): 1.0})
    if kind == "F":
        return TensorElement(datum, {((sym,), krinv): 1.0, ((), (sym,)): 1.0})
    raise InputError(f"unknown symbol {sym!r}")


def _antipode_symbol(datum, sym):
    kind = sym[0]
    if kind == "K":
        return AlgebraElement(datum, {(("K", tuple(-Fraction(c) for c in sym[1])),): 1.0})
    r = sym[1]
    if kind == "E":
        out = AlgebraElement(datum)
        out.terms = {(_k_sym((-datum.simple_root(r)).coords), sym): -1.0}
        return out
    if kind == "F":
        out = AlgebraElement(datum)
        out.terms = {(sym, _k_sym(datum.simple_root(r).coords)): -1.0}
        return out
    raise InputError(f"unknown symbol {sym!r}")


def _star_symbol(datum, sym):
    kind = sym[0]
    if kind == "K":
        return AlgebraElement(datum, {(sym,): 1.0})
    r = sym[1]
    if kind == "E":
        return AlgebraElement(datum, {(("F", r), _k_sym(datum.simple_root(r).coords)): 1.0})
    if kind == "F":
        return AlgebraElement(datum, {(_k_sym((-datum.simple_root(r)).coords), ("E", r)): 1.0})
    raise InputError(f"unknown symbol {sym!r}")


def push_k_right(element, qp):
    """Normal form with all K symbols commuted to the right end of each
    word, using K_w E_r = q^{(w, alpha_r)} E_r K_w (and the inverse power
    for F_r).  Exact at numeric q; enables cancellation of equal elements
    written with different K placements."""
    datum = element.datum
    out = AlgebraElement.zero(datum)
    for word, coeff in element.terms.items():
        body = []
        k_weight = None
        factor = coeff
        for sym in word:
            if sym[0] == "K":
                w = datum.weight(sym[1])
                k_weight = w if k_weight is None else k_weight + w
            else:
                if k_weight is not None:
                    pair = k_weight.pairing(datum.simple_root(sym[1]))
                    factor *= qp.qpow(pair if sym[0] == "E" else -pair)
                body.append(sym)
        if k_weight is not None and any(k_weight.coords):
            body.append(("K", k_weight.coords))
        out._add_term(tuple(body), factor)
    return out


def push_k_right_tensor(te, qp):
    """Apply push_k_right to both legs of a TensorElement."""
    out = TensorElement.zero(te.datum)
    for (w1, w2), coeff in te.terms.items():
        e1 = push_k_right(AlgebraElement(te.datum, {w1: 1.0}), qp)
        e2 = push_k_right(AlgebraElement(te.datum, {w2: 1.0}), qp)
        for w1b, c1 in e1.terms.items():
            for w2b, c2 in e2.terms.items():
                out._add((w1b, w2b), coeff * c1 * c2)
    return out


class TensorElement:
    """Element of U ox U: dict (word1, word2) -> coefficient, with both legs
    kept in canonical word form."""

    __slots__ = ("datum", "terms")

    def __init__(self, datum, terms=None):
        self.datum = datum
        self.terms = {}
        for wp, coeff in (terms or {}).items():
            self._add(wp, coeff)

    def _add(self, wp, coeff):
        wp = (normalize_word(wp[0]), normalize_word(wp[1]))
        cur = self.terms.get(wp, 0.0) + coeff
        if cur == 0:
            self.terms.pop(wp, None)
        else:
            self.terms[wp] = cur

    @classmethod
    def zero(cls, datum):
        return cls(datum, {})

    @classmethod
    def unit(cls, datum, coeff=1.0):
        return cls(datum, {((), ()): coeff})

    def __iadd__(self, other):
        for wp, c in other.terms.items():
            self._add(wp, c)
        return self

    def __add__(self, other):
        out = TensorElement(self.datum, self.terms)
        out += other
        return out

    def __sub__(self, other):
        out = TensorElement(self.datum, self.terms)
        for wp, c in other.terms.items():
            out._add(wp, -c)
        return out

    def __mul__(self, other):
        out = TensorElement.zero(self.datum)
        for (a1, a2), c1 in self.terms.items():
            for (b1, b2), c2 in other.terms.items():
                out._add((a1 + b1, a2 + b2), c1 * c2)
        return out

    def __rmul__(self, scalar):
        return TensorElement(self.datum,
                             {wp: complex(scalar) * c for wp, c in self.terms.items()})

    def legs(self):
        """Iterate (AlgebraElement-word1, word2, coeff)."""
        return iter(self.terms.items())

    def map_first_leg(self, fn):
        """Apply an AlgebraElement -> AlgebraElement map to first legs."""
        out = TensorElement.zero(self.datum)
        for (w1, w2), c in self.terms.items():
            img = fn(AlgebraElement(self.datum, {w1: 1.0}))
            for w1b, cb in img.terms.items():
                out._add((w1b, w2), c * cb)
        return out
