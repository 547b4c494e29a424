"""Finite extensions ``K = k[x]/(f)`` of a prime field ``k``.

Elements are length-``d`` coefficient vectors in the power basis
``1, x, ..., x^(d-1)``.  Everything downstream only needs the companion
matrix of ``x`` (the regular representation of the generator).
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np

from .linalg import FieldError, PrimeField, prime_field


def _poly_trim(c):
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return c


def _poly_divmod(a, b, F: PrimeField):
    """Quotient and remainder of coefficient lists (low degree first)."""
    a = [F(x) for x in a]
    b = _poly_trim([F(x) for x in b])
    inv = F.inv(b[-1])
    q = [F(0)] * max(len(a) - len(b) + 1, 1)
    r = a[:]
    while len(_poly_trim(r)) >= len(b):
        r = _poly_trim(r)
        shift = len(r) - len(b)
        c = F(r[-1] * inv)
        q[shift] = c
        for t, bt in enumerate(b):
            r[t + shift] = F(r[t + shift] - c * bt)
    return q, _poly_trim(r)


def _monic_polys(F: PrimeField, degree: int):
    for tail in itertools.product(range(F.p), repeat=degree):
        yield list(tail) + [1]


def _irreducible_finite(poly, F: PrimeField) -> bool:
    d = len(poly) - 1
    for e in range(1, d // 2 + 1):
        for g in _monic_polys(F, e):
            if not _poly_divmod(poly, g, F)[1]:
                return False
    return True


def _divisors(n: int):
    n = abs(n)
    if n == 0:
        return [0]
    out = []
    for a in range(1, math.isqrt(n) + 1):
        if n % a == 0:
            out.extend({a, n // a})
    return sorted(out + [-x for x in out])


def _irreducible_rational(poly) -> bool:
    """Irreducibility over Q for monic integer polynomials of degree <= 4."""
    coeffs = [Fraction(c) for c in poly]
    if any(c.denominator != 1 for c in coeffs):
        raise FieldError("rational defining polynomials must have integer coefficients")
    c = [int(x) for x in coeffs]
    d = len(c) - 1
    if d > 4:
        raise FieldError("irreducibility over Q is only decided for degree <= 4")
    if d == 1:
        return True

    def ev(x):
        return sum(ci * x**i for i, ci in enumerate(c))

    # rational roots of a monic integer polynomial are integer divisors of c0
    if c[0] == 0 or any(ev(r) == 0 for r in _divisors(c[0])):
        return False
    if d <= 3:
        return True
    # degree 4: x^4+a x^3+b x^2+cc x+e = (x^2+p x+q)(x^2+r x+s), integers by Gauss
    e, cc, b, a = c[0], c[1], c[2], c[3]
    for q in _divisors(e):
        s = e // q
        if q != s:
            num = cc - a * q
            if num % (s - q):
                continue
            p = num // (s - q)
            r = a - p
            if q + s + p * r == b:
                return False
        else:
            if cc != a * q:
                continue
            disc = a * a - 4 * (b - 2 * q)
            if disc >= 0 and math.isqrt(disc) ** 2 == disc:
                return False
    return True


class ExtensionField:
    """``k[x]/(f)`` for a monic irreducible ``f`` over a prime field ``k``."""

    def __init__(self, base: PrimeField, poly):
        self.k = base
        poly = [base(c) for c in poly]
        self.poly = tuple(poly)
        self.degree = len(poly) - 1
        d = self.degree
        C = base.zeros((d, d))
        for t in range(d - 1):
            C[t + 1, t] = 1
        for t in range(d):
            C[t, d - 1] = base(-poly[t])
        self.companion = C
        self._powers = [base.eye(d)]
        for _ in range(1, d):
            self._powers.append(base.matmul(self._powers[-1], C))

    def __eq__(self, other):
        return isinstance(other, ExtensionField) and self.k == other.k and self.poly == other.poly

    def __hash__(self):
        return hash((self.k, self.poly))

    def __repr__(self):
        if self.degree == 1:
            return repr(self.k)
        return f"{self.k}[x]/({self.poly_str()})"

    def poly_str(self) -> str:
        terms = []
        for i, c in enumerate(self.poly):
            if c == 0:
                continue
            mon = "1" if i == 0 else ("x" if i == 1 else f"x^{i}")
            terms.append(mon if c == 1 and i else f"{c}*{mon}" if i else f"{c}")
        return " + ".join(reversed(terms))

    # -- elements ---------------------------------------------------------
    def one(self):
        v = self.k.zeros(self.degree)
        v[0] = 1
        return v

    def zero(self):
        return self.k.zeros(self.degree)

    def gen(self):
        """The class of ``x`` (the image of the generator of the ring)."""
        return self.companion[:, 0].copy()

    def element(self, coeffs):
        v = self.k.array(list(coeffs) + [0] * (self.degree - len(coeffs)))
        return v

    def mult_matrix(self, a) -> np.ndarray:
        """Matrix of multiplication by ``a`` on the power basis."""
        F = self.k
        M = F.zeros((self.degree, self.degree))
        for t in range(self.degree):
            if a[t] != 0:
                M = F.add(M, F.scale(a[t], self._powers[t]))
        return M

    def mul(self, a, b):
        return self.k.matmul(self.mult_matrix(a), b)

    def add(self, a, b):
        return self.k.add(a, b)

    def inv(self, a):
        x = self.k.solve(self.mult_matrix(a), self.one())
        if x is None:
            raise ZeroDivisionError("inverse of zero")
        return x

    def trace(self, a):
        """Trace of the regular representation, an element of the prime field."""
        M = self.mult_matrix(a)
        return self.k(sum(M[i, i] for i in range(self.degree)))

    def trace_functional(self) -> np.ndarray:
        """Row vector ``t`` with ``trace(a) == t @ a``."""
        return self.k.array([self.trace(self._basis(t)) for t in range(self.degree)])

    def trace_form(self) -> np.ndarray:
        """Gram matrix of ``(a, b) -> tr(ab)`` on the power basis."""
        d = self.degree
        return self.k.array([[self.trace(self.mul(self._basis(s), self._basis(t)))
                              for t in range(d)] for s in range(d)])

    def trace_form_nondegenerate(self) -> bool:
        return self.k.rank(self.trace_form()) == self.degree

    def _basis(self, t):
        v = self.k.zeros(self.degree)
        v[t] = 1
        return v

    def polynomial_in(self, a, X: np.ndarray) -> np.ndarray:
        """Evaluate the element ``a = sum a_t x^t`` at a matrix ``X`` (action of a)."""
        F = self.k
        n = X.shape[0]
        out = F.zeros((n, n))
        P = F.eye(n)
        for t in range(self.degree):
            if a[t] != 0:
                out = F.add(out, F.scale(a[t], P))
            P = F.matmul(P, X)
        return out

    def annihilates(self, X: np.ndarray) -> bool:
        """True if the defining polynomial kills ``X``, i.e. ``x -> X`` is a module structure."""
        F = self.k
        n = X.shape[0]
        out = F.zeros((n, n))
        P = F.eye(n)
        for c in self.poly:
            out = F.add(out, F.scale(c, P))
            P = F.matmul(P, X)
        return F.is_zero(out)

    def elements(self):
        """Iterate over all elements (finite base only)."""
        for tup in itertools.product(range(self.k.p), repeat=self.degree):
            yield self.k.array(tup)

    def random_element(self, rng, bound: int = 5):
        return self.k.random(self.degree, rng, bound)

    def to_dict(self):
        return {"char": self.k.p, "poly": [str(c) if self.k.p == 0 else int(c) for c in self.poly]}

    @property
    def size(self):
        return math.inf if self.k.p == 0 else self.k.p ** self.degree


def field_make(char: int, defining_polynomial) -> ExtensionField:
    """Build ``k[x]/(f)`` after checking ``f`` is monic and irreducible.

    ``defining_polynomial`` lists coefficients from the constant term up.
    """
    F = prime_field(char)
    poly = [F(c) for c in defining_polynomial]
    if len(poly) < 2 or poly[-1] != 1:
        raise FieldError("defining polynomial must be monic of degree >= 1")
    if len(poly) > 2:
        irreducible = _irreducible_rational(poly) if F.p == 0 else _irreducible_finite(poly, F)
        if not irreducible:
            raise FieldError("not a field: defining polynomial is reducible")
    return ExtensionField(F, poly)


def base_field(char: int) -> ExtensionField:
    """The prime field as a degree-1 extension (generator acts as 0)."""
    return field_make(char, [0, 1])


def field_from_dict(d) -> ExtensionField:
    return field_make(d["char"], d["poly"])
