"""Polynomial arithmetic over the rationals and integer polynomials.

Polynomials are coefficient tuples in ascending degree order.  The rational
helpers back the Sturm-sequence machinery used for real root isolation; the
``IntPoly`` class is the carrier for characteristic and minimal polynomials,
where coefficients stay arbitrary-precision integers throughout.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd


def poly_trim(coeffs):
    """Drop trailing zero coefficients; the zero polynomial is ()."""
    c = list(coeffs)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def poly_degree(p):
    return len(p) - 1


def poly_eval(p, x):
    acc = 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


def poly_neg(p):
    return tuple(-c for c in p)


def poly_add(p, q):
    n = max(len(p), len(q))
    return poly_trim(
        (p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)
    )


def poly_sub(p, q):
    return poly_add(p, poly_neg(q))


def poly_mul(p, q):
    if not p or not q:
        return ()
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a == 0:
            continue
        for j, b in enumerate(q):
            out[i + j] += a * b
    return poly_trim(out)


def poly_scale(p, s):
    if s == 0:
        return ()
    return tuple(c * s for c in p)


def poly_derivative(p):
    return poly_trim(i * c for i, c in enumerate(p) if i >= 1)


def poly_divmod(p, q):
    """Euclidean division over the rationals; q must be nonzero."""
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    rem = [Fraction(c) for c in p]
    quo = [Fraction(0)] * max(0, len(p) - len(q) + 1)
    dq = len(q) - 1
    lead = Fraction(q[-1])
    while len(rem) - 1 >= dq and any(c != 0 for c in rem):
        while rem and rem[-1] == 0:
            rem.pop()
        if len(rem) - 1 < dq:
            break
        k = len(rem) - 1 - dq
        f = rem[-1] / lead
        quo[k] = f
        for i, c in enumerate(q):
            rem[k + i] -= f * c
        rem.pop()
    return poly_trim(quo), poly_trim(rem)


def poly_gcd(p, q):
    """Monic gcd over the rationals."""
    a, b = poly_trim(p), poly_trim(q)
    while b:
        _, r = poly_divmod(a, b)
        a, b = b, r
    if not a:
        return ()
    lead = Fraction(a[-1])
    return tuple(Fraction(c) / lead for c in a)


def is_squarefree(p):
    g = poly_gcd(p, poly_derivative(p))
    return poly_degree(g) <= 0


def sturm_sequence(p):
    seq = [poly_trim(p), poly_derivative(p)]
    while seq[-1]:
        _, r = poly_divmod(seq[-2], seq[-1])
        if not r:
            break
        seq.append(poly_neg(r))
    return [s for s in seq if s]


def _sign_variations(seq, x):
    signs = []
    for s in seq:
        v = poly_eval(s, x)
        if v != 0:
            signs.append(1 if v > 0 else -1)
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_real_roots(p, lo, hi, seq=None):
    """Number of distinct real roots of squarefree p in the half-open (lo, hi]."""
    if seq is None:
        seq = sturm_sequence(p)
    return _sign_variations(seq, lo) - _sign_variations(seq, hi)


class IntPoly:
    """Integer polynomial, coefficients ascending, leading coefficient nonzero."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        c = poly_trim(int(x) for x in coeffs)
        for x in coeffs:
            if int(x) != x:
                raise ValueError("IntPoly requires integer coefficients")
        self.coeffs = c

    @property
    def degree(self):
        return len(self.coeffs) - 1

    @property
    def is_zero(self):
        return not self.coeffs

    @property
    def is_monic(self):
        return bool(self.coeffs) and self.coeffs[-1] == 1

    def __call__(self, x):
        return poly_eval(self.coeffs, x)

    def __eq__(self, other):
        return isinstance(other, IntPoly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(("IntPoly", self.coeffs))

    def __add__(self, other):
        return IntPoly(poly_add(self.coeffs, other.coeffs))

    def __sub__(self, other):
        return IntPoly(poly_sub(self.coeffs, other.coeffs))

    def __mul__(self, other):
        return IntPoly(poly_mul(self.coeffs, other.coeffs))

    def __neg__(self):
        return IntPoly(poly_neg(self.coeffs))

    def derivative(self):
        return IntPoly(poly_derivative(self.coeffs))

    def content(self):
        g = 0
        for c in self.coeffs:
            g = gcd(g, abs(c))
        return g

    def primitive_part(self):
        g = self.content()
        if g <= 1:
            return self
        return IntPoly(c // g for c in self.coeffs)

    def squarefree_part(self):
        """p / gcd(p, p'), normalized to primitive with positive lead."""
        g = poly_gcd(self.coeffs, poly_derivative(self.coeffs))
        if poly_degree(g) <= 0:
            p = self
        else:
            q, r = poly_divmod(self.coeffs, g)
            assert not r
            denoms = 1
            for c in q:
                denoms = denoms * Fraction(c).denominator // gcd(
                    denoms, Fraction(c).denominator
                )
            p = IntPoly(Fraction(c) * denoms for c in q).primitive_part()
        if p.coeffs and p.coeffs[-1] < 0:
            p = -p
        return p

    def integer_roots(self):
        """Distinct integer roots (for monic inputs these are all rational roots)."""
        p = self.coeffs
        if not p:
            return []
        roots = set()
        while p and p[0] == 0:
            roots.add(0)
            p = p[1:]
        if p and len(p) > 1:
            const = abs(p[0])
            d = 1
            divisors = set()
            while d * d <= const:
                if const % d == 0:
                    divisors.update((d, const // d))
                d += 1
            for d in sorted(divisors):
                for r in (d, -d):
                    if poly_eval(p, r) == 0:
                        roots.add(r)
        return sorted(roots)

    def deflate_root(self, r):
        """Divide by (t - r); r must be a root."""
        q, rem = poly_divmod(self.coeffs, (-r, 1))
        if rem:
            raise ValueError("%s is not a root" % r)
        return IntPoly(q)

    def text(self, var="t"):
        if self.is_zero:
            return "0"
        parts = []
        for i in range(self.degree, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            if i == 0:
                term = str(abs(c))
            elif i == 1:
                term = var if abs(c) == 1 else "%d%s" % (abs(c), var)
            else:
                term = "%s^%d" % (var, i) if abs(c) == 1 else "%d%s^%d" % (abs(c), var, i)
            if not parts:
                parts.append(term if c > 0 else "-" + term)
            else:
                parts.append(("+ " if c > 0 else "- ") + term)
        return " ".join(parts)

    def __repr__(self):
        return "IntPoly(%s)" % self.text()


def monic_from_dependence(coefficients, degree):
    """t^degree - sum c_i t^i for integer dependence coefficients c_0..c_{degree-1}."""
    coeffs = [-int(c) for c in coefficients] + [0] * (degree - len(coefficients)) + [1]
    return IntPoly(coeffs[: degree + 1])
