"""Exact scalar arithmetic: rationals and real algebraic numbers.

Every coordinate in the package is a :class:`Scalar`: either an
arbitrary-precision rational or an element of a real algebraic context
``Q(alpha)``, stored as a rational coefficient vector of ``alpha``.  The
context is a :class:`NumberField`: a monic squarefree integer polynomial with
no rational roots together with an isolating interval certified (by sign
change and a Sturm count of one) to contain exactly one real root.

Comparisons are decided exactly.  Equality reduces to the zero coefficient
vector; the sign of a nonzero element is obtained by refining the isolating
interval with exact bisection until the interval evaluation of the element
excludes zero.  Because the defining polynomial has no rational roots, the
bisection midpoints never land on a root, so refinement always makes
progress; because a nonzero element of a genuine field has a nonzero real
image, the loop terminates.  If the user supplies a reducible polynomial and
an element whose real image happens to vanish, the degeneracy is detected
symbolically (gcd with the defining polynomial) and reported as an error
rather than silently mis-ordered.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import (
    DivisionByZero,
    InvalidNumberField,
    MixedFieldContexts,
    ReducibleMinimalPolynomial,
)
from .polynomials import (
    IntPoly,
    count_real_roots,
    is_squarefree,
    poly_divmod,
    poly_eval,
    poly_gcd,
    poly_mul,
    poly_sub,
    poly_trim,
    sturm_sequence,
)

_MAX_REFINE = 4096

DEFAULT_DEGREE_CAP = 8


def _interval_eval(coeffs, lo, hi):
    """Range enclosure of a polynomial over [lo, hi] by interval Horner."""
    mn = mx = Fraction(coeffs[-1]) if coeffs else Fraction(0)
    for c in reversed(coeffs[:-1]):
        candidates = (mn * lo, mn * hi, mx * lo, mx * hi)
        mn, mx = min(candidates) + c, max(candidates) + c
    return mn, mx


class NumberField:
    """Real algebraic context Q(alpha) with a certified isolated root.

    The defining polynomial is normalized to a monic integer polynomial
    (denominators cleared, content divided out).  Irreducibility is not
    verified beyond squarefreeness and a rational-root scan; the isolating
    interval keeps every comparison sound for genuinely irreducible inputs.
    """

    __slots__ = ("poly", "degree", "iso", "_lo", "_hi", "_sign_lo", "_sturm", "_powers")

    def __init__(self, coeffs, isolating_interval, degree_cap=DEFAULT_DEGREE_CAP):
        cleared = [Fraction(c) for c in coeffs]
        cleared = poly_trim(cleared)
        if not cleared:
            raise InvalidNumberField("defining polynomial is zero")
        denom = 1
        for c in cleared:
            denom = denom * c.denominator // _gcd(denom, c.denominator)
        ints = [int(c * denom) for c in cleared]
        content = 0
        for c in ints:
            content = _gcd(content, abs(c))
        ints = [c // content for c in ints]
        if ints[-1] < 0:
            ints = [-c for c in ints]
        if ints[-1] != 1:
            raise InvalidNumberField(
                "polynomial is not monic after clearing content: %s" % (ints,)
            )
        self.poly = tuple(ints)
        self.degree = len(ints) - 1
        if self.degree < 2:
            raise InvalidNumberField("degree must be at least 2")
        if self.degree > degree_cap:
            raise InvalidNumberField(
                "degree %d exceeds cap %d" % (self.degree, degree_cap)
            )
        if not is_squarefree(self.poly):
            raise InvalidNumberField("polynomial is not squarefree")
        if IntPoly(self.poly).integer_roots():
            raise InvalidNumberField("polynomial has a rational root, so is reducible")
        lo, hi = (Fraction(isolating_interval[0]), Fraction(isolating_interval[1]))
        if not lo < hi:
            raise InvalidNumberField("isolating interval is empty")
        s_lo = poly_eval(self.poly, lo)
        s_hi = poly_eval(self.poly, hi)
        if s_lo == 0 or s_hi == 0 or (s_lo > 0) == (s_hi > 0):
            raise InvalidNumberField("no sign change over the isolating interval")
        self._sturm = sturm_sequence(self.poly)
        if count_real_roots(self.poly, lo, hi, self._sturm) != 1:
            raise InvalidNumberField("isolating interval does not contain exactly one root")
        self.iso = (lo, hi)
        self._lo, self._hi = lo, hi
        self._sign_lo = 1 if s_lo > 0 else -1
        # x^degree .. x^(2*degree-2) reduced mod poly, for multiplication
        powers = []
        current = [Fraction(-c) for c in self.poly[:-1]]
        powers.append(tuple(current))
        for _ in range(self.degree - 2):
            shifted = [Fraction(0)] + current[:-1]
            top = current[-1]
            current = [s - top * self.poly[i] for i, s in enumerate(shifted)]
            powers.append(tuple(current))
        self._powers = tuple(powers)

    def key(self):
        return (self.poly, self.iso)

    def __eq__(self, other):
        return isinstance(other, NumberField) and self.key() == other.key()

    def __hash__(self):
        return hash(("NumberField", self.key()))

    def __repr__(self):
        return "NumberField(%s, iso=(%s, %s))" % (
            IntPoly(self.poly).text("x"),
            self.iso[0],
            self.iso[1],
        )

    def interval(self):
        """Current refined interval; shrinks monotonically, always isolates alpha."""
        return self._lo, self._hi

    def refine(self):
        mid = (self._lo + self._hi) / 2
        v = poly_eval(self.poly, mid)
        # no rational roots, so v != 0
        if (v > 0) == (self._sign_lo > 0):
            self._lo = mid
        else:
            self._hi = mid

    def alpha(self):
        return Scalar(self, (Fraction(0), Fraction(1)) + (Fraction(0),) * (self.degree - 2))

    def element(self, coeffs):
        vec = [Fraction(c) for c in coeffs]
        if len(vec) > self.degree:
            raise ValueError("coefficient vector longer than field degree")
        vec += [Fraction(0)] * (self.degree - len(vec))
        return Scalar(self, tuple(vec))

    def reduce(self, raw):
        """Reduce a raw product vector (length <= 2*degree-1) mod the polynomial."""
        vec = list(raw) + [Fraction(0)] * max(0, (2 * self.degree - 1) - len(raw))
        out = list(vec[: self.degree])
        for k in range(self.degree, 2 * self.degree - 1):
            c = vec[k]
            if c == 0:
                continue
            power = self._powers[k - self.degree]
            for i in range(self.degree):
                out[i] += c * power[i]
        return tuple(out)


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return abs(a)


class Scalar:
    """Exact number: a rational, or an element of one NumberField context.

    Immutable and hashable in canonical form: an algebraic element whose
    higher coefficients all vanish collapses to the plain rational, so equal
    values hash equally and orbit lookups behave.
    """

    __slots__ = ("field", "coeffs")

    def __init__(self, field, coeffs):
        if field is not None and all(c == 0 for c in coeffs[1:]):
            field, coeffs = None, (coeffs[0],)
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "coeffs", tuple(coeffs))

    def __setattr__(self, name, value):
        raise AttributeError("Scalar is immutable")

    # -- classification ---------------------------------------------------

    @property
    def is_rational(self):
        return self.field is None

    def as_fraction(self):
        if self.field is not None:
            raise ValueError("not a rational scalar")
        return self.coeffs[0]

    @property
    def is_integer(self):
        return self.field is None and self.coeffs[0].denominator == 1

    # -- arithmetic --------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, Scalar):
            return other
        if isinstance(other, (int, Fraction)):
            return Scalar(None, (Fraction(other),))
        return None

    @staticmethod
    def _join(a, b):
        """Common field context, lifting rationals; distinct fields are an error."""
        if a.field is None and b.field is None:
            return None, a.coeffs, b.coeffs
        field = a.field or b.field
        if a.field is not None and b.field is not None and a.field != b.field:
            raise MixedFieldContexts(
                "operands live in different number fields: %r vs %r" % (a.field, b.field)
            )
        pad = lambda s: s.coeffs + (Fraction(0),) * (field.degree - len(s.coeffs))
        return field, pad(a), pad(b)

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        field, a, b = Scalar._join(self, other)
        return Scalar(field, tuple(x + y for x, y in zip(a, b)))

    __radd__ = __add__

    def __neg__(self):
        return Scalar(self.field, tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        field, a, b = Scalar._join(self, other)
        if field is None:
            return Scalar(None, (a[0] * b[0],))
        raw = [Fraction(0)] * (2 * field.degree - 1)
        for i, x in enumerate(a):
            if x == 0:
                continue
            for j, y in enumerate(b):
                raw[i + j] += x * y
        return Scalar(field, field.reduce(raw))

    __rmul__ = __mul__

    def inverse(self):
        if self.is_zero:
            raise DivisionByZero("division by zero scalar")
        if self.field is None:
            return Scalar(None, (1 / self.coeffs[0],))
        g = poly_trim(self.coeffs)
        m = self.field.poly
        # extended Euclid over Q[x]: s*g + t*m = r
        r0, r1 = g, poly_trim(m)
        s0, s1 = (Fraction(1),), ()
        while r1:
            q, r = poly_divmod(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, poly_sub(s0, poly_mul(q, s1))
        if len(r0) - 1 > 0:
            raise ReducibleMinimalPolynomial(
                "element is a zero divisor; the defining polynomial is reducible"
            )
        unit = Fraction(r0[0])
        inv = tuple(Fraction(c) / unit for c in s0)
        return self.field.element(inv)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if other.field is None:
            if other.coeffs[0] == 0:
                raise DivisionByZero("division by zero scalar")
            return self * Scalar(None, (1 / other.coeffs[0],))
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other / self

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        out = Scalar(None, (Fraction(1),))
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __abs__(self):
        return -self if self.sign() < 0 else self

    # -- comparison --------------------------------------------------------

    @property
    def is_zero(self):
        return self.field is None and self.coeffs[0] == 0

    def sign(self):
        if self.field is None:
            c = self.coeffs[0]
            return 0 if c == 0 else (1 if c > 0 else -1)
        g = poly_trim(self.coeffs)
        for step in range(_MAX_REFINE):
            lo, hi = self.field.interval()
            mn, mx = _interval_eval(g, lo, hi)
            if mn > 0:
                return 1
            if mx < 0:
                return -1
            if step == 64:
                # refinement is stalling: rule out a zero real image (possible
                # only when the defining polynomial is reducible)
                shared = poly_gcd(g, self.field.poly)
                if len(shared) - 1 > 0 and count_real_roots(shared, lo, hi) >= 1:
                    raise ReducibleMinimalPolynomial(
                        "element has zero real image but nonzero coefficients; "
                        "the defining polynomial is reducible"
                    )
            self.field.refine()
        raise ReducibleMinimalPolynomial("sign refinement did not converge")

    def __eq__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if self.field is None and other.field is None:
            return self.coeffs[0] == other.coeffs[0]
        try:
            field, a, b = Scalar._join(self, other)
        except MixedFieldContexts:
            return False
        return a == b

    def __hash__(self):
        if self.field is None:
            return hash(("Scalar", self.coeffs[0]))
        return hash(("Scalar", self.field.key(), self.coeffs))

    def compare(self, other):
        other = self._coerce(other)
        if other is None:
            raise TypeError("cannot compare Scalar with %r" % (other,))
        if self.field is None and other.field is None:
            a, b = self.coeffs[0], other.coeffs[0]
            return 0 if a == b else (-1 if a < b else 1)
        if self == other:
            return 0
        return (self - other).sign()

    def __lt__(self, other):
        return self.compare(other) < 0

    def __le__(self, other):
        return self.compare(other) <= 0

    def __gt__(self, other):
        return self.compare(other) > 0

    def __ge__(self, other):
        return self.compare(other) >= 0

    # -- rounding ----------------------------------------------------------

    def floor(self):
        if self.field is None:
            return self.coeffs[0].numerator // self.coeffs[0].denominator
        for _ in range(_MAX_REFINE):
            lo, hi = self.field.interval()
            mn, mx = _interval_eval(poly_trim(self.coeffs), lo, hi)
            k_lo = mn.numerator // mn.denominator
            k_hi = mx.numerator // mx.denominator
            if k_lo == k_hi:
                return k_lo
            if k_hi - k_lo == 1:
                # value irrational unless degenerate; settle by exact sign
                s = (self - k_hi).sign()
                return k_hi if s > 0 else k_lo
            self.field.refine()
        raise ReducibleMinimalPolynomial("floor refinement did not converge")

    def enclosure(self, tol=Fraction(1, 10**6)):
        """Rational interval [lo, hi] containing the value, of width <= tol."""
        if self.field is None:
            return self.coeffs[0], self.coeffs[0]
        g = poly_trim(self.coeffs)
        for _ in range(_MAX_REFINE):
            lo, hi = self.field.interval()
            mn, mx = _interval_eval(g, lo, hi)
            if mx - mn <= tol:
                return mn, mx
            self.field.refine()
        raise ReducibleMinimalPolynomial("enclosure refinement did not converge")

    # -- text forms ----------------------------------------------------------

    def text(self):
        if self.field is None:
            return str(self.coeffs[0])
        poly = ",".join(str(c) for c in self.field.poly)
        iso = "%s,%s" % self.field.iso
        elem = ",".join(str(c) for c in self.coeffs)
        return "poly:[%s]; iso:[%s]; elem:[%s]" % (poly, iso, elem)

    def __repr__(self):
        return "Scalar(%s)" % self.text()

    def __float__(self):
        if self.field is None:
            return float(self.coeffs[0])
        for _ in range(60):
            self.field.refine()
        lo, hi = self.field.interval()
        mn, mx = _interval_eval(poly_trim(self.coeffs), lo, hi)
        return float((mn + mx) / 2)


ZERO = Scalar(None, (Fraction(0),))
ONE = Scalar(None, (Fraction(1),))


def rational(p, q=1):
    return Scalar(None, (Fraction(p, q),))


def as_scalar(x, field=None):
    """Coerce ints, Fractions, and Scalars; ``field`` only fills in context checks."""
    if isinstance(x, Scalar):
        return x
    if isinstance(x, (int, Fraction)):
        return Scalar(None, (Fraction(x),))
    if isinstance(x, str):
        return scalar_from_text(x, field)
    raise TypeError("cannot interpret %r as a Scalar" % (x,))


def common_field(*values):
    """The unique NumberField context among values, or None if all rational."""
    field = None
    for v in values:
        if isinstance(v, Scalar) and v.field is not None:
            if field is None:
                field = v.field
            elif field != v.field:
                raise MixedFieldContexts("values mix distinct number fields")
    return field


def _parse_bracketed(text, label):
    text = text.strip()
    if not (text.startswith(label + ":[") and text.endswith("]")):
        raise ValueError("expected %s:[...] in scalar text" % label)
    inner = text[len(label) + 2 : -1]
    if not inner.strip():
        return []
    return [Fraction(part.strip()) for part in inner.split(",")]


def scalar_from_text(text, field=None):
    """Parse 'p/q', 'p', or 'poly:[...]; iso:[...]; elem:[...]'."""
    text = text.strip()
    if text.startswith("poly:"):
        parts = [p for p in text.split(";") if p.strip()]
        if len(parts) != 3:
            raise ValueError("algebraic scalar text needs poly, iso, elem parts")
        poly = _parse_bracketed(parts[0], "poly")
        iso = _parse_bracketed(parts[1], "iso")
        elem = _parse_bracketed(parts[2], "elem")
        if len(iso) != 2:
            raise ValueError("iso part must have two entries")
        parsed = NumberField(poly, (iso[0], iso[1]))
        if field is not None and field != parsed:
            raise MixedFieldContexts("scalar text declares a different field")
        return parsed.element(elem)
    return Scalar(None, (Fraction(text),))
