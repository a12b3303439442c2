"""Rigorous topological entropy enclosures via Perron roots.

For Markov maps the entropy is the log of the spectral radius of the
incidence matrix, enclosed by exact bisection on the characteristic
polynomial (largest real root, tracked with Sturm counts so other real roots
cannot mislead the bisection).  Degree-one and degree-two factors are solved
exactly, so the examples at this scale come out as exact scalars.  Maps with
uniform absolute slope and certified transitivity get the exact value from
the slope; everything else is reported unknown rather than estimated.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .polynomials import IntPoly, count_real_roots, sturm_sequence
from .scalar import NumberField, Scalar, as_scalar
from .snf import char_poly
from .markov import _strongly_connected_components, check_zero_one


def _largest_real_root(p: IntPoly, hi_bound: Fraction, tol: Fraction):
    """Enclosure (lo, hi) of the largest real root of p in (0, hi_bound].

    Returns (lo, hi, exact) where exact is a Scalar when the root was
    identified exactly, else None.  Assumes p is monic with a real root >= 1.
    """
    q = p.squarefree_part()
    if q(hi_bound) == 0:
        s = as_scalar(hi_bound)
        return hi_bound, hi_bound, s
    seq = sturm_sequence(q.coeffs)
    lo, hi = Fraction(0), Fraction(hi_bound)
    assert count_real_roots(q.coeffs, lo, hi, seq) >= 1
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if q(mid) == 0:
            return mid, mid, as_scalar(mid)
        if count_real_roots(q.coeffs, mid, hi, seq) >= 1:
            lo = mid
        else:
            hi = mid
    exact = _identify_exact(q, lo, hi)
    return lo, hi, exact


def _identify_exact(q: IntPoly, lo: Fraction, hi: Fraction):
    g = q
    for r in q.integer_roots():
        if lo <= r <= hi:
            return as_scalar(r)
        g = g.deflate_root(r)
    if g.degree == 2 and g(lo) != 0 and g(hi) != 0 and (g(lo) > 0) != (g(hi) > 0):
        try:
            return NumberField(g.coeffs, (lo, hi)).alpha()
        except Exception:
            return None
    return None


def perron_enclosure(A, tol=Fraction(1, 10**6)):
    """Enclosure of the spectral radius of a zero-one matrix.

    Reducible matrices are handled per strongly connected component and the
    maximum taken.  Returns (s_lo, s_hi, exact_scalar_or_None).
    """
    n = check_zero_one(A)
    tol = Fraction(tol)
    if tol <= 0:
        raise ValueError("tol must be positive")
    comps = _strongly_connected_components(A)
    best = (Fraction(0), Fraction(0), as_scalar(0))
    for comp in comps:
        sub = [[A[i][j] for j in comp] for i in comp]
        if all(x == 0 for row in sub for x in row):
            continue
        p = char_poly(sub)
        bound = max(sum(row) for row in sub)
        lo, hi, exact = _largest_real_root(p, Fraction(bound), tol)
        if lo > best[0]:
            best = (lo, hi, exact)
    return best


@dataclass
class EntropyReport:
    method: str  # perron_markov | uniform_slope | unknown
    s_lo: Fraction | None
    s_hi: Fraction | None
    exact_s: Scalar | None
    notes: list

    def as_dict(self):
        return {
            "method": self.method,
            "s_enclosure": None
            if self.s_lo is None
            else [str(self.s_lo), str(self.s_hi)],
            "exact_s": None if self.exact_s is None else self.exact_s.text(),
            "entropy_note": self.entropy_note(),
            "notes": list(self.notes),
        }

    def entropy_note(self):
        if self.method == "unknown":
            return "unknown"
        if self.exact_s is not None:
            return "ln %s" % self.exact_s.text()
        return "ln s for s in [%s, %s]" % (self.s_lo, self.s_hi)


def uniform_abs_slope(m):
    """The common |slope| of all branches, or None."""
    slopes = []
    for b in m.branches:
        s = b.slope if b.slope.sign() > 0 else -b.slope
        slopes.append(s)
    first = slopes[0]
    if all(s == first for s in slopes[1:]):
        return first
    return None


def entropy_report(m, flags, markov_data=None, tol=Fraction(1, 10**6)):
    """Entropy enclosure with trace/KMS annotations when the hypotheses hold."""
    notes = []
    report = None
    if markov_data is not None:
        lo, hi, exact = perron_enclosure(markov_data.matrix, tol)
        report = EntropyReport("perron_markov", lo, hi, exact, notes)
    else:
        s = uniform_abs_slope(m)
        if s is not None and flags.transitive:
            lo, hi = s.enclosure(tol)
            report = EntropyReport("uniform_slope", lo, hi, s, notes)
        else:
            report = EntropyReport("unknown", None, None, None, notes)
    if flags.transitive and not flags.essentially_injective:
        h = report.entropy_note()
        if h != "unknown":
            notes.append(
                "unique trace on the core algebra, scaled by exp(-h) with h = %s" % h
            )
            notes.append("unique KMS state at inverse temperature h = %s" % h)
    return report
