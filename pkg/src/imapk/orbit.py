"""Forward orbits, the critical closure, and orbit-disjointness checks.

Orbits under the multivalued map branch at partition points: both one-sided
limit values are followed, each as its own thread, and the result is the
union.  Eventual periodicity is detected by exact revisit lookup (scalars are
canonical and hashable), never by floating shadows.

The ``ProvablyInfinite`` status carries a machine-checkable certificate: when
every branch slope has the same reduced denominator q > 1 and every intercept
denominator is a power of q, any rational iterate whose reduced denominator
is a power of q large enough (at least q^{e} for the largest intercept
exponent e, and larger than every partition denominator) has all later
iterates with strictly growing pure q-power denominators.  Such an orbit
never revisits a point and never lands on a partition point, so it is
infinite; the cap result is upgraded to a theorem.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from .errors import NotAnExchangeMap, OutOfDomain
from .interval_map import PLUS
from .scalar import ONE, ZERO, Scalar, as_scalar
from . import interval_map as imap


@dataclass(frozen=True)
class Closed:
    preperiod: int | None
    period: int | None
    branched: bool = False

    kind = "closed"


@dataclass(frozen=True)
class CapReached:
    cap: int

    kind = "cap_reached"


@dataclass(frozen=True)
class ProvablyInfinite:
    reason: str
    witness: str

    kind = "provably_infinite"


@dataclass
class OrbitResult:
    seed: Scalar
    points: list
    status: object
    edges: list = field(default_factory=list)

    def as_dict(self):
        d = {
            "seed": self.seed.text(),
            "points": [p.text() for p in self.points],
            "edges": [list(e) for e in self.edges],
            "status": {"kind": self.status.kind},
        }
        if isinstance(self.status, Closed):
            d["status"]["preperiod"] = self.status.preperiod
            d["status"]["period"] = self.status.period
            d["status"]["branched"] = self.status.branched
        elif isinstance(self.status, CapReached):
            d["status"]["cap"] = self.status.cap
        elif isinstance(self.status, ProvablyInfinite):
            d["status"]["reason"] = self.status.reason
            d["status"]["witness"] = self.status.witness
        return d


# Point coordinates whose denominators pass this size stop the search early:
# a revisit would need matching denominators, so nothing is learned by pushing
# arbitrarily large exact numbers further, and the honest answer is the cap.
MAX_COEFF_BITS = 4096


def _oversized(x, max_bits=MAX_COEFF_BITS):
    for c in x.coeffs:
        if c.denominator.bit_length() > max_bits or c.numerator.bit_length() > max_bits:
            return True
    return False


class _GrowthCertificate:
    """Map-level data for the denominator-growth certificate, or inapplicable."""

    def __init__(self, m):
        self.ok = False
        q = None
        e_max = 0
        for b in m.branches:
            if not (b.slope.is_rational and b.intercept.is_rational):
                return
            sq = abs(b.slope.as_fraction()).denominator
            if sq <= 1:
                return
            if q is None:
                q = sq
            elif q != sq:
                return
            d = b.intercept.as_fraction().denominator
            e = 0
            while d % q == 0:
                d //= q
                e += 1
            if d != 1:
                return
            e_max = max(e_max, e)
        if q is None:
            return
        part_denoms = [p.as_fraction().denominator for p in m.partition if p.is_rational]
        if len(part_denoms) != len(m.partition):
            return
        self.ok = True
        self.q = q
        self.e_max = e_max
        self.min_power = max(q**e_max, max(part_denoms) + 1)

    def certifies(self, x):
        """True when all later iterates of x provably have growing denominators."""
        if not self.ok or not x.is_rational:
            return False
        d = x.as_fraction().denominator
        if d < self.min_power:
            return False
        while d % self.q == 0:
            d //= self.q
        return d == 1


def _certificate_witness(m, x, steps=10):
    """Recheck: the next few iterates in lowest terms have strictly growing denominators."""
    denoms = [x.as_fraction().denominator]
    cur = x
    for _ in range(steps):
        vals = imap.eval_multivalued(m, cur)
        assert len(vals) == 1, "certified points never sit on partition points"
        cur = vals[0]
        denoms.append(cur.as_fraction().denominator)
    assert all(a < b for a, b in zip(denoms, denoms[1:]))
    return "denominators %s..." % (denoms[: min(6, len(denoms))],)


def forward_orbit(m, x, cap=10000):
    """Forward orbit under the multivalued map, following every limit-value thread."""
    x = as_scalar(x)
    if x < ZERO or x > ONE:
        raise OutOfDomain("%s is outside [0,1]" % x.text())
    cert = _GrowthCertificate(m)
    seen = {x: 0}
    points = [x]
    succ = {}
    edges = []
    queue = [x]
    branched = False
    while queue:
        if len(points) > cap:
            return OrbitResult(x, points, CapReached(cap), edges)
        p = queue.pop(0)
        if _oversized(p):
            return OrbitResult(x, points, CapReached(len(points)), edges)
        if cert.certifies(p):
            return OrbitResult(
                x,
                points,
                ProvablyInfinite(
                    "denominator-growth: slopes with reduced denominator %d "
                    "force strictly increasing q-power denominators" % cert.q,
                    _certificate_witness(m, p),
                ),
                edges,
            )
        values = imap.eval_multivalued(m, p)
        if len(values) > 1:
            branched = True
        succ[p] = values
        for v in values:
            if v not in seen:
                seen[v] = len(points)
                points.append(v)
                queue.append(v)
            edges.append((seen[p], seen[v]))
    status = _closed_status(x, points, succ, branched)
    return OrbitResult(x, points, status, edges)


def _closed_status(seed, points, succ, branched):
    if branched:
        return Closed(None, None, branched=True)
    # linear orbit: walk until first revisit
    order = [seed]
    index = {seed: 0}
    cur = seed
    while True:
        nxt = succ[cur][0]
        if nxt in index:
            k = index[nxt]
            return Closed(k, len(order) - k, branched=False)
        index[nxt] = len(order)
        order.append(nxt)
        cur = nxt


def step_right_continuous(m, x):
    """Single-valued step: right-continuous at interior points, left limit at 1."""
    if x == ONE:
        return m.branches[-1](x)
    i = m.branch_index_at(x, PLUS)
    return m.branches[i](x)


def tau_orbit(m, x, cap=10000):
    """Single-valued orbit under the right-continuous convention.

    Returns (points, status) where points are the distinct iterates in order.
    """
    x = as_scalar(x)
    if x < ZERO or x > ONE:
        raise OutOfDomain("%s is outside [0,1]" % x.text())
    cert = _GrowthCertificate(m)
    points = [x]
    index = {x: 0}
    cur = x
    while len(points) <= cap:
        if _oversized(cur):
            return points, CapReached(len(points))
        if cert.certifies(cur) and cur not in m.partition:
            return points, ProvablyInfinite(
                "denominator-growth certificate (reduced denominators are "
                "strictly increasing powers of %d)" % cert.q,
                _certificate_witness(m, cur),
            )
        nxt = step_right_continuous(m, cur)
        if nxt in index:
            k = index[nxt]
            return points, Closed(k, len(points) - k)
        index[nxt] = len(points)
        points.append(nxt)
        cur = nxt
    return points, CapReached(cap)


def reverify_closed(m, points, status):
    """Check a Closed result by direct iteration through the branch maps."""
    if not isinstance(status, Closed) or status.preperiod is None:
        return False
    k, p = status.preperiod, status.period
    cur = points[k]
    for _ in range(p):
        cur = step_right_continuous(m, cur)
    return cur == points[k]


@dataclass
class CriticalClosure:
    points: list
    complete: bool
    certificate: ProvablyInfinite | None = None

    def as_dict(self):
        return {
            "points": [p.text() for p in sorted(self.points)],
            "complete": self.complete,
            "infinite_certificate": None
            if self.certificate is None
            else {"reason": self.certificate.reason, "witness": self.certificate.witness},
        }


def critical_closure(m, cap=10000):
    """Close the partition points under all one-sided limit values.

    ``complete`` is the Markov criterion used downstream: the forward closure
    of the critical set is finite and was reached within the cap.
    """
    cert = _GrowthCertificate(m)
    points = list(m.partition)
    seen = set(points)
    queue = list(points)
    while queue:
        if len(seen) > cap:
            return CriticalClosure(sorted(seen), False)
        p = queue.pop(0)
        if _oversized(p):
            return CriticalClosure(sorted(seen), False)
        if cert.certifies(p):
            return CriticalClosure(
                sorted(seen),
                False,
                ProvablyInfinite(
                    "denominator-growth certificate", _certificate_witness(m, p)
                ),
            )
        for v in imap.eval_multivalued(m, p):
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return CriticalClosure(sorted(seen), True)


def is_exchange_map(m):
    """All slopes positive and the branch images tile [0,1]."""
    if any(not b.increasing for b in m.branches):
        return False
    images = sorted((b.image() for b in m.branches), key=lambda iv: iv[0])
    cursor = ZERO
    for lo, hi in images:
        if lo != cursor:
            return False
        cursor = hi
    return cursor == ONE


@dataclass
class IdocHolds:
    cap: int
    provably_infinite: bool = False

    @property
    def kind(self):
        if self.provably_infinite:
            return "provably_infinite_and_disjoint_up_to_cap"
        return "holds_up_to_cap"


@dataclass
class IdocFails:
    witness: str

    kind = "fails"


def idoc_check(m, cap=1000):
    """Disjointness and non-periodicity of the interior partition point orbits.

    Uses true single-valued orbits under the right-continuous convention.
    """
    if not is_exchange_map(m):
        raise NotAnExchangeMap(
            "map is not a generalized interval exchange (increasing bijective)"
        )
    interior = list(m.partition[1:-1])
    owner = {}
    orbits = []
    statuses = []
    for idx, a in enumerate(interior):
        points, status = tau_orbit(m, a, cap)
        if isinstance(status, Closed):
            return IdocFails(
                "orbit of %s is eventually periodic (preperiod %d, period %d)"
                % (a.text(), status.preperiod, status.period)
            )
        for p in points:
            if p in owner:
                return IdocFails(
                    "orbits of %s and %s collide at %s"
                    % (interior[owner[p]].text(), a.text(), p.text())
                )
            owner[p] = idx
        orbits.append(points)
        statuses.append(status)
    provable = all(isinstance(s, ProvablyInfinite) for s in statuses)
    return IdocHolds(cap, provably_infinite=provable)
