"""Markov structure: detection, incidence matrices, graph flags, itineraries.

The canonical Markov partition is the sorted critical closure (the finest
choice).  Coarser user-supplied partitions are accepted after validation and
must produce the same K-groups, which the tests exercise.  The incidence
convention is A[i][j] = 1 iff the image of the i-th open interval contains
the j-th open interval.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from math import gcd

from .errors import (
    InvalidMarkovPartition,
    LengthExceedsCap,
    NotSquare,
    NotZeroOne,
)
from .interval_map import (
    MINUS,
    PLUS,
    Certificate,
    CutPoint,
    eval_multivalued,
    merge_closed_intervals,
)
from .orbit import critical_closure
from .scalar import ONE, ZERO, as_scalar


@dataclass
class MarkovData:
    partition: tuple
    matrix: list
    branch_for_interval: tuple
    canonical: bool = True

    @property
    def size(self):
        return len(self.matrix)

    def interval(self, j):
        """Endpoints of the j-th Markov interval, 1-based."""
        return self.partition[j - 1], self.partition[j]

    def as_dict(self):
        return {
            "partition": [p.text() for p in self.partition],
            "matrix": [list(row) for row in self.matrix],
            "canonical": self.canonical,
        }


@dataclass
class NotMarkovWithinCap:
    cap: int

    kind = "not_markov_within_cap"


@dataclass
class ProvablyNotMarkov:
    reason: str
    witness: str

    kind = "provably_not_markov"


def detect_markov(m, cap=10000):
    """Detect Markov structure through the critical closure."""
    cc = critical_closure(m, cap)
    if cc.certificate is not None:
        return ProvablyNotMarkov(cc.certificate.reason, cc.certificate.witness)
    if not cc.complete:
        return NotMarkovWithinCap(cap)
    return _markov_from_points(m, sorted(cc.points), canonical=True)


def _locate(points, x):
    i = bisect.bisect_left(points, x)
    if i >= len(points) or points[i] != x:
        raise InvalidMarkovPartition("%s is not a partition point" % x.text())
    return i


def _markov_from_points(m, points, canonical):
    size = len(points) - 1
    matrix = [[0] * size for _ in range(size)]
    branch_for_interval = []
    for j in range(1, size + 1):
        lo, hi = points[j - 1], points[j]
        bi = m.branch_index_at(lo, PLUS)
        b = m.branches[bi]
        if not (b.lo <= lo and hi <= b.hi):
            raise InvalidMarkovPartition(
                "interval (%s, %s) is not inside one branch" % (lo.text(), hi.text())
            )
        branch_for_interval.append(bi)
        u, v = b(lo), b(hi)
        img_lo, img_hi = (u, v) if u <= v else (v, u)
        a = _locate(points, img_lo)
        c = _locate(points, img_hi)
        for k in range(a + 1, c + 1):
            matrix[j - 1][k - 1] = 1
    data = MarkovData(tuple(points), matrix, tuple(branch_for_interval), canonical)
    _verify_row_images(m, data)
    return data


def _verify_row_images(m, data):
    """Closure of each interval image must equal the union its row selects."""
    for j in range(1, data.size + 1):
        lo, hi = data.interval(j)
        b = m.branches[data.branch_for_interval[j - 1]]
        u, v = b(lo), b(hi)
        img = (u, v) if u <= v else (v, u)
        selected = [
            (data.partition[k], data.partition[k + 1])
            for k in range(data.size)
            if data.matrix[j - 1][k]
        ]
        merged = merge_closed_intervals(selected)
        assert merged == [img], "row-image law violated for interval %d" % j


def markov_for_partition(m, points, cap=10000):
    """Validate a user-supplied (possibly coarser) Markov partition.

    Checks: endpoints 0 and 1; points inside the forward closure of the
    critical set (or mapping into it); monotonicity across each interval;
    images aligned with partition points; the critical set eventually
    trapped in the partition point set.
    """
    points = sorted(as_scalar(p) for p in points)
    if not points or points[0] != ZERO or points[-1] != ONE:
        raise InvalidMarkovPartition("partition must run from 0 to 1")
    if len(set(points)) != len(points):
        raise InvalidMarkovPartition("partition points must be distinct")
    cc = critical_closure(m, cap)
    if not cc.complete:
        raise InvalidMarkovPartition("critical closure is not finite within cap")
    closure = set(cc.points)
    for p in points:
        if p in closure:
            continue
        # membership in the generalized orbit via a forward iterate landing in it
        seen = {p}
        frontier = [p]
        hit = False
        for _ in range(cap):
            nxt = []
            for x in frontier:
                for v in eval_multivalued(m, x):
                    if v in closure:
                        hit = True
                    if v not in seen:
                        seen.add(v)
                        nxt.append(v)
            if hit or not nxt:
                break
            frontier = nxt
        if not hit:
            raise InvalidMarkovPartition(
                "%s is not in the generalized orbit of the critical set" % p.text()
            )
    pset = set(points)
    size = len(points) - 1
    matrix = [[0] * size for _ in range(size)]
    branch_for_interval = []
    for j in range(1, size + 1):
        lo, hi = points[j - 1], points[j]
        sub = [
            b
            for b in m.branches
            if b.lo < hi and lo < b.hi
        ]
        signs = {b.slope.sign() for b in sub}
        if len(signs) != 1:
            raise InvalidMarkovPartition(
                "map is not monotonic on (%s, %s)" % (lo.text(), hi.text())
            )
        sign = signs.pop()
        # monotone across interior jumps: pieces in increasing domain order must
        # have images in weakly monotone order
        prev_hi = None
        pieces = []
        for b in sorted(sub, key=lambda b: b.lo):
            clo = lo if lo > b.lo else b.lo
            chi = hi if hi < b.hi else b.hi
            u, v = b(clo), b(chi)
            pieces.append((u, v) if u <= v else (v, u))
        ordered = pieces if sign > 0 else list(reversed(pieces))
        for (u1, v1), (u2, v2) in zip(ordered, ordered[1:]):
            if not v1 <= u2:
                raise InvalidMarkovPartition(
                    "map is not monotonic on (%s, %s)" % (lo.text(), hi.text())
                )
        merged = merge_closed_intervals(pieces)
        for u, v in merged:
            if u not in pset or v not in pset:
                raise InvalidMarkovPartition(
                    "image of (%s, %s) is not aligned with the partition"
                    % (lo.text(), hi.text())
                )
            a, c = _locate(points, u), _locate(points, v)
            for k in range(a + 1, c + 1):
                matrix[j - 1][k - 1] = 1
        branch_for_interval.append(
            m.branch_index_at(lo, PLUS) if len(sub) == 1 else None
        )
    # the critical set must be eventually trapped in the partition point set
    current = set(m.partition)
    trapped = False
    for _ in range(4 * len(closure) * len(closure) + 8):
        if current <= pset:
            trapped = True
            break
        current = {v for x in current for v in eval_multivalued(m, x)}
    if not trapped:
        raise InvalidMarkovPartition(
            "forward images of the critical set never enter the partition set"
        )
    return MarkovData(tuple(points), matrix, tuple(branch_for_interval), canonical=False)


# -- graph flags ------------------------------------------------------------


@dataclass
class GraphFlags:
    irreducible: bool
    primitive: bool
    permutation: bool
    condition_L: bool
    period: int
    component_periods: list
    eventual_range: list

    def as_dict(self):
        return {
            "irreducible": self.irreducible,
            "primitive": self.primitive,
            "permutation": self.permutation,
            "condition_L": self.condition_L,
            "period": self.period,
            "component_periods": list(self.component_periods),
            "eventual_range": [j + 1 for j in self.eventual_range],
        }


def check_zero_one(A):
    n = len(A)
    for row in A:
        if len(row) != n:
            raise NotSquare("matrix is not square")
        for x in row:
            if x not in (0, 1):
                raise NotZeroOne("matrix entries must be 0 or 1")
    return n


def _strongly_connected_components(A):
    """Tarjan, iterative; returns components as lists of vertices."""
    n = len(A)
    adj = [[j for j in range(n) if A[i][j]] for i in range(n)]
    index = [None] * n
    low = [0] * n
    on_stack = [False] * n
    stack = []
    components = []
    counter = [0]
    for root in range(n):
        if index[root] is not None:
            continue
        work = [(root, 0)]
        while work:
            v, pi = work[-1]
            if pi == 0:
                index[v] = low[v] = counter[0]
                counter[0] += 1
                stack.append(v)
                on_stack[v] = True
            advanced = False
            while pi < len(adj[v]):
                w = adj[v][pi]
                pi += 1
                if index[w] is None:
                    work[-1] = (v, pi)
                    work.append((w, 0))
                    advanced = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                components.append(sorted(comp))
            if work:
                u, _ = work[-1]
                low[u] = min(low[u], low[v])
    return components


def _component_period(A, comp):
    """gcd of cycle lengths within one strongly connected component (0 if acyclic)."""
    cset = set(comp)
    has_edge = any(A[i][j] for i in comp for j in comp)
    if not has_edge:
        return 0
    root = comp[0]
    dist = {root: 0}
    queue = [root]
    g = 0
    while queue:
        v = queue.pop(0)
        for w in range(len(A)):
            if A[v][w] and w in cset:
                if w not in dist:
                    dist[w] = dist[v] + 1
                    queue.append(w)
                else:
                    g = gcd(g, dist[v] + 1 - dist[w])
    return abs(g)


def _condition_L(A):
    """No cycle all of whose vertices have out-degree exactly one."""
    n = len(A)
    out_deg = [sum(row) for row in A]
    nxt = {}
    for v in range(n):
        if out_deg[v] == 1:
            nxt[v] = A[v].index(1)
    for start in nxt:
        seen = set()
        v = start
        while v in nxt and v not in seen:
            seen.add(v)
            v = nxt[v]
            if v == start:
                return False
    return True


def _eventual_range(A):
    n = len(A)
    current = set(range(n))
    while True:
        nxt = {j for i in current for j in range(n) if A[i][j]}
        if nxt == current:
            return sorted(current)
        current = nxt


def graph_flags(A):
    n = check_zero_one(A)
    comps = _strongly_connected_components(A)
    periods = [_component_period(A, c) for c in comps]
    irreducible = len(comps) == 1 and (n > 1 or A[0][0] == 1)
    period = periods[0] if irreducible else 0
    primitive = irreducible and period == 1
    permutation = all(sum(row) == 1 for row in A) and all(
        sum(A[i][j] for i in range(n)) == 1 for j in range(n)
    )
    return GraphFlags(
        irreducible=irreducible,
        primitive=primitive,
        permutation=permutation,
        condition_L=_condition_L(A),
        period=period,
        component_periods=periods,
        eventual_range=_eventual_range(A),
    )


def restrict_to_eventual_range(A, flags=None):
    """Submatrix on the eventual range indices, with the index list (0-based)."""
    if flags is None:
        flags = graph_flags(A)
    idx = flags.eventual_range
    return [[A[i][j] for j in idx] for i in idx], idx


def piecewise_linear_over(m, data):
    """Constant-slope within every Markov interval (the matrix-criteria hypothesis)."""
    for j in range(1, data.size + 1):
        lo, hi = data.interval(j)
        slopes = {abs_slope_key(b) for b in m.branches if b.lo < hi and lo < b.hi}
        if len(slopes) > 1:
            return False
    return True


def abs_slope_key(b):
    s = b.slope
    if s.is_rational:
        return abs(s.as_fraction())
    return s if s.sign() > 0 else -s


def dynamics_certificates(m, data, flags, surjective):
    """Transitivity/exactness certificates from the incidence matrix.

    Valid for piecewise linear Markov maps: with the canonical partition every
    Markov interval lies in a single affine branch, so the slope is constant
    there and the matrix criteria decide exactness and transitivity.
    """
    certs = []
    if not surjective:
        return certs
    if not piecewise_linear_over(m, data):
        return certs
    A_text = "incidence matrix"
    # a primitive permutation matrix is the 1x1 identity, whose map is an
    # injection and so never exact; size >= 2 primitivity excludes permutations
    exact = flags.primitive and not flags.permutation
    certs.append(
        Certificate(
            "exact",
            exact,
            "%s primitive" % A_text
            if exact
            else "%s not primitive (or a permutation)" % A_text,
        )
    )
    transitive = flags.irreducible and not flags.permutation
    certs.append(
        Certificate(
            "transitive",
            transitive,
            "%s irreducible and not a permutation" % A_text
            if transitive
            else "%s reducible or a permutation" % A_text,
        )
    )
    return certs


# -- itineraries -------------------------------------------------------------


@dataclass
class Itinerary:
    point: CutPoint
    symbols: list

    def as_dict(self):
        return {"point": self.point.text(), "symbols": list(self.symbols)}


def step_cut(m, c):
    """Image of a cut point under the disconnected dynamics."""
    i = m.branch_index_at(c.value, c.side)
    b = m.branches[i]
    v = b(c.value)
    if b.increasing:
        side = c.side
    else:
        side = MINUS if c.side == PLUS else PLUS
    if v == ZERO:
        side = PLUS
    elif v == ONE:
        side = MINUS
    return CutPoint(v, side)


def symbol_of(data, c):
    """1-based index of the Markov interval containing the cut point."""
    pts = data.partition
    if c.side == PLUS:
        i = bisect.bisect_right(pts, c.value)
    else:
        i = bisect.bisect_left(pts, c.value)
    if i < 1:
        i = 1
    if i > data.size:
        i = data.size
    return i


def itinerary(m, data, c, length, cap=10000):
    if length > cap:
        raise LengthExceedsCap("requested %d symbols exceeds cap %d" % (length, cap))
    symbols = []
    cur = c
    for _ in range(length):
        symbols.append(symbol_of(data, cur))
        cur = step_cut(m, cur)
    return Itinerary(c, symbols)


# -- separation ---------------------------------------------------------------


@dataclass
class SeparationReport:
    status: str  # separates | fails | unknown
    reason: str
    cuntz_krieger: bool

    def as_dict(self):
        return {
            "status": self.status,
            "reason": self.reason,
            "identifies_cuntz_krieger_algebras": self.cuntz_krieger,
        }


def separation_check(m, data, flags=None):
    """Do itineraries separate points of the disconnected interval?

    For piecewise linear Markov maps (constant slope within each Markov
    interval) this is equivalent to Condition L on the incidence matrix; when
    it holds, the two algebras are the Cuntz-Krieger pair of the matrix.
    """
    if flags is None:
        flags = graph_flags(data.matrix)
    if not piecewise_linear_over(m, data):
        return SeparationReport(
            "unknown", "slope is not constant within every Markov interval", False
        )
    if flags.condition_L:
        return SeparationReport(
            "separates",
            "condition L holds, so itineraries are injective",
            True,
        )
    return SeparationReport("fails", "condition L fails", False)
