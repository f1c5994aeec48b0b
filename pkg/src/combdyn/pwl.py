"""Exact rational piecewise-linear dynamics of connect-the-dots maps.

Everything is computed with :class:`fractions.Fraction` or plain integers.
Periodic points of L_theta^k are found by exhausting the itineraries of the
iterate (one affine piece each), so the periodic-point sets reported here are
exact and complete.  This module never consults a Markov matrix; it is the
oracle the matrix arguments are checked against.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import ContractError, CriticalItinerary, DomainError, InvariantViolation, ResourceError, default_cap
from .permutation import Permutation


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        raise DomainError("floats are not accepted; pass an int, Fraction or 'p/q' string")
    return Fraction(x)


def fraction_str(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class PLMap:
    """Continuous piecewise-linear map through (xs[t], ys[t]), linear in between."""

    xs: tuple[Fraction, ...]
    ys: tuple[Fraction, ...]

    def __post_init__(self):
        xs = tuple(as_fraction(x) for x in self.xs)
        ys = tuple(as_fraction(y) for y in self.ys)
        if len(xs) < 2 or len(xs) != len(ys):
            raise DomainError("a PLMap needs at least two breakpoints and one value per breakpoint")
        if any(a >= b for a, b in zip(xs, xs[1:])):
            raise DomainError("breakpoints must be strictly increasing")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)

    @property
    def domain(self) -> tuple[Fraction, Fraction]:
        return self.xs[0], self.xs[-1]

    @property
    def range(self) -> tuple[Fraction, Fraction]:
        return min(self.ys), max(self.ys)

    def piece_index(self, x: Fraction) -> int:
        """Index t of a piece [xs[t], xs[t+1]] containing x (the left one at breakpoints)."""
        t = bisect.bisect_left(self.xs, x) - 1
        return min(max(t, 0), len(self.xs) - 2)

    def slope(self, t: int) -> Fraction:
        return (self.ys[t + 1] - self.ys[t]) / (self.xs[t + 1] - self.xs[t])

    def pieces(self):
        """Yield (x0, x1, slope, intercept) for every linear piece."""
        for t in range(len(self.xs) - 1):
            a = self.slope(t)
            yield self.xs[t], self.xs[t + 1], a, self.ys[t] - a * self.xs[t]

    def __call__(self, x) -> Fraction:
        return eval_map(self, x)

    def is_breakpoint(self, x) -> bool:
        x = as_fraction(x)
        i = bisect.bisect_left(self.xs, x)
        return i < len(self.xs) and self.xs[i] == x

    def interior_breakpoints(self) -> tuple[Fraction, ...]:
        return self.xs[1:-1]


def build_map(theta: Permutation) -> PLMap:
    """Connect-the-dots map L_theta on [1, n]."""
    if theta.n < 2:
        raise DomainError("the connect-the-dots map needs n >= 2")
    return PLMap(tuple(range(1, theta.n + 1)), theta.image)


def eval_map(f: PLMap, x) -> Fraction:
    x = as_fraction(x)
    lo, hi = f.domain
    if not lo <= x <= hi:
        raise DomainError(f"{fraction_str(x)} is outside the domain [{fraction_str(lo)}, {fraction_str(hi)}]")
    t = f.piece_index(x)
    x0, x1 = f.xs[t], f.xs[t + 1]
    return f.ys[t] + (f.ys[t + 1] - f.ys[t]) * (x - x0) / (x1 - x0)


def iterate(f: PLMap, x, k: int) -> Fraction:
    x = as_fraction(x)
    for _ in range(k):
        x = eval_map(f, x)
    return x


def _prune(xs, ys):
    keep_x, keep_y = [xs[0]], [ys[0]]
    for t in range(1, len(xs) - 1):
        # drop breakpoints that sit on the line through their neighbours
        a = (ys[t] - keep_y[-1]) * (xs[t + 1] - keep_x[-1])
        b = (ys[t + 1] - keep_y[-1]) * (xs[t] - keep_x[-1])
        if a != b:
            keep_x.append(xs[t])
            keep_y.append(ys[t])
    keep_x.append(xs[-1])
    keep_y.append(ys[-1])
    return tuple(keep_x), tuple(keep_y)


def compose(f: PLMap, g: PLMap) -> PLMap:
    """f after g, exactly; collinear breakpoints are pruned."""
    lo, hi = f.domain
    glo, ghi = g.range
    if glo < lo or ghi > hi:
        raise DomainError("range of the inner map escapes the domain of the outer map")
    xs = set(g.xs)
    fb = f.interior_breakpoints()
    for x0, x1, a, b in g.pieces():
        if a == 0:
            continue
        y0, y1 = sorted((a * x0 + b, a * x1 + b))
        i = bisect.bisect_right(fb, y0)
        while i < len(fb) and fb[i] < y1:
            xs.add((fb[i] - b) / a)
            i += 1
    xs = sorted(xs)
    ys = [eval_map(f, eval_map(g, x)) for x in xs]
    return PLMap(*_prune(xs, ys))


def map_power(f: PLMap, k: int) -> PLMap:
    if k < 1:
        raise DomainError("map_power needs k >= 1")
    result = f
    for _ in range(k - 1):
        result = compose(f, result)
    return result


# --- exploration of iterates -------------------------------------------------


@dataclass(frozen=True)
class Node:
    """A maximal interval J of points sharing the itinerary ``walk``.

    ``walk[t]`` is the index of the cell holding the t-th iterate, and the
    iterate f^t is the affine map x -> alpha * x + beta on J.
    """

    walk: tuple[int, ...]
    lo: Fraction
    hi: Fraction
    alpha: Fraction
    beta: Fraction

    @property
    def depth(self) -> int:
        return len(self.walk) - 1

    def image(self) -> tuple[Fraction, Fraction]:
        a = self.alpha * self.lo + self.beta
        b = self.alpha * self.hi + self.beta
        return (a, b) if a <= b else (b, a)

    def fixed(self):
        """Solutions of alpha*x + beta = x on J: None, a point, or the whole of J."""
        if self.alpha == 1:
            return (self.lo, self.hi) if self.beta == 0 else None
        x = self.beta / (1 - self.alpha)
        return x if self.lo <= x <= self.hi else None


class Explorer:
    """Depth-first enumeration of itinerary intervals of a PL map.

    ``cells`` is a list of closed intervals (cell index = position + 1) whose
    union is invariant under ``f``.  Cells must be cut at every breakpoint of
    ``f`` that matters, or else the explorer splits at breakpoints itself.
    """

    def __init__(self, f: PLMap, cells, cap: int | None = None):
        self.f = f
        self.cells = [(as_fraction(a), as_fraction(b)) for a, b in cells]
        self.cap = default_cap() if cap is None else cap
        self.visited = 0
        self._bounds = sorted({x for c in self.cells for x in c})

    def _tick(self):
        self.visited += 1
        if self.visited > self.cap:
            raise ResourceError("piecewise-linear exploration", self.cap)

    def roots(self, start_cells=None):
        ids = range(1, len(self.cells) + 1) if start_cells is None else start_cells
        for i in ids:
            lo, hi = self.cells[i - 1]
            yield Node((i,), lo, hi, Fraction(1), Fraction(0))

    def children(self, node: Node, allowed=None):
        """Children of node in deterministic order (ascending cell, then position)."""
        y0, y1 = node.image()
        f = self.f
        t = f.piece_index(y0)
        if y0 == f.xs[t + 1] and t + 1 < len(f.xs) - 1:
            t += 1
        out = []
        while t < len(f.xs) - 1 and f.xs[t] < y1:
            u, v = max(y0, f.xs[t]), min(y1, f.xs[t + 1])
            t += 1
            if u >= v:
                continue
            s = f.slope(t - 1)
            if s == 0:
                continue
            c = f.ys[t - 1] - s * f.xs[t - 1]
            z0, z1 = sorted((s * u + c, s * v + c))
            A, B = s * node.alpha, s * node.beta + c
            for j, (clo, chi) in enumerate(self.cells, start=1):
                if allowed is not None and j not in allowed:
                    continue
                w0, w1 = max(z0, clo), min(z1, chi)
                if w0 >= w1:
                    continue
                xa, xb = sorted(((w0 - B) / A, (w1 - B) / A))
                out.append(Node(node.walk + (j,), xa, xb, A, B))
        out.sort(key=lambda nd: (nd.walk[-1], nd.lo))
        for nd in out:
            self._tick()
        return out

    def nodes(self, depth: int, start_cells=None, walk=None):
        """Yield every node of depth 1..depth (pre-order).  ``walk`` pins the itinerary."""
        stack = [r for r in self.roots(start_cells if walk is None else [walk[0]])]
        stack.reverse()
        while stack:
            node = stack.pop()
            if node.depth:
                yield node
            if node.depth >= depth:
                continue
            allowed = None if walk is None else {walk[node.depth + 1]}
            kids = self.children(node, allowed)
            stack.extend(reversed(kids))


def edge_cells(n: int):
    return [(i, i + 1) for i in range(1, n)]


# --- periodic point records ------------------------------------------------


@dataclass(frozen=True)
class PeriodicPointRecord:
    """An exact periodic point of a connect-the-dots map.

    ``orientation`` is the sign of the derivative of L^least_period at the
    point, or None when some iterate is a breakpoint.  ``itinerary`` is a
    closed walk (vertex list, length least_period + 1) through the edges
    holding the iterates; for critical points, where that is ambiguous, it is
    the closed walk whose interval nesting produced the point.
    """

    point: Fraction
    least_period: int
    orientation: int | None
    itinerary: tuple[int, ...] = field(default=())

    def to_json(self) -> dict:
        return {
            "point": fraction_str(self.point),
            "least_period": self.least_period,
            "orientation": self.orientation,
            "itinerary": list(self.itinerary),
        }

    @classmethod
    def from_json(cls, data: dict) -> PeriodicPointRecord:
        return cls(as_fraction(data["point"]), int(data["least_period"]),
                   data.get("orientation"), tuple(data.get("itinerary", ())))


@dataclass(frozen=True)
class FixedSegmentRecord:
    """A whole interval fixed by L^k; ``least_period`` is that of its generic points."""

    lo: Fraction
    hi: Fraction
    least_period: int
    itinerary: tuple[int, ...] = field(default=())

    def to_json(self) -> dict:
        return {
            "segment": [fraction_str(self.lo), fraction_str(self.hi)],
            "least_period": self.least_period,
            "itinerary": list(self.itinerary),
        }


def least_period(f: PLMap, x, bound: int | None = None) -> int:
    """Least t >= 1 with f^t(x) = x; raises if x is not periodic within ``bound``."""
    x = as_fraction(x)
    y = eval_map(f, x)
    t = 1
    while y != x:
        if bound is not None and t >= bound:
            raise ContractError(f"{fraction_str(x)} is not periodic with period <= {bound}")
        y = eval_map(f, y)
        t += 1
    return t


def orbit(f: PLMap, x, m: int) -> list[Fraction]:
    out = [as_fraction(x)]
    for _ in range(m - 1):
        out.append(eval_map(f, out[-1]))
    return out


def orientation_at(f: PLMap, x, m: int) -> int | None:
    """Sign of (f^m)'(x), or None when an iterate lands on an interior breakpoint."""
    sign = 1
    for y in orbit(f, x, m):
        if f.is_breakpoint(y):
            return None
        sign *= 1 if f.slope(f.piece_index(y)) > 0 else -1
    return sign


def _record(f: PLMap, x: Fraction, walk, bound: int) -> PeriodicPointRecord:
    lp = least_period(f, x, bound)
    orient = orientation_at(f, x, lp)
    if orient is not None:
        pts = orbit(f, x, lp)
        itin = tuple(f.piece_index(y) + 1 for y in pts) + (f.piece_index(x) + 1,)
    else:
        itin = tuple(walk)
    return PeriodicPointRecord(x, lp, orient, itin)


def _segment_period(f: PLMap, lo, hi, k: int) -> int:
    from .orders import divisors

    for d in divisors(k):
        if iterate(f, lo, d) == lo and iterate(f, hi, d) == hi:
            return d
    return k


class _DotsMap:
    """Integer view of L_theta used by the periodic-point oracle.

    On E_v = [v, v+1] the map is y = s_v * x + c_v with integer s_v, c_v, and
    the image of E_v is the union of whole edges.  Composing along an
    itinerary therefore keeps integer coefficients, and a point p/q stays in
    (1/q)Z under iteration.
    """

    def __init__(self, theta: Permutation):
        n = theta.n
        self.theta = theta
        self.n = n
        self.slope = [0] * n
        self.icept = [0] * n
        self.covers = [()] * n
        for v in range(1, n):
            a, b = theta(v), theta(v + 1)
            s = b - a
            self.slope[v] = s
            self.icept[v] = a - s * v
            self.covers[v] = tuple(range(min(a, b), max(a, b)))

    def step(self, p: int, q: int) -> int:
        """Numerator of L(p/q) over the same denominator q."""
        i = p // q
        if i >= self.n:
            i = self.n - 1
        return self.slope[i] * p + self.icept[i] * q

    def least_period(self, x: Fraction, bound: int) -> int:
        p, q = x.numerator, x.denominator
        y = self.step(p, q)
        t = 1
        while y != p:
            if t >= bound:
                raise InvariantViolation(f"{fraction_str(x)} is not periodic with period <= {bound}")
            y = self.step(y, q)
            t += 1
        return t

    def orientation(self, x: Fraction, m: int) -> int | None:
        p, q = x.numerator, x.denominator
        sign = 1
        for _ in range(m):
            if p % q == 0:
                return None
            sign *= 1 if self.slope[p // q] > 0 else -1
            p = self.step(p, q)
        return sign

    def closed_itineraries(self, k: int, ex_cap: list):
        """Yield (walk, A, B) for closed itineraries of length k; L^k = A x + B on the nested interval."""
        n = self.n
        preds = {v: set() for v in range(1, n)}
        for v in range(1, n):
            for j in self.covers[v]:
                preds[j].add(v)
        for base in range(1, n):
            reach = [{base}]
            for _ in range(k):
                reach.append({u for v in reach[-1] for u in preds[v]})
            if base not in reach[k]:
                continue
            walk = [base]
            coeffs = [(1, 0)]
            stack = [iter(self.covers[base])]
            while stack:
                j = next(stack[-1], None)
                if j is None:
                    stack.pop()
                    walk.pop()
                    coeffs.pop()
                    continue
                depth = len(walk)
                if j not in reach[k - depth]:
                    continue
                ex_cap[0] -= 1
                if ex_cap[0] < 0:
                    raise ResourceError("periodic-point exploration", ex_cap[1])
                u = walk[-1]
                A, B = coeffs[-1]
                s = self.slope[u]
                nxt = (s * A, s * B + self.icept[u])
                if depth == k:
                    yield tuple(walk) + (j,), nxt[0], nxt[1]
                else:
                    walk.append(j)
                    coeffs.append(nxt)
                    stack.append(iter(self.covers[j]))
            walk.clear()


def _orbit_point_records(theta: Permutation, k: int):
    out = []
    for c in theta.cycles():
        if k % len(c) == 0:
            for x in c:
                out.append(PeriodicPointRecord(Fraction(x), len(c), None, ()))
    return out


def _solve_itinerary(dm: _DotsMap, f: PLMap, walk, A: int, B: int, k: int):
    """Record for the fixed point of L^k along a closed itinerary, or None."""
    base = walk[0]
    if A == 1:
        if B != 0:
            return None
        lo, hi = Fraction(base), Fraction(base + 1)
        return FixedSegmentRecord(lo, hi, _segment_period(f, lo, hi, k), tuple(walk))
    x = Fraction(B, 1 - A)
    if not base < x < base + 1:
        return None
    lp = dm.least_period(x, k)
    return PeriodicPointRecord(x, lp, dm.orientation(x, lp), tuple(walk[:lp + 1]))


def _budget(cap):
    cap = default_cap() if cap is None else cap
    return [cap, cap]


def periodic_points(theta: Permutation, k: int, cap: int | None = None):
    """Exact solutions of L_theta^k(x) = x, sorted.

    Isolated points come back as PeriodicPointRecord, whole fixed intervals
    as FixedSegmentRecord.  The orbit points of theta (the integers) are
    included with orientation None and an empty itinerary: as breakpoints
    they belong to two edges at once.  Any other periodic point has a unique
    closed itinerary, so each is produced by exactly one closed walk through
    the edge coverings of L_theta.
    """
    if k < 1:
        raise DomainError("periodic_points needs k >= 1")
    f = build_map(theta)
    dm = _DotsMap(theta)
    budget = _budget(cap)
    points = {r.point: r for r in _orbit_point_records(theta, k)}
    segments = []
    for walk, A, B in dm.closed_itineraries(k, budget):
        rec = _solve_itinerary(dm, f, walk, A, B, k)
        if isinstance(rec, FixedSegmentRecord):
            segments.append(rec)
        elif rec is not None:
            points[rec.point] = rec
    out = sorted(points.values(), key=lambda r: r.point)
    return out + sorted(segments, key=lambda r: (r.lo, r.hi))


def least_period_witnesses(theta: Permutation, K: int, cap: int | None = None) -> dict[int, object]:
    """For each least period m <= K of L_theta, one exact witness.

    Orbit points of theta are preferred; otherwise the first solution met
    along closed itineraries of length m in depth-first order.
    """
    if K < 1:
        raise DomainError("least_period_set needs K >= 1")
    f = build_map(theta)
    dm = _DotsMap(theta)
    budget = _budget(cap)
    found = {}
    for r in _orbit_point_records(theta, theta.order()):
        if r.least_period <= K and r.least_period not in found:
            found[r.least_period] = r
    for m in range(1, K + 1):
        if m in found:
            continue
        for walk, A, B in dm.closed_itineraries(m, budget):
            rec = _solve_itinerary(dm, f, walk, A, B, m)
            if rec is not None and rec.least_period == m:
                found[m] = rec
                break
    return dict(sorted(found.items()))


def least_period_set(theta: Permutation, K: int, cap: int | None = None) -> set[int]:
    """{m <= K : L_theta has a point of least period exactly m}."""
    return set(least_period_witnesses(theta, K, cap))


# --- walks <-> points --------------------------------------------------------


def _closed_vertices(w) -> tuple[int, ...]:
    vs = tuple(getattr(w, "vertices", w))
    if len(vs) < 2 or vs[0] != vs[-1]:
        raise ContractError(f"walk {list(vs)} is not a closed walk of positive length")
    return vs


def _candidates(lo: Fraction, hi: Fraction):
    yield (lo + hi) / 2
    q = 3
    while True:
        for p in range(1, q):
            yield lo + (hi - lo) * Fraction(p, q)
        q += 1


def lift_walk(theta: Permutation, w) -> PeriodicPointRecord:
    """Exact periodic point realising a closed walk of the oriented Markov graph.

    Intervals are nested backwards along the walk until J_0 in the first edge
    with L^m(J_0) equal to that edge; the fixed point of the affine L^m on J_0
    is returned.  A negative non-repetitive walk always yields a point of least
    period m interior to its edge.
    """
    from .markov import markov_graph
    from .walks import Walk, is_repetitive

    vs = _closed_vertices(w)
    g = markov_graph(theta)
    for u, v in zip(vs, vs[1:]):
        if not g.has_edge(u, v):
            raise ContractError(f"E{u} -> E{v} is not an edge of the Markov graph of {theta}")
    f = build_map(theta)
    m = len(vs) - 1
    lo, hi = Fraction(vs[0]), Fraction(vs[0] + 1)
    for v in reversed(vs[:-1]):
        s = Fraction(theta(v + 1) - theta(v))
        c = theta(v) - s * v
        lo, hi = sorted(((lo - c) / s, (hi - c) / s))
    alpha, beta = Fraction(1), Fraction(0)
    for v in vs[:-1]:
        s = Fraction(theta(v + 1) - theta(v))
        c = theta(v) - s * v
        alpha, beta = s * alpha, s * beta + c
    if alpha != 1:
        x = beta / (1 - alpha)
    else:
        if beta != 0:
            raise InvariantViolation("nested interval maps onto its edge by a translation")
        x = None
        for cand in _candidates(lo, hi):
            if least_period(f, cand, m) == m:
                x = cand
                break
            if cand.denominator > 64:
                x = (lo + hi) / 2
                break
    rec = _record(f, x, vs, m)
    walk = w if isinstance(w, Walk) else Walk.in_graph(g, vs)
    if walk.sign < 0 and not is_repetitive(walk):
        if rec.least_period != m or not vs[0] < x < vs[0] + 1:
            raise InvariantViolation(f"negative non-repetitive walk {list(vs)} lifted to {rec}")
    return rec


def itinerary_walk(theta: Permutation, p: PeriodicPointRecord):
    """Closed walk through the edges visited by a non-critical periodic orbit."""
    from .markov import markov_graph
    from .walks import Walk, is_repetitive

    f = build_map(theta)
    m = p.least_period
    pts = orbit(f, p.point, m)
    if eval_map(f, pts[-1]) != pts[0]:
        raise ContractError(f"{fraction_str(p.point)} does not have period {m}")
    crit = [y for y in pts if y.denominator == 1]
    if crit:
        raise CriticalItinerary(f"iterate {fraction_str(crit[0])} of {fraction_str(p.point)} is a breakpoint")
    vs = tuple(int(y) for y in pts) + (int(pts[0]),)
    walk = Walk.in_graph(markov_graph(theta), vs)
    orient = orientation_at(f, p.point, m)
    if walk.sign != orient:
        raise InvariantViolation("itinerary sign disagrees with the derivative")
    if orient < 0 and is_repetitive(walk):
        raise InvariantViolation(f"negative orbit of {fraction_str(p.point)} gave a repetitive walk")
    return walk


def lift_itinerary(f: PLMap, cells, vertices, cap: int | None = None) -> list[PeriodicPointRecord]:
    """Every fixed point of f^m whose iterates follow ``vertices`` through ``cells``.

    Generalises lift_walk to maps that are not linear on their cells (the
    two-interval horseshoe partition, iterates of L_theta).  Records carry
    least period and orientation with respect to ``f``.
    """
    vs = _closed_vertices(vertices)
    m = len(vs) - 1
    ex = Explorer(f, cells, cap)
    found = {}
    for node in ex.nodes(m, walk=vs):
        if node.depth != m:
            continue
        sol = node.fixed()
        if sol is None:
            continue
        pts = [sol] if not isinstance(sol, tuple) else list(_take(_candidates(*sol), 8))
        for x in pts:
            if x not in found:
                lp = least_period(f, x, m)
                found[x] = PeriodicPointRecord(x, lp, orientation_at(f, x, lp), vs)
    return sorted(found.values(), key=lambda r: r.point)


def _take(it, k):
    for _, x in zip(range(k), it):
        yield x


def fixed_points_of(f: PLMap):
    """Isolated fixed points and fixed segments of a PL map, left to right."""
    pts, segs = [], []
    for x0, x1, a, b in f.pieces():
        if a == 1:
            if b == 0:
                segs.append((x0, x1))
            continue
        x = b / (1 - a)
        if x0 <= x <= x1 and (not pts or pts[-1] != x):
            pts.append(x)
    return pts, segs
