"""Closed walks in signed Markov graphs and the constructions built from them.

A negative, non-repetitive closed walk of length m in the oriented Markov
graph of L_theta certifies a periodic point of least period m.  The
functions at the bottom of this module build such walks for the periods the
forcing lemmas promise: 2^k * s for s > r, every period via a horseshoe, and
2^(k+1) * 3.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import (
    CannotDesynchronize,
    ContractError,
    DomainError,
    InvariantViolation,
    ResourceError,
    default_cap,
)
from .markov import Edge, MarkovGraph, SignedMatrix, markov_graph, mat_pow, om_of, trace
from .orders import PeriodClass, divisors, mobius
from .permutation import Permutation


@dataclass(frozen=True)
class Walk:
    """Vertex sequence with the sign of each traversed edge."""

    vertices: tuple[int, ...]
    edge_signs: tuple[int, ...]
    graph: MarkovGraph | None = field(default=None, compare=False, repr=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edge_signs", tuple(self.edge_signs))
        if len(self.vertices) < 1 or len(self.edge_signs) != len(self.vertices) - 1:
            raise ContractError("a walk of length k has k + 1 vertices and k edge signs")

    @classmethod
    def in_graph(cls, g: MarkovGraph, vertices, edge_signs=None) -> Walk:
        """Walk through g; when edge_signs is omitted the first matching edge is used."""
        vs = tuple(vertices)
        signs = []
        for t, (u, v) in enumerate(zip(vs, vs[1:])):
            avail = g.edge_signs(u, v)
            if not avail:
                raise ContractError(f"E{u} -> E{v} is not an edge of the graph")
            if edge_signs is None:
                signs.append(avail[0])
            elif edge_signs[t] in avail:
                signs.append(edge_signs[t])
            else:
                raise ContractError(f"no edge E{u} -> E{v} with sign {edge_signs[t]}")
        return cls(vs, tuple(signs), g)

    @property
    def length(self) -> int:
        return len(self.edge_signs)

    @property
    def sign(self) -> int:
        s = 1
        for x in self.edge_signs:
            s *= x
        return s

    @property
    def closed(self) -> bool:
        return self.vertices[0] == self.vertices[-1]

    def steps(self):
        return list(zip(self.vertices, self.vertices[1:], self.edge_signs))

    def __add__(self, other: Walk) -> Walk:
        if self.vertices[-1] != other.vertices[0]:
            raise ContractError("walks do not meet end to start")
        return Walk(self.vertices + other.vertices[1:], self.edge_signs + other.edge_signs, self.graph)

    def __mul__(self, times: int) -> Walk:
        if not self.closed:
            raise ContractError("only closed walks can be repeated")
        out = Walk(self.vertices[:1], (), self.graph)
        for _ in range(times):
            out = out + self
        return out

    def rotate(self, t: int) -> Walk:
        if not self.closed:
            raise ContractError("only closed walks can be rotated")
        t %= self.length
        vs = self.vertices[:-1]
        signs = self.edge_signs
        rv = vs[t:] + vs[:t]
        return Walk(rv + rv[:1], signs[t:] + signs[:t], self.graph)

    def to_json(self) -> dict:
        return {"vertices": list(self.vertices), "sign": self.sign, "length": self.length}

    def __str__(self):
        return "".join(f"E{v}" for v in self.vertices)


def _require_closed(w: Walk):
    if not w.closed or w.length < 1:
        raise ContractError(f"{w} is not a closed walk of positive length")


# --- counting ----------------------------------------------------------------


def count_closed(m: SignedMatrix, k: int) -> int:
    """Closed walks of length k, each counted once per starting vertex."""
    if not m.is_nonnegative():
        raise ContractError("count_closed needs the unsigned Markov matrix")
    if k < 1:
        raise DomainError("walk length must be positive")
    return trace(mat_pow(m, k))


def count_nonrepetitive_closed(m: SignedMatrix, k: int) -> int:
    """Non-repetitive closed walks of length k, up to choice of starting point."""
    if not m.is_nonnegative():
        raise ContractError("count_nonrepetitive_closed needs the unsigned Markov matrix")
    if k < 1:
        raise DomainError("walk length must be positive")
    total = sum(mobius(d) * trace(mat_pow(m, k // d)) for d in divisors(k))
    if total % k or total < 0:
        raise InvariantViolation(f"Moebius sum {total} is not a non-negative multiple of {k}")
    return total // k


# --- enumeration -------------------------------------------------------------


def _reach(g: MarkovGraph, base: int, k: int) -> list[set[int]]:
    # reach[j] = vertices with some walk of length j ending at base
    reach = [{base}]
    preds = {v: set() for v in range(1, g.vertex_count + 1)}
    for e in g.edges:
        preds[e.target].add(e.source)
    for _ in range(k):
        reach.append({u for v in reach[-1] for u in preds[v]})
    return reach


def iter_closed(g: MarkovGraph, base: int, k: int, sign_filter: int | None = None,
                nonrepetitive_only: bool = False, cap: int | None = None):
    """Closed walks of length k at base, depth first, edges in graph order."""
    if not 1 <= base <= g.vertex_count:
        raise DomainError(f"E{base} is not a vertex")
    if k < 1:
        raise DomainError("walk length must be positive")
    cap = default_cap() if cap is None else cap
    reach = _reach(g, base, k)
    visited = 0
    verts, signs = [base], []
    stack = [iter(g.out_edges(base))]
    while stack:
        e = next(stack[-1], None)
        if e is None:
            stack.pop()
            if signs:
                verts.pop()
                signs.pop()
            continue
        depth = len(signs) + 1
        if e.target not in reach[k - depth]:
            continue
        visited += 1
        if visited > cap:
            raise ResourceError(f"closed-walk enumeration at E{base}, length {k}", cap)
        verts.append(e.target)
        signs.append(e.sign)
        if depth == k:
            w = Walk(tuple(verts), tuple(signs), g)
            verts.pop()
            signs.pop()
            if sign_filter is not None and w.sign != sign_filter:
                continue
            if nonrepetitive_only and is_repetitive(w):
                continue
            yield w
        else:
            stack.append(iter(g.out_edges(e.target)))


def enumerate_closed(g: MarkovGraph, base: int, k: int, sign_filter: int | None = None,
                     nonrepetitive_only: bool = False, cap: int | None = None) -> list[Walk]:
    return list(iter_closed(g, base, k, sign_filter, nonrepetitive_only, cap))


def first_closed(g: MarkovGraph, base: int, k: int, sign_filter=None, nonrepetitive_only=False, cap=None):
    for w in iter_closed(g, base, k, sign_filter, nonrepetitive_only, cap):
        return w
    return None


def canonical(w: Walk) -> tuple:
    """Lexicographically least rotation, as a hashable key."""
    _require_closed(w)
    return min(
        (w.vertices[t:-1] + w.vertices[:t], w.edge_signs[t:] + w.edge_signs[:t])
        for t in range(w.length)
    )


def closed_walk_classes(g: MarkovGraph, k: int, sign_filter=None, nonrepetitive_only=False, cap=None) -> set:
    """Rotation classes of closed walks of length k (direct enumeration)."""
    out = set()
    for base in range(1, g.vertex_count + 1):
        for w in iter_closed(g, base, k, sign_filter, nonrepetitive_only, cap):
            out.add(canonical(w))
    return out


# --- structure of closed walks ----------------------------------------------


def is_repetitive(w: Walk) -> bool:
    _require_closed(w)
    k = w.length
    for d in divisors(k)[:-1]:
        if all(w.vertices[i] == w.vertices[i % d] for i in range(k + 1)) and \
                all(w.edge_signs[i] == w.edge_signs[i % d] for i in range(k)):
            return True
    return False


@dataclass(frozen=True)
class PrimeDecomposition:
    base_vertex: int
    factors: tuple[Walk, ...]

    def concatenate(self) -> Walk:
        out = self.factors[0]
        for f in self.factors[1:]:
            out = out + f
        return out


def prime_decompose(w: Walk) -> PrimeDecomposition:
    """Split a closed walk at every return to its base vertex."""
    _require_closed(w)
    base = w.vertices[0]
    cuts = [0] + [t for t in range(1, w.length + 1) if w.vertices[t] == base]
    factors = tuple(
        Walk(w.vertices[a:b + 1], w.edge_signs[a:b], w.graph) for a, b in zip(cuts, cuts[1:])
    )
    return PrimeDecomposition(base, factors)


def surgery_nonrepetitive(w: Walk) -> Walk:
    """Rearrange prime factors into a non-repetitive closed walk.

    All copies of the lexicographically least prime go first, the remaining
    factors follow in their original order.  Length, sign and the multiset of
    primes are unchanged.
    """
    dec = prime_decompose(w)
    keys = [(f.vertices, f.edge_signs) for f in dec.factors]
    if len(set(keys)) < 2:
        raise CannotDesynchronize(f"every prime factor of {w} is the same walk")
    least = min(keys)
    head = [f for f, k in zip(dec.factors, keys) if k == least]
    tail = [f for f, k in zip(dec.factors, keys) if k != least]
    out = PrimeDecomposition(dec.base_vertex, tuple(head + tail)).concatenate()
    if is_repetitive(out) or out.sign != w.sign or out.length != w.length:
        raise InvariantViolation(f"surgery on {w} produced {out}")
    return out


# --- forcing constructions ---------------------------------------------------


def _lemma3_on_graph(g: MarkovGraph, om: SignedMatrix, n: int, s: int, cap=None) -> Walk:
    pc = PeriodClass.of(n)
    k, r = pc.k, pc.s
    if r <= 1:
        raise DomainError(f"n = {n} must be 2^k * r with r > 1 odd")
    if s <= r:
        raise DomainError(f"s = {s} must exceed r = {r}")
    pq = PeriodClass.of(s - r)
    p, q = pq.k, pq.s
    neg_len, pos_len = 2 ** (k + p), 2 ** k * r
    if trace(mat_pow(om, neg_len)) != -1:
        raise InvariantViolation(f"trace of OM^{neg_len} is not -1")
    if mat_pow(om, pos_len) != SignedMatrix.identity(om.d):
        raise InvariantViolation(f"OM^{pos_len} is not the identity")
    for base in range(1, g.vertex_count + 1):
        neg = first_closed(g, base, neg_len, sign_filter=-1, cap=cap)
        if neg is None:
            continue
        pos = first_closed(g, base, pos_len, sign_filter=1, cap=cap)
        if pos is None:
            raise InvariantViolation(f"no positive closed walk of length {pos_len} at E{base}")
        walk = surgery_nonrepetitive(neg * q + pos)
        if walk.sign != -1 or walk.length != 2 ** k * s:
            raise InvariantViolation(f"lemma3_walk produced {walk} with the wrong sign or length")
        return walk
    raise InvariantViolation(f"no vertex carries a negative closed walk of length {neg_len}")


def lemma3_walk(theta: Permutation, s: int, cap: int | None = None) -> Walk:
    """Negative non-repetitive closed walk of length 2^k * s, for an n-cycle with n = 2^k * r."""
    if not theta.is_cycle():
        raise DomainError(f"{theta} is not an n-cycle")
    return _lemma3_on_graph(markov_graph(theta), om_of(theta), theta.n, s, cap)


@dataclass(frozen=True)
class Horseshoe:
    """Points with f(b) <= c < b < a = f(a) <= f(c).

    With ``mirrored`` set all inequalities are reversed (the same picture
    seen through x -> -x).  Cells are E1 = [c, b] and E2 = [b, a].
    """

    a: Fraction
    b: Fraction
    c: Fraction
    mirrored: bool = False

    @property
    def cells(self):
        return [tuple(sorted((self.c, self.b))), tuple(sorted((self.b, self.a)))]

    def holds_for(self, f) -> bool:
        from .pwl import eval_map

        a, b, c = self.a, self.b, self.c
        fa, fb, fc = eval_map(f, a), eval_map(f, b), eval_map(f, c)
        if self.mirrored:
            return fb >= c > b > a == fa >= fc
        return fb <= c < b < a == fa <= fc


HORSESHOE_GRAPH = MarkovGraph(2, (Edge(1, 1, -1), Edge(1, 2, -1), Edge(2, 1, 1), Edge(2, 2, 1)))


def horseshoe_witness(theta: Permutation) -> Horseshoe | None:
    """Horseshoe points for L_theta when OM(theta) has two or more non-zero diagonal entries.

    z is the leftmost fixed point, a the next one, b the integer minimising
    L_theta on [z, a], and c the largest integer in [L(b), z) mapped beyond a.
    """
    from .pwl import build_map, eval_map, fixed_points_of

    if not theta.is_cycle():
        raise DomainError(f"{theta} is not an n-cycle")
    if sum(1 for x in om_of(theta).diagonal() if x) < 2:
        return None
    f = build_map(theta)
    fixed, _ = fixed_points_of(f)
    if len(fixed) < 2:
        raise InvariantViolation("two non-zero diagonal entries but fewer than two fixed points")
    z, a = fixed[0], fixed[1]
    cands = [Fraction(i) for i in range(1, theta.n + 1) if z <= i <= a]
    b = min(cands, key=lambda x: (eval_map(f, x), x))
    fb = eval_map(f, b)
    cs = [Fraction(i) for i in range(1, theta.n + 1) if fb <= i < z and eval_map(f, i) > a]
    if not cs:
        raise InvariantViolation(f"no c in [{fb}, {z}) maps beyond a = {a}")
    hs = Horseshoe(a, b, max(cs))
    if not hs.holds_for(f):
        raise InvariantViolation(f"horseshoe inequalities fail for {hs}")
    return hs


def find_horseshoe(f) -> Horseshoe | None:
    """Search any PL map for horseshoe points, either orientation."""
    from .pwl import PLMap

    hs = _scan_horseshoe(f)
    if hs is not None:
        return hs
    lo, hi = f.domain
    flipped = PLMap(tuple(lo + hi - x for x in reversed(f.xs)), tuple(lo + hi - y for y in reversed(f.ys)))
    hs = _scan_horseshoe(flipped)
    if hs is None:
        return None
    out = Horseshoe(lo + hi - hs.a, lo + hi - hs.b, lo + hi - hs.c, mirrored=True)
    if not out.holds_for(f):
        raise InvariantViolation("mirrored horseshoe failed to map back")
    return out


def _scan_horseshoe(f) -> Horseshoe | None:
    from .pwl import eval_map, fixed_points_of

    fixed, _ = fixed_points_of(f)
    bps = list(f.xs)
    for a in fixed:
        for b in sorted(set(bps + fixed)):
            if b >= a:
                break
            fb = eval_map(f, b)
            if fb >= b:
                continue
            cs = [fb] + [x for x in bps if fb < x < b]
            for c in sorted(cs, reverse=True):
                if eval_map(f, c) >= a:
                    hs = Horseshoe(a, b, c)
                    if hs.holds_for(f):
                        return hs
    return None


def horseshoe_walks(a, b, c, theta: Permutation, k: int) -> Walk:
    """The walk E1 E2^(k-1) E1 in the two-interval horseshoe graph (negative, non-repetitive)."""
    from .pwl import as_fraction, build_map

    if k < 1:
        raise DomainError("walk length must be positive")
    a, b, c = (as_fraction(x) for x in (a, b, c))
    f = build_map(theta)
    if not (Horseshoe(a, b, c).holds_for(f) or Horseshoe(a, b, c, True).holds_for(f)):
        raise ContractError(f"({a}, {b}, {c}) are not horseshoe points of L_{theta}")
    w = Walk.in_graph(HORSESHOE_GRAPH, (1,) + (2,) * (k - 1) + (1,))
    if w.sign != -1 or is_repetitive(w):
        raise InvariantViolation(f"horseshoe walk {w} is not negative and non-repetitive")
    return w


def lift_horseshoe_walk(theta: Permutation, hs: Horseshoe, w: Walk, f=None):
    """Exact periodic point of L_theta (or of ``f``) following a horseshoe walk.

    Prefers a point of least period w.length with negative orientation.
    """
    from .pwl import build_map, lift_itinerary

    f = build_map(theta) if f is None else f
    recs = lift_itinerary(f, hs.cells, w.vertices)
    m = w.length
    for want in ((m, -1), (m, None)):
        for r in recs:
            if r.least_period == want[0] and (want[1] is None or r.orientation == want[1]):
                return r
    raise InvariantViolation(f"no point of least period {m} follows horseshoe walk {w}")


@dataclass(frozen=True)
class Lemma7Witness:
    """Certificate that L_theta has a periodic point of least period 3 * 2^(k+1)."""

    period: int
    walk: Walk | None
    record: object
    branch: str

    def to_json(self) -> dict:
        return {
            "period": self.period,
            "branch": self.branch,
            "walk": None if self.walk is None else self.walk.to_json(),
            "record": None if self.record is None else self.record.to_json(),
        }


def lemma7_witness(theta: Permutation, cap: int | None = None) -> Lemma7Witness:
    """Witness for least period 3 * 2^(k+1) when theta is an n-cycle, n = 2^k * r, r > 1 odd.

    Branch "horseshoe": OM(theta)^(2^(k+1)) has several non-zero diagonal
    entries; a horseshoe for L_theta^(2^(k+1)) yields a negatively oriented
    point of period 3 under that iterate, whose itinerary under L_theta is the
    witness walk.  Branch "single-diagonal": a negative closed walk W of length
    2^k and a negative closed walk V of length 2^(k+1) share a vertex, and
    surgery on W^4 V gives the witness.  If the horseshoe point turns out to
    be critical, a depth-first search for the walk is used ("search").
    """
    from .pwl import build_map, lift_walk, map_power, orientation_at, _record, itinerary_walk

    if not theta.is_cycle():
        raise DomainError(f"{theta} is not an n-cycle")
    pc = PeriodClass.of(theta.n)
    if pc.s <= 1:
        raise DomainError(f"n = {theta.n} must be 2^k * r with r > 1 odd")
    k = pc.k
    N = 2 ** (k + 1)
    target = 3 * N
    g = markov_graph(theta)
    om = om_of(theta)
    omN = mat_pow(om, N)
    if trace(omN) != -1 or trace(mat_pow(om, N // 2)) != -1:
        raise InvariantViolation("trace of OM^(2^k) or OM^(2^(k+1)) is not -1")
    nonzero = [i + 1 for i, x in enumerate(omN.diagonal()) if x]

    walk, branch = None, None
    if len(nonzero) >= 2:
        f = build_map(theta)
        gN = map_power(f, N)
        hs = find_horseshoe(gN)
        if hs is not None:
            hw = Walk.in_graph(HORSESHOE_GRAPH, (1, 2, 2, 1))
            from .pwl import lift_itinerary

            for r in lift_itinerary(gN, hs.cells, hw.vertices, cap):
                if r.least_period != 3 or r.orientation != -1:
                    continue
                if orientation_at(f, r.point, target) != -1:
                    continue
                rec = _record(f, r.point, (), target)
                if rec.least_period == target:
                    walk, branch = itinerary_walk(theta, rec), "horseshoe"
                    break
    else:
        if omN.diagonal()[nonzero[0] - 1] != -1:
            raise InvariantViolation("single non-zero diagonal entry is not -1")
        half = N // 2
        w1 = None
        for base in range(1, g.vertex_count + 1):
            w1 = first_closed(g, base, half, sign_filter=-1, cap=cap)
            if w1 is not None:
                break
        if w1 is None:
            raise InvariantViolation(f"no negative closed walk of length {half}")
        j = min(w1.vertices)
        w1 = w1.rotate(w1.vertices.index(j))
        w2 = first_closed(g, j, N, sign_filter=-1, cap=cap)
        if w2 is None:
            raise InvariantViolation(f"no second negative closed walk of length {N} at E{j}")
        walk, branch = surgery_nonrepetitive(w1 * 4 + w2), "single-diagonal"

    if walk is None:
        for base in range(1, g.vertex_count + 1):
            walk = first_closed(g, base, target, sign_filter=-1, nonrepetitive_only=True, cap=cap)
            if walk is not None:
                branch = "search"
                break
    if walk is None:
        raise InvariantViolation(f"no negative non-repetitive closed walk of length {target}")
    if walk.sign != -1 or walk.length != target or is_repetitive(walk):
        raise InvariantViolation(f"lemma7_witness walk {walk} failed verification")
    rec = lift_walk(theta, walk)
    if rec.least_period != target:
        raise InvariantViolation(f"lemma7_witness walk lifted to least period {rec.least_period}")
    return Lemma7Witness(target, walk, rec, branch)


def negative_diagonal_vertices(om: SignedMatrix, k: int) -> list[int]:
    return [i + 1 for i, x in enumerate(mat_pow(om, k).diagonal()) if x < 0]
