"""Vertex maps on trees and graphs.

An edge is referred to by its 1-based index; an oriented edge is a signed
index, +j for E_j traversed tail -> head and -j for the reverse.  On a tree
the image of an edge is forced (the reduced path between the images of its
endpoints); on a general graph the caller supplies it as a route.
"""

from __future__ import annotations

import json
import random
from collections import deque
from dataclasses import dataclass
from importlib import resources

from .errors import DomainError, ValidationError
from .markov import Edge, MarkovGraph, SignedMatrix, mat_pow, trace
from .orders import basic_forced
from .permutation import Permutation


@dataclass(frozen=True)
class Tree:
    v: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        edges = tuple((int(a), int(b)) for a, b in self.edges)
        object.__setattr__(self, "edges", edges)
        if self.v < 2:
            raise DomainError("a tree needs at least two vertices")
        if len(edges) != self.v - 1:
            raise ValidationError(f"a tree on {self.v} vertices has {self.v - 1} edges, got {len(edges)}")
        for a, b in edges:
            if not (1 <= a <= self.v and 1 <= b <= self.v) or a == b:
                raise ValidationError(f"bad edge ({a}, {b})")
        if len(_component(self.v, edges, 1)) != self.v:
            raise ValidationError("edges do not connect every vertex")

    @classmethod
    def from_edges(cls, v: int, pairs, orient: str = "sorted") -> Tree:
        """Edges in the given order; orientation (min, max) unless orient='given'."""
        if orient == "sorted":
            pairs = [tuple(sorted(p)) for p in pairs]
        elif orient != "given":
            raise DomainError(f"unknown orientation rule {orient!r}")
        return cls(v, tuple(tuple(p) for p in pairs))

    @property
    def e(self) -> int:
        return len(self.edges)

    def tail(self, j: int) -> int:
        return self.edges[abs(j) - 1][0 if j > 0 else 1]

    def head(self, j: int) -> int:
        return self.edges[abs(j) - 1][1 if j > 0 else 0]

    def reoriented(self, flips) -> Tree:
        """Same tree with the edges whose indices are in ``flips`` reversed."""
        return Tree(self.v, tuple((b, a) if j in flips else (a, b)
                                  for j, (a, b) in enumerate(self.edges, start=1)))


def _component(v, edges, start):
    adj = {i: [] for i in range(1, v + 1)}
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    seen = {start}
    queue = deque([start])
    while queue:
        x = queue.popleft()
        for y in adj[x]:
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return seen


def reduced_path(t: Tree, u: int, w: int) -> tuple[int, ...]:
    """The unique simple path from u to w as signed edge indices."""
    for x in (u, w):
        if not 1 <= x <= t.v:
            raise DomainError(f"vertex {x} is not in 1..{t.v}")
    adj = {i: [] for i in range(1, t.v + 1)}
    for j, (a, b) in enumerate(t.edges, start=1):
        adj[a].append((b, j))
        adj[b].append((a, -j))
    prev = {u: None}
    queue = deque([u])
    while queue:
        x = queue.popleft()
        if x == w:
            break
        for y, sj in adj[x]:
            if y not in prev:
                prev[y] = (x, sj)
                queue.append(y)
    path = []
    x = w
    while prev[x] is not None:
        x, sj = prev[x][0], prev[x][1]
        path.append(sj)
    return tuple(reversed(path))


@dataclass(frozen=True)
class TreeVertexMap:
    tree: Tree
    perm: Permutation

    def __post_init__(self):
        if self.perm.n != self.tree.v:
            raise ValidationError(f"permutation of {self.perm.n} points on a tree with {self.tree.v} vertices")

    def routes(self) -> tuple[tuple[int, ...], ...]:
        t, p = self.tree, self.perm
        return tuple(reduced_path(t, p(a), p(b)) for a, b in t.edges)

    def as_graph_map(self) -> GraphVertexMap:
        return GraphVertexMap(self.tree.v, self.tree.edges, self.perm, self.routes())

    @classmethod
    def from_json(cls, data: dict, orient: str = "sorted") -> TreeVertexMap:
        tree = Tree.from_edges(int(data["v"]), data["edges"], orient)
        perm = data["perm"]
        if isinstance(perm, dict):
            p = Permutation.from_json(perm)
        elif isinstance(perm, str):
            p = Permutation.parse(perm, tree.v)
        else:
            p = Permutation(tree.v, tuple(perm))
        return cls(tree, p)

    def to_json(self) -> dict:
        return {"v": self.tree.v, "edges": [list(e) for e in self.tree.edges], "perm": list(self.perm.image)}


@dataclass(frozen=True)
class GraphVertexMap:
    """Vertex map on a connected graph with explicit edge routes."""

    v: int
    edges: tuple[tuple[int, int], ...]
    perm: Permutation
    routes: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        edges = tuple((int(a), int(b)) for a, b in self.edges)
        routes = tuple(tuple(int(x) for x in r) for r in self.routes)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "routes", routes)
        if self.perm.n != self.v:
            raise ValidationError(f"permutation of {self.perm.n} points on a graph with {self.v} vertices")
        if len(routes) != len(edges):
            raise ValidationError(f"{len(edges)} edges but {len(routes)} routes")
        if len(_component(self.v, edges, 1)) != self.v:
            raise ValidationError("graph is not connected")
        for j, ((a, b), route) in enumerate(zip(edges, routes), start=1):
            start, end = self.perm(a), self.perm(b)
            x = start
            for step in route:
                if not 1 <= abs(step) <= len(edges):
                    raise ValidationError(f"route of E{j} uses unknown edge {step}")
                if self._tail(step) != x:
                    raise ValidationError(f"route of E{j} is not connected at step {step}")
                x = self._head(step)
            if x != end:
                raise ValidationError(
                    f"route of E{j} runs {start} -> {x} but must end at perm({b}) = {end}")
            for s1, s2 in zip(route, route[1:]):
                if s1 == -s2:
                    raise ValidationError(f"route of E{j} backtracks over E{abs(s1)}")

    def _tail(self, j):
        return self.edges[abs(j) - 1][0 if j > 0 else 1]

    def _head(self, j):
        return self.edges[abs(j) - 1][1 if j > 0 else 0]

    @classmethod
    def from_json(cls, data: dict) -> GraphVertexMap:
        v = int(data["v"])
        perm = data["perm"]
        p = Permutation(v, tuple(perm)) if isinstance(perm, list) else Permutation.parse(perm, v)
        return cls(v, tuple(tuple(e) for e in data["edges"]), p, tuple(tuple(r) for r in data["routes"]))


def _occurrence_matrices(e: int, routes):
    m = [[0] * e for _ in range(e)]
    om = [[0] * e for _ in range(e)]
    for j, route in enumerate(routes):
        for step in route:
            i = abs(step) - 1
            m[i][j] += 1
            om[i][j] += 1 if step > 0 else -1
    return SignedMatrix(tuple(map(tuple, m))), SignedMatrix(tuple(map(tuple, om)))


def tree_matrices(tvm: TreeVertexMap) -> tuple[SignedMatrix, SignedMatrix]:
    return _occurrence_matrices(tvm.tree.e, tvm.routes())


def graph_matrices(gvm: GraphVertexMap) -> tuple[SignedMatrix, SignedMatrix]:
    return _occurrence_matrices(len(gvm.edges), gvm.routes)


def route_graph(e: int, routes) -> MarkovGraph:
    """Signed Markov graph with one edge per occurrence of +-E_i in the route of E_j."""
    edges = [Edge(j, abs(step), 1 if step > 0 else -1)
             for j, route in enumerate(routes, start=1) for step in route]
    return MarkovGraph(e, tuple(edges))


def tree_graph(tvm: TreeVertexMap) -> MarkovGraph:
    return route_graph(tvm.tree.e, tvm.routes())


def reduce_route(route) -> tuple[int, ...]:
    """Cancel adjacent +E/-E pairs until none remain."""
    out = []
    for step in route:
        if out and out[-1] == -step:
            out.pop()
        else:
            out.append(step)
    return tuple(out)


def compose_routes(outer, inner) -> tuple[tuple[int, ...], ...]:
    """Routes of (outer after inner): substitute outer's routes into inner's, then reduce."""
    out = []
    for route in inner:
        chain = []
        for step in route:
            r = outer[abs(step) - 1]
            chain.extend(r if step > 0 else [-x for x in reversed(r)])
        out.append(reduce_route(chain))
    return tuple(out)


def iterate_routes(routes, k: int):
    if k < 1:
        raise DomainError("iterate needs k >= 1")
    result = routes
    for _ in range(k - 1):
        result = compose_routes(routes, result)
    return result


def dot_certificate(tvm: TreeVertexMap) -> list[int]:
    """Dots per edge: each non-fixed vertex marks the first edge of its path to its image."""
    dots = [0] * tvm.tree.e
    for x in range(1, tvm.tree.v + 1):
        path = reduced_path(tvm.tree, x, tvm.perm(x))
        if path:
            dots[abs(path[0]) - 1] += 1
    return dots


def tree_trace_check(tvm: TreeVertexMap) -> int:
    """Trace of OM; -1 whenever the permutation fixes no vertex (checked)."""
    _, om = tree_matrices(tvm)
    tr = trace(om)
    if not any(tvm.perm(x) == x for x in range(1, tvm.tree.v + 1)):
        dots = dot_certificate(tvm)
        if tr != -1 or any(d != 1 - om[i, i] for i, d in enumerate(dots)) or sum(dots) != tvm.tree.v:
            from .errors import InvariantViolation

            raise InvariantViolation(f"dot argument fails: trace {tr}, dots {dots}")
    return tr


def tree_walk_witnesses(tvm: TreeVertexMap, m: int, cap: int | None = None):
    """Negative non-repetitive closed walk of length m in the tree's Markov graph, or None.

    Periods promised by the trace lemmas are built constructively first; any
    other m (or a construction that does not apply) falls back to exhaustive
    search.  ResourceError propagates; it is not the same as absence.
    """
    from .walks import _lemma3_on_graph, first_closed, is_repetitive
    from .orders import PeriodClass

    if sorted(c for c in (len(x) for x in tvm.perm.cycles())) != [tvm.tree.v]:
        raise DomainError("tree_walk_witnesses needs the vertices to form one periodic orbit")
    if m < 1:
        raise DomainError("walk length must be positive")
    g = tree_graph(tvm)
    _, om = tree_matrices(tvm)
    v = tvm.tree.v
    if m != v and m in basic_forced(v, m):
        pm, pv = PeriodClass.of(m), PeriodClass.of(v)
        if pm.is_power_of_two:
            for base in range(1, g.vertex_count + 1):
                if mat_pow(om, m)[base - 1, base - 1] < 0:
                    w = first_closed(g, base, m, sign_filter=-1, cap=cap)
                    if w is not None:
                        return w
        elif not pv.is_power_of_two and pm.k == pv.k and pm.s > pv.s:
            return _lemma3_on_graph(g, om, v, pm.s, cap)
    for base in range(1, g.vertex_count + 1):
        w = first_closed(g, base, m, sign_filter=-1, nonrepetitive_only=True, cap=cap)
        if w is not None and not is_repetitive(w):
            return w
    return None


def nine_vertex_example() -> TreeVertexMap:
    """The nine-vertex tree map whose Markov graph has no closed walk of length 6."""
    data = json.loads(resources.files("combdyn.data").joinpath("fig10.json").read_text("utf-8"))
    return TreeVertexMap.from_json(data)


def random_tree(v: int, rng: random.Random) -> Tree:
    """Uniform labelled tree on v vertices from a random Pruefer sequence."""
    if v < 2:
        raise DomainError("a tree needs at least two vertices")
    if v == 2:
        return Tree(2, ((1, 2),))
    seq = [rng.randint(1, v) for _ in range(v - 2)]
    degree = [1] * (v + 1)
    for x in seq:
        degree[x] += 1
    edges = []
    for x in seq:
        leaf = min(i for i in range(1, v + 1) if degree[i] == 1)
        edges.append(tuple(sorted((leaf, x))))
        degree[leaf] -= 1
        degree[x] -= 1
    last = [i for i in range(1, v + 1) if degree[i] == 1]
    edges.append(tuple(sorted(last)))
    return Tree(v, tuple(edges))


def random_derangement(v: int, rng: random.Random) -> Permutation:
    while True:
        image = list(range(1, v + 1))
        rng.shuffle(image)
        if all(x != i for i, x in enumerate(image, start=1)):
            return Permutation(v, tuple(image))


def path_tree(n: int) -> Tree:
    return Tree(n, tuple((i, i + 1) for i in range(1, n)))


def require_same_orbit(perm: Permutation) -> bool:
    return len(perm.cycles()) == 1
