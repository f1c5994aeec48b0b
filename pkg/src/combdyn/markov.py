"""Markov graphs and (oriented) Markov matrices of connect-the-dots maps.

Matrices follow the column-to-row convention: ``entries[i][j]`` counts
directed edges from E_{j+1} to E_{i+1}.  With that convention
``OM(alpha) @ OM(beta) == OM(alpha * beta)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import DimensionError, DomainError
from .permutation import Permutation


@dataclass(frozen=True)
class SignedMatrix:
    """Square matrix of Python ints (unbounded precision)."""

    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(int(x) for x in row) for row in self.entries)
        if not rows or any(len(r) != len(rows) for r in rows):
            raise DimensionError("a SignedMatrix must be square and non-empty")
        object.__setattr__(self, "entries", rows)

    @property
    def d(self) -> int:
        return len(self.entries)

    @classmethod
    def identity(cls, d: int) -> SignedMatrix:
        return cls(tuple(tuple(int(i == j) for j in range(d)) for i in range(d)))

    @classmethod
    def zeros(cls, d: int) -> SignedMatrix:
        return cls(tuple((0,) * d for _ in range(d)))

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def __matmul__(self, other: SignedMatrix) -> SignedMatrix:
        return mat_mul(self, other)

    def __pow__(self, k: int) -> SignedMatrix:
        return mat_pow(self, k)

    def __abs__(self) -> SignedMatrix:
        return SignedMatrix(tuple(tuple(abs(x) for x in row) for row in self.entries))

    def tolist(self) -> list[list[int]]:
        return [list(row) for row in self.entries]

    def diagonal(self) -> list[int]:
        return [self.entries[i][i] for i in range(self.d)]

    def is_nonnegative(self) -> bool:
        return all(x >= 0 for row in self.entries for x in row)

    def to_json(self) -> dict:
        return {"d": self.d, "entries": self.tolist()}

    @classmethod
    def from_json(cls, data: dict) -> SignedMatrix:
        m = cls(tuple(tuple(r) for r in data["entries"]))
        if m.d != int(data["d"]):
            raise DimensionError(f"declared d={data['d']} but entries are {m.d}x{m.d}")
        return m


def mat_mul(a: SignedMatrix, b: SignedMatrix) -> SignedMatrix:
    if a.d != b.d:
        raise DimensionError(f"cannot multiply {a.d}x{a.d} by {b.d}x{b.d}")
    cols = list(zip(*b.entries))
    return SignedMatrix(tuple(
        tuple(sum(x * y for x, y in zip(row, col)) for col in cols)
        for row in a.entries
    ))


def mat_pow(a: SignedMatrix, k: int) -> SignedMatrix:
    if k < 0:
        raise DomainError("matrix powers must be non-negative")
    result = SignedMatrix.identity(a.d)
    base = a
    while k:
        if k & 1:
            result = mat_mul(result, base)
        base = mat_mul(base, base)
        k >>= 1
    return result


def trace(a: SignedMatrix) -> int:
    return sum(a.diagonal())


@dataclass(frozen=True)
class Edge:
    source: int
    target: int
    sign: int


@dataclass(frozen=True)
class MarkovGraph:
    """Signed digraph on vertices 1..vertex_count (vertex i stands for E_i).

    Edges are kept sorted by (source, target, + before -), which is the
    deterministic order every walk search uses.
    """

    vertex_count: int
    edges: tuple[Edge, ...]
    _out: dict = field(default=None, compare=False, repr=False, hash=False)

    def __post_init__(self):
        edges = tuple(sorted(
            (e if isinstance(e, Edge) else Edge(*e) for e in self.edges),
            key=lambda e: (e.source, e.target, -e.sign),
        ))
        for e in edges:
            if not (1 <= e.source <= self.vertex_count and 1 <= e.target <= self.vertex_count):
                raise DomainError(f"edge {e} leaves the vertex range 1..{self.vertex_count}")
            if e.sign not in (1, -1):
                raise DomainError(f"edge sign must be +1 or -1, got {e.sign}")
        out = {v: [] for v in range(1, self.vertex_count + 1)}
        for e in edges:
            out[e.source].append(e)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "_out", out)

    def out_edges(self, v: int) -> list[Edge]:
        return self._out[v]

    def edge_signs(self, u: int, v: int) -> list[int]:
        return [e.sign for e in self._out[u] if e.target == v]

    def has_edge(self, u: int, v: int) -> bool:
        return any(e.target == v for e in self._out[u])

    def markov_matrix(self) -> SignedMatrix:
        d = self.vertex_count
        rows = [[0] * d for _ in range(d)]
        for e in self.edges:
            rows[e.target - 1][e.source - 1] += 1
        return SignedMatrix(tuple(map(tuple, rows)))

    def oriented_matrix(self) -> SignedMatrix:
        d = self.vertex_count
        rows = [[0] * d for _ in range(d)]
        for e in self.edges:
            rows[e.target - 1][e.source - 1] += e.sign
        return SignedMatrix(tuple(map(tuple, rows)))

    def to_dot(self, name: str = "markov") -> str:
        lines = [f"digraph {name} {{"]
        for v in range(1, self.vertex_count + 1):
            lines.append(f"  E{v};")
        for e in self.edges:
            label = "+" if e.sign > 0 else "-"
            lines.append(f'  E{e.source} -> E{e.target} [label="{label}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        return {
            "vertex_count": self.vertex_count,
            "edges": [[e.source, e.target, e.sign] for e in self.edges],
        }


def _check(theta: Permutation):
    if theta.n < 2:
        raise DomainError("Markov constructions need a permutation of at least 2 points")


def markov_graph(theta: Permutation) -> MarkovGraph:
    """Oriented Markov graph of the connect-the-dots map of ``theta``.

    E_i = [i, i+1] covers E_j when [j, j+1] lies inside the image of E_i;
    the sign records whether the linear piece over E_i is increasing.
    """
    _check(theta)
    edges = []
    for i in range(1, theta.n):
        lo, hi = theta(i), theta(i + 1)
        sign = 1 if lo < hi else -1
        for j in range(min(lo, hi), max(lo, hi)):
            edges.append(Edge(i, j, sign))
    return MarkovGraph(theta.n - 1, tuple(edges))


def markov_matrix(theta: Permutation) -> SignedMatrix:
    return markov_graph(theta).markov_matrix()


def om_of(theta: Permutation) -> SignedMatrix:
    return markov_graph(theta).oriented_matrix()


def graph_from_matrices(m: SignedMatrix, om: SignedMatrix) -> MarkovGraph:
    """Rebuild a signed graph from M and OM, for matrices with entries in {-1, 0, 1}."""
    if m.d != om.d:
        raise DimensionError("M and OM differ in size")
    edges = []
    for i in range(m.d):
        for j in range(m.d):
            if m[i, j] == 0:
                continue
            if m[i, j] != 1 or abs(om[i, j]) != 1:
                raise DomainError("graph_from_matrices needs a simple signed graph; pass edges explicitly")
            edges.append(Edge(j + 1, i + 1, om[i, j]))
    return MarkovGraph(m.d, tuple(edges))
