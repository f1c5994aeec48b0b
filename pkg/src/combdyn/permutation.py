"""Finite permutations of {1, ..., n}.

Points are 1-indexed everywhere a caller can see them. ``compose(a, b)``
applies ``b`` first, so ``compose(a, b)(i) == a(b(i))``.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from functools import reduce

from .errors import DimensionError, DomainError


@dataclass(frozen=True)
class Permutation:
    """A bijection of {1, ..., n}; ``image[i - 1]`` is the image of ``i``."""

    n: int
    image: tuple[int, ...]

    def __post_init__(self):
        image = tuple(int(x) for x in self.image)
        object.__setattr__(self, "image", image)
        if self.n < 1:
            raise DomainError("a permutation needs n >= 1")
        if len(image) != self.n or sorted(image) != list(range(1, self.n + 1)):
            raise DomainError(f"image {list(image)} is not a bijection of 1..{self.n}")

    @classmethod
    def from_image(cls, image) -> Permutation:
        image = tuple(image)
        return cls(len(image), image)

    @classmethod
    def identity(cls, n: int) -> Permutation:
        return cls(n, tuple(range(1, n + 1)))

    @classmethod
    def from_cycles(cls, cycles, n: int | None = None) -> Permutation:
        """Build from disjoint cycles, e.g. ``[(1, 3), (2, 4)]``.

        ``(1, 2, 3, 4)`` means 1 -> 2 -> 3 -> 4 -> 1.  ``n`` defaults to the
        largest point mentioned.
        """
        cycles = [tuple(int(x) for x in c) for c in cycles]
        points = [x for c in cycles for x in c]
        if len(points) != len(set(points)):
            raise DomainError(f"cycles {cycles} are not disjoint")
        if n is None:
            n = max(points, default=1)
        if points and (min(points) < 1 or max(points) > n):
            raise DomainError(f"cycle points must lie in 1..{n}")
        image = list(range(1, n + 1))
        for c in cycles:
            for a, b in zip(c, c[1:] + c[:1]):
                image[a - 1] = b
        return cls(n, tuple(image))

    @classmethod
    def parse(cls, text: str, n: int | None = None) -> Permutation:
        """Parse ``"1,2,3,4"`` (one cycle) or ``"(1,3)(2,4)"`` (cycle notation)."""
        text = text.strip()
        if "(" in text:
            groups = re.findall(r"\(([^()]*)\)", text)
            if not groups or re.sub(r"\([^()]*\)", "", text).strip():
                raise DomainError(f"cannot parse cycle notation {text!r}")
            cycles = [_parse_ints(g) for g in groups]
        else:
            cycles = [_parse_ints(text)]
        return cls.from_cycles(cycles, n)

    def __call__(self, i: int) -> int:
        return self.image[i - 1]

    def __mul__(self, other: Permutation) -> Permutation:
        return compose(self, other)

    def inverse(self) -> Permutation:
        inv = [0] * self.n
        for i, j in enumerate(self.image, start=1):
            inv[j - 1] = i
        return Permutation(self.n, tuple(inv))

    def cycles(self) -> list[tuple[int, ...]]:
        """Disjoint cycles (fixed points included), each starting at its least point."""
        seen = set()
        out = []
        for start in range(1, self.n + 1):
            if start in seen:
                continue
            cyc = [start]
            seen.add(start)
            x = self(start)
            while x != start:
                cyc.append(x)
                seen.add(x)
                x = self(x)
            out.append(tuple(cyc))
        return out

    def is_identity(self) -> bool:
        return all(x == i for i, x in enumerate(self.image, start=1))

    def is_cycle(self) -> bool:
        """True for a single n-cycle (n >= 2)."""
        return self.n >= 2 and len(self.cycles()) == 1

    def order(self) -> int:
        return reduce(math.lcm, cycle_type(self), 1)

    def to_json(self) -> dict:
        return {"n": self.n, "image": list(self.image)}

    @classmethod
    def from_json(cls, data: dict) -> Permutation:
        return cls(int(data["n"]), tuple(data["image"]))

    def __str__(self):
        if self.is_identity():
            return f"id_{self.n}"
        return "".join("(" + ",".join(map(str, c)) + ")" for c in self.cycles() if len(c) > 1)


def _parse_ints(text: str) -> tuple[int, ...]:
    parts = [p for p in re.split(r"[,\s]+", text.strip()) if p]
    try:
        return tuple(int(p) for p in parts)
    except ValueError:
        raise DomainError(f"cannot parse {text!r} as a list of integers") from None


def compose(alpha: Permutation, beta: Permutation) -> Permutation:
    """The permutation ``i -> alpha(beta(i))``."""
    if alpha.n != beta.n:
        raise DimensionError(f"cannot compose permutations of sizes {alpha.n} and {beta.n}")
    return Permutation(alpha.n, tuple(alpha.image[j - 1] for j in beta.image))


def power(theta: Permutation, k: int) -> Permutation:
    if k < 0:
        return power(theta.inverse(), -k)
    result = Permutation.identity(theta.n)
    base = theta
    while k:
        if k & 1:
            result = compose(base, result)
        base = compose(base, base)
        k >>= 1
    return result


def cycle_type(theta: Permutation) -> tuple[int, ...]:
    """Cycle lengths in non-increasing order; fixed points count as 1s."""
    return tuple(sorted((len(c) for c in theta.cycles()), reverse=True))


def fixed_points(theta: Permutation) -> set[int]:
    return {i for i, x in enumerate(theta.image, start=1) if x == i}


def enumerate_cycles(n: int):
    """Yield the (n-1)! cyclic permutations of {1..n}.

    Order is lexicographic in the cycle written from 1: (1, a_2, ..., a_n).
    """
    if n < 2:
        raise DomainError("enumerate_cycles needs n >= 2")
    for rest in itertools.permutations(range(2, n + 1)):
        yield Permutation.from_cycles([(1,) + rest], n)


def enumerate_permutations(n: int):
    """All n! permutations, in lexicographic order of their image arrays."""
    for image in itertools.permutations(range(1, n + 1)):
        yield Permutation(n, image)
