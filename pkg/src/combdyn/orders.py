"""Forcing orders on the positive integers: Sharkovsky, basic, and tree.

All forced sets are infinite, so every function here takes an explicit
upper bound ``K`` and returns the members <= K.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DomainError

LESS, EQUAL, GREATER = -1, 0, 1


@dataclass(frozen=True)
class PeriodClass:
    """n = 2**k * s with s odd."""

    k: int
    s: int

    @classmethod
    def of(cls, n: int) -> PeriodClass:
        if n < 1:
            raise DomainError(f"period must be positive, got {n}")
        k = (n & -n).bit_length() - 1
        return cls(k, n >> k)

    @property
    def value(self) -> int:
        return (1 << self.k) * self.s

    @property
    def is_power_of_two(self) -> bool:
        return self.s == 1


def divisors(k: int) -> list[int]:
    if k < 1:
        raise DomainError("divisors needs k >= 1")
    small, large = [], []
    d = 1
    while d * d <= k:
        if k % d == 0:
            small.append(d)
            if d * d != k:
                large.append(k // d)
        d += 1
    return small + large[::-1]


def mobius(d: int) -> int:
    if d < 1:
        raise DomainError("mobius needs d >= 1")
    result = 1
    p = 2
    while p * p <= d:
        if d % p == 0:
            d //= p
            if d % p == 0:
                return 0
            result = -result
        p += 1
    if d > 1:
        result = -result
    return result


def _shark_key(n: int):
    # Larger key means further right in the Sharkovsky order.
    pc = PeriodClass.of(n)
    if pc.is_power_of_two:
        return (0, pc.k, 0)
    return (1, -pc.k, -pc.s)


def shark_cmp(m: int, n: int) -> int:
    """LESS when m precedes n in the Sharkovsky order (n forces m)."""
    if m < 1 or n < 1:
        raise DomainError("Sharkovsky order is defined on positive integers")
    a, b = _shark_key(m), _shark_key(n)
    return (a > b) - (a < b)


def shark_forced(n: int, K: int) -> set[int]:
    """Periods forced by period n on the line, truncated at K (n included)."""
    return {m for m in range(1, K + 1) if shark_cmp(m, n) <= EQUAL}


def basic_forced(n: int, K: int) -> set[int]:
    """Periods forced by the power-of-two and 2^k*s trace lemmas alone."""
    pc = PeriodClass.of(n)
    out = set()
    if pc.is_power_of_two:
        out = {1 << l for l in range(pc.k + 1) if (1 << l) <= K}
    else:
        out.update(1 << l for l in range(K.bit_length()) if (1 << l) <= K)
        for m in range(1, K + 1):
            q = PeriodClass.of(m)
            if q.is_power_of_two:
                continue
            if q.k == pc.k and q.s >= pc.s:
                out.add(m)
            elif q.k > pc.k and (1 << (q.k - pc.k)) * q.s > pc.s:
                out.add(m)
    if n <= K:
        out.add(n)
    return out


def remove_ones(v: int) -> list[int]:
    """Clear the lowest set bit of v repeatedly: 31 -> [30, 28, 24, 16, 0]."""
    if v < 1:
        raise DomainError("remove_ones needs v >= 1")
    out = []
    while v:
        v &= v - 1
        out.append(v)
    return out


def tree_forced(v: int, K: int) -> set[int]:
    """Periods forced on a tree whose v vertices form one periodic orbit.

    The 2^p * r clause takes every integer r >= q, not just odd r.
    """
    if v < 2:
        raise DomainError("tree_forced needs v >= 2")
    pc = PeriodClass.of(v)
    out = set()
    if pc.is_power_of_two:
        out.update(1 << l for l in range(pc.k + 1) if (1 << l) <= K)
    else:
        out.update(1 << l for l in range(K.bit_length()) if (1 << l) <= K)
        r = pc.s
        while (1 << pc.k) * r <= K:
            out.add((1 << pc.k) * r)
            r += 1
    out.update(m for m in remove_ones(v) if 0 < m <= K)
    if v <= K:
        out.add(v)
    return out


FORCING_MODELS = {
    "sharkovsky": shark_forced,
    "basic": basic_forced,
    "tree": tree_forced,
}
