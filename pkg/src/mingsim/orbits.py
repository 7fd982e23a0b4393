"""Rotation orbits of n-bit strings.

Basis states of the n-oscillator amplifier are labelled by integers in
``[0, 2**n)``; bit ``p`` is the excitation of oscillator ``p``.  One unit of
Ming evolution cycles the digits ``d_0 d_1 ... d_{n-1}`` to
``d_{n-1} d_0 ... d_{n-2}``, which is doubling modulo ``2**n - 1`` with the
all-zeros and all-ones strings fixed.  For prime ``n`` every other string lies
on an orbit of length exactly ``n``, so there are ``(2**n - 2) / n`` of them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from mingsim.errors import CapExceeded, FixedPointInput, NonPrimeN

# largest n for which decompose() enumerates all 2**n indices
DECOMPOSE_CAP = 20


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    for f in range(3, math.isqrt(n) + 1, 2):
        if n % f == 0:
            return False
    return True


def require_prime(n: int) -> None:
    if not is_prime(n):
        raise NonPrimeN(f"n={n} is not prime")


def rotate_value(value: int, n: int) -> int:
    """Cycle the n digits of ``value`` one step (bit n-1 moves to bit 0)."""
    return ((value << 1) | (value >> (n - 1))) & ((1 << n) - 1)


@dataclass(frozen=True)
class BasisIndex:
    """An n-bit basis label; bit ``p`` of ``value`` is digit ``d_p``."""

    value: int
    n: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"n must be positive, got {self.n}")
        if not 0 <= self.value < (1 << self.n):
            raise ValueError(f"value {self.value} outside [0, 2**{self.n})")

    @property
    def digits(self) -> tuple[int, ...]:
        return tuple((self.value >> p) & 1 for p in range(self.n))

    @property
    def is_fixed_point(self) -> bool:
        return self.value == 0 or self.value == (1 << self.n) - 1

    def __int__(self) -> int:
        return self.value


def rotate(i: BasisIndex) -> BasisIndex:
    return BasisIndex(rotate_value(i.value, i.n), i.n)


@dataclass(frozen=True)
class Orbit:
    """A rotation cycle, listed from its numerically smallest member.

    ``members[j + 1] == rotate(members[j])`` and the list wraps around.
    Members are stored as plain ints to keep large-n orbits cheap.
    """

    n: int
    members: tuple[int, ...] = field(repr=False)

    @property
    def representative(self) -> int:
        return self.members[0]

    @property
    def length(self) -> int:
        return len(self.members)

    def position(self, value: int) -> int:
        return self.members.index(value)

    def __contains__(self, value: object) -> bool:
        if isinstance(value, BasisIndex):
            value = value.value
        return value in self.members

    def __len__(self) -> int:
        return len(self.members)

    def __repr__(self) -> str:
        if self.length <= 8:
            return f"Orbit(n={self.n}, members={self.members})"
        return f"Orbit(n={self.n}, representative={self.representative:#x}, length={self.length})"


def _cycle(value: int, n: int) -> list[int]:
    cycle = [value]
    v = rotate_value(value, n)
    while v != value:
        cycle.append(v)
        v = rotate_value(v, n)
    return cycle


def _canonical(cycle: list[int], n: int) -> Orbit:
    start = min(range(len(cycle)), key=cycle.__getitem__)
    return Orbit(n, tuple(cycle[start:] + cycle[:start]))


def orbit_of(i: BasisIndex | int, n: int | None = None) -> Orbit:
    """Return the rotation cycle through ``i`` without enumerating 2**n states.

    Runs in O(n) big-integer operations, so it is usable for n in the tens
    of thousands.
    """
    if not isinstance(i, BasisIndex):
        if n is None:
            raise TypeError("n is required when i is a plain int")
        i = BasisIndex(i, n)
    if i.is_fixed_point:
        raise FixedPointInput(f"{i.value} is a fixed point of the rotation")
    return _canonical(_cycle(i.value, i.n), i.n)


@dataclass(frozen=True)
class OrbitDecomposition:
    n: int
    orbits: tuple[Orbit, ...]
    fixed_points: tuple[int, int]

    @property
    def q(self) -> int:
        return len(self.orbits)

    def orbit_containing(self, value: int) -> Orbit:
        for orbit in self.orbits:
            if value in orbit.members:
                return orbit
        raise FixedPointInput(f"{value} is a fixed point of the rotation")


def decompose(n: int) -> OrbitDecomposition:
    """Partition ``[0, 2**n)`` into rotation orbits plus the two fixed points.

    Orbits are sorted by representative.  Raises NonPrimeN for composite n and
    CapExceeded above DECOMPOSE_CAP.
    """
    require_prime(n)
    if n > DECOMPOSE_CAP:
        raise CapExceeded(f"decompose is capped at n <= {DECOMPOSE_CAP}; use orbit_of")
    top = (1 << n) - 1
    seen = bytearray(1 << n)
    seen[0] = seen[top] = 1
    orbits = []
    for value in range(1, top):
        if seen[value]:
            continue
        # ascending scan: the first unseen member of a cycle is its minimum
        cycle = _cycle(value, n)
        for v in cycle:
            seen[v] = 1
        orbits.append(Orbit(n, tuple(cycle)))
    q, rem = divmod(top - 1, n)
    assert rem == 0 and q == len(orbits), "Fermat count violated"
    return OrbitDecomposition(n, tuple(orbits), (0, top))
