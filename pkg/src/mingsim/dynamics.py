"""Ming Hamiltonian and exact evolution of particle-amplifier states.

On each rotation orbit the Ming generator ``A`` is ``(h / 2pi) log P`` where
``P`` is the cyclic shift sending orbit position ``j`` to ``j + 1``.  ``P`` is
diagonalised by the discrete Fourier transform: mode ``k`` has eigenvalue
``exp(2pi i k / n)``.  We freeze the log branch ``2pi i k / n`` with
``k in {0, ..., n-1}``, which gives diagonal entries ``i h (n-1) / (2n)``.

Evolution for time ``t`` is ``exp((2pi/h) t A)``; the factor ``h`` cancels, so
trajectories are computed with FFTs in O(n log n) per orbit and never touch a
2**n dimensional vector.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace

import numpy as np

from mingsim.errors import CapExceeded
from mingsim.orbits import Orbit, orbit_of

# dense validation path (explicit n x n blocks, 2**n states) is limited to this n
VALIDATION_CAP = 12


@dataclass(frozen=True)
class PhysicalScale:
    """Action unit for an n-oscillator amplifier, rescaled as ``h0 / n``."""

    n: int
    h0: float = 1.0

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"n must be positive, got {self.n}")
        if not self.h0 > 0:
            raise ValueError(f"h0 must be positive, got {self.h0}")

    @property
    def h(self) -> float:
        return self.h0 / self.n


def ming_entry(row: int, col: int, n: int, scale: PhysicalScale | float) -> complex:
    """Entry ``(row, col)`` of the Ming block in orbit-position coordinates.

    Closed form of ``(i h / n**2) * sum_k k * exp(2pi i k (col - row) / n)``:
    ``i h (n-1) / (2n)`` on the diagonal and
    ``h exp(-i theta/2) / (2n sin(theta/2))`` with ``theta = 2pi (col-row) / n``
    off it.  For ``|col - row| << n`` this is about ``h / (2pi (col - row))``.
    """
    if not (0 <= row < n and 0 <= col < n):
        raise IndexError(f"({row}, {col}) outside a {n}x{n} block")
    h = scale.h if isinstance(scale, PhysicalScale) else float(scale)
    m = (col - row) % n
    if m == 0:
        return 1j * h * (n - 1) / (2 * n)
    half = math.pi * m / n
    return h * cmath.exp(-1j * half) / (2 * n * math.sin(half))


def dense_ming_block(n: int, scale: PhysicalScale | float) -> np.ndarray:
    """The full n x n Ming block, for validation at small n only."""
    if n > VALIDATION_CAP:
        raise CapExceeded(f"dense blocks are limited to n <= {VALIDATION_CAP}")
    return np.array([[ming_entry(r, c, n, scale) for c in range(n)] for r in range(n)])


def cycle_matrix(n: int) -> np.ndarray:
    """Permutation matrix sending orbit position j to j + 1 (mod n)."""
    return np.roll(np.eye(n), 1, axis=0)


def evolve_orbit(
    amplitudes: np.ndarray,
    t: float,
    n: int | None = None,
    scale: PhysicalScale | None = None,
) -> np.ndarray:
    """Evolve amplitudes on one orbit for time ``t``.

    Computes ``F diag(exp(2pi i k t / n)) F* v`` with ``F`` the unitary DFT
    whose columns are the eigenvectors of the cycle.  ``scale`` is accepted for
    symmetry with the generator but does not enter: ``h`` cancels exactly.
    """
    v = np.asarray(amplitudes, dtype=complex)
    if n is None:
        n = v.shape[-1]
    elif v.shape[-1] != n:
        raise ValueError(f"vector of length {v.shape[-1]} does not fit an orbit of length {n}")
    if not math.isfinite(t):
        raise ValueError(f"t must be finite, got {t}")
    # reduce first: the trajectory has period n and large t loses phase accuracy
    t = math.fmod(t, n)
    k = np.arange(n)
    # ifft(ortho) gives coefficients on the eigenvectors exp(-2pi i j k / n) / sqrt(n)
    coeffs = np.fft.ifft(v, norm="ortho")
    return np.fft.fft(coeffs * np.exp(2j * np.pi * k * t / n), norm="ortho")


def dense_orbit_propagator(n: int, t: float, scale: PhysicalScale | float = 1.0) -> np.ndarray:
    """``expm((2pi/h) t A)`` from the explicit Ming block (validation path)."""
    from scipy.linalg import expm

    h = scale.h if isinstance(scale, PhysicalScale) else float(scale)
    return expm((2 * math.pi / h) * t * dense_ming_block(n, h))


@dataclass(frozen=True)
class Branch:
    """Amplifier amplitudes tracked orbit by orbit.

    ``blocks`` pairs each tracked Orbit with its length-n amplitude vector in
    rotation order; ``fixed`` holds the amplitudes of the all-zeros and
    all-ones states, which never move.
    """

    n: int
    blocks: tuple[tuple[Orbit, np.ndarray], ...] = ()
    fixed: tuple[complex, complex] = (0j, 0j)

    @classmethod
    def basis(cls, value: int, n: int) -> Branch:
        top = (1 << n) - 1
        if value == 0:
            return cls(n, (), (1 + 0j, 0j))
        if value == top:
            return cls(n, (), (0j, 1 + 0j))
        orbit = orbit_of(value, n)
        vec = np.zeros(n, dtype=complex)
        vec[orbit.position(value)] = 1.0
        return cls(n, ((orbit, vec),))

    def amplitude(self, value: int) -> complex:
        if value == 0:
            return self.fixed[0]
        if value == (1 << self.n) - 1:
            return self.fixed[1]
        for orbit, vec in self.blocks:
            if value in orbit.members:
                return complex(vec[orbit.position(value)])
        return 0j

    def norm_sq(self) -> float:
        total = abs(self.fixed[0]) ** 2 + abs(self.fixed[1]) ** 2
        for _, vec in self.blocks:
            total += float(np.vdot(vec, vec).real)
        return total

    def scaled(self, c: complex) -> Branch:
        return Branch(
            self.n,
            tuple((orbit, c * vec) for orbit, vec in self.blocks),
            (c * self.fixed[0], c * self.fixed[1]),
        )

    def evolved(self, t: float) -> Branch:
        return replace(
            self, blocks=tuple((orbit, evolve_orbit(vec, t, orbit.length)) for orbit, vec in self.blocks)
        )

    def to_dense(self) -> np.ndarray:
        if self.n > VALIDATION_CAP:
            raise CapExceeded(f"dense vectors are limited to n <= {VALIDATION_CAP}")
        out = np.zeros(1 << self.n, dtype=complex)
        out[0], out[-1] = self.fixed
        for orbit, vec in self.blocks:
            out[list(orbit.members)] = vec
        return out


@dataclass(frozen=True)
class CombinedState:
    """``a0 psi0 (x) branch0 + a1 psi1 (x) branch1``.

    Branches are kept separately normalised where possible, so ``a0`` and
    ``a1`` stay the particle amplitudes throughout the evolution.
    """

    n: int
    a0: complex
    a1: complex
    branch0: Branch
    branch1: Branch

    @classmethod
    def product(cls, a0: complex, a1: complex, apparatus: int, n: int) -> CombinedState:
        """Particle ``a0 psi0 + a1 psi1`` times the amplifier basis state ``apparatus``."""
        b = Branch.basis(apparatus, n)
        return cls(n, complex(a0), complex(a1), b, b)

    @property
    def norm(self) -> float:
        return math.sqrt(
            abs(self.a0) ** 2 * self.branch0.norm_sq() + abs(self.a1) ** 2 * self.branch1.norm_sq()
        )

    def normalized(self) -> CombinedState:
        nrm = self.norm
        if nrm == 0:
            raise ValueError("cannot normalise the zero state")
        return replace(self, a0=self.a0 / nrm, a1=self.a1 / nrm)

    def to_dense(self) -> np.ndarray:
        """Dense vector ordered (psi0 block, psi1 block); validation only."""
        return np.concatenate([self.a0 * self.branch0.to_dense(), self.a1 * self.branch1.to_dense()])


def evolve_combined(state: CombinedState, t: float, idle_phase_rate: float = 0.0) -> CombinedState:
    """Evolve for time ``t``: Ming dynamics on the psi1 branch only.

    The psi0 branch has zero generator.  A nonzero ``idle_phase_rate`` adds a
    constant energy to that branch (phase ``exp(-i rate t)``); pointer
    quantities do not depend on it.
    """
    branch0 = state.branch0
    if idle_phase_rate:
        branch0 = branch0.scaled(cmath.exp(-1j * idle_phase_rate * t))
    return replace(state, branch0=branch0, branch1=state.branch1.evolved(t))
