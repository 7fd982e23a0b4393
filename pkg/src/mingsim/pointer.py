"""Cocked set, pointer variable and its time averages.

The amplifier is *cocked* when its low ``ceil(n/2)`` oscillators are excited
and the rest are not, up to a sublinear number of defects.  The pointer
variable is one minus the weight a state puts on cocked basis vectors.  For
the particle state ``a0 psi0 + a1 psi1`` and the canonical cocked amplifier,
its infinite-time average is ``|a1|**2 * (1 - s/n)`` where ``s`` counts cocked
members on the canonical orbit, which tends to ``|a1|**2`` as ``n`` grows.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np

from mingsim.dynamics import CombinedState, evolve_combined
from mingsim.errors import NotNormalized, QuadratureUnderresolved
from mingsim.orbits import BasisIndex, Orbit, orbit_of, require_prime

NORM_TOL = 1e-9


@dataclass(frozen=True)
class BudgetRule:
    """How many defects a cocked state may carry at size n.

    ``zero`` allows none, ``sqrt`` allows ``floor(sqrt(n))`` and ``exponent``
    allows ``floor(n**gamma)`` for ``0 < gamma < 1``.
    """

    kind: str = "sqrt"
    gamma: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("zero", "sqrt", "exponent"):
            raise ValueError(f"unknown budget rule {self.kind!r}")
        if self.kind == "exponent" and not (self.gamma is not None and 0 < self.gamma < 1):
            raise ValueError(f"exponent rule needs 0 < gamma < 1, got {self.gamma}")

    def __call__(self, n: int) -> int:
        if self.kind == "zero":
            return 0
        if self.kind == "sqrt":
            return math.isqrt(n)
        return math.floor(n**self.gamma)

    def __str__(self) -> str:
        return f"exponent({self.gamma})" if self.kind == "exponent" else self.kind


@dataclass(frozen=True)
class PointerConfig:
    n: int
    rule: BudgetRule = field(default_factory=BudgetRule)

    @property
    def defect_budget(self) -> int:
        return self.rule(self.n)

    @property
    def half(self) -> int:
        return (self.n + 1) // 2

    @property
    def canonical_value(self) -> int:
        """``|1...10...0>``: the low ``half`` digits set."""
        return (1 << self.half) - 1

    @cached_property
    def _high_mask(self) -> int:
        return ((1 << self.n) - 1) ^ self.canonical_value


def defect_count(i: BasisIndex | int, config: PointerConfig) -> int:
    """Unexcited oscillators below ``half`` plus excited ones at or above it."""
    value = i.value if isinstance(i, BasisIndex) else i
    low_missing = config.half - (value & config.canonical_value).bit_count()
    high_present = (value & config._high_mask).bit_count()
    return low_missing + high_present


@dataclass(frozen=True)
class CockedSet:
    """Basis vectors ``psi_eps (x) |i>`` whose amplifier label is within budget.

    Membership does not depend on the particle label ``eps``.
    """

    config: PointerConfig

    @property
    def canonical_state(self) -> int:
        return self.config.canonical_value

    def __contains__(self, item: tuple[int, int] | int) -> bool:
        value = item[1] if isinstance(item, tuple) else item
        return defect_count(value, self.config) <= self.config.defect_budget

    def orbit_mask(self, orbit: Orbit) -> np.ndarray:
        budget = self.config.defect_budget
        return np.fromiter(
            (defect_count(v, self.config) <= budget for v in orbit.members), dtype=bool, count=orbit.length
        )

    def fixed_mask(self) -> tuple[bool, bool]:
        return (0 in self, ((1 << self.config.n) - 1) in self)


def cocked_mass(state: CombinedState, cocked: CockedSet, _masks: dict | None = None) -> float:
    """Total squared amplitude on cocked basis vectors."""
    fixed_in = cocked.fixed_mask()
    total = 0.0
    for amp, branch in ((state.a0, state.branch0), (state.a1, state.branch1)):
        w = abs(amp) ** 2
        if w == 0:
            continue
        mass = sum(abs(c) ** 2 for c, inside in zip(branch.fixed, fixed_in) if inside)
        for orbit, vec in branch.blocks:
            if _masks is not None:
                # keyed by identity: hashing a long orbit tuple costs O(n)
                mask = _masks.get(id(orbit))
                if mask is None:
                    mask = _masks[id(orbit)] = cocked.orbit_mask(orbit)
            else:
                mask = cocked.orbit_mask(orbit)
            sub = vec[mask]
            mass += float(np.vdot(sub, sub).real)
        total += w * mass
    return total


def _check_normalized(state: CombinedState) -> None:
    if abs(state.norm - 1.0) > NORM_TOL:
        raise NotNormalized(f"state norm {state.norm!r} deviates from 1")


def pointer_value(state: CombinedState, cocked: CockedSet, _masks: dict | None = None) -> float:
    """``1 - sum |c_i|**2`` over the cocked basis vectors."""
    _check_normalized(state)
    # clamp rounding below zero; the upper side stays within 1 + 1e-12
    return max(0.0, 1.0 - cocked_mass(state, cocked, _masks))


def indicator_pointer_value(
    state: CombinedState, cocked: CockedSet, tol: float = 1e-12, _masks: dict | None = None
) -> float:
    """0 if the state lies in the span of the cocked vectors, else 1.

    A legitimate macroscopic variable that does not reproduce Born weights.
    """
    _check_normalized(state)
    return 0.0 if cocked_mass(state, cocked, _masks) >= 1.0 - tol else 1.0


POINTERS: dict[str, Callable[..., float]] = {
    "default": pointer_value,
    "indicator": indicator_pointer_value,
}


@dataclass(frozen=True)
class TimeAverageResult:
    n: int
    value: float
    method: str
    s_over_n: Fraction
    a0: complex
    a1: complex
    config: PointerConfig

    @property
    def s(self) -> int:
        return int(self.s_over_n * self.n)

    @property
    def p1(self) -> float:
        return _weight(self.a1)


def _weight(a: complex) -> float:
    a = complex(a)
    return a.real * a.real + a.imag * a.imag


def _check_pair(a0: complex, a1: complex) -> tuple[complex, complex]:
    a0, a1 = complex(a0), complex(a1)
    if abs(_weight(a0) + _weight(a1) - 1.0) > NORM_TOL:
        raise NotNormalized(f"|a0|^2 + |a1|^2 = {_weight(a0) + _weight(a1)!r}")
    return a0, a1


def _start_index(config: PointerConfig, start: int | None) -> int:
    if start is None:
        return config.canonical_value
    if defect_count(start, config) > config.defect_budget:
        raise ValueError(f"start state {start} is not in the cocked set")
    return start


def cocked_on_orbit(config: PointerConfig, start: int | None = None) -> int:
    """Number of cocked members on the orbit through ``start`` (canonical by default).

    Walks the single orbit, O(n) big-integer operations.
    """
    orbit = orbit_of(_start_index(config, start), config.n)
    budget = config.defect_budget
    return sum(defect_count(v, config) <= budget for v in orbit.members)


def time_average_spectral(
    a0: complex, a1: complex, config: PointerConfig, start: int | None = None
) -> TimeAverageResult:
    """Exact infinite-time average of the pointer from a cocked start.

    The psi0 branch sits still on a cocked vector.  On the psi1 branch the
    amplitude at each orbit position is a sum of distinct harmonics of equal
    weight ``1/n**2``, so every position is occupied ``1/n`` of the time.
    """
    a0, a1 = _check_pair(a0, a1)
    require_prime(config.n)
    s = cocked_on_orbit(config, start)
    s_over_n = Fraction(s, config.n)
    value = _weight(a1) * (1.0 - s / config.n)
    return TimeAverageResult(config.n, value, "spectral", s_over_n, a0, a1, config)


def time_average_quadrature(
    a0: complex,
    a1: complex,
    config: PointerConfig,
    steps: int,
    *,
    start: int | None = None,
    pointer: str = "default",
    idle_phase_rate: float = 0.0,
) -> TimeAverageResult:
    """Average the pointer over one period ``[0, n]`` by the periodic rectangle rule.

    Every frequency on the trajectory is a multiple of ``2pi/n`` with index
    below ``n``, so ``steps >= 2n + 1`` samples integrate the smooth pointer
    exactly up to rounding.
    """
    a0, a1 = _check_pair(a0, a1)
    n = config.n
    require_prime(n)
    if steps < 2 * n + 1:
        raise QuadratureUnderresolved(f"steps={steps} < 2n+1={2 * n + 1}")
    f = POINTERS[pointer]
    cocked = CockedSet(config)
    state0 = CombinedState.product(a0, a1, _start_index(config, start), n)
    masks: dict = {}
    dt = n / steps
    total = 0.0
    for m in range(steps):
        state = evolve_combined(state0, m * dt, idle_phase_rate=idle_phase_rate)
        total += f(state, cocked, _masks=masks)
    s = cocked_on_orbit(config, start)
    return TimeAverageResult(n, total / steps, "quadrature", Fraction(s, n), a0, a1, config)


def indicator_time_average(a0: complex, a1: complex, config: PointerConfig) -> float:
    """Exact time average of the indicator pointer from the canonical state.

    Off integer times every orbit amplitude is nonzero, so the trajectory
    meets the span of the cocked vectors only on a null set of times unless
    the whole orbit is cocked.
    """
    a0, a1 = _check_pair(a0, a1)
    if _weight(a1) == 0 or cocked_on_orbit(config) == config.n:
        return 0.0
    return 1.0


@dataclass(frozen=True)
class SweepRow:
    n: int
    s: int
    s_over_n: float
    avg_spectral: float
    avg_quadrature: float | None
    residual: float


def _sweep_row(
    n: int, a0: complex, a1: complex, rule: BudgetRule, steps_per_n: int | None
) -> SweepRow:
    config = PointerConfig(n, rule)
    spec = time_average_spectral(a0, a1, config)
    quad = None
    if steps_per_n is not None:
        quad = time_average_quadrature(a0, a1, config, steps_per_n * n).value
    return SweepRow(n, spec.s, float(spec.s_over_n), spec.value, quad, abs(spec.value - _weight(a1)))


def convergence_sweep(
    n_list: Sequence[int],
    a0: complex,
    a1: complex,
    rule: BudgetRule | None = None,
    steps_per_n: int | None = 10,
    jobs: int = 1,
) -> list[SweepRow]:
    """One row per prime n: spectral average, quadrature, residual to ``|a1|**2``.

    Quadrature uses ``steps_per_n * n`` samples; ``None`` skips it.
    """
    rule = rule or BudgetRule()
    a0, a1 = _check_pair(a0, a1)
    for n in n_list:
        require_prime(n)
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(lambda n: _sweep_row(n, a0, a1, rule, steps_per_n), n_list))
    return [_sweep_row(n, a0, a1, rule, steps_per_n) for n in n_list]


# ---------------------------------------------------------------------------
# macroscopic sequences: pointer values on product states


def _site_excitation_probs(sites: Sequence[Sequence[complex]]) -> np.ndarray:
    arr = np.asarray(sites, dtype=complex).reshape(-1, 2)
    norms = np.sum(np.abs(arr) ** 2, axis=1)
    if np.any(np.abs(norms - 1.0) > NORM_TOL):
        raise NotNormalized("site vectors must have norm one")
    return np.abs(arr[:, 1]) ** 2 / norms


def product_cocked_mass(sites: Sequence[Sequence[complex]], rule: BudgetRule) -> float:
    """Cocked weight of a product amplifier state ``(x)_p (c0_p |0> + c1_p |1>)``.

    Defects at different sites are independent Bernoulli events, so this is a
    Poisson-binomial CDF evaluated by dynamic programming up to the budget.
    """
    excite = _site_excitation_probs(sites)
    n = len(excite)
    half = (n + 1) // 2
    defect = np.where(np.arange(n) < half, 1.0 - excite, excite)
    budget = rule(n)
    dist = np.zeros(budget + 1)
    dist[0] = 1.0
    for p in defect:
        dist[1:] = dist[1:] * (1.0 - p) + dist[:-1] * p
        dist[0] *= 1.0 - p
    return float(dist.sum())


def product_pointer_value(
    sites: Sequence[Sequence[complex]], rule: BudgetRule, pointer: str = "default"
) -> float:
    # the particle factor drops out: cocked membership ignores eps
    mass = product_cocked_mass(sites, rule)
    if pointer == "indicator":
        return 0.0 if mass >= 1.0 - 1e-12 else 1.0
    return 1.0 - mass


@dataclass(frozen=True)
class Prefix:
    """Finite product prefix: particle amplitudes and the first ``n0`` site vectors."""

    particle: tuple[complex, complex]
    sites: tuple[tuple[complex, complex], ...] = ()

    @property
    def n0(self) -> int:
        return len(self.sites)


@dataclass(frozen=True)
class MacroReport:
    n_grid: tuple[int, ...]
    values: dict[int, tuple[float, ...]]  # prefix number -> value at each n
    spread: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.spread < self.tol

    @property
    def limit(self) -> float:
        return float(np.mean([v[-1] for v in self.values.values()]))


def macroscopic_check(
    prefixes: Sequence[Prefix],
    tail: Sequence[complex],
    n_grid: Sequence[int],
    rule: BudgetRule | None = None,
    pointer: str = "default",
    tol: float = 1e-3,
) -> MacroReport:
    """Evaluate ``f_{n0+n}(prefix (x) tail**n)`` along ``n_grid`` for each prefix.

    Passes when the values at the largest n differ across prefixes by less
    than ``tol``.
    """
    rule = rule or BudgetRule()
    tail = tuple(complex(c) for c in tail)
    values = {}
    for j, prefix in enumerate(prefixes):
        _check_pair(*prefix.particle)
        values[j] = tuple(
            product_pointer_value(list(prefix.sites) + [tail] * n, rule, pointer) for n in n_grid
        )
    last = [v[-1] for v in values.values()]
    return MacroReport(tuple(n_grid), values, max(last) - min(last), tol)


# ---------------------------------------------------------------------------
# classical limit


@dataclass(frozen=True)
class ClassicalLimit:
    """Two-point pointer space: P0 (no detection) and P1 (detection)."""

    weight_p0: float
    weight_p1: float
    points: tuple[str, str] = ("P0", "P1")

    def F(self, point: str) -> float:
        """Pointer position: the characteristic function of P1."""
        return 1.0 if point == "P1" else 0.0

    @property
    def expectation(self) -> float:
        return self.weight_p0 * self.F("P0") + self.weight_p1 * self.F("P1")


def classical_limit(a0: complex, a1: complex) -> ClassicalLimit:
    a0, a1 = _check_pair(a0, a1)
    p1 = _weight(a1) / (_weight(a0) + _weight(a1))
    return ClassicalLimit(1.0 - p1, p1)
