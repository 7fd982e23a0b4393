"""Born probabilities and projective reduction for finite-dimensional observables.

Used to reproduce the degeneracy paradox on two spin-1/2 particles: measuring
the degenerate first-spin observable ``Q`` leaves ``(|uu> + |ud>)/sqrt2``
untouched, while any perturbation ``Q_eps`` splitting ``|uu>`` from ``|ud>``
collapses it onto one of them, halving the later expectation of ``R``.

Basis order for two spins is ``|uu>, |ud>, |du>, |dd>``.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from mingsim.errors import IllFormedObservable, NotNormalized

PROB_FLOOR = 1e-15
RESOLUTION_TOL = 1e-12


@dataclass(frozen=True)
class Observable:
    """Self-adjoint operator given by its distinct eigenvalues and eigenspaces.

    Each eigenspace is an ``(dim, k)`` array of orthonormal columns; a
    degenerate eigenvalue simply has ``k > 1``.
    """

    eigenvalues: tuple[float, ...]
    eigenspaces: tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        if len(self.eigenvalues) != len(self.eigenspaces):
            raise IllFormedObservable("one eigenspace per eigenvalue required")
        if len(set(self.eigenvalues)) != len(self.eigenvalues):
            raise IllFormedObservable("eigenvalues must be distinct; merge degenerate eigenspaces")
        basis = np.hstack(self.eigenspaces)
        if basis.shape[0] != basis.shape[1]:
            raise IllFormedObservable(f"eigenspaces span {basis.shape[1]} of {basis.shape[0]} dimensions")
        if not np.allclose(basis.conj().T @ basis, np.eye(basis.shape[0]), atol=RESOLUTION_TOL, rtol=0):
            raise IllFormedObservable("eigenspaces are not an orthonormal resolution of the identity")

    @classmethod
    def from_eigenvectors(cls, pairs: Sequence[tuple[float, Sequence[Sequence[complex]]]]) -> Observable:
        """Build from ``(eigenvalue, [vector, ...])`` pairs; vectors are normalised, not orthogonalised."""
        values, spaces = [], []
        for value, vectors in pairs:
            cols = np.array(vectors, dtype=complex).T
            spaces.append(cols / np.linalg.norm(cols, axis=0))
            values.append(float(value))
        return cls(tuple(values), tuple(spaces))

    @classmethod
    def from_matrix(cls, matrix: np.ndarray, tol: float = 1e-9) -> Observable:
        """Diagonalise a Hermitian matrix, grouping eigenvalues closer than ``tol``."""
        matrix = np.asarray(matrix, dtype=complex)
        if not np.allclose(matrix, matrix.conj().T, atol=tol):
            raise IllFormedObservable("matrix is not Hermitian")
        w, v = np.linalg.eigh(matrix)
        values, spaces, start = [], [], 0
        for j in range(1, len(w) + 1):
            if j == len(w) or w[j] - w[start] > tol:
                values.append(float(np.mean(w[start:j])))
                spaces.append(v[:, start:j])
                start = j
        return cls(tuple(values), tuple(spaces))

    @property
    def dimension(self) -> int:
        return self.eigenspaces[0].shape[0]

    def projector(self, j: int) -> np.ndarray:
        e = self.eigenspaces[j]
        return e @ e.conj().T

    def matrix(self) -> np.ndarray:
        return sum(lam * self.projector(j) for j, lam in enumerate(self.eigenvalues))

    def expectation(self, state: np.ndarray) -> float:
        """``<psi|O|psi>`` via eigenspace weights."""
        return float(sum(lam * _weight_in(e, state) for lam, e in zip(self.eigenvalues, self.eigenspaces)))


@dataclass(frozen=True)
class MeasurementOutcome:
    eigenvalue: float
    probability: float
    post_state: np.ndarray


def _weight_in(space: np.ndarray, state: np.ndarray) -> float:
    c = space.conj().T @ state
    return float(np.vdot(c, c).real)


def _as_state(state: Sequence[complex]) -> np.ndarray:
    psi = np.asarray(state, dtype=complex)
    if abs(np.linalg.norm(psi) - 1.0) > 1e-9:
        raise NotNormalized(f"state norm {np.linalg.norm(psi)!r} deviates from 1")
    return psi


def measure(state: Sequence[complex], obs: Observable) -> list[MeasurementOutcome]:
    """All outcomes of measuring ``obs``: Born probability and reduced state.

    The post-measurement state is the normalised projection onto the whole
    eigenspace, so a state already inside a degenerate eigenspace is
    unchanged.
    """
    psi = _as_state(state)
    if psi.shape != (obs.dimension,):
        raise ValueError(f"state of shape {psi.shape} does not match dimension {obs.dimension}")
    outcomes = []
    for lam, space in zip(obs.eigenvalues, obs.eigenspaces):
        projected = space @ (space.conj().T @ psi)
        prob = float(np.vdot(projected, projected).real)
        if prob < PROB_FLOOR:
            continue
        outcomes.append(MeasurementOutcome(lam, prob, projected / math.sqrt(prob)))
    return outcomes


# ---------------------------------------------------------------------------
# two-spin degeneracy paradox

UU, UD, DU, DD = np.eye(4, dtype=complex)


def paradox_state() -> np.ndarray:
    """``(|uu> + |ud>) / sqrt2``."""
    return (UU + UD) / math.sqrt(2)


def spin_q(eps: float = 0.0) -> Observable:
    """First-spin observable; ``eps > 0`` splits the up eigenvalue into ``1 +- eps``."""
    if eps < 0:
        raise ValueError(f"eps must be nonnegative, got {eps}")
    down = (0.0, [DU, DD])
    if eps == 0:
        return Observable.from_eigenvectors([(1.0, [UU, UD]), down])
    return Observable.from_eigenvectors([(1.0 + eps, [UU]), (1.0 - eps, [UD]), down])


def observable_r() -> Observable:
    """1 on ``|uu> + |ud>``; 0 on ``|uu> - |ud>`` and on the spin-down space."""
    return Observable.from_eigenvectors([(1.0, [UU + UD]), (0.0, [UU - UD, DU, DD])])


def expectation_after(state: np.ndarray, measured: Observable, then: Observable) -> float:
    """Outcome-weighted expectation of ``then`` after reducing by ``measured``."""
    return sum(o.probability * then.expectation(o.post_state) for o in measure(state, measured))


def paradox_scan(eps_grid: Sequence[float]) -> list[tuple[float, float]]:
    """``(eps, <R>)`` after measuring ``Q_eps``: 1 at ``eps = 0``, 1/2 for every ``eps > 0``."""
    psi, r = paradox_state(), observable_r()
    return [(float(eps), expectation_after(psi, spin_q(eps), r)) for eps in eps_grid]


def sample_r_after(eps: float, samples: int, seed: int) -> float:
    """Monte Carlo estimate of ``<R>`` after ``Q_eps``: sample both measurements.

    Converges to ``paradox_scan`` at rate ``1/sqrt(samples)``.
    """
    rng = np.random.default_rng(seed)
    psi, r = paradox_state(), observable_r()
    first = measure(psi, spin_q(eps))
    probs = np.array([o.probability for o in first])
    picks = rng.choice(len(first), size=samples, p=probs / probs.sum())
    # <R> in each reduced state is the chance the R-measurement reads 1
    p_one = np.array([r.expectation(o.post_state) for o in first])
    hits = rng.random(samples) < p_one[picks]
    return float(hits.mean())


# ---------------------------------------------------------------------------
# qualitative smoothing demonstrator

SMOOTHING_NOTE = "illustrative, not derived from the paper"


@dataclass(frozen=True)
class LogisticSmoothing:
    """``<R>(eps) = 1/2 + 1 / (1 + exp(steepness * eps / width))``.

    Equals 1 at ``eps = 0``, decreases monotonically to 1/2, and tends to
    the sharp step of ``paradox_scan`` as ``width -> 0``.
    """

    width: float
    steepness: float = 4.0

    def __post_init__(self) -> None:
        if not self.width > 0:
            raise ValueError(f"width must be positive, got {self.width}")
        if not self.steepness > 0:
            raise ValueError(f"steepness must be positive, got {self.steepness}")

    def __call__(self, eps: float) -> float:
        return 0.5 + float(expit(-self.steepness * eps / self.width))

    def describe(self) -> dict:
        return {
            "model": "logistic",
            "formula": "0.5 + 1/(1 + exp(steepness*eps/width))",
            "width": self.width,
            "steepness": self.steepness,
            "note": SMOOTHING_NOTE,
        }


def smoothing_scan(eps_grid: Sequence[float], model: LogisticSmoothing) -> list[tuple[float, float]]:
    for eps in eps_grid:
        if eps < 0:
            raise ValueError(f"eps must be nonnegative, got {eps}")
    return [(float(eps), model(eps)) for eps in eps_grid]
