import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from conftest import spectral_power_oracle
from mingsim.dynamics import (
    Branch,
    CombinedState,
    PhysicalScale,
    cycle_matrix,
    dense_ming_block,
    dense_orbit_propagator,
    evolve_combined,
    evolve_orbit,
    ming_entry,
)
from mingsim.errors import CapExceeded


def entry_by_sum(row, col, n, h):
    """Literal Fourier sum for the frozen branch k = 0..n-1."""
    k = np.arange(n)
    return 1j * h / n**2 * np.sum(k * np.exp(2j * np.pi * k * (col - row) / n))


def test_physical_scale_rescaling():
    for n in (3, 101, 10007):
        s = PhysicalScale(n, h0=2.5)
        assert s.h * n == pytest.approx(2.5, rel=1e-15)
    with pytest.raises(ValueError):
        PhysicalScale(5, h0=0.0)


@pytest.mark.parametrize("n", [2, 3, 5, 8, 101])
def test_diagonal_entry(n):
    h = 0.7
    assert ming_entry(2 % n, 2 % n, n, h) == pytest.approx(1j * h * (n - 1) / (2 * n), abs=1e-15)


def test_diagonal_entry_tends_to_ih_over_2():
    assert ming_entry(0, 0, 100003, 1.0) == pytest.approx(0.5j, abs=1e-5)


@pytest.mark.parametrize("n", [3, 5, 7, 12])
def test_entry_matches_literal_sum(n):
    for r in range(n):
        for c in range(n):
            assert ming_entry(r, c, n, 1.3) == pytest.approx(entry_by_sum(r, c, n, 1.3), abs=1e-13)


def test_entry_linear_in_h():
    for r, c in [(0, 0), (0, 1), (3, 1)]:
        assert ming_entry(r, c, 7, 2.0) == pytest.approx(2 * ming_entry(r, c, 7, 1.0), rel=1e-15)


@pytest.mark.parametrize("n", [3, 4, 5, 7, 11, 12])
def test_block_is_skew_hermitian(n):
    A = dense_ming_block(n, PhysicalScale(n))
    assert np.abs(A + A.conj().T).max() < 1e-14


def test_dense_block_cap():
    with pytest.raises(CapExceeded):
        dense_ming_block(13, 1.0)


def test_n3_block_exponentiates_to_cycle():
    h = 0.25
    U = expm((2 * math.pi / h) * dense_ming_block(3, h))
    assert np.abs(U - np.array([[0, 0, 1], [1, 0, 0], [0, 1, 0]])).max() < 1e-12


@pytest.mark.parametrize("n", [3, 5, 7, 11, 12])
def test_unit_time_is_cycle(n):
    U = dense_orbit_propagator(n, 1.0, PhysicalScale(n))
    assert np.abs(U - cycle_matrix(n)).max() < 1e-10


def test_asymptotic_off_diagonal_magnitude():
    n, h = 1009, PhysicalScale(1009).h
    for row, col in [(10, 11), (10, 13), (10, 15), (20, 15), (500, 497)]:
        d = abs(row - col)
        assert abs(ming_entry(row, col, n, h)) == pytest.approx(h / (2 * math.pi * d), rel=0.01)


# -- evolve_orbit ---------------------------------------------------------------


def test_t0_identity(rng):
    v = rng.normal(size=7) + 1j * rng.normal(size=7)
    assert np.allclose(evolve_orbit(v, 0.0), v, atol=1e-14)


@pytest.mark.parametrize("n", [3, 5, 101])
def test_t1_shifts_basis_vector(n):
    for j in (0, 1, n - 1):
        e = np.zeros(n, dtype=complex)
        e[j] = 1
        out = evolve_orbit(e, 1.0)
        expected = np.zeros(n)
        expected[(j + 1) % n] = 1
        assert np.abs(out - expected).max() < 1e-12


def test_half_step_n3_frozen():
    # from the dense eigen-decomposition oracle, branch k = 0, 1, 2
    expected = np.array([1 / 3 + 1j / math.sqrt(3), 1 / 3 - 1j / math.sqrt(3), 1 / 3])
    oracle = spectral_power_oracle(3, 0.5)[:, 0]
    assert np.abs(oracle - expected).max() < 1e-12
    assert np.abs(evolve_orbit([1, 0, 0], 0.5) - expected).max() < 1e-12


@pytest.mark.parametrize("n", [3, 5, 7])
def test_full_period_identity(n, rng):
    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    assert np.allclose(evolve_orbit(v, float(n)), v, atol=1e-12)


def test_length_mismatch():
    with pytest.raises(ValueError):
        evolve_orbit(np.ones(4), 0.3, n=5)


@settings(max_examples=40, deadline=None)
@given(
    n=st.sampled_from([3, 5, 7, 101, 1009]),
    t=st.floats(-1e4, 1e4, allow_nan=False),
    seed=st.integers(0, 2**32 - 1),
)
def test_unitarity(n, t, seed):
    r = np.random.default_rng(seed)
    v = r.normal(size=n) + 1j * r.normal(size=n)
    assert abs(np.linalg.norm(evolve_orbit(v, t)) - np.linalg.norm(v)) < 1e-12 * np.linalg.norm(v)


@settings(max_examples=40, deadline=None)
@given(
    n=st.sampled_from([3, 5, 7, 101]),
    s=st.floats(-50, 50, allow_nan=False),
    t=st.floats(-50, 50, allow_nan=False),
    seed=st.integers(0, 2**32 - 1),
)
def test_group_law(n, s, t, seed):
    r = np.random.default_rng(seed)
    v = r.normal(size=n) + 1j * r.normal(size=n)
    v /= np.linalg.norm(v)
    lhs = evolve_orbit(evolve_orbit(v, s), t)
    rhs = evolve_orbit(v, s + t)
    assert np.abs(lhs - rhs).max() < 1e-10


@pytest.mark.parametrize("n", [3, 5, 7, 11, 12])
def test_dense_oracle_equivalence(n, rng):
    for t in rng.uniform(-3 * n, 3 * n, size=5):
        U = dense_orbit_propagator(n, t, PhysicalScale(n))
        fast = np.column_stack([evolve_orbit(col, t) for col in np.eye(n)])
        assert np.abs(U - fast).max() < 1e-9
        assert np.abs(spectral_power_oracle(n, t) - fast).max() < 1e-9


def test_h_independence(rng):
    v = rng.normal(size=11) + 1j * rng.normal(size=11)
    a = evolve_orbit(v, 2.37, scale=PhysicalScale(11, 1.0))
    b = evolve_orbit(v, 2.37, scale=PhysicalScale(11, 123.0))
    assert np.array_equal(a, b)
    # the dense route really carries h and still agrees
    Ua = dense_orbit_propagator(11, 2.37, PhysicalScale(11, 1.0))
    Ub = dense_orbit_propagator(11, 2.37, PhysicalScale(11, 123.0))
    assert np.abs(Ua - Ub).max() < 1e-9


# -- combined states -----------------------------------------------------------


def test_combined_trivial_branch_only():
    s = CombinedState.product(1, 0, 7, 5)
    out = evolve_combined(s, 1.7)
    assert np.allclose(out.to_dense(), s.to_dense(), atol=1e-15)


def test_combined_detect_branch_rotates():
    s = CombinedState.product(0, 1, 7, 5)
    out = evolve_combined(s, 1.0)
    assert abs(out.branch1.amplitude(14) - 1) < 1e-12
    assert abs(out.branch1.amplitude(7)) < 1e-12
    assert out.a0 == 0 and out.a1 == 1


@pytest.mark.parametrize("t", [0.3, 1.0, 17.25, -4.5])
def test_combined_norm_conserved(t):
    s = CombinedState.product(1 / math.sqrt(2), 1 / math.sqrt(2), 7, 5)
    assert abs(evolve_combined(s, t).norm - 1) < 1e-12


def test_combined_matches_dense_generator():
    """Full 2 * 2**n dense evolution with the branch-conditional generator."""
    n, t = 5, 2.3
    a0, a1 = 0.6, 0.8j
    s = CombinedState.product(a0, a1, 7, n)
    h = PhysicalScale(n).h
    A = np.zeros((2**n, 2**n), dtype=complex)
    from mingsim.orbits import decompose

    for orbit in decompose(n).orbits:
        idx = list(orbit.members)
        A[np.ix_(idx, idx)] = dense_ming_block(n, h)
    H = np.zeros((2 * 2**n, 2 * 2**n), dtype=complex)
    H[2**n :, 2**n :] = A
    dense = expm((2 * math.pi / h) * t * H) @ s.to_dense()
    assert np.abs(evolve_combined(s, t).to_dense() - dense).max() < 1e-9


def test_idle_phase_keeps_branch_weights():
    s = CombinedState.product(0.6, 0.8, 7, 5)
    out = evolve_combined(s, 1.3, idle_phase_rate=2.0)
    assert abs(out.branch0.amplitude(7) - np.exp(-2.6j)) < 1e-15
    assert abs(out.norm - 1) < 1e-12


def test_branch_basis_fixed_points():
    b = Branch.basis(0, 5)
    assert b.fixed == (1, 0) and b.blocks == ()
    assert Branch.basis(31, 5).amplitude(31) == 1
