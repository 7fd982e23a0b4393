"""Simulator for a cyclic-shift quantum amplifier and its pointer statistics."""

from mingsim.dynamics import (
    CombinedState,
    PhysicalScale,
    dense_ming_block,
    evolve_combined,
    evolve_orbit,
    ming_entry,
)
from mingsim.measurement import (
    MeasurementOutcome,
    Observable,
    measure,
    paradox_scan,
    smoothing_scan,
)
from mingsim.orbits import (
    BasisIndex,
    Orbit,
    OrbitDecomposition,
    decompose,
    orbit_of,
    rotate,
)
from mingsim.pointer import (
    ClassicalLimit,
    CockedSet,
    PointerConfig,
    TimeAverageResult,
    classical_limit,
    convergence_sweep,
    defect_count,
    macroscopic_check,
    pointer_value,
    time_average_quadrature,
    time_average_spectral,
)

__all__ = [
    "BasisIndex",
    "ClassicalLimit",
    "CockedSet",
    "CombinedState",
    "MeasurementOutcome",
    "Observable",
    "Orbit",
    "OrbitDecomposition",
    "PhysicalScale",
    "PointerConfig",
    "TimeAverageResult",
    "classical_limit",
    "convergence_sweep",
    "decompose",
    "defect_count",
    "dense_ming_block",
    "evolve_combined",
    "evolve_orbit",
    "macroscopic_check",
    "measure",
    "ming_entry",
    "orbit_of",
    "paradox_scan",
    "pointer_value",
    "rotate",
    "smoothing_scan",
    "time_average_quadrature",
    "time_average_spectral",
]
