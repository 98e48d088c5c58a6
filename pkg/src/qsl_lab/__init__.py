"""Quantum-speed-limit times of a qubit driven by a non-Hermitian detuning."""

from .dynamics import (
    ModelParams,
    Regime,
    Trajectory,
    energy_eigenvalues,
    evolve_closed_form,
    evolve_propagator,
    excited,
    excited_population,
    generator,
    ground,
    hamiltonian,
    integrate_ode,
    mixed,
    propagator,
    sample_trajectory,
)
from .qsl import (
    BoundKind,
    QslResult,
    averaged_schatten,
    bures_angle,
    qsl_mixed,
    qsl_pure,
    relative_purity,
    trace_distance,
)
from .sweep import SweepRow, SweepSpec, emit_csv, figure_specs, run_fig1, run_tau_scan

__version__ = "0.1.0"
