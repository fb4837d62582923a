"""Exact state-vector simulator for three fiber-linked driven two-level atoms.

The package models three atoms in distant cavities whose fiber connection
mediates an effective pairwise spin coupling, interprets timed pulse programs
built on that model (entanglement transfer between atom pairs, a two-segment
controlled-NOT), and measures the resulting gate quality under conditional
spontaneous-emission decay.  A command-line interface exposes the canonical
runs and parameter sweeps as deterministic CSV emitters.
"""
from ._kernels import KERNEL_BACKEND
from .errors import ConfigError, NumericalGuardError
from .evolve import PropagatorSpec, propagate, propagate_conditional, success_probability
from .metrics import (
    AveragedFidelity,
    FidelityTask,
    average_fidelity,
    averaged_metrics,
    hs_distance_sq,
    pointwise_fidelity,
    transfer_fidelity_task,
    transfer_target,
)
from .model import (
    ControlConfig,
    DerivedFieldQuantities,
    PhysicalParams,
    coupling_strength,
    derive_field_quantities,
    dissipative_hamiltonian,
    fiber_loss_factor,
    ising_hamiltonian,
    secular_hamiltonian,
    stark_hamiltonian,
)
from .programs import (
    GateMatrix,
    ProgramResult,
    PulseProgram,
    PulseSegment,
    cnot_program,
    extract_gate_matrix,
    format_program,
    parse_program,
    permute_atoms,
    run_program,
    rwa_deviation,
    transfer_program,
    with_dissipation,
)
from .qstate import (
    atom_permutation_matrix,
    basis_index,
    basis_label,
    basis_state,
    density_from,
    partial_trace,
    pauli_on,
    phase_invariant_infidelity,
)

__version__ = "0.1.0"
