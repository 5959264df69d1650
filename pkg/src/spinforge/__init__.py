"""spinforge: pulse design and time-domain simulation of entangling gates
for exchange-coupled spin qubits in silicon double quantum dots."""

__version__ = "0.1.0"

from .params import DeviceParams, default_params
from .model import (Hamiltonian4, BlockPair, static_hamiltonian,
                    adiabatic_energies, interaction_hamiltonian,
                    rotating_frame_hamiltonian, block_resonances,
                    reduced_blocks)
from .envelopes import (ChiSpec, Envelope, DriveSpec, PulseCatalogEntry,
                        chi_ansatz, two_level_drive, chi_envelope,
                        sech_envelope, square_envelope, tabulated_envelope,
                        pulse_area, catalog, chi_spec_for)
from .propagator import (Unitary2, Unitary4, evolve, evolve_drive,
                         DrivePropagator, two_level_analytic, sech_phase,
                         step_halving_difference, DEFAULT_STEP)
from .gates import (LocalGatePair, LocalInvariants, TwoPieceSequence,
                    GateReport, fidelity, local_invariants, apply_locals,
                    compose_two_piece, fit_local_corrections,
                    conditional_phase, catalog_locals, target_gates,
                    cnot, cz, sqrt_cnot, theta_cphase)
from .cphase import (CphaseDesign, AlphaBranches, theta_from_alpha,
                     alpha_solutions, validity_window, design_cphase,
                     general_two_block_phase, gate_time_amplitude_sweep)
from .designs import GateDesign, design_registry, simulate_design, assemble
from .noise import (NoiseSample, SweepResult, draw_sample, perturb,
                    average_infidelity, sweep, default_grid)

__all__ = [name for name in dir() if not name.startswith("_")]
