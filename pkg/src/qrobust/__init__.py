"""Robust-performance analysis of Lindblad dynamics in Bloch coordinates.

The package turns an open quantum system (Hamiltonian + jump operators) into
a real linear generator on Bloch coordinates, quantifies the worst-case
effect of structured parameter uncertainty via transfer norms and a two-block
structured singular value with certified bounds, treats commuting
(dephasing-type) systems exactly, and ships a worked two-qubit case study
plus a sweep CLI (``qrobust``).
"""

from .operator_basis import (OperatorBasis, build_basis, to_bloch, from_bloch,
                             bloch_orthogonality_check, check_hermitian,
                             PAULI_X, PAULI_Y, PAULI_Z, SIGMA_PLUS,
                             SIGMA_MINUS)
from .lindblad_dynamics import (JumpTerm, OpenSystem, lindblad_rhs,
                                propagate_bloch, example1_pair)
from .bloch_model import (BlochModel, ReducedBloch, SteadyStateManifoldError,
                          bloch_hamiltonian, bloch_lindblad, assemble, reduce,
                          split_affine, steady_state, rank_profile)
from .dephasing_analysis import (CommutatorError, KernelMismatchError,
                                 CommutingPair, DephasingSpectrum,
                                 simultaneous_diag, dephasing_solution,
                                 commuting_bloch_spectrum, dephasing_transfer,
                                 dephasing_hinf)
from .robust_perf import (SharpSingularError, TransferSample, MuBound, phi,
                          sharp_inverse, transfer_dynamic, transfer_prep,
                          sharp_lemma_residuals, interconnection,
                          mu_two_block, mu_diagonal, robust_perf_check)
from .cavity_case import (CavityParams, GAIN_PARAMS, MU_PARAMS, STRUCTURE_IDS,
                          cavity_hamiltonian, cavity_jump, structure_matrix,
                          cavity_model, generalized_eigs, concurrence,
                          cavity_steady_state, concurrence_log_sensitivity,
                          stability_margin)
from .cli_sweeps import (ModelBundle, GridSpec, SweepSpec, load_model,
                         run_gain_sweep, run_mu_sweep, run_detuning_sweep,
                         run_table1, verify_regressions, write_rows, main)

__version__ = "0.1.0"

__all__ = [
    "OperatorBasis", "build_basis", "to_bloch", "from_bloch",
    "bloch_orthogonality_check", "check_hermitian",
    "PAULI_X", "PAULI_Y", "PAULI_Z", "SIGMA_PLUS", "SIGMA_MINUS",
    "JumpTerm", "OpenSystem", "lindblad_rhs", "propagate_bloch",
    "example1_pair",
    "BlochModel", "ReducedBloch", "SteadyStateManifoldError",
    "bloch_hamiltonian", "bloch_lindblad", "assemble", "reduce",
    "split_affine", "steady_state", "rank_profile",
    "CommutatorError", "KernelMismatchError", "CommutingPair",
    "DephasingSpectrum", "simultaneous_diag", "dephasing_solution",
    "commuting_bloch_spectrum", "dephasing_transfer", "dephasing_hinf",
    "SharpSingularError", "TransferSample", "MuBound", "phi",
    "sharp_inverse", "transfer_dynamic", "transfer_prep",
    "sharp_lemma_residuals", "interconnection", "mu_two_block",
    "mu_diagonal", "robust_perf_check",
    "CavityParams", "GAIN_PARAMS", "MU_PARAMS", "STRUCTURE_IDS",
    "cavity_hamiltonian", "cavity_jump", "structure_matrix", "cavity_model",
    "generalized_eigs", "concurrence", "cavity_steady_state",
    "concurrence_log_sensitivity", "stability_margin",
    "ModelBundle", "GridSpec", "SweepSpec", "load_model", "run_gain_sweep",
    "run_mu_sweep", "run_detuning_sweep", "run_table1", "verify_regressions",
    "write_rows", "main",
]
