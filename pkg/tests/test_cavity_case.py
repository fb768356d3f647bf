"""Two-qubit cavity model: operators, spectra, entanglement, symmetry."""

import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_density
from oracles import concurrence_sqrtm
from qrobust.bloch_model import bloch_hamiltonian, bloch_lindblad
from qrobust.cavity_case import (GAIN_PARAMS, MU_PARAMS, STRUCTURE_IDS,
                                 CavityParams, cavity_hamiltonian,
                                 cavity_jump, cavity_model,
                                 cavity_steady_state, concurrence,
                                 concurrence_log_sensitivity,
                                 generalized_eigs, stability_margin,
                                 structure_matrix)
from qrobust.lindblad_dynamics import JumpTerm, OpenSystem, lindblad_rhs
from qrobust.operator_basis import build_basis, to_bloch

BASIS4 = build_basis(4)


def test_hamiltonian_matches_hand_built_matrix():
    a1, a2 = 0.7 + 0.2j, -0.4 + 1.1j
    d1, d2 = 0.9, -1.3
    p = CavityParams(alpha1=a1, alpha2=a2, Delta1=d1, Delta2=d2)
    # product basis |00>, |01>, |10>, |11>; qubit 1 is the left factor
    H_ref = np.array([
        [0.0, a2, a1, 0.0],
        [np.conj(a2), d2, 0.0, a1],
        [np.conj(a1), 0.0, d1, a2],
        [0.0, np.conj(a1), np.conj(a2), d1 + d2],
    ])
    assert np.allclose(cavity_hamiltonian(p), H_ref, atol=1e-15)


def test_jump_matches_hand_built_matrix():
    p = CavityParams(gamma1=0.6, gamma2=-1.2)
    V_ref = np.zeros((4, 4), dtype=complex)
    V_ref[0, 1] = -1.2
    V_ref[0, 2] = 0.6
    V_ref[1, 3] = 0.6
    V_ref[2, 3] = -1.2
    assert np.allclose(cavity_jump(p), V_ref, atol=1e-15)


def test_generator_is_affine_in_drives_and_detunings(rng):
    a1, a2, d1, d2 = rng.uniform(-2, 2, size=4)
    p = CavityParams(alpha1=a1, alpha2=a2, Delta1=d1, Delta2=d2)
    A_H = bloch_hamiltonian(cavity_hamiltonian(p), BASIS4)
    combo = (a1 * structure_matrix(1, BASIS4) + a2 * structure_matrix(2, BASIS4)
             + d1 * structure_matrix(3, BASIS4) - d2 * structure_matrix(4, BASIS4))
    assert np.allclose(A_H, combo, atol=1e-12)


def test_dissipative_structures_scale_quadratically():
    S5 = structure_matrix(5, BASIS4)
    S6 = structure_matrix(6, BASIS4)
    S7 = structure_matrix(7, BASIS4)
    g = 0.7
    V = cavity_jump(CavityParams(gamma1=g, gamma2=g))
    assert np.allclose(bloch_lindblad(V, BASIS4), g ** 2 * S5, atol=1e-12)
    V1 = cavity_jump(CavityParams(gamma1=g, gamma2=0.0))
    assert np.allclose(bloch_lindblad(V1, BASIS4), g ** 2 * S6, atol=1e-12)
    # collective decay is not the sum of individual decays (cross terms)
    assert np.linalg.norm(S5 - S6 - S7, 2) > 0.5


def test_cavity_model_assembles_all_structures():
    model = cavity_model(MU_PARAMS)
    assert tuple(sorted(model.structures)) == STRUCTURE_IDS
    expected = (bloch_hamiltonian(cavity_hamiltonian(MU_PARAMS), BASIS4)
                + bloch_lindblad(cavity_jump(MU_PARAMS), BASIS4))
    assert np.allclose(model.A, expected, atol=1e-12)
    assert model.validate()


def test_structure_id_normalization():
    assert np.array_equal(structure_matrix("s3", BASIS4),
                          structure_matrix(3, BASIS4))
    with pytest.raises(ValueError, match="structure id"):
        structure_matrix(8, BASIS4)


def test_singular_strengths_regression():
    """Pin the computed singular-strength sets at the weakly detuned point.

    The S5 root at -1 is five-fold (the pencil has a semisimple eigenvalue
    whose computed copies agree to ~1e-8), which is what the acceptance
    containment check builds on.
    """
    model = cavity_model(MU_PARAMS)
    A = model.A
    expected = {
        "S1": np.array([]),
        "S2": np.array([]),
        "S3": np.array([-0.2, -0.2]),
        "S4": np.array([-0.2, -0.2]),
        "S5": np.array([-1.0] * 5),
        "S6": np.array([-2.64654074, -1.04616297, -0.63463588, -0.0056903]),
        "S7": np.array([-2.64654074, -1.04616297, -0.63463588, -0.0056903]),
    }
    for sid, ref in expected.items():
        vals = generalized_eigs(A, model.structures[sid])
        assert vals.size == ref.size, (sid, vals)
        assert np.allclose(vals, ref, atol=1e-6), (sid, vals)
        # defining property: A + delta*S is singular at every reported root
        for d in vals:
            M = (A + d * model.structures[sid])[:-1, :-1]
            sv = np.linalg.svd(M, compute_uv=False)
            assert sv[-1] <= 1e-7 * sv[0]


def test_concurrence_known_states():
    bell = np.zeros((4, 4), dtype=complex)
    bell[0, 0] = bell[0, 3] = bell[3, 0] = bell[3, 3] = 0.5
    assert concurrence(bell) == pytest.approx(1.0, abs=1e-12)
    product = np.diag([0.0, 1.0, 0.0, 0.0]).astype(complex)
    assert concurrence(product) == 0.0


@pytest.mark.parametrize("p", [0.0, 0.2, 1.0 / 3.0, 0.6, 1.0])
def test_concurrence_matches_werner_closed_form(p):
    psi = np.array([0.0, 1.0, -1.0, 0.0]) / np.sqrt(2.0)
    rho = p * np.outer(psi, psi) + (1.0 - p) * np.eye(4) / 4.0
    assert concurrence(rho) == pytest.approx(max(0.0, (3.0 * p - 1.0) / 2.0),
                                             abs=1e-12)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2 ** 31 - 1))
def test_concurrence_matches_square_root_definition(seed):
    rho = random_density(np.random.default_rng(seed), 4)
    assert concurrence(rho) == pytest.approx(concurrence_sqrtm(rho), abs=1e-8)


def test_concurrence_guards():
    with pytest.raises(ValueError, match="two-qubit"):
        concurrence(np.eye(2) / 2)
    with pytest.raises(ValueError, match="Hermitian"):
        concurrence(np.triu(np.ones((4, 4))) / 4)
    with pytest.raises(ValueError, match="PSD"):
        concurrence(np.diag([1.5, -0.5, 0.0, 0.0]).astype(complex))
    with pytest.raises(ValueError, match="trace"):
        concurrence(np.eye(4, dtype=complex))


def test_steady_state_is_stationary_for_the_full_dynamics(rng):
    for alpha, Delta, gamma in [(1.0, 1.0, 1.0), (0.7, 1.9, 0.4), (1.3, 0.2, 2.0)]:
        psi, C = cavity_steady_state(alpha, Delta, gamma)
        assert np.linalg.norm(psi) == pytest.approx(1.0, abs=1e-12)
        p = CavityParams(alpha1=alpha, alpha2=alpha, Delta1=Delta,
                         Delta2=-Delta, gamma1=gamma, gamma2=gamma)
        system = OpenSystem(H=cavity_hamiltonian(p),
                            jumps=(JumpTerm(V=cavity_jump(p)),))
        rho = np.outer(psi, psi.conj())
        assert np.max(np.abs(lindblad_rhs(rho, system))) < 1e-12
        assert C == pytest.approx(1.0 / (0.5 * (Delta / alpha) ** 2 + 1.0))


def test_steady_state_at_zero_drive_warns():
    with pytest.warns(UserWarning, match="ground"):
        psi, C = cavity_steady_state(0.0, 1.0)
    assert C == 0.0 and psi[0] == 1.0


def test_log_sensitivities_at_the_symmetric_point():
    assert concurrence_log_sensitivity(1.0, 1.0, 1.0, "Delta") == pytest.approx(
        -2.0 / 3.0, abs=1e-5)
    assert concurrence_log_sensitivity(1.0, 1.0, 1.0, "alpha") == pytest.approx(
        2.0 / 3.0, abs=1e-5)
    assert concurrence_log_sensitivity(1.0, 1.0, 1.0, "gamma") == pytest.approx(
        0.0, abs=1e-6)
    with pytest.raises(ValueError, match="param_id"):
        concurrence_log_sensitivity(1.0, 1.0, 1.0, "beta")
    with pytest.raises(ValueError, match="log-derivative"):
        concurrence_log_sensitivity(1.0, 0.0, 1.0, "Delta")


def test_stability_margin_vanishes_only_without_detuning():
    assert stability_margin(1.0, 0.0, 1.0) == pytest.approx(0.0, abs=1e-9)
    assert stability_margin(1.0, 1.0, 1.0) > 0.1
    assert stability_margin(1.0, 0.3, 1.0) > 0.0


def _swap_conjugation_bloch_map():
    """Bloch image of rho -> SWAP (D conj(rho) D) SWAP, D = diag(1,-1,-1,1)."""
    D = np.diag([1.0, -1.0, -1.0, 1.0]).astype(complex)
    SWAP = np.zeros((4, 4))
    for i, j in ((0, 0), (1, 2), (2, 1), (3, 3)):
        SWAP[i, j] = 1.0
    M = np.zeros((16, 16))
    for n, E in enumerate(BASIS4.elements):
        image = SWAP @ (D @ E.conj() @ D) @ SWAP
        M[:, n] = to_bloch(image, BASIS4)
    return M


def test_hidden_symmetry_pairs_the_structures():
    M = _swap_conjugation_bloch_map()
    # involutive orthogonal symmetry
    assert np.allclose(M @ M, np.eye(16), atol=1e-12)
    assert np.allclose(M @ M.T, np.eye(16), atol=1e-12)
    # it fixes the symmetric-point generator and swaps the paired structures
    A = cavity_model(GAIN_PARAMS).A
    assert np.allclose(M @ A @ M.T, A, atol=1e-12)
    pairs = [(1, 2), (3, 4), (6, 7)]
    for a, b in pairs:
        Sa = structure_matrix(a, BASIS4)
        Sb = structure_matrix(b, BASIS4)
        assert np.allclose(M @ Sa @ M.T, Sb, atol=1e-12)
    S5 = structure_matrix(5, BASIS4)
    assert np.allclose(M @ S5 @ M.T, S5, atol=1e-12)
