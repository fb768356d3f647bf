"""#-inverse transfer functions and two-block structured-value bounds."""

import numpy as np
import pytest

from conftest import random_hermitian
from oracles import close_upper_loop, complex_grid_mu_lower
from qrobust.bloch_model import assemble, bloch_hamiltonian, bloch_lindblad
from qrobust.cavity_case import MU_PARAMS, cavity_model
from qrobust.lindblad_dynamics import JumpTerm
from qrobust.operator_basis import PAULI_Z, build_basis
from qrobust.robust_perf import (SharpSingularError, interconnection,
                                 mu_diagonal, mu_two_block, phi,
                                 robust_perf_check, sharp_inverse,
                                 sharp_lemma_residuals, transfer_dynamic,
                                 transfer_prep)


def _random_tp_pair(rng, N):
    """Random trace-preserving (A, S): a noisy model and a dissipator."""
    basis = build_basis(N)
    Z = rng.normal(size=(N, N)) + 1j * rng.normal(size=(N, N))
    model = assemble(random_hermitian(rng, N), [JumpTerm(V=Z, rate=0.6)],
                     basis=basis)
    S = bloch_lindblad(random_hermitian(rng, N), basis)
    return model.A, S


def _dephasing_pair():
    basis = build_basis(2)
    A = bloch_hamiltonian(PAULI_Z, basis)
    S = bloch_lindblad(PAULI_Z, basis)
    return A, S


def test_phi_is_the_shifted_generator():
    A = np.diag([1.0, 2.0])
    assert np.array_equal(phi(2j, A), 2j * np.eye(2) - A)


def test_sharp_inverse_block_structure():
    M = np.array([[2.0, 1.0, 3.0], [1.0, 1.0, 0.0], [0.0, 0.0, 5.0]])
    Ms = sharp_inverse(M)
    assert np.allclose(Ms[:2, :2], np.linalg.inv(M[:2, :2]))
    assert np.all(Ms[2, :] == 0) and np.all(Ms[:, 2] == 0)
    # on a diagonal matrix it differs from the true inverse exactly in the
    # last slot, which is zeroed instead of inverted
    assert np.allclose(sharp_inverse(np.diag([2.0, 4.0])),
                       np.diag([0.5, 0.0]))


def test_sharp_inverse_is_reflexive(rng):
    A, S = _random_tp_pair(rng, 3)
    Ms = sharp_inverse(phi(0.4 + 0.3j, A))
    M = phi(0.4 + 0.3j, A)
    assert np.allclose(Ms @ M @ Ms, Ms, atol=1e-12)


def test_sharp_inverse_guards():
    with pytest.raises(ValueError, match="last row"):
        sharp_inverse(np.arange(9.0).reshape(3, 3))
    with pytest.raises(ValueError, match="size >= 2"):
        sharp_inverse(np.eye(1))
    with pytest.raises(SharpSingularError) as exc:
        sharp_inverse(np.diag([0.0, 1.0]))
    assert exc.value.sigma_min == 0.0


def test_transfers_match_classical_inverse_where_it_exists(rng):
    A, S = _random_tp_pair(rng, 3)
    s, delta = 0.3 + 0.8j, 0.27
    B = phi(s, A) - delta * S
    classical = np.linalg.inv(B)
    T = transfer_dynamic(s, delta, A, S)
    assert np.allclose(T.T, classical @ (delta * S), atol=1e-11)
    P = transfer_prep(s, delta, A, S)
    assert np.allclose(P.T[:-1, :-1], classical[:-1, :-1], atol=1e-11)
    assert np.all(P.T[-1, :] == 0) and np.all(P.T[:, -1] == 0)


def test_transfer_at_zero_strength(rng):
    A, S = _random_tp_pair(rng, 2)
    s = 0.5 + 1.1j
    T = transfer_dynamic(s, 0.0, A, S)
    assert T.norm == 0.0
    P = transfer_prep(s, 0.0, A, S)
    assert np.allclose(P.T, sharp_inverse(phi(s, A)), atol=1e-14)
    assert P.variant == "prep" and T.variant == "dynamic"
    assert T.s == complex(s) and T.delta == 0.0


def test_lemma_residuals_vanish_on_random_samples(rng):
    A, S = _random_tp_pair(rng, 3)
    checked = 0
    while checked < 20:
        s = complex(rng.uniform(-1, 1), rng.uniform(-2, 2))
        delta = float(rng.uniform(-1.5, 1.5))
        try:
            r1, r2 = sharp_lemma_residuals(s, delta, A, S)
        except SharpSingularError:
            continue
        assert r1 < 1e-10 and r2 < 1e-10
        checked += 1


@pytest.mark.parametrize("variant", ["dynamic", "prep"])
def test_interconnection_closure_reproduces_transfer(rng, variant):
    model = cavity_model(MU_PARAMS)
    A, S = model.A, model.structures["S3"]
    s = 0.4 + 0.9j
    G = interconnection(s, A, S, variant=variant)
    n = A.shape[0]
    assert G.shape == (2 * n, 2 * n)
    gain = transfer_dynamic if variant == "dynamic" else transfer_prep
    for delta in (0.05, -0.3, 0.8):
        closed = close_upper_loop(G, delta)
        assert np.allclose(closed, gain(s, delta, A, S).T, atol=1e-10)


def test_interconnection_block_layout(rng):
    A, S = _random_tp_pair(rng, 2)
    s = 1.2j + 0.1
    n = A.shape[0]
    X = sharp_inverse(phi(s, A)) @ S
    G = interconnection(s, A, S)
    assert np.allclose(G[:n, :n], X) and np.allclose(G[:n, n:], X)
    assert np.allclose(G[n:, :n], np.eye(n)) and np.all(G[n:, n:] == 0)
    W = S @ sharp_inverse(phi(s, A))
    Gp = interconnection(s, A, S, variant="prep")
    assert np.allclose(Gp[:n, :n], W) and np.allclose(Gp[n:, :n], Gp[n:, n:])
    with pytest.raises(ValueError, match="variant"):
        interconnection(s, A, S, variant="weird")


def test_mu_of_zero_structure_is_zero():
    A, S = _dephasing_pair()
    G = interconnection(1.3j, A, np.zeros_like(S))
    mb = mu_two_block(G)
    assert mb.lower == 0.0 and mb.upper == 0.0 and mb.converged


def test_mu_rejects_unrecognized_interconnections(rng):
    with pytest.raises(ValueError, match="square of even size"):
        mu_two_block(np.zeros((3, 3)))
    G = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    with pytest.raises(ValueError):
        mu_two_block(G)


def test_exact_reduction_on_dephasing_matches_closed_form():
    A, S = _dephasing_pair()
    omega = 2.2
    G = interconnection(1j * omega, A, S)
    mb = mu_two_block(G)
    assert mb.converged
    assert mb.upper <= mb.lower * (1.0 + 1e-8)
    # closed form: per oscillation mode at w with damping coefficient g, the
    # optimal real strength solves d^2 = 1 + ((omega-w)/g / d)^2, so
    # d*^2 = (1 + sqrt(1 + 4 c^2)) / 2 with c = (omega - w)/g
    mu_ref = 0.0
    for w, g in ((2.0, -2.0), (-2.0, -2.0)):
        c = (omega - w) / g
        d_star = np.sqrt(0.5 * (1.0 + np.sqrt(1.0 + 4.0 * c * c)))
        mu_ref = max(mu_ref, 1.0 / d_star)
    assert mb.lower == pytest.approx(mu_ref, rel=1e-9)
    # independent global check of the reduction it optimizes
    grid = np.concatenate([np.linspace(-6, 6, 8001),
                           np.geomspace(1e-8, 6, 200),
                           -np.geomspace(1e-8, 6, 200)])
    for d in grid:
        F = close_upper_loop(G, d)
        sF = np.linalg.norm(F, 2)
        if sF == 0.0:  # delta = 0 closes nothing; no finite perturbation
            continue
        h = max(abs(d), 1.0 / sF)
        assert h >= (1.0 / mb.upper) * (1.0 - 1e-9)
    F_star = close_upper_loop(G, mb.delta_star)
    h_star = max(abs(mb.delta_star), 1.0 / np.linalg.norm(F_star, 2))
    assert h_star <= (1.0 / mb.lower) * (1.0 + 1e-9)


def test_realness_of_the_repeated_block_matters_near_resonance():
    A, S = _dephasing_pair()
    s = 2j * (1.0 + 1e-4)
    G = interconnection(s, A, S)
    mb = mu_two_block(G)
    assert mb.upper <= 1.0 + 1e-6
    # a complex repeated block could nearly invert (I - delta*G11): the
    # complex-structure value explodes while the real-structure one stays at 1
    pole = 1e-4  # |1/x| for the near-resonant mode x = -2/(2j*1e-4)
    radii = np.concatenate([np.geomspace(1e-6, 10.0, 40),
                            pole * (1.0 + np.array([-1e-3, -1e-5, 1e-5, 1e-3]))])
    complex_lower = complex_grid_mu_lower(G, radii)
    assert complex_lower > 1e3
    assert complex_lower > 100.0 * mb.upper


def test_mu_bounds_bracket_and_refine_on_the_cavity():
    model = cavity_model(MU_PARAMS)
    G = interconnection(0.5, model.A, model.structures["S3"])
    plain = mu_two_block(G)
    assert 0.0 < plain.lower <= plain.upper
    refined = mu_two_block(G, refine_gap=0.04)
    assert refined.upper <= plain.upper * (1.0 + 1e-9)
    assert refined.upper <= refined.lower * 1.05
    assert refined.lower >= plain.lower * (1.0 - 1e-12)


def test_upper_bound_is_a_certificate_for_all_real_strengths(rng):
    model = cavity_model(MU_PARAMS)
    G = interconnection(0.5, model.A, model.structures["S3"])
    mb = mu_two_block(G, refine_gap=0.02)
    for _ in range(200):
        d = float(rng.uniform(-0.999, 0.999)) / mb.upper
        F = close_upper_loop(G, d)
        assert np.linalg.norm(F, 2) <= mb.upper * (1.0 + 1e-9)


def test_mu_diagonal_examples_and_destabilization(rng):
    T = np.diag([0.2, -0.5j])
    mu, Delta = mu_diagonal(T)
    assert mu == pytest.approx(0.5)
    assert np.linalg.norm(Delta, 2) == pytest.approx(1.0 / mu)
    assert abs(np.linalg.det(np.eye(2) + T @ Delta)) < 1e-14
    mu0, D0 = mu_diagonal(np.zeros((3, 3)))
    assert mu0 == 0.0 and np.all(D0 == 0)
    d = rng.normal(size=4) + 1j * rng.normal(size=4)
    mu_r, D_r = mu_diagonal(np.diag(d))
    assert mu_r == pytest.approx(np.max(np.abs(d)))
    assert abs(np.linalg.det(np.eye(4) + np.diag(d) @ D_r)) < 1e-12
    with pytest.raises(ValueError, match="diagonal"):
        mu_diagonal(np.ones((2, 2)))


@pytest.mark.parametrize("variant", ["dynamic", "prep"])
def test_robust_perf_check_certifies_sampled_region(variant):
    model = cavity_model(MU_PARAMS)
    report = robust_perf_check(0.5j, model.A, model.structures["S3"],
                               n_samples=30, variant=variant, upper_rtol=1e-2)
    assert report["violations"] == 0
    assert report["bound_satisfied"] is True
    assert report["max_gain"] <= report["mu_upper"]
    assert report["mu_lower"] <= report["mu_upper"]
    assert report["variant"] == variant and report["n_samples"] == 30
