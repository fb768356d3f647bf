"""Two driven qubits with collective decay: the worked case study.

Hilbert space C^2 (x) C^2 with product basis |00>, |01>, |10>, |11> (first
factor = qubit 1).  The Hamiltonian collects drives alpha_n, detunings
Delta_n; the single jump operator is the collective lowering
V = gamma1*sigma_-^(1) + gamma2*sigma_-^(2):

    H = sum_n conj(alpha_n) sigma_+^(n) + alpha_n sigma_-^(n)
              + Delta_n sigma_+^(n) sigma_-^(n).

Note [H, V] != 0: this system is *not* of dephasing type, which is what makes
its robustness analysis nontrivial.

Seven unit-normalized perturbation structures S1..S7 span the physical
parameter directions: drive amplitudes (S1, S2), detunings (S3, S4: Delta2
enters with a minus sign so the pair detunes antisymmetrically), the
collective decay rate (S5, admissible for delta >= -1 since the nominal rate
is 1), and the individual emission rates (S6, S7, admissible for delta >= 0).
"""

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .bloch_model import (assemble, bloch_hamiltonian, bloch_lindblad, reduce,
                          split_affine, steady_state)
from .lindblad_dynamics import JumpTerm
from .operator_basis import SIGMA_MINUS, SIGMA_PLUS, build_basis, from_bloch

__all__ = [
    "CavityParams",
    "GAIN_PARAMS",
    "MU_PARAMS",
    "STRUCTURE_IDS",
    "cavity_hamiltonian",
    "cavity_jump",
    "structure_matrix",
    "cavity_model",
    "generalized_eigs",
    "concurrence",
    "cavity_steady_state",
    "concurrence_log_sensitivity",
    "stability_margin",
]


@dataclass(frozen=True)
class CavityParams:
    """Physical parameters: drives, detunings and emission amplitudes."""

    alpha1: complex = 1.0
    alpha2: complex = 1.0
    Delta1: float = 1.0
    Delta2: float = -1.0
    gamma1: float = 1.0
    gamma2: float = 1.0


# Gain sweeps use unit detunings; mu sweeps use the weakly detuned point.
GAIN_PARAMS = CavityParams(alpha1=1.0, alpha2=1.0, Delta1=1.0, Delta2=-1.0,
                           gamma1=1.0, gamma2=1.0)
MU_PARAMS = CavityParams(alpha1=1.0, alpha2=1.0, Delta1=0.1, Delta2=-0.1,
                         gamma1=1.0, gamma2=1.0)

STRUCTURE_IDS = ("S1", "S2", "S3", "S4", "S5", "S6", "S7")


def _qubit_ops():
    I2 = np.eye(2, dtype=complex)
    sm1 = np.kron(SIGMA_MINUS, I2)
    sm2 = np.kron(I2, SIGMA_MINUS)
    sp1 = np.kron(SIGMA_PLUS, I2)
    sp2 = np.kron(I2, SIGMA_PLUS)
    return sp1, sm1, sp2, sm2


def cavity_hamiltonian(p):
    """4x4 Hamiltonian for drives/detunings in ``p`` (CavityParams)."""
    sp1, sm1, sp2, sm2 = _qubit_ops()
    H = (np.conj(p.alpha1) * sp1 + p.alpha1 * sm1
         + np.conj(p.alpha2) * sp2 + p.alpha2 * sm2
         + p.Delta1 * (sp1 @ sm1) + p.Delta2 * (sp2 @ sm2))
    return H


def cavity_jump(p):
    """Collective lowering operator gamma1*sigma_-^(1) + gamma2*sigma_-^(2)."""
    _, sm1, _, sm2 = _qubit_ops()
    return p.gamma1 * sm1 + p.gamma2 * sm2


def _normalize_structure_id(k):
    if isinstance(k, str):
        kk = k.strip().upper()
        if kk.startswith("S"):
            kk = kk[1:]
        k = int(kk)
    if not 1 <= int(k) <= 7:
        raise ValueError(f"structure id must be 1..7 (or 'S1'..'S7'), got {k!r}")
    return int(k)


def _structure_spec(k):
    if k == 1:
        return {"hamiltonian_term": cavity_hamiltonian(
            CavityParams(1.0, 0.0, 0.0, 0.0, 0.0, 0.0))}
    if k == 2:
        return {"hamiltonian_term": cavity_hamiltonian(
            CavityParams(0.0, 1.0, 0.0, 0.0, 0.0, 0.0))}
    if k == 3:
        return {"hamiltonian_term": cavity_hamiltonian(
            CavityParams(0.0, 0.0, 1.0, 0.0, 0.0, 0.0))}
    if k == 4:
        return {"hamiltonian_term": cavity_hamiltonian(
            CavityParams(0.0, 0.0, 0.0, -1.0, 0.0, 0.0))}
    if k == 5:
        return {"jump_term": {"V": cavity_jump(
            CavityParams(0.0, 0.0, 0.0, 0.0, 1.0, 1.0)), "rate": 1.0}}
    if k == 6:
        return {"jump_term": {"V": cavity_jump(
            CavityParams(0.0, 0.0, 0.0, 0.0, 1.0, 0.0)), "rate": 1.0}}
    if k == 7:
        return {"jump_term": {"V": cavity_jump(
            CavityParams(0.0, 0.0, 0.0, 0.0, 0.0, 1.0)), "rate": 1.0}}
    raise ValueError(f"unknown structure {k}")


def structure_matrix(k, basis=None):
    """Unit-normalized Bloch perturbation structure S_k, k in 1..7."""
    k = _normalize_structure_id(k)
    if basis is None:
        basis = build_basis(4)
    spec = _structure_spec(k)
    S = np.zeros((basis.size, basis.size))
    if "hamiltonian_term" in spec:
        S = S + bloch_hamiltonian(spec["hamiltonian_term"], basis)
    if "jump_term" in spec:
        S = S + spec["jump_term"]["rate"] * bloch_lindblad(
            spec["jump_term"]["V"], basis)
    return S


def cavity_model(params=MU_PARAMS, basis=None):
    """Nominal Bloch model (collective decay at unit rate) with S1..S7."""
    if basis is None:
        basis = build_basis(4)
    H = cavity_hamiltonian(params)
    V = cavity_jump(params)
    structures = {sid: _structure_spec(int(sid[1])) for sid in STRUCTURE_IDS}
    return assemble(H, [JumpTerm(V=V, rate=1.0)], structures=structures,
                    basis=basis)


def generalized_eigs(A, S, imag_tol=1e-8, beta_tol=1e-6):
    """Real finite generalized eigenvalues delta of det(A + delta*S) = 0.

    Both generators annihilate the trace row, so the full pencil (A, -S) is
    singular by construction; the meaningful delta values are the generalized
    eigenvalues of the leading (n-1) x (n-1) blocks, which form a regular
    pencil whenever the nominal generator's leading block is invertible.
    Structurally infinite modes (rank deficiency of the structure) are
    rejected through the homogeneous (alpha, beta) representation rather than
    a magnitude cutoff: QZ rounding turns exact beta = 0 into |beta| of order
    1e-9 while genuine eigenvalues here have |beta| comparable to |alpha|.

    Parameters
    ----------
    A, S : ndarray, shape (n, n), trace-preserving Bloch generators.
    imag_tol : float
        Relative imaginary-part threshold below which an eigenvalue counts as
        real.
    beta_tol : float
        Eigenvalues with |beta| <= beta_tol * (|alpha| + |beta|) count as
        infinite and are dropped.

    Returns
    -------
    ndarray, real, ascending (multiplicities preserved).
    """
    A = np.asarray(A, dtype=float)
    S = np.asarray(S, dtype=float)
    A11 = A[:-1, :-1]
    B11 = -S[:-1, :-1]
    (alpha, beta), _ = scipy.linalg.eig(A11, B11, homogeneous_eigvals=True)
    denom = np.abs(alpha) + np.abs(beta)
    finite = np.abs(beta) > beta_tol * np.where(denom > 0, denom, 1.0)
    w = alpha[finite] / beta[finite]
    real = w[np.abs(w.imag) <= imag_tol * (1.0 + np.abs(w.real))]
    return np.sort(real.real)


def concurrence(rho, psd_tol=1e-9):
    """Two-qubit concurrence C(rho) = max(0, l1 - l2 - l3 - l4).

    The l_k are the decreasing square roots of the eigenvalues of
    rho * (sy (x) sy) * conj(rho) * (sy (x) sy); the sign convention of
    sigma_y drops out since it enters twice.

    Parameters
    ----------
    rho : ndarray, shape (4, 4), density matrix (Hermitian, PSD to psd_tol,
        unit trace).

    Returns
    -------
    float in [0, 1].
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError(f"need a two-qubit state (4x4), got {rho.shape}")
    herm_dev = np.max(np.abs(rho - rho.conj().T))
    if herm_dev > psd_tol:
        raise ValueError(f"state is not Hermitian (deviation {herm_dev:.3e})")
    evals = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))
    if evals[0] < -psd_tol:
        raise ValueError(f"state is not PSD (min eigenvalue {evals[0]:.3e})")
    if abs(np.trace(rho).real - 1.0) > 1e-6:
        raise ValueError(f"state trace {np.trace(rho).real} != 1")
    sy = np.array([[0.0, 1.0j], [-1.0j, 0.0]], dtype=complex)
    yy = np.kron(sy, sy)
    R = rho @ yy @ rho.conj() @ yy
    lam = np.linalg.eigvals(R).real
    lam = np.sqrt(np.clip(lam, 0.0, None))
    lam.sort()
    return float(max(0.0, lam[3] - lam[2] - lam[1] - lam[0]))


def cavity_steady_state(alpha, Delta, gamma=1.0):
    """Pure steady state and its concurrence in the symmetric regime.

    For alpha1 = alpha2 = alpha, Delta1 = -Delta2 = Delta, gamma1 = gamma2:
    Psi = (Delta, alpha, -alpha, 0) / sqrt(Delta^2 + 2 alpha^2) satisfies
    H Psi = 0 and V Psi = 0, so rho = |Psi><Psi| is stationary at every decay
    rate; its concurrence is C = 1 / ((Delta/alpha)^2 / 2 + 1).

    Parameters
    ----------
    alpha : float, drive amplitude; alpha = 0 degenerates to the ground
        state (C = 0) and emits a warning.
    Delta : float, antisymmetric detuning.
    gamma : float, emission amplitude (enters the stationarity check only).

    Returns
    -------
    (psi, C) : (ndarray shape (4,), float)
    """
    if alpha == 0.0:
        warnings.warn("alpha = 0: steady state degenerates to the ground "
                      "state with zero concurrence", stacklevel=2)
        psi = np.zeros(4, dtype=complex)
        psi[0] = 1.0
        return psi, 0.0
    den = np.sqrt(Delta ** 2 + 2.0 * alpha ** 2)
    psi = np.array([Delta, alpha, -alpha, 0.0], dtype=complex) / den
    p = CavityParams(alpha1=alpha, alpha2=alpha, Delta1=Delta, Delta2=-Delta,
                     gamma1=gamma, gamma2=gamma)
    H = cavity_hamiltonian(p)
    V = cavity_jump(p)
    hres = np.linalg.norm(H @ psi)
    vres = np.linalg.norm(V @ psi)
    guard = 1e-10 * max(1.0, abs(alpha), abs(Delta), abs(gamma)) ** 2
    if hres > guard or vres > guard:
        raise ValueError(
            f"steady-state residuals too large (H: {hres:.3e}, V: {vres:.3e});"
            " parameters are outside the symmetric regime")
    C = 1.0 / (0.5 * (Delta / alpha) ** 2 + 1.0)
    return psi, float(C)


def _steady_concurrence_numeric(alpha, Delta, gamma, basis=None):
    """Concurrence of the numerically solved Bloch steady state."""
    if basis is None:
        basis = build_basis(4)
    p = CavityParams(alpha1=alpha, alpha2=alpha, Delta1=Delta, Delta2=-Delta,
                     gamma1=gamma, gamma2=gamma)
    model = assemble(cavity_hamiltonian(p), [JumpTerm(V=cavity_jump(p))],
                     basis=basis)
    red = reduce(model)
    s = steady_state(red)
    r = np.concatenate([s, [1.0 / np.sqrt(basis.dim)]])
    rho = from_bloch(r, basis)
    return concurrence(rho)


def concurrence_log_sensitivity(alpha, Delta, gamma, param_id, rel_step=1e-3):
    """Logarithmic sensitivity d ln C_ss / d ln p by central differences.

    The derivative is taken through the full numerical chain (Bloch model ->
    steady state -> concurrence), not through the closed-form expression, so
    it doubles as an end-to-end consistency check.  At Delta = alpha the
    analytic values are -2/3 (Delta), +2/3 (alpha) and 0 (gamma).

    Parameters
    ----------
    alpha, Delta, gamma : floats, symmetric-regime parameters (all nonzero).
    param_id : str, one of "alpha", "Delta", "gamma".
    rel_step : float, relative step of the central difference.  The default
        balances truncation against the ~1e-10 noise floor of the numerical
        steady-state/concurrence chain (smaller steps amplify that noise).

    Returns
    -------
    float
    """
    if param_id not in ("alpha", "Delta", "gamma"):
        raise ValueError(f"param_id must be alpha|Delta|gamma, got {param_id!r}")
    base = {"alpha": alpha, "Delta": Delta, "gamma": gamma}
    if base[param_id] == 0.0:
        raise ValueError(f"cannot take a log-derivative at {param_id} = 0")
    basis = build_basis(4)
    vals = []
    for sgn in (+1.0, -1.0):
        pp = dict(base)
        pp[param_id] = base[param_id] * (1.0 + sgn * rel_step)
        C = _steady_concurrence_numeric(pp["alpha"], pp["Delta"], pp["gamma"],
                                        basis=basis)
        if C <= 0.0:
            raise ValueError("steady-state concurrence vanished; "
                             "log-sensitivity undefined here")
        vals.append(np.log(C))
    dlnp = np.log1p(rel_step) - np.log1p(-rel_step)
    return float((vals[0] - vals[1]) / dlnp)


def stability_margin(alpha, Delta, gamma):
    """Distance of the slowest reduced mode from the imaginary axis.

    The generator is assembled at zero detuning and the antisymmetric
    detuning is applied exactly through the structure pair (S3 + S4) scaled
    by Delta (the Hamiltonian is affine in the detunings, so this is not an
    approximation).  Returns |max_n Re lambda_n| of the reduced matrix;
    0 at Delta = 0, where the perturbed system has a second steady state.

    Returns
    -------
    float >= 0.
    """
    basis = build_basis(4)
    p0 = CavityParams(alpha1=alpha, alpha2=alpha, Delta1=0.0, Delta2=0.0,
                      gamma1=gamma, gamma2=gamma)
    model = assemble(cavity_hamiltonian(p0), [JumpTerm(V=cavity_jump(p0))],
                     basis=basis)
    S34 = structure_matrix(3, basis) + structure_matrix(4, basis)
    A_bar, _ = split_affine(model.A, 4)
    S_bar, _ = split_affine(S34, 4)
    M = A_bar + Delta * S_bar
    return float(abs(np.max(np.linalg.eigvals(M).real)))
