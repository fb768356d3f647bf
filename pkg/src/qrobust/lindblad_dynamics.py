"""Lindblad right-hand sides and Bloch-space propagation.

The master equation used throughout is

    d rho / dt = -i [H, rho] + sum_k rate_k (V_k rho V_k^dag
                                             - (V_k^dag V_k rho
                                                + rho V_k^dag V_k) / 2),

with ``rate_k >= 0``.  Propagation of Bloch vectors is done with the matrix
exponential of the (real) Bloch generator; an independent density-matrix ODE
integrator lives in the test suite as an oracle, not here.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from .operator_basis import check_hermitian

__all__ = [
    "JumpTerm",
    "OpenSystem",
    "lindblad_rhs",
    "propagate_bloch",
    "example1_pair",
]


@dataclass(frozen=True)
class JumpTerm:
    """A single dissipation channel: jump operator V with nonnegative rate."""

    V: np.ndarray
    rate: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "V", np.asarray(self.V, dtype=complex))
        if self.V.ndim != 2 or self.V.shape[0] != self.V.shape[1]:
            raise ValueError(f"jump operator must be square, got {self.V.shape}")
        if self.rate < 0:
            raise ValueError(f"jump rate must be nonnegative, got {self.rate}")


@dataclass(frozen=True)
class OpenSystem:
    """Hamiltonian plus a collection of jump terms on one Hilbert space."""

    H: np.ndarray
    jumps: tuple = field(default_factory=tuple)

    def __post_init__(self):
        H = np.asarray(self.H, dtype=complex)
        check_hermitian(H, name="Hamiltonian")
        object.__setattr__(self, "H", H)
        jumps = tuple(self.jumps)
        for j in jumps:
            if j.V.shape != H.shape:
                raise ValueError(
                    f"jump shape {j.V.shape} does not match Hamiltonian {H.shape}"
                )
        object.__setattr__(self, "jumps", jumps)

    @property
    def dim(self):
        return self.H.shape[0]


def lindblad_rhs(rho, system):
    """Evaluate d rho / dt for the master equation of ``system``.

    Parameters
    ----------
    rho : ndarray, shape (N, N)
    system : OpenSystem

    Returns
    -------
    ndarray, shape (N, N), complex
    """
    rho = np.asarray(rho, dtype=complex)
    H = system.H
    out = -1j * (H @ rho - rho @ H)
    for term in system.jumps:
        V = term.V
        VdV = V.conj().T @ V
        out += term.rate * (V @ rho @ V.conj().T - 0.5 * (VdV @ rho + rho @ VdV))
    return out


def propagate_bloch(r0, A, t):
    """Propagate a Bloch vector: r(t) = expm(t A) r0.

    Parameters
    ----------
    r0 : ndarray, shape (n,), real
    A : ndarray, shape (n, n), real Bloch generator
    t : float

    Returns
    -------
    ndarray, shape (n,)
    """
    r0 = np.asarray(r0, dtype=float)
    A = np.asarray(A, dtype=float)
    if A.shape != (r0.size, r0.size):
        raise ValueError(f"generator shape {A.shape} does not fit r0 ({r0.size})")
    return expm(t * A) @ r0


def example1_pair(omega, delta, tau):
    """Two preparations that become indistinguishable at t = tau/2.

    Branch one: the pure state rho0 = |+><+| dephases under H = omega sigma_z,
    V = sigma_z at rate delta; its coherence rotates at 2*omega while decaying
    at 2*delta.  Branch two: the mixed state with pre-damped coherence
    exp(-tau*delta)/2 evolves unitarily under the same H.  Both are evaluated
    at t = tau/2, where they coincide.

    The first branch is computed by Bloch-space propagation, the second by
    direct unitary conjugation, so the returned agreement is a property of the
    dynamics rather than of a shared formula.

    Parameters
    ----------
    omega : float
        Hamiltonian strength, H = omega sigma_z.
    delta : float
        Dephasing rate, must be >= 0.
    tau : float
        Total protocol time.

    Returns
    -------
    (rho, rho_tilde) : pair of ndarray, shape (2, 2)
    """
    if delta < 0:
        raise ValueError(f"dephasing rate must be nonnegative, got {delta}")
    t = 0.5 * tau

    # Bloch generator for H = omega sigma_z, V = sigma_z at rate delta in the
    # basis (sigma_x, sigma_y, sigma_z, I)/sqrt(2): the two coherence
    # coordinates rotate at 2*omega and decay at 2*delta; populations and the
    # trace coordinate are frozen.
    A = np.zeros((4, 4))
    A[0, 0] = A[1, 1] = -2.0 * delta
    A[0, 1] = -2.0 * omega
    A[1, 0] = 2.0 * omega
    # rho0 = |+><+|: r0 = (1, 0, 0, 1)/sqrt(2)
    s = 1.0 / np.sqrt(2.0)
    r = propagate_bloch(np.array([s, 0.0, 0.0, s]), A, t)
    # reassemble by hand to keep this module free of basis plumbing
    rho = 0.5 * np.array(
        [
            [1.0 - np.sqrt(2.0) * r[2], np.sqrt(2.0) * (r[0] + 1j * r[1])],
            [np.sqrt(2.0) * (r[0] - 1j * r[1]), 1.0 + np.sqrt(2.0) * r[2]],
        ],
        dtype=complex,
    )

    c = 0.5 * np.exp(-tau * delta)
    rho_tilde0 = np.array([[0.5, c], [c, 0.5]], dtype=complex)
    # H = omega sigma_z is diagonal with entries (-omega, +omega)
    U = np.diag(np.exp(-1j * np.array([-omega, omega]) * t))
    rho_tilde = U @ rho_tilde0 @ U.conj().T
    return rho, rho_tilde
