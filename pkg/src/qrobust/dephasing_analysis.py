"""Exactly solvable dephasing: commuting (H, V) pairs.

When the Hamiltonian and the (Hermitian) jump operator commute they share an
eigenbasis and the master equation decouples in it: the matrix element
between eigenvectors k and l evolves as exp(t(-i w_kl + delta * g_kl)) with

    w_kl = lam_k(H) - lam_l(H),
    g_kl = -(lam_k(V) - lam_l(V))**2 / 2  <=  0.

The same decoupling happens for the Bloch generators: a real antisymmetric A
and real symmetric S with [A, S] = 0 are simultaneously unitarily
diagonalizable (iA is Hermitian), giving U^dag A U = diag(i*omegas, 0) and
U^dag S U = diag(gammas, 0) with a shared kernel of dimension N.  The
perturbation-to-output transfer is then diagonal with entries

    delta*g_j / (i*omega - i*w_j - delta*g_j),

each of unit peak modulus at omega = w_j, so the H-infinity norm is exactly 1
for every delta > 0: dephasing strength is unknowable from worst-case gain.
"""

from dataclasses import dataclass

import numpy as np

from ._search import golden_max
from .operator_basis import check_hermitian

__all__ = [
    "CommutatorError",
    "KernelMismatchError",
    "CommutingPair",
    "DephasingSpectrum",
    "simultaneous_diag",
    "dephasing_solution",
    "commuting_bloch_spectrum",
    "dephasing_transfer",
    "dephasing_hinf",
]


class CommutatorError(ValueError):
    """Inputs that must commute do not (to tolerance)."""

    def __init__(self, norm, tol):
        self.norm = norm
        super().__init__(
            f"operators do not commute: ||[X, Y]|| = {norm:.3e} > {tol:.1e}"
        )


class KernelMismatchError(ValueError):
    """The two generators' kernels do not coincide / have unexpected dimension."""


@dataclass(frozen=True)
class CommutingPair:
    """Joint eigen-decomposition of a commuting Hermitian pair (H, V)."""

    U: np.ndarray
    lam_H: np.ndarray
    lam_V: np.ndarray

    @property
    def dim(self):
        return self.U.shape[0]


def _fix_phases(U, rel_tol=1e-6):
    """Make each column's first significant entry real positive (in place ok)."""
    U = U.copy()
    for j in range(U.shape[1]):
        col = U[:, j]
        mags = np.abs(col)
        top = mags.max()
        idx = int(np.argmax(mags >= rel_tol * top))
        z = col[idx]
        U[:, j] = col * (z.conjugate() / abs(z))
    return U


def _cluster_bounds(vals, tol):
    """Split sorted real values into clusters separated by gaps > tol."""
    bounds = [0]
    for i in range(1, len(vals)):
        if vals[i] - vals[i - 1] > tol:
            bounds.append(i)
    bounds.append(len(vals))
    return bounds


def _joint_eigh(X, Y, cluster_tol=1e-8):
    """Simultaneously diagonalize commuting Hermitian X, Y.

    Returns (U, x, y) with U^dag X U = diag(x), U^dag Y U = diag(y), columns
    phase-fixed deterministically.  Assumes [X, Y] = 0 (checked by callers).
    """
    x, U = np.linalg.eigh(X)
    scale = max(1.0, np.max(np.abs(x)))
    bounds = _cluster_bounds(x, cluster_tol * scale)
    for a, b in zip(bounds[:-1], bounds[1:]):
        if b - a > 1:
            block = U[:, a:b]
            B = block.conj().T @ Y @ block
            B = 0.5 * (B + B.conj().T)
            _, Q = np.linalg.eigh(B)
            U[:, a:b] = block @ Q
    y_full = U.conj().T @ Y @ U
    off = y_full - np.diag(np.diag(y_full))
    y_scale = max(1.0, np.max(np.abs(np.diag(y_full).real)))
    if np.max(np.abs(off)) > 1e-7 * y_scale:
        raise CommutatorError(float(np.max(np.abs(off))), 1e-7)
    y = np.diag(y_full).real.copy()
    U = _fix_phases(U)
    return U, x.copy(), y


def simultaneous_diag(H, V, comm_tol=1e-10):
    """Joint eigenbasis of a commuting Hermitian pair.

    Parameters
    ----------
    H, V : ndarray, shape (N, N), Hermitian with ||[H, V]||_F <= comm_tol.
    comm_tol : float

    Returns
    -------
    CommutingPair
        U unitary with U^dag H U and U^dag V U diagonal; column phases fixed
        (first significant component real positive) so output is
        deterministic.
    """
    H = np.asarray(H, dtype=complex)
    V = np.asarray(V, dtype=complex)
    check_hermitian(H, name="H")
    check_hermitian(V, name="V")
    comm = np.linalg.norm(H @ V - V @ H)
    if comm > comm_tol:
        raise CommutatorError(float(comm), comm_tol)
    U, lam_H, lam_V = _joint_eigh(H, V)
    return CommutingPair(U=U, lam_H=lam_H, lam_V=lam_V)


def dephasing_solution(rho0, pair, delta, t):
    """Closed-form dephasing evolution in the joint eigenbasis.

    rho(t) = U (E(t) o (U^dag rho0 U)) U^dag, elementwise factors
    E_kl(t) = exp(t * (-i w_kl + delta * g_kl)).

    Parameters
    ----------
    rho0 : ndarray, initial density matrix.
    pair : CommutingPair
    delta : float, dephasing strength (rate multiplier), >= 0 for a CP map.
    t : float

    Returns
    -------
    ndarray, shape (N, N)
    """
    rho0 = np.asarray(rho0, dtype=complex)
    U = pair.U
    lh = pair.lam_H
    lv = pair.lam_V
    w = lh[:, None] - lh[None, :]
    g = -0.5 * (lv[:, None] - lv[None, :]) ** 2
    factors = np.exp(t * (-1j * w + delta * g))
    rho_e = U.conj().T @ rho0 @ U
    return U @ (factors * rho_e) @ U.conj().T


@dataclass(frozen=True)
class DephasingSpectrum:
    """Oscillation/damping pairs of a diagonalized dephasing generator.

    omegas[j], gammas[j] describe one decoupled coordinate with generator
    entry i*omegas[j] + delta*gammas[j]; kernel_dim counts the frozen
    coordinates (N for a nondegenerate dephasing pair).
    """

    omegas: np.ndarray
    gammas: np.ndarray
    kernel_dim: int

    @classmethod
    def from_pair(cls, pair, tol=1e-9):
        """Spectrum from the Hilbert-space eigenvalues of (H, V)."""
        lh = pair.lam_H
        lv = pair.lam_V
        N = pair.dim
        w_all = lh[:, None] - lh[None, :]
        g_all = -0.5 * (lv[:, None] - lv[None, :]) ** 2
        sw = max(1.0, np.max(np.abs(lh)))
        sg = max(1.0, np.max(np.abs(lv)) ** 2)
        frozen = (np.abs(w_all) <= tol * sw) & (np.abs(g_all) <= tol * sg)
        off = ~np.eye(N, dtype=bool)
        keep = off & ~frozen
        omegas = w_all[keep]
        gammas = g_all[keep]
        order = np.lexsort((gammas, omegas))
        return cls(
            omegas=omegas[order],
            gammas=gammas[order],
            kernel_dim=int(np.sum(frozen)),
        )

    @property
    def size(self):
        return self.omegas.size


def commuting_bloch_spectrum(A, S, basis=None, comm_tol=1e-10, zero_tol=1e-9):
    """Joint spectrum of commuting Bloch generators (A antisymmetric, S symmetric).

    Since iA is Hermitian and commutes with the symmetric S, both are
    diagonalized by one unitary:  U^dag A U = diag(1j*omegas, 0) and
    U^dag S U = diag(gammas, 0), with the joint kernel ordered last.

    Parameters
    ----------
    A : ndarray, real antisymmetric (Hamiltonian Bloch generator).
    S : ndarray, real symmetric (dephasing Bloch generator).
    basis : OperatorBasis, optional; when given, the joint kernel dimension is
        checked against the expected value N.
    comm_tol, zero_tol : float

    Returns
    -------
    (DephasingSpectrum, U)

    Raises
    ------
    CommutatorError
        If ||AS - SA||_F > comm_tol.
    KernelMismatchError
        If the kernels of A and S do not coincide, or (when ``basis`` is
        given) the joint kernel dimension differs from N.
    """
    A = np.asarray(A, dtype=float)
    S = np.asarray(S, dtype=float)
    comm = np.linalg.norm(A @ S - S @ A)
    if comm > comm_tol:
        raise CommutatorError(float(comm), comm_tol)
    X = 1j * A  # Hermitian for antisymmetric A
    check_hermitian(X, tol=1e-10, name="iA")
    check_hermitian(S + 0j, tol=1e-10, name="S")
    U, a, g = _joint_eigh(X, S.astype(complex))
    sa = max(1.0, np.max(np.abs(a)))
    sg = max(1.0, np.max(np.abs(g)))
    ker_a = np.abs(a) <= zero_tol * sa
    ker_g = np.abs(g) <= zero_tol * sg
    if not np.array_equal(ker_a, ker_g):
        raise KernelMismatchError(
            f"kernels do not coincide: dim ker(A) = {int(ker_a.sum())}, "
            f"dim ker(S) = {int(ker_g.sum())}, joint = {int((ker_a & ker_g).sum())}"
        )
    kernel = ker_a
    n_ker = int(kernel.sum())
    if basis is not None and n_ker != basis.dim:
        raise KernelMismatchError(
            f"joint kernel dimension {n_ker} differs from expected {basis.dim}"
        )
    idx_live = np.where(~kernel)[0]
    idx_ker = np.where(kernel)[0]
    omegas = -a[idx_live]  # A-eigenvalue is -i*a = 1j*(-a)
    gammas = g[idx_live]
    order = np.lexsort((gammas, omegas))
    perm = np.concatenate([idx_live[order], idx_ker])
    spectrum = DephasingSpectrum(
        omegas=omegas[order], gammas=gammas[order], kernel_dim=n_ker
    )
    return spectrum, U[:, perm]


def dephasing_transfer(omega, delta, spectrum):
    """Diagonal transfer matrix at s = i*omega for a dephasing spectrum.

    Entry j is delta*g_j / (i*omega - i*w_j - delta*g_j): the gain from the
    j-th normalized perturbation input to the j-th deviation coordinate.

    Returns
    -------
    ndarray, complex, shape (size, size), diagonal.
    """
    w = spectrum.omegas
    g = spectrum.gammas
    num = delta * g
    den = 1j * (omega - w) - delta * g
    return np.diag(num / den)


def dephasing_hinf(delta, spectrum, grid_points=257, refine_iters=60):
    """Peak gain sup_omega ||T(i*omega)|| of the diagonal dephasing transfer.

    Each diagonal entry has modulus |delta*g_j| / sqrt((omega-w_j)^2 +
    (delta*g_j)^2), which peaks at exactly 1 at omega = w_j; the supremum over
    frequency is therefore 1 for every delta > 0 whenever any g_j < 0.  The
    search seeds the exact resonance frequencies, scans a bracketing grid and
    polishes with golden-section, so the returned value is the attained
    maximum rather than an assumption.

    Parameters
    ----------
    delta : float, > 0.
    spectrum : DephasingSpectrum

    Returns
    -------
    float
    """
    if delta <= 0:
        raise ValueError(f"perturbation strength must be positive, got {delta}")
    w = spectrum.omegas
    g = spectrum.gammas
    if w.size == 0 or np.max(np.abs(g)) == 0.0:
        return 0.0
    dg = delta * g

    def gain(om):
        return float(np.max(np.abs(dg) / np.hypot(om - w, dg)))

    span = 4.0 * np.max(np.abs(dg)) + 1.0
    lo = float(np.min(w) - span)
    hi = float(np.max(w) + span)
    candidates = np.concatenate([np.linspace(lo, hi, grid_points), w])
    candidates = np.unique(candidates)
    vals = np.array([gain(om) for om in candidates])
    k = int(np.argmax(vals))
    a = candidates[max(0, k - 1)]
    b = candidates[min(len(candidates) - 1, k + 1)]
    if a == b:
        return float(vals[k])
    _, best = golden_max(gain, a, b, iters=refine_iters)
    return float(max(best, vals[k]))
