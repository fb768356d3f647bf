"""Orthonormal Hermitian operator bases and Bloch-vector conversions.

A Bloch vector collects the real expansion coefficients of a density matrix
(or any Hermitian operator) in an orthonormal basis of Hermitian matrices,
``r_m = Tr(sigma_m rho)``.  The basis always stores the scaled identity
``I/sqrt(N)`` as its *last* element, so the final Bloch coordinate of a
density matrix is the constant ``1/sqrt(N)`` and every trace-preserving
generator has a vanishing last row in Bloch coordinates.
"""

from dataclasses import dataclass

import numpy as np

__all__ = [
    "OperatorBasis",
    "build_basis",
    "to_bloch",
    "from_bloch",
    "bloch_orthogonality_check",
    "check_hermitian",
]

# Single-qubit convention used throughout: note the signs of sigma_y and
# sigma_z (sigma_z = diag(-1, 1)); all two-qubit matrices downstream assume
# exactly this choice.
PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_Y = np.array([[0.0, 1.0j], [-1.0j, 0.0]], dtype=complex)
PAULI_Z = np.array([[-1.0, 0.0], [0.0, 1.0]], dtype=complex)

SIGMA_PLUS = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)
SIGMA_MINUS = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)


def check_hermitian(M, tol=1e-12, name="matrix"):
    """Raise ValueError unless ``M`` is Hermitian to relative tolerance."""
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"{name} must be square, got shape {M.shape}")
    scale = max(1.0, np.linalg.norm(M))
    dev = np.linalg.norm(M - M.conj().T)
    if dev > tol * scale:
        raise ValueError(f"{name} is not Hermitian (deviation {dev:.3e})")


@dataclass(frozen=True)
class OperatorBasis:
    """Orthonormal Hermitian basis of N x N matrices.

    Attributes
    ----------
    dim : int
        Hilbert-space dimension N.
    elements : ndarray, shape (N**2, N, N)
        Basis matrices, orthonormal in the Hilbert-Schmidt inner product.
    trace_index : int
        Index of the scaled identity I/sqrt(N); always the last slot.
    """

    dim: int
    elements: np.ndarray
    trace_index: int

    @property
    def size(self):
        return self.dim ** 2

    def gram(self):
        """Hilbert-Schmidt Gram matrix Tr(sigma_m sigma_n); identity if sane."""
        E = self.elements
        return np.real(np.einsum("mij,nji->mn", E, E))


def _qubit_elements():
    s = 1.0 / np.sqrt(2.0)
    return [s * PAULI_X, s * PAULI_Y, s * PAULI_Z, s * np.eye(2, dtype=complex)]


def _gell_mann_elements(N):
    """Generalized Gell-Mann matrices scaled to unit Hilbert-Schmidt norm."""
    mats = []
    s = 1.0 / np.sqrt(2.0)
    for j in range(N):
        for k in range(j + 1, N):
            M = np.zeros((N, N), dtype=complex)
            M[j, k] = M[k, j] = s
            mats.append(M)
    for j in range(N):
        for k in range(j + 1, N):
            M = np.zeros((N, N), dtype=complex)
            M[j, k] = -1j * s
            M[k, j] = 1j * s
            mats.append(M)
    for l in range(1, N):
        d = np.zeros(N)
        d[:l] = 1.0
        d[l] = -l
        M = np.diag(d.astype(complex)) / np.sqrt(l * (l + 1))
        mats.append(M)
    mats.append(np.eye(N, dtype=complex) / np.sqrt(N))
    return mats


def build_basis(N):
    """Build the orthonormal Hermitian basis for Hilbert dimension ``N``.

    N = 2 uses the fixed single-qubit convention above; N = 4 uses the 16
    lexicographic tensor products of the N = 2 elements (so the identity
    lands last automatically); other N use generalized Gell-Mann matrices.

    Parameters
    ----------
    N : int
        Hilbert-space dimension, N >= 2.

    Returns
    -------
    OperatorBasis
    """
    if not isinstance(N, (int, np.integer)) or N < 2:
        raise ValueError(f"dimension must be an integer >= 2, got {N!r}")
    if N == 2:
        mats = _qubit_elements()
    elif N == 4:
        q = _qubit_elements()
        mats = [np.kron(a, b) for a in q for b in q]
    else:
        mats = _gell_mann_elements(N)
    elements = np.array(mats)
    return OperatorBasis(dim=N, elements=elements, trace_index=N ** 2 - 1)


def to_bloch(rho, basis, imag_tol=1e-9):
    """Expand a Hermitian operator in the basis: r_m = Tr(sigma_m rho).

    Parameters
    ----------
    rho : ndarray, shape (N, N)
    basis : OperatorBasis
    imag_tol : float
        Largest tolerated imaginary residue in the coefficients.

    Returns
    -------
    ndarray, shape (N**2,), real
    """
    rho = np.asarray(rho, dtype=complex)
    N = basis.dim
    if rho.shape != (N, N):
        raise ValueError(f"operator shape {rho.shape} does not match N={N}")
    r = np.einsum("mij,ji->m", basis.elements, rho)
    resid = np.max(np.abs(r.imag))
    if resid > imag_tol:
        raise ValueError(
            f"Bloch coefficients have imaginary residue {resid:.3e}; "
            "input is not Hermitian to tolerance"
        )
    return r.real.copy()


def from_bloch(r, basis):
    """Reassemble the operator sum_m r_m sigma_m from real coefficients."""
    r = np.asarray(r, dtype=float)
    if r.shape != (basis.size,):
        raise ValueError(f"coefficient shape {r.shape}, expected ({basis.size},)")
    return np.einsum("m,mij->ij", r, basis.elements)


def bloch_orthogonality_check(P, Q, basis):
    """Return (Tr(P^dag Q), p . q) for Hermitian P, Q.

    The two numbers agree for an orthonormal basis; exposing both makes the
    isometry between operator space and coefficient space directly testable.
    """
    P = np.asarray(P, dtype=complex)
    Q = np.asarray(Q, dtype=complex)
    op_inner = np.trace(P.conj().T @ Q)
    if abs(op_inner.imag) > 1e-9 * max(1.0, abs(op_inner)):
        raise ValueError("Tr(P^dag Q) is not real; inputs must be Hermitian")
    p = to_bloch(P, basis)
    q = to_bloch(Q, basis)
    return float(op_inner.real), float(p @ q)
