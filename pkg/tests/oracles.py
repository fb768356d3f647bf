"""Independent recomputation routes used to cross-check the package.

Every function here reaches a quantity through a *different* computational
path than the library does: Kronecker-product vectorization instead of
Bloch-coefficient algebra, adaptive ODE integration instead of matrix
exponentials, explicit linear-fractional loop closure instead of #-inverse
products, and a matrix-square-root concurrence instead of the eigenvalue
route.  Tests compare the two sides; neither is fitted to the other.
"""

import numpy as np
import scipy.integrate
import scipy.linalg

__all__ = [
    "vectorized_generator",
    "bloch_via_vectorization",
    "integrate_master_equation",
    "close_upper_loop",
    "complex_grid_mu_lower",
    "concurrence_sqrtm",
]


def vectorized_generator(H, jumps):
    """Column-stacking superoperator K with d vec(rho)/dt = K vec(rho).

    Uses the standard Kronecker identities vec(XYZ) = (Z^T (x) X) vec(Y)
    for column-major stacking (numpy order="F").

    Parameters
    ----------
    H : ndarray, shape (N, N)
    jumps : iterable of (V, rate) pairs

    Returns
    -------
    ndarray, shape (N**2, N**2), complex
    """
    H = np.asarray(H, dtype=complex)
    n = H.shape[0]
    eye = np.eye(n)
    K = -1j * (np.kron(eye, H) - np.kron(H.T, eye))
    for V, rate in jumps:
        V = np.asarray(V, dtype=complex)
        VdV = V.conj().T @ V
        K += rate * (np.kron(V.conj(), V)
                     - 0.5 * np.kron(eye, VdV)
                     - 0.5 * np.kron(VdV.T, eye))
    return K


def bloch_via_vectorization(H, jumps, basis):
    """Bloch generator computed by conjugating K with the basis isometry.

    The matrix B stacks vec(sigma_m) as columns; orthonormality makes it an
    isometry, so A = Re(B^dag K B) without ever touching the library's
    trace formulas.
    """
    K = vectorized_generator(H, jumps)
    B = np.stack([E.flatten(order="F") for E in basis.elements], axis=1)
    A = B.conj().T @ K @ B
    assert np.max(np.abs(A.imag)) < 1e-12 * max(1.0, np.max(np.abs(A)))
    return A.real


def integrate_master_equation(rho0, H, jumps, t, rtol=1e-11, atol=1e-13):
    """Propagate a density matrix with an adaptive high-order ODE solver."""
    rho0 = np.asarray(rho0, dtype=complex)
    n = rho0.shape[0]
    K = vectorized_generator(H, jumps)
    sol = scipy.integrate.solve_ivp(
        lambda _, y: K @ y, (0.0, float(t)), rho0.flatten(order="F"),
        method="DOP853", rtol=rtol, atol=atol)
    assert sol.success
    return sol.y[:, -1].reshape((n, n), order="F")


def close_upper_loop(G, delta):
    """Close the first channel of a two-block interconnection with delta*I.

    Returns G22 + delta * G21 (I - delta*G11)^{-1} G12, the transfer seen by
    the remaining (performance) channel.
    """
    G = np.asarray(G, dtype=complex)
    n = G.shape[0] // 2
    G11, G12, G21, G22 = G[:n, :n], G[:n, n:], G[n:, :n], G[n:, n:]
    inner = np.linalg.solve(np.eye(n) - delta * G11, G12)
    return G22 + delta * (G21 @ inner)


def complex_grid_mu_lower(G, radii, n_phases=16):
    """Grid lower bound on mu when the repeated block may be *complex*.

    For each delta = r*exp(i*phi) the smallest structured perturbation
    containing it has norm max(|delta|, 1/sigma_max(F(delta))), so the
    reciprocal of the grid minimum is a valid lower bound on the
    complex-structure mu.  Comparing it against bounds that exploit the
    realness of delta shows whether that realness actually matters.
    """
    G = np.asarray(G, dtype=complex)
    best = np.inf
    phases = np.exp(2j * np.pi * np.arange(n_phases) / n_phases)
    for r in radii:
        for ph in phases:
            d = complex(r * ph)
            try:
                F = close_upper_loop(G, d)
            except np.linalg.LinAlgError:
                continue
            if not np.all(np.isfinite(F)):
                continue
            sF = np.linalg.norm(F, 2)
            h = abs(d) if sF == 0.0 else max(abs(d), 1.0 / sF)
            best = min(best, h)
    return 0.0 if not np.isfinite(best) else 1.0 / best


def concurrence_sqrtm(rho):
    """Two-qubit concurrence via the matrix-square-root definition.

    C = max(0, l1 - l2 - l3 - l4) with l_k the decreasing eigenvalues of
    sqrt(sqrt(rho) * rho_tilde * sqrt(rho)) and rho_tilde the spin-flipped
    state.
    """
    rho = np.asarray(rho, dtype=complex)
    sy = np.array([[0.0, -1.0j], [1.0j, 0.0]])
    yy = np.kron(sy, sy)
    rho_tilde = yy @ rho.conj() @ yy
    root = scipy.linalg.sqrtm(rho)
    R = scipy.linalg.sqrtm(root @ rho_tilde @ root)
    lam = np.sort(np.linalg.eigvals(R).real)[::-1]
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))
