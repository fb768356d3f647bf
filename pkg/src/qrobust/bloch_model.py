"""Real Bloch-space generators of Lindblad dynamics.

The density matrix is expanded in an orthonormal Hermitian basis (see
``operator_basis``); the master equation then reads ``dr/dt = A r`` with a
real N^2 x N^2 generator

    A = A_H + sum_k rate_k L(V_k),
    (A_H)_{mn} = Tr(i H [sigma_m, sigma_n]),
    L(V)_{mn}  = Tr(V^dag sigma_m V sigma_n)
                 - Tr(V^dag V {sigma_m, sigma_n}) / 2.

Trace preservation makes the last row of ``A`` vanish identically, so the
last Bloch coordinate is the constant 1/sqrt(N) and the dynamics is affine in
the remaining coordinates: ``ds/dt = A_bar s + c``.
"""

from dataclasses import dataclass, field

import numpy as np

from .operator_basis import OperatorBasis, build_basis, check_hermitian

__all__ = [
    "BlochModel",
    "ReducedBloch",
    "SteadyStateManifoldError",
    "bloch_hamiltonian",
    "bloch_lindblad",
    "assemble",
    "reduce",
    "split_affine",
    "steady_state",
    "rank_profile",
]

_REALITY_TOL = 1e-10


class SteadyStateManifoldError(np.linalg.LinAlgError):
    """The shifted generator is too ill-conditioned for a unique steady state."""

    def __init__(self, cond):
        self.cond = cond
        super().__init__(
            f"steady-state system is singular to working precision "
            f"(condition number {cond:.3e}); the steady manifold is not a point"
        )


def _real_part(M, what):
    resid = np.max(np.abs(M.imag))
    scale = max(1.0, np.max(np.abs(M.real)))
    if resid > _REALITY_TOL * scale:
        raise ValueError(f"{what} has imaginary residue {resid:.3e}; "
                         "check basis orthonormality and operator shapes")
    return np.ascontiguousarray(M.real)


def bloch_hamiltonian(H, basis):
    """Bloch generator of the commutator part, (A_H)_{mn} = Tr(iH[sigma_m, sigma_n]).

    Real and antisymmetric; its last row and column vanish.

    Parameters
    ----------
    H : ndarray, shape (N, N), Hermitian
    basis : OperatorBasis

    Returns
    -------
    ndarray, shape (N**2, N**2), real
    """
    H = np.asarray(H, dtype=complex)
    check_hermitian(H, name="Hamiltonian")
    E = basis.elements
    # M1[m, n] = Tr(H sigma_m sigma_n)
    M1 = np.einsum("ij,mjk,nki->mn", H, E, E, optimize=True)
    return _real_part(1j * (M1 - M1.T), "Hamiltonian Bloch map")


def bloch_lindblad(V, basis):
    """Bloch generator of a unit-rate dissipator with jump operator ``V``.

    Parameters
    ----------
    V : ndarray, shape (N, N)
    basis : OperatorBasis

    Returns
    -------
    ndarray, shape (N**2, N**2), real; symmetric when V is Hermitian.
    """
    V = np.asarray(V, dtype=complex)
    N = basis.dim
    if V.shape != (N, N):
        raise ValueError(f"jump operator shape {V.shape} does not match N={N}")
    E = basis.elements
    Vd = V.conj().T
    # L1[m, n] = Tr(V^dag sigma_m V sigma_n)
    L1 = np.einsum("ij,mjk,kl,nli->mn", Vd, E, V, E, optimize=True)
    # P[m, n] = Tr(V^dag V sigma_m sigma_n); the anticommutator contributes
    # (P + P^T)/2.
    P = np.einsum("ij,mjk,nki->mn", Vd @ V, E, E, optimize=True)
    return _real_part(L1 - 0.5 * (P + P.T), "dissipator Bloch map")


def _structure_from_spec(spec, basis):
    if isinstance(spec, np.ndarray):
        S = np.asarray(spec, dtype=float)
        if S.shape != (basis.size, basis.size):
            raise ValueError(f"structure matrix shape {S.shape}, "
                             f"expected {(basis.size, basis.size)}")
        return S
    S = np.zeros((basis.size, basis.size))
    used = False
    ham = spec.get("hamiltonian_term")
    if ham is not None:
        S = S + bloch_hamiltonian(np.asarray(ham, dtype=complex), basis)
        used = True
    jump = spec.get("jump_term")
    if jump is not None:
        V = np.asarray(jump["V"], dtype=complex)
        rate = float(jump.get("rate", 1.0))
        S = S + rate * bloch_lindblad(V, basis)
        used = True
    if not used:
        raise ValueError("structure spec has neither a Hamiltonian nor a jump term")
    return S


@dataclass(frozen=True)
class BlochModel:
    """Nominal Bloch generator with named perturbation structures."""

    dim: int
    basis: OperatorBasis
    A: np.ndarray
    structures: dict = field(default_factory=dict)

    def validate(self, tol=1e-9):
        """Check realness, finiteness and trace preservation of all matrices."""
        mats = {"A": self.A, **{k: v for k, v in self.structures.items()}}
        for name, M in mats.items():
            if not np.all(np.isfinite(M)):
                raise ValueError(f"{name} has non-finite entries")
            scale = max(1.0, np.max(np.abs(M)))
            if np.max(np.abs(M[-1, :])) > tol * scale:
                raise ValueError(f"{name} is not trace-preserving "
                                 f"(last row max {np.max(np.abs(M[-1, :])):.3e})")
        return True


def assemble(H, jumps=(), structures=None, basis=None):
    """Build the nominal Bloch generator and its perturbation structures.

    Parameters
    ----------
    H : ndarray, Hermitian Hamiltonian.
    jumps : iterable of JumpTerm (or objects with .V and .rate).
    structures : mapping id -> structure spec, where a spec is either a ready
        N^2 x N^2 matrix or a dict with keys "hamiltonian_term" (Hermitian
        matrix or None) and "jump_term" ({"V": matrix, "rate": float} or None).
    basis : OperatorBasis, optional; built from H's dimension if omitted.

    Returns
    -------
    BlochModel
    """
    H = np.asarray(H, dtype=complex)
    N = H.shape[0]
    if basis is None:
        basis = build_basis(N)
    A = bloch_hamiltonian(H, basis)
    for term in jumps:
        A = A + term.rate * bloch_lindblad(term.V, basis)
    built = {}
    if structures:
        for sid, spec in structures.items():
            built[sid] = _structure_from_spec(spec, basis)
    model = BlochModel(dim=N, basis=basis, A=A, structures=built)
    model.validate()
    return model


@dataclass(frozen=True)
class ReducedBloch:
    """Affine form of a trace-preserving generator: ds/dt = A_bar s + c."""

    A_bar: np.ndarray
    c: np.ndarray
    dim: int


def split_affine(M, N):
    """Split a trace-preserving generator into (linear block, affine column).

    The affine column is the last matrix column scaled by the constant trace
    coordinate 1/sqrt(N).
    """
    M = np.asarray(M, dtype=float)
    return M[:-1, :-1].copy(), M[:-1, -1] / np.sqrt(N)


def reduce(model):
    """Reduce a BlochModel to its affine form on the traceless coordinates."""
    model.validate()
    A_bar, c = split_affine(model.A, model.dim)
    return ReducedBloch(A_bar=A_bar, c=c, dim=model.dim)


def steady_state(red, delta=0.0, S=None, cond_max=1e12):
    """Solve (A_bar + delta*S_bar) s = -(c + delta*c_S) for the fixed point.

    Parameters
    ----------
    red : ReducedBloch
    delta : float, perturbation strength.
    S : optional perturbation structure; either a reduced (n-1)x(n-1) matrix
        (no affine part) or a full n x n trace-preserving matrix, from which
        the affine column is split off.
    cond_max : float, condition-number guard.

    Returns
    -------
    ndarray, shape (n-1,): steady Bloch coordinates (traceless part).

    Raises
    ------
    SteadyStateManifoldError
        If the shifted generator is singular to working precision (the steady
        set is a manifold, not a point).
    """
    M = red.A_bar.copy()
    rhs = -red.c.copy()
    if S is not None and delta != 0.0:
        S = np.asarray(S, dtype=float)
        if S.shape == red.A_bar.shape:
            M = M + delta * S
        else:
            S_bar, c_S = split_affine(S, red.dim)
            M = M + delta * S_bar
            rhs = rhs - delta * c_S
    cond = np.linalg.cond(M)
    if not np.isfinite(cond) or cond > cond_max:
        raise SteadyStateManifoldError(cond)
    return np.linalg.solve(M, rhs)


def rank_profile(M, tol=1e-9):
    """Numerical rank and eigenvalues of a real generator.

    Rank counts singular values above ``tol`` times the largest one;
    eigenvalues are returned sorted by decreasing real part (ties broken by
    decreasing imaginary part, so output is deterministic).

    Returns
    -------
    (rank, eigs) : (int, ndarray of complex)
    """
    M = np.asarray(M, dtype=float)
    sv = np.linalg.svd(M, compute_uv=False)
    rank = 0 if sv.size == 0 else int(np.sum(sv > tol * sv[0]))
    eigs = np.linalg.eigvals(M)
    order = np.lexsort((-eigs.imag, -eigs.real))
    return rank, eigs[order]
