"""Shared fixtures and random-instance generators for the test suite."""

import numpy as np
import pytest


def random_hermitian(rng, n, scale=1.0):
    """Dense Hermitian matrix with entries of typical size ``scale``."""
    Z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return scale * 0.5 * (Z + Z.conj().T)


def random_density(rng, n):
    """Full-rank random density matrix (Wishart normalized to unit trace)."""
    Z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    W = Z @ Z.conj().T + 1e-3 * np.eye(n)
    return W / np.trace(W).real


def random_commuting_pair(rng, n, min_gap=1e-3):
    """Commuting Hermitian (H, V) with distinct, well-separated eigenvalues.

    Both operators share a Haar-random eigenbasis; the spectra are drawn
    uniformly and redrawn until every eigenvalue gap exceeds ``min_gap`` so
    the pair is unambiguous for joint diagonalization.
    """
    Z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    Q, _ = np.linalg.qr(Z)
    while True:
        lh = rng.uniform(-2.0, 2.0, size=n)
        lv = rng.uniform(-2.0, 2.0, size=n)
        if (np.min(np.diff(np.sort(lh))) > min_gap
                and np.min(np.diff(np.sort(lv))) > min_gap):
            break
    H = (Q * lh) @ Q.conj().T
    V = (Q * lv) @ Q.conj().T
    return 0.5 * (H + H.conj().T), 0.5 * (V + V.conj().T)


@pytest.fixture
def rng():
    return np.random.default_rng(20260814)
