"""Shared brute-force oracles: dense matrix builders independent of the
package's bit-kernel and free-fermion code paths."""

import numpy as np
import pytest

SINGLE = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def dense_pauli(ops: str, phase: complex = 1.0) -> np.ndarray:
    """Kron product with site 1 on the least-significant bit."""
    out = np.array([[phase]], dtype=complex)
    for c in ops:
        out = np.kron(SINGLE[c], out)
    return out


def dense_site_op(op: np.ndarray, site: int, L: int) -> np.ndarray:
    """Embed a single-site operator at 1-based ``site``."""
    out = np.array([[1.0]], dtype=complex)
    for j in range(1, L + 1):
        out = np.kron(op if j == site else np.eye(2, dtype=complex), out)
    return out


def dense_cycle_unitary(L: int, g: float, J: float, h) -> np.ndarray:
    """One drive cycle built from dense matrix exponentials only."""
    import scipy.linalg

    h = np.asarray(h, dtype=float)
    HX = sum(dense_site_op(SINGLE["X"], j, L) for j in range(1, L + 1))
    HZZ = sum(dense_site_op(SINGLE["Z"], j, L) @ dense_site_op(SINGLE["Z"], j + 1, L)
              for j in range(1, L))
    HZ = sum(h[j - 1] * dense_site_op(SINGLE["Z"], j, L) for j in range(1, L + 1))
    UX = scipy.linalg.expm(-0.5j * np.pi * g * HX)
    UZZ = scipy.linalg.expm(-0.5j * np.pi * J * HZZ)
    UH = scipy.linalg.expm(-0.5j * HZ)
    return UH @ UZZ @ UX


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)
