"""Dense statevector engine for the kicked Ising drive and the XY control
model, plus exact Floquet diagonalization for pairing diagnostics.

Basis convention: site j (1-based) lives on bit j-1 of the amplitude index,
least-significant bit first, so |psi[k]| is the amplitude of the bitstring
whose site-1 value is k & 1. Gate kernels accept a leading batch axis, evolve
in place when the input is C-contiguous, and always return the evolved array;
callers must use the return value.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .core import BitString, ChainParams, PauliString, RngSpec

DENSE_DIAG_MAX_SITES = 12
DYNAMICS_MAX_SITES = 14


class SizeCapError(ValueError):
    """Requested chain length exceeds the dense-engine cap."""


def bitstring_state(psi0: BitString) -> np.ndarray:
    state = np.zeros(1 << psi0.length, dtype=complex)
    state[psi0.index()] = 1.0
    return state


def _check_dynamics_size(L: int) -> None:
    if L > DYNAMICS_MAX_SITES:
        raise SizeCapError(f"L={L} exceeds the dense dynamics cap {DYNAMICS_MAX_SITES}")


def _spins(L: int) -> np.ndarray:
    """(2^L, L) array of Z eigenvalues (+1/-1) per basis state and site."""
    idx = np.arange(1 << L, dtype=np.int64)
    bits = (idx[:, None] >> np.arange(L)) & 1
    return 1 - 2 * bits


def _rotate_x_all(state: np.ndarray, L: int, angle: float) -> np.ndarray:
    """exp(-i angle/2 X_j) on every site."""
    c, s = np.cos(angle / 2), np.sin(angle / 2)
    for j in range(L):
        psi = state.reshape(-1, 2, 1 << j)
        a = psi[:, 0, :].copy()
        b = psi[:, 1, :]
        psi[:, 0, :] = c * a - 1j * s * b
        psi[:, 1, :] = -1j * s * a + c * b
    return state


class KickedIsingCycle:
    """One cycle of the kicked Ising drive: X kicks, ZZ layer, Z fields.

    The rightmost factor of the cycle unitary acts first, so apply() performs
    the X layer, then multiplies the combined ZZ + field diagonal.
    """

    def __init__(self, params: ChainParams):
        if params.variant != "kicked_ising":
            raise ValueError("params are not a kicked Ising drive")
        _check_dynamics_size(params.L)
        self.params = params
        self.L = params.L
        s = _spins(params.L)
        zz = (s[:, :-1] * s[:, 1:]).sum(axis=1)
        h = np.asarray(params.h)
        self._diag = np.exp(-0.5j * np.pi * params.J * zz) * np.exp(-0.5j * (s @ h))
        self._angle = np.pi * params.g

    def apply(self, state: np.ndarray) -> np.ndarray:
        state = np.ascontiguousarray(state)  # reshape views below require C order
        _rotate_x_all(state, self.L, self._angle)
        state *= self._diag
        return state


def apply_kicked_ising_cycle(state: np.ndarray, params: ChainParams) -> np.ndarray:
    """Single-shot convenience wrapper; build a KickedIsingCycle for loops."""
    return KickedIsingCycle(params).apply(state)


class XYCycle:
    """One cycle of the XY control drive.

    Two layers of number-conserving two-qubit gates -- odd bonds (1-2, 3-4,
    ...) then even bonds (2-3, ...) -- followed by the Z-field layer. Each
    bond gate is the identity on the 0- and 2-excitation states and acts on
    the one-excitation pair (site j excited, site j+1 excited) as
    [[e^{i zeta}, -i], [-i, e^{-i zeta}]] / sqrt(2).
    """

    def __init__(self, L: int, zeta: float, h: np.ndarray | None = None):
        _check_dynamics_size(L)
        self.L = L
        self.zeta = zeta
        self.h = np.zeros(L) if h is None else np.asarray(h, dtype=float)
        if self.h.shape != (L,):
            raise ValueError("h must have length L")
        s = _spins(L)
        self._diag = np.exp(-0.5j * (s @ self.h))
        rt = 1 / np.sqrt(2)
        self._blk = np.array(
            [[np.exp(1j * zeta) * rt, -1j * rt], [-1j * rt, np.exp(-1j * zeta) * rt]]
        )
        self._odd = [j for j in range(0, L - 1, 2)]
        self._even = [j for j in range(1, L - 1, 2)]

    @classmethod
    def from_params(cls, params: ChainParams) -> "XYCycle":
        if params.variant != "xy":
            raise ValueError("params are not an XY drive")
        return cls(params.L, params.zeta, np.asarray(params.h))

    def _bond(self, state: np.ndarray, j: int) -> None:
        # sites (j, j+1) live on bits (j, j+1); middle axes below are
        # (bit j+1, bit j), so index 1 = site j excited, 2 = site j+1 excited
        psi = state.reshape(-1, 4, 1 << j)
        a = psi[:, 1, :].copy()
        b = psi[:, 2, :]
        g = self._blk
        psi[:, 1, :] = g[0, 0] * a + g[0, 1] * b
        psi[:, 2, :] = g[1, 0] * a + g[1, 1] * b

    def apply(self, state: np.ndarray) -> np.ndarray:
        state = np.ascontiguousarray(state)  # reshape views below require C order
        for j in self._odd:
            self._bond(state, j)
        for j in self._even:
            self._bond(state, j)
        state *= self._diag
        return state


def apply_xy_cycle(state: np.ndarray, params: ChainParams) -> np.ndarray:
    return XYCycle.from_params(params).apply(state)


def xy_one_body_matrix(L: int, zeta: float, h: np.ndarray | None = None) -> tuple[np.ndarray, complex]:
    """One-cycle matrix on the single-excitation subspace and the vacuum phase.

    Returns (M, v): amplitudes in the basis |site j excited> evolve as
    M @ c per cycle, and the no-excitation amplitude picks up the phase v.
    """
    h = np.zeros(L) if h is None else np.asarray(h, dtype=float)
    rt = 1 / np.sqrt(2)
    blk = np.array([[np.exp(1j * zeta) * rt, -1j * rt], [-1j * rt, np.exp(-1j * zeta) * rt]])
    M = np.eye(L, dtype=complex)
    for start in (0, 1):
        layer = np.eye(L, dtype=complex)
        for j in range(start, L - 1, 2):
            layer[j, j] = blk[0, 0]
            layer[j, j + 1] = blk[0, 1]
            layer[j + 1, j] = blk[1, 0]
            layer[j + 1, j + 1] = blk[1, 1]
        M = layer @ M
    vac = np.exp(-0.5j * h.sum())
    M = np.diag(vac * np.exp(1j * h)) @ M
    return M, complex(vac)


def xy_single_excitation_modes(
    zeta: float, h: np.ndarray | None, L: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Eigenphases, eigenvectors and edge flags of the one-body cycle matrix.

    A mode is flagged as an edge mode when its participation ratio is below
    L/3 and its weight maximum sits on the first or last site.
    """
    M, _ = xy_one_body_matrix(L, zeta, h)
    T, V = scipy.linalg.schur(M, output="complex")
    phases = np.angle(np.diag(T))
    weights = np.abs(V) ** 2
    pr = 1.0 / np.sum(weights**2, axis=0)
    peak = np.argmax(weights, axis=0)
    edge = (pr < L / 3) & ((peak == 0) | (peak == L - 1))
    return phases, V, edge


# ---------------------------------------------------------------------------
# Measurement
# ---------------------------------------------------------------------------

def _pauli_action(P: PauliString, L: int) -> tuple[np.ndarray, np.ndarray]:
    """(flip, phases): P|k> = phases[k] |k ^ flip> in the bit convention."""
    flip = 0
    ymask = 0
    signmask = 0
    ny = 0
    for j, c in enumerate(P.ops):
        if c == "X":
            flip |= 1 << j
        elif c == "Y":
            flip |= 1 << j
            ymask |= 1 << j
            ny += 1
        elif c == "Z":
            signmask |= 1 << j
    idx = np.arange(1 << L, dtype=np.int64)
    par = np.bitwise_count(idx & (ymask | signmask)).astype(np.int64) & 1
    phases = P.phase * (1j**ny) * (1 - 2 * par)
    return np.full(idx.shape, flip, dtype=np.int64) ^ idx, phases


def measure_pauli(state: np.ndarray, P: PauliString) -> float:
    """Exact <psi|P|psi> for Hermitian P."""
    if not P.is_hermitian():
        raise ValueError("expectation of a non-Hermitian Pauli string")
    L = P.length
    if state.shape[-1] != 1 << L:
        raise ValueError("state and operator size mismatch")
    target, phases = _pauli_action(P, L)
    val = np.sum(np.conj(state[..., target]) * phases * state, axis=-1)
    if np.max(np.abs(np.imag(val))) > 1e-10:
        raise RuntimeError("Hermitian expectation came out complex")
    return float(np.real(val)) if val.ndim == 0 else np.real(val)


def measure_z_all(state: np.ndarray) -> np.ndarray:
    """<Z_j> for every site, shape (L,)."""
    L = int(np.log2(state.shape[-1]))
    probs = np.abs(state) ** 2
    return probs @ _spins(L).astype(float)


def sample_shots(state: np.ndarray, basis: PauliString, n_shots: int, rng: RngSpec | np.random.Generator) -> float:
    """Binomially sampled estimate of <P>; standard error 1/sqrt(n_shots)."""
    if n_shots < 1:
        raise ValueError("need at least one shot")
    gen = rng.generator() if isinstance(rng, RngSpec) else rng
    p = 0.5 * (1.0 + np.clip(measure_pauli(state, basis), -1.0, 1.0))
    k = gen.binomial(n_shots, p)
    return 2.0 * k / n_shots - 1.0


# ---------------------------------------------------------------------------
# Exact Floquet diagonalization
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FloquetSpectrum:
    """Eigenphases in (-pi, pi] (sorted), matching eigenvector columns, and
    spin-flip parity expectation values (only meaningful at h = 0)."""

    thetas: np.ndarray
    vectors: np.ndarray
    parity: np.ndarray | None


def floquet_unitary(params: ChainParams) -> np.ndarray:
    """Dense one-cycle unitary (column k = cycle applied to basis state k)."""
    L = params.L
    if L > DENSE_DIAG_MAX_SITES:
        raise SizeCapError(f"L={L} exceeds the dense diagonalization cap {DENSE_DIAG_MAX_SITES}")
    cycle = KickedIsingCycle(params) if params.variant == "kicked_ising" else XYCycle.from_params(params)
    basis = np.eye(1 << L, dtype=complex)
    return cycle.apply(basis).T


def exact_floquet_diagonalize(params: ChainParams) -> FloquetSpectrum:
    U = floquet_unitary(params)
    T, V = scipy.linalg.schur(U, output="complex")
    thetas = np.angle(np.diag(T))
    order = np.argsort(thetas, kind="stable")
    thetas = thetas[order]
    V = V[:, order]
    err = np.linalg.norm(U - (V * np.exp(1j * thetas)) @ V.conj().T)
    if err > 1e-8:
        raise RuntimeError(f"eigendecomposition residual {err:.2e}")
    parity = None
    if params.variant == "kicked_ising" and params.integrable:
        flip_all = (1 << params.L) - 1
        idx = np.arange(1 << params.L)
        parity = np.real(np.sum(np.conj(V[idx ^ flip_all, :]) * V, axis=0))
    return FloquetSpectrum(thetas=thetas, vectors=V, parity=parity)


def pi_pairing_defect(spectrum: FloquetSpectrum) -> float:
    """Worst-case deviation of any eigenphase's best pi-partner from theta+pi.

    Greedy nearest-on-circle search on the sorted eigenphases.
    """
    thetas = np.sort(spectrum.thetas)
    n = thetas.size
    targets = np.mod(thetas + np.pi + np.pi, 2 * np.pi) - np.pi  # wrap to (-pi, pi]
    pos = np.searchsorted(thetas, targets)
    best = np.full(n, np.inf)
    for shift in (-1, 0, 1):
        cand = np.clip(pos + shift, 0, n - 1)
        d = np.abs(thetas[cand] - targets)
        d = np.minimum(d, 2 * np.pi - d)
        best = np.minimum(best, d)
    return float(np.max(best))


def mean_level_spacing(L: int) -> float:
    return 2 * np.pi / (1 << L)


# ---------------------------------------------------------------------------
# Static transverse-Ising oracle (continuous-time limit of the drive)
# ---------------------------------------------------------------------------

def transverse_ising_hamiltonian(L: int, g: float, J: float) -> np.ndarray:
    """H = (pi J / 2) sum Z_j Z_{j+1} + (pi g / 2) sum X_j, dense."""
    dim = 1 << L
    s = _spins(L)
    H = np.diag(((s[:, :-1] * s[:, 1:]).sum(axis=1) * (np.pi * J / 2)).astype(complex))
    idx = np.arange(dim)
    for j in range(L):
        H[idx, idx ^ (1 << j)] += np.pi * g / 2
    return H


def hamiltonian_evolution(L: int, g: float, J: float, t: float) -> np.ndarray:
    """exp(-i H t) for the static transverse-Ising Hamiltonian above."""
    H = transverse_ising_hamiltonian(L, g, J)
    w, V = np.linalg.eigh(H)
    return (V * np.exp(-1j * w * t)) @ V.conj().T
