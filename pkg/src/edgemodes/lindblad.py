"""Open-system engine: discrete-time dissipative evolution at small L,
Pauli-string decay rates, and the closed-form effective decay rate of the
edge operator.

Time evolution is always the discrete channel: one cycle of the drive
followed by an independent single-site damping/dephasing map on every site
(diagonal damping gamma_d, off-diagonal factor (1-gamma_phi) sqrt(1-gamma_d)).
Damping moves population toward bit 0 (<Z> = +1). The continuous-generator
rate formulas are used analytically; per-cycle probabilities equal the rates
for small gamma.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import BitString, ChainParams, PauliString
from .freefermion import DelocalizedModeError, edge_eigenvalue
from .statevector import KickedIsingCycle, XYCycle, _pauli_action, bitstring_state

DENSITY_MAX_SITES = 10


class DensitySizeError(ValueError):
    """Chain too long for dense density-matrix evolution."""


@dataclass(frozen=True)
class NoiseParams:
    """Per-cycle dephasing and decay probabilities, uniform or per site."""

    gamma_phi: float | tuple[float, ...] = 0.0
    gamma_d: float | tuple[float, ...] = 0.0

    def __post_init__(self):
        for name in ("gamma_phi", "gamma_d"):
            v = getattr(self, name)
            arr = np.atleast_1d(np.asarray(v, dtype=float))
            if np.any(arr < 0) or np.any(arr > 1):
                raise ValueError(f"{name} must lie in [0, 1]")

    def phi_vec(self, L: int) -> np.ndarray:
        return self._vec(self.gamma_phi, L)

    def d_vec(self, L: int) -> np.ndarray:
        return self._vec(self.gamma_d, L)

    @staticmethod
    def _vec(v, L: int) -> np.ndarray:
        arr = np.atleast_1d(np.asarray(v, dtype=float))
        if arr.size == 1:
            return np.full(L, float(arr[0]))
        if arr.size != L:
            raise ValueError(f"per-site rates must have length {L}")
        return arr.copy()

    def site_rates(self, L: int) -> np.ndarray:
        """Gamma_j = gamma_phi_j + gamma_d_j / 2 (X/Y decay rate per site)."""
        return self.phi_vec(L) + 0.5 * self.d_vec(L)

    @property
    def is_weak(self) -> bool:
        top = max(np.max(np.atleast_1d(self.gamma_phi)), np.max(np.atleast_1d(self.gamma_d)))
        return bool(top < 0.05)


def string_decay_rate(P: PauliString, noise: NoiseParams) -> float:
    """Decay rate of a Pauli string under the dissipative generator.

    Site-wise: X or Y contributes Gamma_j = gamma_phi_j + gamma_d_j/2, Z
    contributes gamma_d_j, identity contributes nothing. For the edge-operator
    family this reduces to sum_{i<k} Gamma_i + gamma_{kd} for X...X Z_k and
    sum_{i<=k} Gamma_i for X...X Y_k.
    """
    L = P.length
    phi = noise.phi_vec(L)
    d = noise.d_vec(L)
    rate = 0.0
    for j, c in enumerate(P.ops):
        if c in ("X", "Y"):
            rate += phi[j] + 0.5 * d[j]
        elif c == "Z":
            rate += d[j]
    return float(rate)


def gamma_eff(
    g: float,
    noise: NoiseParams,
    J: float = 0.5,
    sector: str = "pi",
    n_terms: int | None = None,
) -> float:
    """Effective decay rate of the edge operator: sum_k alpha_k^2 Gamma_k.

    For uniform noise the two geometric series are evaluated in closed form;
    per-site noise vectors are summed term by term (n_terms defaults to the
    vector length).
    """
    lam, delocalized = edge_eigenvalue(g, J, sector)
    if delocalized:
        raise DelocalizedModeError(f"no localized {sector} mode at g={g}, J={J}")
    half = np.pi * g / 2
    if sector == "pi":
        wz2, wy2 = np.sin(half) ** 2, np.cos(half) ** 2
    else:
        wz2, wy2 = np.cos(half) ** 2, np.sin(half) ** 2
    q = lam * lam
    phi = np.atleast_1d(np.asarray(noise.gamma_phi, dtype=float))
    d = np.atleast_1d(np.asarray(noise.gamma_d, dtype=float))
    if phi.size == 1 and d.size == 1 and n_terms is None:
        G = float(phi[0]) + 0.5 * float(d[0])
        gd = float(d[0])
        # sum_k q^{k-1} (k-1) G = G q/(1-q)^2 ; sum_k q^{k-1} = 1/(1-q)
        # sum_k q^{k-1} k G = G/(1-q)^2 ; overall prefactor C^2 = 1-q
        return float(wz2 * (G * q / (1 - q) + gd) + wy2 * G / (1 - q))
    L = n_terms or max(phi.size, d.size)
    phi = NoiseParams._vec(noise.gamma_phi, L)
    d = NoiseParams._vec(noise.gamma_d, L)
    G = phi + 0.5 * d
    csum = np.concatenate([[0.0], np.cumsum(G)])
    total = 0.0
    for k in range(1, L + 1):
        w = q ** (k - 1)
        total += w * (wz2 * (csum[k - 1] + d[k - 1]) + wy2 * csum[k])
    return float((1 - q) * total)


# ---------------------------------------------------------------------------
# Discrete dissipative channel
# ---------------------------------------------------------------------------

def _check_density_size(L: int) -> None:
    if L > DENSITY_MAX_SITES:
        raise DensitySizeError(f"L={L} exceeds the density-matrix cap {DENSITY_MAX_SITES}")


def density_from_bitstring(psi0: BitString) -> np.ndarray:
    state = bitstring_state(psi0)
    return np.outer(state, state.conj())


def apply_dissipation(rho: np.ndarray, noise: NoiseParams, L: int) -> np.ndarray:
    """Product of single-site damping/dephasing maps, in place.

    Per site: rho_00 += gamma_d rho_11, rho_11 *= 1-gamma_d, off-diagonals
    shrink by (1-gamma_phi) sqrt(1-gamma_d).
    """
    phi = noise.phi_vec(L)
    d = noise.d_vec(L)
    dim = 1 << L
    for j in range(L):
        if phi[j] == 0.0 and d[j] == 0.0:
            continue
        f = (1 - phi[j]) * np.sqrt(1 - d[j])
        view = rho.reshape(dim >> (j + 1), 2, 1 << j, dim >> (j + 1), 2, 1 << j)
        r11 = view[:, 1, :, :, 1, :]
        view[:, 0, :, :, 0, :] += d[j] * r11
        r11 *= 1 - d[j]
        view[:, 0, :, :, 1, :] *= f
        view[:, 1, :, :, 0, :] *= f
    return rho


def _conjugate_by_cycle(rho: np.ndarray, cycle) -> np.ndarray:
    """U rho U^dagger via the statevector kernels (no dense U materialized)."""
    X = cycle.apply(np.ascontiguousarray(rho.T)).T  # X^T = rho^T U^T, i.e. X = U rho
    return np.conj(cycle.apply(np.ascontiguousarray(np.conj(X))))  # (U X^dag)^dag = X U^dag


def make_cycle(params: ChainParams):
    return KickedIsingCycle(params) if params.variant == "kicked_ising" else XYCycle.from_params(params)


def dissipative_channel_step(rho: np.ndarray, params: ChainParams, noise: NoiseParams,
                             cycle=None) -> np.ndarray:
    """One step of the channel: drive cycle, then single-site dissipation."""
    _check_density_size(params.L)
    if cycle is None:
        cycle = make_cycle(params)
    rho = _conjugate_by_cycle(rho, cycle)
    return apply_dissipation(rho, noise, params.L)


def apply_pauli_left(P: PauliString, M: np.ndarray) -> np.ndarray:
    """P @ M using the permutation-phase action of a Pauli string."""
    L = P.length
    target, phases = _pauli_action(P, L)
    return phases[target][:, None] * M[target, :]


def pauli_trace(P: PauliString, M: np.ndarray) -> complex:
    """Tr(P M)."""
    target, phases = _pauli_action(P, L := P.length)
    idx = np.arange(1 << L)
    return complex(np.sum(phases[idx] * M[idx, target]))


def validate_density(rho: np.ndarray, eig_floor: float = -1e-9) -> dict:
    """Trace/hermiticity/positivity diagnostics; raises on violations."""
    tr = complex(np.trace(rho))
    herm = float(np.max(np.abs(rho - rho.conj().T)))
    if abs(tr - 1) > 1e-10:
        raise RuntimeError(f"trace drifted to {tr}")
    if herm > 1e-10:
        raise RuntimeError(f"hermiticity violated by {herm:.2e}")
    w = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))
    if w.min() < eig_floor:
        raise RuntimeError(f"negative eigenvalue {w.min():.2e}")
    return {"trace": tr, "hermiticity": herm, "min_eig": float(w.min())}


def dissipative_correlator(
    O: PauliString,
    rho0: np.ndarray | BitString,
    params: ChainParams,
    noise: NoiseParams,
    T: int,
    observables: list[PauliString] | None = None,
) -> dict[str, np.ndarray]:
    """Correlators Tr(C_k channel^t[O rho0]) for t = 0..T-1.

    ``observables`` defaults to [O]. The evolved matrix O rho0 is generally
    non-Hermitian; the channel is linear so that is fine.
    """
    _check_density_size(params.L)
    if isinstance(rho0, BitString):
        rho0 = density_from_bitstring(rho0)
    obs = observables if observables is not None else [O]
    M = apply_pauli_left(O, rho0.astype(complex))
    cycle = make_cycle(params)
    out = {P.label(): np.empty(T, dtype=complex) for P in obs}
    for t in range(T):
        for P in obs:
            out[P.label()][t] = pauli_trace(P, M)
        M = _conjugate_by_cycle(M, cycle)
        M = apply_dissipation(M, noise, params.L)
    for label, series in out.items():
        if np.max(np.abs(series.imag)) < 1e-9:
            out[label] = series.real.copy()
    return out


def evolve_density(
    rho0: np.ndarray,
    params: ChainParams,
    noise: NoiseParams,
    T: int,
    observables: list[PauliString],
    validate_every: int = 0,
) -> dict[str, np.ndarray]:
    """Forward channel evolution of a density matrix, recording expectations."""
    _check_density_size(params.L)
    rho = rho0.astype(complex).copy()
    cycle = make_cycle(params)
    out = {P.label(): np.empty(T, dtype=complex) for P in observables}
    for t in range(T):
        for P in observables:
            out[P.label()][t] = pauli_trace(P, rho)
        rho = _conjugate_by_cycle(rho, cycle)
        rho = apply_dissipation(rho, noise, params.L)
        if validate_every and (t + 1) % validate_every == 0:
            validate_density(rho)
    return {k: (v.real.copy() if np.max(np.abs(v.imag)) < 1e-9 else v) for k, v in out.items()}


def chi_string_family(L: int, n_strings: int = 5, side: str = "left") -> list[PauliString]:
    """Leading Pauli strings of the edge-operator expansion.

    Left edge: Z1, Y1, X1Z2, X1Y2, X1X2Z3, ... Right edge mirrors them onto
    the last sites.
    """
    out: list[PauliString] = []
    k = 1
    while len(out) < n_strings:
        if side == "left":
            prefix = {i: "X" for i in range(1, k)}
            out.append(PauliString.from_sites(L, {**prefix, k: "Z"}))
            if len(out) < n_strings:
                out.append(PauliString.from_sites(L, {**prefix, k: "Y"}))
        else:
            prefix = {L - i + 1: "X" for i in range(1, k)}
            out.append(PauliString.from_sites(L, {**prefix, L - k + 1: "Z"}))
            if len(out) < n_strings:
                out.append(PauliString.from_sites(L, {**prefix, L - k + 1: "Y"}))
        k += 1
    return out


def lifetime_vs_g(
    g_grid: np.ndarray,
    noise: NoiseParams,
    L: int,
    T: int = 300,
    J: float = 0.5,
    psi0: BitString | None = None,
    transient: int = 20,
    h_uniform: float = 0.0,
) -> list[dict]:
    """Edge-operator lifetime T_M(g) from exponential fits of <Z1(0)Z1(t)>.

    ``h_uniform`` adds an integrability-breaking uniform kick field; the
    prethermal regime leaves T_M unaffected at large g and shortens it
    closer to the transition.
    """
    from .spectroscopy import TimeSeries, fit_envelope

    psi0 = psi0 or BitString.zeros(L)
    Z1 = PauliString.from_sites(L, {1: "Z"})
    rows = []
    for g in g_grid:
        params = ChainParams.kicked_ising(L, float(g), J, h=[h_uniform] * L)
        series = dissipative_correlator(Z1, psi0, params, noise, T)[Z1.label()]
        row: dict = {"g": float(g)}
        try:
            fit = fit_envelope(TimeSeries(series, label="Z1"), "exponential", transient=transient)
            row["rate"] = 1.0 / fit.params["T_M"]
            row["T_M"] = fit.params["T_M"]
            row["fit_ok"] = fit.success
        except (ValueError, RuntimeError) as exc:
            row["rate"] = np.nan
            row["T_M"] = np.nan
            row["fit_ok"] = False
            row["error"] = str(exc)
        try:
            row["gamma_eff"] = gamma_eff(float(g), noise, J)
        except DelocalizedModeError:
            row["gamma_eff"] = np.nan
        rows.append(row)
    return rows
