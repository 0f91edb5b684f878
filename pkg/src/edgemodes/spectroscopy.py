"""Frequency-domain analysis of cycle-indexed observables.

Spectra are plain discrete Fourier amplitudes on the canonical grid
omega_k = 2 pi k / T (no window function, matching the sinc sidelobes of
the raw drive spectra); a Hann window and zero padding are available as
options and recorded in the spectrum metadata.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import least_squares


@dataclass(frozen=True)
class TimeSeries:
    """Uniformly sampled observable, one sample per drive cycle."""

    values: np.ndarray
    label: str = ""
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.ndim != 1:
            raise ValueError("time series must be one-dimensional")
        object.__setattr__(self, "values", v)

    @property
    def n_cycles(self) -> int:
        return self.values.size

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.values)


@dataclass(frozen=True)
class Spectrum:
    """Non-negative Fourier amplitudes nu(omega) over one period of frequency."""

    omega: np.ndarray
    nu: np.ndarray
    meta: dict = field(default_factory=dict)


def fourier_spectrum(series: TimeSeries, pad_factor: int = 1, hann: bool = False) -> Spectrum:
    """Discrete Fourier amplitude nu(omega) = |sum_t x_t e^{-i omega t}| / T.

    Real input is reported on [0, 2 pi); complex input on [-pi, pi). With an
    on-grid tone of unit amplitude the peak value is 1 for any pad factor.
    """
    x = series.values
    T = x.size
    if T == 0:
        raise ValueError("empty time series")
    if T < 8:
        raise ValueError(f"need at least 8 cycles, got {T}")
    if pad_factor < 1:
        raise ValueError("pad_factor must be >= 1")
    if hann:
        x = x * np.hanning(T)
    n = T * pad_factor
    X = np.fft.fft(x, n=n)
    nu = np.abs(X) / T
    omega = 2 * np.pi * np.arange(n) / n
    if series.is_complex:
        omega = np.where(omega >= np.pi, omega - 2 * np.pi, omega)
        order = np.argsort(omega)
        omega, nu = omega[order], nu[order]
    meta = dict(series.meta)
    meta.update({"pad_factor": pad_factor, "hann": hann, "n_cycles": T, "label": series.label})
    return Spectrum(omega=omega, nu=nu, meta=meta)


def averaged_series(members: list[TimeSeries] | np.ndarray, label: str = "", meta: dict | None = None) -> TimeSeries:
    """Arithmetic mean of ensemble members (FFT is taken after averaging)."""
    if isinstance(members, np.ndarray):
        stack = members
    else:
        stack = np.stack([m.values for m in members])
    return TimeSeries(values=stack.mean(axis=0), label=label, meta=meta or {})


def peak_amplitude(spectrum: Spectrum, window: tuple[float, float] | None = None) -> tuple[float, float]:
    """(omega*, nu_max) of the largest amplitude in the window.

    Sub-bin omega* from a three-point parabola through the winning bin and
    its grid neighbours.
    """
    omega, nu = spectrum.omega, spectrum.nu
    if window is None:
        mask = np.ones(omega.size, dtype=bool)
    else:
        lo, hi = window
        if lo > hi:
            raise ValueError("window must be an increasing interval")
        mask = (omega >= lo) & (omega <= hi)
        if not np.any(mask):
            raise ValueError(f"window {window} does not overlap the frequency grid")
    sel = np.flatnonzero(mask)
    k = sel[np.argmax(nu[sel])]
    n = omega.size
    km, kp = (k - 1) % n, (k + 1) % n
    a, b, c = nu[km], nu[k], nu[kp]
    denom = a - 2 * b + c
    if denom == 0 or b < a or b < c:
        return float(omega[k]), float(b)
    delta = 0.5 * (a - c) / denom
    step = 2 * np.pi / n
    omega_star = omega[k] + delta * step
    nu_star = b - 0.25 * (a - c) * delta
    return float(omega_star), float(nu_star)


# ---------------------------------------------------------------------------
# Envelope fits
# ---------------------------------------------------------------------------

ENVELOPE_MODELS = ("exponential", "exp_gauss", "damped_cos")


@dataclass(frozen=True)
class EnvelopeFit:
    model: str
    params: dict
    residual: float
    success: bool
    message: str
    t_points: np.ndarray
    y_points: np.ndarray
    residual_history: tuple[float, ...] = ()


def envelope_points(series: TimeSeries, transient: int = 10, stencil: int = 2) -> tuple[np.ndarray, np.ndarray]:
    """Envelope samples: the maximum of |x(t)| in consecutive stencil-cycle bins.

    Rectifying removes the subharmonic sign flip without assuming an exact
    period-2 phase; binning keeps one sample per oscillation so monotone
    decays and beating signals are both handled.
    """
    y = np.abs(series.values)
    T = y.size
    keep = []
    for start in range(transient, T, stencil):
        stop = min(start + stencil, T)
        k = start + int(np.argmax(y[start:stop]))
        keep.append(k)
    t_pts = np.array(keep, dtype=float)
    return t_pts, y[keep]


def _model_fn(model: str) -> Callable[[np.ndarray, np.ndarray], np.ndarray]:
    if model == "exponential":
        return lambda p, t: p[0] * np.exp(-t / p[1])
    if model == "exp_gauss":
        return lambda p, t: p[0] * np.exp(-t / p[1] - (t / p[2]) ** 2)
    if model == "damped_cos":
        return lambda p, t: np.abs(p[0] * np.exp(-t / p[1]) * np.cos(p[2] * t + p[3]))
    raise ValueError(f"unknown envelope model {model!r}; choose from {ENVELOPE_MODELS}")


def _initial_guess(model: str, t: np.ndarray, y: np.ndarray) -> np.ndarray:
    pos = y > 0
    if pos.sum() >= 2:
        slope, intercept = np.polyfit(t[pos], np.log(y[pos]), 1)
    else:
        slope, intercept = -1e-3, np.log(max(y.max(), 1e-12))
    T0 = -1.0 / slope if slope < 0 else 10.0 * (t[-1] - t[0] + 1)
    A0 = float(np.exp(intercept))
    if model == "exponential":
        return np.array([A0, T0])
    if model == "exp_gauss":
        return np.array([A0, 2 * T0, 2 * (t[-1] - t[0] + 1)])
    # damped cosine: |cos(w t)| oscillates at 2w, so halve the spectral peak
    resid = y / np.maximum(A0 * np.exp(-t / T0), 1e-300)
    spec = np.abs(np.fft.rfft(resid - resid.mean(), n=8 * resid.size))
    k = int(np.argmax(spec[1:])) + 1
    omega_rect = 2 * np.pi * k / (8 * resid.size) / max(np.mean(np.diff(t)), 1.0)
    return np.array([A0, T0, max(omega_rect / 2, 1e-4), 0.1])


def fit_envelope(series: TimeSeries, model: str = "exponential", transient: int = 10,
                 stencil: int | None = None) -> EnvelopeFit:
    """Nonlinear least squares on the rectified peak sequence of the series.

    Initialization: amplitude from the first extremum, time constants from a
    log-linear regression of the extrema; trust-region least squares with
    positivity bounds on all time constants. The damped-cosine model keeps
    every rectified sample (its node structure is part of the model); the
    monotone envelopes keep one sample per 2-cycle bin.
    """
    if stencil is None:
        stencil = 1 if model == "damped_cos" else 2
    t_pts, y_pts = envelope_points(series, transient=transient, stencil=stencil)
    n_extrema = t_pts.size
    if n_extrema < 10:
        raise ValueError(f"fit window has {n_extrema} extrema; need at least 10")
    fn = _model_fn(model)
    p0 = _initial_guess(model, t_pts, y_pts)
    history: list[float] = []

    def resid(p):
        r = fn(p, t_pts) - y_pts
        history.append(float(np.sqrt(np.sum(r * r))))
        return r

    lower = np.zeros_like(p0)
    lower[1] = 1e-9  # time constants strictly positive
    if model == "exp_gauss":
        lower[2] = 1e-9
    upper = np.full_like(p0, np.inf)
    if model == "damped_cos":
        lower[3], upper[3] = -np.pi, np.pi
        upper[2] = np.pi
    sol = least_squares(resid, np.maximum(p0, lower), bounds=(lower, upper), method="trf")
    names = {
        "exponential": ("A0", "T_M"),
        "exp_gauss": ("A0", "T_a", "T_b"),
        "damped_cos": ("A0", "T_M", "omega_d", "phase"),
    }[model]
    params = dict(zip(names, (float(v) for v in sol.x)))
    cycle_ns = series.meta.get("cycle_ns")
    if cycle_ns:
        for key in ("T_M", "T_a", "T_b"):
            if key in params:
                params[key + "_us"] = params[key] * cycle_ns / 1000.0
    residual = float(np.sqrt(2 * sol.cost))
    return EnvelopeFit(
        model=model,
        params=params,
        residual=residual,
        success=bool(sol.success),
        message=str(sol.message),
        t_points=t_pts,
        y_points=y_pts,
        residual_history=tuple(history),
    )


def decay_rate(series: TimeSeries, transient: int = 10, stencil: int = 2) -> float:
    """1 / T_M from an exponential envelope fit."""
    fit = fit_envelope(series, "exponential", transient=transient, stencil=stencil)
    return 1.0 / fit.params["T_M"]
