import numpy as np
import pytest

from edgemodes.spectroscopy import (
    EnvelopeFit,
    Spectrum,
    TimeSeries,
    averaged_series,
    decay_rate,
    envelope_points,
    fit_envelope,
    fourier_spectrum,
    peak_amplitude,
)


def test_constant_series_peaks_at_zero():
    s = fourier_spectrum(TimeSeries(np.ones(64)))
    omega, nu = peak_amplitude(s)
    assert omega == pytest.approx(0.0, abs=1e-12)
    assert nu == pytest.approx(1.0, abs=1e-12)


def test_alternating_series_peaks_at_pi():
    s = fourier_spectrum(TimeSeries((-1.0) ** np.arange(100)))
    omega, nu = peak_amplitude(s)
    assert omega == pytest.approx(np.pi, abs=1e-12)
    assert nu == pytest.approx(1.0, abs=1e-12)


def test_empty_and_short_series_rejected():
    with pytest.raises(ValueError):
        fourier_spectrum(TimeSeries(np.array([])))
    with pytest.raises(ValueError):
        fourier_spectrum(TimeSeries(np.ones(5)))


def test_parseval_consistency(rng):
    x = rng.normal(size=128)
    s = fourier_spectrum(TimeSeries(x))
    assert np.sum(s.nu**2) == pytest.approx(np.sum(x**2) / x.size, rel=1e-9)
    z = rng.normal(size=128) + 1j * rng.normal(size=128)
    sz = fourier_spectrum(TimeSeries(z))
    assert np.sum(sz.nu**2) == pytest.approx(np.sum(np.abs(z) ** 2) / z.size, rel=1e-9)


def test_linearity_of_amplitudes(rng):
    x = rng.normal(size=64)
    a = 3.7
    nu1 = fourier_spectrum(TimeSeries(x)).nu
    nu2 = fourier_spectrum(TimeSeries(a * x)).nu
    np.testing.assert_allclose(nu2, abs(a) * nu1, atol=1e-12)


def test_shift_modulation_duality(rng):
    x = rng.normal(size=128)
    t = np.arange(128)
    base = fourier_spectrum(TimeSeries(x))
    mod = fourier_spectrum(TimeSeries(x * (-1.0) ** t))
    shifted = np.roll(base.nu, 64)  # pi shift is half the grid
    np.testing.assert_allclose(mod.nu, shifted, atol=1e-10)


def test_complex_grid_covers_negative_frequencies():
    t = np.arange(64)
    z = np.exp(-1j * 0.5 * t)
    s = fourier_spectrum(TimeSeries(z))
    omega, nu = peak_amplitude(s)
    assert omega == pytest.approx(-0.5, abs=0.05)
    assert s.omega.min() < 0 <= s.omega.max()


def test_on_grid_tone_is_exact():
    T = 64
    k0 = 7
    omega0 = 2 * np.pi * k0 / T
    z = np.exp(1j * omega0 * np.arange(T))
    omega, nu = peak_amplitude(fourier_spectrum(TimeSeries(z)))
    assert omega == pytest.approx(omega0, abs=1e-12)
    assert nu == pytest.approx(1.0, abs=1e-12)


def test_off_grid_tone_interpolates_within_fifth_of_bin():
    T = 128
    bins = 2 * np.pi / T
    rng = np.random.default_rng(8)
    for _ in range(12):
        omega0 = rng.uniform(0.3, np.pi - 0.3)
        x = np.exp(1j * omega0 * np.arange(T))
        omega, _ = peak_amplitude(fourier_spectrum(TimeSeries(x), pad_factor=4))
        assert abs(omega - omega0) < 0.2 * bins


def test_peak_window_restriction_and_errors():
    t = np.arange(200)
    x = np.cos(0.4 * t) + 0.2 * np.cos(2.2 * t)
    s = fourier_spectrum(TimeSeries(x))
    omega, _ = peak_amplitude(s, window=(2.0, 2.5))
    assert omega == pytest.approx(2.2, abs=0.03)
    with pytest.raises(ValueError):
        peak_amplitude(s, window=(7.0, 8.0))
    with pytest.raises(ValueError):
        peak_amplitude(s, window=(2.5, 2.0))


def test_pad_factor_recorded():
    s = fourier_spectrum(TimeSeries(np.ones(16)), pad_factor=4)
    assert s.meta["pad_factor"] == 4
    assert s.omega.size == 64


def test_averaged_series_is_fft_after_average(rng):
    members = [TimeSeries(rng.normal(size=64)) for _ in range(5)]
    mean_series = averaged_series(members)
    direct = np.mean([m.values for m in members], axis=0)
    np.testing.assert_allclose(mean_series.values, direct, atol=1e-15)
    # amplitude of the averaged series equals |mean of complex spectra|
    ffts = np.mean([np.fft.fft(m.values) for m in members], axis=0)
    np.testing.assert_allclose(fourier_spectrum(mean_series).nu, np.abs(ffts) / 64, atol=1e-12)


# ---------------------------------------------------------------------------
# Envelope fits
# ---------------------------------------------------------------------------

def test_envelope_points_track_subharmonic_peaks():
    t = np.arange(100)
    x = (-1.0) ** t * np.exp(-t / 40)
    tp, yp = envelope_points(TimeSeries(x), transient=10)
    assert tp.size >= 40
    np.testing.assert_allclose(yp, np.exp(-tp / 40), rtol=1e-12)


def test_exponential_fit_within_one_percent():
    t = np.arange(300)
    fit = fit_envelope(TimeSeries(0.9 * (-1.0) ** t * np.exp(-t / 50)), "exponential")
    assert fit.success
    assert fit.params["T_M"] == pytest.approx(50.0, rel=0.01)
    assert fit.params["A0"] == pytest.approx(0.9, rel=0.01)


def test_exp_gauss_fit_recovers_device_scales():
    t = np.arange(400)
    x = 0.8 * (-1.0) ** t * np.exp(-t / 346 - (t / 96) ** 2)
    fit = fit_envelope(TimeSeries(x), "exp_gauss")
    assert fit.params["T_a"] == pytest.approx(346, rel=0.05)
    assert fit.params["T_b"] == pytest.approx(96, rel=0.05)


def test_damped_cos_fit():
    t = np.arange(400)
    x = (-1.0) ** t * np.real(0.9 * np.exp(-t / 150 - 1j * 0.07 * t))
    fit = fit_envelope(TimeSeries(x), "damped_cos")
    assert fit.params["T_M"] == pytest.approx(150, rel=0.1)
    assert fit.params["omega_d"] == pytest.approx(0.07, rel=0.05)


def test_fit_reports_microseconds_with_cycle_metadata():
    t = np.arange(200)
    fit = fit_envelope(TimeSeries((-1.0) ** t * np.exp(-t / 60), meta={"cycle_ns": 93.0}), "exponential")
    assert fit.params["T_M_us"] == pytest.approx(60 * 93.0 / 1000.0, rel=0.01)


def test_fit_requires_enough_extrema():
    t = np.arange(24)
    with pytest.raises(ValueError, match="extrema"):
        fit_envelope(TimeSeries((-1.0) ** t * np.exp(-t / 5)), "exponential", transient=10)


def test_unknown_model_rejected():
    with pytest.raises(ValueError, match="model"):
        fit_envelope(TimeSeries(np.exp(-np.arange(100) / 30.0)), "gaussian")


def test_residual_history_recorded():
    t = np.arange(150)
    fit = fit_envelope(TimeSeries((-1.0) ** t * np.exp(-t / 30)), "exponential")
    assert len(fit.residual_history) >= 1
    # the optimum was among the recorded evaluations
    assert fit.residual == pytest.approx(min(fit.residual_history), abs=1e-9)


def test_decay_rate_helper():
    t = np.arange(240)
    assert decay_rate(TimeSeries((-1.0) ** t * np.exp(-t / 80))) == pytest.approx(1 / 80, rel=0.01)
