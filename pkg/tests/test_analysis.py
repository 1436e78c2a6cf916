import numpy as np
import pytest

from ratos.analysis import linear_fit, metrics, ratos_energy_fit
from ratos.errors import DomainError
from ratos.model import TimeGrid, gaussian_pulse


def _gauss(t, center, fwhm, peak=1.0):
    return peak * np.exp(-2 * np.log(2) * ((t - center) / fwhm) ** 2)


class TestMetrics:
    def test_gaussian_fwhm(self):
        grid = TimeGrid(0.0, 4e-6, 4096)
        pulse = gaussian_pulse(2e-6, 400e-9, 1.0, grid)
        m = metrics(pulse.amp, grid)
        assert abs(m.fwhm - 400e-9) <= grid.dt
        assert m.arrival_time == pytest.approx(2e-6, abs=grid.dt)

    def test_amplitude_scaling_equivariance(self):
        grid = TimeGrid(0.0, 4e-6, 2048)
        pulse = gaussian_pulse(2e-6, 400e-9, 1.0, grid)
        m1 = metrics(pulse.amp, grid)
        m2 = metrics(2.0 * pulse.amp, grid)
        assert m2.peak_power == pytest.approx(4 * m1.peak_power, rel=1e-12)
        assert m2.energy == pytest.approx(4 * m1.energy, rel=1e-12)
        assert m2.fwhm == m1.fwhm
        assert m2.arrival_time == m1.arrival_time

    def test_time_translation_invariance(self):
        grid = TimeGrid(0.0, 8e-6, 4096)
        a = gaussian_pulse(2e-6, 400e-9, 1.0, grid).amp
        b = gaussian_pulse(5e-6, 400e-9, 1.0, grid).amp
        ma, mb = metrics(a, grid), metrics(b, grid)
        assert mb.fwhm == pytest.approx(ma.fwhm, abs=grid.dt / 10)
        assert mb.energy == pytest.approx(ma.energy, rel=1e-6)
        assert mb.arrival_time - ma.arrival_time == pytest.approx(3e-6, abs=grid.dt)

    def test_double_hump_outermost_crossings(self):
        # oracle: dense scan of the same two-Gaussian profile at 100x
        # resolution, independent of the interpolation code path
        grid = TimeGrid(0.0, 10e-6, 4096)
        t = grid.times

        def profile(tt):
            return _gauss(tt, 3e-6, 600e-9, 1.0) + _gauss(tt, 5e-6, 600e-9, 0.8)

        samples = profile(t).astype(complex)
        m = metrics(samples, grid)
        fine = np.linspace(t[0], t[-1], len(t) * 100)
        power = np.abs(profile(fine)) ** 2
        above = np.nonzero(power >= power.max() / 2)[0]
        expected = fine[above[-1]] - fine[above[0]]
        assert m.fwhm == pytest.approx(expected, abs=grid.dt)

    def test_unimodal_energy_bound(self):
        grid = TimeGrid(0.0, 4e-6, 2048)
        pulse = gaussian_pulse(2e-6, 400e-9, 1.0, grid)
        m = metrics(pulse.amp, grid)
        assert m.energy >= m.peak_power * m.fwhm / 2

    def test_all_zero_rejected(self):
        grid = TimeGrid(0.0, 1e-6, 64)
        with pytest.raises(DomainError):
            metrics(np.zeros(64, dtype=complex), grid)


class TestLinearFit:
    def test_exact_line_through_origin(self):
        x = np.array([1.0, 2.0, 3.0, 4.0])
        fit = linear_fit(x, 2.0 * x, through_origin=True)
        assert fit.params[0] == pytest.approx(2.0, rel=1e-14)
        assert fit.params[1] == 0.0
        assert fit.r2 == pytest.approx(1.0, abs=1e-14)

    def test_exact_affine(self):
        x = np.array([0.0, 1.0, 2.0, 5.0])
        fit = linear_fit(x, 3.0 * x + 1.5)
        assert fit.params[0] == pytest.approx(3.0, rel=1e-12)
        assert fit.params[1] == pytest.approx(1.5, rel=1e-12)

    def test_noise_free_residuals_at_floor(self):
        x = np.linspace(1.0, 10.0, 20)
        fit = linear_fit(x, -4.0 * x + 2.0)
        assert np.max(np.abs(fit.residuals)) < 1e-12 * np.max(np.abs(x))

    def test_standard_errors_positive_with_noise(self):
        rng = np.random.default_rng(7)
        x = np.linspace(0.0, 1.0, 50)
        y = 2.0 * x + 0.1 * rng.standard_normal(50)
        fit = linear_fit(x, y)
        assert fit.stderr[0] > 0 and fit.stderr[1] > 0
        assert 0.8 < fit.r2 <= 1.0

    def test_degenerate_rejected(self):
        with pytest.raises(DomainError):
            linear_fit(np.ones(5), np.arange(5.0))
        with pytest.raises(DomainError):
            linear_fit(np.zeros(3), np.arange(3.0), through_origin=True)


class TestRatosEnergyFit:
    def test_recovers_noise_free_params(self):
        # a = 0.7 echoes the reported conversion efficiency scale
        p_pump = 4.0
        x = np.array([0.5, 1.0, 2.0, 4.0, 8.0, 16.0])
        y = 0.7 * p_pump / (1.0 * p_pump + x)
        fit = ratos_energy_fit(p_pump, x, y)
        assert fit.params[0] == pytest.approx(0.7, abs=1e-6)
        assert fit.params[1] == pytest.approx(1.0, abs=1e-6)
        assert fit.r2 == pytest.approx(1.0, abs=1e-9)

    def test_refit_own_predictions_is_fixed_point(self):
        p_pump = 4.0
        x = np.array([0.5, 1.0, 2.0, 4.0, 8.0])
        fit1 = ratos_energy_fit(p_pump, x, 0.83 * p_pump / (1.37 * p_pump + x))
        a, c = fit1.params
        fit2 = ratos_energy_fit(p_pump, x, a * p_pump / (c * p_pump + x))
        assert fit2.params[0] == pytest.approx(a, rel=1e-9)
        assert fit2.params[1] == pytest.approx(c, rel=1e-9)

    def test_noisy_fit_converges(self):
        rng = np.random.default_rng(3)
        p_pump = 4.0
        x = np.linspace(0.5, 12.0, 12)
        y = 0.6 * p_pump / (0.9 * p_pump + x) * (1 + 0.01 * rng.standard_normal(12))
        fit = ratos_energy_fit(p_pump, x, y)
        assert fit.params[0] == pytest.approx(0.6, rel=0.05)
        assert fit.params[1] == pytest.approx(0.9, rel=0.10)
        assert all(s > 0 for s in fit.stderr)

    def test_input_validation(self):
        with pytest.raises(DomainError):
            ratos_energy_fit(0.0, [1.0, 2.0, 3.0], [1.0, 0.5, 0.3])
        with pytest.raises(DomainError):
            ratos_energy_fit(4.0, [1.0, 2.0], [1.0, 0.5])
