"""Waveform metrics and least-squares fits.

The FWHM convention is the *outermost* pair of half-maximum crossings with
linear interpolation between samples.  Retrieved pulses can grow shoulders
at low retrieve power, and the outermost convention keeps the width metric
single-valued there.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, FitError
from .model import TimeGrid

__all__ = ["PulseMetrics", "FitResult", "metrics", "linear_fit", "ratos_energy_fit"]


@dataclass(frozen=True)
class PulseMetrics:
    """Scalar summaries of one output channel."""

    peak_power: float  # max |e|^2, Rabi^2 units
    fwhm: float  # s
    energy: float  # Rabi^2 * s
    arrival_time: float  # s, time of the peak sample


@dataclass(frozen=True)
class FitResult:
    """Fitted coefficients with per-parameter standard errors."""

    params: tuple
    stderr: tuple
    r2: float
    residuals: np.ndarray
    n_iter: int = 0

    def __post_init__(self):
        res = np.asarray(self.residuals, dtype=float)
        res.setflags(write=False)
        object.__setattr__(self, "residuals", res)
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        object.__setattr__(self, "stderr", tuple(float(s) for s in self.stderr))


def metrics(samples: np.ndarray, grid: TimeGrid) -> PulseMetrics:
    """Compute peak power, FWHM, energy and arrival time of one channel.

    ``samples`` are complex envelope samples on ``grid``.  Raises
    :class:`DomainError` for an all-zero channel.
    """
    power = np.abs(np.asarray(samples)) ** 2
    if not np.any(power > 0):
        raise DomainError("cannot compute metrics of an all-zero channel")
    t = grid.times
    ipeak = int(np.argmax(power))
    peak = float(power[ipeak])
    energy = float(np.trapezoid(power, dx=grid.dt))

    # outermost half-maximum crossings, linearly interpolated
    half = peak / 2.0
    above = power >= half
    idx = np.nonzero(above)[0]
    i_lo, i_hi = int(idx[0]), int(idx[-1])
    if i_lo == 0:
        t_lo = t[0]
    else:
        p0, p1 = power[i_lo - 1], power[i_lo]
        t_lo = t[i_lo - 1] + (half - p0) / (p1 - p0) * grid.dt
    if i_hi == len(t) - 1:
        t_hi = t[-1]
    else:
        p0, p1 = power[i_hi], power[i_hi + 1]
        t_hi = t[i_hi] + (p0 - half) / (p0 - p1) * grid.dt
    fwhm = float(t_hi - t_lo)

    return PulseMetrics(peak_power=peak, fwhm=fwhm, energy=energy, arrival_time=float(t[ipeak]))


def linear_fit(xs, ys, through_origin: bool = False) -> FitResult:
    """Ordinary least squares y = slope*x (+ intercept).

    Returns params ``(slope, intercept)`` (intercept fixed to 0 when
    ``through_origin``).  ``r2`` uses the centered total sum of squares for
    the intercept model and the uncentered one through the origin.
    """
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise DomainError("xs and ys must be 1-D arrays of equal length")
    n = len(x)
    n_min = 1 if through_origin else 2
    if n < n_min:
        raise DomainError(f"need at least {n_min} points")

    if through_origin:
        sxx = float(np.dot(x, x))
        if sxx == 0.0:
            raise DomainError("degenerate xs: all zero")
        slope = float(np.dot(x, y)) / sxx
        intercept = 0.0
        resid = y - slope * x
        dof = n - 1
        ss_tot = float(np.dot(y, y))
        se_slope = _safe_se(resid, dof, 1.0 / sxx)
        se_int = 0.0
    else:
        if np.ptp(x) == 0.0:
            raise DomainError("degenerate xs: no spread")
        xm, ym = x.mean(), y.mean()
        sxx = float(np.dot(x - xm, x - xm))
        slope = float(np.dot(x - xm, y - ym)) / sxx
        intercept = ym - slope * xm
        resid = y - (slope * x + intercept)
        dof = n - 2
        ss_tot = float(np.dot(y - ym, y - ym))
        se_slope = _safe_se(resid, dof, 1.0 / sxx)
        se_int = _safe_se(resid, dof, 1.0 / n + xm**2 / sxx)

    ss_res = float(np.dot(resid, resid))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return FitResult(params=(slope, intercept), stderr=(se_slope, se_int), r2=r2, residuals=resid)


def _safe_se(resid, dof, unit_var):
    if dof <= 0:
        return float("nan")
    s2 = float(np.dot(resid, resid)) / dof
    return float(np.sqrt(s2 * unit_var))


def ratos_energy_fit(p_pump: float, p_rets, energies_normalized) -> FitResult:
    """Fit a*P_pump/(c*P_pump + P_ret) to a normalized energy series.

    Gauss-Newton iteration with Levenberg damping, analytic Jacobian,
    initial guess (a, c) = (1, 1).  Converges when the relative step drops
    below 1e-10, capped at 200 iterations; raises :class:`FitError` with the
    iteration trace otherwise.
    """
    x = np.asarray(p_rets, dtype=float)
    y = np.asarray(energies_normalized, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise DomainError("p_rets and energies must be 1-D arrays of equal length")
    if len(x) < 3:
        raise DomainError("need at least 3 points")
    if p_pump <= 0:
        raise DomainError("p_pump must be > 0")
    if np.any(x < 0):
        raise DomainError("retrieve powers must be >= 0")

    def model(a, c):
        return a * p_pump / (c * p_pump + x)

    a, c = 1.0, 1.0
    lam = 1e-3
    trace = []
    converged = False
    n_iter = 0
    for n_iter in range(1, 201):
        denom = c * p_pump + x
        r = y - a * p_pump / denom
        cost = float(np.dot(r, r))
        trace.append(((a, c), cost))
        # J[i] = d r_i / d(a, c)
        j_a = -p_pump / denom
        j_c = a * p_pump**2 / denom**2
        jtj = np.array(
            [
                [np.dot(j_a, j_a), np.dot(j_a, j_c)],
                [np.dot(j_a, j_c), np.dot(j_c, j_c)],
            ]
        )
        jtr = np.array([np.dot(j_a, r), np.dot(j_c, r)])
        step = None
        for _ in range(50):
            try:
                delta = np.linalg.solve(jtj + lam * np.diag(np.diag(jtj)), -jtr)
            except np.linalg.LinAlgError:
                lam *= 10
                continue
            a_new, c_new = a + delta[0], c + delta[1]
            if c_new * p_pump + np.min(x) <= 0:
                lam *= 10
                continue
            r_new = y - a_new * p_pump / (c_new * p_pump + x)
            if np.dot(r_new, r_new) <= cost:
                step = delta
                lam = max(lam / 10, 1e-12)
                break
            lam *= 10
        if step is None:
            break
        rel = float(np.linalg.norm(step) / max(np.linalg.norm([a, c]), 1e-300))
        a, c = a + step[0], c + step[1]
        if rel < 1e-10:
            converged = True
            break
    if not converged:
        raise FitError("ratos energy fit did not converge in 200 iterations", trace=trace)

    denom = c * p_pump + x
    resid = y - a * p_pump / denom
    ss_res = float(np.dot(resid, resid))
    ym = y.mean()
    ss_tot = float(np.dot(y - ym, y - ym))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot

    # standard errors from the Gauss-Newton normal matrix at the solution
    j_a = -p_pump / denom
    j_c = a * p_pump**2 / denom**2
    jtj = np.array(
        [
            [np.dot(j_a, j_a), np.dot(j_a, j_c)],
            [np.dot(j_a, j_c), np.dot(j_c, j_c)],
        ]
    )
    dof = len(x) - 2
    if dof > 0 and np.linalg.cond(jtj) < 1e14:
        s2 = ss_res / dof
        cov = s2 * np.linalg.inv(jtj)
        stderr = (float(np.sqrt(cov[0, 0])), float(np.sqrt(cov[1, 1])))
    else:
        stderr = (float("nan"), float("nan"))
    return FitResult(params=(a, c), stderr=stderr, r2=r2, residuals=resid, n_iter=n_iter)
