"""Fitting latent distributions from microdata at three information levels.

Full samples support a parametric beta fit by the method of moments or a
kernel density estimate; summary statistics alone support the empirical
mode rule (three medians minus two means) with an exact binomial symmetry
test; and an explicit family assumption always remains available upstream.
Every fit is deterministic: no randomness enters any routine here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DataValidationError, DomainError, NumericFailure
from .latent import Kde, ShiftedBeta, Triangular, cross_moment
from .mallows import MomentSummary

__all__ = [
    "ScaledSample",
    "ModeEstimates",
    "VariableMicrodata",
    "scale_to_latent",
    "fit_beta_mom",
    "fit_kde",
    "estimate_modes_pearson",
    "test_mode_symmetry",
    "fit_triangular_pearson",
    "empirical_moment_summary",
]


@dataclass(frozen=True)
class ScaledSample:
    """Microdata of one variable mapped onto [-1, 1], with row provenance."""

    variable: str
    values: np.ndarray
    rows: tuple | None = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.size and (np.any(values < -1.0 - 1e-9)
                            or np.any(values > 1.0 + 1e-9)
                            or np.any(~np.isfinite(values))):
            raise DataValidationError(
                f"scaled values for {self.variable!r} must lie in [-1, 1]")
        object.__setattr__(self, "values", np.clip(values, -1.0, 1.0))
        if self.rows is not None and len(self.rows) != values.size:
            raise DomainError("provenance length must match the number of values")


def scale_to_latent(values, interval):
    """Map raw microdata v inside ``interval`` to u = 2 (v - c) / r.

    Values may poke out of the interval by at most 1e-9 * max(1, range)
    (they are clamped back); anything further out is reported as a
    violation. A zero-range interval cannot be scaled.
    """
    values = np.asarray(values, dtype=float)
    r = interval.range
    if r == 0.0:
        raise DomainError("cannot scale values inside a zero-range interval")
    tol = 1e-9 * max(1.0, r)
    bad = np.flatnonzero((values < interval.lower - tol) | (values > interval.upper + tol))
    if bad.size:
        shown = ", ".join(f"[{k}]={values[k]!r}" for k in bad[:5])
        raise DataValidationError(
            f"{bad.size} value(s) outside [{interval.lower}, {interval.upper}]: {shown}")
    u = 2.0 * (values - interval.centre) / r
    return np.clip(u, -1.0, 1.0)


def fit_beta_mom(u_samples):
    """Method-of-moments beta fit to scaled values.

    With w = (u + 1)/2, matches the sample mean and (divisor n) variance of
    w; requires the variance to sit strictly below m(1 - m), otherwise no
    beta has these moments.
    """
    u = np.asarray(u_samples, dtype=float).ravel()
    if u.size < 2:
        raise DataValidationError("beta fit needs at least two values")
    if np.any(~np.isfinite(u)) or np.any(u < -1.0) or np.any(u > 1.0):
        raise DomainError("scaled values must lie in [-1, 1]")
    if np.ptp(u) == 0.0:
        raise NumericFailure("constant sample: beta fit undefined")
    w = 0.5 * (u + 1.0)
    mbar = float(w.mean())
    s2 = float(np.mean(w * w) - mbar * mbar)
    bound = mbar * (1.0 - mbar)
    if s2 <= 0.0:
        raise NumericFailure("constant sample: beta fit undefined")
    if s2 >= bound:
        raise NumericFailure(
            f"moment condition violated: variance {s2:.6g} >= m(1-m) = {bound:.6g}")
    common = bound / s2 - 1.0
    return ShiftedBeta(alpha=mbar * common, beta=(1.0 - mbar) * common)


def fit_kde(u_samples, bandwidth=None):
    """Reflection-corrected Gaussian kernel density fit to scaled values."""
    u = np.asarray(u_samples, dtype=float).ravel()
    if u.size < 10:
        raise DataValidationError(
            f"kde fit needs at least 10 values, got {u.size}")
    return Kde(u, bandwidth=bandwidth)


@dataclass(frozen=True)
class ModeEstimates:
    """Per-row empirical modes of one variable plus their average."""

    modes: np.ndarray
    m_hat: float
    symmetric: bool | None = None


def estimate_modes_pearson(means, medians):
    """Rowwise empirical rule of thumb, mode = 3 * median - 2 * mean."""
    means = np.asarray(means, dtype=float).ravel()
    medians = np.asarray(medians, dtype=float).ravel()
    if means.size != medians.size:
        raise DomainError("means and medians must have equal length")
    if means.size == 0:
        raise DomainError("empty input")
    modes = 3.0 * medians - 2.0 * means
    return ModeEstimates(modes=modes, m_hat=float(modes.mean()))


def _binom_two_sided_p(k, n):
    # exact doubled-tail p-value for k successes out of n at proportion 1/2
    denom = 1 << n
    lower = sum(math.comb(n, i) for i in range(0, k + 1))
    upper = sum(math.comb(n, i) for i in range(k, n + 1))
    p = Fraction(2 * min(lower, upper), denom)
    return float(min(p, Fraction(1)))


def test_mode_symmetry(modes, alpha=0.05, n_tests=1):
    """Exact binomial test that the proportion of positive modes is 1/2.

    Modes equal to exactly zero carry no sign information and are excluded.
    Returns (reject, p_value) with the cutoff Bonferroni-corrected by
    ``n_tests``; non-rejection is the caller's licence to set the mode to 0.
    """
    modes = np.asarray(modes, dtype=float).ravel()
    if modes.size == 0:
        raise DomainError("empty mode list")
    if not (0.0 < alpha < 1.0):
        raise DomainError("alpha must lie in (0, 1)")
    if n_tests < 1:
        raise DomainError("n_tests must be at least 1")
    signs = modes[modes != 0.0]
    if signs.size == 0:
        return False, 1.0
    k = int(np.sum(signs > 0.0))
    p = _binom_two_sided_p(k, signs.size)
    return p < alpha / n_tests, p


test_mode_symmetry.__test__ = False      # not a pytest test despite the name


def fit_triangular_pearson(means, medians, intervals, alpha=0.05, n_tests=1):
    """Partial-information fit: a triangular latent from summary statistics.

    Raw modes come from the rowwise rule of thumb, each is scaled into
    [-1, 1] through its own row's interval, and the per-variable mode is the
    average of the scaled modes. When the symmetry test does not reject, the
    mode is pinned to zero.
    """
    raw = estimate_modes_pearson(means, medians).modes
    if len(intervals) != raw.size:
        raise DomainError("one interval is required per summary row")
    scaled = np.array([
        float(np.clip(2.0 * (mo - iv.centre) / iv.range, -1.0, 1.0))
        if iv.range > 0.0 else 0.0
        for mo, iv in zip(raw, intervals)
    ])
    reject, _ = test_mode_symmetry(scaled, alpha=alpha, n_tests=n_tests)
    m_hat = float(scaled.mean())
    estimates = ModeEstimates(modes=scaled, m_hat=m_hat, symmetric=not reject)
    mode = m_hat if reject else 0.0
    return Triangular(mode=float(np.clip(mode, -1.0, 1.0))), estimates


@dataclass(frozen=True)
class VariableMicrodata:
    """Per-variable microdata information for the moment summary.

    Either a fitted latent, a scaled sample, or both. When both exist the
    raw sample wins for the mean and the second moment while the fitted
    quantile function drives the cross moments; a sample without a fit gets
    a kernel density estimate for its quantile function.
    """

    name: str
    latent: object | None = None
    sample: np.ndarray | None = None

    def __post_init__(self):
        if self.latent is None and self.sample is None:
            raise DomainError(f"variable {self.name!r} has neither a latent nor a sample")
        if self.sample is not None:
            object.__setattr__(self, "sample", np.asarray(self.sample, dtype=float).ravel())


def empirical_moment_summary(variables):
    """Latent moment summary from per-variable fits and/or scaled samples."""
    variables = list(variables)
    if not variables:
        raise DomainError("no variables given")
    latents = []
    psi = np.empty(len(variables))
    m2 = np.empty(len(variables))
    for i, var in enumerate(variables):
        lat = var.latent if var.latent is not None else fit_kde(var.sample)
        latents.append(lat)
        if var.sample is not None:
            psi[i] = float(var.sample.mean())
            m2[i] = float(np.mean(var.sample ** 2))
        else:
            psi[i] = lat.mean
            m2[i] = lat.second_moment
    p = len(variables)
    euu = np.empty((p, p))
    for i in range(p):
        euu[i, i] = m2[i]
        for j in range(i + 1, p):
            euu[i, j] = euu[j, i] = cross_moment(latents[i], latents[j])
    return MomentSummary(psi=psi, delta=m2 / 4.0, euu=euu)
