"""Barycentre, Frechet variance, and the symbolic covariance matrix.

The barycentre of an interval dataset is the box of componentwise mean
centres and mean ranges; the Frechet variance is its mean squared distance
to the observations, equal to the trace of the symbolic covariance matrix.
``covariance_quantile_oracle`` integrates the defining quantile-function
products directly and is the independent check on the closed forms.

The little linear algebra needed here (Schur products, traces, a cyclic
Jacobi eigensolver, the diagonal inverse square root behind correlation
matrices) is written out explicitly: p stays small and every arithmetic step
should be auditable without reaching for a solver library.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DataValidationError, DomainError, NumericFailure
from .interval import Box, Interval
from .mallows import MomentSummary, dist_sq_box
from .quadrature import integrate

__all__ = [
    "Barycentre",
    "SymbolicCovariance",
    "sample_barycentre",
    "frechet_variance",
    "symbolic_covariance",
    "correlation_matrix",
    "correlation_from_cov",
    "covariance_quantile_oracle",
    "cov_model7",
    "frobenius_diff",
    "schur_product",
    "matrix_trace",
    "jacobi_eigenvalues",
]


# --- small dense helpers -------------------------------------------------

def schur_product(a, b):
    """Entrywise product of two equally shaped matrices."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise DomainError("shape mismatch in Schur product")
    return a * b


def matrix_trace(a):
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DomainError("trace requires a square matrix")
    return math.fsum(a[i, i] for i in range(a.shape[0]))


def jacobi_eigenvalues(a, tol=1e-14, max_sweeps=60):
    """Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.

    Returns the eigenvalues sorted ascending. Coordinates whose row and
    column are exactly zero are never rotated, so structural zero
    eigenvalues come out exactly zero.
    """
    m = np.array(a, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DomainError("eigensolve requires a square matrix")
    n = m.shape[0]
    scale = max(1.0, float(np.max(np.abs(m))))
    if float(np.max(np.abs(m - m.T))) > 1e-10 * scale:
        raise DomainError("eigensolve requires a symmetric matrix")
    if n == 1:
        return np.array([m[0, 0]])
    for _ in range(max_sweeps):
        off = math.sqrt(sum(m[i, j] ** 2 for i in range(n)
                            for j in range(n) if i != j))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = m[p, q]
                if abs(apq) <= 1e-300:
                    continue
                theta = (m[q, q] - m[p, p]) / (2.0 * apq)
                if abs(theta) > 1e10:
                    t = 1.0 / (2.0 * theta)
                else:
                    t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                app, aqq = m[p, p], m[q, q]
                m[p, p] = app - t * apq
                m[q, q] = aqq + t * apq
                m[p, q] = m[q, p] = 0.0
                for i in range(n):
                    if i == p or i == q:
                        continue
                    aip, aiq = m[i, p], m[i, q]
                    m[i, p] = m[p, i] = c * aip - s * aiq
                    m[i, q] = m[q, i] = s * aip + c * aiq
    return np.sort(np.diag(m))


# --- covariance building blocks ------------------------------------------

def _covariance_parts(frame, ddof=0):
    n = frame.n
    if n - ddof <= 0:
        raise DataValidationError("not enough rows for the requested divisor")
    c, r = frame.centres_ranges()
    cc = c - c.mean(axis=0)
    rc = r - r.mean(axis=0)
    denom = float(n - ddof)
    s_cc = cc.T @ cc / denom
    s_rr = rc.T @ rc / denom
    s_cr = cc.T @ rc / denom
    return s_cc, s_rr, s_cr


@dataclass(frozen=True)
class Barycentre:
    """Mean box of a dataset plus the attained Frechet variance.

    ``centres`` and ``ranges`` hold the exact componentwise means; the box
    view re-derives them from its bounds and may differ in the last bit.
    """

    box: Box
    centres: np.ndarray
    ranges: np.ndarray
    frechet_variance: float


@dataclass(frozen=True)
class SymbolicCovariance:
    """Covariance matrix of an interval dataset with its audit trail.

    ``sigma_b`` combines the centre covariances, the Schur product of the
    latent cross moments with the range covariances, and the centre/range
    cross covariances weighted by the latent means. The constituent parts
    and the latent moment summary are retained for auditing; ``divisor``
    records the convention used ("n" or "n-1").
    """

    sigma_b: np.ndarray
    sigma_cc: np.ndarray
    sigma_rr: np.ndarray
    sigma_cr: np.ndarray
    summary: MomentSummary
    names: tuple
    divisor: str = "n"


def sample_barycentre(frame):
    """Componentwise means of centres and ranges, with the mean squared
    distance of the observations to that box."""
    if frame.n < 1:
        raise DataValidationError("cannot take the barycentre of an empty frame")
    frame.require_latents()
    c, r = frame.centres_ranges()
    cbar = c.mean(axis=0)
    rbar = r.mean(axis=0)
    box = Box(tuple(Interval.from_centre_range(cb, rb) for cb, rb in zip(cbar, rbar)),
              frame.latents)
    vf = math.fsum(dist_sq_box(frame.row_box(i), box) for i in range(frame.n)) / frame.n
    return Barycentre(box=box, centres=cbar, ranges=rbar, frechet_variance=vf)


def frechet_variance(frame):
    """Trace form of the Frechet variance: tr(S_CC + Delta S_RR + S_CR Psi)."""
    if frame.n < 1:
        raise DataValidationError("empty frame")
    frame.require_latents()
    summary = MomentSummary.from_latents(frame.latents)
    s_cc, s_rr, s_cr = _covariance_parts(frame, ddof=0)
    return math.fsum(s_cc[i, i] + summary.delta[i] * s_rr[i, i]
                     + summary.psi[i] * s_cr[i, i]
                     for i in range(frame.p))


def symbolic_covariance(frame, ddof=0):
    """Symbolic covariance matrix of the frame.

    Uses the identical-latent shortcut (S_CC + delta S_RR plus the mean
    cross term) when every variable shares one latent; the general path
    takes the Schur product with the full cross-moment matrix. Both routes
    agree by construction. ``ddof=1`` switches to the n-1 divisor and is
    recorded in the result.
    """
    if frame.n < 2:
        raise DataValidationError("covariance needs at least two rows")
    frame.require_latents()
    summary = MomentSummary.from_latents(frame.latents)
    s_cc, s_rr, s_cr = _covariance_parts(frame, ddof=ddof)
    latents = frame.latents
    if all(lat == latents[0] for lat in latents[1:]):
        delta = latents[0].second_moment / 4.0
        e_u = latents[0].mean
        sigma = s_cc + delta * s_rr + 0.5 * e_u * (s_cr + s_cr.T)
    else:
        psi = np.diag(summary.psi)
        sigma = (s_cc
                 + 0.25 * schur_product(summary.euu, s_rr)
                 + 0.5 * (s_cr @ psi)
                 + 0.5 * (psi @ s_cr.T))
    return SymbolicCovariance(sigma_b=sigma, sigma_cc=s_cc, sigma_rr=s_rr,
                              sigma_cr=s_cr, summary=summary,
                              names=frame.names,
                              divisor="n" if ddof == 0 else "n-1")


def correlation_matrix(sigma, names=None):
    """D^{-1/2} Sigma D^{-1/2} for a covariance-like symmetric matrix."""
    sigma = np.asarray(sigma, dtype=float)
    p = sigma.shape[0]
    d = np.array([sigma[i, i] for i in range(p)])
    for i in range(p):
        if d[i] <= 0.0:
            label = names[i] if names is not None else str(i)
            raise NumericFailure(
                f"zero variance for variable {label!r}: no correlation")
    root = np.sqrt(d)
    corr = np.empty_like(sigma)
    for i in range(p):
        for j in range(p):
            corr[i, j] = sigma[i, j] / (root[i] * root[j])
        corr[i, i] = 1.0
    return corr


def correlation_from_cov(cov):
    """Correlation matrix of a SymbolicCovariance."""
    return correlation_matrix(cov.sigma_b, cov.names)


def covariance_quantile_oracle(frame, i, j, tol=1e-10):
    """Sample covariance of variables i and j straight from the definition.

    Averages, over rows, the integral of the product of the deviations of
    the row quantile functions from the barycentre quantile functions. Row
    contributions are combined with compensated summation so that results
    do not depend on evaluation order. Latent quantile values are memoized
    per node set, since every row shares the two latent distributions.
    """
    if frame.n < 2:
        raise DataValidationError("covariance needs at least two rows")
    frame.require_latents()
    c, r = frame.centres_ranges()
    cbar = c.mean(axis=0)
    rbar = r.mean(axis=0)
    ui, uj = frame.latents[i], frame.latents[j]
    cuts = set(ui.breakpoints()) | set(uj.breakpoints())

    memo = {}

    def quantiles(t):
        key = t.tobytes()
        hit = memo.get(key)
        if hit is None:
            hit = (ui._quantile(t), uj._quantile(t))
            memo[key] = hit
        return hit

    def row_integral(h):
        def integrand(t):
            qi, qj = quantiles(t)
            di = (c[h, i] - cbar[i]) + 0.5 * (r[h, i] - rbar[i]) * qi
            dj = (c[h, j] - cbar[j]) + 0.5 * (r[h, j] - rbar[j]) * qj
            return di * dj
        return integrate(integrand, breakpoints=cuts, tol=tol)

    return math.fsum(row_integral(h) for h in range(frame.n)) / frame.n


def cov_model7(frame, ddof=0):
    """Comparison estimator: centre covariances plus a diagonal range
    adjustment, Diag(S_RR + rbar rbar') / 24."""
    if frame.n < 2:
        raise DataValidationError("covariance needs at least two rows")
    _, r = frame.centres_ranges()
    rbar = r.mean(axis=0)
    s_cc, s_rr, _ = _covariance_parts(frame, ddof=ddof)
    second = s_rr + np.outer(rbar, rbar)
    return s_cc + np.diag(np.diag(second)) / 24.0


def frobenius_diff(m1, m2):
    """Frobenius norm of the difference of two equally shaped matrices."""
    m1 = np.asarray(m1, dtype=float)
    m2 = np.asarray(m2, dtype=float)
    if m1.shape != m2.shape:
        raise DomainError("shape mismatch")
    diff = m1 - m2
    return math.sqrt(math.fsum((diff * diff).ravel().tolist()))
