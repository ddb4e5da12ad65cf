"""Latent microdata distributions on [-1, 1].

Every interval observation carries a latent weight describing where the
microdata sit between the endpoints: a value v inside the interval with
centre c and range r is v = c + u * r / 2 with u in [-1, 1]. The families
here expose the quantile function and the first two moments, which is all
the distance and covariance machinery downstream needs.

Quantile functions are vectorized over numpy arrays and pure: once built, a
distribution never mutates (the kernel-density family precomputes its grid
at construction), so values are safe to share across threads.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DataValidationError, DomainError, NumericFailure
from .quadrature import integrate
from .special import betainc_inv, norm_cdf, norm_pdf, norm_ppf

__all__ = [
    "LatentDistribution",
    "Uniform",
    "Triangular",
    "InvertedTriangular",
    "TruncatedNormal",
    "ShiftedBeta",
    "Kde",
    "Degenerate",
    "cross_moment",
    "quantile_correlation",
    "microdata_quantile",
    "latent_to_dict",
    "latent_from_dict",
    "silverman_bandwidth",
]

_SQRT_2PI = math.sqrt(2.0 * math.pi)


class LatentDistribution:
    """Base class for latent weight distributions with support [-1, 1]."""

    def _quantile(self, t: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def quantile(self, t):
        """Generalized inverse cdf at t in (0, 1]; vectorized."""
        arr = np.asarray(t, dtype=float)
        if arr.size and (np.any(arr <= 0.0) or np.any(arr > 1.0)):
            raise DomainError("quantile argument must lie in (0, 1]")
        out = self._quantile(np.atleast_1d(arr)).reshape(arr.shape)
        return out if np.ndim(t) else float(out)

    @property
    def mean(self) -> float:
        raise NotImplementedError

    @property
    def second_moment(self) -> float:
        raise NotImplementedError

    @property
    def variance(self) -> float:
        return self.second_moment - self.mean ** 2

    def moments(self):
        """(mean, second moment, variance) as plain floats."""
        return (self.mean, self.second_moment, self.variance)

    def breakpoints(self):
        """Interior t values where the quantile function is not smooth."""
        return ()


@dataclass(frozen=True)
class Uniform(LatentDistribution):
    """Continuous uniform weight on [-1, 1]."""

    def _quantile(self, t):
        return 2.0 * t - 1.0

    @property
    def mean(self):
        return 0.0

    @property
    def second_moment(self):
        return 1.0 / 3.0


@dataclass(frozen=True)
class Triangular(LatentDistribution):
    """Triangular weight on [-1, 1] with mode in [-1, 1].

    mean = mode/3, variance = (mode^2 + 3)/18, so the second moment is
    (mode^2 + 1)/6.
    """

    mode: float = 0.0

    def __post_init__(self):
        if not (-1.0 <= self.mode <= 1.0) or not math.isfinite(self.mode):
            raise DomainError(f"triangular mode must lie in [-1, 1], got {self.mode}")

    def _quantile(self, t):
        m = self.mode
        split = 0.5 * (m + 1.0)
        left = -1.0 + np.sqrt(np.maximum(2.0 * t * (m + 1.0), 0.0))
        right = 1.0 - np.sqrt(np.maximum(2.0 * (1.0 - t) * (1.0 - m), 0.0))
        return np.where(t <= split, left, right)

    @property
    def mean(self):
        return self.mode / 3.0

    @property
    def second_moment(self):
        return (self.mode ** 2 + 1.0) / 6.0

    @property
    def variance(self):
        return (self.mode ** 2 + 3.0) / 18.0

    def breakpoints(self):
        split = 0.5 * (self.mode + 1.0)
        return (split,) if 0.0 < split < 1.0 else ()


@dataclass(frozen=True)
class InvertedTriangular(LatentDistribution):
    """V-shaped density |u| on [-1, 1]; mass piles up at the endpoints."""

    def _quantile(self, t):
        left = -np.sqrt(np.maximum(1.0 - 2.0 * t, 0.0))
        right = np.sqrt(np.maximum(2.0 * t - 1.0, 0.0))
        return np.where(t <= 0.5, left, right)

    @property
    def mean(self):
        return 0.0

    @property
    def second_moment(self):
        return 0.5

    def breakpoints(self):
        return (0.5,)


@dataclass(frozen=True)
class TruncatedNormal(LatentDistribution):
    """Centred normal with pre-truncation variance sigma2, cut to [-1, 1]."""

    sigma2: float = 1.0 / 9.0

    def __post_init__(self):
        if not (self.sigma2 > 0.0) or not math.isfinite(self.sigma2):
            raise DomainError("sigma2 must be a positive real")

    def _quantile(self, t):
        sigma = math.sqrt(self.sigma2)
        k = 1.0 / sigma
        lo = norm_cdf(-k)
        z = 1.0 - 2.0 * lo
        # cancellation near t = 1 can overshoot the support edge by ~1e-11
        return np.clip(sigma * norm_ppf(lo + t * z), -1.0, 1.0)

    @property
    def mean(self):
        return 0.0

    @property
    def second_moment(self):
        sigma = math.sqrt(self.sigma2)
        k = 1.0 / sigma
        z = 2.0 * norm_cdf(k) - 1.0
        return self.sigma2 * (1.0 - 2.0 * k * norm_pdf(k) / z)


@dataclass(frozen=True)
class ShiftedBeta(LatentDistribution):
    """U = 2W - 1 with W ~ Beta(alpha, beta), mapped onto [-1, 1]."""

    alpha: float
    beta: float

    def __post_init__(self):
        ok = self.alpha > 0.0 and self.beta > 0.0
        if not ok or not (math.isfinite(self.alpha) and math.isfinite(self.beta)):
            raise DomainError("beta shape parameters must be positive reals")

    def _quantile(self, t):
        return 2.0 * betainc_inv(self.alpha, self.beta, t) - 1.0

    @property
    def mean(self):
        return (self.alpha - self.beta) / (self.alpha + self.beta)

    @property
    def variance(self):
        a, b = self.alpha, self.beta
        return 4.0 * a * b / ((a + b) ** 2 * (a + b + 1.0))

    @property
    def second_moment(self):
        return self.variance + self.mean ** 2


@dataclass(frozen=True)
class Degenerate(LatentDistribution):
    """Point mass at 0; the weight of a zero-range (real-valued) variable."""

    def _quantile(self, t):
        return np.zeros_like(t)

    @property
    def mean(self):
        return 0.0

    @property
    def second_moment(self):
        return 0.0


def silverman_bandwidth(sample):
    """Silverman's rule of thumb on the raw scaled sample."""
    sample = np.asarray(sample, dtype=float)
    n = sample.size
    if n < 2:
        raise DomainError("bandwidth selection needs at least two values")
    sd = float(np.std(sample, ddof=1))
    q75, q25 = np.percentile(sample, [75.0, 25.0])
    iqr = float(q75 - q25)
    spread = min(sd, iqr / 1.34) if iqr > 0.0 else sd
    if spread <= 0.0:
        raise NumericFailure("constant sample: no usable bandwidth")
    return 0.9 * spread * n ** (-0.2)


_KDE_GRID_SIZE = 4096


class Kde(LatentDistribution):
    """Gaussian kernel density on [-1, 1] with boundary reflection.

    The density is evaluated by linear-binning the sample onto a fixed grid
    and convolving with the kernel; mass pushed past either endpoint is
    mirrored back in, which keeps the estimate supported on [-1, 1]. The cdf
    grid, its inverse machinery, and the first two moments are all computed
    once at construction.
    """

    def __init__(self, sample, bandwidth=None):
        sample = np.asarray(sample, dtype=float).ravel()
        if sample.size < 2:
            raise DomainError("kde needs at least two sample values")
        if np.any(~np.isfinite(sample)):
            raise DomainError("kde sample contains non-finite values")
        if np.any(sample < -1.0 - 1e-9) or np.any(sample > 1.0 + 1e-9):
            raise DomainError("kde sample values must lie in [-1, 1]")
        sample = np.clip(sample, -1.0, 1.0)
        if bandwidth is None:
            bandwidth = silverman_bandwidth(sample)
        bandwidth = float(bandwidth)
        if not (bandwidth > 0.0) or not math.isfinite(bandwidth):
            raise DomainError("bandwidth must be a positive real")

        grid = np.linspace(-1.0, 1.0, _KDE_GRID_SIZE)
        density = _reflected_density(sample, grid, bandwidth)
        dx = grid[1] - grid[0]
        cdf = np.concatenate(([0.0], np.cumsum(0.5 * (density[1:] + density[:-1]) * dx)))

        self._sample = sample
        self._sample.setflags(write=False)
        self._bandwidth = bandwidth
        self._hash = hash((bandwidth, sample.tobytes()))
        self._grid = grid
        self._density = density
        self._density_integral = float(cdf[-1])
        self._cdf = cdf / cdf[-1]
        self._mean = float(integrate(self._quantile, tol=1e-10))
        self._m2 = float(integrate(lambda t: self._quantile(t) ** 2, tol=1e-10))

    @property
    def sample(self):
        return self._sample

    @property
    def bandwidth(self):
        return self._bandwidth

    @property
    def density_integral(self):
        """Mass of the raw (unnormalized) density over [-1, 1]."""
        return self._density_integral

    def pdf(self, x):
        arr = np.asarray(x, dtype=float)
        out = np.interp(np.atleast_1d(arr), self._grid, self._density,
                        left=0.0, right=0.0).reshape(arr.shape)
        return out if np.ndim(x) else float(out)

    def cdf(self, x):
        arr = np.asarray(x, dtype=float)
        out = np.interp(np.atleast_1d(arr), self._grid, self._cdf,
                        left=0.0, right=1.0).reshape(arr.shape)
        return out if np.ndim(x) else float(out)

    def _quantile(self, t):
        # locate the first grid cell where the cdf reaches t, then bisect on
        # the linear interpolant inside it; the upper end of the bracket
        # keeps F(hi) >= t, converging to the generalized inverse
        k = np.searchsorted(self._cdf, t, side="left")
        k = np.clip(k, 1, self._cdf.size - 1)
        x0 = self._grid[k - 1]
        f0 = self._cdf[k - 1]
        slope = (self._cdf[k] - f0) / (self._grid[k] - x0)
        lo = x0.copy()
        hi = self._grid[k].copy()
        for _ in range(48):
            mid = 0.5 * (lo + hi)
            above = f0 + slope * (mid - x0) >= t
            hi = np.where(above, mid, hi)
            lo = np.where(above, lo, mid)
        return hi

    @property
    def mean(self):
        return self._mean

    @property
    def second_moment(self):
        return self._m2

    def __eq__(self, other):
        if not isinstance(other, Kde):
            return NotImplemented
        return (self._bandwidth == other._bandwidth
                and np.array_equal(self._sample, other._sample))

    def __hash__(self):
        # content hash; the object is immutable and eq compares the same data
        return self._hash

    def __repr__(self):
        return f"Kde(n={self._sample.size}, bandwidth={self._bandwidth:.6g})"


def _reflected_density(sample, grid, h):
    n = sample.size
    size = grid.size
    dx = grid[1] - grid[0]
    # linear binning conserves total weight exactly
    pos = (sample - grid[0]) / dx
    idx = np.clip(np.floor(pos).astype(int), 0, size - 2)
    frac = pos - idx
    weights = np.zeros(size)
    np.add.at(weights, idx, 1.0 - frac)
    np.add.at(weights, idx + 1, frac)

    radius = int(math.ceil(8.0 * h / dx))
    offsets = np.arange(-radius, radius + 1) * dx
    kernel = np.exp(-0.5 * (offsets / h) ** 2) / (h * _SQRT_2PI)
    full = np.convolve(weights, kernel)

    # mirror-fold everything back onto grid indices 0..size-1
    virtual = np.arange(-radius, size + radius)
    period = 2 * (size - 1)
    folded = np.mod(virtual, period)
    folded = np.where(folded > size - 1, period - folded, folded)
    density = np.zeros(size)
    np.add.at(density, folded, full)
    # a boundary point is its own mirror image on every bounce, so the
    # folded value there counts twice
    density[0] *= 2.0
    density[-1] *= 2.0
    return density / n


def _closed_cross_moment(d1, d2):
    if isinstance(d1, Degenerate) or isinstance(d2, Degenerate):
        return 0.0
    if d1 == d2:
        return d1.second_moment
    pair = {type(d1), type(d2)}
    if pair == {Uniform, Triangular}:
        tri = d1 if isinstance(d1, Triangular) else d2
        # integral of (2t-1) against the triangular quantile, in closed form
        return (7.0 + tri.mode ** 2) / 30.0
    return None


def _quadrature_cross_moment(d1, d2, tol):
    cuts = set(d1.breakpoints()) | set(d2.breakpoints())
    return integrate(lambda t: d1._quantile(t) * d2._quantile(t),
                     breakpoints=cuts, tol=tol)


@functools.lru_cache(maxsize=4096)
def _cached_cross_moment(d1, d2, tol):
    return _quadrature_cross_moment(d1, d2, tol)


def cross_moment(d1, d2, method="auto", tol=1e-9):
    """Comonotone product moment: the integral of q1(t) * q2(t) over (0, 1).

    Symmetric in its arguments; equals the second moment when the two
    distributions coincide. ``method`` selects between the closed forms
    known for specific pairs ("closed"), quadrature on the product of
    quantile functions ("quadrature"), or closed-form-with-fallback
    ("auto", the default).
    """
    if method not in ("auto", "closed", "quadrature"):
        raise DomainError(f"unknown cross_moment method {method!r}")
    if method != "quadrature":
        closed = _closed_cross_moment(d1, d2)
        if closed is not None:
            return closed
        if method == "closed":
            raise DomainError(
                f"no closed-form cross moment for {type(d1).__name__} and "
                f"{type(d2).__name__}")
    try:
        return _cached_cross_moment(d1, d2, tol)
    except TypeError:
        # unhashable family (kde); compute without caching
        return _quadrature_cross_moment(d1, d2, tol)


def quantile_correlation(d1, d2):
    """Correlation between the two quantile functions, in (0, 1]."""
    v1, v2 = d1.variance, d2.variance
    if v1 <= 0.0 or v2 <= 0.0:
        raise NumericFailure("zero-variance latent")
    return (cross_moment(d1, d2) - d1.mean * d2.mean) / math.sqrt(v1 * v2)


def microdata_quantile(c, r, dist, t):
    """Quantile of the microdata in the interval with centre c and range r."""
    if r < 0.0:
        raise DomainError("range must be non-negative")
    q = dist.quantile(t)
    return c + 0.5 * r * np.asarray(q) if np.ndim(t) else c + 0.5 * r * q


_FAMILY_TAGS = {
    Uniform: "uniform",
    Triangular: "triangular",
    InvertedTriangular: "inverted_triangular",
    TruncatedNormal: "truncated_normal",
    ShiftedBeta: "shifted_beta",
    Kde: "kde",
    Degenerate: "degenerate",
}


def latent_to_dict(dist, sample_path=None):
    """JSON-ready dict for a latent specification.

    Kernel-density latents reference their sample through ``sample_path``;
    the caller is responsible for writing the sample file itself.
    """
    tag = _FAMILY_TAGS.get(type(dist))
    if tag is None:
        raise DomainError(f"cannot serialize latent of type {type(dist).__name__}")
    if isinstance(dist, Triangular):
        return {"family": tag, "mode": dist.mode}
    if isinstance(dist, TruncatedNormal):
        return {"family": tag, "sigma2": dist.sigma2}
    if isinstance(dist, ShiftedBeta):
        return {"family": tag, "alpha": dist.alpha, "beta": dist.beta}
    if isinstance(dist, Kde):
        if sample_path is None:
            raise DomainError("kde serialization requires sample_path")
        return {"family": tag, "sample_path": str(sample_path),
                "bandwidth": dist.bandwidth}
    return {"family": tag}


def latent_from_dict(spec, base_dir="."):
    """Rebuild a latent distribution from its JSON dict."""
    if not isinstance(spec, dict) or "family" not in spec:
        raise DataValidationError("latent spec must be a dict with a 'family' key")
    family = spec["family"]
    try:
        if family == "uniform":
            return Uniform()
        if family == "triangular":
            return Triangular(float(spec.get("mode", 0.0)))
        if family == "inverted_triangular":
            return InvertedTriangular()
        if family == "truncated_normal":
            return TruncatedNormal(float(spec.get("sigma2", 1.0 / 9.0)))
        if family == "shifted_beta":
            return ShiftedBeta(float(spec["alpha"]), float(spec["beta"]))
        if family == "degenerate":
            return Degenerate()
        if family == "kde":
            path = Path(base_dir) / spec["sample_path"]
            sample = np.loadtxt(path, ndmin=1)
            return Kde(sample, bandwidth=spec.get("bandwidth"))
    except KeyError as exc:
        raise DataValidationError(f"latent spec missing field {exc}") from exc
    raise DataValidationError(f"unknown latent family {family!r}")
