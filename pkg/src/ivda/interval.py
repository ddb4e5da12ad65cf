"""Macrodata containers: intervals, boxes, and interval datasets.

An interval [a, b] is equivalently carried as its centre (a + b)/2 and range
b - a; the two views round-trip exactly. A Box pairs a p-vector of intervals
with the latent distribution of each dimension. An IntervalFrame is the n x p
dataset container; it stores raw bounds without judging them, and exposes
``validate`` to report every broken invariant as data rather than aborting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DataValidationError, DomainError
from .latent import Degenerate, LatentDistribution

__all__ = ["Interval", "Box", "IntervalFrame", "Violation"]


@dataclass(frozen=True)
class Interval:
    """A real closed bounded interval [lower, upper]."""

    lower: float
    upper: float

    def __post_init__(self):
        if not (math.isfinite(self.lower) and math.isfinite(self.upper)):
            raise DomainError("interval bounds must be finite")
        if self.lower > self.upper:
            raise DomainError(f"interval bounds out of order: [{self.lower}, {self.upper}]")

    @classmethod
    def from_centre_range(cls, centre, range_):
        if range_ < 0.0:
            raise DomainError("range must be non-negative")
        half = 0.5 * range_
        return cls(centre - half, centre + half)

    @property
    def centre(self):
        return 0.5 * (self.lower + self.upper)

    @property
    def range(self):
        return self.upper - self.lower


@dataclass(frozen=True)
class Box:
    """A hyperrectangle: p intervals plus the latent weight per dimension."""

    intervals: tuple
    latents: tuple

    def __post_init__(self):
        object.__setattr__(self, "intervals", tuple(self.intervals))
        object.__setattr__(self, "latents", tuple(self.latents))
        if len(self.intervals) < 1:
            raise DomainError("a box needs at least one dimension")
        if len(self.intervals) != len(self.latents):
            raise DomainError("one latent distribution is required per dimension")
        for i, (iv, lat) in enumerate(zip(self.intervals, self.latents)):
            if not isinstance(iv, Interval):
                raise DomainError(f"dimension {i} is not an Interval")
            if not isinstance(lat, LatentDistribution):
                raise DomainError(f"dimension {i} has no latent distribution")
            if iv.range == 0.0 and not isinstance(lat, Degenerate):
                raise DomainError(
                    f"dimension {i} has zero range and must use the degenerate latent")

    @property
    def p(self):
        return len(self.intervals)

    @property
    def centres(self):
        return np.array([iv.centre for iv in self.intervals])

    @property
    def ranges(self):
        return np.array([iv.range for iv in self.intervals])

    def as_vector(self):
        """Stacked (centres, ranges) coordinates in R^{2p}."""
        return np.concatenate([self.centres, self.ranges])


@dataclass(frozen=True)
class Violation:
    """One broken data invariant; collected, never raised, by ``validate``."""

    rule: str
    row: int | None
    column: int | None
    message: str


class IntervalFrame:
    """n x p table of intervals with per-variable latent specifications.

    Bounds are stored as raw (n, p) arrays so malformed input can be loaded
    and audited; use ``validate`` before trusting a frame. Latents may be
    left unset (None) until a fitting step resolves them.
    """

    def __init__(self, lower, upper, names, latents=None, labels=None):
        lower = np.array(lower, dtype=float, ndmin=2)
        upper = np.array(upper, dtype=float, ndmin=2)
        if lower.shape != upper.shape:
            raise DomainError("lower and upper bound arrays must have equal shape")
        n, p = lower.shape
        names = tuple(str(x) for x in names)
        if len(names) != p:
            raise DomainError(f"expected {p} variable names, got {len(names)}")
        if len(set(names)) != p:
            raise DomainError("variable names must be unique")
        if latents is None:
            latents = (None,) * p
        latents = tuple(latents)
        if len(latents) != p:
            raise DomainError(f"expected {p} latent entries, got {len(latents)}")
        if labels is not None:
            labels = tuple(str(x) for x in labels)
            if len(labels) != n:
                raise DomainError(f"expected {n} row labels, got {len(labels)}")
        self._lower = lower
        self._upper = upper
        self._lower.setflags(write=False)
        self._upper.setflags(write=False)
        self.names = names
        self.latents = latents
        self.labels = labels

    @property
    def n(self):
        return self._lower.shape[0]

    @property
    def p(self):
        return self._lower.shape[1]

    @property
    def lower(self):
        return self._lower

    @property
    def upper(self):
        return self._upper

    def centres_ranges(self):
        """(n, p) matrices of centres and ranges; an exact arithmetic split."""
        return 0.5 * (self._lower + self._upper), self._upper - self._lower

    @property
    def centres(self):
        return self.centres_ranges()[0]

    @property
    def ranges(self):
        return self.centres_ranges()[1]

    def column_index(self, name):
        try:
            return self.names.index(name)
        except ValueError:
            raise DomainError(f"no variable named {name!r}") from None

    def with_latents(self, latents):
        """New frame with latents attached; accepts a mapping by name or a
        full sequence in column order."""
        if isinstance(latents, dict):
            unknown = set(latents) - set(self.names)
            if unknown:
                raise DomainError(f"unknown variables in latent mapping: {sorted(unknown)}")
            resolved = tuple(latents.get(name, current)
                             for name, current in zip(self.names, self.latents))
        else:
            resolved = tuple(latents)
        return IntervalFrame(self._lower, self._upper, self.names,
                             latents=resolved, labels=self.labels)

    def require_latents(self):
        missing = [name for name, lat in zip(self.names, self.latents) if lat is None]
        if missing:
            raise DataValidationError(
                f"latent distribution unspecified for variable(s): {', '.join(missing)}")

    def row_box(self, i):
        """The i-th observation as a Box; requires a valid row and latents."""
        self.require_latents()
        intervals = tuple(Interval(self._lower[i, j], self._upper[i, j])
                          for j in range(self.p))
        return Box(intervals, self.latents)

    def row_label(self, i):
        return self.labels[i] if self.labels is not None else str(i)

    def validate(self):
        """All broken invariants, as a list of Violations; never raises."""
        out = []
        n, p = self._lower.shape
        finite = np.isfinite(self._lower) & np.isfinite(self._upper)
        for i in range(n):
            for j in range(p):
                if not finite[i, j]:
                    out.append(Violation("not-finite", i, j,
                                         f"non-finite bound at row {i}, variable {self.names[j]}"))
                elif self._lower[i, j] > self._upper[i, j]:
                    out.append(Violation("order", i, j,
                                         f"lower > upper at row {i}, variable {self.names[j]}"))
        ranges = self._upper - self._lower
        for j in range(p):
            col_ok = finite[:, j] & (ranges[:, j] >= 0.0)
            col = ranges[col_ok, j]
            if col.size == 0:
                continue
            has_zero = bool(np.any(col == 0.0))
            has_positive = bool(np.any(col > 0.0))
            if has_zero and has_positive:
                out.append(Violation("mixed-zero-range", None, j,
                                     f"variable {self.names[j]} mixes zero and positive ranges"))
            lat = self.latents[j]
            if lat is None:
                continue
            degenerate_latent = isinstance(lat, Degenerate)
            if has_zero and not has_positive and not degenerate_latent:
                out.append(Violation("degenerate-latent-mismatch", None, j,
                                     f"zero-range variable {self.names[j]} must use the degenerate latent"))
            if degenerate_latent and has_positive:
                out.append(Violation("degenerate-latent-mismatch", None, j,
                                     f"variable {self.names[j]} has positive ranges but a degenerate latent"))
        return out
