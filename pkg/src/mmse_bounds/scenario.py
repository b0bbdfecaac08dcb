"""Source laws for the binary-label estimation problem.

A scenario is a label prior P(Y = +1) = p together with the two conditional
laws of X given Y = +1 and Y = -1, each supported inside [-1, 1]: either a
point mass or a black-box density with a declared support interval. Sampling
uses a counter-based PRNG (Philox) keyed by an explicit 64-bit seed; density
laws are sampled by inverse CDF through a monotone spline of a quadrature CDF
table.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterator, Sequence

import numpy as np
from scipy.interpolate import PchipInterpolator

from .special_math import (
    DEFAULT_QUADRATURE,
    DomainError,
    QuadratureSpec,
    integrate,
)

__all__ = [
    "ConditionalLaw",
    "Scenario",
    "SampleSet",
    "SupportGeometry",
    "sample_raw",
    "margin_mass",
    "support_geometry",
    "law_mean",
    "uniform_law",
    "triangular_law",
    "make_law",
]

_CDF_GRID_SIZE = 4096
_NORMALIZATION_TOL = 1e-8


@dataclass(frozen=True)
class ConditionalLaw:
    """Law of X given one label value: a point mass or a density on [-1, 1].

    Use the :meth:`point_mass` / :meth:`density` constructors; the raw
    initializer does no validation beyond field storage.
    """

    kind: str  # "point_mass" | "density"
    location: float | None = None
    pdf: Callable[[float], float] | None = None
    support: tuple[float, float] = (-1.0, 1.0)

    @classmethod
    def point_mass(cls, location: float) -> "ConditionalLaw":
        location = float(location)
        if not (-1.0 <= location <= 1.0):
            raise DomainError(f"point mass location must lie in [-1, 1], got {location}")
        return cls(kind="point_mass", location=location, support=(location, location))

    @classmethod
    def density(
        cls,
        pdf: Callable[[float], float],
        support: tuple[float, float],
        quadrature: QuadratureSpec = DEFAULT_QUADRATURE,
    ) -> "ConditionalLaw":
        a, b = float(support[0]), float(support[1])
        if not (-1.0 <= a < b <= 1.0):
            raise DomainError(f"support must be a nondegenerate subinterval of [-1, 1], got {support}")
        total = integrate(pdf, a, b, quadrature)
        if abs(total - 1.0) > _NORMALIZATION_TOL:
            raise DomainError(
                f"density must integrate to 1 over its support within {_NORMALIZATION_TOL}, got {total!r}"
            )
        return cls(kind="density", pdf=pdf, support=(a, b))

    @property
    def is_point_mass(self) -> bool:
        return self.kind == "point_mass"


@dataclass(frozen=True)
class Scenario:
    """Binary-label source: prior p = P(Y = +1) and the two conditional laws."""

    prior_p: float
    law_plus: ConditionalLaw
    law_minus: ConditionalLaw

    def __post_init__(self) -> None:
        if not (0.0 < self.prior_p < 1.0):
            raise DomainError(f"prior_p must lie in the open interval (0, 1), got {self.prior_p}")


@dataclass(frozen=True)
class SampleSet:
    """Paired samples (x_i, y_i) with y_i in {-1, +1}, stored as arrays."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self) -> None:
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if x.ndim != 1 or y.ndim != 1 or x.shape != y.shape:
            raise DomainError("x and y must be 1-D arrays of equal length")
        if not np.all(np.isin(y, (-1.0, 1.0))):
            raise DomainError("labels must be -1 or +1")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @classmethod
    def from_pairs(cls, pairs: Sequence[tuple[float, float]]) -> "SampleSet":
        arr = np.asarray(list(pairs), dtype=float)
        if arr.size == 0:
            return cls(x=np.empty(0), y=np.empty(0))
        return cls(x=arr[:, 0], y=arr[:, 1])

    def as_pairs(self) -> list[tuple[float, float]]:
        return [(float(a), float(b)) for a, b in zip(self.x, self.y)]

    def __len__(self) -> int:
        return int(self.x.shape[0])

    def __iter__(self) -> Iterator[tuple[float, float]]:
        return iter(self.as_pairs())


@dataclass(frozen=True)
class SupportGeometry:
    """How the two conditional supports sit around the origin.

    kind "separated": supports lie on opposite sides of 0 with margin gamma.
    kind "overlapping": supports cross zero by at most gamma0; delta_plus and
    delta_minus are the masses each law keeps beyond a chosen margin gamma.
    kind "none": no usable structure was identified.
    """

    kind: str  # "separated" | "overlapping" | "none"
    gamma: float | None = None
    gamma0: float | None = None
    delta_plus: float | None = None
    delta_minus: float | None = None


def as_sample_set(samples) -> SampleSet:
    """Coerce a SampleSet or an iterable of (x, y) pairs to a SampleSet."""
    if isinstance(samples, SampleSet):
        return samples
    return SampleSet.from_pairs(list(samples))


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=np.uint64(seed)))


@lru_cache(maxsize=64)
def _inverse_cdf(law: ConditionalLaw):
    """Monotone-spline inverse of the quadrature CDF table of a density law."""
    a, b = law.support
    grid = np.linspace(a, b, _CDF_GRID_SIZE)
    # Composite 8-node Gauss-Legendre per grid cell, accumulated into a CDF.
    nodes, weights = np.polynomial.legendre.leggauss(8)
    half = 0.5 * (grid[1:] - grid[:-1])
    mid = 0.5 * (grid[1:] + grid[:-1])
    pts = mid[:, None] + half[:, None] * nodes[None, :]
    vals = np.fromiter((law.pdf(float(t)) for t in pts.ravel()), dtype=float, count=pts.size)
    vals = vals.reshape(pts.shape)
    cell = half * (vals * weights[None, :]).sum(axis=1)
    cdf = np.concatenate(([0.0], np.cumsum(cell)))
    cdf /= cdf[-1]
    # PCHIP needs strictly increasing abscissae; drop flat-CDF duplicates.
    keep = np.concatenate(([True], np.diff(cdf) > 1e-14))
    keep[-1] = True
    return PchipInterpolator(cdf[keep], grid[keep], extrapolate=False)


def _sample_law(law: ConditionalLaw, count: int, rng: np.random.Generator) -> np.ndarray:
    if count == 0:
        return np.empty(0)
    if law.is_point_mass:
        return np.full(count, law.location, dtype=float)
    inv = _inverse_cdf(law)
    u = rng.random(count)
    x = np.asarray(inv(u), dtype=float)
    a, b = law.support
    return np.clip(x, a, b)


def sample_raw(scenario: Scenario, n: int, seed: int) -> SampleSet:
    """Draw n i.i.d. pairs (X, Y) from the scenario, deterministically in seed.

    Labels are drawn first, then each conditional law is sampled once for its
    label's block, so identical (scenario, n, seed) always yields identical
    output.
    """
    if n < 0:
        raise DomainError(f"sample count must be nonnegative, got {n}")
    rng = _rng(seed)
    u = rng.random(n)
    y = np.where(u < scenario.prior_p, 1.0, -1.0)
    x = np.empty(n)
    plus = y > 0
    x[plus] = _sample_law(scenario.law_plus, int(plus.sum()), rng)
    x[~plus] = _sample_law(scenario.law_minus, int((~plus).sum()), rng)
    return SampleSet(x=x, y=y)


def _mass_above(law: ConditionalLaw, threshold: float, quadrature: QuadratureSpec) -> float:
    if law.is_point_mass:
        return 1.0 if law.location >= threshold else 0.0
    a, b = law.support
    if b <= threshold:
        return 0.0
    return integrate(law.pdf, max(a, threshold), b, quadrature)


def _mass_below(law: ConditionalLaw, threshold: float, quadrature: QuadratureSpec) -> float:
    if law.is_point_mass:
        return 1.0 if law.location <= threshold else 0.0
    a, b = law.support
    if a >= threshold:
        return 0.0
    return integrate(law.pdf, a, min(b, threshold), quadrature)


def margin_mass(
    scenario: Scenario,
    gamma: float,
    quadrature: QuadratureSpec = DEFAULT_QUADRATURE,
) -> tuple[float, float]:
    """Mass each conditional law keeps beyond the margin: the plus law on
    [gamma, 1] and the minus law on [-1, -gamma]."""
    if not (0.0 < gamma < 1.0):
        raise DomainError(f"gamma must lie in the open interval (0, 1), got {gamma}")
    delta_plus = _mass_above(scenario.law_plus, gamma, quadrature)
    delta_minus = _mass_below(scenario.law_minus, -gamma, quadrature)
    return (delta_plus, delta_minus)


def _lower_edge(law: ConditionalLaw) -> float:
    return law.location if law.is_point_mass else law.support[0]


def _upper_edge(law: ConditionalLaw) -> float:
    return law.location if law.is_point_mass else law.support[1]


def support_geometry(
    scenario: Scenario,
    gamma: float | None = None,
    quadrature: QuadratureSpec = DEFAULT_QUADRATURE,
) -> SupportGeometry:
    """Classify the conditional supports relative to the origin.

    Separated supports report the margin directly. Overlapping supports need a
    caller-chosen margin gamma > gamma0 before the beyond-margin masses are
    defined; without one the geometry is reported as "none".
    """
    lo_plus = _lower_edge(scenario.law_plus)
    hi_minus = _upper_edge(scenario.law_minus)
    if lo_plus > 0.0 and hi_minus < 0.0:
        g = min(lo_plus, -hi_minus)
        if gamma is not None:
            if not (0.0 < gamma <= g):
                raise DomainError(
                    f"separated supports have margin {g}; gamma must lie in (0, {g}], got {gamma}"
                )
            g = gamma
        return SupportGeometry(kind="separated", gamma=g)
    gamma0 = max(-lo_plus, hi_minus, 0.0)
    if gamma is not None and gamma0 < gamma < 1.0:
        dp, dm = margin_mass(scenario, gamma, quadrature)
        return SupportGeometry(
            kind="overlapping", gamma=gamma, gamma0=gamma0, delta_plus=dp, delta_minus=dm
        )
    return SupportGeometry(kind="none", gamma0=gamma0)


def law_mean(law: ConditionalLaw, quadrature: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """Mean of a conditional law (quadrature for densities)."""
    if law.is_point_mass:
        return float(law.location)
    a, b = law.support
    return integrate(lambda t: t * law.pdf(t), a, b, quadrature)


def uniform_law(a: float, b: float) -> ConditionalLaw:
    """Uniform density on [a, b] inside [-1, 1]."""
    a, b = float(a), float(b)
    if not (-1.0 <= a < b <= 1.0):
        raise DomainError(f"uniform support must be a nondegenerate subinterval of [-1, 1], got ({a}, {b})")
    h = 1.0 / (b - a)
    return ConditionalLaw(kind="density", pdf=lambda t, _h=h: _h, support=(a, b))


def triangular_law(a: float, b: float, peak: float) -> ConditionalLaw:
    """Triangular density on [a, b] with mode at peak."""
    a, b, peak = float(a), float(b), float(peak)
    if not (-1.0 <= a < b <= 1.0) or not (a <= peak <= b):
        raise DomainError(f"triangular law needs -1 <= a < b <= 1 and a <= peak <= b, got ({a}, {b}, {peak})")

    def pdf(t: float, _a=a, _b=b, _c=peak) -> float:
        if t < _a or t > _b:
            return 0.0
        if t < _c:
            return 2.0 * (t - _a) / ((_b - _a) * (_c - _a))
        if t > _c:
            return 2.0 * (_b - t) / ((_b - _a) * (_b - _c))
        return 2.0 / (_b - _a)

    return ConditionalLaw(kind="density", pdf=pdf, support=(a, b))


def make_law(spec: dict) -> ConditionalLaw:
    """Build a conditional law from a plain-dict description (config files).

    Kinds: {"kind": "point_mass", "location": x},
           {"kind": "uniform", "support": [a, b]},
           {"kind": "triangular", "support": [a, b], "peak": c}.
    """
    if not isinstance(spec, dict) or "kind" not in spec:
        raise DomainError(f"law spec must be a dict with a 'kind' key, got {spec!r}")
    kind = spec["kind"]
    if kind == "point_mass":
        return ConditionalLaw.point_mass(spec["location"])
    if kind == "uniform":
        a, b = spec["support"]
        return uniform_law(a, b)
    if kind == "triangular":
        a, b = spec["support"]
        return triangular_law(a, b, spec["peak"])
    raise DomainError(f"unknown law kind {kind!r}")
