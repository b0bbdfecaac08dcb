"""Gaussian tail/gamma functions, Gaussian-kernel derivatives, and the shared
1-D quadrature engine.

Everything downstream (smoothed densities, L1 derivative norms, the exact MMSE
oracle) funnels its integrals through :func:`integrate`, so tolerances and the
infinite-endpoint clipping rule live in one place.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np
from scipy import integrate as _integrate
from scipy import special as _special

__all__ = [
    "DomainError",
    "QuadratureError",
    "QuadratureSpec",
    "DEFAULT_QUADRATURE",
    "GaussianKernel",
    "q_function",
    "gamma_function",
    "kernel_derivative",
    "kernel_derivative_norms",
    "KernelDerivativeNorms",
    "integrate",
]

_SQRT2 = math.sqrt(2.0)
_SQRT_PI = math.sqrt(math.pi)
_SQRT_2PI = math.sqrt(2.0 * math.pi)


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class QuadratureError(RuntimeError):
    """Adaptive quadrature exhausted its subdivision budget without converging.

    Carries the best available estimate so callers can inspect how far off the
    run was.
    """

    def __init__(self, message: str, best_estimate: float, error_estimate: float):
        super().__init__(message)
        self.best_estimate = best_estimate
        self.error_estimate = error_estimate


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerance and budget knobs for the adaptive quadrature engine.

    ``infinite_cutoff_sigmas`` controls where infinite endpoints are clipped:
    an infinite endpoint becomes ``+/-(center + infinite_cutoff_sigmas * scale)``
    with ``center`` and ``scale`` supplied by the caller of :func:`integrate`.
    """

    abs_tol: float = 1e-10
    rel_tol: float = 1e-9
    max_subdivisions: int = 2**14
    infinite_cutoff_sigmas: float = 12.0

    def __post_init__(self) -> None:
        if not (self.abs_tol > 0.0 and math.isfinite(self.abs_tol)):
            raise DomainError(f"abs_tol must be positive and finite, got {self.abs_tol}")
        if not (self.rel_tol > 0.0 and math.isfinite(self.rel_tol)):
            raise DomainError(f"rel_tol must be positive and finite, got {self.rel_tol}")
        if self.max_subdivisions < 1:
            raise DomainError(f"max_subdivisions must be >= 1, got {self.max_subdivisions}")
        if not (self.infinite_cutoff_sigmas > 0.0):
            raise DomainError(
                f"infinite_cutoff_sigmas must be positive, got {self.infinite_cutoff_sigmas}"
            )


DEFAULT_QUADRATURE = QuadratureSpec()


def q_function(x: float) -> float:
    """Standard normal tail probability Q(x) = P(Z > x), via the erfc relation
    Q(x) = erfc(x / sqrt(2)) / 2."""
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"q_function requires a finite argument, got {x}")
    return 0.5 * _special.erfc(x / _SQRT2)


def gamma_function(z: float) -> float:
    """Euler gamma function on the positive half-line."""
    z = float(z)
    if not (math.isfinite(z) and z > 0.0):
        raise DomainError(f"gamma_function requires z > 0, got {z}")
    return float(_special.gamma(z))


def _hermite_factor(order: int, sigma: float, x: np.ndarray) -> np.ndarray:
    """Polynomial P_j with K_sigma^(j)(x) = P_j(x) * K_sigma(x).

    P_0 = 1, P_1 = -x/sigma^2, P_2 = (x^2 - sigma^2)/sigma^4,
    P_3 = -(x^3 - 3 sigma^2 x)/sigma^6.
    """
    s2 = sigma * sigma
    if order == 0:
        return np.ones_like(x)
    if order == 1:
        return -x / s2
    if order == 2:
        return (x * x - s2) / (s2 * s2)
    return -(x * x * x - 3.0 * s2 * x) / (s2 * s2 * s2)


def kernel_derivative(order: int, sigma: float, x):
    """j-th derivative of the centered Gaussian density with scale sigma.

    Accepts scalar or array ``x``; supported orders are 0 through 3.
    """
    if not (sigma > 0.0 and math.isfinite(sigma)):
        raise DomainError(f"sigma must be positive and finite, got {sigma}")
    if order not in (0, 1, 2, 3):
        raise DomainError(f"kernel derivative order must be in {{0,1,2,3}}, got {order}")
    xa = np.asarray(x, dtype=float)
    dens = np.exp(-0.5 * (xa / sigma) ** 2) / (_SQRT_2PI * sigma)
    out = _hermite_factor(order, sigma, xa) * dens
    if np.ndim(x) == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class GaussianKernel:
    """Centered Gaussian density K_sigma(x) = exp(-x^2/(2 sigma^2)) / (sqrt(2 pi) sigma)."""

    sigma: float

    def __post_init__(self) -> None:
        if not (self.sigma > 0.0 and math.isfinite(self.sigma)):
            raise DomainError(f"GaussianKernel requires sigma > 0, got {self.sigma}")

    def __call__(self, x):
        return kernel_derivative(0, self.sigma, x)

    def derivative(self, order: int, x):
        return kernel_derivative(order, self.sigma, x)


class KernelDerivativeNorms(NamedTuple):
    """Closed-form norms of Gaussian-kernel derivatives.

    l1_d1      = ||K'||_1   = sqrt(2)/(sqrt(pi) sigma)
    l2sq_d1    = ||K'||_2^2 = 1/(4 sqrt(pi) sigma^3)
    l3cu_d1    = ||K'||_3^3 = sqrt(2)/(9 sqrt(pi^3) sigma^5)
    l1_d2_upper:  ||K''||_1  <= 2/sigma^2
    l2_d2      = ||K''||_2  = sqrt(3)/(2 sqrt(2) pi^(1/4) sigma^(5/2))
    l1_d3_upper:  ||K'''||_1 <= 5 sqrt(2)/(sqrt(pi) sigma^3)
    """

    l1_d1: float
    l2sq_d1: float
    l3cu_d1: float
    l1_d2_upper: float
    l2_d2: float
    l1_d3_upper: float


def kernel_derivative_norms(sigma: float) -> KernelDerivativeNorms:
    if not (sigma > 0.0 and math.isfinite(sigma)):
        raise DomainError(f"sigma must be positive and finite, got {sigma}")
    return KernelDerivativeNorms(
        l1_d1=_SQRT2 / (_SQRT_PI * sigma),
        l2sq_d1=1.0 / (4.0 * _SQRT_PI * sigma**3),
        l3cu_d1=_SQRT2 / (9.0 * math.sqrt(math.pi**3) * sigma**5),
        l1_d2_upper=2.0 / sigma**2,
        l2_d2=math.sqrt(3.0) / (2.0 * _SQRT2 * math.pi**0.25 * sigma**2.5),
        l1_d3_upper=5.0 * _SQRT2 / (_SQRT_PI * sigma**3),
    )


def integrate(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
    *,
    center: float = 0.0,
    scale: float = 1.0,
    points: Sequence[float] | None = None,
) -> float:
    """Adaptive quadrature of ``f`` over ``[lo, hi]``.

    Infinite endpoints are clipped at ``+/-(center + infinite_cutoff_sigmas * scale)``;
    ``center`` and ``scale`` describe where the integrand's mass sits (e.g. the
    clipping radius and the noise scale). ``points`` optionally marks interior
    break points (peaks, kinks) for the subdivision to respect.

    Raises :class:`QuadratureError` carrying the best estimate when the
    subdivision budget is exhausted before the tolerances are met.
    """
    if not callable(f):
        raise DomainError("integrand must be callable")
    cutoff = abs(center) + spec.infinite_cutoff_sigmas * scale
    a = -cutoff if lo == -math.inf else float(lo)
    b = cutoff if hi == math.inf else float(hi)
    if not (math.isfinite(a) and math.isfinite(b)):
        raise DomainError(f"bad integration endpoints ({lo}, {hi})")
    if a == b:
        return 0.0
    if points is not None:
        points = [p for p in points if a < p < b]
        if not points:
            points = None
    result = _integrate.quad(
        f,
        a,
        b,
        epsabs=spec.abs_tol,
        epsrel=spec.rel_tol,
        limit=spec.max_subdivisions,
        points=points,
        full_output=True,
    )
    value, err = float(result[0]), float(result[1])
    if len(result) > 3:
        # QUADPACK message present: tolerance not met within the budget.
        raise QuadratureError(str(result[3]), best_estimate=value, error_estimate=err)
    return value
