"""Additive Gaussian mechanism with bounded-range post-processing.

``X^sigma = X + sigma Z`` followed by one of two range controls on
``B = [-r, r]``: truncation (out-of-range points are discarded) or
randomization (out-of-range points are replaced by a uniform draw on B).

The module exposes the post-processed pair's working functions: the smoothed
conditional densities and their derivatives, the bounded regression function
``eta``, the log-likelihood ratio ``theta``, closed-form derivative
expressions, and the L1 norms of the first three derivatives that feed the
Barron-constant machinery.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .scenario import ConditionalLaw, SampleSet, Scenario, as_sample_set
from .special_math import (
    DEFAULT_QUADRATURE,
    DomainError,
    QuadratureSpec,
    integrate,
    kernel_derivative,
    q_function,
)

__all__ = [
    "MechanismConfig",
    "PostProcessedLaw",
    "DegenerateSampleError",
    "DegenerateMechanismError",
    "SingularityError",
    "apply_mechanism",
    "out_of_range_prob",
    "lambdas",
    "post_processed_law",
    "smoothed_density_derivative",
    "eta_sigma",
    "theta_sigma",
    "eta_derivative",
    "theta_derivative",
    "derivative_l1_norms",
]

MODES = ("truncate", "randomize")


class DegenerateSampleError(RuntimeError):
    """Truncation discarded every sample."""


class DegenerateMechanismError(RuntimeError):
    """The mechanism retains zero probability mass, so its law is undefined."""


class SingularityError(ArithmeticError):
    """A post-processed density ratio is evaluated where its denominator vanishes."""


@dataclass(frozen=True)
class MechanismConfig:
    """Noise scale sigma, range limit r, and range-control mode."""

    sigma: float
    r: float
    mode: str

    def __post_init__(self) -> None:
        if not (self.sigma > 0.0 and math.isfinite(self.sigma)):
            raise DomainError(f"sigma must be positive and finite, got {self.sigma}")
        if not (self.r > 0.0 and math.isfinite(self.r)):
            raise DomainError(f"r must be positive and finite, got {self.r}")
        if self.mode not in MODES:
            raise DomainError(f"mode must be one of {MODES}, got {self.mode!r}")


def apply_mechanism(samples, config: MechanismConfig, seed: int) -> SampleSet:
    """Add Gaussian noise and apply the configured range control.

    Truncation drops out-of-range pairs (raising if nothing survives);
    randomization replaces out-of-range values with uniform draws on [-r, r],
    preserving the sample count. Deterministic in (samples, config, seed).
    """
    ss = as_sample_set(samples)
    rng = np.random.Generator(np.random.Philox(key=np.uint64(seed)))
    noisy = ss.x + config.sigma * rng.standard_normal(len(ss))
    inside = np.abs(noisy) <= config.r
    if config.mode == "truncate":
        if not inside.any():
            raise DegenerateSampleError(
                f"truncation at r={config.r} discarded all {len(ss)} samples"
            )
        return SampleSet(x=noisy[inside], y=ss.y[inside])
    out = ~inside
    noisy[out] = rng.uniform(-config.r, config.r, int(out.sum()))
    return SampleSet(x=noisy, y=ss.y)


def _law_out_of_range(law: ConditionalLaw, sigma: float, r: float, quadrature: QuadratureSpec) -> float:
    """P(|X + sigma Z| > r) for X ~ law: Q((r-s)/sigma) + Q((r+s)/sigma) mixed over law."""
    if law.is_point_mass:
        m = law.location
        return q_function((r - m) / sigma) + q_function((r + m) / sigma)
    a, b = law.support
    return integrate(
        lambda s: law.pdf(s) * (q_function((r - s) / sigma) + q_function((r + s) / sigma)),
        a,
        b,
        quadrature,
    )


def out_of_range_prob(
    scenario: Scenario,
    config: MechanismConfig,
    quadrature: QuadratureSpec = DEFAULT_QUADRATURE,
) -> tuple[float, float]:
    """(q_plus, q_minus): out-of-range probability of X^sigma under each label."""
    qp = _law_out_of_range(scenario.law_plus, config.sigma, config.r, quadrature)
    qm = _law_out_of_range(scenario.law_minus, config.sigma, config.r, quadrature)
    return (qp, qm)


def lambdas(
    scenario: Scenario,
    config: MechanismConfig,
    quadrature: QuadratureSpec = DEFAULT_QUADRATURE,
) -> tuple[float, float]:
    """Density weights of the post-processed law.

    truncate:  lambda_pm = p_pm / P(|X^sigma| <= r | Y = pm 1)
    randomize: lambda_pm = P(|X^sigma| > r | Y = pm 1) / (2r)
    """
    qp, qm = out_of_range_prob(scenario, config, quadrature)
    p = scenario.prior_p
    if config.mode == "truncate":
        keep_p, keep_m = 1.0 - qp, 1.0 - qm
        if keep_p <= 0.0 or keep_m <= 0.0:
            raise DegenerateMechanismError(
                f"truncation retains zero mass (retention {keep_p}, {keep_m})"
            )
        return (p / keep_p, (1.0 - p) / keep_m)
    return (qp / (2.0 * config.r), qm / (2.0 * config.r))


def smoothed_density_derivative(
    law: ConditionalLaw,
    sigma: float,
    order: int,
    x: float,
    quadrature: QuadratureSpec = DEFAULT_QUADRATURE,
) -> float:
    """j-th derivative of the Gaussian-smoothed density (law * K_sigma) at x.

    Point masses give the kernel derivative exactly; densities are integrated
    against the kernel derivative over their support.
    """
    if law.is_point_mass:
        return float(kernel_derivative(order, sigma, x - law.location))
    a, b = law.support
    return integrate(
        lambda s: law.pdf(s) * kernel_derivative(order, sigma, x - s),
        a,
        b,
        quadrature,
    )


@dataclass(frozen=True)
class PostProcessedLaw:
    """Weighted working densities g_pm of the post-processed pair.

    truncate:  g_pm(x) = lambda_pm * (f_pm * K_sigma)(x)
    randomize: g_pm(x) = p_pm * (f_pm * K_sigma)(x) + lambda_pm

    The ratio (g_+ - g_-)/(g_+ + g_-) is the bounded regression function and
    (1/2) log(g_+/g_-) the log-likelihood ratio used by the bound machinery.
    """

    scenario: Scenario
    config: MechanismConfig
    lambda_plus: float
    lambda_minus: float
    quadrature: QuadratureSpec = DEFAULT_QUADRATURE

    @property
    def mode(self) -> str:
        return self.config.mode

    def g_derivative(self, sign: int, order: int, x: float) -> float:
        law = self.scenario.law_plus if sign > 0 else self.scenario.law_minus
        lam = self.lambda_plus if sign > 0 else self.lambda_minus
        p = self.scenario.prior_p if sign > 0 else 1.0 - self.scenario.prior_p
        smooth = smoothed_density_derivative(law, self.config.sigma, order, x, self.quadrature)
        if self.mode == "truncate":
            return lam * smooth
        return p * smooth + (lam if order == 0 else 0.0)

    @property
    def g_plus(self) -> Callable[[float], float]:
        return lambda x: self.g_derivative(+1, 0, x)

    @property
    def g_minus(self) -> Callable[[float], float]:
        return lambda x: self.g_derivative(-1, 0, x)


def post_processed_law(
    scenario: Scenario,
    config: MechanismConfig,
    quadrature: QuadratureSpec = DEFAULT_QUADRATURE,
) -> PostProcessedLaw:
    lam_p, lam_m = lambdas(scenario, config, quadrature)
    return PostProcessedLaw(
        scenario=scenario,
        config=config,
        lambda_plus=lam_p,
        lambda_minus=lam_m,
        quadrature=quadrature,
    )


def eta_sigma(law: PostProcessedLaw, x: float) -> float:
    """Bounded regression function (g_+ - g_-)/(g_+ + g_-) at x."""
    gp = law.g_derivative(+1, 0, x)
    gm = law.g_derivative(-1, 0, x)
    den = gp + gm
    if not (den > 0.0 and math.isfinite(den)):
        raise SingularityError(f"g_+ + g_- = {den} at x={x}; ratio undefined")
    return (gp - gm) / den


def theta_sigma(law: PostProcessedLaw, x: float) -> float:
    """Log-likelihood ratio (1/2) log(g_+/g_-) at x."""
    gp = law.g_derivative(+1, 0, x)
    gm = law.g_derivative(-1, 0, x)
    if not (gp > 0.0 and gm > 0.0 and math.isfinite(gp) and math.isfinite(gm)):
        raise SingularityError(f"g_+={gp}, g_-={gm} at x={x}; log ratio undefined")
    return 0.5 * math.log(gp / gm)


def _g_stack(law: PostProcessedLaw, x: float, up_to: int) -> tuple[list[float], list[float]]:
    gp = [law.g_derivative(+1, j, x) for j in range(up_to + 1)]
    gm = [law.g_derivative(-1, j, x) for j in range(up_to + 1)]
    return gp, gm


def eta_derivative(law: PostProcessedLaw, order: int, x: float) -> float:
    """Closed-form derivative of (g_+ - g_-)/(g_+ + g_-), orders 0 to 3.

    With D = g_+ + g_-:
      eta'   = 2 (g_+' g_- - g_+ g_-') / D^2
      eta''  = 2 (g_+'' g_- - g_+ g_-'') / D^2 - 2 eta' D'/D
      eta''' = 2 (g_+''' g_- + g_+'' g_-' - g_+' g_-'' - g_+ g_-''') / D^2
               - 4 eta'' D'/D - 2 eta' D''/D - 2 eta' (D'/D)^2
    """
    if order == 0:
        return eta_sigma(law, x)
    if order not in (1, 2, 3):
        raise DomainError(f"derivative order must be 0 to 3, got {order}")
    P, M = _g_stack(law, x, order)
    D = P[0] + M[0]
    if not (D > 0.0 and math.isfinite(D)):
        raise SingularityError(f"g_+ + g_- = {D} at x={x}; derivative undefined")
    e1 = 2.0 * (P[1] * M[0] - P[0] * M[1]) / D**2
    if order == 1:
        return e1
    Dd = P[1] + M[1]
    e2 = 2.0 * (P[2] * M[0] - P[0] * M[2]) / D**2 - 2.0 * e1 * Dd / D
    if order == 2:
        return e2
    Ddd = P[2] + M[2]
    return (
        2.0 * (P[3] * M[0] + P[2] * M[1] - P[1] * M[2] - P[0] * M[3]) / D**2
        - 4.0 * e2 * Dd / D
        - 2.0 * e1 * Ddd / D
        - 2.0 * e1 * (Dd / D) ** 2
    )


def theta_derivative(law: PostProcessedLaw, order: int, x: float) -> float:
    """Closed-form derivative of (1/2) log(g_+/g_-), orders 0 to 3.

      2 theta'   = g_+'/g_+ - g_-'/g_-
      2 theta''  = [g_+''/g_+ - (g_+'/g_+)^2] - [g_-''/g_- - (g_-'/g_-)^2]
      2 theta''' = [g_+'''/g_+ - 3 g_+' g_+''/g_+^2 + 2 (g_+'/g_+)^3] - [same for g_-]
    """
    if order == 0:
        return theta_sigma(law, x)
    if order not in (1, 2, 3):
        raise DomainError(f"derivative order must be 0 to 3, got {order}")
    P, M = _g_stack(law, x, order)
    if not (P[0] > 0.0 and M[0] > 0.0):
        raise SingularityError(f"g_+={P[0]}, g_-={M[0]} at x={x}; derivative undefined")

    def side(g: list[float]) -> float:
        u1 = g[1] / g[0]
        if order == 1:
            return u1
        if order == 2:
            return g[2] / g[0] - u1**2
        return g[3] / g[0] - 3.0 * g[1] * g[2] / g[0] ** 2 + 2.0 * u1**3

    return 0.5 * (side(P) - side(M))


_TARGETS = {"eta": ("truncate", eta_derivative), "theta": ("randomize", theta_derivative)}


def derivative_l1_norms(
    target: str,
    scenario: Scenario,
    config: MechanismConfig,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> tuple[float, float, float]:
    """L1 norms (n1, n2, n3) of the first three derivatives of the target
    function, integrated over the window [-(r + c*sigma), r + c*sigma] with
    c = spec.infinite_cutoff_sigmas.

    target "eta" applies to truncation, "theta" to randomization; a mode
    mismatch is rejected.
    """
    if target not in _TARGETS:
        raise DomainError(f"target must be 'eta' or 'theta', got {target!r}")
    required_mode, deriv = _TARGETS[target]
    if config.mode != required_mode:
        raise DomainError(
            f"target {target!r} requires mode {required_mode!r}, got {config.mode!r}"
        )
    law = post_processed_law(scenario, config, spec)
    w = config.r + spec.infinite_cutoff_sigmas * config.sigma
    # Panel decomposition keeps the adaptive subdivisions local to the
    # integrable-singularity-free pieces of |derivative|.
    n_panels = int(min(256, max(16, math.ceil(2.0 * w / config.sigma))))
    edges = np.linspace(-w, w, n_panels + 1)
    norms = []
    for j in (1, 2, 3):
        total = 0.0
        for a, b in zip(edges[:-1], edges[1:]):
            total += integrate(lambda t: abs(deriv(law, j, t)), float(a), float(b), spec)
        norms.append(total)
    return (norms[0], norms[1], norms[2])
