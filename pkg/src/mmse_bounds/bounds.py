"""Finite-sample MMSE lower bounds from empirical losses.

The chain is: an empirical loss from the estimator module, minus a
concentration margin epsilon, is a high-probability lower bound on the MMSE
of the label given the post-processed observation; a quarter of that bounds
the error probability of any decision rule. The epsilon depends on which
network class was fit:

* identity output: epsilon = 2 (1+C)^2 sqrt(2 log(1/delta) / n)
  + 4 C^2 / k + 8 C / sqrt(k);
* tanh output: epsilon = 2 sqrt(2 log(1/delta) / n)
  + 4 C^2 / k + 8 C / sqrt(k),

where C is a Barron-constant bound for the regression target on [-r, r]
(the ``scaled_bound`` of a report from the barron module) and delta is the
failure probability.

``exact_mmse`` computes the ground-truth MMSE of the post-processed pair by
quadrature, for calibrating the certificates on synthetic scenarios.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .barron import BarronBoundReport
from .mechanism import MechanismConfig, out_of_range_prob, smoothed_density_derivative
from .scenario import Scenario
from .special_math import DEFAULT_QUADRATURE, DomainError, QuadratureSpec, integrate

__all__ = [
    "PATHS",
    "ValidityError",
    "epsilon_identity",
    "epsilon_tanh",
    "LowerBoundCertificate",
    "certify",
    "exact_mmse",
]

PATHS = ("identity_eta", "tanh_theta")


class ValidityError(RuntimeError):
    """The Barron report's side condition failed and overrides were not set."""


def _check_common(barron_constant: float, k: int, n: int, delta: float) -> None:
    if not (barron_constant >= 0.0 and math.isfinite(barron_constant)):
        raise DomainError(f"barron_constant must be finite and nonnegative, got {barron_constant}")
    if k < 1:
        raise DomainError(f"k must be at least 1, got {k}")
    if n < 1:
        raise DomainError(f"n must be at least 1, got {n}")
    if not (0.0 < delta < 1.0):
        raise DomainError(f"delta must lie in (0, 1), got {delta}")


def epsilon_identity(barron_constant: float, k: int, n: int, delta: float) -> float:
    """Concentration margin for the identity-output network class."""
    _check_common(barron_constant, k, n, delta)
    c = barron_constant
    return (
        2.0 * (1.0 + c) ** 2 * math.sqrt(2.0 * math.log(1.0 / delta) / n)
        + 4.0 * c**2 / k
        + 8.0 * c / math.sqrt(k)
    )


def epsilon_tanh(barron_constant: float, k: int, n: int, delta: float) -> float:
    """Concentration margin for the tanh-output network class.

    The deviation term is free of the Barron constant because the squared
    loss of the clipped class is bounded by 4 regardless of the target.
    """
    _check_common(barron_constant, k, n, delta)
    c = barron_constant
    return (
        2.0 * math.sqrt(2.0 * math.log(1.0 / delta) / n)
        + 4.0 * c**2 / k
        + 8.0 * c / math.sqrt(k)
    )


@dataclass(frozen=True)
class LowerBoundCertificate:
    """A finite-sample lower bound on the MMSE of the post-processed pair.

    ``lower_bound = max(estimator_value - epsilon, 0)`` holds with
    probability at least 1 - delta; ``perror_lower`` is the induced bound on
    the error probability of any decision rule.
    """

    estimator_value: float
    epsilon: float
    lower_bound: float
    delta: float
    k: int
    n: int
    barron_bound_used: float
    path: str

    @property
    def perror_lower(self) -> float:
        return 0.25 * self.lower_bound


def certify(
    estimate: float,
    k: int,
    n: int,
    delta: float,
    barron_report: BarronBoundReport,
    path: str,
    *,
    allow_invalid: bool = False,
) -> LowerBoundCertificate:
    """Assemble a lower-bound certificate from an empirical loss and a
    Barron-constant report.

    ``path`` selects the epsilon formula: "identity_eta" for the
    identity-output class (truncation route), "tanh_theta" for the
    tanh-output class (randomization route). Reports whose large-noise side
    condition failed are rejected unless ``allow_invalid`` is set, in which
    case the unconditional bound value they carry is used as-is.
    """
    if path not in PATHS:
        raise DomainError(f"path must be one of {PATHS}, got {path!r}")
    if not (estimate >= 0.0 and math.isfinite(estimate)):
        raise DomainError(f"estimate must be finite and nonnegative, got {estimate}")
    if not barron_report.valid and not allow_invalid:
        raise ValidityError(
            f"Barron report at sigma={barron_report.sigma:g} fails its validity "
            "condition; pass allow_invalid=True to certify with the unconditional bound"
        )
    c = barron_report.scaled_bound
    if path == "identity_eta":
        eps = epsilon_identity(c, k, n, delta)
    else:
        eps = epsilon_tanh(c, k, n, delta)
    return LowerBoundCertificate(
        estimator_value=float(estimate),
        epsilon=eps,
        lower_bound=max(float(estimate) - eps, 0.0),
        delta=delta,
        k=k,
        n=n,
        barron_bound_used=c,
        path=path,
    )


def exact_mmse(
    scenario: Scenario,
    config: MechanismConfig,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> float:
    """Ground-truth MMSE of the label given the post-processed observation.

    Writing a and b for the joint densities of (X-tilde, Y = +1) and
    (X-tilde, Y = -1) on [-r, r], the MMSE is 1 - integral (a-b)^2 / (a+b).
    Truncation conditions on the observation surviving, so the class
    densities are renormalized and the prior is tilted by the per-class
    survival probabilities; the common tilt cancels into a single factor.
    Randomization folds the escaped mass back as a uniform layer on [-r, r].
    """
    p = scenario.prior_p
    pbar = 1.0 - p
    sigma, r = config.sigma, config.r
    qp, qm = out_of_range_prob(scenario, config, spec)

    def f_plus(x: float) -> float:
        return smoothed_density_derivative(scenario.law_plus, sigma, 0, x, spec)

    def f_minus(x: float) -> float:
        return smoothed_density_derivative(scenario.law_minus, sigma, 0, x, spec)

    if config.mode == "truncate":
        z = p * (1.0 - qp) + pbar * (1.0 - qm)
        if z <= 0.0:
            raise DomainError("truncation keeps no mass; the post-processed pair is undefined")

        def integrand(x: float) -> float:
            a = p * f_plus(x)
            b = pbar * f_minus(x)
            return (a - b) ** 2 / ((a + b) * z)

    else:
        up = qp / (2.0 * r)
        um = qm / (2.0 * r)

        def integrand(x: float) -> float:
            a = p * (f_plus(x) + up)
            b = pbar * (f_minus(x) + um)
            return (a - b) ** 2 / (a + b)

    peaks = [
        law.location
        for law in (scenario.law_plus, scenario.law_minus)
        if law.is_point_mass
    ]
    correlation = integrate(integrand, -r, r, spec, points=peaks or None)
    return min(max(1.0 - correlation, 0.0), 1.0)
