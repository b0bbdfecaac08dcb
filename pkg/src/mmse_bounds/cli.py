"""Command-line front end: config parsing, experiment orchestration, CSV output.

Subcommands
-----------
barron-sweep
    One row per noise level: the exact small-noise benchmark (where known),
    the truncation-route and randomization-route closed-form bounds with
    their validity flags, and the numeric-quadrature bounds for both routes.
estimate
    Full sampling -> mechanism -> empirical-minimization pipeline per noise
    level, reporting the step-function (DP) and gradient-descent losses.
certify
    The estimate pipeline plus a concentration margin and a Barron-constant
    bound, yielding a per-row MMSE lower bound next to the exact-MMSE oracle.
validate
    Fast self-checks (closed forms vs quadrature, DP vs brute force,
    gradient and derivative finite differences) with a pass/fail report.

All subcommands take ``--config <json>``, ``--out <path>``, ``--seed <u64>``
and ``--threads <n>``. Rows are computed per sigma index on a process pool
when threads > 1 and always emitted in grid order, so parallel and serial
runs produce byte-identical CSVs. Floats are written with 12 significant
digits; missing or invalid values become the literal token NA. Exit codes:
0 success, 2 config error, 3 numerical failure, 4 validation failure.
Set MMSE_BOUNDS_LOG=debug|info|warning to adjust stderr logging.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import estimator
from .barron import (
    bound_numeric_route,
    bound_randomization,
    bound_truncation,
    exact_benchmark,
    moment_bounds_overlapping,
    moment_bounds_separated,
)
from .bounds import certify, exact_mmse
from .estimator import TieError, TrainingProtocol
from .mechanism import (
    DegenerateMechanismError,
    DegenerateSampleError,
    MechanismConfig,
    apply_mechanism,
    lambdas,
)
from .scenario import Scenario, make_law, sample_raw, support_geometry
from .special_math import (
    DEFAULT_QUADRATURE,
    DomainError,
    QuadratureError,
    integrate,
    kernel_derivative,
    kernel_derivative_norms,
)

__all__ = ["main", "ConfigError", "derive_seed"]

log = logging.getLogger("mmse_bounds")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_VALIDATION = 4

_NUMERICAL_ERRORS = (
    DomainError,
    QuadratureError,
    DegenerateMechanismError,
    DegenerateSampleError,
    TieError,
    estimator.InitializationError,
    FloatingPointError,
    OverflowError,
    ZeroDivisionError,
)


class ConfigError(ValueError):
    """Invalid or inconsistent configuration; the message names the field."""


# ---------------------------------------------------------------------------
# seed derivation

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


def _splitmix64(z: int) -> int:
    z &= _MASK64
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 & _MASK64
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB & _MASK64
    return z ^ (z >> 31)


def derive_seed(master: int, index: int) -> int:
    """Stream seed for a (row, purpose) slot: splitmix64 of the master seed
    advanced along the Weyl sequence. Rows use four slots each: sampling,
    mechanism, training, perturbation."""
    return _splitmix64((master + _GAMMA * (index + 1)) & _MASK64)


_SLOTS_PER_ROW = 4
_SLOT_SAMPLING, _SLOT_MECHANISM, _SLOT_TRAINING, _SLOT_PERTURB = range(_SLOTS_PER_ROW)


def _row_seed(master: int, row: int, slot: int) -> int:
    return derive_seed(master, _SLOTS_PER_ROW * row + slot)


# ---------------------------------------------------------------------------
# config resolution

_DEFAULT_SCENARIO = {
    "prior_p": 0.5,
    "plus": {"kind": "point_mass", "location": 1.0},
    "minus": {"kind": "point_mass", "location": -1.0},
}
_DEFAULT_GRID = {"start": 4.25, "stop": 20.0, "step": 0.25}


def _expect_mapping(cfg, key: str) -> dict:
    value = cfg.get(key, {})
    if not isinstance(value, dict):
        raise ConfigError(f"{key}: expected an object, got {type(value).__name__}")
    return value


def _build_scenario(cfg: dict) -> Scenario:
    sc = cfg.get("scenario", _DEFAULT_SCENARIO)
    if not isinstance(sc, dict):
        raise ConfigError("scenario: expected an object")
    try:
        plus = make_law(sc.get("plus", _DEFAULT_SCENARIO["plus"]))
        minus = make_law(sc.get("minus", _DEFAULT_SCENARIO["minus"]))
        return Scenario(
            prior_p=float(sc.get("prior_p", 0.5)), law_plus=plus, law_minus=minus
        )
    except (DomainError, KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"scenario: {exc}") from exc


def _sigma_grid(cfg: dict) -> list[float]:
    mech = _expect_mapping(cfg, "mechanism")
    spec = mech.get("sigma", _DEFAULT_GRID)
    if isinstance(spec, dict):
        try:
            start, stop = float(spec["start"]), float(spec["stop"])
            step = float(spec["step"])
        except KeyError as exc:
            raise ConfigError(f"mechanism.sigma: range needs {exc.args[0]}") from exc
        if step <= 0.0 or stop < start:
            raise ConfigError("mechanism.sigma: need step > 0 and stop >= start")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        grid = [start + i * step for i in range(count)]
    elif isinstance(spec, (list, tuple)):
        grid = [float(s) for s in spec]
    else:
        grid = [float(spec)]
    if not grid:
        raise ConfigError("mechanism.sigma: empty grid")
    if any(not (s > 0.0 and math.isfinite(s)) for s in grid):
        raise ConfigError("mechanism.sigma: values must be positive and finite")
    return grid


def _mech_config(cfg: dict, sigma: float) -> MechanismConfig:
    mech = _expect_mapping(cfg, "mechanism")
    try:
        return MechanismConfig(
            sigma=sigma,
            r=float(mech.get("r", 2.0)),
            mode=mech.get("mode", "randomize"),
        )
    except DomainError as exc:
        raise ConfigError(f"mechanism: {exc}") from exc


def _estimator_cfg(cfg: dict) -> dict:
    est = _expect_mapping(cfg, "estimator")
    n = int(est.get("n", 10_000))
    if n < 1:
        raise ConfigError("estimator.n: must be at least 1")
    k_spec = est.get("k", {"rule": "n_over_100"})
    if isinstance(k_spec, dict):
        rule = k_spec.get("rule")
        if rule != "n_over_100":
            raise ConfigError(f"estimator.k.rule: unknown rule {rule!r}")
        k = n // 100
    else:
        k = int(k_spec)
    if not (0 <= k <= n):
        raise ConfigError(f"estimator.k: need 0 <= k <= n, got k={k}, n={n}")
    overrides = est.get("protocol", {})
    if not isinstance(overrides, dict):
        raise ConfigError("estimator.protocol: expected an object")
    try:
        protocol = TrainingProtocol(**overrides)
    except (TypeError, DomainError) as exc:
        raise ConfigError(f"estimator.protocol: {exc}") from exc
    return {
        "n": n,
        "k": k,
        "protocol": protocol,
        "seed": int(est.get("seed", 0)),
        "use_gd": bool(est.get("use_gd", True)),
        "use_dp": bool(est.get("use_dp", True)),
        "perturb_duplicates": bool(est.get("perturb_duplicates", False)),
    }


def _bound_cfg(cfg: dict) -> dict:
    bnd = _expect_mapping(cfg, "bound")
    path = bnd.get("path", "tanh_theta")
    if path not in ("identity_eta", "tanh_theta"):
        raise ConfigError(f"bound.path: unknown path {path!r}")
    delta = float(bnd.get("delta", 0.05))
    if not (0.0 < delta < 1.0):
        raise ConfigError(f"bound.delta: must lie in (0, 1), got {delta}")
    gamma = bnd.get("gamma")
    if gamma is not None:
        gamma = float(gamma)
    return {
        "path": path,
        "delta": delta,
        "gamma": gamma,
        "allow_invalid": bool(bnd.get("allow_invalid", False)),
    }


def _is_symmetric_unit_scenario(scenario: Scenario) -> bool:
    return (
        scenario.prior_p == 0.5
        and scenario.law_plus.is_point_mass
        and scenario.law_minus.is_point_mass
        and scenario.law_plus.location == 1.0
        and scenario.law_minus.location == -1.0
    )


# ---------------------------------------------------------------------------
# row workers (module-level: they cross process boundaries)


def _truncation_report(scenario: Scenario, sigma: float, r: float, gamma_cfg):
    """Truncation route: geometry plus truncation lambdas, or None when the
    scenario's supports do not separate and no margin was configured."""
    geom = support_geometry(scenario, gamma=gamma_cfg, quadrature=DEFAULT_QUADRATURE)
    if geom.kind == "none":
        return None
    config = MechanismConfig(sigma=sigma, r=r, mode="truncate")
    lam_p, lam_m = lambdas(scenario, config, DEFAULT_QUADRATURE)
    if geom.kind == "separated":
        m0, m1, m2 = moment_bounds_separated(sigma, geom.gamma, lam_p, lam_m)
    else:
        m0, m1, m2 = moment_bounds_overlapping(
            sigma, geom.gamma, geom.gamma0, lam_p, lam_m, geom.delta_plus, geom.delta_minus
        )
    return bound_truncation(sigma, m0, m1, m2, r=r)


def _randomization_report(scenario: Scenario, sigma: float, r: float):
    config = MechanismConfig(sigma=sigma, r=r, mode="randomize")
    lam_p, lam_m = lambdas(scenario, config, DEFAULT_QUADRATURE)
    return bound_randomization(sigma, scenario.prior_p, lam_p, lam_m, r=r)


def _barron_row(args) -> list:
    cfg, row, sigma, _master = args
    scenario = _build_scenario(cfg)
    mech = _expect_mapping(cfg, "mechanism")
    r = float(mech.get("r", 2.0))
    gamma_cfg = _bound_cfg(cfg)["gamma"]

    benchmark = r * exact_benchmark(sigma) if _is_symmetric_unit_scenario(scenario) else None

    thm5_bound, thm5_valid = None, None
    try:
        report5 = _truncation_report(scenario, sigma, r, gamma_cfg)
    except DegenerateMechanismError:
        report5 = None
    if report5 is not None:
        thm5_valid = report5.valid
        thm5_bound = report5.scaled_bound if report5.valid else None

    thm6_bound, thm6_valid = None, None
    try:
        report6 = _randomization_report(scenario, sigma, r)
    except DegenerateMechanismError:
        report6 = None
    if report6 is not None:
        thm6_valid = report6.valid
        thm6_bound = report6.scaled_bound if report6.valid else None

    numeric_eta = bound_numeric_route(
        "eta", scenario, MechanismConfig(sigma=sigma, r=r, mode="truncate")
    ).scaled_bound
    numeric_theta = bound_numeric_route(
        "theta", scenario, MechanismConfig(sigma=sigma, r=r, mode="randomize")
    ).scaled_bound

    return [sigma, benchmark, thm5_bound, thm5_valid, thm6_bound, thm6_valid,
            numeric_eta, numeric_theta]


def _run_pipeline(cfg: dict, row: int, sigma: float, master: int) -> dict:
    """sampling -> mechanism -> (perturbation) -> empirical minimization."""
    scenario = _build_scenario(cfg)
    config = _mech_config(cfg, sigma)
    est = _estimator_cfg(cfg)

    raw = sample_raw(scenario, est["n"], _row_seed(master, row, _SLOT_SAMPLING))
    post = apply_mechanism(raw, config, _row_seed(master, row, _SLOT_MECHANISM))
    if est["perturb_duplicates"] and len(post) > 1:
        rng = np.random.Generator(
            np.random.Philox(key=np.uint64(_row_seed(master, row, _SLOT_PERTURB)))
        )
        magnitude = 1e-12 * float(np.ptp(post.x))
        post = type(post)(
            x=post.x + rng.uniform(-magnitude, magnitude, len(post)), y=post.y
        )

    dp_loss = gd_loss = None
    if est["use_dp"]:
        dp_loss, _ = estimator.dp_minimize(post, est["k"], return_witness=False)
    if est["use_gd"]:
        _, gd_loss = estimator.train_gd(
            post, est["k"], est["protocol"], _row_seed(master, row, _SLOT_TRAINING)
        )
    if dp_loss is None and gd_loss is None:
        raise ConfigError("estimator: at least one of use_dp/use_gd must be enabled")
    if gd_loss is None or (dp_loss is not None and dp_loss <= gd_loss):
        value, method = dp_loss, "dp"
    else:
        value, method = gd_loss, "gd"
    return {
        "scenario": scenario,
        "config": config,
        "est": est,
        "n_effective": len(post),
        "dp_loss": dp_loss,
        "gd_loss": gd_loss,
        "estimate": value,
        "method": method,
    }


def _estimate_row(args) -> list:
    cfg, row, sigma, master = args
    out = _run_pipeline(cfg, row, sigma, master)
    return [sigma, out["n_effective"], out["dp_loss"], out["gd_loss"],
            out["estimate"], out["method"]]


def _certify_row(args) -> list:
    cfg, row, sigma, master = args
    bound = _bound_cfg(cfg)
    out = _run_pipeline(cfg, row, sigma, master)
    scenario, config = out["scenario"], out["config"]

    if bound["path"] == "identity_eta":
        if config.mode != "truncate":
            raise ConfigError("bound.path identity_eta requires mechanism.mode truncate")
        report = _truncation_report(scenario, sigma, config.r, bound["gamma"])
        if report is None:
            raise ConfigError(
                "bound.path identity_eta needs separated supports or bound.gamma"
            )
    else:
        if config.mode != "randomize":
            raise ConfigError("bound.path tanh_theta requires mechanism.mode randomize")
        report = _randomization_report(scenario, sigma, config.r)

    oracle = exact_mmse(scenario, config)
    if not report.valid and not bound["allow_invalid"]:
        return [sigma, out["estimate"], None, None, None, oracle]
    cert = certify(
        out["estimate"],
        out["est"]["k"],
        out["n_effective"],
        bound["delta"],
        report,
        bound["path"],
        allow_invalid=bound["allow_invalid"],
    )
    return [sigma, cert.estimator_value, cert.barron_bound_used, cert.epsilon,
            cert.lower_bound, oracle]


# ---------------------------------------------------------------------------
# emission

_HEADERS = {
    "barron-sweep": ["sigma", "prop2_benchmark", "thm5_bound", "thm5_valid",
                     "thm6_bound", "thm6_valid", "numeric_eta", "numeric_theta"],
    "estimate": ["sigma", "n_effective", "dp_loss", "gd_loss", "estimate", "method"],
    "certify": ["sigma", "estimate", "barron_bound", "epsilon", "lower_bound",
                "oracle_mmse"],
}

_ROW_WORKERS = {
    "barron-sweep": _barron_row,
    "estimate": _estimate_row,
    "certify": _certify_row,
}


def _fmt(value) -> str:
    if value is None:
        return "NA"
    if isinstance(value, bool) or isinstance(value, np.bool_):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if math.isnan(v):
            return "NA"
        return format(v, ".12g")
    return str(value)


def _emit_csv(out_path, header: list[str], rows: list[list]) -> None:
    buffer = io.StringIO(newline="")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    text = buffer.getvalue()
    if out_path is None:
        sys.stdout.write(text)
    else:
        with open(out_path, "w", newline="") as handle:
            handle.write(text)


def _emit_manifest(out_path: str, command: str, cfg: dict, master: int, n_rows: int) -> None:
    import scipy

    manifest = {
        "command": command,
        "config": cfg,
        "seed": master,
        "rows": n_rows,
        "versions": {
            "python": sys.version.split()[0],
            "numpy": np.__version__,
            "scipy": scipy.__version__,
        },
    }
    with open(out_path + ".manifest.json", "w") as handle:
        json.dump(manifest, handle, indent=2, sort_keys=True)
        handle.write("\n")


def _run_grid(command: str, cfg: dict, out_path, master: int, threads: int) -> int:
    # resolve everything up front so config errors surface before any work
    _build_scenario(cfg)
    _estimator_cfg(cfg)
    _bound_cfg(cfg)
    grid = _sigma_grid(cfg)
    for sigma in grid:
        _mech_config(cfg, sigma)

    worker = _ROW_WORKERS[command]
    jobs = [(cfg, row, sigma, master) for row, sigma in enumerate(grid)]
    t0 = time.perf_counter()
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(worker, jobs))
    else:
        rows = [worker(job) for job in jobs]
    log.info("%s: %d rows in %.2fs", command, len(rows), time.perf_counter() - t0)

    _emit_csv(out_path, _HEADERS[command], rows)
    if out_path is not None and _expect_mapping(cfg, "output").get("manifest", False):
        _emit_manifest(out_path, command, cfg, master, len(rows))
    return EXIT_OK


# ---------------------------------------------------------------------------
# validate

def _check_kernel_norms() -> None:
    for sigma in (0.5, 1.0, 3.0):
        norms = kernel_derivative_norms(sigma)
        window = 14.0 * sigma

        def moment(order: int, power: float) -> float:
            return integrate(
                lambda x: abs(kernel_derivative(order, sigma, x)) ** power,
                -window, window, scale=sigma,
            )

        checks = [
            (moment(1, 1.0), norms.l1_d1),
            (moment(1, 2.0), norms.l2sq_d1),
            (moment(1, 3.0), norms.l3cu_d1),
            (math.sqrt(moment(2, 2.0)), norms.l2_d2),
        ]
        for numeric, closed in checks:
            if abs(numeric - closed) > 1e-7 * max(1.0, abs(closed)):
                raise AssertionError(
                    f"kernel norm mismatch at sigma={sigma}: {numeric} vs {closed}"
                )
        # the remaining two closed forms are one-sided bounds, not equalities
        if moment(2, 1.0) > norms.l1_d2_upper * (1.0 + 1e-9):
            raise AssertionError(f"second-derivative L1 bound violated at sigma={sigma}")
        if moment(3, 1.0) > norms.l1_d3_upper * (1.0 + 1e-9):
            raise AssertionError(f"third-derivative L1 bound violated at sigma={sigma}")


def _check_benchmark() -> None:
    # Fourier route: the transform magnitude of the small-noise posterior
    # mean's derivative is pi sigma^2 |w| csch(pi sigma^2 w / 2); its integral
    # over w, divided by 2 pi, must come out to 1 / sigma^2.
    for sigma in (1.0, 2.0, 5.0):
        c = sigma * sigma

        def magnitude(w: float) -> float:
            u = 0.5 * math.pi * c * w
            if u < 1e-8:
                return 2.0  # removable singularity: u / sinh(u) -> 1
            if u > 700.0:
                return 0.0
            return math.pi * c * w / math.sinh(u)

        numeric = (1.0 / math.pi) * integrate(
            magnitude, 0.0, math.inf, center=0.0, scale=4.0 / c
        )
        expected = exact_benchmark(sigma)
        if abs(numeric - expected) > 1e-6:
            raise AssertionError(
                f"benchmark mismatch at sigma={sigma}: {numeric} vs {expected}"
            )


def _check_dp_vs_brute(master: int) -> None:
    rng = np.random.Generator(np.random.Philox(key=np.uint64(derive_seed(master, 10_001))))
    for _ in range(60):
        n = int(rng.integers(3, 11))
        k = int(rng.integers(0, 4))
        x = rng.uniform(-2.0, 2.0, n)
        while len(np.unique(x)) < n:
            x = rng.uniform(-2.0, 2.0, n)
        y = rng.choice([-1.0, 1.0], n)
        samples = list(zip(x, y))
        dp, witness = estimator.dp_minimize(samples, k)
        brute = estimator.brute_force_stepfunctions(samples, k)
        if dp != brute:
            raise AssertionError(f"dp={dp} != brute={brute} at n={n}, k={k}")
        loss = estimator.step_loss(witness, samples)
        if abs(loss - dp) > 1e-12:
            raise AssertionError(f"witness loss {loss} != dp value {dp}")
        full, _ = estimator.dp_minimize(samples, n, return_witness=False)
        if full != 0.0:
            raise AssertionError(f"dp at k=n must memorize, got {full}")
    known = [(1.0, 1.0), (2.0, 1.0), (3.0, -1.0)]
    value, _ = estimator.dp_minimize(known, 1)
    if value != 0.0:
        raise AssertionError(f"separable instance must fit exactly, got {value}")
    alternating = [(1.0, 1.0), (2.0, -1.0), (3.0, 1.0)]
    value, _ = estimator.dp_minimize(alternating, 1)
    if abs(value - 2.0 / 3.0) > 1e-15:
        raise AssertionError(f"alternating instance must give 2/3, got {value}")


def _check_gradient(master: int) -> None:
    rng = np.random.Generator(np.random.Philox(key=np.uint64(derive_seed(master, 10_002))))
    for _ in range(12):
        k = int(rng.integers(1, 6))
        n = int(rng.integers(4, 24))
        params = estimator.NetworkParams(
            k=k,
            a=rng.normal(0, 1, k),
            b=rng.normal(0, 1, k),
            c=rng.normal(0, 1, k),
            c0=float(rng.normal(0, 1)),
        )
        samples = list(zip(rng.uniform(-2, 2, n), rng.choice([-1.0, 1.0], n)))
        grad = estimator.gradient(params, samples)
        h = 1e-5

        def loss_at(vec: np.ndarray) -> float:
            p = estimator.NetworkParams(
                k=k, a=vec[:k], b=vec[k:2 * k], c=vec[2 * k:3 * k], c0=vec[3 * k]
            )
            return estimator.empirical_loss(p, samples)

        theta = np.concatenate([params.a, params.b, params.c, [params.c0]])
        exact = np.concatenate([grad.a, grad.b, grad.c, [grad.c0]])
        for j in range(len(theta)):
            e = np.zeros_like(theta)
            e[j] = h
            fd = (loss_at(theta + e) - loss_at(theta - e)) / (2 * h)
            scale = max(abs(fd), abs(exact[j]), 1e-8)
            if abs(fd - exact[j]) / scale > 1e-5:
                raise AssertionError(
                    f"gradient component {j}: analytic {exact[j]} vs fd {fd}"
                )


def _check_derivative_formulas() -> None:
    from .mechanism import eta_derivative, post_processed_law, theta_derivative

    scenario = Scenario(
        prior_p=0.5,
        law_plus=make_law({"kind": "point_mass", "location": 0.6}),
        law_minus=make_law({"kind": "point_mass", "location": -0.6}),
    )
    cases = [
        ("eta", "truncate", eta_derivative),
        ("theta", "randomize", theta_derivative),
    ]
    for _, mode, derivative in cases:
        config = MechanismConfig(sigma=1.2, r=2.0, mode=mode)
        law = post_processed_law(scenario, config)
        for order in (1, 2, 3):
            for x in (-0.9, 0.3, 1.1):
                h = 1e-3
                def prev(t: float, _o=order) -> float:
                    return derivative(law, _o - 1, t)
                coarse = (prev(x + h) - prev(x - h)) / (2 * h)
                fine = (prev(x + h / 2) - prev(x - h / 2)) / h
                fd = (4.0 * fine - coarse) / 3.0
                closed = derivative(law, order, x)
                scale = max(abs(closed), abs(fd), 1e-9)
                if abs(closed - fd) / scale > 1e-4:
                    raise AssertionError(
                        f"{mode} order {order} at x={x}: closed {closed} vs fd {fd}"
                    )


def cmd_validate(out_path, master: int) -> int:
    suites = [
        ("kernel_norms", _check_kernel_norms),
        ("prop2_benchmark", _check_benchmark),
        ("dp_vs_brute", lambda: _check_dp_vs_brute(master)),
        ("gradient_check", lambda: _check_gradient(master)),
        ("derivative_formulas", _check_derivative_formulas),
    ]
    lines = []
    failures = 0
    for name, check in suites:
        t0 = time.perf_counter()
        try:
            check()
            status = "PASS"
        except Exception as exc:  # report and continue: the suite is a survey
            status = "FAIL"
            failures += 1
            log.error("%s: %s", name, exc)
        lines.append(f"{name}: {status} ({time.perf_counter() - t0:.2f}s)")
    lines.append(f"validate: {len(suites) - failures}/{len(suites)} suites passed")
    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    if out_path is not None:
        with open(out_path, "w") as handle:
            handle.write(text)
    return EXIT_OK if failures == 0 else EXIT_VALIDATION


# ---------------------------------------------------------------------------
# entry point

def _setup_logging() -> None:
    level_name = os.environ.get("MMSE_BOUNDS_LOG", "warning").upper()
    level = getattr(logging, level_name, logging.WARNING)
    logging.basicConfig(level=level, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


def _load_config(path) -> dict:
    if path is None:
        return {}
    try:
        with open(path) as handle:
            cfg = json.load(handle)
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config: invalid JSON in {path}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config: top level must be an object")
    return cfg


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mmse-bounds",
        description="MMSE lower bounds for noise-sanitized binary attributes",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("barron-sweep", "closed-form and numeric Barron-constant bounds per sigma"),
        ("estimate", "sampling/mechanism/empirical-minimization pipeline per sigma"),
        ("certify", "estimate plus concentration margin: MMSE lower bounds"),
        ("validate", "fast self-checks with a pass/fail report"),
    ):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", metavar="PATH", default=None,
                         help="JSON experiment config (default: built-in defaults)")
        cmd.add_argument("--out", metavar="PATH", default=None,
                         help="output file (default: config output.path, else stdout)")
        cmd.add_argument("--seed", metavar="U64", type=int, default=None,
                         help="master seed (default: config estimator.seed, else 0)")
        cmd.add_argument("--threads", metavar="N", type=int, default=None,
                         help="worker processes (default: config parallelism, else 1)")
    return parser


def main(argv=None) -> int:
    _setup_logging()
    args = _parser().parse_args(argv)
    try:
        cfg = _load_config(args.config)
        out_path = args.out
        if out_path is None:
            out_path = _expect_mapping(cfg, "output").get("path")
        master = args.seed
        if master is None:
            master = int(_expect_mapping(cfg, "estimator").get("seed", 0))
        if not (0 <= master <= _MASK64):
            raise ConfigError("seed: must fit in an unsigned 64-bit integer")
        threads = args.threads
        if threads is None:
            threads = int(cfg.get("parallelism", 1))
        if threads < 1:
            raise ConfigError("threads: must be at least 1")

        if args.command == "validate":
            return cmd_validate(out_path, master)
        return _run_grid(args.command, cfg, out_path, master, threads)
    except ConfigError as exc:
        log.error("%s", exc)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except _NUMERICAL_ERRORS as exc:
        log.error("%s", exc)
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
