"""Empirical square-loss minimization for the two-layer network estimator.

Two complementary minimizers feed the MMSE estimate:

* gradient descent on the two-layer tanh network (random restarts, retrying
  initializations until the starting loss is below a threshold, keeping the
  best iterate seen);
* exact minimization over three-level step functions with at most k
  thresholds, by an O(kn) dynamic program over (threshold count, level,
  sorted sample index), with a brute-force enumerator as an independent
  cross-check at small sizes.

The estimate is the smaller of the two losses; the step-function minimum is a
certified upper bound and empirically dominates plain gradient descent by a
wide margin in the noisy regimes this package targets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations, product

import numpy as np

from .scenario import SampleSet, as_sample_set
from .special_math import DomainError

__all__ = [
    "NetworkParams",
    "StepFunction",
    "TrainingProtocol",
    "DEFAULT_PROTOCOL",
    "TieError",
    "SizeError",
    "InitializationError",
    "forward",
    "empirical_loss",
    "gradient",
    "train_gd",
    "step_loss",
    "dp_minimize",
    "brute_force_stepfunctions",
    "mmse_star_estimate",
]

_LEVELS = (-1.0, 0.0, 1.0)


class TieError(ValueError):
    """Duplicate x values: the step-function minimizer needs distinct points."""


class SizeError(ValueError):
    """The brute-force enumerator only runs at small problem sizes."""


class InitializationError(RuntimeError):
    """No random initialization reached the required starting loss.

    Carries the best attempt so callers can inspect how close it came.
    """

    def __init__(self, message: str, best_params: "NetworkParams", best_loss: float):
        super().__init__(message)
        self.best_params = best_params
        self.best_loss = best_loss


@dataclass(frozen=True)
class TrainingProtocol:
    """Gradient-descent settings: initialization scale and retry rule, fixed
    step size and iteration count, and the number of random restarts."""

    init_stddev: float = 0.01
    init_retry_loss_threshold: float = 1.0
    gd_iterations: int = 100
    step_size: float = 0.1
    restarts: int = 5
    max_init_attempts: int = 1000

    def __post_init__(self) -> None:
        if not (self.init_stddev > 0.0 and math.isfinite(self.init_stddev)):
            raise DomainError(f"init_stddev must be positive, got {self.init_stddev}")
        if not (self.init_retry_loss_threshold > 0.0):
            raise DomainError(
                f"init_retry_loss_threshold must be positive, got {self.init_retry_loss_threshold}"
            )
        if self.gd_iterations < 0:
            raise DomainError(f"gd_iterations must be nonnegative, got {self.gd_iterations}")
        if not (self.step_size > 0.0 and math.isfinite(self.step_size)):
            raise DomainError(f"step_size must be positive, got {self.step_size}")
        if self.restarts < 1:
            raise DomainError(f"restarts must be at least 1, got {self.restarts}")
        if self.max_init_attempts < 1:
            raise DomainError(f"max_init_attempts must be at least 1, got {self.max_init_attempts}")


DEFAULT_PROTOCOL = TrainingProtocol()

_ACTIVATIONS = ("identity", "tanh")


@dataclass(frozen=True)
class NetworkParams:
    """Weights of the two-layer network x -> act(sum_l c_l tanh(a_l x + b_l) + c0)."""

    k: int
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    c0: float
    output_activation: str = "tanh"

    def __post_init__(self) -> None:
        if self.k < 0:
            raise DomainError(f"k must be nonnegative, got {self.k}")
        if self.output_activation not in _ACTIVATIONS:
            raise DomainError(
                f"output_activation must be one of {_ACTIVATIONS}, got {self.output_activation!r}"
            )
        for name in ("a", "b", "c"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != (self.k,):
                raise DomainError(f"{name} must have shape ({self.k},), got {arr.shape}")
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "c0", float(self.c0))


def forward(params: NetworkParams, x):
    """Network output at x (scalar or 1-D array)."""
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    hidden = np.tanh(np.outer(xa, params.a) + params.b)
    out = hidden @ params.c + params.c0
    if params.output_activation == "tanh":
        out = np.tanh(out)
    if np.ndim(x) == 0:
        return float(out[0])
    return out


def empirical_loss(params: NetworkParams, samples) -> float:
    """Mean squared error (1/n) sum (y_i - f(x_i))^2."""
    ss = as_sample_set(samples)
    if len(ss) == 0:
        raise DomainError("empirical loss needs at least one sample")
    residual = ss.y - forward(params, ss.x)
    return float(np.mean(residual**2))


def gradient(params: NetworkParams, samples) -> NetworkParams:
    """Exact gradient of the empirical loss, packaged parameter-shaped."""
    ss = as_sample_set(samples)
    if len(ss) == 0:
        raise DomainError("gradient needs at least one sample")
    n = len(ss)
    hidden = np.tanh(np.outer(ss.x, params.a) + params.b)  # (n, k)
    pre = hidden @ params.c + params.c0
    if params.output_activation == "tanh":
        out = np.tanh(pre)
        dpre = -2.0 * (ss.y - out) * (1.0 - out**2) / n
    else:
        dpre = -2.0 * (ss.y - pre) / n
    dc0 = float(dpre.sum())
    dc = hidden.T @ dpre
    through = dpre[:, None] * (params.c[None, :] * (1.0 - hidden**2))  # (n, k)
    da = through.T @ ss.x
    db = through.sum(axis=0)
    return NetworkParams(
        k=params.k, a=da, b=db, c=dc, c0=dc0, output_activation=params.output_activation
    )


def _step(params: NetworkParams, grad: NetworkParams, step_size: float) -> NetworkParams:
    return NetworkParams(
        k=params.k,
        a=params.a - step_size * grad.a,
        b=params.b - step_size * grad.b,
        c=params.c - step_size * grad.c,
        c0=params.c0 - step_size * grad.c0,
        output_activation=params.output_activation,
    )


def train_gd(
    samples,
    k: int,
    protocol: TrainingProtocol = DEFAULT_PROTOCOL,
    seed: int = 0,
    output_activation: str = "tanh",
) -> tuple[NetworkParams, float]:
    """Random-restart gradient descent; returns the best iterate overall.

    Each restart redraws N(0, init_stddev^2) weights until the starting loss
    drops below the retry threshold (raising InitializationError when the
    attempt budget runs out), then runs the fixed-step iterations. The best
    (params, loss) across every evaluated iterate of every restart is
    returned, so the result never exceeds its own initialization's loss.
    """
    ss = as_sample_set(samples)
    if len(ss) == 0:
        raise DomainError("training needs at least one sample")
    if k < 0:
        raise DomainError(f"k must be nonnegative, got {k}")
    rng = np.random.Generator(np.random.Philox(key=np.uint64(seed)))
    best_params: NetworkParams | None = None
    best_loss = math.inf
    for _ in range(protocol.restarts):
        attempt_params: NetworkParams | None = None
        attempt_loss = math.inf
        start: NetworkParams | None = None
        start_loss = math.inf
        for _ in range(protocol.max_init_attempts):
            cand = NetworkParams(
                k=k,
                a=rng.normal(0.0, protocol.init_stddev, k),
                b=rng.normal(0.0, protocol.init_stddev, k),
                c=rng.normal(0.0, protocol.init_stddev, k),
                c0=rng.normal(0.0, protocol.init_stddev),
                output_activation=output_activation,
            )
            loss = empirical_loss(cand, ss)
            if loss < attempt_loss:
                attempt_params, attempt_loss = cand, loss
            if loss < protocol.init_retry_loss_threshold:
                start, start_loss = cand, loss
                break
        if start is None:
            raise InitializationError(
                f"no initialization reached loss < {protocol.init_retry_loss_threshold} "
                f"within {protocol.max_init_attempts} attempts (best {attempt_loss:.6g})",
                best_params=attempt_params,
                best_loss=attempt_loss,
            )
        params, loss = start, start_loss
        if loss < best_loss:
            best_params, best_loss = params, loss
        for _ in range(protocol.gd_iterations):
            params = _step(params, gradient(params, ss), protocol.step_size)
            loss = empirical_loss(params, ss)
            if loss < best_loss:
                best_params, best_loss = params, loss
    return best_params, best_loss


@dataclass(frozen=True)
class StepFunction:
    """Right-continuous step function with values in {-1, 0, +1}.

    ``levels`` has one more entry than ``thresholds``; the function takes
    value levels[j] on [thresholds[j-1], thresholds[j]).
    """

    levels: tuple[float, ...]
    thresholds: tuple[float, ...]

    def __post_init__(self) -> None:
        levels = tuple(float(v) for v in self.levels)
        thresholds = tuple(float(t) for t in self.thresholds)
        if len(levels) != len(thresholds) + 1:
            raise DomainError(
                f"need len(levels) == len(thresholds) + 1, got {len(levels)} and {len(thresholds)}"
            )
        if any(v not in _LEVELS for v in levels):
            raise DomainError(f"levels must be -1, 0 or +1, got {levels}")
        if any(t2 <= t1 for t1, t2 in zip(thresholds, thresholds[1:])):
            raise DomainError(f"thresholds must be strictly increasing, got {thresholds}")
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "thresholds", thresholds)

    def __call__(self, x):
        idx = np.searchsorted(np.asarray(self.thresholds), np.asarray(x, dtype=float), side="right")
        out = np.asarray(self.levels)[idx]
        if np.ndim(x) == 0:
            return float(out)
        return out


def step_loss(g: StepFunction, samples) -> float:
    """Mean squared error of a step function on the samples."""
    ss = as_sample_set(samples)
    if len(ss) == 0:
        raise DomainError("step loss needs at least one sample")
    return float(np.mean((ss.y - g(ss.x)) ** 2))


def _sorted_xy(ss: SampleSet) -> tuple[np.ndarray, np.ndarray]:
    order = np.argsort(ss.x, kind="stable")
    xs = ss.x[order]
    if xs.size > 1 and np.any(np.diff(xs) == 0.0):
        raise TieError(
            "duplicate x values; the step-function minimizer requires pairwise "
            "distinct points (consider a deterministic perturbation)"
        )
    return xs, ss.y[order]


def dp_minimize(samples, k: int, *, return_witness: bool = True):
    """Minimize the empirical square-loss over step functions with at most k
    thresholds and levels in {-1, 0, +1}.

    Dynamic program over (thresholds used, current level, sorted index): the
    state cost is the minimal loss over the first i sorted points ending at
    level s with l thresholds spent, and each point either keeps the current
    level or closes a threshold opened in one of the other two levels. Runs
    in O(kn) time; per-point costs are the integers {0, 1, 4}, so the float
    accumulation is exact and ties are broken toward fewer thresholds.

    Returns (loss, witness) where the witness is a StepFunction attaining the
    loss (thresholds at midpoints of the sorted gaps), or (loss, None) when
    ``return_witness`` is false (the backtracking table for large n*k is the
    dominant memory cost).
    """
    ss = as_sample_set(samples)
    n = len(ss)
    if n == 0:
        raise DomainError("dp_minimize needs at least one sample")
    if k < 0:
        raise DomainError(f"k must be nonnegative, got {k}")
    xs, ys = _sorted_xy(ss)

    # cost[row][s]: squared error of level s in {-1,0,+1} against y = -1 / +1
    cost_neg = np.array([0.0, 1.0, 4.0])
    cost_pos = np.array([4.0, 1.0, 0.0])

    L = np.full((k + 1, 3), np.inf)
    L[0, :] = 0.0
    choice = np.zeros((n, k + 1, 3), dtype=np.uint8) if return_witness else None

    for i in range(n):
        cv = cost_pos if ys[i] > 0 else cost_neg
        m01 = np.minimum(L[:, 0], L[:, 1])
        m02 = np.minimum(L[:, 0], L[:, 2])
        m12 = np.minimum(L[:, 1], L[:, 2])
        other = np.stack([m12, m02, m01], axis=1)  # best over the two other levels
        switch = np.full_like(L, np.inf)
        switch[1:, :] = other[:-1, :]
        if choice is not None:
            src = np.empty((k + 1, 3), dtype=np.uint8)
            src[:, 0] = np.where(L[:, 1] <= L[:, 2], 1, 2)
            src[:, 1] = np.where(L[:, 0] <= L[:, 2], 0, 2)
            src[:, 2] = np.where(L[:, 0] <= L[:, 1], 0, 1)
            src_shift = np.zeros((k + 1, 3), dtype=np.uint8)
            src_shift[1:, :] = src[:-1, :]
            taken = switch < L
            choice[i] = np.where(taken, src_shift + 1, 0)
        L = np.minimum(L, switch) + cv[None, :]

    flat = int(np.argmin(L))
    loss = float(L.flat[flat]) / n
    if choice is None:
        return loss, None

    l_star, s_star = divmod(flat, 3)
    cur_l, cur_s = l_star, s_star
    rev_levels = [cur_s]
    rev_thresholds: list[float] = []
    for i in range(n - 1, -1, -1):
        ch = int(choice[i, cur_l, cur_s])
        if ch:
            prev_s = ch - 1
            t = 0.5 * (xs[i] + xs[i - 1]) if i >= 1 else xs[0] - 1.0
            rev_thresholds.append(float(t))
            cur_l -= 1
            cur_s = prev_s
            rev_levels.append(cur_s)
    assert cur_l == 0, "backtracking must consume every counted threshold"
    witness = StepFunction(
        levels=tuple(_LEVELS[s] for s in reversed(rev_levels)),
        thresholds=tuple(reversed(rev_thresholds)),
    )
    return loss, witness


_BRUTE_MAX_N = 14
_BRUTE_MAX_K = 3


def brute_force_stepfunctions(samples, k: int) -> float:
    """Exhaustive minimum of the empirical square-loss over step functions
    with at most k thresholds: every placement of j <= k thresholds in the
    n + 1 sorted gaps crossed with every level assignment. Exponential; only
    admitted for n <= 14 and k <= 3."""
    ss = as_sample_set(samples)
    n = len(ss)
    if n == 0:
        raise DomainError("brute force needs at least one sample")
    if k < 0:
        raise DomainError(f"k must be nonnegative, got {k}")
    if n > _BRUTE_MAX_N or k > _BRUTE_MAX_K:
        raise SizeError(
            f"brute force admits n <= {_BRUTE_MAX_N} and k <= {_BRUTE_MAX_K}, got n={n}, k={k}"
        )
    xs, ys = _sorted_xy(ss)
    # prefix[i] = number of +1 labels among the first i sorted points
    prefix_pos = np.concatenate(([0], np.cumsum(ys > 0)))

    def segment_cost(a: int, b: int, level: float) -> float:
        pos = prefix_pos[b] - prefix_pos[a]
        neg = (b - a) - pos
        return pos * (1.0 - level) ** 2 + neg * (1.0 + level) ** 2

    best = math.inf
    for j in range(k + 1):
        for gaps in combinations(range(n + 1), j):
            bounds = (0, *gaps, n)
            segs = [(bounds[i], bounds[i + 1]) for i in range(j + 1)]
            for levels in product(_LEVELS, repeat=j + 1):
                total = sum(segment_cost(a, b, s) for (a, b), s in zip(segs, levels))
                if total < best:
                    best = total
    return best / n


def mmse_star_estimate(
    samples,
    k: int,
    protocol: TrainingProtocol = DEFAULT_PROTOCOL,
    seed: int = 0,
    *,
    use_gd: bool = True,
    use_dp: bool = True,
) -> tuple[float, str]:
    """Estimate of the minimal empirical loss of the tanh-output network:
    the smaller of the step-function minimum and the gradient-descent loss.

    Returns (value, method) with method "dp" or "gd" naming the minimizer
    that attained the value (ties go to the exact step-function route).
    """
    if not (use_gd or use_dp):
        raise DomainError("at least one of use_gd/use_dp must be enabled")
    dp_loss = math.inf
    gd_loss = math.inf
    if use_dp:
        dp_loss, _ = dp_minimize(samples, k, return_witness=False)
    if use_gd:
        _, gd_loss = train_gd(samples, k, protocol, seed)
    if dp_loss <= gd_loss:
        return dp_loss, "dp"
    return gd_loss, "gd"
