"""Monte Carlo checks of the probabilistic estimates behind the implicit scheme.

* how often the discriminant driver ``D`` is negative, against the bound
  ``exp(-K dt**(-(2 - alpha) / (alpha - 1)))``;
* uniform-in-``n`` boundedness of ``E[max_i (X_i^n)**beta]`` for ``1 <= beta < alpha``;
* inverse moments ``E[(X_T^n)**(-p)]``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import _parallel
from .model import GridSpec, ModelParams
from .schemes import simulate_path
from .stable_rng import IncrementGrid, StableLawSpec

__all__ = [
    "DNegReport",
    "MomentReport",
    "dneg_bound",
    "dneg_bound_constant",
    "estimate_dneg_frequency",
    "estimate_inverse_moment",
    "estimate_scheme_moment",
]

# stream tags keep the diagnostic estimators off the convergence streams
_TAG_DNEG = 1 << 28
_TAG_MOMENT = 2 << 28
_TAG_INVERSE = 3 << 28


@dataclass(frozen=True)
class DNegReport:
    n: int
    trials: int
    count: int
    observed_freq: float
    theoretical_bound: float
    mc_stderr: float
    total_negative_steps: int = 0

    @property
    def within_bound(self) -> bool:
        return self.observed_freq <= self.theoretical_bound + 3.0 * self.mc_stderr


@dataclass(frozen=True)
class MomentReport:
    kind: str
    order: float
    estimate: float
    stderr: float
    n: int
    paths: int
    excluded: int = 0
    ceiling: float | None = None
    warning: str | None = None


def dneg_bound_constant(params: ModelParams, grid: GridSpec) -> float:
    """Constant ``K`` in the bound on ``P[D < 0]``; ``inf`` when there are no jumps."""
    if params.sigma2 == 0.0:
        return math.inf
    a = params.alpha
    feller = params.a - 0.5 * params.sigma1**2
    base = (1.0 - 0.5 * params.sigma1**2 * grid.dt) * math.sin(math.pi * (a - 1.0) / 2.0) / params.sigma2**a
    return feller * base ** (1.0 / (a - 1.0))


def dneg_bound(params: ModelParams, grid: GridSpec) -> float:
    K = dneg_bound_constant(params, grid)
    if math.isinf(K):
        return 0.0
    a = params.alpha
    return math.exp(-K * grid.dt ** (-(2.0 - a) / (a - 1.0)))


def _grid(params, grid, seed, sid, size, normalization):
    spec = StableLawSpec(params.alpha, grid.dt, normalization)
    return IncrementGrid.sample(seed, sid, grid.n, spec, batch=size)


def _dneg_block(params, grid, seed, sid, size, normalization):
    res = simulate_path("implicit", params, grid, _grid(params, grid, seed, sid, size, normalization))
    return res.dneg_by_step


def estimate_dneg_frequency(params: ModelParams, grid: GridSpec, trials: int = 10**5, seed: int = 0,
                            normalization: str = "unit_scale", workers: int | None = 1) -> DNegReport:
    """Largest per-step frequency of ``D < 0`` over implicit-scheme paths.

    The binomial standard error is ``sqrt(f (1 - f) / trials)``.
    """
    if trials < 10**4:
        raise ValueError(f"at least 10^4 trials are required, got {trials}")
    tasks = [
        (params, grid, seed, _parallel.stream_id(_TAG_DNEG + grid.n, b), size, normalization)
        for b, size in _parallel.plan_blocks(trials)
    ]
    by_step = np.sum(_parallel.run_blocks(_dneg_block, tasks, workers), axis=0)
    count = int(by_step.max())
    freq = count / trials
    return DNegReport(
        n=grid.n,
        trials=trials,
        count=count,
        observed_freq=freq,
        theoretical_bound=dneg_bound(params, grid),
        mc_stderr=math.sqrt(freq * (1.0 - freq) / trials),
        total_negative_steps=int(by_step.sum()),
    )


def _max_block(params, grid, seed, sid, size, normalization):
    return simulate_path("implicit", params, grid, _grid(params, grid, seed, sid, size, normalization)).max_state


def _marginal_sums_block(params, grid, seed, sid, size, normalization, beta):
    res = simulate_path("implicit", params, grid, _grid(params, grid, seed, sid, size, normalization),
                        record_path=True)
    powered = res.path**beta
    return powered.sum(axis=0), (powered * powered).sum(axis=0)


def _terminal_block(params, grid, seed, sid, size, normalization):
    return simulate_path("implicit", params, grid, _grid(params, grid, seed, sid, size, normalization)).terminal


def _run(block_fn, tag, params, grid, paths, seed, normalization, workers):
    tasks = [
        (params, grid, seed, _parallel.stream_id(tag + grid.n, b), size, normalization)
        for b, size in _parallel.plan_blocks(paths)
    ]
    return np.concatenate(_parallel.run_blocks(block_fn, tasks, workers))


def _mean_and_stderr(values: np.ndarray) -> tuple[float, float]:
    if values.size < 2:
        return float(values.mean()), float("nan")
    return float(values.mean()), float(values.std(ddof=1) / math.sqrt(values.size))


def estimate_scheme_moment(params: ModelParams, grid: GridSpec, beta: float = 1.0, paths: int = 10**4,
                           seed: int = 0, normalization: str = "unit_scale", workers: int | None = 1,
                           running_max: bool = True) -> MomentReport:
    """Estimate ``E[max_{0<=i<=n} (X_i^n)**beta]`` for the implicit scheme.

    With ``running_max=False`` the maximum is taken outside the expectation,
    ``max_i E[(X_i^n)**beta]``, and the standard error is that of the maximising
    grid point. The running maximum grows with ``n`` towards ``E[sup_t X_t**beta]``
    because a finer grid sees more of each excursion; the marginal form does not.
    """
    if not 1.0 <= beta < params.alpha:
        raise ValueError(f"beta must lie in [1, alpha={params.alpha}), got {beta}")
    if not running_max:
        tasks = [
            (params, grid, seed, _parallel.stream_id(_TAG_MOMENT + grid.n, b), size, normalization, beta)
            for b, size in _parallel.plan_blocks(paths)
        ]
        parts = _parallel.run_blocks(_marginal_sums_block, tasks, workers)
        total = np.sum([s1 for s1, _ in parts], axis=0)
        total_sq = np.sum([s2 for _, s2 in parts], axis=0)
        means = total / paths
        i = int(np.argmax(means))
        var = max(total_sq[i] / paths - means[i] ** 2, 0.0) * paths / max(paths - 1, 1)
        return MomentReport("moment_marginal", beta, float(means[i]), math.sqrt(var / paths), grid.n, paths)
    maxima = _run(_max_block, _TAG_MOMENT, params, grid, paths, seed, normalization, workers)
    est, se = _mean_and_stderr(maxima**beta)
    return MomentReport("moment", beta, est, se, grid.n, paths)


def estimate_inverse_moment(params: ModelParams, grid: GridSpec, p: float = 1.0, paths: int = 10**4,
                            seed: int = 0, c_f: float | None = None, normalization: str = "unit_scale",
                            workers: int | None = 1) -> MomentReport:
    """Estimate ``E[(X_T^n)**(-p)]``; paths ending exactly at zero are excluded and counted.

    The ceiling ``(x0**(-p) + c_f T) exp(T p k)`` is attached only when ``c_f`` is given.
    """
    if not p > 0.0:
        raise ValueError(f"p must be positive, got {p}")
    note = None
    if params.gamma == 0.5 and params.sigma1 > 0.0 and not p < 2.0 * params.a / params.sigma1**2 - 1.0:
        note = f"p={p:g} violates p < 2a/sigma1^2 - 1 for gamma = 1/2; the inverse moment may be infinite"
        warnings.warn(note, RuntimeWarning, stacklevel=2)
    terminal = _run(_terminal_block, _TAG_INVERSE, params, grid, paths, seed, normalization, workers)
    positive = terminal[terminal > 0.0]
    est, se = _mean_and_stderr(positive ** (-p))
    ceiling = None
    if c_f is not None:
        ceiling = (params.x0 ** (-p) + c_f * grid.T) * math.exp(grid.T * p * params.k)
    return MomentReport("inv_moment", p, est, se, grid.n, paths, terminal.size - positive.size, ceiling, note)
