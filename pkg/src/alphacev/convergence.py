"""Strong-error estimation on coupled fine/coarse grids and rate extraction.

For a grid of ``n`` steps on ``[0, T]`` the strong error proxy is

    S_n = E |X_T^{2n} - X_T^n|

where both resolutions are driven by the same Brownian and stable path: the
``2n``-step increments are drawn and the ``n``-step increments are their
pairwise sums. Assuming ``S_n ~ C n**(-r)``, the rate is estimated by
``log10(S_n) - log10(S_{10n})`` or, over a longer ladder of grid sizes, by a
least-squares slope in log-log coordinates. Standard errors of ``S_n`` are
carried to the rate with the delta method.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import _parallel
from .model import GridSpec, ModelParams, validate_assumption_A
from .schemes import SCHEMES, simulate_path
from .stable_rng import StableLawSpec, coupled_grids

log = logging.getLogger(__name__)

__all__ = [
    "CoupledPair",
    "RateReport",
    "RateSweep",
    "StrongErrorReport",
    "coupled_abs_diffs",
    "estimate_rate",
    "estimate_strong_error",
    "paper_samples",
    "rate_from_errors",
    "rate_sweep",
    "reference_lines",
    "simulate_coupled_pair",
    "theoretical_floor",
]


@dataclass(frozen=True)
class CoupledPair:
    fine_terminal: float
    coarse_terminal: float

    @property
    def abs_diff(self) -> float:
        return abs(self.fine_terminal - self.coarse_terminal)


@dataclass(frozen=True)
class StrongErrorReport:
    scheme: str
    n: int
    samples: int
    s_n: float
    stderr: float
    alpha: float = float("nan")
    seed: int = 0


def paper_samples(n: int) -> int:
    """Monte Carlo sample count ``(10 n)**2`` used for the published figures."""
    return (10 * n) ** 2


def _check_scheme(scheme):
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")


def _pair_terminals(scheme, params, T, n, seed, sid, batch, normalization):
    spec = StableLawSpec(params.alpha, T / (2 * n), normalization)
    fine, coarse = coupled_grids(seed, sid, n, T / (2 * n), spec, batch=batch)
    xf = simulate_path(scheme, params, GridSpec(T, 2 * n, params.k), fine).terminal
    xc = simulate_path(scheme, params, GridSpec(T, n, params.k), coarse).terminal
    return xf, xc


def simulate_coupled_pair(scheme, params: ModelParams, T: float, n: int, seed: int, stream_id: int,
                          normalization: str = "unit_scale") -> CoupledPair:
    """One ``(X_T^{2n}, X_T^n)`` pair sharing the noise of stream ``stream_id``."""
    _check_scheme(scheme)
    if n < 1:
        raise ValueError("n must be at least 1")
    xf, xc = _pair_terminals(scheme, params, T, n, seed, stream_id, None, normalization)
    return CoupledPair(xf, xc)


def _abs_diff_block(scheme, params, T, n, seed, sid, size, normalization):
    xf, xc = _pair_terminals(scheme, params, T, n, seed, sid, size, normalization)
    return np.abs(xf - xc)


def coupled_abs_diffs(scheme, params: ModelParams, T: float, n: int, samples: int, seed: int,
                      normalization: str = "unit_scale", workers: int | None = 1) -> np.ndarray:
    """``|X_T^{2n} - X_T^n|`` for ``samples`` independent coupled pairs.

    Pairs are simulated in blocks; block ``b`` uses stream
    ``stream_id(n, b)``, so the result depends only on ``(seed, n, samples)``.
    """
    _check_scheme(scheme)
    tasks = [
        (scheme, params, T, n, seed, _parallel.stream_id(n, b), size, normalization)
        for b, size in _parallel.plan_blocks(samples)
    ]
    return np.concatenate(_parallel.run_blocks(_abs_diff_block, tasks, workers))


def estimate_strong_error(scheme, params: ModelParams, T: float, n: int, samples: int | None = None,
                          seed: int = 0, normalization: str = "unit_scale",
                          workers: int | None = 1) -> StrongErrorReport:
    """Monte Carlo estimate of ``S_n`` with its standard error.

    ``samples`` defaults to ``(10 n)**2``.
    """
    if samples is None:
        samples = paper_samples(n)
    if samples < 100:
        raise ValueError(f"at least 100 samples are required, got {samples}")
    diffs = coupled_abs_diffs(scheme, params, T, n, samples, seed, normalization, workers)
    s_n = float(diffs.mean())
    stderr = float(diffs.std(ddof=1) / math.sqrt(samples))
    return StrongErrorReport(scheme, n, samples, s_n, stderr, params.alpha, seed)


def reference_lines(alpha: float) -> dict[str, float]:
    return {"half": 0.5, "inv2alpha": 1.0 / (2.0 * alpha), "alpha_quarter": alpha / 4.0}


def theoretical_floor(alpha: float, alpha_minus: float | None = None) -> float:
    """Guaranteed rate ``(alpha_minus / 2  min  1 / alpha) / 2``; ``alpha_minus`` defaults to ``alpha - 0.05``."""
    if alpha_minus is None:
        alpha_minus = alpha - 0.05
    return 0.5 * min(alpha_minus / 2.0, 1.0 / alpha)


def rate_from_errors(ns: Sequence[int], s: Sequence[float], stderr: Sequence[float] | None = None):
    """Rate ``r`` from ``S_n ~ C n**(-r)`` and its delta-method standard error.

    Two points use the plain log10 difference divided by ``log10(n1 / n0)``
    (exactly ``log10 S_n - log10 S_{10n}`` for a tenfold step); more points use
    an ordinary least-squares slope.
    """
    ns = np.asarray(ns, dtype=float)
    s = np.asarray(s, dtype=float)
    if ns.size < 2 or ns.size != s.size:
        raise ValueError("need at least two (n, S_n) pairs of equal length")
    if np.any(~(s > 0.0)):
        raise ValueError(f"strong error estimates must be positive, got {s.tolist()}")
    logn = np.log10(ns)
    logs = np.log10(s)
    if ns.size == 2:
        span = logn[1] - logn[0]
        weights = np.array([1.0, -1.0]) / span
    else:
        centred = logn - logn.mean()
        weights = -centred / np.dot(centred, centred)
    rate = float(np.dot(weights, logs))
    if stderr is None:
        return rate, float("nan")
    rel = np.asarray(stderr, dtype=float) / (s * math.log(10.0))
    return rate, float(math.sqrt(np.dot(weights**2, rel**2)))


@dataclass(frozen=True)
class RateReport:
    scheme: str
    alpha: float
    rate_estimate: float
    rate_stderr: float
    method: str
    pairs_used: tuple[tuple[int, float], ...]
    errors: tuple[StrongErrorReport, ...] = ()
    alpha_minus: float = float("nan")
    reference_lines: dict = field(default_factory=dict)
    theoretical_floor: float = float("nan")


def estimate_rate(scheme, params: ModelParams, T: float = 1.0, n0: int = 64,
                  samples_fn: Callable[[int], int] | int | None = None, seed: int = 0,
                  ladder: Sequence[int] | None = None, normalization: str = "unit_scale",
                  workers: int | None = 1, alpha_minus: float | None = None) -> RateReport:
    """Estimate the strong rate from ``S_{n0}`` and ``S_{10 n0}``, or over ``ladder``.

    ``samples_fn`` maps a grid size to a sample count; an integer fixes the
    count for every level. The default uses ``(10 n0)**2`` at every level.
    """
    if n0 < 8:
        raise ValueError(f"n0 must be at least 8, got {n0}")
    levels = (n0, 10 * n0) if ladder is None else tuple(int(n) for n in ladder)
    if samples_fn is None:
        samples_fn = paper_samples(n0)
    count = samples_fn if callable(samples_fn) else (lambda _n, c=int(samples_fn): c)
    errors = tuple(
        estimate_strong_error(scheme, params, T, n, count(n), seed, normalization, workers) for n in levels
    )
    rate, rate_se = rate_from_errors(levels, [e.s_n for e in errors], [e.stderr for e in errors])
    if alpha_minus is None:
        alpha_minus = params.alpha - 0.05
    return RateReport(
        scheme=scheme,
        alpha=params.alpha,
        rate_estimate=rate,
        rate_stderr=rate_se,
        method="log10-difference" if len(levels) == 2 else "least-squares",
        pairs_used=tuple((e.n, e.s_n) for e in errors),
        errors=errors,
        alpha_minus=alpha_minus,
        reference_lines=reference_lines(params.alpha),
        theoretical_floor=theoretical_floor(params.alpha, alpha_minus),
    )


class RateSweep(list):
    """List of :class:`RateReport`; ``skipped`` maps rejected alphas to their violations."""

    def __init__(self, reports=(), skipped=None):
        super().__init__(reports)
        self.skipped = dict(skipped or {})


def rate_sweep(scheme, base_params: ModelParams, T: float, n0: int, alphas: Sequence[float],
               samples=None, seed: int = 0, **kwargs) -> RateSweep:
    """Run :func:`estimate_rate` for each alpha, skipping inadmissible ones."""
    reports = []
    skipped = {}
    levels = kwargs.get("ladder") or (n0, 10 * n0)
    for alpha in alphas:
        try:
            params = base_params.replace(alpha=float(alpha))
        except ValueError as exc:
            skipped[alpha] = (str(exc),)
            continue
        violations = []
        for n in levels:
            for level_n in (n, 2 * n):
                violations.extend(validate_assumption_A(params, GridSpec(T, level_n, params.k)).violations)
        if violations:
            skipped[alpha] = tuple(dict.fromkeys(violations))
            log.warning("skipping alpha=%g: %s", alpha, "; ".join(skipped[alpha]))
            continue
        reports.append(estimate_rate(scheme, params, T, n0, samples, seed, **kwargs))
    return RateSweep(reports, skipped)
