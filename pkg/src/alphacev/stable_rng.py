"""Reproducible Brownian and spectrally positive alpha-stable increments.

Every draw is tied to a ``(seed, stream_id)`` pair. The pair keys a Philox
counter-based generator through :class:`numpy.random.SeedSequence`, so a grid
can be regenerated bit-exactly from its key alone and distinct stream ids never
share generator state.

Stable variates are produced with the Chambers-Mallows-Stuck transform for a
totally right-skewed law (``beta = 1``) in the Samorodnitsky-Taqqu
parameterisation, which has mean zero for ``alpha > 1``. Two scalings are
offered:

``unit_scale``
    scale ``dt**(1/alpha)``, so that ``E[exp(-m Z)] = exp(dt m**alpha / sin(pi (alpha - 1) / 2))``.
``levy_measure``
    scale chosen so that ``Z`` is the compensated process with Levy measure
    ``x**(-1 - alpha) dx`` on ``(0, inf)``, i.e.
    ``E[exp(-m Z)] = exp(dt m**alpha Gamma(2 - alpha) / (alpha (alpha - 1)))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

Normalization = Literal["levy_measure", "unit_scale"]
NORMALIZATIONS = ("levy_measure", "unit_scale")

__all__ = [
    "NORMALIZATIONS",
    "IncrementGrid",
    "StableLawSpec",
    "coupled_grids",
    "laplace_exponent",
    "make_rng",
    "merge2",
    "sample_brownian_increments",
    "sample_stable_increments",
]


def make_rng(seed: int, stream_id: int) -> np.random.Generator:
    """Return the Philox generator keyed by ``(seed, stream_id)``."""
    if seed < 0 or stream_id < 0:
        raise ValueError("seed and stream_id must be nonnegative integers")
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(stream_id),))
    return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True)
class StableLawSpec:
    alpha: float
    dt: float
    normalization: Normalization = "levy_measure"

    def __post_init__(self):
        if not 1.0 < self.alpha < 2.0:
            raise ValueError(f"alpha must lie strictly inside (1, 2), got {self.alpha}")
        if not self.dt > 0.0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.normalization not in NORMALIZATIONS:
            raise ValueError(f"unknown normalization {self.normalization!r}")

    @property
    def scale(self) -> float:
        """Scale parameter applied to a standard ``S_alpha(1, 1, 0)`` variate."""
        a = self.alpha
        if self.normalization == "unit_scale":
            return self.dt ** (1.0 / a)
        # sigma**alpha / |cos(pi alpha / 2)| must equal dt Gamma(2 - a) / (a (a - 1))
        sigma_a = self.dt * math.gamma(2.0 - a) / (a * (a - 1.0)) * math.sin(math.pi * (a - 1.0) / 2.0)
        return sigma_a ** (1.0 / a)

    def with_dt(self, dt: float) -> "StableLawSpec":
        return StableLawSpec(self.alpha, dt, self.normalization)


def laplace_exponent(m, alpha: float, normalization: Normalization = "levy_measure"):
    """Exponent ``psi`` with ``E[exp(-m Z_t)] = exp(t psi(m))``."""
    m = np.asarray(m, dtype=float)
    if normalization == "levy_measure":
        c = math.gamma(2.0 - alpha) / (alpha * (alpha - 1.0))
    elif normalization == "unit_scale":
        c = 1.0 / math.sin(math.pi * (alpha - 1.0) / 2.0)
    else:
        raise ValueError(f"unknown normalization {normalization!r}")
    return c * m**alpha


def sample_brownian_increments(n, dt: float, rng: np.random.Generator) -> np.ndarray:
    """Draw Gaussian increments with mean 0 and variance ``dt``.

    ``n`` is either a step count or a shape tuple whose last axis is time.
    """
    shape = (n,) if np.isscalar(n) else tuple(n)
    if len(shape) == 0 or min(shape) < 1:
        raise ValueError("at least one increment is required")
    if not dt > 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    return rng.standard_normal(shape) * math.sqrt(dt)


def _standard_skewed_stable(alpha: float, shape, rng: np.random.Generator) -> np.ndarray:
    # Chambers-Mallows-Stuck with beta = 1, alpha != 1
    half_pi = 0.5 * math.pi
    v = rng.uniform(-half_pi, half_pi, size=shape)
    w = rng.standard_exponential(size=shape)
    t = math.tan(half_pi * alpha)
    b = math.atan(t) / alpha
    s = (1.0 + t * t) ** (0.5 / alpha)
    avb = alpha * (v + b)
    return (
        s
        * np.sin(avb)
        / np.cos(v) ** (1.0 / alpha)
        * (np.cos(v - avb) / w) ** ((1.0 - alpha) / alpha)
    )


def sample_stable_increments(spec: StableLawSpec, n, rng: np.random.Generator) -> np.ndarray:
    """Draw compensated spectrally positive stable increments over ``spec.dt``."""
    shape = (n,) if np.isscalar(n) else tuple(n)
    if len(shape) == 0 or min(shape) < 1:
        raise ValueError("at least one increment is required")
    return spec.scale * _standard_skewed_stable(spec.alpha, shape, rng)


def merge2(x) -> np.ndarray:
    """Sum consecutive pairs along the last axis: ``y[i] = x[2i] + x[2i+1]``."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] % 2:
        raise ValueError(f"merge2 needs an even number of entries, got {x.shape[-1]}")
    return x[..., 0::2] + x[..., 1::2]


@dataclass(frozen=True, eq=False)
class IncrementGrid:
    """Per-step noise for one path, or a batch of paths along axis 0.

    The last axis of ``dW`` and ``dZ`` is time and has length ``n``.
    """

    dW: np.ndarray
    dZ: np.ndarray
    seed: int = -1
    stream_id: int = -1
    n: int = field(init=False)

    def __post_init__(self):
        dW = np.asarray(self.dW, dtype=float)
        dZ = np.asarray(self.dZ, dtype=float)
        if dW.shape != dZ.shape or dW.ndim not in (1, 2):
            raise ValueError(f"dW and dZ must share a 1-d or 2-d shape, got {dW.shape} and {dZ.shape}")
        dW.flags.writeable = False
        dZ.flags.writeable = False
        object.__setattr__(self, "dW", dW)
        object.__setattr__(self, "dZ", dZ)
        object.__setattr__(self, "n", dW.shape[-1])

    @property
    def batch(self) -> int | None:
        return self.dW.shape[0] if self.dW.ndim == 2 else None

    def coarsen(self) -> "IncrementGrid":
        return IncrementGrid(merge2(self.dW), merge2(self.dZ), self.seed, self.stream_id)

    @classmethod
    def sample(cls, seed: int, stream_id: int, n: int, spec: StableLawSpec, batch: int | None = None):
        """Draw a fresh grid of ``n`` steps of length ``spec.dt``.

        Brownian increments are drawn before stable ones; the order is part of
        the reproducibility contract.
        """
        if n < 1:
            raise ValueError("n must be at least 1")
        rng = make_rng(seed, stream_id)
        shape = (n,) if batch is None else (batch, n)
        dW = sample_brownian_increments(shape, spec.dt, rng)
        dZ = sample_stable_increments(spec, shape, rng)
        return cls(dW, dZ, seed, stream_id)


def coupled_grids(seed: int, stream_id: int, n: int, dt_fine: float, spec: StableLawSpec,
                  batch: int | None = None) -> tuple[IncrementGrid, IncrementGrid]:
    """Fine grid of ``2n`` steps and its pairwise-summed ``n``-step coarsening.

    ``spec.dt`` is ignored in favour of ``dt_fine``.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    fine = IncrementGrid.sample(seed, stream_id, 2 * n, spec.with_dt(dt_fine), batch)
    return fine, fine.coarsen()
