"""One-step maps and path simulation for the alpha-CEV model.

Three discretisations share the same noise conventions:

``implicit``
    the positivity preserving scheme. The diffusion coefficient is made
    partially implicit, which turns each step into the quadratic
    ``(1 + k dt) y**2 - sigma1 x**(gamma - 1/2) dW y - |D| = 0`` in
    ``y = sqrt(X_next)`` with ``D = x + (a - sigma1**2 x**(2 gamma - 1) / 2) dt + sigma2 x**(1/alpha) dZ``.
``em``
    explicit Euler-Maruyama, using positive parts inside the coefficients.
``drift_implicit``
    the variant where ``a`` is multiplied by ``X_i / X_{i+1}``, giving
    ``y**2 - B y - C = 0`` in ``y = X_next``.

All step functions broadcast over numpy arrays, so a batch of paths is
advanced by passing arrays of shape ``(batch,)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .model import GridSpec, ModelParams, diffusion_coeff, jump_coeff
from .stable_rng import IncrementGrid

Scheme = Literal["implicit", "em", "drift_implicit"]
SCHEMES = ("implicit", "em", "drift_implicit")

__all__ = [
    "SCHEMES",
    "Decomposition",
    "PathResult",
    "StepDiagnostics",
    "StepInputs",
    "decompose_step",
    "drift_implicit_step",
    "em_step",
    "implicit_step",
    "simulate_path",
]


@dataclass(frozen=True)
class StepInputs:
    x: float | np.ndarray
    dW: float | np.ndarray
    dZ: float | np.ndarray
    params: ModelParams
    grid: GridSpec


@dataclass(frozen=True)
class StepDiagnostics:
    d_value: float | np.ndarray
    d_negative: bool | np.ndarray
    sqrt_argument: float | np.ndarray


def _implicit_core(x, dW, dZ, p: ModelParams, dt: float):
    c = 1.0 + p.k * dt
    x_2g1 = x ** (2.0 * p.gamma - 1.0)
    u = p.sigma1 * x ** (p.gamma - 0.5) * dW
    d = x + (p.a - 0.5 * p.sigma1**2 * x_2g1) * dt + p.sigma2 * x ** (1.0 / p.alpha) * dZ
    abs_d = np.abs(d)
    arg = u * u + 4.0 * c * abs_d
    if not np.all(arg >= 0.0):
        raise FloatingPointError("negative or NaN square-root argument in implicit step")
    s = np.sqrt(arg)
    # y = (u + s) / (2c). For u >= 0 expand y**2 so that u = 0 gives |D|/c exactly;
    # for u < 0 rationalise to avoid cancellation in u + s.
    with np.errstate(divide="ignore", invalid="ignore"):
        nxt = np.where(
            u >= 0.0,
            abs_d / c + u * (u + s) / (2.0 * c * c),
            (2.0 * abs_d / (s - u)) ** 2,
        )
    if np.ndim(nxt) == 0:
        nxt = float(nxt)
    return nxt, d, arg


def implicit_step(inputs: StepInputs) -> tuple[float | np.ndarray, StepDiagnostics]:
    """Advance the positivity preserving scheme by one step.

    Returns the next state and the step diagnostics (the discriminant driver
    ``D`` and the square-root argument). The state must be nonnegative.
    """
    x = inputs.x
    if np.any(np.asarray(x) < 0.0):
        raise ValueError("implicit_step requires a nonnegative state")
    nxt, d, arg = _implicit_core(x, inputs.dW, inputs.dZ, inputs.params, inputs.grid.dt)
    return nxt, StepDiagnostics(d, d < 0.0, arg)


def em_step(inputs: StepInputs):
    """Explicit Euler-Maruyama step; the state may leave ``[0, inf)``."""
    p, x, dt = inputs.params, inputs.x, inputs.grid.dt
    return x + (p.a - p.k * x) * dt + diffusion_coeff(p, x) * inputs.dW + jump_coeff(p, x) * inputs.dZ


def _drift_implicit_core(x, dW, dZ, p: ModelParams, dt: float):
    b = x * (1.0 - p.k * dt) + diffusion_coeff(p, x) * dW + jump_coeff(p, x) * dZ
    cc = p.a * x * dt
    r = np.sqrt(b * b + 4.0 * cc)
    with np.errstate(divide="ignore", invalid="ignore"):
        root = np.where(b >= 0.0, 0.5 * (b + r), 2.0 * cc / (r - b))
    # b < 0 with cc = 0 gives 0/|2b|; b = cc = 0 gives 0/0
    root = np.where(cc > 0.0, root, np.maximum(b, 0.0))
    if np.ndim(root) == 0:
        root = float(root)
    return root, cc <= 0.0


def drift_implicit_step(inputs: StepInputs):
    """Positive root of ``y**2 - B y - C = 0`` with ``C = a x dt``.

    When ``C = 0`` (``x = 0`` or ``a = 0``) the root degenerates to ``max(B, 0)``.
    """
    root, _ = _drift_implicit_core(inputs.x, inputs.dW, inputs.dZ, inputs.params, inputs.grid.dt)
    return root


@dataclass(frozen=True)
class PathResult:
    """Outcome of running one scheme over an increment grid.

    For batched grids every per-path field is an array over the batch axis.
    ``dneg_by_step[i]`` counts the paths whose step ``i`` had ``D < 0``;
    ``flagged_steps`` counts negative ``D`` (implicit), negative states (em)
    or degenerate roots (drift_implicit) per path.
    """

    scheme: str
    terminal: float | np.ndarray
    max_state: float | np.ndarray
    min_state: float | np.ndarray
    flagged_steps: int | np.ndarray
    dneg_by_step: np.ndarray
    path: np.ndarray | None = None

    @property
    def dneg_steps(self):
        return self.flagged_steps if self.scheme == "implicit" else 0


def simulate_path(scheme: Scheme, params: ModelParams, grid: GridSpec, increments: IncrementGrid,
                  record_path: bool = False) -> PathResult:
    """Fold the chosen one-step map over the grid starting from ``params.x0``."""
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")
    if increments.n != grid.n:
        raise ValueError(f"increment grid has {increments.n} steps, time grid has {grid.n}")
    dt = grid.dt
    batch = increments.batch
    shape = () if batch is None else (batch,)
    x = np.full(shape, float(params.x0))
    x_max = x.copy()
    x_min = x.copy()
    flagged = np.zeros(shape, dtype=np.int64)
    dneg_by_step = np.zeros(grid.n, dtype=np.int64)
    path = np.empty(shape + (grid.n + 1,)) if record_path else None
    if record_path:
        path[..., 0] = x
    dW = increments.dW
    dZ = increments.dZ
    for i in range(grid.n):
        w = dW[..., i]
        z = dZ[..., i]
        if scheme == "implicit":
            x, d, _ = _implicit_core(x, w, z, params, dt)
            neg = d < 0.0
            dneg_by_step[i] = np.count_nonzero(neg)
        elif scheme == "em":
            x = x + (params.a - params.k * x) * dt + diffusion_coeff(params, x) * w + jump_coeff(params, x) * z
            neg = x < 0.0
        else:
            x, neg = _drift_implicit_core(x, w, z, params, dt)
        flagged += neg
        np.maximum(x_max, x, out=x_max)
        np.minimum(x_min, x, out=x_min)
        if record_path:
            path[..., i + 1] = x
    if batch is None:
        return PathResult(scheme, float(x), float(x_max), float(x_min), int(flagged), dneg_by_step, path)
    return PathResult(scheme, np.asarray(x), x_max, x_min, flagged, dneg_by_step, path)


@dataclass(frozen=True)
class Decomposition:
    """Explicit drift/diffusion/jump parts of an implicit step and its remainder.

    ``remainder`` is the difference ``next - x - (drift + diffusion + jump)``;
    ``remainder_closed_form`` evaluates the same quantity term by term from
    ``D``, its negative part and the martingale-like product ``martingale``.
    """

    drift: float | np.ndarray
    diffusion: float | np.ndarray
    jump: float | np.ndarray
    remainder: float | np.ndarray
    remainder_closed_form: float | np.ndarray
    martingale: float | np.ndarray
    d_negative_part: float | np.ndarray

    def reconstruct(self, x):
        return x + self.drift + self.diffusion + self.jump + self.remainder


def decompose_step(inputs: StepInputs, nxt) -> Decomposition:
    p, x, dW, dZ = inputs.params, inputs.x, inputs.dW, inputs.dZ
    dt = inputs.grid.dt
    c = 1.0 + p.k * dt
    k_n = p.k / c
    x_2g1 = x ** (2.0 * p.gamma - 1.0)
    jump_part = p.sigma2 * x ** (1.0 / p.alpha) * dZ
    diffusion_part = p.sigma1 * x**p.gamma * dW
    drift_part = (p.a - k_n * x) * dt
    remainder = nxt - x - drift_part - diffusion_part - jump_part

    d = x + (p.a - 0.5 * p.sigma1**2 * x_2g1) * dt + jump_part
    d_minus = np.maximum(-d, 0.0)
    u = p.sigma1 * x ** (p.gamma - 0.5) * dW
    martingale = u / (2.0 * c * c) * np.sqrt(u * u + 4.0 * c * np.abs(d))
    closed = (
        -jump_part
        + 0.5 * p.sigma1**2 * x_2g1 * (dW * dW / (c * c) - dt / c)
        + p.a * dt * (1.0 / c - 1.0)
        - diffusion_part
        + jump_part / c
        + martingale
        + 2.0 / c * d_minus
    )
    return Decomposition(drift_part, diffusion_part, jump_part, remainder, closed, martingale, d_minus)
