"""Parameters and coefficient functions of the alpha-CEV jump-diffusion

    dX_t = (a - k X_t) dt + sigma1 (X_t^+)^gamma dW_t + sigma2 (X_{t-}^+)^(1/alpha) dZ_t

where ``Z`` is a compensated spectrally positive alpha-stable Levy process.
``gamma = 1/2`` gives the alpha-CIR process.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "GridSpec",
    "ModelParams",
    "ValidationReport",
    "diffusion_coeff",
    "drift",
    "jump_coeff",
    "validate_assumption_A",
]


@dataclass(frozen=True)
class ModelParams:
    a: float
    k: float
    sigma1: float
    sigma2: float
    gamma: float
    alpha: float
    x0: float = 1.0

    def __post_init__(self):
        problems = []
        if not 0.5 <= self.gamma < 1.0:
            problems.append(f"gamma must lie in [1/2, 1), got {self.gamma}")
        if not 1.0 < self.alpha < 2.0:
            problems.append(f"alpha must lie in (1, 2), got {self.alpha}")
        if not self.x0 > 0.0:
            problems.append(f"x0 must be positive, got {self.x0}")
        for name in ("a", "sigma1", "sigma2"):
            if not getattr(self, name) >= 0.0:
                problems.append(f"{name} must be nonnegative, got {getattr(self, name)}")
        if problems:
            raise ValueError("; ".join(problems))

    def replace(self, **changes) -> "ModelParams":
        values = {name: getattr(self, name) for name in self.__dataclass_fields__}
        values.update(changes)
        return ModelParams(**values)


@dataclass(frozen=True)
class GridSpec:
    """Uniform time grid of ``n`` steps on ``[0, T]``."""

    T: float
    n: int
    k: float = 0.0
    dt: float = field(init=False)
    k_n: float = field(init=False)
    kappa_floor: float = field(init=False)

    def __post_init__(self):
        if not self.T > 0.0:
            raise ValueError(f"T must be positive, got {self.T}")
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n}")
        object.__setattr__(self, "n", int(self.n))
        dt = self.T / self.n
        denom = 1.0 + self.k * dt
        if not denom > 0.0:
            raise ValueError(f"1 + k*dt must be positive, got {denom}")
        object.__setattr__(self, "dt", dt)
        object.__setattr__(self, "k_n", self.k / denom)
        # any value in (0, 1) bounding 1 + k dt from below
        object.__setattr__(self, "kappa_floor", denom if denom < 1.0 else 0.5)

    @classmethod
    def for_params(cls, params: ModelParams, T: float, n: int) -> "GridSpec":
        return cls(T, n, params.k)

    def refine(self, factor: int = 2) -> "GridSpec":
        return GridSpec(self.T, self.n * factor, self.k)


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[str, ...] = ()
    warnings: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def as_dict(self) -> dict:
        return {"ok": self.ok, "violations": list(self.violations), "warnings": list(self.warnings)}


def validate_assumption_A(params: ModelParams, grid: GridSpec) -> ValidationReport:
    """Check the standing assumptions under which the implicit scheme converges.

    Violations are returned, not raised. ``k <= 0`` is only a warning: the
    scheme still converges but without the rate guarantee.
    """
    violations = []
    warnings = []
    if not 2.0 * params.gamma < params.alpha:
        violations.append(f"2*gamma < alpha fails ({2.0 * params.gamma:g} >= {params.alpha:g})")
    if not params.a - 0.5 * params.sigma1**2 > 0.0:
        violations.append(f"a - sigma1^2/2 > 0 fails ({params.a - 0.5 * params.sigma1**2:g})")
    dt = grid.dt
    if not 1.0 + params.k * dt > 0.0:
        violations.append(f"1 + k*dt > 0 fails ({1.0 + params.k * dt:g})")
    if not 1.0 - 0.5 * params.sigma1**2 * dt > 0.0:
        violations.append(f"1 - sigma1^2*dt/2 > 0 fails ({1.0 - 0.5 * params.sigma1**2 * dt:g})")
    if params.k <= 0.0:
        warnings.append(f"k <= 0 ({params.k:g}): convergence rate guarantee does not apply")
    return ValidationReport(tuple(violations), tuple(warnings))


def drift(params: ModelParams, x):
    return params.a - params.k * x


def diffusion_coeff(params: ModelParams, x):
    return params.sigma1 * np.maximum(x, 0.0) ** params.gamma


def jump_coeff(params: ModelParams, x):
    return params.sigma2 * np.maximum(x, 0.0) ** (1.0 / params.alpha)
