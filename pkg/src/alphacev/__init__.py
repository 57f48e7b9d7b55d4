"""Positivity preserving simulation of alpha-CEV jump-diffusions driven by
spectrally positive alpha-stable noise, with a coupled-grid strong-error harness."""

from .convergence import (
    CoupledPair,
    RateReport,
    StrongErrorReport,
    estimate_rate,
    estimate_strong_error,
    rate_sweep,
    simulate_coupled_pair,
)
from .diagnostics import (
    dneg_bound,
    dneg_bound_constant,
    estimate_dneg_frequency,
    estimate_inverse_moment,
    estimate_scheme_moment,
)
from .model import GridSpec, ModelParams, validate_assumption_A
from .schemes import (
    StepInputs,
    decompose_step,
    drift_implicit_step,
    em_step,
    implicit_step,
    simulate_path,
)
from .stable_rng import IncrementGrid, StableLawSpec, coupled_grids, merge2

__version__ = "0.1.0"
