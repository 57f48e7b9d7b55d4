# Negative discriminant frequency and moment estimates
#
# P[D < 0] is bounded by exp(-K dt^{-(2 - alpha)/(alpha - 1)}); at the
# published parameters the bound is astronomically small, so a coarse grid
# with a large jump scale is shown as well.

from alphacev.diagnostics import (
    dneg_bound_constant,
    estimate_dneg_frequency,
    estimate_inverse_moment,
    estimate_scheme_moment,
)
from alphacev.model import GridSpec, ModelParams

fig2 = ModelParams(a=1.05, k=2.0, sigma1=0.37, sigma2=0.37, gamma=0.54, alpha=1.5, x0=1.0)
rough = fig2.replace(sigma2=3.0, alpha=1.2)

for label, params, n in (("published", fig2, 64), ("rough", rough, 4)):
    grid = GridSpec(1.0, n, params.k)
    rep = estimate_dneg_frequency(params, grid, 10**5, seed=0)
    print(f"{label:10s} n={n:3d}  K={dneg_bound_constant(params, grid):8.4f}  "
          f"observed={rep.observed_freq:.5f}+-{rep.mc_stderr:.5f}  bound={rep.theoretical_bound:.3e}")

print("\n  n   E[max X]          max_i E[X_i] (x0=0.2)   E[1/X_T]")
for n in (16, 32, 64, 128):
    grid = GridSpec(1.0, n, fig2.k)
    run_max = estimate_scheme_moment(fig2, grid, 1.0, 10**5, seed=1)
    marg = estimate_scheme_moment(fig2.replace(x0=0.2), grid, 1.0, 10**5, seed=1, running_max=False)
    inv = estimate_inverse_moment(fig2, grid, 1.0, 10**5, seed=1)
    print(f"{n:4d}  {run_max.estimate:.4f}+-{run_max.stderr:.4f}   {marg.estimate:.4f}+-{marg.stderr:.4f}"
          f"        {inv.estimate:.4f}+-{inv.stderr:.4f}")
