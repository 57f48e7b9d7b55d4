# Strong rate in the diffusion case (sigma2 = 0)
#
# S_n = E|X_1^{2n} - X_1^n| on coupled grids, rate = log10 S_n - log10 S_{10n}.
# The paper's figure uses N = (10 n)^2 samples; N = (3 n)^2 keeps this quick.

from alphacev.cli import emit_plot_data
from alphacev.convergence import rate_sweep
from alphacev.model import ModelParams

base = ModelParams(a=1.05, k=2.0, sigma1=1.0, sigma2=0.0, gamma=0.54, alpha=1.5, x0=1.0)
n = 2**5
sweep = rate_sweep("implicit", base, 1.0, n, [1.2, 1.4, 1.6, 1.8], samples=(3 * n) ** 2, seed=0)

print("alpha   rate    stderr   1/2   1/(2 alpha)")
for r in sweep:
    print(f"{r.alpha:4.1f}  {r.rate_estimate:6.3f}  {r.rate_stderr:6.3f}  0.5   {r.reference_lines['inv2alpha']:.3f}")

emit_plot_data(sweep, "figure1.txt")
print("plot data written to figure1.txt")
