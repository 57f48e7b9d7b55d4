# Compensated spectrally positive stable increments
#
# Draw increments under both scalings, compare the empirical Laplace
# transform E[exp(-m Z)] with its closed form, and build a coupled pair of
# grids whose coarse increments are pairwise sums of the fine ones.

import math

import numpy as np

from alphacev.stable_rng import StableLawSpec, coupled_grids, laplace_exponent, make_rng, sample_stable_increments

dt = 0.1
for normalization in ("levy_measure", "unit_scale"):
    print(f"\n{normalization}")
    print(" alpha    m   empirical   closed form")
    for alpha in (1.2, 1.5, 1.8):
        z = sample_stable_increments(StableLawSpec(alpha, dt, normalization), 10**6, make_rng(0, 0))
        for m in (0.5, 1.0, 2.0):
            emp = np.exp(-m * z).mean()
            exact = math.exp(dt * float(laplace_exponent(m, alpha, normalization)))
            print(f"  {alpha:.1f}  {m:4.1f}  {emp:10.5f}  {exact:10.5f}")

# The right tail is heavy, the left tail is not
z = sample_stable_increments(StableLawSpec(1.5, dt), 10**6, make_rng(0, 1))
print("\nquantiles 0.001 / 0.5 / 0.999:", np.quantile(z, [0.001, 0.5, 0.999]).round(4))

fine, coarse = coupled_grids(seed=1, stream_id=0, n=4, dt_fine=1 / 8, spec=StableLawSpec(1.5, 1 / 8, "unit_scale"))
print("\nfine dZ  ", fine.dZ.round(4))
print("coarse dZ", coarse.dZ.round(4))
print("sums agree:", math.isclose(fine.dZ.sum(), coarse.dZ.sum()))
