# %% [markdown]
# # Degree expansion of |perm(X)|^2
#
# |perm(X)|^2 splits into orthogonal components f^{=2j}.  The noise operator
# multiplies component j by rho^(2j), which gives the noisy value g(X) without
# any sampling.

# %%
import numpy as np

from permlab import (NoiseParameter, degree_components, degree_weights, estimate_g_mc,
                     noisy_square_perm_exact, permanent, sample_batch, sample_gaussian)

# %%
X = sample_gaussian(4, 4, "complex", seed=3)
comps = degree_components(X.entries)
print("components:", np.round(comps, 4))
print("sum:", comps.sum(), " |perm|^2:", abs(permanent(X.entries)) ** 2)

# %%
p = NoiseParameter.from_epsilon(0.3)
g = comps @ p.rho2 ** np.arange(5)
print("eigen-sum g:", g)
print("pair sum g: ", noisy_square_perm_exact(X.entries, p))
mc = estimate_g_mc(X, p, inner_samples=200_000, seed=1)
print(f"nested MC:   {mc.mean:.4f} +- {mc.stderr:.4f}")

# %% [markdown]
# Each component carries the same squared norm (n!)^2 for complex entries;
# real entries tilt the weight towards high degree, (m+1)(n!)^2.

# %%
stack = sample_batch(100_000, 3, 3, "complex", seed=4)
print("empirical:", np.round((degree_components(stack) ** 2).mean(0), 2))
print("exact:    ", degree_weights(3, "complex").weights, degree_weights(3, "real").weights)
