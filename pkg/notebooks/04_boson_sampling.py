# %% [markdown]
# # Ideal and noisy BosonSampling at small n
#
# Outcome probabilities are mu(S) |perm(A_S)|^2 / perm(A A*).  The noisy
# distribution normalizes the expected weights under eps-noise of A.

# %%
import numpy as np

from permlab import ideal_distribution, noisy_distribution, noisy_distribution_mc, sample_gaussian

# %%
A = sample_gaussian(3, 6, "complex", seed=5).entries
ideal = ideal_distribution(A)
print(len(ideal.outcomes), "outcomes, total probability", ideal.ideal_probs.sum())

# %%
for eps in (0.0, 0.1, 0.3, 0.6, 1.0):
    m = noisy_distribution(A, eps).metrics
    corr = "n/a" if m["pearson"] is None else f"{m['pearson']:.4f}"
    print(f"eps={eps:.1f}  TV={m['tv']:.4f}  pearson={corr}")

# %% [markdown]
# Averaging the per-draw probabilities instead of normalizing the averaged
# weights gives a slightly different answer.

# %%
rep = noisy_distribution(A, 0.3)
mean, se = noisy_distribution_mc(A, 0.3, samples=20_000, seed=1)
print("max gap:", np.max(np.abs(mean - rep.noisy_probs)), " max stderr:", se.max())
