# %% [markdown]
# # Correlation between |perm(X)|^2 and its noisy version
#
# With noise eps = c/n the correlation tends to sqrt((2/c) tanh(c/2)) as n grows.
# The table below is the data behind the usual plot of that curve.

# %%
import numpy as np

from permlab import corr_asymptotic, corr_closed_form, estimate_corr

# %%
print(f"{'c':>5} {'limit':>8} {'n=10':>8} {'n=20':>8} {'n=30':>8}")
for c in (0.25, 0.5, 1, 2, 3, 4):
    row = [corr_closed_form(n, c / n) for n in (10, 20, 30)]
    print(f"{c:5.2f} {corr_asymptotic(c):8.4f} " + " ".join(f"{v:8.4f}" for v in row))

# %% [markdown]
# At fixed eps the correlation vanishes as n grows.

# %%
for n in (5, 20, 100, 1000):
    print(n, round(corr_closed_form(n, 0.1), 4))

# %% [markdown]
# Monte Carlo agrees with the closed form at small n.  All three rows reuse
# the same sampled matrices, so their errors move together.

# %%
for eps in (0.1, 0.3, 0.5):
    est = estimate_corr(5, eps, samples=20_000, seed=7)
    print(f"eps={eps}: {est.mean:.4f} +- {est.stderr:.4f}  closed {corr_closed_form(5, eps):.4f}")
