# %% [markdown]
# # Permanents of Gaussian matrices
#
# Exact permanents via Ryser's formula, and Monte Carlo checks of the second
# and fourth moments of |perm(X)|^2.

# %%
import math

import numpy as np

from permlab import estimate_moment, fourth_moment, permanent, permanent_naive, sample_gaussian

# %%
X = sample_gaussian(6, 6, "complex", seed=1)
print("Ryser:", permanent(X.entries))
print("naive:", permanent_naive(X.entries))

# %% [markdown]
# A stack of matrices is evaluated in one call.

# %%
from permlab import sample_batch

stack = sample_batch(100_000, 5, 5, "complex", seed=2)
f = np.abs(permanent(stack)) ** 2
print("E|perm|^2 ~", f.mean(), "target", math.factorial(5))

# %% [markdown]
# The fourth moment is (n+1)(n!)^2 for complex entries and C(n+2,2)(n!)^2 for
# real ones.  The distribution has heavy tails, so the error bars widen fast.

# %%
for n in range(1, 5):
    for kind in ("complex", "real"):
        est = estimate_moment(n, 4, kind, samples=100_000, seed=n)
        target = fourth_moment(n, kind)
        print(f"n={n} {kind:7s} {est.mean:10.2f} +- {est.stderr:7.2f}  target {target}")
