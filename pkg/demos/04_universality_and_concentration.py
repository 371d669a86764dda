# %% [markdown]
# # Entry distribution and fluctuations
#
# The limit does not care whether the entries are Gaussian, and the sample
# moments concentrate as N grows.

# %%
import numpy as np

from linkedrmt import block_circulant
from linkedrmt.harness import moment_estimates, sample_spectra

f = block_circulant(2)
for dist in ("standard-normal", "rademacher", "uniform-scaled"):
    x = moment_estimates(sample_spectra(f, 128, 100, dist, seed=0), 4)
    print(f"{dist:16s} m4 = {x.mean():.4f} +- {x.std(ddof=1) / np.sqrt(len(x)):.4f}")

# %%
for N in (32, 64, 128, 256):
    x = moment_estimates(sample_spectra(f, N, 200, seed=1), 4)
    print(f"N={N:4d}  E[(m4 - mean)^4] = {np.mean((x - x.mean()) ** 4):.3e}")
