# %% [markdown]
# # Exact moments, two ways
#
# The limiting even moments of the real ensemble are computed by counting
# surviving pair matchings; the companion moments come from summing Isserlis
# expansions over every cyclic product.  Both are exact rationals.

# %%
from linkedrmt import (
    block_circulant,
    companion_moment_exact,
    f2,
    f3,
    limit_moment_via_matchings,
    moment_bound,
)

for f in (block_circulant(1), block_circulant(2), block_circulant(3), f2(), f3()):
    row = []
    for m in (2, 4, 6, 8):
        a = companion_moment_exact(f, f.k, m)
        b = limit_moment_via_matchings(f, m)
        assert a == b
        row.append(str(a))
    print(f"{f.descriptor:18s}", row)

# %% [markdown]
# The companion of size K = t k has exactly the same moments.

# %%
for t in (1, 2, 3):
    print(t, [str(companion_moment_exact(f3(), 2 * t, m)) for m in (2, 4, 6)])

# %% [markdown]
# From the Gaussian (k = 1, moments (m-1)!!) towards the semicircle
# (Catalan numbers) as k grows.

# %%
for k in (1, 2, 5, 10, 20):
    v = companion_moment_exact(block_circulant(k), k, 4)
    print(f"k={k:2d}  m4 = {str(v):8s} = {float(v):.5f}   bound {moment_bound(k, 4)}")
