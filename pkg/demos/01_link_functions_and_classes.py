# %% [markdown]
# # Link functions and entry classes
#
# A k-link function decides which entries on a wrapped diagonal are forced to
# be equal.  Here we build the three 2-periodic examples, look at the 6 x 6
# real matrices they generate and at their 2 x 2 complex companions.

# %%
import numpy as np

from linkedrmt import build_companion_classes, build_real_classes, f1, f2, f3

links = {"f1 (2-block circulant)": f1(), "f2": f2(), "f3": f3()}

# %%
for name, f in links.items():
    cmap = build_real_classes(f, 6)
    print(f"{name}: table {f.table.tolist()}, {cmap.n_classes} independent entries at N=6")
    print(cmap.class_id)
    print()

# %% [markdown]
# Same picture for the companion ensembles.  Note the off-diagonal entry of
# the f3 companion: the link function pairs it with its own transpose, so it
# has to be real.

# %%
for name, f in links.items():
    cmap = build_companion_classes(f, 2)
    kinds = [[cmap.class_kind(c) for c in row] for row in cmap.class_id]
    print(name)
    for row, conj in zip(kinds, cmap.conjugated):
        print("   ", ["%s%s" % (kd, "*" if cj else "") for kd, cj in zip(row, conj)])

# %% [markdown]
# The class map can be exported for inspection in any spreadsheet tool.

# %%
print(build_companion_classes(f1(), 4).to_csv()[:300])
