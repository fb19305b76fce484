"""Pooling a few precise measurements with many noisy ones
===========================================================

Take 80 normal draws with scale 1000 and add n2 draws with scale 1.  The
median of the pooled sample collapses toward the scale of the precise group
long before n2 catches up with 80.  This script simulates E|M| over n2 and
compares it with the planner built on the normal median radius.
"""

import math
import sys
from pathlib import Path

from hetquant.cli import plan_n2
from hetquant.montecarlo import sweep_n2

N1, SIGMA1, SIGMA2 = 80, 1000.0, 1.0

# %% Monte Carlo sweep, 5000 replicates per point.
rows = sweep_n2(N1, SIGMA1, SIGMA2, range(0, 41), replicates=5000, seed=1)
for n2, est in rows[::4]:
    print(f"n2={n2:3d}  E|M| = {est.mean:9.3f}  (se {est.std_error:.3f})")

# For n2 = 0 the median of 80 normals has E|M| close to sigma1 / sqrt(n1).
print("sigma1/sqrt(n1) =", round(SIGMA1 / math.sqrt(N1), 1))

# %% Smallest n2 with E|M| <= 5.
print("first n2 with E|M| <= 5:", next(n2 for n2, est in rows if est.mean <= 5))

# %% What the guaranteed radius asks for.
# The radius is only valid below half the smallest scale, so any target
# above 0.5 gives the same answer.
for target in (1.0, 0.3, 0.2):
    n2, radius = plan_n2(N1, SIGMA1, SIGMA2, target, t=1.0)
    print(f"radius <= {target}: n2 >= {n2} (radius {radius:.3f}, prob >= {1 - 2 * math.exp(-2):.3f})")

# %% Optional plot.
try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    sys.exit(0)

fig, ax = plt.subplots(figsize=(6, 4))
ax.semilogy([r[0] for r in rows], [r[1].mean for r in rows], marker=".")
ax.set_xlabel("n2 (draws with scale 1)")
ax.set_ylabel("E|median|")
ax.set_title(f"{N1} draws at scale {SIGMA1:g} plus n2 at scale {SIGMA2:g}")
out = Path(__file__).with_suffix(".png")
fig.savefig(out, dpi=120, bbox_inches="tight")
print("saved", out.name)
