"""
Granulating a small dataset
===========================

Build granular balls on a two-class toy set and look at what comes out.
"""

import numpy as np

from gbgpp import Dataset, GranulationConfig, granulate

rng = np.random.default_rng(0)
X = np.vstack([rng.normal(0, 0.6, (60, 2)), rng.normal(2, 0.6, (60, 2))])
y = np.repeat([0, 1], 60)
data = Dataset(X, y, name="two-blobs")

result = granulate(data)
print(f"{len(result.balls)} balls, {result.outliers.size} outliers, "
      f"{result.iterations} iterations, {result.distance_evaluations} distance evaluations")

# every ball is pure and every member lies inside its radius
for b in sorted(result.balls, key=lambda b: -b.size)[:5]:
    print(f"ball {b.ball_id:3d}  label={b.label}  size={b.size:3d}  radius={b.radius:.3f}  "
          f"center=({b.center[0]:.2f}, {b.center[1]:.2f})")

# members and outliers partition the data
covered = np.concatenate([b.members for b in result.balls] + [result.outliers])
assert np.array_equal(np.sort(covered), np.arange(data.n))

# the history shows how the impure part shrinks each iteration
for h in result.history:
    print(h)

# a lower purity threshold gives fewer, coarser balls
coarse = granulate(data, GranulationConfig(purity_threshold=0.8))
print(f"P=0.8: {len(coarse.balls)} balls")
