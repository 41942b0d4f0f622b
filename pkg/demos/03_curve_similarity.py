"""How different are two roads? Discrete Frechet distance.

The discrete Frechet distance is the shortest leash that lets a walker
and a dog traverse their respective point sequences without backing up.
We use it to quantify how diverse a set of failing roads is: a cluster
of near-identical failures scores low, genuinely distinct geometries
score high.
"""
import numpy as np

from roadsearch import ControlPointSet, RoadParams, build_road
from roadsearch.geometry import discrete_frechet, frechet_bruteforce
from roadsearch.search import population_avg_frechet

# tiny sanity examples
print("identical lines:", discrete_frechet([[0, 0], [1, 0]], [[0, 0], [1, 0]]))
print("parallel lines 1 m apart:",
      discrete_frechet([[0, 0], [1, 0], [2, 0]], [[0, 1], [1, 1], [2, 1]]))

# the dynamic program agrees with exhaustive coupling enumeration
rng = np.random.default_rng(0)
worst = 0.0
for _ in range(100):
    p = rng.uniform(0, 10, (rng.integers(1, 6), 2))
    q = rng.uniform(0, 10, (rng.integers(1, 6), 2))
    worst = max(worst, abs(discrete_frechet(p, q) - frechet_bruteforce(p, q)))
print(f"dp vs brute force over 100 random pairs: max delta {worst:.2e}")

# distances between whole roads
params = RoadParams()


def centerline(points):
    return build_road(ControlPointSet(np.asarray(points, float), 200.0), params).centerline


base = [[10, 100], [40, 120], [70, 90], [100, 110], [130, 90], [160, 120], [190, 100]]
nudged = [[10, 100], [40, 122], [70, 88], [100, 112], [130, 88], [160, 122], [190, 100]]
different = [[10, 30], [40, 170], [70, 30], [100, 170], [130, 30], [160, 170], [190, 30]]

a, b, c = centerline(base), centerline(nudged), centerline(different)
print(f"nudged copy:    frechet = {discrete_frechet(a, b):7.2f} m")
print(f"different road: frechet = {discrete_frechet(a, c):7.2f} m")
print(f"population average over all three: "
      f"{population_avg_frechet([a, b, c]):.2f} m")
