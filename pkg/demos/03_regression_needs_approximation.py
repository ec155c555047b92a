"""Why zero-dimensional regression has no exact compression, but an approximate one.

Averages of different subsets of {1/sqrt(p)} are all distinct, so an exact
scheme would have to encode which subset it saw. Counting shows that is
impossible once M is large. Averaging ceil(1/eps) random points, on the
other hand, is always eps-close to the best constant.
"""
import numpy as np

from samplecomp.core import RealSample
from samplecomp.regression import (
    QuadraticIrrationalSet,
    approx_compress,
    distinct_averages_check,
    find_average_collision,
    first_primes,
    infeasibility_onset,
)

omega = QuadraticIrrationalSet.from_primes(first_primes(6))
print("radicals:", [round(v, 4) for v in omega.values()])
print("all 3-subset averages distinct:", distinct_averages_check(omega, 3))
print("rational control collision:", find_average_collision(QuadraticIrrationalSet.rational([0.1, 0.2, 0.3, 0.4]), 2))

for m, k in [(10, 5), (20, 10)]:
    print(f"m={m}, size k={k}: counting rules out exact compression from M={infeasibility_onset(m, k, 5000)}")

rng = np.random.default_rng(0)
S = RealSample(rng.beta(0.5, 0.5, size=40))
for eps in (0.5, 0.2, 0.1, 0.05):
    res = approx_compress(S, eps, seed=1)
    print(f"eps={eps:<5} slots={len(res.slots):>3} kept={len(res.output.indices):>3} "
          f"L_S={res.loss:.4f} L*={res.l_star:.4f} gap={res.gap:.4f}")
