"""From a weak learner to a sample compression scheme, step by step.

The learner is ERM over thresholds on 6 points, trained on d=2 examples.
We build the pool of everything it can output, solve the game for a good
mixture, draw a majority cover and encode it. The reconstruction only ever
sees the kept sub-sample and the side bits.
"""
import numpy as np

from samplecomp.boost_compress import (
    build_pool,
    decode,
    derandomized_cover,
    encode,
    erm_learner,
    reconstruct,
    solve_game,
)
from samplecomp.bounds import predicted_compression_size
from samplecomp.core import FiniteClass, LossFunction, Sample, empirical_risk

H = FiniteClass(6, [0, 1], [tuple(int(x >= t) for x in range(6)) for t in range(7)])
target = H[3]
rng = np.random.default_rng(0)
xs = rng.integers(0, 6, size=200)
S = Sample(xs, [target(int(x)) for x in xs])
A = erm_learner(H, d=2)

pool = build_pool(A, S)
print(f"pool: {len(pool)} distinct hypotheses from the learner")

plan = solve_game(pool, S)
print(f"game: margin {plan.margin:.3f} via {plan.method} after {plan.iterations} iterations")

cover = derandomized_cover(plan, pool, S, seed=0, d=A.d)
print(f"cover: T={cover.T} voters, accepted after {cover.retries} retries")

out = encode(S, cover)
d, T, s, slots = decode(out.side_info)
print(f"encoding: keep {len(out.indices)} of {len(S)} examples, {len(out.side_info)} side bits")
print(f"          size {out.size}, a-priori cap {predicted_compression_size(A.d, len(S))}")

h = reconstruct(A, S.subsample(out.indices), out.side_info)
print(f"reconstruction: {h.table}, empirical risk {empirical_risk(h, S, LossFunction.zero_one())}")
