"""How many samples make the empirical distribution close to uniform?

The smallest m that reaches SD <= 0.1 with frequency 0.75 grows roughly
linearly in the number of symbols d. For d=2 the frequency is an exact
binomial sum, which the Monte Carlo estimate should track.
"""
from samplecomp.bounds import exact_sd_probability_d2, sd_experiment, sd_threshold

for d in (2, 4, 8, 16):
    m, _ = sd_threshold(d, 0.1, trials=2000, seed=0)
    print(f"d={d:>2}: m threshold {m:>4}  (m/d = {m / d:.1f})")

for m in (10, 30, 100):
    r = sd_experiment(2, m, 0.1, 5000, seed=0)
    p = exact_sd_probability_d2(m, 0.1)
    print(f"d=2 m={m:>3}: Monte Carlo {r.success_frequency:.4f} +- {r.stderr:.4f}, exact {p:.4f}")
