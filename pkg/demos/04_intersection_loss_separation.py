"""A class with a size-1 realizable scheme but no small agnostic one.

Labels are subsets of {1..M} of size at most K, scored by the intersection
loss. On a sample of K singleton labels, the union costs 1/2 while any label
that meets the sample in at most K/2 elements costs at least 3/4.
"""
from samplecomp.separation import (
    SeparationInstance,
    adversary_search,
    best_constant_risk,
    overlap_risk,
    singleton_sample,
    superset_scheme,
    union_scheme,
)

inst = SeparationInstance(M=24, K=4)
S = singleton_sample(inst, (3, 8, 15, 20))
print("best constant on a singleton sample:", best_constant_risk(S, inst))
print("risk of a size-K label meeting A in T elements:", {T: overlap_risk(4, T) for T in range(5)})
# union(T=1) reconstructs the singleton {a_1}, which equals the first label exactly,
# so it scores 3/4 rather than 7/8; still a gap of 1/4 over the union label

for make, T in [(union_scheme, 1), (union_scheme, 2), (superset_scheme, 1), (superset_scheme, 2)]:
    scheme = make(inst, T)
    res = adversary_search(scheme, inst, budget=5000)
    if res.found:
        print(f"{scheme.name:>16}: A={res.A} risk={res.risk} best={res.best_risk} "
              f"gap={res.gap} (phase {res.phase}, {res.examined} examined)")
    else:
        print(f"{scheme.name:>16}: exhausted, max gap {res.max_gap}")
