import itertools
from fractions import Fraction

import pytest

from samplecomp.core import LossFunction, Sample, intersection_loss
from samplecomp.errors import PreconditionError
from samplecomp.selection import CompressionOutput, SelectionScheme, apply, observed_size, validate_approx, validate_realizable
from samplecomp.separation import (
    SeparationInstance,
    adversary_search,
    best_constant_risk,
    color_of,
    overlap_risk,
    realizable_scheme,
    risk_of_label,
    singleton_sample,
    superset_scheme,
    union_scheme,
)


def brute_best(inst, S):
    return min(risk_of_label(inst, S, R) for R in inst.universe)


def test_realizable_scheme_example():
    inst = SeparationInstance(6, 3)
    S = inst.sample([(1, 4)] * 5)
    out, h = apply(realizable_scheme(inst), S)
    assert out.indices == (0,) and out.side_info == ""
    assert inst.universe[h(0)] == (1, 4)


def test_realizable_scheme_exhaustive():
    for M, K in [(4, 2), (5, 3), (6, 3)]:
        inst = SeparationInstance(M, K)
        H = inst.hypothesis_class()
        corpus = [Sample([x] * m, [y] * m) for y in range(len(inst.universe)) for m in (1, 2, 4)
                  for x in (0, M - 1)]
        scheme = realizable_scheme(inst)
        assert validate_realizable(scheme, H, inst.loss, corpus) is None
        assert all(observed_size(apply(scheme, S)[0]) == 1 for S in corpus)


def test_singleton_sample_best_risk():
    inst = SeparationInstance(8, 3)
    S = singleton_sample(inst, {1, 2, 3})
    assert len(S) == 3
    risk, label = best_constant_risk(S, inst)
    assert risk == 0.5 and label == (1, 2, 3)
    assert best_constant_risk(inst.sample([(2, 5)] * 4), inst)[0] == 0.0


def test_best_constant_risk_vs_brute(rng):
    inst = SeparationInstance(6, 3)
    for _ in range(80):
        m = int(rng.integers(1, 6))
        labels = [inst.universe[int(rng.integers(1, len(inst.universe)))] for _ in range(m)]
        S = inst.sample(labels)
        assert best_constant_risk(S, inst)[0] == brute_best(inst, S)


def test_overlap_risk_identity():
    for K in range(2, 9):
        inst = SeparationInstance(2 * K + 2, K)
        A = tuple(range(1, K + 1))
        S = singleton_sample(inst, A)
        for T in range(0, K + 1):
            R = A[:T] + tuple(range(K + 1, 2 * K + 1 - T))[: K - T]
            assert risk_of_label(inst, S, R) == overlap_risk(K, T)
            if 2 * T <= K:
                assert Fraction(T, 2 * K) + Fraction(K - T, K) >= Fraction(3, 4)


def test_color_of_truncation_constant():
    inst = SeparationInstance(8, 4)
    scheme = union_scheme(inst, 2)
    colors = {color_of(scheme, inst, A) for A in itertools.combinations(range(1, 9), 4)}
    assert colors == {((0, 1), "")}


def test_color_count_audit():
    inst = SeparationInstance(9, 4)

    def kappa(S, seed=0):
        elems = [B[0] for B in inst.label_sets(S)]
        keep = tuple(i for i, a in enumerate(elems) if a % 3 == 0)[:1]
        return CompressionOutput(keep, format(sum(elems) % 2, "b"))

    scheme = SelectionScheme(kappa, lambda sub, bits: inst.constant(()), declared_size=lambda m: 2)
    colors = {color_of(scheme, inst, A) for A in itertools.combinations(range(1, 10), 4)}
    assert len(colors) <= 4**2


def test_adversary_union_t1_immediate():
    inst = SeparationInstance(24, 4)
    res = adversary_search(union_scheme(inst, 1), inst, budget=1000)
    assert res.found and res.examined == 1 and res.phase == 1
    # the kept label {a_1} equals the first example's label, so that term costs 0, not 1/2
    assert res.risk == 3 / 4 and res.gap == 1 / 4


def test_adversary_rejects_large_schemes():
    inst = SeparationInstance(24, 4)
    with pytest.raises(PreconditionError):
        adversary_search(union_scheme(inst, 3), inst, budget=10)


def test_adversary_superset_scheme_reports():
    inst = SeparationInstance(24, 4)
    res = adversary_search(superset_scheme(inst, 2), inst, budget=2000)
    if res.found:
        S = res.sample
        out, h = apply(superset_scheme(inst, 2), S)
        recomputed = risk_of_label(inst, S, inst.universe[h(0)]) - brute_best_small(inst, S)
        assert recomputed >= 0.25
    else:
        assert res.colors and res.max_gap < 0.25


def brute_best_small(inst, S):
    elems = sorted({e for B in inst.label_sets(S) for e in B})
    return min(risk_of_label(inst, S, R) for j in range(inst.K + 1) for R in itertools.combinations(elems, j))


def test_adversary_phase_two():
    """A scheme that dodges the lexicographic prefix is caught by the structured phase."""
    inst = SeparationInstance(24, 4)

    def kappa(S, seed=0):
        return CompressionOutput((1,))

    def rho(sub, bits):
        a = inst.label_sets(sub)[0][0]
        # honest on the lexicographic prefix (A containing 1), union-like elsewhere
        return inst.constant((1, a, a + 1, a + 2) if a + 2 <= 24 and a > 1 else (a,))

    scheme = SelectionScheme(kappa, rho, declared_size=lambda m: min(m, 1))
    res = adversary_search(scheme, inst, budget=30)
    assert res.found
    S = res.sample
    _, h = apply(scheme, S)
    assert risk_of_label(inst, S, inst.universe[h(0)]) - brute_best_small(inst, S) >= 0.25


def test_truncation_scheme_counterexample():
    inst = SeparationInstance(10, 4)
    scheme = union_scheme(inst, 1)
    S = singleton_sample(inst, (1, 2, 3, 4))
    cex = validate_approx(scheme, inst.hypothesis_class(), inst.loss, [S], eps=0.2, agnostic=True)
    assert cex is not None and cex.risk - (cex.threshold - 0.2) >= 0.25
