"""Constant functions into small subsets, scored by the intersection loss.

Labels are subsets of ``{1..M}`` of size at most ``K``. Realizable samples
carry a single label, so keeping one example is a compression scheme. The
agnostic side fails: on ``K`` singleton labels ``{a_1},...,{a_K}`` the union
label costs 1/2, while any reconstruction that meets ``A`` in at most
``K/2`` elements costs at least 3/4. :func:`adversary_search` looks for such
a sample against a concrete scheme.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations, islice

from .core import (
    TOL,
    FiniteClass,
    Hypothesis,
    LabelUniverse,
    LossFunction,
    Sample,
    intersection_loss,
)
from .errors import PreconditionError
from .selection import CompressionOutput, SelectionScheme, apply, observed_size

BEST_RISK_CAP = 200_000


@dataclass(frozen=True)
class SeparationInstance:
    M: int
    K: int
    x: int = 0  # the domain point every sample uses

    def __post_init__(self):
        if not self.M >= self.K >= 1:
            raise PreconditionError("need M >= K >= 1")
        if not 0 <= self.x < self.M:
            raise PreconditionError("x must be a domain index in [0, M)")

    @cached_property
    def universe(self) -> LabelUniverse:
        return LabelUniverse.subsets(self.M, self.K)

    @cached_property
    def loss(self) -> LossFunction:
        return LossFunction.intersection(self.universe)

    def label(self, elements) -> int:
        """Universe index of a subset label."""
        key = tuple(sorted(set(int(e) for e in elements)))
        if len(key) > self.K or any(not 1 <= e <= self.M for e in key):
            raise PreconditionError(f"{key} is not a subset of 1..{self.M} of size <= {self.K}")
        return self.universe.index(key)

    def constant(self, elements) -> Hypothesis:
        return Hypothesis.constant(self.label(elements), self.M)

    def hypothesis_class(self) -> FiniteClass:
        return FiniteClass(self.M, self.universe,
                           (Hypothesis.constant(i, self.M) for i in range(len(self.universe))))

    def sample(self, labels) -> Sample:
        """Sample at the fixed point ``x`` with the given subset labels."""
        return Sample([self.x] * len(labels), [self.label(lab) for lab in labels])

    def label_sets(self, S: Sample) -> list[tuple[int, ...]]:
        return [self.universe[int(y)] for y in S.ys]


def singleton_sample(inst: SeparationInstance, A) -> Sample:
    A = sorted(A)
    if len(A) != inst.K or len(set(A)) != inst.K:
        raise PreconditionError(f"A must be a {inst.K}-subset")
    return inst.sample([(a,) for a in A])


def risk_of_label(inst: SeparationInstance, S: Sample, R) -> float:
    R = frozenset(R)
    sets = inst.label_sets(S)
    return sum(intersection_loss(R, B) for B in sets) / len(sets)


def best_constant_risk(S: Sample, inst: SeparationInstance) -> tuple[float, tuple[int, ...]]:
    """Exact minimum risk over constant labels, and a minimising label.

    Only elements occurring in ``S`` can help (extra elements never create
    an intersection and can only spoil equality), so the search runs over
    subsets of those elements of size at most K.
    """
    if len(S) == 0:
        raise PreconditionError("best constant risk of an empty sample")
    sets = inst.label_sets(S)
    elems = sorted({e for B in sets for e in B})
    count = sum(math.comb(len(elems), j) for j in range(min(inst.K, len(elems)) + 1))
    if count > BEST_RISK_CAP:
        raise PreconditionError(f"{count} candidate labels exceed the search cap")
    best, arg = math.inf, ()
    for j in range(min(inst.K, len(elems)) + 1):
        for R in combinations(elems, j):
            r = frozenset(R)
            risk = sum(intersection_loss(r, B) for B in sets) / len(sets)
            if risk < best - TOL:
                best, arg = risk, R
    return best, arg


def overlap_risk(K: int, T: int) -> float:
    """Risk on a singleton sample of a label meeting its K elements in exactly T of them."""
    return (T * 0.5 + (K - T)) / K


# ------------------------------------------------------------ schemes


def realizable_scheme(inst: SeparationInstance) -> SelectionScheme:
    """Keep the first example; reconstruct the constant function with its label."""
    def kappa(S, seed=0):
        return CompressionOutput((0,) if len(S) else ())

    def rho(sub, bits):
        return Hypothesis.constant(int(sub.ys[0]) if len(sub) else 0, inst.M)

    return SelectionScheme(kappa, rho, declared_size=lambda m: min(m, 1), name="first-label")


def _keep_first(T):
    def kappa(S, seed=0):
        return CompressionOutput(tuple(range(min(T, len(S)))))
    return kappa


def union_scheme(inst: SeparationInstance, T: int) -> SelectionScheme:
    """Keep the first T examples; reconstruct the union of their labels (smallest K elements)."""
    def rho(sub, bits):
        elems = sorted({e for B in inst.label_sets(sub) for e in B})[: inst.K]
        return inst.constant(elems)

    return SelectionScheme(_keep_first(T), rho, declared_size=lambda m: min(m, T),
                           name=f"union(T={T})", meta={"T": T})


def superset_scheme(inst: SeparationInstance, T: int) -> SelectionScheme:
    """Keep the first T examples; pad the union of their labels with the smallest other elements up to size K."""
    def rho(sub, bits):
        kept = sorted({e for B in inst.label_sets(sub) for e in B})[: inst.K]
        pad = [e for e in range(1, inst.M + 1) if e not in kept][: inst.K - len(kept)]
        return inst.constant(kept + pad)

    return SelectionScheme(_keep_first(T), rho, declared_size=lambda m: min(m, T),
                           name=f"superset(T={T})", meta={"T": T})


SCHEMES = {"union": union_scheme, "superset": superset_scheme}


# ------------------------------------------------------------ adversary


def color_of(scheme: SelectionScheme, inst: SeparationInstance, A, seed: int = 0):
    """``(kept positions within A, side bits)`` for the singleton sample of A; positions are 0-based."""
    out, _ = apply(scheme, singleton_sample(inst, A), seed)
    return out.indices, out.side_info


@dataclass
class AdversaryResult:
    found: bool
    M: int
    K: int
    examined: int
    A: tuple[int, ...] | None = None
    sample: Sample | None = None
    risk: float | None = None
    best_risk: float | None = None
    gap: float | None = None
    phase: int | None = None
    max_gap: float = -math.inf
    colors: Counter = field(default_factory=Counter)

    def to_json(self) -> dict:
        obj = {
            "found": self.found,
            "M": self.M,
            "K": self.K,
            "examined": self.examined,
            "max_gap": self.max_gap,
            "colors": [
                {"positions": list(pos), "bits": bits, "count": n}
                for (pos, bits), n in sorted(self.colors.items(), key=lambda kv: (-kv[1], kv[0]))
            ],
        }
        if self.found:
            obj.update({"A": list(self.A), "risk": self.risk, "best_risk": self.best_risk,
                        "gap": self.gap, "phase": self.phase,
                        "sample": [[int(x), [a]] for x, a in zip(self.sample.xs, self.A)]})
        return obj


def _gap(scheme, inst, A, seed):
    S = singleton_sample(inst, A)
    out, h = apply(scheme, S, seed)
    risk = float(inst.loss.pairwise(h(inst.x), S.ys).mean())
    best, _ = best_constant_risk(S, inst)
    return S, out, risk, best


def _separated(points, V, K) -> bool:
    """Every gap of V cut out by ``points`` (including both ends) holds more than 2K elements."""
    pos = [V.index(p) for p in points]
    edges = [-1] + pos + [len(V)]
    return all(b - a - 1 > 2 * K for a, b in zip(edges, edges[1:]))


def adversary_search(scheme: SelectionScheme, inst: SeparationInstance, budget: int,
                     seed: int = 0, threshold: float = 0.25) -> AdversaryResult:
    """Search for a singleton sample where the scheme loses ``>= threshold`` to the best constant.

    Phase 1 scans K-subsets in lexicographic order (at most ``budget`` of
    them). Phase 2 takes the largest color class seen and tries the
    structured construction: spread-out kept points ``A'`` in the class's
    vertex set, the label ``R`` they reconstruct to, and a K-set ``A`` with
    ``A'`` at the class positions and ``R ∩ A = A'``. Schemes larger than K/2
    on length-K inputs are rejected.
    """
    K = inst.K
    if scheme.declared_size is not None and scheme.declared_size(K) > K / 2:
        raise PreconditionError(f"scheme size {scheme.declared_size(K)} exceeds K/2 = {K / 2}")
    res = AdversaryResult(False, inst.M, K, 0)
    members: dict[tuple, list[tuple[int, ...]]] = {}

    def consider(A, phase):
        S, out, risk, best = _gap(scheme, inst, A, seed)
        if observed_size(out) > K / 2:
            raise PreconditionError(f"scheme used size {observed_size(out)} > K/2 on {A}")
        res.examined += 1
        color = (out.indices, out.side_info)
        res.colors[color] += 1
        members.setdefault(color, []).append(tuple(A))
        res.max_gap = max(res.max_gap, risk - best)
        if risk - best >= threshold - TOL:
            res.found, res.A, res.sample = True, tuple(A), S
            res.risk, res.best_risk, res.gap, res.phase = risk, best, risk - best, phase
            return True
        return False

    for A in islice(combinations(range(1, inst.M + 1), K), budget):
        if consider(A, 1):
            return res
    if not members:
        return res

    color = max(members, key=lambda c: (len(members[c]), c))
    positions, bits = color
    V = sorted({a for A in members[color] for a in A})
    T = len(positions)
    tried = set(members[color])
    spent = 0
    for A_prime in combinations(V, T):
        if spent >= budget:
            break
        if T and not _separated(A_prime, V, K):
            continue
        sub = singleton_sample_at(inst, A_prime)
        R = set(inst.universe[scheme.rho(sub, bits)(inst.x)])
        # fill the non-kept coordinates from V \ R so that R ∩ A = A'
        free = [v for v in V if v not in R and v not in A_prime]
        for A in _completions(A_prime, positions, free, K):
            if spent >= budget:
                break
            if A in tried:
                continue
            tried.add(A)
            spent += 1
            if color_of(scheme, inst, A, seed) != color:
                continue
            if consider(A, 2):
                return res
    return res


def singleton_sample_at(inst: SeparationInstance, points) -> Sample:
    return inst.sample([(a,) for a in sorted(points)])


def _completions(A_prime, positions, free, K):
    """K-sets with ``A_prime`` at sorted ``positions`` and the rest drawn from ``free``."""
    slots = [i for i in range(K) if i not in positions]
    for rest in combinations(free, len(slots)):
        A = sorted(set(rest) | set(A_prime))
        if len(A) == K and tuple(A[i] for i in positions) == tuple(sorted(A_prime)):
            yield tuple(A)
