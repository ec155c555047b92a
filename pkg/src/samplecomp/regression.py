"""Zero-dimensional regression under the squared loss.

The class is all constant reals, so ERM is the sample mean and the optimal
loss is the population variance of the sample. Exact recovery of the mean
from a small sub-sample is impossible in general (every subset of a
Q-linearly independent set has its own average, and there are too many of
them to encode); averaging a random size-``ceil(1/eps)`` sub-sample with
repetition gets within ``eps`` of the optimum.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, combinations_with_replacement
from typing import Iterable, Sequence

import numpy as np

from .bounds import STREAM_REGRESS, block_rng
from .core import RealSample
from .errors import BudgetExhausted, EmptySampleError, PreconditionError
from .selection import CompressionOutput, SelectionScheme

RETRY_CAP = 10_000
EXHAUSTIVE_CAP = 100_000


class ConstantReals:
    """Hypothesis class of all constant predictions ``h in R``."""

    def erm(self, S: RealSample, loss=None) -> tuple[float, float]:
        return erm_average(S)


def erm_average(S: RealSample | Sequence[float]) -> tuple[float, float]:
    """Sample mean and its squared-loss risk (the population variance)."""
    vals = S.values if isinstance(S, RealSample) else np.asarray(S, dtype=float)
    if vals.size == 0:
        raise EmptySampleError("ERM of an empty regression sample")
    mean = float(vals.mean())
    return mean, float(np.mean((vals - mean) ** 2))


def slots_for(eps: float) -> int:
    if not 0 < eps <= 1:
        raise PreconditionError("eps must lie in (0, 1]")
    return math.ceil(1 / eps)


def _width(m: int) -> int:
    return math.ceil(math.log2(m)) if m > 1 else 0


def _encode(positions: Sequence[int], m: int) -> CompressionOutput:
    kept = sorted(set(positions))
    rank = {p: r for r, p in enumerate(kept)}
    w = _width(m)
    bits = "".join(format(rank[p], f"0{w}b") for p in positions) if w else ""
    return CompressionOutput(tuple(kept), bits)


def decode_slots(sub: RealSample, bits: str, slots: int) -> list[float]:
    """Slot values: each slot is an index into the kept values, fixed width."""
    if len(bits) % slots:
        raise PreconditionError("side information is not a whole number of slots")
    w = len(bits) // slots
    idx = [int(bits[k * w:(k + 1) * w], 2) for k in range(slots)] if w else [0] * slots
    return [sub[i] for i in idx]


@dataclass(frozen=True)
class ApproxCompression:
    output: CompressionOutput
    slots: tuple[int, ...]  # sample positions, with repetition
    hypothesis: float
    loss: float
    l_star: float
    attempts: int
    exhaustive: bool = False

    @property
    def gap(self) -> float:
        return self.loss - self.l_star

    def to_json(self) -> dict:
        return {
            **self.output.to_json(),
            "slots": list(self.slots),
            "hypothesis": self.hypothesis,
            "loss": self.loss,
            "l_star": self.l_star,
            "gap": self.gap,
            "attempts": self.attempts,
            "exhaustive": self.exhaustive,
            "size": self.output.size,
        }


def approx_compress(S: RealSample, eps: float, seed: int = 0) -> ApproxCompression:
    """Pick ``ceil(1/eps)`` positions (with repetition) whose mean is eps-optimal.

    Uses ``L_S(h) = L* + (h - mean)^2``: a candidate is accepted when its
    squared distance to the mean is at most eps. Random draws come first,
    then exhaustive search over multisets if that is small enough.
    """
    ell = slots_for(eps)
    mean, l_star = erm_average(S)
    vals = S.values
    m = len(vals)
    rng = block_rng(seed, STREAM_REGRESS)
    for attempt in range(RETRY_CAP):
        pos = np.sort(rng.integers(0, m, size=ell))
        h = float(vals[pos].mean())
        if (h - mean) ** 2 <= eps:
            return _result(S, pos, h, l_star, attempt + 1, False)
    if math.comb(m + ell - 1, ell) <= EXHAUSTIVE_CAP:
        for pos in combinations_with_replacement(range(m), ell):
            h = float(vals[list(pos)].mean())
            if (h - mean) ** 2 <= eps:
                return _result(S, np.array(pos), h, l_star, RETRY_CAP, True)
    raise BudgetExhausted(f"no eps-good sub-sample of size {ell} found", {"m": m, "eps": eps})


def _result(S, pos, h, l_star, attempts, exhaustive):
    out = _encode([int(p) for p in pos], len(S))
    loss = float(np.mean((h - S.values) ** 2))
    return ApproxCompression(out, tuple(int(p) for p in pos), h, loss, l_star, attempts, exhaustive)


def approx_scheme(eps: float) -> SelectionScheme:
    """The sub-sample-average scheme as a selection scheme over :class:`RealSample`."""
    ell = slots_for(eps)
    return SelectionScheme(
        kappa=lambda S, seed=0: approx_compress(S, eps, seed).output,
        rho=lambda sub, bits: float(np.mean(decode_slots(sub, bits, ell))),
        name=f"subsample-average(eps={eps})",
    )


# ------------------------------------------------------------ exact radicals


@dataclass(frozen=True)
class Surd:
    """Exact element ``sum_r c_r * sqrt(r)`` over square-free radicands ``r`` (1 = rational part)."""

    terms: tuple[tuple[int, Fraction], ...]

    @classmethod
    def of(cls, coeff, radicand: int = 1) -> "Surd":
        return cls(((radicand, Fraction(coeff)),)).normalized()

    def normalized(self) -> "Surd":
        acc: dict[int, Fraction] = {}
        for r, c in self.terms:
            acc[r] = acc.get(r, Fraction(0)) + c
        return Surd(tuple(sorted((r, c) for r, c in acc.items() if c != 0)))

    def __add__(self, other: "Surd") -> "Surd":
        return Surd(self.terms + other.terms).normalized()

    def scale(self, q) -> "Surd":
        q = Fraction(q)
        return Surd(tuple((r, c * q) for r, c in self.terms)).normalized()

    def __float__(self):
        return float(sum(float(c) * math.sqrt(r) for r, c in self.terms))


def _is_squarefree(n: int) -> bool:
    return n >= 1 and all(n % (p * p) for p in range(2, int(math.isqrt(n)) + 1))


def first_primes(n: int) -> list[int]:
    out, k = [], 2
    while len(out) < n:
        if all(k % p for p in out if p * p <= k):
            out.append(k)
        k += 1
    return out


class QuadraticIrrationalSet:
    """Finite set of exact values ``c * sqrt(r)`` in [0, 1].

    Built from distinct primes it is Q-linearly independent by construction;
    the rational constructor exists for negative controls.
    """

    def __init__(self, elements: Iterable[tuple[Fraction, int]]):
        self.elements = tuple((Fraction(c), int(r)) for c, r in elements)
        for c, r in self.elements:
            if not _is_squarefree(r):
                raise PreconditionError(f"radicand {r} is not square-free")
            if not 0 <= float(c) * math.sqrt(r) <= 1:
                raise PreconditionError(f"{c}*sqrt({r}) lies outside [0, 1]")

    @classmethod
    def from_primes(cls, primes: Sequence[int]) -> "QuadraticIrrationalSet":
        """Elements ``sqrt(p) / p = 1/sqrt(p)``."""
        if len(set(primes)) != len(primes):
            raise PreconditionError("primes must be distinct")
        return cls((Fraction(1, p), p) for p in primes)

    @classmethod
    def rational(cls, values: Sequence) -> "QuadraticIrrationalSet":
        return cls((Fraction(str(v)) if isinstance(v, float) else Fraction(v), 1) for v in values)

    @property
    def independent(self) -> bool:
        rads = [r for _, r in self.elements]
        return len(set(rads)) == len(rads) and all(c != 0 for c, _ in self.elements)

    def surds(self) -> list[Surd]:
        return [Surd.of(c, r) for c, r in self.elements]

    def values(self) -> list[float]:
        return [float(s) for s in self.surds()]

    def __len__(self):
        return len(self.elements)


def subset_average(elements: Sequence[Surd]) -> Surd:
    total = Surd(())
    for e in elements:
        total = total + e
    return total.scale(Fraction(1, len(elements)))


def find_average_collision(omega: QuadraticIrrationalSet, m: int):
    """First pair of distinct size-m subsets (as index tuples) with equal averages, or None."""
    if not 1 <= m <= len(omega):
        raise PreconditionError("need 1 <= m <= |omega|")
    if math.comb(len(omega), m) > EXHAUSTIVE_CAP:
        raise PreconditionError("too many subsets to enumerate")
    surds = omega.surds()
    seen: dict[Surd, tuple[int, ...]] = {}
    for idx in combinations(range(len(omega)), m):
        avg = subset_average([surds[i] for i in idx])
        if avg in seen:
            return seen[avg], idx
        seen[avg] = idx
    return None


def distinct_averages_check(omega: QuadraticIrrationalSet, m: int) -> bool:
    """True iff all size-m subset averages are pairwise distinct (exact arithmetic)."""
    return find_average_collision(omega, m) is None


def counting_infeasibility(M: int, m: int, k: int) -> tuple[bool, int, int]:
    """Whether ``C(M, m)`` distinct averages outnumber ``sum_{j<=k} C(M, j) * 2^k`` compressed images."""
    if not 0 <= k <= m <= M:
        raise PreconditionError("need k <= m <= M")
    lhs = math.comb(M, m)
    rhs = sum(math.comb(M, j) for j in range(k + 1)) * 2**k
    return lhs > rhs, lhs, rhs


def infeasibility_onset(m: int, k: int, M_max: int) -> int | None:
    """Smallest M <= M_max at which :func:`counting_infeasibility` holds."""
    for M in range(m, M_max + 1):
        if counting_infeasibility(M, m, k)[0]:
            return M
    return None
