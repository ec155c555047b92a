"""Turning a weak learner into a sample compression scheme.

Pipeline for a realizable sample ``S``:

1. ``build_pool``: run the learner on every size-d multiset of examples of S.
2. ``solve_game``: find a mixture ``p`` over the pool under which every
   sample position is classified correctly with probability > 1/2
   (multiplicative weights, exact LP as fallback).
3. ``derandomized_cover``: draw ``T = max(1, ceil(20 ln m))`` pool members
   from ``p`` until every position gets a strict majority of correct votes.
4. ``encode``: keep the union ``S'`` of the chosen members' training
   examples; the side bits say which examples of ``S'`` each member was
   trained on.
5. ``reconstruct``: retrain the T members and take the pointwise majority.

``to_agnostic`` wraps any realizable scheme into an agnostic one under the
zero/one loss.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from itertools import combinations_with_replacement
from typing import Callable

import numpy as np
from scipy.optimize import linprog

from .bounds import HEADER_BITS, STREAM_COVER, block_rng, cover_length, predicted_compression_size
from .core import (
    FiniteClass,
    Hypothesis,
    LossFunction,
    Sample,
    empirical_risk,
    erm,
)
from .errors import (
    BudgetExhausted,
    PreconditionError,
    SchemeContractError,
    UnsupportedLossError,
    WeakLearnerViolation,
)
from .selection import CompressionOutput, SelectionScheme, apply

log = logging.getLogger(__name__)

DEFAULT_POOL_CAP = 200_000
DEFAULT_SLACK = 1 / 12
COVER_RETRY_CAP = 10_000
FIELD_BITS = HEADER_BITS // 3


@dataclass(frozen=True)
class WeakLearner:
    """Deterministic learner using ``d`` examples (error 1/3, confidence 2/3)."""

    learn: Callable[[Sample], Hypothesis]
    d: int
    name: str = "learner"

    def __post_init__(self):
        if self.d < 1:
            raise PreconditionError("weak learner sample size d must be >= 1")


def erm_learner(H: FiniteClass, d: int, loss: LossFunction | None = None) -> WeakLearner:
    """ERM over ``H`` run on d examples."""
    loss = loss or LossFunction.zero_one()
    return WeakLearner(lambda S: erm(H, S, loss)[0], d, name=f"erm(d={d})")


@dataclass(frozen=True)
class HypothesisPool:
    hypotheses: tuple[Hypothesis, ...]
    provenance: tuple[tuple[int, ...], ...]  # sorted sample positions, one multiset per member

    def __len__(self):
        return len(self.hypotheses)

    def correctness(self, S: Sample) -> np.ndarray:
        """``A[i, j] = 1`` iff member j labels position i correctly."""
        tables = np.array([h.table for h in self.hypotheses], dtype=np.int64)
        return (tables[:, S.xs] == S.ys[None, :]).T.astype(float)


def _first_occurrences(S: Sample) -> list[int]:
    seen = {}
    for i, z in enumerate(S):
        seen.setdefault(z, i)
    return sorted(seen.values())


def build_pool(A: WeakLearner, S: Sample, cap: int = DEFAULT_POOL_CAP) -> HypothesisPool:
    """Outputs of the learner on all size-d multisets of examples of ``S``.

    The learner sees only example values, so multisets are enumerated over
    distinct examples (represented by their first position). Members are
    deduplicated by table, keeping the lexicographically lowest provenance.
    """
    reps = _first_occurrences(S)
    count = math.comb(len(reps) + A.d - 1, A.d)
    if count > cap:
        raise PreconditionError(
            f"pool enumeration needs {count} learner calls (cap {cap}); lower d or m"
        )
    found: dict[tuple[int, ...], tuple[int, ...]] = {}
    for combo in combinations_with_replacement(reps, A.d):
        h = A.learn(S.subsample(combo))
        found.setdefault(h.table, combo)
    return HypothesisPool(tuple(Hypothesis(t) for t in found), tuple(found.values()))


@dataclass(frozen=True)
class GamePlan:
    p: np.ndarray
    margin: float
    method: str = "mw"
    iterations: int = 0
    upper: float = 1.0  # certified upper bound on the game value


def _margin(A: np.ndarray, p: np.ndarray) -> float:
    return float((A @ p).min())


def _solve_exact(A: np.ndarray) -> tuple[np.ndarray, float]:
    m, n = A.shape
    c = np.zeros(n + 1)
    c[-1] = -1.0
    A_ub = np.hstack([-A, np.ones((m, 1))])
    A_eq = np.hstack([np.ones((1, n)), np.zeros((1, 1))])
    res = linprog(c, A_ub=A_ub, b_ub=np.zeros(m), A_eq=A_eq, b_eq=[1.0],
                  bounds=[(0, None)] * n + [(None, None)], method="highs")
    if not res.success:
        raise SchemeContractError(f"exact game solve failed: {res.message}")
    p = np.clip(res.x[:n], 0, None)
    return p / p.sum(), float(res.x[-1])


def solve_game(pool: HypothesisPool, S: Sample, slack: float = DEFAULT_SLACK,
               max_iter: int = 5000, eta: float = 0.25) -> GamePlan:
    """Mixture over the pool with certified margin ``>= 2/3 - slack``.

    Rows of the game are sample positions, columns pool members. The row
    player runs multiplicative weights against the column player's best
    responses; the empirical mixture of best responses is the plan. If the
    target margin is not reached the game is solved exactly by LP, and a
    value of at most 1/2 raises :class:`WeakLearnerViolation`.
    """
    if len(pool) == 0:
        raise PreconditionError("empty hypothesis pool")
    A = pool.correctness(S)
    m, n = A.shape
    target = 2 / 3 - slack
    logw = np.zeros(m)
    counts = np.zeros(n)
    acc = np.zeros(m)
    upper = 1.0
    t = 0
    for t in range(1, max_iter + 1):
        w = np.exp(logw - logw.max())
        w /= w.sum()
        scores = w @ A
        j = int(np.argmax(scores))
        upper = min(upper, float(scores[j]))
        counts[j] += 1
        acc += A[:, j]
        logw -= eta * A[:, j]
        if acc.min() / t >= target:
            break
        if upper <= 0.5:
            raise WeakLearnerViolation(
                f"game value is at most {upper:.4f} <= 1/2: the learner is not a weak learner on this sample",
                value=upper,
            )
    p = counts / t
    margin = _margin(A, p)
    if margin >= target:
        return GamePlan(p, margin, "mw", t, upper)
    p, value = _solve_exact(A)
    margin = _margin(A, p)
    if margin <= 0.5 + 1e-12:
        raise WeakLearnerViolation(
            f"game value {value:.6f} <= 1/2: the learner is not a weak learner on this sample",
            value=value,
        )
    log.debug("multiplicative weights stalled at margin %.4f; exact LP gives %.4f", acc.min() / t, margin)
    return GamePlan(p, margin, "lp", t, min(upper, value))


@dataclass(frozen=True)
class CoverEncoding:
    T: int
    d: int
    chosen: tuple[int, ...]  # pool indices h_1..h_T
    provenance: tuple[tuple[int, ...], ...]  # S_1..S_T as sample positions
    retries: int = 0

    @property
    def union_subsample(self) -> tuple[int, ...]:
        return tuple(sorted({i for prov in self.provenance for i in prov}))


def derandomized_cover(plan: GamePlan, pool: HypothesisPool, S: Sample, seed: int,
                       retry_cap: int = COVER_RETRY_CAP, d: int | None = None) -> CoverEncoding:
    """Draw T members from the plan until every position has a strict majority of correct votes.

    Attempt ``a`` draws from ``SeedSequence(seed, spawn_key=(STREAM_COVER, a))``.
    """
    if plan.margin <= 0.5:
        raise PreconditionError("cover needs a plan with margin > 1/2")
    A = pool.correctness(S)
    T = cover_length(len(S))
    p = np.clip(plan.p, 0, None)
    p = p / p.sum()
    worst = (None, T + 1)
    for attempt in range(retry_cap):
        chosen = block_rng(seed, STREAM_COVER, attempt).choice(len(pool), size=T, p=p)
        votes = A[:, chosen].sum(axis=1)
        if (2 * votes > T).all():
            return CoverEncoding(
                T,
                d if d is not None else len(pool.provenance[0]),
                tuple(int(c) for c in chosen),
                tuple(pool.provenance[c] for c in chosen),
                attempt,
            )
        i = int(np.argmin(votes))
        if votes[i] < worst[1]:
            worst = (i, int(votes[i]))
    raise BudgetExhausted(
        f"no majority cover after {retry_cap} draws",
        {"worst_position": worst[0], "min_correct_votes": worst[1], "T": T},
    )


# ------------------------------------------------------------ encoding


def slot_width(s: int) -> int:
    return math.ceil(math.log2(max(2, s)))


def encode(S: Sample, cover: CoverEncoding) -> CompressionOutput:
    """Keep ``S'`` = union of the provenance multisets; bits = header + T*d slot indices into ``S'``."""
    union = cover.union_subsample
    pos = {i: r for r, i in enumerate(union)}
    width = slot_width(len(union))
    for value in (cover.d, cover.T, len(union)):
        if value >= 2**FIELD_BITS:
            raise SchemeContractError(f"header field overflow: {value}")
    bits = [format(cover.d, f"0{FIELD_BITS}b"), format(cover.T, f"0{FIELD_BITS}b"),
            format(len(union), f"0{FIELD_BITS}b")]
    for prov in cover.provenance:
        bits.extend(format(pos[i], f"0{width}b") for i in prov)
    return CompressionOutput(union, "".join(bits))


def decode(bits: str) -> tuple[int, int, int, list[tuple[int, ...]]]:
    """Inverse of :func:`encode`'s side information: ``(d, T, |S'|, slots)``."""
    if len(bits) < HEADER_BITS:
        raise SchemeContractError("side information shorter than its header")
    d, T, s = (int(bits[k * FIELD_BITS:(k + 1) * FIELD_BITS], 2) for k in range(3))
    width = slot_width(s)
    body = bits[HEADER_BITS:]
    if len(body) != d * T * width:
        raise SchemeContractError(
            f"side information body has {len(body)} bits, header implies {d * T * width}"
        )
    idx = [int(body[k:k + width], 2) for k in range(0, len(body), width)]
    if any(i >= s for i in idx):
        raise SchemeContractError("slot index points outside the kept sub-sample")
    return d, T, s, [tuple(idx[t * d:(t + 1) * d]) for t in range(T)]


def majority_vote(hypotheses, n_labels: int | None = None) -> Hypothesis:
    """Pointwise plurality; ties go to the lowest label index."""
    tables = np.array([h.table for h in hypotheses], dtype=np.int64)
    n_labels = n_labels or int(tables.max()) + 1
    votes = np.zeros((n_labels, tables.shape[1]), dtype=np.int64)
    for row in tables:
        votes[row, np.arange(tables.shape[1])] += 1
    return Hypothesis(tuple(np.argmax(votes, axis=0)))


def reconstruct(A: WeakLearner, subsample: Sample, bits: str) -> Hypothesis:
    d, T, s, slots = decode(bits)
    if s != len(subsample):
        raise SchemeContractError(f"header declares |S'|={s}, got {len(subsample)} examples")
    if T == 0:
        return A.learn(subsample)
    cache: dict[tuple[int, ...], Hypothesis] = {}
    members = []
    for slot in slots:
        if slot not in cache:
            cache[slot] = A.learn(subsample.subsample(slot))
        members.append(cache[slot])
    return majority_vote(members)


@dataclass(frozen=True)
class BoostResult:
    output: CompressionOutput
    hypothesis: Hypothesis
    size: int
    predicted_size: int
    T: int
    margin: float
    retries: int
    pool_size: int
    solver: str
    empirical_risk: float

    def to_json(self) -> dict:
        return {
            **self.output.to_json(),
            "size": self.size,
            "predicted_size": self.predicted_size,
            "T": self.T,
            "margin": self.margin,
            "retries": self.retries,
            "pool_size": self.pool_size,
            "solver": self.solver,
            "empirical_risk": self.empirical_risk,
            "hypothesis": list(self.hypothesis.table),
        }


def compress_realizable(A: WeakLearner, S: Sample, seed: int = 0,
                        pool_cap: int = DEFAULT_POOL_CAP, slack: float = DEFAULT_SLACK) -> BoostResult:
    """Full pipeline on a realizable sample."""
    predicted = predicted_compression_size(A.d, len(S))
    zero_one = LossFunction.zero_one()
    if len(S) == 0:
        header = format(A.d, f"0{FIELD_BITS}b") + "0" * (2 * FIELD_BITS)
        out = CompressionOutput((), header)
        h = reconstruct(A, S, header)
        return BoostResult(out, h, out.size, predicted, 0, 1.0, 0, 0, "none", 0.0)
    pool = build_pool(A, S, pool_cap)
    plan = solve_game(pool, S, slack)
    cover = derandomized_cover(plan, pool, S, seed, d=A.d)
    out = encode(S, cover)
    h = reconstruct(A, S.subsample(out.indices), out.side_info)
    return BoostResult(out, h, out.size, predicted, cover.T, plan.margin, cover.retries,
                       len(pool), plan.method, empirical_risk(h, S, zero_one))


def boost_scheme(A: WeakLearner, pool_cap: int = DEFAULT_POOL_CAP,
                 slack: float = DEFAULT_SLACK) -> SelectionScheme:
    return SelectionScheme(
        kappa=lambda S, seed=0: compress_realizable(A, S, seed, pool_cap, slack).output,
        rho=lambda sub, bits: reconstruct(A, sub, bits),
        declared_size=lambda m: predicted_compression_size(A.d, m),
        name=f"boost[{A.name}]",
    )


# ------------------------------------------------------------ agnostic wrapper

AGNOSTIC_LOSS_MESSAGE = (
    "the realizable-to-agnostic conversion is only valid under the zero/one loss; "
    "with a three-valued loss a class can have a size-1 realizable compression scheme "
    "and no small approximate agnostic one (see samplecomp.separation)"
)


def to_agnostic(realizable_scheme: SelectionScheme, H: FiniteClass, S: Sample,
                loss: LossFunction | None = None, seed: int = 0):
    """Compress the part of ``S`` on which an ERM hypothesis is correct.

    Returns ``(output, hypothesis)`` with output indices referring to ``S``.
    """
    loss = loss or LossFunction.zero_one()
    if loss.kind != "zero_one":
        raise UnsupportedLossError(AGNOSTIC_LOSS_MESSAGE)
    h_star, _ = erm(H, S, loss)
    agree = np.flatnonzero(h_star.as_array()[S.xs] == S.ys) if len(S) else np.array([], dtype=int)
    out_t, h = apply(realizable_scheme, S.subsample(agree), seed)
    out = CompressionOutput(tuple(int(agree[i]) for i in out_t.indices), out_t.side_info)
    return out, h


def agnostic_scheme(realizable_scheme: SelectionScheme, H: FiniteClass,
                    loss: LossFunction | None = None) -> SelectionScheme:
    loss = loss or LossFunction.zero_one()
    if loss.kind != "zero_one":
        raise UnsupportedLossError(AGNOSTIC_LOSS_MESSAGE)
    return SelectionScheme(
        kappa=lambda S, seed=0: to_agnostic(realizable_scheme, H, S, loss, seed)[0],
        rho=realizable_scheme.rho,
        declared_size=realizable_scheme.declared_size,
        name=f"agnostic[{realizable_scheme.name}]",
    )
