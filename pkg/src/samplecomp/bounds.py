"""Closed-form generalization bounds and the Monte Carlo experiments that probe them.

All logarithms are natural unless a function says otherwise; every
:class:`BoundReport` records the base it used. Randomised experiments draw
their trials in fixed-size blocks, each block seeded from
``SeedSequence(seed, spawn_key=(stream, point, block))``, so any split of the
blocks across workers reproduces the serial result exactly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Sequence

import numpy as np
from scipy.special import gammaln

from .core import FiniteClass, FiniteDistribution, LossFunction
from .errors import PreconditionError

HEADER_BITS = 48  # three 16-bit fields (d, T, |S'|) prepended to the cover encoding
BLOCK = 500  # trials per independently seeded block

# stream ids for the seed split rule
STREAM_COVER = 1
STREAM_UC = 2
STREAM_SD = 3
STREAM_OVERFIT = 4
STREAM_REGRESS = 5


def block_rng(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key)))


def _blocks(trials: int):
    start = 0
    b = 0
    while start < trials:
        yield b, min(BLOCK, trials - start)
        start += BLOCK
        b += 1


@dataclass(frozen=True)
class BoundReport:
    epsilon: float
    formula: str
    inputs: dict = field(default_factory=dict)
    log: str = "natural"

    def to_json(self) -> dict:
        return {"formula": self.formula, "epsilon": self.epsilon, "inputs": dict(self.inputs), "log": self.log}


def _check_k_m_delta(k, m, delta):
    if k < 1:
        raise PreconditionError("k must be at least 1")
    if 2 * k > m:
        raise PreconditionError(f"k={k} exceeds m/2={m / 2}: outside the bound's regime")
    if not 0 < delta <= 1:
        raise PreconditionError("delta must lie in (0, 1]")


def selection_bound(k: int, m: int, delta: float) -> BoundReport:
    """Overfitting scale ``50 (k ln(m/k) + ln(1/delta)) / m`` for a size-k selection scheme."""
    _check_k_m_delta(k, m, delta)
    eps = 50 * (k * math.log(m / k) + math.log(1 / delta)) / m
    return BoundReport(eps, "selection", {"k": k, "m": m, "delta": delta})


def realizable_learning_bound(k: int, m: int, delta: float) -> BoundReport:
    _check_k_m_delta(k, m, delta)
    eps = 50 * (k * math.log(m / k) + k + math.log(1 / delta)) / m
    return BoundReport(eps, "realizable_learning", {"k": k, "m": m, "delta": delta})


def agnostic_learning_bound(k: int, m: int, delta: float) -> BoundReport:
    _check_k_m_delta(k, m, delta)
    eps = 100 * math.sqrt((k * math.log(m / k) + k + math.log(1 / delta)) / m)
    return BoundReport(eps, "agnostic_learning", {"k": k, "m": m, "delta": delta})


def approx_learning_bound(k: int, m: int, delta: float, eps_approx: float) -> BoundReport:
    """Excess risk of an eps-approximate scheme: ``eps + 100 sqrt((k ln(m/k) + ln(1/delta))/m)``."""
    _check_k_m_delta(k, m, delta)
    eps = eps_approx + 100 * math.sqrt((k * math.log(m / k) + math.log(1 / delta)) / m)
    return BoundReport(eps, "approx_learning", {"k": k, "m": m, "delta": delta, "eps": eps_approx})


def erm_deviation_bound(m: int, delta: float) -> float:
    if m < 1 or not 0 < delta <= 1:
        raise PreconditionError("need m >= 1 and delta in (0, 1]")
    return math.sqrt(math.log(1 / delta) / m)


def selection_overfit_bound(k: int, m: int, delta: float, empirical_risk: float) -> float:
    """Deviation threshold for one fixed reconstructed hypothesis ``h_{T,b}``."""
    if not 0 < delta <= 1 or m < 1:
        raise PreconditionError("need m >= 1 and delta in (0, 1]")
    lg = math.log(1 / delta)
    return math.sqrt(8 * empirical_risk * lg / m) + (16 * lg + k) / m


def uc_rate_bounds(d_graph: int, eps: float, delta: float, C1: float, C2: float) -> tuple[float, float]:
    """Lower and upper uniform-convergence sample sizes for given constants."""
    if not (0 < eps < 1 and 0 < delta < 1):
        raise PreconditionError("eps and delta must lie in (0, 1)")
    lower = C1 * (d_graph + math.log(1 / delta) - C1) / eps**2
    upper = C2 * (d_graph * math.log(1 / eps) + math.log(1 / delta)) / eps**2
    return lower, upper


def cover_length(m: int) -> int:
    """Number of majority voters ``T = max(1, ceil(20 ln m))``; 0 for an empty sample."""
    if m <= 0:
        return 0
    return max(1, math.ceil(20 * math.log(m)))


def predicted_compression_size(d: int, m: int, header_bits: int = HEADER_BITS) -> int:
    """A-priori cap on the boosted scheme's size.

    ``d*T + d*T*ceil(log2(max(2, d*T)))`` plus the in-band header, since the
    encoder spends at most ``d*T`` kept examples and ``d*T`` fixed-width slots.
    """
    if d < 1 or m < 0:
        raise PreconditionError("need d >= 1 and m >= 0")
    dT = d * cover_length(m)
    return dT + dT * math.ceil(math.log2(max(2, dT))) + header_bits


# ------------------------------------------------------------ uniform convergence


def _loss_matrix(H: FiniteClass, D: FiniteDistribution, loss: LossFunction) -> np.ndarray:
    return loss.pairwise(H.tables[:, D.support.xs], D.support.ys[None, :])


def _sup_deviation(lmat: np.ndarray, true: np.ndarray, freqs: np.ndarray) -> np.ndarray:
    return np.abs(freqs @ lmat.T - true[None, :]).max(axis=1)


def empirical_uc_violation(H: FiniteClass, D: FiniteDistribution, loss: LossFunction,
                           m: int, eps: float, trials: int, seed: int, point: int = 0) -> float:
    """Monte Carlo estimate of ``Pr(sup_h |L_D(h) - L_S(h)| > eps)``."""
    lmat = _loss_matrix(H, D, loss)
    true = lmat @ D.weights
    hits = 0
    for b, n in _blocks(trials):
        counts = block_rng(seed, STREAM_UC, point, b).multinomial(m, D.weights, size=n)
        hits += int((_sup_deviation(lmat, true, counts / m) > eps + 1e-12).sum())
    return hits / trials


def _compositions(m: int, parts: int):
    if parts == 1:
        yield (m,)
        return
    for first in range(m + 1):
        for rest in _compositions(m - first, parts - 1):
            yield (first,) + rest


def exact_uc_violation(H: FiniteClass, D: FiniteDistribution, loss: LossFunction,
                       m: int, eps: float) -> float:
    """Same probability by enumerating every type vector of an m-sample."""
    lmat = _loss_matrix(H, D, loss)
    true = lmat @ D.weights
    w = D.weights
    total = 0.0
    for c in _compositions(m, len(w)):
        c = np.array(c)
        if (c[w == 0] > 0).any():
            continue
        pos = w > 0
        logp = gammaln(m + 1) - gammaln(c + 1).sum() + (c[pos] * np.log(w[pos])).sum()
        if _sup_deviation(lmat, true, (c / m)[None, :])[0] > eps + 1e-12:
            total += math.exp(logp)
    return total


# ------------------------------------------------------------ statistical distance


@dataclass(frozen=True)
class SDExperimentResult:
    d: int
    m: int
    trials: int
    eps: float
    success_frequency: float

    @property
    def stderr(self) -> float:
        p = self.success_frequency
        return math.sqrt(max(p * (1 - p), 0.0) / self.trials)


def statistical_distance(p, q) -> float:
    return 0.5 * float(np.abs(np.asarray(p, float) - np.asarray(q, float)).sum())


def sd_experiment(d: int, m: int, eps: float, trials: int, seed: int) -> SDExperimentResult:
    """Frequency of ``SD(p_hat, uniform) <= eps`` over m uniform draws on d symbols."""
    if d < 1 or m < 1 or trials < 1:
        raise PreconditionError("need d, m, trials >= 1")
    probs = np.full(d, 1.0 / d)
    ok = 0
    for b, n in _blocks(trials):
        counts = block_rng(seed, STREAM_SD, d, m, b).multinomial(m, probs, size=n)
        sd = 0.5 * np.abs(counts / m - 1.0 / d).sum(axis=1)
        ok += int((sd <= eps + 1e-12).sum())
    return SDExperimentResult(d, m, trials, eps, ok / trials)


def sd_threshold(d: int, eps: float, trials: int, seed: int, target: float = 0.75,
                 m_max: int = 100_000) -> tuple[int, list[SDExperimentResult]]:
    """Smallest m (scanning 1, 2, ...) whose success frequency reaches ``target``."""
    history = []
    for m in range(1, m_max + 1):
        r = sd_experiment(d, m, eps, trials, seed)
        history.append(r)
        if r.success_frequency >= target:
            return m, history
    raise PreconditionError(f"no m <= {m_max} reached frequency {target}")


def exact_sd_probability_d2(m: int, eps: float) -> float:
    """``Pr(SD(p_hat, u) <= eps)`` for d = 2, where SD equals ``|K/m - 1/2|``."""
    return float(binomial_ball_probability(m, eps))


# ------------------------------------------------------------ binomial ball


def binomial_ball_probability(m: int, eps) -> Fraction:
    """Exact ``Pr(|sum X_i / m - 1/2| <= eps)`` for m fair coin flips."""
    eps_q = Fraction(eps)
    good = sum(math.comb(m, k) for k in range(m + 1) if abs(Fraction(2 * k - m, 2 * m)) <= eps_q)
    return Fraction(good, 2**m)


def binomial_ball_lower_bound(eps, delta, base: float = 2.0) -> float:
    """``(log(1/delta) - 5) / (24 eps^2)``; logs in bits by default, matching the entropy argument."""
    return (math.log(1 / delta, base) - 5) / (24 * float(eps) ** 2)


def binomial_ball_bound_check(m: int, eps, delta, base: float = 2.0) -> bool:
    """True unless the concentration hypothesis holds while m is below the lower bound."""
    prob = binomial_ball_probability(m, eps)
    if prob >= 1 - Fraction(delta):
        return m >= binomial_ball_lower_bound(eps, delta, base)
    return True


def binomial_ball_sweep(m_max: int, eps_grid: Sequence, delta_grid: Sequence, base: float = 2.0):
    """All (m, eps, delta) on the grid where the implication fails."""
    return [
        (m, e, dl)
        for m, e, dl in product(range(1, m_max + 1), eps_grid, delta_grid)
        if not binomial_ball_bound_check(m, e, dl, base)
    ]


# ------------------------------------------------------------ selection-scheme overfitting


def overfit_event(true_risk: float, emp_risk: float, k: int, m: int, delta: float) -> bool:
    """The deviation event ``|L_D - L_S| >= sqrt(eps * L_S) + eps`` of the selection bound."""
    eps = selection_bound(k, m, delta).epsilon
    return abs(true_risk - emp_risk) >= math.sqrt(eps * emp_risk) + eps


def overfit_frequency(scheme, H: FiniteClass, D: FiniteDistribution, loss: LossFunction,
                      k: int, m: int, delta: float, trials: int, seed: int, point: int = 0) -> float:
    """Monte Carlo frequency of the deviation event for a fixed size-k scheme."""
    from .core import empirical_risk, true_risk
    from .selection import apply, observed_size

    hits = 0
    for b, n in _blocks(trials):
        rng = block_rng(seed, STREAM_OVERFIT, point, b)
        for _ in range(n):
            S = D.draw(m, rng)
            out, h = apply(scheme, S, 0)
            if observed_size(out) > k:
                raise PreconditionError(f"scheme used size {observed_size(out)} > k={k}")
            if overfit_event(true_risk(h, D, loss), empirical_risk(h, S, loss), k, m, delta):
                hits += 1
    return hits / trials
