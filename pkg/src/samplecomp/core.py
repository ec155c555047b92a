"""Finite-universe examples, samples, hypotheses, losses and risk functionals.

Labels live in a :class:`LabelUniverse` and are referred to by index
everywhere else: samples store ``(x, y)`` index pairs and a hypothesis is a
lookup table ``x -> y``. Losses are bound to the universe they score so that
all three kinds (zero/one, squared, intersection) evaluate on indices.

Regression samples (raw values in [0, 1]) use :class:`RealSample`; their
hypotheses are plain floats.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .errors import EmptySampleError, PreconditionError

TOL = 1e-12


def _frozen(arr, dtype):
    arr = np.array(arr, dtype=dtype)
    arr.setflags(write=False)
    return arr


class LabelUniverse:
    """Finite indexed set of hashable label values."""

    def __init__(self, labels: Iterable):
        self.labels = tuple(labels)
        if not self.labels:
            raise PreconditionError("label universe must be non-empty")
        self._index = {lab: i for i, lab in enumerate(self.labels)}
        if len(self._index) != len(self.labels):
            raise PreconditionError("duplicate labels in universe")

    @classmethod
    def subsets(cls, M: int, K: int) -> "LabelUniverse":
        """All subsets of {1..M} of size at most K, as sorted tuples, by size then lex."""
        items = range(1, M + 1)
        return cls(c for j in range(K + 1) for c in combinations(items, j))

    def index(self, label) -> int:
        return self._index[label]

    def __len__(self):
        return len(self.labels)

    def __getitem__(self, i):
        return self.labels[i]

    def __iter__(self):
        return iter(self.labels)

    def __eq__(self, other):
        return isinstance(other, LabelUniverse) and self.labels == other.labels

    def __hash__(self):
        return hash(self.labels)

    def __repr__(self):
        if len(self) > 8:
            return f"LabelUniverse(<{len(self)} labels>)"
        return f"LabelUniverse({list(self.labels)!r})"


class Sample:
    """Ordered sequence of ``(x, y)`` index pairs; duplicates allowed."""

    __slots__ = ("xs", "ys")

    def __init__(self, xs: Sequence[int] = (), ys: Sequence[int] = ()):
        if len(xs) != len(ys):
            raise PreconditionError("xs and ys must have equal length")
        self.xs = _frozen(xs, np.int64)
        self.ys = _frozen(ys, np.int64)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[int, int]]) -> "Sample":
        pairs = list(pairs)
        return cls([p[0] for p in pairs], [p[1] for p in pairs])

    @property
    def m(self) -> int:
        return len(self.xs)

    def __len__(self):
        return len(self.xs)

    def __getitem__(self, i) -> tuple[int, int]:
        return int(self.xs[i]), int(self.ys[i])

    def __iter__(self):
        return zip(self.xs.tolist(), self.ys.tolist())

    def pairs(self) -> list[tuple[int, int]]:
        return list(self)

    def subsample(self, indices: Sequence[int]) -> "Sample":
        idx = np.asarray(indices, dtype=np.int64)
        return Sample(self.xs[idx], self.ys[idx])

    def __eq__(self, other):
        return (
            isinstance(other, Sample)
            and np.array_equal(self.xs, other.xs)
            and np.array_equal(self.ys, other.ys)
        )

    def __hash__(self):
        return hash((self.xs.tobytes(), self.ys.tobytes()))

    def __repr__(self):
        return f"Sample({self.pairs()!r})"


class RealSample:
    """Regression sample: values in [0, 1]."""

    __slots__ = ("values",)

    def __init__(self, values: Sequence[float]):
        vals = np.array(values, dtype=float)
        if vals.ndim != 1:
            raise PreconditionError("regression sample must be one-dimensional")
        if vals.size and (vals.min() < 0.0 or vals.max() > 1.0):
            raise PreconditionError("regression values must lie in [0, 1]")
        vals.setflags(write=False)
        self.values = vals

    @property
    def m(self) -> int:
        return len(self.values)

    def __len__(self):
        return len(self.values)

    def __getitem__(self, i):
        return float(self.values[i])

    def subsample(self, indices: Sequence[int]) -> "RealSample":
        return RealSample(self.values[np.asarray(indices, dtype=np.int64)])

    def __eq__(self, other):
        return isinstance(other, RealSample) and np.array_equal(self.values, other.values)

    def __hash__(self):
        return hash(self.values.tobytes())

    def __repr__(self):
        return f"RealSample({self.values.tolist()!r})"


@dataclass(frozen=True)
class Hypothesis:
    """Total lookup table from domain index to label index."""

    table: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "table", tuple(int(v) for v in self.table))

    @classmethod
    def constant(cls, label: int, domain_size: int) -> "Hypothesis":
        return cls((label,) * domain_size)

    def __call__(self, x: int) -> int:
        return self.table[x]

    def __len__(self):
        return len(self.table)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.table, dtype=np.int64)


class FiniteClass:
    """Indexed, duplicate-free list of hypotheses over a common domain and label set.

    Duplicates are dropped on construction, keeping the first occurrence, so
    "lowest index" tie-breaking refers to the deduplicated order.
    """

    def __init__(self, domain_size: int, labels: LabelUniverse | Iterable, hypotheses):
        if not isinstance(labels, LabelUniverse):
            labels = LabelUniverse(labels)
        self.domain_size = int(domain_size)
        self.labels = labels
        seen = {}
        for h in hypotheses:
            h = h if isinstance(h, Hypothesis) else Hypothesis(h)
            if len(h) != self.domain_size:
                raise PreconditionError(
                    f"hypothesis table has length {len(h)}, domain size is {self.domain_size}"
                )
            if any(v < 0 or v >= len(labels) for v in h.table):
                raise PreconditionError("hypothesis label index out of range")
            seen.setdefault(h.table, h)
        self.hypotheses = tuple(seen.values())
        tables = np.array([h.table for h in self.hypotheses], dtype=np.int64)
        self.tables = tables.reshape(len(self.hypotheses), self.domain_size)
        self.tables.setflags(write=False)

    def __len__(self):
        return len(self.hypotheses)

    def __getitem__(self, i) -> Hypothesis:
        return self.hypotheses[i]

    def __iter__(self):
        return iter(self.hypotheses)

    def index(self, h: Hypothesis) -> int:
        return self.hypotheses.index(h)

    @property
    def is_binary(self) -> bool:
        return len(self.labels) == 2

    def check_sample(self, S: Sample):
        if len(S) and (S.xs.min() < 0 or S.xs.max() >= self.domain_size):
            raise PreconditionError("sample domain index out of range")
        if len(S) and (S.ys.min() < 0 or S.ys.max() >= len(self.labels)):
            raise PreconditionError("sample label index out of range")

    def __repr__(self):
        return (
            f"FiniteClass(domain_size={self.domain_size}, "
            f"labels={len(self.labels)}, hypotheses={len(self)})"
        )


# ---------------------------------------------------------------- losses


def zero_one_loss(a, b) -> float:
    return 0.0 if a == b else 1.0


def squared_loss(a: float, b: float) -> float:
    return (float(a) - float(b)) ** 2


def intersection_loss(A, B) -> float:
    """0 on equal sets, 1/2 on intersecting unequal sets, 1 on disjoint sets."""
    A, B = frozenset(A), frozenset(B)
    if A == B:
        return 0.0
    return 0.5 if A & B else 1.0


class LossFunction:
    """A bounded symmetric loss evaluated on label indices.

    ``zero_one`` needs no universe. ``squared`` scores real-valued labels (or
    raw regression values when the universe is omitted). ``intersection``
    scores set-valued labels.
    """

    KINDS = ("zero_one", "squared", "intersection")

    def __init__(self, kind: str, universe: LabelUniverse | None = None):
        if kind not in self.KINDS:
            raise PreconditionError(f"unknown loss kind {kind!r}")
        if kind == "intersection" and universe is None:
            raise PreconditionError("intersection loss needs the label universe")
        self.kind = kind
        self.universe = universe
        self._values = None
        self._masks = None
        if universe is not None and kind == "squared":
            vals = np.array([float(v) for v in universe], dtype=float)
            if vals.min() < 0 or vals.max() > 1:
                raise PreconditionError("squared loss labels must lie in [0, 1]")
            self._values = vals
        if kind == "intersection":
            elems = sorted({e for lab in universe for e in lab})
            if len(elems) > 62:
                raise PreconditionError("intersection loss supports at most 62 distinct elements")
            bit = {e: 1 << i for i, e in enumerate(elems)}
            self._masks = np.array([sum(bit[e] for e in lab) for lab in universe], dtype=np.int64)

    @classmethod
    def zero_one(cls) -> "LossFunction":
        return cls("zero_one")

    @classmethod
    def squared(cls, universe: LabelUniverse | None = None) -> "LossFunction":
        return cls("squared", universe)

    @classmethod
    def intersection(cls, universe: LabelUniverse) -> "LossFunction":
        return cls("intersection", universe)

    def pairwise(self, a, b) -> np.ndarray:
        """Elementwise loss between broadcastable label-index arrays."""
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.kind == "zero_one":
            return (a != b).astype(float)
        if self.kind == "squared":
            if self._values is None:
                raise PreconditionError("squared loss on indices needs a universe")
            return (self._values[a] - self._values[b]) ** 2
        ma, mb = self._masks[a], self._masks[b]
        return np.where(ma == mb, 0.0, np.where((ma & mb) != 0, 0.5, 1.0))

    def __call__(self, a: int, b: int) -> float:
        return float(self.pairwise(a, b))

    def on_values(self, a, b) -> float:
        """Evaluate on raw label values rather than indices."""
        if self.kind == "zero_one":
            return zero_one_loss(a, b)
        if self.kind == "squared":
            return squared_loss(a, b)
        return intersection_loss(a, b)

    def __repr__(self):
        return f"LossFunction({self.kind!r})"


class FiniteDistribution:
    """Distribution with finite support of distinct examples."""

    def __init__(self, support: Sample, weights: Sequence[float]):
        w = np.array(weights, dtype=float)
        if len(w) != len(support):
            raise PreconditionError("support and weights differ in length")
        if len(w) == 0:
            raise PreconditionError("distribution needs non-empty support")
        if (w < 0).any():
            raise PreconditionError("negative weight")
        if abs(w.sum() - 1.0) > TOL * max(1, len(w)):
            raise PreconditionError(f"weights sum to {w.sum()!r}, not 1")
        if len(set(support)) != len(support):
            raise PreconditionError("support entries must be distinct")
        w.setflags(write=False)
        self.support = support
        self.weights = w

    @classmethod
    def uniform(cls, support: Sample) -> "FiniteDistribution":
        return cls(support, np.full(len(support), 1.0 / len(support)))

    @classmethod
    def empirical(cls, S: Sample) -> "FiniteDistribution":
        """Uniform distribution over the entries of ``S`` (duplicates merged)."""
        if len(S) == 0:
            raise EmptySampleError("empirical distribution of an empty sample")
        counts: dict[tuple[int, int], int] = {}
        for z in S:
            counts[z] = counts.get(z, 0) + 1
        pairs = list(counts)
        return cls(Sample.from_pairs(pairs), [counts[z] / len(S) for z in pairs])

    def draw(self, m: int, rng: np.random.Generator) -> Sample:
        idx = rng.choice(len(self.support), size=m, p=self.weights)
        return self.support.subsample(idx)

    def __len__(self):
        return len(self.support)


# ---------------------------------------------------------------- risks


def empirical_risk(h, S, loss: LossFunction) -> float:
    """Average loss of ``h`` over ``S``."""
    if len(S) == 0:
        raise EmptySampleError("empirical risk of an empty sample is undefined")
    if isinstance(S, RealSample):
        if loss.kind != "squared":
            raise PreconditionError("regression samples use the squared loss")
        return float(np.mean((float(h) - S.values) ** 2))
    preds = np.asarray(h.table, dtype=np.int64)[S.xs]
    return float(loss.pairwise(preds, S.ys).mean())


def class_risks(H: FiniteClass, S: Sample, loss: LossFunction) -> np.ndarray:
    """Empirical risk of every hypothesis in ``H`` on ``S`` (zeros for empty ``S``)."""
    if len(S) == 0:
        return np.zeros(len(H))
    return loss.pairwise(H.tables[:, S.xs], S.ys[None, :]).mean(axis=1)


def true_risk(h: Hypothesis, D: FiniteDistribution, loss: LossFunction) -> float:
    preds = np.asarray(h.table, dtype=np.int64)[D.support.xs]
    return float(loss.pairwise(preds, D.support.ys) @ D.weights)


def is_realizable(S: Sample, H: FiniteClass, loss: LossFunction) -> Hypothesis | None:
    """Lowest-index zero-risk hypothesis, or None. Empty samples are realizable."""
    if len(H) == 0:
        return None
    H.check_sample(S)
    risks = class_risks(H, S, loss)
    hits = np.flatnonzero(risks <= TOL)
    return H[int(hits[0])] if hits.size else None


def erm(H: FiniteClass, S: Sample, loss: LossFunction) -> tuple[Hypothesis, float]:
    """Empirical risk minimiser over ``H``; ties go to the lowest index.

    An empty sample returns hypothesis 0 with risk 0 (every hypothesis is
    vacuously consistent), which keeps ERM-based learners total.
    """
    if len(H) == 0:
        raise PreconditionError("ERM over an empty class")
    H.check_sample(S)
    risks = class_risks(H, S, loss)
    best = float(risks.min())
    i = int(np.flatnonzero(risks <= best + TOL)[0])
    return H[i], float(risks[i])
