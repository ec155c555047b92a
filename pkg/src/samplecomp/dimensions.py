"""Exact VC and graph dimension of finite classes by shattering search.

For the graph dimension the witness labelings ``f`` on a candidate set ``C``
are taken from the restrictions ``h|_C`` of class members. This is
equivalent to searching all of ``Y^C``: the all-agree pattern has to be
realised, so ``f`` must coincide with some ``h`` on ``C``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

import numpy as np

from .core import FiniteClass
from .errors import PreconditionError


@dataclass(frozen=True)
class ShatterWitness:
    points: tuple[int, ...]
    f_restriction: tuple[int, ...] | None = None  # graph mode only


def _pattern_codes(bits: np.ndarray) -> np.ndarray:
    """Encode each row of a boolean matrix as an integer."""
    weights = 1 << np.arange(bits.shape[1], dtype=np.int64)
    return (bits.astype(np.int64) * weights).sum(axis=1)


def _size_cap(H: FiniteClass) -> int:
    return min(H.domain_size, int(math.floor(math.log2(len(H))))) if len(H) else 0


def shatters(H: FiniteClass, C: Sequence[int]) -> bool:
    """True iff the binary class ``H`` realises all label patterns on ``C``."""
    C = list(C)
    if not C:
        return len(H) > 0
    codes = _pattern_codes(H.tables[:, C] == 1)
    return len(np.unique(codes)) == 2 ** len(C)


def shatters_graph(H: FiniteClass, f: Sequence[int], C: Sequence[int]) -> bool:
    """True iff every agreement pattern ``B ⊆ C`` with ``f`` is realised by some h."""
    C = list(C)
    f = np.asarray(f, dtype=np.int64)
    if len(f) != len(C):
        raise PreconditionError("f must assign a label to every point of C")
    if not C:
        return len(H) > 0
    codes = _pattern_codes(H.tables[:, C] == f[None, :])
    return len(np.unique(codes)) == 2 ** len(C)


def vc_dimension(H: FiniteClass) -> tuple[int, ShatterWitness]:
    """Largest shattered set of a binary class, with a witness."""
    if not H.is_binary:
        raise PreconditionError(f"VC dimension needs binary labels, got {len(H.labels)}")
    best = ShatterWitness(())
    for size in range(1, _size_cap(H) + 1):
        hit = next((C for C in combinations(range(H.domain_size), size) if shatters(H, C)), None)
        if hit is None:
            break  # shattered sets are closed under subsets
        best = ShatterWitness(hit)
    return len(best.points), best


def graph_dimension(H: FiniteClass) -> tuple[int, ShatterWitness]:
    """``max_f VC(H_f)`` together with a witness set and labeling."""
    best = ShatterWitness((), ())
    for size in range(1, _size_cap(H) + 1):
        hit = None
        for C in combinations(range(H.domain_size), size):
            for f in np.unique(H.tables[:, list(C)], axis=0):
                if shatters_graph(H, f, C):
                    hit = ShatterWitness(C, tuple(int(v) for v in f))
                    break
            if hit:
                break
        if hit is None:
            break
        best = hit
    return len(best.points), best


def verify_witness(H: FiniteClass, w: ShatterWitness) -> bool:
    """Independent re-check of all ``2^|C|`` patterns by explicit enumeration."""
    C = list(w.points)
    for mask in range(2 ** len(C)):
        want = [(mask >> j) & 1 for j in range(len(C))]
        found = False
        for table in H.tables:
            if w.f_restriction is None:
                got = [int(table[x]) for x in C]
            else:
                got = [int(table[x] == fx) for x, fx in zip(C, w.f_restriction)]
            if got == want:
                found = True
                break
        if not found:
            return False
    return True
