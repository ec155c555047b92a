"""Selection schemes ``(kappa, rho)``, size accounting, and correctness validators.

A scheme is a deterministic function of ``(sample, seed)``: ``kappa`` picks a
strictly increasing list of positions plus a side-information bit string,
``rho`` rebuilds a hypothesis from the extracted sub-sample and the bits
alone. Whether a scheme is a (realizable / agnostic / approximate)
compression scheme for a class is a property checked against a corpus by
the ``validate_*`` functions.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

from .core import (
    TOL,
    FiniteClass,
    LossFunction,
    empirical_risk,
    erm,
    is_realizable,
)
from .errors import PreconditionError, SchemeContractError


@dataclass(frozen=True)
class CompressionOutput:
    """The ``(S', b)`` pair: kept positions and side-information bits."""

    indices: tuple[int, ...] = ()
    side_info: str = ""

    def __post_init__(self):
        object.__setattr__(self, "indices", tuple(int(i) for i in self.indices))
        if any(c not in "01" for c in self.side_info):
            raise SchemeContractError("side information must be a string of '0'/'1'")
        if any(b <= a for a, b in zip(self.indices, self.indices[1:])):
            raise SchemeContractError(f"indices {self.indices} are not strictly increasing")
        if self.indices and self.indices[0] < 0:
            raise SchemeContractError("negative sample index")

    @property
    def size(self) -> int:
        return observed_size(self)

    def to_json(self) -> dict:
        bits = self.side_info
        hexdigits = format(int(bits, 2), "x").zfill((len(bits) + 3) // 4) if bits else ""
        return {"indices": list(self.indices), "side_info_hex": hexdigits, "side_info_bits": len(bits)}

    @classmethod
    def from_json(cls, obj: dict) -> "CompressionOutput":
        nbits = int(obj["side_info_bits"])
        bits = format(int(obj["side_info_hex"], 16), "b").zfill(nbits) if nbits else ""
        if len(bits) != nbits:
            raise SchemeContractError("hex payload longer than declared bit length")
        return cls(tuple(obj["indices"]), bits)


@dataclass(frozen=True)
class SelectionScheme:
    """A pluggable ``(kappa, rho)`` pair.

    ``kappa(sample, seed) -> CompressionOutput`` and
    ``rho(subsample, bits) -> hypothesis``. ``declared_size``, when given,
    is the a-priori size profile ``k(m)``.
    """

    kappa: Callable[[Any, int], CompressionOutput]
    rho: Callable[[Any, str], Any]
    declared_size: Callable[[int], int] | None = None
    name: str = "scheme"
    meta: dict = field(default_factory=dict, compare=False)

    def __call__(self, S, seed: int = 0):
        return apply(self, S, seed)


def apply(scheme: SelectionScheme, S, seed: int = 0):
    """Run ``rho(kappa(S))`` and return ``(output, hypothesis)``."""
    out = scheme.kappa(S, seed)
    if not isinstance(out, CompressionOutput):
        raise SchemeContractError(f"{scheme.name}: kappa returned {type(out).__name__}")
    if out.indices and out.indices[-1] >= len(S):
        raise SchemeContractError(
            f"{scheme.name}: index {out.indices[-1]} out of range for sample of length {len(S)}"
        )
    h = scheme.rho(S.subsample(out.indices), out.side_info)
    return out, h


def observed_size(out: CompressionOutput) -> int:
    return len(out.indices) + len(out.side_info)


def max_size_over(scheme: SelectionScheme, samples: Sequence, seed: int = 0) -> int:
    """Largest observed size over a corpus: the empirical ``k(m)``."""
    if not samples:
        raise PreconditionError("empty corpus")
    return max(observed_size(apply(scheme, S, seed)[0]) for S in samples)


@dataclass(frozen=True)
class Counterexample:
    corpus_index: int
    sample: Any
    output: CompressionOutput
    hypothesis: Any
    risk: float
    threshold: float

    @property
    def gap(self) -> float:
        return self.risk - self.threshold


def _best_risk(H, S, loss) -> float:
    if isinstance(H, FiniteClass):
        return erm(H, S, loss)[1]
    # duck-typed classes (e.g. all constant reals) supply their own ERM
    return H.erm(S, loss)[1]


def _risk(h, S, loss) -> float:
    return empirical_risk(h, S, loss) if len(S) else 0.0


def _check(scheme, corpus, loss, seed, threshold_of):
    for i, S in enumerate(corpus):
        out, h = apply(scheme, S, seed)
        risk = _risk(h, S, loss)
        threshold = threshold_of(S)
        if risk > threshold + TOL:
            return Counterexample(i, S, out, h, risk, threshold)
    return None


def validate_realizable(scheme, H, loss: LossFunction, corpus, seed: int = 0):
    """None if every corpus sample reconstructs to zero empirical risk, else the first failure.

    Every corpus entry must be realizable by ``H``.
    """
    for i, S in enumerate(corpus):
        if isinstance(H, FiniteClass) and is_realizable(S, H, loss) is None:
            raise PreconditionError(f"corpus entry {i} is not realizable by the class")
    return _check(scheme, corpus, loss, seed, lambda S: 0.0)


def validate_agnostic(scheme, H, loss: LossFunction, corpus, seed: int = 0):
    """None if ``L_S(rho(kappa(S))) <= min_h L_S(h)`` on every corpus sample."""
    return _check(scheme, corpus, loss, seed, lambda S: _best_risk(H, S, loss) if len(S) else 0.0)


def validate_approx(scheme, H, loss: LossFunction, corpus, eps: float,
                    agnostic: bool = False, seed: int = 0):
    """Check the eps-approximate guarantee: ``L_S <= eps`` or ``L_S <= erm + eps``."""
    if eps < 0:
        raise PreconditionError("eps must be non-negative")
    if agnostic:
        return _check(scheme, corpus, loss, seed,
                      lambda S: (_best_risk(H, S, loss) if len(S) else 0.0) + eps)
    for i, S in enumerate(corpus):
        if isinstance(H, FiniteClass) and is_realizable(S, H, loss) is None:
            raise PreconditionError(f"corpus entry {i} is not realizable by the class")
    return _check(scheme, corpus, loss, seed, lambda S: eps)


# ------------------------------------------------------------ reference schemes


def identity_scheme(H: FiniteClass, loss: LossFunction) -> SelectionScheme:
    """Keep the whole sample, reconstruct by ERM."""
    return SelectionScheme(
        kappa=lambda S, seed=0: CompressionOutput(tuple(range(len(S)))),
        rho=lambda sub, bits: erm(H, sub, loss)[0],
        declared_size=lambda m: m,
        name="identity",
    )
