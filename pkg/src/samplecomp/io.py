"""JSON encoding of classes, samples, distributions and compression outputs.

Schemas (JSON Schema draft 2020-12) are published as module constants and
enforced on load. Labels may be any JSON scalar or a list of integers (set
labels, stored as sorted tuples).

Class::

    {"domain_size": 3, "labels": [0, 1], "hypotheses": [[0, 0, 1], [1, 0, 1]]}

Sample (label *indices*)::

    {"examples": [[0, 1], [2, 0]]}

Distribution::

    {"support": [[0, 1], [2, 0]], "weights": [0.25, 0.75]}

Regression sample::

    {"values": [0.1, 0.7]}
"""
from __future__ import annotations

import json
from pathlib import Path

import jsonschema

from .core import FiniteClass, FiniteDistribution, LabelUniverse, LossFunction, RealSample, Sample

_label = {"anyOf": [{"type": ["integer", "number", "string", "boolean"]},
                    {"type": "array", "items": {"type": "integer"}}]}
_pair = {"type": "array", "items": {"type": "integer", "minimum": 0}, "minItems": 2, "maxItems": 2}

CLASS_SCHEMA = {
    "type": "object",
    "required": ["domain_size", "labels", "hypotheses"],
    "properties": {
        "domain_size": {"type": "integer", "minimum": 1},
        "labels": {"type": "array", "items": _label, "minItems": 1},
        "hypotheses": {"type": "array", "items": {"type": "array", "items": {"type": "integer", "minimum": 0}}},
        "loss": {"enum": list(LossFunction.KINDS)},
    },
}
SAMPLE_SCHEMA = {
    "type": "object",
    "required": ["examples"],
    "properties": {"examples": {"type": "array", "items": _pair}},
}
DISTRIBUTION_SCHEMA = {
    "type": "object",
    "required": ["support", "weights"],
    "properties": {
        "support": {"type": "array", "items": _pair, "minItems": 1},
        "weights": {"type": "array", "items": {"type": "number", "minimum": 0}},
    },
}
REAL_SAMPLE_SCHEMA = {
    "type": "object",
    "required": ["values"],
    "properties": {"values": {"type": "array", "items": {"type": "number", "minimum": 0, "maximum": 1}}},
}


def _norm_label(lab):
    return tuple(sorted(lab)) if isinstance(lab, list) else lab


def class_from_json(obj: dict) -> FiniteClass:
    jsonschema.validate(obj, CLASS_SCHEMA)
    labels = LabelUniverse(_norm_label(lab) for lab in obj["labels"])
    return FiniteClass(obj["domain_size"], labels, [tuple(h) for h in obj["hypotheses"]])


def class_to_json(H: FiniteClass) -> dict:
    return {
        "domain_size": H.domain_size,
        "labels": [list(lab) if isinstance(lab, tuple) else lab for lab in H.labels],
        "hypotheses": [list(h.table) for h in H],
    }


def loss_from_json(obj: dict, H: FiniteClass) -> LossFunction:
    kind = obj.get("loss", "zero_one")
    return LossFunction(kind, None if kind == "zero_one" else H.labels)


def sample_from_json(obj: dict) -> Sample:
    jsonschema.validate(obj, SAMPLE_SCHEMA)
    return Sample.from_pairs(tuple(p) for p in obj["examples"])


def sample_to_json(S: Sample) -> dict:
    return {"examples": [list(p) for p in S]}


def distribution_from_json(obj: dict) -> FiniteDistribution:
    jsonschema.validate(obj, DISTRIBUTION_SCHEMA)
    return FiniteDistribution(Sample.from_pairs(tuple(p) for p in obj["support"]), obj["weights"])


def distribution_to_json(D: FiniteDistribution) -> dict:
    return {"support": [list(p) for p in D.support], "weights": D.weights.tolist()}


def real_sample_from_json(obj: dict) -> RealSample:
    jsonschema.validate(obj, REAL_SAMPLE_SCHEMA)
    return RealSample(obj["values"])


def load_json(path) -> dict:
    return json.loads(Path(path).read_text())


def dumps(obj) -> str:
    """Canonical serialisation: sorted keys, fixed separators, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"
