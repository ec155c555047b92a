"""Batch entry point: ``samplecomp <subcommand> [--config cfg.json] [flags]``.

Every subcommand reads its parameters from an optional JSON config (keys as
in ``CONFIG_SCHEMAS``); command-line flags override the config. Outputs go to
``--out DIR`` as canonical JSON or CSV, so a fixed config and seed give
byte-identical files regardless of ``--jobs``.

Exit codes: 0 ok, 2 precondition / bad config, 3 contract violation (e.g.
the learner is not a weak learner), 4 budget exhausted.
"""
from __future__ import annotations

import argparse
import csv
import io as _io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from . import bounds, io
from .boost_compress import compress_realizable, erm_learner, boost_scheme, to_agnostic
from .core import FiniteDistribution, LossFunction, RealSample, Sample, empirical_risk, erm, true_risk
from .dimensions import graph_dimension, vc_dimension
from .errors import BudgetExhausted, PreconditionError, SampleCompressionError
from .regression import approx_compress
from .separation import SCHEMES, SeparationInstance, adversary_search, realizable_scheme

EXIT_OK, EXIT_PRECONDITION, EXIT_CONTRACT, EXIT_BUDGET = 0, 2, 3, 4

_obj_or_path = {"type": ["object", "string"]}
_posint = {"type": "integer", "minimum": 1}
_prob = {"type": "number", "exclusiveMinimum": 0, "maximum": 1}
_common = {
    "seed": {"type": "integer", "minimum": 0},
    "trials": _posint,
    "budget": _posint,
    "jobs": _posint,
    "out": {"type": "string"},
}


def _schema(required=(), **props):
    return {"type": "object", "properties": {**_common, **props}, "required": list(required),
            "additionalProperties": False}


CONFIG_SCHEMAS = {
    "dims": _schema(["class"], **{"class": _obj_or_path}),
    "compress": _schema(["class", "sample", "d", "seed"], **{
        "class": _obj_or_path, "sample": _obj_or_path, "d": _posint, "pool_cap": _posint}),
    "bounds": _schema(["requests"], requests={"type": "array", "items": {
        "type": "object", "required": ["formula"],
        "properties": {"formula": {"enum": [
            "selection", "realizable_learning", "agnostic_learning", "erm_deviation",
            "selection_overfit", "uc_rate", "predicted_compression_size", "binomial_ball"]}}}}),
    "ucexp": _schema(["seed", "m"], **{
        "class": _obj_or_path, "distribution": _obj_or_path,
        "m": {"type": "array", "items": _posint, "minItems": 1},
        "eps": _prob, "exact": {"type": "boolean"}}),
    "sdexp": _schema(["seed"], d={"type": "array", "items": _posint, "minItems": 1},
                     eps=_prob, target=_prob, m_max=_posint),
    "regress": _schema(["seed", "eps"], sample=_obj_or_path, eps=_prob, generator={
        "type": "object", "required": ["m"],
        "properties": {"kind": {"enum": ["uniform", "beta"]}, "m": _posint}}),
    "adversary": _schema(["scheme", "M", "K"], scheme={"enum": sorted(SCHEMES) + ["first-label"]},
                         M=_posint, K=_posint, T={"type": "integer", "minimum": 0}),
    "demo": _schema(["seed"], **{"class": _obj_or_path, "d": _posint, "m": _posint,
                                 "noise": {"type": "number", "minimum": 0, "maximum": 1},
                                 "delta": _prob}),
}

DEFAULTS = {
    "dims": {},
    "compress": {"pool_cap": 200_000},
    "bounds": {},
    "ucexp": {"class": "cube3", "distribution": "cube3_uniform", "eps": 0.1, "trials": 2000,
              "exact": False},
    "sdexp": {"d": [4, 8, 16], "eps": 0.1, "target": 0.75, "trials": 5000, "m_max": 20_000},
    "regress": {"generator": {"kind": "uniform", "m": 30}},
    "adversary": {"T": 1, "budget": 100_000},
    "demo": {"class": "thresholds6", "d": 2, "m": 2000, "noise": 0.1, "delta": 0.05},
}


# ------------------------------------------------------------ helpers


def _load(ref, base: Path):
    """Inline object, path relative to the config file, or a bundled fixture name."""
    if isinstance(ref, dict):
        return ref
    p = Path(ref)
    if not p.is_absolute():
        p = base / p
    if p.exists():
        return io.load_json(p)
    fixture = resources.files("samplecomp") / "data" / f"{ref}.json"
    if fixture.is_file():
        return json.loads(fixture.read_text())
    raise PreconditionError(f"cannot find {ref!r} as a file or bundled fixture")


def _write(out: Path | None, name: str, text: str):
    if out is None:
        sys.stdout.write(text)
        return
    out.mkdir(parents=True, exist_ok=True)
    (out / name).write_text(text)


def _csv(rows: list[dict]) -> str:
    buf = _io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


def _pmap(fn, items, jobs: int):
    if jobs <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items))


def _ci(p: float, n: int) -> tuple[float, float]:
    half = 3 * math.sqrt(max(p * (1 - p), 0.0) / n)
    return max(0.0, p - half), min(1.0, p + half)


# ------------------------------------------------------------ subcommands


def cmd_dims(cfg, base, out):
    H = io.class_from_json(_load(cfg["class"], base))
    g, gw = graph_dimension(H)
    result = {"graph_dimension": g, "graph_witness": {"points": list(gw.points), "f": list(gw.f_restriction)}}
    if H.is_binary:
        v, vw = vc_dimension(H)
        result.update({"vc_dimension": v, "vc_witness": list(vw.points)})
    else:
        result.update({"vc_dimension": None, "vc_witness": None})
    _write(out, "dims.json", io.dumps(result))
    return EXIT_OK


def cmd_compress(cfg, base, out):
    H = io.class_from_json(_load(cfg["class"], base))
    S = io.sample_from_json(_load(cfg["sample"], base))
    H.check_sample(S)
    A = erm_learner(H, cfg["d"])
    res = compress_realizable(A, S, cfg["seed"], cfg["pool_cap"])
    obj = {**res.to_json(), "d": cfg["d"], "m": len(S), "seed": cfg["seed"]}
    _write(out, "compress.json", io.dumps(obj))
    return EXIT_OK


def _bound(req):
    f = req["formula"]
    if f in ("selection", "realizable_learning", "agnostic_learning"):
        fn = getattr(bounds, f"{f}_bound")
        return fn(req["k"], req["m"], req["delta"]).to_json()
    if f == "erm_deviation":
        return {"formula": f, "epsilon": bounds.erm_deviation_bound(req["m"], req["delta"]), "log": "natural"}
    if f == "selection_overfit":
        eps = bounds.selection_overfit_bound(req["k"], req["m"], req["delta"], req["empirical_risk"])
        return {"formula": f, "epsilon": eps, "log": "natural"}
    if f == "uc_rate":
        lo, hi = bounds.uc_rate_bounds(req["d"], req["eps"], req["delta"], req["C1"], req["C2"])
        return {"formula": f, "lower": lo, "upper": hi, "log": "natural"}
    if f == "predicted_compression_size":
        return {"formula": f, "size": bounds.predicted_compression_size(
            req["d"], req["m"], req.get("header_bits", bounds.HEADER_BITS))}
    prob = bounds.binomial_ball_probability(req["m"], req["eps"])
    return {"formula": f, "probability": float(prob),
            "holds": bounds.binomial_ball_bound_check(req["m"], req["eps"], req["delta"]), "log": "base 2"}


def cmd_bounds(cfg, base, out):
    results = []
    for req in cfg["requests"]:
        try:
            res = _bound(req)
        except KeyError as e:
            raise PreconditionError(f"{req['formula']}: missing parameter {e}") from None
        results.append({"request": req, "result": res})
    _write(out, "bounds.json", io.dumps(results))
    return EXIT_OK


def _uc_point(args):
    H_obj, D_obj, m, eps, trials, seed, point, exact = args
    H, D = io.class_from_json(H_obj), io.distribution_from_json(D_obj)
    loss = LossFunction.zero_one()
    freq = bounds.empirical_uc_violation(H, D, loss, m, eps, trials, seed, point)
    lo, hi = _ci(freq, trials)
    row = {"m": m, "eps": eps, "trials": trials, "seed": seed, "support": len(D), "hypotheses": len(H),
           "frequency": freq, "ci_low": lo, "ci_high": hi}
    row["exact"] = bounds.exact_uc_violation(H, D, loss, m, eps) if exact else ""
    return row


def cmd_ucexp(cfg, base, out):
    H_obj, D_obj = _load(cfg["class"], base), _load(cfg["distribution"], base)
    items = [(H_obj, D_obj, m, cfg["eps"], cfg["trials"], cfg["seed"], i, cfg["exact"])
             for i, m in enumerate(cfg["m"])]
    rows = _pmap(_uc_point, items, cfg.get("jobs", 1))
    _write(out, "ucexp.csv", _csv(rows))
    return EXIT_OK


def _sd_threshold(args):
    d, eps, trials, seed, target, m_max = args
    m, hist = bounds.sd_threshold(d, eps, trials, seed, target, m_max)
    return m, [{"d": r.d, "m": r.m, "eps": r.eps, "trials": r.trials, "seed": seed,
                "frequency": r.success_frequency} for r in hist]


def cmd_sdexp(cfg, base, out):
    items = [(d, cfg["eps"], cfg["trials"], cfg["seed"], cfg["target"], cfg["m_max"]) for d in cfg["d"]]
    results = _pmap(_sd_threshold, items, cfg.get("jobs", 1))
    curve = [row for _, hist in results for row in hist]
    summary = [{"d": d, "eps": cfg["eps"], "trials": cfg["trials"], "seed": cfg["seed"],
                "target": cfg["target"], "m_threshold": m} for d, (m, _) in zip(cfg["d"], results)]
    _write(out, "sdexp_curve.csv", _csv(curve))
    _write(out, "sdexp.csv", _csv(summary))
    return EXIT_OK


def cmd_regress(cfg, base, out):
    if "sample" in cfg:
        S = io.real_sample_from_json(_load(cfg["sample"], base))
    else:
        gen = cfg["generator"]
        rng = bounds.block_rng(cfg["seed"], 0)
        kind = gen.get("kind", "uniform")
        vals = rng.uniform(size=gen["m"]) if kind == "uniform" else rng.beta(0.5, 0.5, size=gen["m"])
        S = RealSample(vals)
    res = approx_compress(S, cfg["eps"], cfg["seed"])
    obj = {**res.to_json(), "eps": cfg["eps"], "m": len(S), "seed": cfg["seed"], "values": S.values.tolist()}
    _write(out, "regress.json", io.dumps(obj))
    return EXIT_OK


def cmd_adversary(cfg, base, out):
    inst = SeparationInstance(cfg["M"], cfg["K"])
    if cfg["scheme"] == "first-label":
        scheme = realizable_scheme(inst)
    else:
        scheme = SCHEMES[cfg["scheme"]](inst, cfg["T"])
    res = adversary_search(scheme, inst, cfg["budget"], cfg.get("seed", 0))
    obj = {**res.to_json(), "scheme": scheme.name, "budget": cfg["budget"]}
    _write(out, "adversary.json", io.dumps(obj))
    return EXIT_OK if res.found else EXIT_BUDGET


def cmd_demo(cfg, base, out):
    """Weak learner -> compression scheme -> agnostic scheme -> agnostic learner, measured."""
    H = io.class_from_json(_load(cfg["class"], base))
    loss = LossFunction.zero_one()
    rng = bounds.block_rng(cfg["seed"], 0)
    target = H[len(H) // 2]
    xs = np.arange(H.domain_size)
    clean = FiniteDistribution(Sample(xs, [target(int(x)) for x in xs]), np.full(len(xs), 1 / len(xs)))
    # noisy distribution: flip each clean label with probability `noise`
    flips = Sample(xs, [(target(int(x)) + 1) % len(H.labels) for x in xs])
    support = Sample(np.concatenate([clean.support.xs, flips.xs]), np.concatenate([clean.support.ys, flips.ys]))
    noise = cfg["noise"]
    w = np.concatenate([np.full(len(xs), (1 - noise) / len(xs)), np.full(len(xs), noise / len(xs))])
    keep = w > 0
    D = FiniteDistribution(support.subsample(np.flatnonzero(keep)), w[keep])

    A = erm_learner(H, cfg["d"])
    S_real = clean.draw(cfg["m"], rng)
    comp = compress_realizable(A, S_real, cfg["seed"])

    S = D.draw(cfg["m"], rng)
    out_a, h = to_agnostic(boost_scheme(A), H, S, loss, cfg["seed"])
    best_emp = erm(H, S, loss)[1]
    k = out_a.size
    m = cfg["m"]
    bound = bounds.agnostic_learning_bound(k, m, cfg["delta"]).epsilon if 2 * k <= m else None
    best_true = min(true_risk(g, D, loss) for g in H)
    result = {
        "weak_learner": {"d": cfg["d"], "class_size": len(H)},
        "compression": {"m": len(S_real), "size": comp.size, "predicted_size": comp.predicted_size,
                        "T": comp.T, "margin": comp.margin, "empirical_risk": comp.empirical_risk},
        "agnostic_compression": {"size": k, "empirical_risk": empirical_risk(h, S, loss),
                                 "erm_empirical_risk": best_emp},
        "agnostic_learner": {"true_risk": true_risk(h, D, loss), "best_true_risk": best_true,
                             "bound_excess": bound, "delta": cfg["delta"]},
        "seed": cfg["seed"],
    }
    _write(out, "demo.json", io.dumps(result))
    if out is not None:
        c, a, g = result["compression"], result["agnostic_compression"], result["agnostic_learner"]
        print(f"1. weak learner: ERM on d={cfg['d']} examples over {len(H)} hypotheses")
        print(f"2. compression: m={c['m']} -> size {c['size']} (cap {c['predicted_size']}), L_S={c['empirical_risk']}")
        print(f"3. agnostic compression: size {k}, L_S={a['empirical_risk']:.4f} <= ERM {a['erm_empirical_risk']:.4f}")
        print(f"4. agnostic learner: L_D={g['true_risk']:.4f}, best L_D={g['best_true_risk']:.4f}, "
              f"bound on excess={g['bound_excess']}")
    return EXIT_OK


COMMANDS = {
    "dims": cmd_dims, "compress": cmd_compress, "bounds": cmd_bounds, "ucexp": cmd_ucexp,
    "sdexp": cmd_sdexp, "regress": cmd_regress, "adversary": cmd_adversary, "demo": cmd_demo,
}
RANDOMIZED = {"compress", "ucexp", "sdexp", "regress", "demo"}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="samplecomp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in COMMANDS.items():
        p = sub.add_parser(name, help=(fn.__doc__ or name).splitlines()[0])
        p.add_argument("--config", type=Path)
        p.add_argument("--seed", type=int)
        p.add_argument("--out", type=Path)
        p.add_argument("--trials", type=int)
        p.add_argument("--budget", type=int)
        p.add_argument("--jobs", type=int)
        p.add_argument("--set", action="append", default=[], metavar="KEY=JSON",
                       help="override one config key, value parsed as JSON")
    return parser


def resolve_config(args) -> tuple[dict, Path]:
    cfg = dict(DEFAULTS[args.command])
    base = Path.cwd()
    if args.config:
        cfg.update(io.load_json(args.config))
        base = args.config.parent
    for item in args.set:
        key, _, value = item.partition("=")
        try:
            cfg[key] = json.loads(value)
        except json.JSONDecodeError:
            cfg[key] = value
    for key in ("seed", "trials", "budget", "jobs"):
        if getattr(args, key) is not None:
            cfg[key] = getattr(args, key)
    if args.out is not None:
        cfg["out"] = str(args.out)
    if args.command in RANDOMIZED and "seed" not in cfg:
        raise PreconditionError(f"{args.command} is randomized: --seed (or a config seed) is required")
    jsonschema.validate(cfg, CONFIG_SCHEMAS[args.command])
    return cfg, base


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg, base = resolve_config(args)
        out = Path(cfg["out"]) if "out" in cfg else None
        return COMMANDS[args.command](cfg, base, out)
    except jsonschema.ValidationError as e:
        print(f"config error: {e.message}", file=sys.stderr)
        return EXIT_PRECONDITION
    except BudgetExhausted as e:
        print(f"budget exhausted: {e} {e.diagnostic}", file=sys.stderr)
        return EXIT_BUDGET
    except SampleCompressionError as e:
        print(f"{type(e).__name__}: {e}", file=sys.stderr)
        return e.exit_code
    except (ValueError, KeyError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
