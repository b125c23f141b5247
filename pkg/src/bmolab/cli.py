"""Command-line front end.

Every subcommand reads one JSON config (grid, weight, kernel, corpus,
family, caps), accepts a few overrides, and writes a JSON report that
embeds the resolved config and its digest. Ratio tables are also
emitted as CSV for external plotting.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import config as cfgmod
from .czo import CommutatorSpec, verify_kernel
from .grids import Cube, GridFunction, load_csv, save_csv
from .harness import (
    build_corpus,
    check_pointwise_sharp_bound,
    commutator_operator,
    cz_decompose,
    equivalence_experiment,
    expand_reciprocal_kernel,
    find_admissible_expansion,
    jn_decay_experiment,
    log_distance_function,
    opnorm_lower_bound,
    reconstruct_oscillation,
    weak_embedding_bound,
)
from .harness.corpus import CorpusSpec
from .maximal import MaximalKind, fefferman_stein_ratio, maximal
from .norms import bmo_norm
from .weights import a1_constant, ap_constant


def _load_input(args, grid):
    if getattr(args, "input", None):
        f = load_csv(args.input)
        if f.grid.shape != grid.shape:
            raise SystemExit("input function does not match the configured grid")
        return GridFunction(grid, f.values)
    return None


def _symbol(args, cfg, grid):
    f = _load_input(args, grid)
    return f if f is not None else log_distance_function(grid)


def cmd_norm(args, cfg):
    grid = cfgmod.resolve_grid(cfg)
    w = cfgmod.resolve_weight(cfg, grid)
    fam = cfgmod.resolve_family(cfg, grid)
    variant = cfgmod.resolve_variant(args.variant)
    f = _load_input(args, grid)
    functions = [f] if f is not None else cfgmod.resolve_corpus(cfg, grid)[0]
    reports = [bmo_norm(g, w, variant, fam).to_json_dict() for g in functions]
    return {"norms": reports, "family": fam.descriptor}


def cmd_weight_check(args, cfg):
    grid = cfgmod.resolve_grid(cfg)
    w = cfgmod.resolve_weight(cfg, grid)
    fam = cfgmod.resolve_family(cfg, grid)
    ps = [float(p) for p in args.p.split(",")] if args.p else [2.0]
    return {
        "weight": cfg.get("weight"),
        "family": fam.descriptor,
        "a1": a1_constant(w, fam),
        "ap": {f"{p:g}": ap_constant(w, p, fam) for p in ps},
    }


def cmd_maximal(args, cfg):
    grid = cfgmod.resolve_grid(cfg)
    w = cfgmod.resolve_weight(cfg, grid)
    fam = cfgmod.resolve_family(cfg, grid)
    f = _load_input(args, grid) or cfgmod.resolve_corpus(cfg, grid)[0][0]
    kind = MaximalKind(args.kind, float(args.param)) if args.param else MaximalKind(args.kind)
    out = maximal(f, kind, w=w if kind.needs_weight else None, cubes=fam)
    if args.csv:
        save_csv(out, args.csv)
    payload = {"kind": args.kind, "max": float(out.values.max()), "min": float(out.values.min())}
    if kind.kind in ("hl_delta", "sharp_delta") and not np.all(f.values == 0):
        try:
            payload["fefferman_stein_ratio"] = fefferman_stein_ratio(
                f, w, p=2.0, delta=kind.param, cubes=fam
            )
        except Exception:
            pass
    return payload


def cmd_cz_decompose(args, cfg):
    grid = cfgmod.resolve_grid(cfg)
    w = cfgmod.resolve_weight(cfg, grid)
    f = _load_input(args, grid) or cfgmod.resolve_corpus(cfg, grid)[0][0]
    base = grid.root_cube()
    dec = cz_decompose(f, w, base, s=float(args.s), r=float(args.r))
    return {
        "threshold": dec.threshold,
        "exponent": dec.exponent,
        "center": dec.center,
        "selected": [{"anchor": list(c.anchor), "side": c.side_cells} for c in dec.selected],
        "properties": dec.verify(f, w),
    }


def cmd_jn_decay(args, cfg):
    grid = cfgmod.resolve_grid(cfg)
    w = cfgmod.resolve_weight(cfg, grid)
    f = _symbol(args, cfg, grid)
    fit = jn_decay_experiment(f, w, grid.root_cube(), r=float(args.r))
    return {"fit": fit.to_json_dict()}


def cmd_lemma1(args, cfg):
    grid = cfgmod.resolve_grid(cfg)
    w = cfgmod.resolve_weight(cfg, grid)
    fam = cfgmod.resolve_family(cfg, grid)
    corpus, spec = cfgmod.resolve_corpus(cfg, grid)
    q1, q2 = float(args.q1), float(args.q2)
    rows = [weak_embedding_bound(f, w, q1, q2, fam).to_json_dict() for f in corpus]
    return {
        "q1": q1,
        "q2": q2,
        "corpus": spec.describe(),
        "all_passed": all(r["passed"] for r in rows),
        "checks": rows,
    }


def cmd_equivalence(args, cfg):
    grid = cfgmod.resolve_grid(cfg)
    w = cfgmod.resolve_weight(cfg, grid)
    fam = cfgmod.resolve_family(cfg, grid)
    corpus, spec = cfgmod.resolve_corpus(cfg, grid)
    rep = equivalence_experiment(
        args.pair,
        float(args.param),
        w,
        corpus,
        fam,
        weight_descriptor=cfg.get("weight", ""),
        corpus_descriptor=spec.describe(),
    )
    if args.ratios_csv:
        with open(args.ratios_csv, "w") as fh:
            fh.write("index,ratio\n")
            for i, rr in enumerate(rep.ratios):
                fh.write(f"{i},{rr!r}\n")
    cap = cfg.get("caps", {}).get("equivalence_band", 25.0)
    out = rep.to_json_dict()
    out["cap"] = cap
    out["passed"] = rep.passes(cap)
    return out


def cmd_sharp_bound(args, cfg):
    grid = cfgmod.resolve_grid(cfg)
    w = cfgmod.resolve_weight(cfg, grid)
    fam = cfgmod.resolve_family(cfg, grid)
    kernel = cfgmod.resolve_kernel(cfg, grid.dim)
    corpus, spec = cfgmod.resolve_corpus(cfg, grid)
    b = _symbol(args, cfg, grid)
    rows = []
    for i in range(0, min(args.count * 2, len(corpus) - 1), 2):
        rep = check_pointwise_sharp_bound(
            b, w, kernel, corpus[i], corpus[i + 1], s=float(args.s), spec=args.slot, cubes=fam
        )
        rows.append(rep.to_json_dict())
    return {"slot": args.slot, "corpus": spec.describe(), "checks": rows}


def cmd_opnorm(args, cfg):
    grid = cfgmod.resolve_grid(cfg)
    w = cfgmod.resolve_weight(cfg, grid)
    kernel = cfgmod.resolve_kernel(cfg, grid.dim)
    b = _symbol(args, cfg, grid)
    op = commutator_operator(kernel, b, slot=args.slot)
    value = opnorm_lower_bound(
        op,
        float(args.p1),
        float(args.p2),
        w,
        target=args.target,
        trials=args.trials,
        seed=args.seed,
    )
    return {
        "operator": op.name,
        "p1": float(args.p1),
        "p2": float(args.p2),
        "target": args.target,
        "trials": args.trials,
        "seed": args.seed,
        "lower_bound": value,
    }


def cmd_reconstruct(args, cfg):
    grid = cfgmod.resolve_grid(cfg)
    kernel = cfgmod.resolve_kernel(cfg, grid.dim)
    b = _symbol(args, cfg, grid)
    exp, preset = find_admissible_expansion(kernel, terms=args.terms)
    cube = Cube((args.cube_anchor,) * grid.dim, args.cube_side)
    res = reconstruct_oscillation(b, kernel, cube, exp, squared=args.squared)
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write("cell,reconstruction,reference\n")
            rec = res.function.values[cube.slices].ravel()
            ref = res.reference.values[cube.slices].ravel()
            for i, (a, bb) in enumerate(zip(rec, ref)):
                fh.write(f"{i},{a!r},{bb!r}\n")
    out = res.to_json_dict()
    out["expansion"] = exp.to_json_dict()
    out["preset"] = list(preset)
    return out


def cmd_report(args, cfg):
    """Battery: weight constants, embedding, equivalences, decay, kernel check."""
    grid = cfgmod.resolve_grid(cfg)
    w = cfgmod.resolve_weight(cfg, grid)
    fam = cfgmod.resolve_family(cfg, grid)
    kernel = cfgmod.resolve_kernel(cfg, grid.dim)
    corpus, spec = cfgmod.resolve_corpus(cfg, grid)
    cap = cfg.get("caps", {}).get("equivalence_band", 25.0)
    payload = {
        "weight_constants": {
            "a1": a1_constant(w, fam),
            "ap2": ap_constant(w, 2.0, fam),
        },
        "kernel_check": verify_kernel(kernel, samples=5000, seed=1).to_json_dict(),
        "embedding": {
            "all_passed": all(
                weak_embedding_bound(f, w, 2.0, 4.0, fam).passed for f in corpus
            )
        },
        "equivalences": {},
        "jn_decay": jn_decay_experiment(
            log_distance_function(grid), w, grid.root_cube()
        ).to_json_dict(),
    }
    for pair, param in (("weak", 2.0), ("subunit", 0.5), ("centered", 0.5), ("power", 2.0)):
        rep = equivalence_experiment(
            pair, param, w, corpus, fam,
            weight_descriptor=cfg.get("weight", ""), corpus_descriptor=spec.describe(),
        )
        entry = rep.to_json_dict()
        entry["passed"] = rep.passes(cap)
        payload["equivalences"][f"{pair}:{param:g}"] = entry
    return payload


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bmolab", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, needs_input=True):
        p.add_argument("--config", default=None, help="JSON config path")
        p.add_argument("--output", default=None, help="JSON report path (default: stdout)")
        if needs_input:
            p.add_argument("--input", default=None, help="CSV grid function to use")

    p = sub.add_parser("norm", help="oscillation norms of the corpus or an input function")
    common(p)
    p.add_argument("--variant", default="strong:1", help="kind:param, e.g. strong:2, weak:2, inf_centered:0.5, stromberg:0.5")
    p.set_defaults(fn=cmd_norm)

    p = sub.add_parser("weight-check", help="endpoint and averaged weight constants")
    common(p, needs_input=False)
    p.add_argument("--p", default="2", help="comma-separated exponents for the averaged constant")
    p.set_defaults(fn=cmd_weight_check)

    p = sub.add_parser("maximal", help="apply a maximal operator, optionally exporting CSV")
    common(p)
    p.add_argument("--kind", default="hl", choices=["hl", "weighted", "sharp", "hl_delta", "sharp_delta", "weighted_s"])
    p.add_argument("--param", default=None, help="delta or s for the power kinds")
    p.add_argument("--csv", default=None, help="CSV export path for the output function")
    p.set_defaults(fn=cmd_maximal)

    p = sub.add_parser("cz-decompose", help="dyadic stopping-time decomposition on the root cube")
    common(p)
    p.add_argument("--s", default="2.718281828459045")
    p.add_argument("--r", default="0.5")
    p.set_defaults(fn=cmd_cz_decompose)

    p = sub.add_parser("jn-decay", help="exponential decay fit of oscillation level sets")
    common(p)
    p.add_argument("--r", default="0.5")
    p.set_defaults(fn=cmd_jn_decay)

    p = sub.add_parser("lemma1", help="strong-vs-weak embedding with its explicit constant")
    common(p, needs_input=False)
    p.add_argument("--q1", default="2")
    p.add_argument("--q2", default="4")
    p.set_defaults(fn=cmd_lemma1)

    p = sub.add_parser("equivalence", help="ratio band between two equivalent norms over a corpus")
    common(p, needs_input=False)
    p.add_argument("--pair", default="weak", choices=["weak", "subunit", "centered", "power"])
    p.add_argument("--param", default="2")
    p.add_argument("--ratios-csv", default=None)
    p.set_defaults(fn=cmd_equivalence)

    p = sub.add_parser("sharp-bound", help="pointwise sharp-maximal majorant constants")
    common(p)
    p.add_argument("--slot", default="first", choices=["first", "second", "iterated"])
    p.add_argument("--s", default="2")
    p.add_argument("--count", type=int, default=3, help="number of (f1, f2) pairs from the corpus")
    p.set_defaults(fn=cmd_sharp_bound)

    p = sub.add_parser("opnorm", help="operator-norm lower bound from the seeded test family")
    common(p)
    p.add_argument("--slot", default="first", choices=["first", "second", "iterated"])
    p.add_argument("--p1", default="2")
    p.add_argument("--p2", default="2")
    p.add_argument("--target", default="strong", choices=["strong", "weak"])
    p.add_argument("--trials", type=int, default=16)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_opnorm)

    p = sub.add_parser("reconstruct", help="rebuild the symbol oscillation from commutator outputs")
    common(p)
    p.add_argument("--terms", type=int, default=32)
    p.add_argument("--cube-anchor", type=int, default=0)
    p.add_argument("--cube-side", type=int, default=8)
    p.add_argument("--squared", action="store_true")
    p.add_argument("--csv", default=None)
    p.set_defaults(fn=cmd_reconstruct)

    p = sub.add_parser("report", help="run the standard battery and write one combined report")
    common(p, needs_input=False)
    p.set_defaults(fn=cmd_report)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = cfgmod.load_config(args.config)
    payload = args.fn(args, cfg)
    if args.output:
        cfgmod.write_report(args.output, payload, cfg)
    else:
        report = {"config_digest": cfgmod.config_digest(cfg), **payload}
        json.dump(report, sys.stdout, indent=2, default=cfgmod._json_default)
        sys.stdout.write("\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
