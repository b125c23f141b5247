"""Experiment configuration: one JSON file resolves every ingredient.

A config names the grid, weight preset, kernel preset, corpus spec,
norm variants, cube family, boundary mode, and caps. Reports embed the
resolved config plus its content digest so any number in any output can
be traced back to the exact inputs that produced it.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

from .czo import BilinearKernel, kernel_from_preset
from .errors import ConfigurationError
from .grids import FamilySpec, Grid, enumerate_cubes
from .harness.corpus import CorpusSpec, build_corpus
from .norms import BmoVariant
from .weights import Weight, weight_from_preset

DEFAULT_CONFIG = {
    "grid": {"dim": 1, "cells": 128, "box": 1.0},
    "weight": "const",
    "kernel": "odd1d",
    "corpus": {"kind": "mixed", "count": 20, "seed": 7},
    "family": {"kind": "dyadic"},
    "boundary": "box",
    "caps": {"equivalence_band": 25.0, "fs_ratio": 50.0},
}


def load_config(path) -> dict:
    cfg = dict(DEFAULT_CONFIG)
    if path is not None:
        with open(path) as fh:
            user = json.load(fh)
        if not isinstance(user, dict):
            raise ConfigurationError("config file must hold a JSON object")
        cfg.update(user)
    return cfg


def config_digest(cfg: dict) -> str:
    blob = json.dumps(cfg, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def resolve_grid(cfg: dict) -> Grid:
    g = cfg.get("grid", DEFAULT_CONFIG["grid"])
    return Grid(
        dim=int(g.get("dim", 1)),
        cells_per_axis=int(g.get("cells", 128)),
        box_side=float(g.get("box", 1.0)),
        origin=g.get("origin"),
    )


def resolve_weight(cfg: dict, grid: Grid) -> Weight:
    return weight_from_preset(grid, cfg.get("weight", "const"))


def resolve_family(cfg: dict, grid: Grid):
    fam = cfg.get("family", {"kind": "dyadic"})
    spec = FamilySpec(
        kind=fam.get("kind", "dyadic"),
        sides=tuple(fam.get("sides", ())),
        stride=int(fam.get("stride", 1)),
    )
    return enumerate_cubes(grid, spec)


def resolve_kernel(cfg: dict, dim: int) -> BilinearKernel:
    return kernel_from_preset(cfg.get("kernel", "odd1d"), dim=dim)


def resolve_corpus(cfg: dict, grid: Grid):
    c = cfg.get("corpus", DEFAULT_CONFIG["corpus"])
    spec = CorpusSpec(kind=c.get("kind", "mixed"), count=int(c.get("count", 20)), seed=int(c.get("seed", 0)))
    return build_corpus(grid, spec), spec


def resolve_variant(entry) -> BmoVariant:
    if isinstance(entry, dict):
        return BmoVariant(entry["variant"], float(entry.get("param", 1.0)))
    kind, _, param = str(entry).partition(":")
    return BmoVariant(kind.strip(), float(param) if param else 1.0)


def write_report(path, payload: dict, cfg: dict) -> dict:
    report = {
        "config": cfg,
        "config_digest": config_digest(cfg),
        **payload,
    }
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(report, fh, indent=2, default=_json_default)
        fh.write("\n")
    return report


def _json_default(obj):
    import numpy as np

    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"cannot serialize {type(obj)!r}")
