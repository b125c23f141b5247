"""Norm-equivalence sweeps and the explicit weak-to-strong embedding bound.

weak_embedding_bound checks, function by function, that the strong
oscillation norm at exponent q1 is dominated by

    2 * (q1 / (q2 - q1))**(1/q2)

times the weak-type oscillation norm at exponent q2 (1 < q1 < q2). The
derivation is a layer-cake split of the lambda integral at the optimal
level, and every ingredient is exact on the discrete measure, so the
inequality is asserted with float slack only.

equivalence_experiment pairs two oscillation norms that are claimed to
be equivalent, computes the per-function ratio over a corpus, and
reports the min/max ratio band. Pairs:

    weak(p)      mean oscillation vs weak-type at p in (1, inf)
    subunit(r)   mean oscillation vs strong at r in (0, 1)
    centered(r)  strong at r vs best-constant at r, r in (0, 1)
    power(p)     mean oscillation vs strong at p in (1, inf)
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .._parallel import parallel_map
from ..errors import DegenerateInputError
from ..grids import CubeFamily, GridFunction
from ..norms import BmoVariant, bmo_norm
from ..weights import Weight, a1_constant


def weak_embedding_constant(q1: float, q2: float) -> float:
    """The explicit constant 2 * (q1 / (q2 - q1))**(1/q2)."""
    if not (1 < q1 < q2):
        raise ValueError(f"need 1 < q1 < q2, got q1={q1}, q2={q2}")
    return 2.0 * (q1 / (q2 - q1)) ** (1.0 / q2)


@dataclass(frozen=True)
class EmbeddingReport:
    q1: float
    q2: float
    constant: float
    strong_norm: float
    weak_norm: float
    slack: float = 1e-9

    @property
    def passed(self) -> bool:
        bound = self.constant * self.weak_norm
        return self.strong_norm <= bound * (1.0 + self.slack) + 1e-300

    def to_json_dict(self) -> dict:
        return {
            "q1": self.q1,
            "q2": self.q2,
            "constant": self.constant,
            "strong_norm": self.strong_norm,
            "weak_norm": self.weak_norm,
            "passed": self.passed,
        }


def weak_embedding_bound(
    f: GridFunction, w: Weight, q1: float, q2: float, cubes: CubeFamily
) -> EmbeddingReport:
    if not (1 < q1 < q2):
        raise ValueError(f"need 1 < q1 < q2, got q1={q1}, q2={q2}")
    strong = bmo_norm(f, w, BmoVariant.strong(q1), cubes).value
    weak = bmo_norm(f, w, BmoVariant.weak(q2), cubes).value
    return EmbeddingReport(
        q1=q1, q2=q2, constant=weak_embedding_constant(q1, q2), strong_norm=strong, weak_norm=weak
    )


# ---------------------------------------------------------------------------
# equivalence experiments
# ---------------------------------------------------------------------------


def _pair_weak(p):
    return BmoVariant.strong(1.0), BmoVariant.weak(p)


def _pair_subunit(r):
    return BmoVariant.strong(1.0), BmoVariant.strong(r)


def _pair_centered(r):
    return BmoVariant.strong(r), BmoVariant.inf_centered(r)


def _pair_power(p):
    return BmoVariant.strong(1.0), BmoVariant.strong(p)


EQUIVALENCE_PAIRS = {
    "weak": _pair_weak,
    "subunit": _pair_subunit,
    "centered": _pair_centered,
    "power": _pair_power,
}


@dataclass(frozen=True)
class EquivalenceReport:
    pair: str
    param: float
    norm_a: str
    norm_b: str
    ratios: tuple
    min_ratio: float
    max_ratio: float
    weight_descriptor: str
    weight_a1: float
    corpus_descriptor: str
    family_descriptor: str
    skipped: int = 0  # corpus members with a vanishing reference norm

    @property
    def band(self) -> float:
        return self.max_ratio / self.min_ratio

    def passes(self, cap: float) -> bool:
        return self.band <= cap

    def to_json_dict(self) -> dict:
        return {
            "pair": self.pair,
            "param": self.param,
            "norm_a": self.norm_a,
            "norm_b": self.norm_b,
            "min_ratio": self.min_ratio,
            "max_ratio": self.max_ratio,
            "band": self.band,
            "count": len(self.ratios),
            "skipped": self.skipped,
            "weight": self.weight_descriptor,
            "weight_a1": self.weight_a1,
            "corpus": self.corpus_descriptor,
            "family": self.family_descriptor,
        }


def equivalence_experiment(
    pair: str,
    param: float,
    w: Weight,
    corpus,
    cubes: CubeFamily,
    weight_descriptor: str = "",
    corpus_descriptor: str = "",
) -> EquivalenceReport:
    """Per-function ratio band between the two norms of a claimed equivalence.

    corpus is a list of GridFunctions; members must be non-constant.
    The weight's endpoint constant is recomputed and recorded so every
    report carries the admissibility evidence for its weight.
    """
    if pair not in EQUIVALENCE_PAIRS:
        raise ValueError(f"unknown equivalence pair {pair!r}; choose from {sorted(EQUIVALENCE_PAIRS)}")
    corpus = list(corpus)
    if not corpus:
        raise DegenerateInputError("empty corpus")
    if all(f.values.std() == 0 for f in corpus):
        raise DegenerateInputError("corpus contains only constant functions")
    var_a, var_b = EQUIVALENCE_PAIRS[pair](param)

    def one(f):
        na = bmo_norm(f, w, var_a, cubes).value
        nb = bmo_norm(f, w, var_b, cubes).value
        return na, nb

    results = parallel_map(one, corpus)
    ratios = []
    skipped = 0
    for na, nb in results:
        if nb > 0:
            ratios.append(na / nb)
        else:
            skipped += 1
    if not ratios:
        raise DegenerateInputError("every corpus member had a vanishing reference norm")
    arr = np.array(ratios)
    return EquivalenceReport(
        pair=pair,
        param=float(param),
        norm_a=var_a.describe(),
        norm_b=var_b.describe(),
        ratios=tuple(float(r) for r in arr),
        min_ratio=float(arr.min()),
        max_ratio=float(arr.max()),
        weight_descriptor=weight_descriptor,
        weight_a1=a1_constant(w, cubes),
        corpus_descriptor=corpus_descriptor,
        family_descriptor=cubes.descriptor,
        skipped=skipped,
    )
