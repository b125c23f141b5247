"""Pointwise sharp-maximal majorants for commutators.

For the slot commutators the majorant of the sharp maximal (at power
1/2) of the commutator output is, cell by cell,

    ||b|| * w(x) * M(T(f1,f2))(x)  +  ||b|| * w(x) * <slot term>

with slot term M_{w,s}(f1) * M(f2) for the first slot and
M(f1) * M_{w,s}(f2) for the second, where ||b|| is the mean-oscillation
norm of the symbol against w. The iterated commutator uses the sharp
maximal at power 1/3 against a four-term majorant involving both slot
commutators at power 1/2 and both weighted maximal factors.

check_pointwise_sharp_bound measures the best constant: the max over
cells of LHS / RHS. Cells where both sides vanish are skipped; a cell
with RHS = 0 < LHS would disprove the majorant and raises.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..czo import BilinearKernel, CommutatorSpec, commutator, eval_bilinear
from ..errors import DegenerateInputError, SharpBoundViolation
from ..grids import CubeFamily, GridFunction
from ..maximal import MaximalKind, maximal
from ..norms import BmoVariant, bmo_norm
from ..weights import Weight


@dataclass(frozen=True)
class SharpBoundReport:
    slot: str
    constant: float
    symbol_norm: float
    cells_skipped: int
    s: float

    def to_json_dict(self) -> dict:
        return {
            "slot": self.slot,
            "constant": self.constant,
            "symbol_norm": self.symbol_norm,
            "cells_skipped": self.cells_skipped,
            "s": self.s,
        }


def _ratio(lhs: np.ndarray, rhs: np.ndarray, slot: str):
    both_zero = (rhs == 0) & (lhs == 0)
    bad = (rhs == 0) & (lhs > 0)
    if bad.any():
        raise SharpBoundViolation(
            f"majorant for slot {slot!r} vanishes on {int(bad.sum())} cells where the left side does not"
        )
    keep = ~both_zero
    const = float(np.max(lhs[keep] / rhs[keep])) if keep.any() else 0.0
    return const, int(both_zero.sum())


def check_pointwise_sharp_bound(
    b: GridFunction,
    w: Weight,
    kernel: BilinearKernel,
    f1: GridFunction,
    f2: GridFunction,
    s: float,
    spec: CommutatorSpec | str,
    cubes: CubeFamily,
) -> SharpBoundReport:
    if isinstance(spec, str):
        spec = CommutatorSpec(spec)
    if not s > 1:
        raise ValueError(f"the weighted maximal exponent needs s > 1, got {s}")
    if b.values.std() == 0:
        raise DegenerateInputError("constant symbol: both sides vanish identically")

    bnorm = bmo_norm(b, w, BmoVariant.strong(1.0), cubes).value
    wv = w.values
    tf = eval_bilinear(kernel, f1, f2)
    m_t = maximal(tf, MaximalKind.hl(), cubes=cubes).values

    if spec.slot in ("first", "second"):
        out = commutator(spec, b, kernel, f1, f2)
        lhs = maximal(out, MaximalKind.sharp_delta(0.5), cubes=cubes).values
        if spec.slot == "first":
            slot_term = (
                maximal(f1, MaximalKind.weighted_s(s), w=w, cubes=cubes).values
                * maximal(f2, MaximalKind.hl(), cubes=cubes).values
            )
        else:
            slot_term = (
                maximal(f1, MaximalKind.hl(), cubes=cubes).values
                * maximal(f2, MaximalKind.weighted_s(s), w=w, cubes=cubes).values
            )
        rhs = bnorm * wv * m_t + bnorm * wv * slot_term
    else:
        out = commutator(spec, b, kernel, f1, f2)
        lhs = maximal(out, MaximalKind.sharp_delta(1.0 / 3.0), cubes=cubes).values
        c1 = commutator("first", b, kernel, f1, f2)
        c2 = commutator("second", b, kernel, f1, f2)
        m_c1 = maximal(c1, MaximalKind.hl_delta(0.5), cubes=cubes).values
        m_c2 = maximal(c2, MaximalKind.hl_delta(0.5), cubes=cubes).values
        mw1 = maximal(f1, MaximalKind.weighted_s(s), w=w, cubes=cubes).values
        mw2 = maximal(f2, MaximalKind.weighted_s(s), w=w, cubes=cubes).values
        rhs = (
            wv**2 * bnorm**2 * m_t
            + wv * bnorm * m_c1
            + wv * bnorm * m_c2
            + wv**2 * bnorm**2 * mw1 * mw2
        )

    const, skipped = _ratio(lhs, rhs, spec.slot)
    return SharpBoundReport(
        slot=spec.slot, constant=const, symbol_norm=bnorm, cells_skipped=skipped, s=float(s)
    )
