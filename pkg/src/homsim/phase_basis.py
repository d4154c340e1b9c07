"""Superpositions of phase-basis beam-splitter matrices.

A beam splitter with basis sign ``s`` has transfer matrix ``U_s``. A
:class:`BasisCase` mixes two of them at amplitude level:

    same / symmetric        (U_s + U_s) / 2 = U_s
    same / antisymmetric    (U_s - U_s) / 2 = 0          (degenerate)
    opposite / symmetric    (U_s + U_-s) / 2             diagonal
    opposite / antisymmetric (U_s - U_-s) / 2            anti-diagonal

Mixtures of opposite bases are not unitary. They are flagged and evaluated
as they are, never renormalized.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Union

from .numerics import (
    BasisSign,
    Convention,
    ElementMatrix,
    FieldVector,
    apply,
    bs_matrix,
    intensities,
    phase_matrix,
)
from .wave import coincidence_normalized, hom_input

QUADRATURE = math.pi / 2
ZERO_TOL = 1e-10


class DegenerateCaseError(ValueError):
    """The two superposed matrices cancel to the zero matrix."""


class Relation(enum.Enum):
    SAME = "same"
    OPPOSITE = "opposite"


class Combination(enum.Enum):
    SYMMETRIC = "symmetric"
    ANTISYMMETRIC = "antisymmetric"


@dataclass(frozen=True)
class BasisCase:
    relation: Relation
    combination: Combination
    primary_sign: BasisSign = BasisSign.PLUS

    @property
    def degenerate(self) -> bool:
        return self.relation is Relation.SAME and self.combination is Combination.ANTISYMMETRIC

    @property
    def secondary_sign(self) -> BasisSign:
        return self.primary_sign if self.relation is Relation.SAME else -self.primary_sign

    @property
    def label(self) -> str:
        return f"{self.relation.value}/{self.combination.value}/{self.primary_sign.symbol}"

    @classmethod
    def from_label(cls, label: str) -> "BasisCase":
        rel, comb, sign = label.split("/")
        return cls(Relation(rel), Combination(comb), BasisSign.from_symbol(sign))


def all_cases() -> list[BasisCase]:
    return [
        BasisCase(rel, comb, sign)
        for rel in Relation
        for comb in Combination
        for sign in (BasisSign.PLUS, BasisSign.MINUS)
    ]


@dataclass(frozen=True)
class CaseVerdict:
    case: BasisCase
    hom_r_at_quadrature: float | None
    mzi_directional: bool
    allowed: bool
    notes: str = ""
    degenerate: bool = False


def superposed_matrix(case: BasisCase, conv: Convention = Convention.UNITARY) -> ElementMatrix:
    if case.degenerate:
        raise DegenerateCaseError(
            f"{case.label}: antisymmetric superposition of identical bases is the zero matrix"
        )
    first = bs_matrix(case.primary_sign, conv).entries
    second = bs_matrix(case.secondary_sign, conv).entries
    if case.combination is Combination.SYMMETRIC:
        mixed = 0.5 * (first + second)
    else:
        mixed = 0.5 * (first - second)
    return ElementMatrix(mixed, conv, non_unitary=case.relation is Relation.OPPOSITE)


def evaluate_hom_case(case: BasisCase, theta: float,
                      conv: Convention = Convention.UNITARY) -> tuple[float, float, float]:
    """``(I_c, I_d, R)`` for inputs ``[E_0, E_0 e^{i theta}]`` through the superposed BS."""
    out = apply(superposed_matrix(case, conv), hom_input(theta), ("c", "d"))
    i_c, i_d = intensities(out)
    return i_c, i_d, coincidence_normalized(i_c, i_d).r_value


def one_input_bs_case(combination: BasisSign, conv: Convention = Convention.UNITARY) -> FieldVector:
    """Single input ``[E_0, 0]`` through ``(U_+ + U_-)/2`` (PLUS) or ``(U_+ - U_-)/2`` (MINUS).

    PLUS leaves everything in port c, MINUS moves everything to port d.
    """
    comb = Combination.SYMMETRIC if combination is BasisSign.PLUS else Combination.ANTISYMMETRIC
    m = superposed_matrix(BasisCase(Relation.OPPOSITE, comb, BasisSign.PLUS), conv)
    return apply(m, FieldVector([1.0, 0.0], ("a", "b")), ("c", "d"))


@dataclass(frozen=True)
class UnitaryBS1:
    """First MZI splitter is an ordinary beam splitter of the given sign."""

    sign: BasisSign = BasisSign.PLUS

    def output(self, conv: Convention) -> FieldVector:
        return apply(bs_matrix(self.sign, conv), FieldVector([1.0, 0.0]), ("c", "d"))

    @property
    def label(self) -> str:
        return f"unitary({self.sign.symbol}) BS1"


@dataclass(frozen=True)
class SuperposedBS1:
    """First MZI splitter analysed as a one-input phase-basis superposition.

    Port c carries the output of the symmetric mixture ``(U_s + U_-s)/2`` and
    port d that of the antisymmetric mixture ``(U_s - U_-s)/2``. For a single
    input on port a this coincides with ``U_s`` applied to it.
    """

    sign: BasisSign = BasisSign.PLUS

    def output(self, conv: Convention) -> FieldVector:
        src = FieldVector([1.0, 0.0])
        sym = apply(superposed_matrix(
            BasisCase(Relation.OPPOSITE, Combination.SYMMETRIC, self.sign), conv), src)
        anti = apply(superposed_matrix(
            BasisCase(Relation.OPPOSITE, Combination.ANTISYMMETRIC, self.sign), conv), src)
        return FieldVector([sym[0], anti[1]], ("c", "d"))

    @property
    def label(self) -> str:
        return f"superposed({self.sign.symbol}) BS1"


BS1Rule = Union[UnitaryBS1, SuperposedBS1]


def evaluate_mzi_case(bs1_rule: BS1Rule, bs2_case: BasisCase, zeta: float,
                      conv: Convention = Convention.UNITARY,
                      phase_after_bs1: bool = True) -> tuple[float, float, float]:
    """``(I_e, I_f, R_ef)`` for input ``[E_0, 0]`` through BS1, phase(d, zeta), BS2.

    With ``phase_after_bs1=False`` the shifter sits on the empty input port b
    ahead of BS1 instead, so ``zeta`` has no effect on the outputs.
    """
    bs2 = superposed_matrix(bs2_case, conv)
    mid = bs1_rule.output(conv)
    if phase_after_bs1:
        mid = apply(phase_matrix("d", zeta, conv), mid)
    out = apply(bs2, mid, ("e", "f"))
    i_e, i_f = intensities(out)
    return i_e, i_f, coincidence_normalized(i_e, i_f).r_value


def mzi_directional(bs1_rule: BS1Rule, bs2_case: BasisCase,
                    conv: Convention = Convention.UNITARY) -> bool:
    """Nothing in port e at zeta = 0 and nothing in port f at zeta = pi."""
    i_e, _, _ = evaluate_mzi_case(bs1_rule, bs2_case, 0.0, conv)
    _, i_f, _ = evaluate_mzi_case(bs1_rule, bs2_case, math.pi, conv)
    return i_e < ZERO_TOL and i_f < ZERO_TOL


def _fmt(x: float) -> str:
    return f"{x:.3g}"


def classify_case(case: BasisCase, conv: Convention = Convention.UNITARY) -> CaseVerdict:
    if case.degenerate:
        return CaseVerdict(case, None, False, False,
                           "degenerate: matrices cancel to zero, no action", degenerate=True)
    _, _, r = evaluate_hom_case(case, QUADRATURE, conv)
    hom_ok = r < ZERO_TOL
    rules = [UnitaryBS1(case.primary_sign), SuperposedBS1(case.primary_sign)]
    failed = [rule.label for rule in rules if not mzi_directional(rule, case, conv)]
    directional = not failed
    notes = [f"HOM R={_fmt(r)} at theta=pi/2"]
    if failed:
        notes.append("MZI directionality fails under " + ", ".join(failed))
    else:
        notes.append("MZI directional under " + ", ".join(rule.label for rule in rules))
    return CaseVerdict(case, r, directional, hom_ok and directional, "; ".join(notes))


def classify_all(conv: Convention = Convention.UNITARY,
                 include_degenerate: bool = False) -> list[CaseVerdict]:
    """Verdict for every basis case; degenerate ones only if asked for."""
    return [
        classify_case(case, conv)
        for case in all_cases()
        if include_degenerate or not case.degenerate
    ]
