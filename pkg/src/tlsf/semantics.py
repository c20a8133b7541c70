"""Composition of the six property buckets into one formula."""

from __future__ import annotations

from dataclasses import dataclass, replace

from .ast import (
    And,
    Expr,
    Globally,
    Implies,
    Info,
    Model,
    Not,
    Semantics,
    Variant,
    WeakUntil,
)
from .elaborator import ElaboratedSpec
from .errors import CompositionError


@dataclass(frozen=True)
class CompositionResult:
    formula: Expr
    finite: bool
    model: Model

    @property
    def interpretation(self):
        return "LTLf" if self.finite else "LTL"


def _check_target(spec: ElaboratedSpec):
    sem = spec.info.semantics
    if sem.model is not spec.info.target:
        raise CompositionError(
            f"TARGET {spec.info.target.value} differs from the semantics model {sem.model.value}"
        )


def standard_formula(spec: ElaboratedSpec) -> Expr:
    """theta_e -> (theta_s && ((G psi_e && phi_e) -> (G psi_s && phi_s)))"""
    assumptions = And(Globally(spec.psi_e), spec.phi_e)
    guarantees = And(Globally(spec.psi_s), spec.phi_s)
    return Implies(spec.theta_e, And(spec.theta_s, Implies(assumptions, guarantees)))


def strict_formula(spec: ElaboratedSpec) -> Expr:
    """theta_e -> ((theta_s && (psi_s W !psi_e)) && ((G psi_e && phi_e) -> phi_s))"""
    invariants = WeakUntil(spec.psi_s, Not(spec.psi_e))
    assumptions = And(Globally(spec.psi_e), spec.phi_e)
    return Implies(
        spec.theta_e,
        And(And(spec.theta_s, invariants), Implies(assumptions, spec.phi_s)),
    )


def compose(spec: ElaboratedSpec) -> CompositionResult:
    _check_target(spec)
    variant = spec.info.semantics.variant
    if variant is Variant.STRICT:
        formula = strict_formula(spec)
    else:
        formula = standard_formula(spec)
    return CompositionResult(formula, variant is Variant.FINITE, spec.info.target)


def strict_to_standard(spec: ElaboratedSpec) -> ElaboratedSpec:
    """Rewrite a Strict specification into an equivalent Standard one.

    ``psi_s W !psi_e`` becomes an extra PRESET entry and ASSERT is emptied, so
    the Standard composition only differs from the Strict one by a ``G true``.
    """
    _check_target(spec)
    sem = spec.info.semantics
    if sem.variant is not Variant.STRICT:
        raise CompositionError(f"strict_to_standard needs Strict semantics, got {sem}")
    invariant = WeakUntil(spec.psi_s, Not(spec.psi_e))
    info: Info = replace(spec.info, semantics=Semantics(sem.model, Variant.STANDARD))
    return replace(spec, info=info, preset=spec.preset + (invariant,), assert_=())
