"""Bell and CHSH functionals plus step-by-step audits of their derivations.

An audit evaluates every integral on one shared node set. Each intermediate
identity is then an algebraic fact about finite sums, so its residual sits at
rounding level and any larger value points to a bug.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import Axis, InvalidArgument, PremiseViolation
from .correlator import DEFAULT_QUAD, QuadratureSpec, anticorrelation_violations, hidden_nodes
from .models import (
    DeterministicLocalModel,
    SignalingReferenceModel,
    StochasticLocalModel,
    mean_value,
    plus_probability,
)

INPUT_LIMIT = 1.01
CLOSED_FORM_TOL = 1e-9
QUADRATURE_TOL = 1e-6


def _check_inputs(*values: float) -> None:
    for v in values:
        if not np.isfinite(v) or abs(v) > INPUT_LIMIT:
            raise InvalidArgument(f"correlation {v!r} outside [-{INPUT_LIMIT}, {INPUT_LIMIT}]")


@dataclass(frozen=True)
class BellReport:
    lhs: float
    rhs: float
    satisfied: bool
    margin: float


@dataclass(frozen=True)
class ChshReport:
    s_value: float
    bound: float
    satisfied: bool
    margin: float


def bell_functional(e_ab: float, e_ac: float, e_bc: float, tol: float = CLOSED_FORM_TOL) -> BellReport:
    """|E(a,b) - E(a,c)| <= 1 + E(b,c)."""
    _check_inputs(e_ab, e_ac, e_bc)
    lhs = abs(e_ab - e_ac)
    rhs = 1.0 + e_bc
    margin = rhs - lhs
    return BellReport(lhs, rhs, margin >= -tol, margin)


def chsh_functional(e_ab: float, e_ab2: float, e_a2b: float, e_a2b2: float, tol: float = CLOSED_FORM_TOL) -> ChshReport:
    """|E(a,b) - E(a,b')| + |E(a',b') + E(a',b)| <= 2."""
    _check_inputs(e_ab, e_ab2, e_a2b, e_a2b2)
    s = abs(e_ab - e_ab2) + abs(e_a2b2 + e_a2b)
    return ChshReport(s, 2.0, s <= 2.0 + tol, 2.0 - s)


@dataclass
class DerivationAudit:
    step_names: list[str] = field(default_factory=list)
    step_residuals: list[float] = field(default_factory=list)
    four_term_value: float = float("nan")
    max_residual: float = 0.0
    report: BellReport | ChshReport | None = None

    def record(self, name: str, residual: float) -> None:
        residual = float(residual)
        self.step_names.append(name)
        self.step_residuals.append(residual)
        self.max_residual = max(self.max_residual, residual)

    def rows(self) -> list[dict]:
        return [{"step": n, "residual": r} for n, r in zip(self.step_names, self.step_residuals)]


def audit_bell_derivation(
    model: DeterministicLocalModel, a: Axis, b: Axis, c: Axis, quad: QuadratureSpec = DEFAULT_QUAD
) -> DerivationAudit:
    if isinstance(model, SignalingReferenceModel) or not isinstance(model, DeterministicLocalModel):
        raise PremiseViolation(f"{model.name!r} is not a deterministic local model")
    lam, w = hidden_nodes(model.dist, quad)
    offending = anticorrelation_violations(model, [a, b, c], lam)
    if offending:
        i, axis, state = offending[0]
        raise PremiseViolation(
            f"{model.name}: perfect anti-correlation fails at axis {axis} for hidden state {state} "
            f"({len(offending)} failing probes)",
            offending,
        )

    A = lambda x: np.asarray(model.alice_outcome(x, lam), dtype=float)  # noqa: E731
    B = lambda x: np.asarray(model.bob_outcome(x, lam), dtype=float)  # noqa: E731
    Aa, Ab, Ac = A(a), A(b), A(c)
    Bb, Bc = B(b), B(c)
    integral = lambda f: float(w @ f)  # noqa: E731

    e_ab = integral(Aa * Bb)
    e_ac = integral(Aa * Bc)
    e_bc = integral(Ab * Bc)

    audit = DerivationAudit()
    # Bob's factor replaced by minus Alice's on the same axis, both readings
    audit.record("correlation_from_alice_only", abs(e_ab - (-integral(Aa * Ab))))
    audit.record("correlation_from_minus_bob", abs(e_ab - (-integral(Aa * -Bb))))
    difference = e_ab - e_ac
    audit.record("difference_as_single_integral", abs(difference - integral(Aa * Ac - Aa * Ab)))
    audit.record("unit_insertion_per_node", np.max(np.abs(Ab * Ab - 1.0)))

    four = integral(Aa * Ab * Ab * Ac)
    audit.four_term_value = four
    audit.record("four_factor_expansion", abs(difference - (four - integral(Aa * Ab))))
    audit.record("factored_form", abs(difference - integral(Aa * Ab * (Ab * Ac - 1.0))))
    audit.record("identify_bc_correlation", abs(-integral(Ab * Ac) - e_bc))

    # |E(a,b) - E(a,c)| <= int |A_a A_b| |A_b A_c - 1| = int (1 - A_b A_c) = 1 + E(b,c)
    bound = integral(np.abs(Aa * Ab) * np.abs(Ab * Ac - 1.0))
    audit.record("absolute_value_bound", max(0.0, abs(difference) - bound))
    audit.record("bound_equals_one_plus_ebc", abs(bound - (1.0 + e_bc)))
    report = bell_functional(e_ab, e_ac, e_bc)
    audit.record("bell_report_consistency", max(0.0, -report.margin) + abs(report.rhs - bound))
    audit.report = report
    return audit


def audit_chsh_derivation(
    model: StochasticLocalModel, a: Axis, a2: Axis, b: Axis, b2: Axis, quad: QuadratureSpec = DEFAULT_QUAD
) -> DerivationAudit:
    if isinstance(model, DeterministicLocalModel):
        raise InvalidArgument("lift deterministic models with lift_deterministic() before a CHSH audit")
    if not isinstance(model, StochasticLocalModel):
        raise PremiseViolation(f"{model!r} is not a stochastic local model")
    lam, w = hidden_nodes(model.dist, quad)
    integral = lambda f: float(w @ f)  # noqa: E731

    # mean_value validates normalisation and raises ModelInvariantError
    Abar = {"a": mean_value(model, "alice", a, lam), "a2": mean_value(model, "alice", a2, lam)}
    Bbar = {"b": mean_value(model, "bob", b, lam), "b2": mean_value(model, "bob", b2, lam)}
    axes = {"a": a, "a2": a2, "b": b, "b2": b2}

    audit = DerivationAudit()
    E = {}
    for x in ("a", "a2"):
        pa = plus_probability(model, "alice", axes[x], lam)
        for y in ("b", "b2"):
            pb = plus_probability(model, "bob", axes[y], lam)
            outcome_sum = sum(
                A * B * (pa if A == 1 else 1.0 - pa) * (pb if B == 1 else 1.0 - pb)
                for A in (1, -1)
                for B in (1, -1)
            )
            E[x, y] = integral(Abar[x] * Bbar[y])
            audit.record(f"outcome_sum_vs_mean_product[{x},{y}]", abs(integral(outcome_sum) - E[x, y]))

    difference = E["a", "b"] - E["a", "b2"]
    audit.record(
        "difference_as_single_integral",
        abs(difference - integral(Abar["a"] * Bbar["b"] - Abar["a"] * Bbar["b2"])),
    )

    cross = Abar["a"] * Abar["a2"] * Bbar["b"] * Bbar["b2"]
    audit.four_term_value = integral(cross)
    for branch, pm in (("plus", 1.0), ("minus", -1.0)):
        audit.record(f"added_zero_cancels[{branch}]", np.max(np.abs(pm * cross - pm * cross)))
        factored = Abar["a"] * Bbar["b"] * (1.0 + pm * Abar["a2"] * Bbar["b2"]) - Abar["a"] * Bbar["b2"] * (
            1.0 + pm * Abar["a2"] * Bbar["b"]
        )
        audit.record(f"factored_difference[{branch}]", abs(difference - integral(factored)))
        f1 = 1.0 + pm * Abar["a2"] * Bbar["b2"]
        f2 = 1.0 + pm * Abar["a2"] * Bbar["b"]
        audit.record(f"nonnegative_factors[{branch}]", max(0.0, -min(f1.min(), f2.min())))
        # |difference| <= int f1 + int f2 = 2 +- (E(a',b') + E(a',b))
        bound = integral(f1) + integral(f2)
        audit.record(
            f"bound_identity[{branch}]",
            abs(bound - (2.0 + pm * (E["a2", "b2"] + E["a2", "b"]))),
        )
        audit.record(f"absolute_value_bound[{branch}]", max(0.0, abs(difference) - bound))

    audit.record(
        "means_bounded_by_one",
        max(0.0, max(np.max(np.abs(v)) for v in (*Abar.values(), *Bbar.values())) - 1.0),
    )
    report = chsh_functional(E["a", "b"], E["a", "b2"], E["a2", "b"], E["a2", "b2"])
    audit.record("chsh_at_most_two", max(0.0, report.s_value - 2.0))
    audit.report = report
    return audit
