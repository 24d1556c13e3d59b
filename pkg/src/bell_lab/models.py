"""Concrete theories: deterministic and stochastic local models, the quantum
singlet reference and a signaling negative control.

Locality is carried by the call signatures. Alice's procedures see only her
own axis and the hidden state, Bob's likewise. The signaling control is the
single exception and is kept in its own class so nothing local can accept it
by accident.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Literal, Optional

import numpy as np

from .core import (
    Axis,
    HiddenDistribution,
    InvalidArgument,
    ModelInvariantError,
    Outcome,
    dot,
    sign,
    uniform_sphere,
)

PROB_TOL = 1e-12

OutcomeFn = Callable[[Axis, np.ndarray], np.ndarray]
ProbFn = Callable[[int, Axis, np.ndarray], np.ndarray]
Side = Literal["alice", "bob"]


@dataclass(frozen=True)
class DeterministicLocalModel:
    name: str
    dist: HiddenDistribution
    alice_outcome: OutcomeFn
    bob_outcome: OutcomeFn
    claims_anticorrelation: bool = False
    closed_form: Optional[Callable[[Axis, Axis], float]] = None


@dataclass(frozen=True)
class StochasticLocalModel:
    name: str
    dist: HiddenDistribution
    alice_prob: ProbFn
    bob_prob: ProbFn
    closed_form: Optional[Callable[[Axis, Axis], float]] = None


@dataclass(frozen=True)
class SignalingReferenceModel:
    """Negative control: Alice's outcome function also reads Bob's setting."""

    name: str
    dist: HiddenDistribution
    alice_outcome: Callable[[Axis, Axis, np.ndarray], np.ndarray]
    bob_outcome: OutcomeFn


class QuantumSingletReference:
    """Singlet-state statistics. Exposes correlations and trial samplers, no hidden state."""

    name = "quantum_singlet"

    def correlation(self, a: Axis, b: Axis) -> float:
        return quantum_correlation(a, b)

    def joint_table(self, a: Axis, b: Axis) -> dict[tuple[int, int], float]:
        c = dot(a, b)
        return {(A, B): (1.0 - A * B * c) / 4.0 for A in (1, -1) for B in (1, -1)}

    def sample_pairs(self, a: Axis, b: Axis, stream: np.random.Generator, n: int):
        """Draw ``n`` outcome pairs; returns two int arrays of +-1."""
        c = dot(a, b)
        u = stream.random((n, 2))
        alice = np.where(u[:, 0] < 0.5, 1, -1)
        # given A, Bob is opposite with probability (1 + a.b) / 2
        opposite = u[:, 1] < (1.0 + c) / 2.0
        bob = np.where(opposite, -alice, alice)
        return alice, bob

    def __repr__(self):
        return "QuantumSingletReference()"


def quantum_correlation(a: Axis, b: Axis) -> float:
    return -dot(a, b)


def quantum_sample_pair(a: Axis, b: Axis, stream: np.random.Generator) -> tuple[Outcome, Outcome]:
    alice, bob = QuantumSingletReference().sample_pairs(a, b, stream, 1)
    return Outcome(int(alice[0])), Outcome(int(bob[0]))


# -- stochastic machinery -----------------------------------------------------

def _probs(model: StochasticLocalModel, side: Side, axis: Axis, lam) -> tuple[np.ndarray, np.ndarray]:
    fn = model.alice_prob if side == "alice" else model.bob_prob
    p_plus = np.asarray(fn(1, axis, lam), dtype=float)
    p_minus = np.asarray(fn(-1, axis, lam), dtype=float)
    bad = (
        (p_plus < -PROB_TOL)
        | (p_plus > 1 + PROB_TOL)
        | (p_minus < -PROB_TOL)
        | (p_minus > 1 + PROB_TOL)
        | (np.abs(p_plus + p_minus - 1.0) > PROB_TOL)
    )
    if np.any(bad):
        i = int(np.flatnonzero(np.atleast_1d(bad))[0])
        raise ModelInvariantError(
            f"{model.name}: {side} probabilities at axis {axis} are not a distribution "
            f"(P(+1)={np.atleast_1d(p_plus)[i]!r}, P(-1)={np.atleast_1d(p_minus)[i]!r})"
        )
    return p_plus, p_minus


def plus_probability(model: StochasticLocalModel, side: Side, axis: Axis, lam) -> np.ndarray:
    return _probs(model, side, axis, lam)[0]


def mean_value(model: StochasticLocalModel, side: Side, axis: Axis, lam):
    """Average outcome P(+1|axis, lam) - P(-1|axis, lam) on one side."""
    if side not in ("alice", "bob"):
        raise InvalidArgument(f"side must be 'alice' or 'bob', got {side!r}")
    p_plus, p_minus = _probs(model, side, axis, lam)
    return p_plus - p_minus


def lift_deterministic(model: DeterministicLocalModel) -> StochasticLocalModel:
    """Express a deterministic model as point-mass outcome probabilities."""

    def alice_prob(outcome, axis, lam):
        return (np.asarray(model.alice_outcome(axis, lam)) == outcome).astype(float)

    def bob_prob(outcome, axis, lam):
        return (np.asarray(model.bob_outcome(axis, lam)) == outcome).astype(float)

    return StochasticLocalModel(f"lifted:{model.name}", model.dist, alice_prob, bob_prob, model.closed_form)


# -- built-in models ----------------------------------------------------------

def make_sign_sphere_model() -> DeterministicLocalModel:
    """lam uniform on S^2, A = sign(a.lam), B = -sign(b.lam)."""

    def alice(axis, lam):
        return sign(np.asarray(lam) @ axis.vec)

    def bob(axis, lam):
        return -sign(np.asarray(lam) @ axis.vec)

    return DeterministicLocalModel(
        "sign_sphere", uniform_sphere(), alice, bob, claims_anticorrelation=True, closed_form=sign_sphere_correlation
    )


def sign_sphere_correlation(a: Axis, b: Axis) -> float:
    """Closed form of the sign-sphere correlation, -1 + 2 theta / pi."""
    return -1.0 + 2.0 * math.acos(dot(a, b)) / math.pi


def make_threshold_model(matrix, offset: float = 0.0, name: str = "threshold") -> DeterministicLocalModel:
    """Perfectly anti-correlated family A = sign(x . M lam + offset), B = -A.

    Any real 3x3 ``matrix`` and ``offset`` give a valid local model; random
    draws supply a broad family of witnesses for the Bell inequality.
    """
    m = np.array(matrix, dtype=float).reshape(3, 3)
    m.flags.writeable = False
    offset = float(offset)

    def alice(axis, lam):
        return sign(np.asarray(lam) @ (m.T @ axis.vec) + offset)

    def bob(axis, lam):
        return -alice(axis, lam)

    return DeterministicLocalModel(name, uniform_sphere(), alice, bob, claims_anticorrelation=True)


def make_local_noise_model(bias: float, bob_bias: float | None = None) -> StochasticLocalModel:
    """Noisy local coins on the sphere.

    P_A(+1|a, lam) = (1 + bias a.lam) / 2 and P_B(+1|b, lam) = (1 - bob_bias b.lam) / 2,
    giving E(a, b) = -bias * bob_bias * (a.b) / 3.
    """
    bob_bias = bias if bob_bias is None else bob_bias
    for value in (bias, bob_bias):
        if not math.isfinite(value) or abs(value) > 1.0:
            raise InvalidArgument(f"bias must lie in [-1, 1], got {value!r}")

    def alice_prob(outcome, axis, lam):
        return (1.0 + outcome * bias * (np.asarray(lam) @ axis.vec)) / 2.0

    def bob_prob(outcome, axis, lam):
        return (1.0 - outcome * bob_bias * (np.asarray(lam) @ axis.vec)) / 2.0

    def closed_form(a, b):
        return -bias * bob_bias * dot(a, b) / 3.0

    return StochasticLocalModel(
        f"local_noise({bias:g},{bob_bias:g})", uniform_sphere(), alice_prob, bob_prob, closed_form
    )


def make_signaling_model() -> SignalingReferenceModel:
    """A(a, b, lam) = sign(a.b) sign(b.lam), B = -sign(b.lam); E = -sign(a.b)."""

    def alice(a, b, lam):
        return sign(dot(a, b)) * sign(np.asarray(lam) @ b.vec)

    def bob(axis, lam):
        return -sign(np.asarray(lam) @ axis.vec)

    return SignalingReferenceModel("signaling_demo", uniform_sphere(), alice, bob)


BUILTIN_MODELS: dict[str, Callable[[], object]] = {
    "sign_sphere": make_sign_sphere_model,
    "local_noise": lambda: make_local_noise_model(1.0),
    "quantum_singlet": QuantumSingletReference,
    "signaling_demo": make_signaling_model,
}


def get_model(name: str):
    try:
        return BUILTIN_MODELS[name]()
    except KeyError:
        known = ", ".join(sorted(BUILTIN_MODELS))
        raise InvalidArgument(f"unknown model {name!r} (known: {known})") from None
