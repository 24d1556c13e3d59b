"""Shared primitives: measurement axes, outcomes, hidden states and their distributions.

Hidden states are plain float arrays. A single state has shape ``(dim,)``;
model procedures also accept batches of shape ``(n, dim)`` and broadcast.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

NORM_TOL = 1e-12
WEIGHT_TOL = 1e-12


class InvalidArgument(ValueError):
    """Raised for arguments outside an operation's precondition."""


class ModelInvariantError(ValueError):
    """Raised when a model's probability tables are malformed."""


class PremiseViolation(RuntimeError):
    """A derivation premise (locality, perfect anti-correlation) fails for a model."""

    def __init__(self, message: str, offending: Optional[list] = None):
        super().__init__(message)
        self.offending = offending or []


class UnsupportedDistribution(ValueError):
    """The hidden distribution offers neither quadrature nodes nor sphere support."""


class Outcome(enum.IntEnum):
    PLUS = 1
    MINUS = -1

    @classmethod
    def of(cls, value: int) -> "Outcome":
        if value not in (1, -1):
            raise InvalidArgument(f"outcome must be +1 or -1, got {value!r}")
        return cls(value)


def sign(t):
    """Elementwise sign with the convention sign(0) = +1."""
    return np.where(np.asarray(t) >= 0.0, 1, -1)


@dataclass(frozen=True)
class Axis:
    """Unit measurement direction. Components are renormalized on construction."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        v = np.array([self.x, self.y, self.z], dtype=float)
        if not np.all(np.isfinite(v)):
            raise InvalidArgument(f"axis components must be finite, got {tuple(v)}")
        norm = math.sqrt(float(v @ v))
        if norm == 0.0:
            raise InvalidArgument("axis must be a non-zero vector")
        v = v / norm
        object.__setattr__(self, "x", float(v[0]))
        object.__setattr__(self, "y", float(v[1]))
        object.__setattr__(self, "z", float(v[2]))

    @classmethod
    def from_vector(cls, v) -> "Axis":
        x, y, z = (float(c) for c in v)
        return cls(x, y, z)

    @property
    def vec(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def __neg__(self) -> "Axis":
        return Axis(-self.x, -self.y, -self.z)


def axis_from_planar_angle(theta: float) -> Axis:
    """Axis in the x-z measurement plane at angle ``theta`` (radians) from +z."""
    if not math.isfinite(theta):
        raise InvalidArgument(f"angle must be finite, got {theta!r}")
    return Axis(math.sin(theta), 0.0, math.cos(theta))


def planar_angle(axis: Axis) -> float:
    """Inverse of :func:`axis_from_planar_angle` for axes in the x-z plane."""
    return math.atan2(axis.x, axis.z)


def dot(a: Axis, b: Axis) -> float:
    d = a.x * b.x + a.y * b.y + a.z * b.z
    return min(1.0, max(-1.0, d))


def included_angle(a: Axis, b: Axis) -> float:
    return math.acos(dot(a, b))


# -- random streams ---------------------------------------------------------

def make_stream(seed: int, index: int = 0) -> np.random.Generator:
    """Counter-based stream fully determined by ``(seed, index)``.

    Distinct indices give statistically independent Philox streams, so
    workers can each own one without sharing state.
    """
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(index),))
    return np.random.Generator(np.random.Philox(ss))


# -- hidden distributions ---------------------------------------------------

Sampler = Callable[[np.random.Generator, int], np.ndarray]


@dataclass(frozen=True)
class HiddenDistribution:
    """Distribution rho over hidden states.

    ``sampler(stream, n)`` returns an ``(n, dimension)`` array and must depend
    on nothing but the stream. ``sphere_supported`` marks rho as the uniform
    measure on S^2, in which case a :class:`~bell_lab.correlator.QuadratureSpec`
    can generate nodes on demand.
    """

    dimension: int
    sampler: Sampler
    quadrature_nodes: Optional[tuple[np.ndarray, np.ndarray]] = None
    sphere_supported: bool = False
    name: str = field(default="custom")

    def __post_init__(self):
        if self.dimension < 1:
            raise InvalidArgument("dimension must be positive")
        if self.quadrature_nodes is not None:
            points, weights = self.quadrature_nodes
            points = np.atleast_2d(np.asarray(points, dtype=float))
            weights = np.asarray(weights, dtype=float)
            if points.shape != (weights.size, self.dimension):
                raise InvalidArgument(
                    f"quadrature points have shape {points.shape}, "
                    f"expected ({weights.size}, {self.dimension})"
                )
            if np.any(weights < 0) or abs(weights.sum() - 1.0) > WEIGHT_TOL:
                raise InvalidArgument("quadrature weights must be non-negative and sum to 1")
            object.__setattr__(self, "quadrature_nodes", (points, weights))

    def sample(self, stream: np.random.Generator, n: int) -> np.ndarray:
        lam = np.asarray(self.sampler(stream, n), dtype=float)
        return lam.reshape(n, self.dimension)


def sample_hidden(dist: HiddenDistribution, stream: np.random.Generator) -> np.ndarray:
    """Draw one hidden state of the distribution's declared dimension."""
    return dist.sample(stream, 1)[0]


def _uniform_sphere(stream: np.random.Generator, n: int) -> np.ndarray:
    g = stream.standard_normal((n, 3))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def uniform_sphere() -> HiddenDistribution:
    return HiddenDistribution(3, _uniform_sphere, sphere_supported=True, name="uniform_sphere")


def point_mass(state) -> HiddenDistribution:
    state = np.asarray(state, dtype=float).reshape(-1)
    frozen = state.copy()
    frozen.flags.writeable = False

    def sampler(stream, n):
        return np.broadcast_to(frozen, (n, frozen.size)).copy()

    return HiddenDistribution(
        frozen.size,
        sampler,
        quadrature_nodes=(frozen[None, :], np.ones(1)),
        name="point_mass",
    )


def discrete(states, weights) -> HiddenDistribution:
    """Finite distribution; its support doubles as exact quadrature nodes."""
    states = np.atleast_2d(np.asarray(states, dtype=float))
    weights = np.asarray(weights, dtype=float)
    cdf = np.cumsum(weights)

    def sampler(stream, n):
        idx = np.searchsorted(cdf, stream.random(n) * cdf[-1], side="right")
        return states[np.minimum(idx, len(states) - 1)]

    return HiddenDistribution(
        states.shape[1], sampler, quadrature_nodes=(states, weights), name="discrete"
    )
