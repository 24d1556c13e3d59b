"""Correlation functions E(a, b): closed form, quadrature over the hidden state,
and seeded Monte Carlo trial simulation."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Literal, Sequence

import numpy as np

from .core import (
    Axis,
    HiddenDistribution,
    InvalidArgument,
    UnsupportedDistribution,
    make_stream,
)
from .models import (
    DeterministicLocalModel,
    QuantumSingletReference,
    SignalingReferenceModel,
    StochasticLocalModel,
    mean_value,
    plus_probability,
)

# trials per random stream; fixes the trial -> stream assignment for any worker count
CHUNK = 1 << 16

Method = Literal["closed_form", "quadrature", "monte_carlo"]


@dataclass(frozen=True)
class CorrelationEstimate:
    value: float
    stderr: float = 0.0
    n_samples: int = 0
    method: Method = "quadrature"

    def __float__(self):
        return self.value


@dataclass(frozen=True)
class QuadratureSpec:
    """Product rule on S^2: Gauss-Legendre in cos(theta), periodic rule in phi.

    The polar axis is +y, the normal of the x-z measurement plane, and the phi
    nodes sit at cell midpoints. For planar settings the sign-sphere integrand
    then depends on phi alone, and it is integrated exactly whenever the
    setting angles are multiples of 2*pi/n_phi.
    """

    n_theta: int = 64
    n_phi: int = 64

    def __post_init__(self):
        if self.n_theta < 2 or self.n_phi < 4:
            raise InvalidArgument(f"need n_theta >= 2 and n_phi >= 4, got {self.n_theta}, {self.n_phi}")

    def nodes(self) -> tuple[np.ndarray, np.ndarray]:
        return _sphere_nodes(self.n_theta, self.n_phi)


@lru_cache(maxsize=16)
def _sphere_nodes(n_theta: int, n_phi: int) -> tuple[np.ndarray, np.ndarray]:
    t, wt = np.polynomial.legendre.leggauss(n_theta)
    phi = (np.arange(n_phi) + 0.5) * (2.0 * np.pi / n_phi)
    s = np.sqrt(1.0 - t * t)
    # polar axis along y; (z, x) spanned by phi
    y = np.repeat(t, n_phi)
    z = np.outer(s, np.cos(phi)).ravel()
    x = np.outer(s, np.sin(phi)).ravel()
    points = np.column_stack([x, y, z])
    weights = np.repeat(wt / 2.0, n_phi) / n_phi
    weights = weights / weights.sum()
    points.flags.writeable = False
    weights.flags.writeable = False
    return points, weights


DEFAULT_QUAD = QuadratureSpec()


def hidden_nodes(dist: HiddenDistribution, quad: QuadratureSpec = DEFAULT_QUAD) -> tuple[np.ndarray, np.ndarray]:
    """Quadrature nodes and weights realising the integral over rho."""
    if dist.sphere_supported:
        return quad.nodes()
    if dist.quadrature_nodes is not None:
        return dist.quadrature_nodes
    raise UnsupportedDistribution(
        f"distribution {dist.name!r} has no quadrature nodes and is not sphere-supported"
    )


def outcome_means(model, a: Axis, b: Axis, lam: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-state average outcomes (Alice at ``a``, Bob at ``b``)."""
    if isinstance(model, DeterministicLocalModel):
        return (
            np.asarray(model.alice_outcome(a, lam), dtype=float),
            np.asarray(model.bob_outcome(b, lam), dtype=float),
        )
    if isinstance(model, StochasticLocalModel):
        return mean_value(model, "alice", a, lam), mean_value(model, "bob", b, lam)
    if isinstance(model, SignalingReferenceModel):
        return (
            np.asarray(model.alice_outcome(a, b, lam), dtype=float),
            np.asarray(model.bob_outcome(b, lam), dtype=float),
        )
    raise InvalidArgument(f"no hidden-state description for {model!r}")


def correlation_exact(model, a: Axis, b: Axis, quad: QuadratureSpec = DEFAULT_QUAD) -> CorrelationEstimate:
    if isinstance(model, QuantumSingletReference):
        return CorrelationEstimate(model.correlation(a, b), method="closed_form")
    points, weights = hidden_nodes(model.dist, quad)
    abar, bbar = outcome_means(model, a, b, points)
    return CorrelationEstimate(float(weights @ (abar * bbar)), method="quadrature")


# -- Monte Carlo --------------------------------------------------------------

def worker_count(workers: int | None = None) -> int:
    """Resolve parallelism: explicit argument, else BELL_LAB_WORKERS, else CPU count."""
    if workers is None:
        raw = os.environ.get("BELL_LAB_WORKERS", "").strip()
        workers = int(raw) if raw else 0
    if workers <= 0:
        workers = min(8, os.cpu_count() or 1)
    return workers


def _trial_products(model, a: Axis, b: Axis, stream: np.random.Generator, m: int) -> np.ndarray:
    if isinstance(model, QuantumSingletReference):
        alice, bob = model.sample_pairs(a, b, stream, m)
        return alice * bob
    lam = model.dist.sample(stream, m)
    if isinstance(model, StochasticLocalModel):
        # outcomes drawn independently given lam, as the factorised form requires
        p_a = plus_probability(model, "alice", a, lam)
        p_b = plus_probability(model, "bob", b, lam)
        u = stream.random((m, 2))
        alice = np.where(u[:, 0] < p_a, 1, -1)
        bob = np.where(u[:, 1] < p_b, 1, -1)
        return alice * bob
    abar, bbar = outcome_means(model, a, b, lam)
    return (abar * bbar).astype(np.int64)


def _chunk_sum(model, a, b, seed: int, index: int, m: int) -> int:
    products = _trial_products(model, a, b, make_stream(seed, index), m)
    return int(np.sum(products, dtype=np.int64))


def correlation_mc(model, a: Axis, b: Axis, n: int, seed: int, workers: int | None = None) -> CorrelationEstimate:
    """Mean of n simulated outcome products.

    Trials are cut into fixed chunks, chunk k drawing from stream (seed, k),
    and chunk sums are integers, so the result is bit-identical for every
    worker count.
    """
    if n < 1:
        raise InvalidArgument(f"need at least one trial, got n={n}")
    sizes = [CHUNK] * (n // CHUNK)
    if n % CHUNK:
        sizes.append(n % CHUNK)
    jobs = list(enumerate(sizes))
    nw = min(worker_count(workers), len(jobs))
    if nw <= 1:
        sums = [_chunk_sum(model, a, b, seed, k, m) for k, m in jobs]
    else:
        with ThreadPoolExecutor(max_workers=nw) as pool:
            sums = list(pool.map(lambda job: _chunk_sum(model, a, b, seed, *job), jobs))
    total = sum(sums)
    mean = total / n
    # each product is +-1, so the sample variance follows from the mean alone
    stderr = math.sqrt(max(0.0, 1.0 - mean * mean) / (n - 1)) if n > 1 else 0.0
    return CorrelationEstimate(mean, stderr, n, "monte_carlo")


def reference_correlation(model, a: Axis, b: Axis, quad: QuadratureSpec = DEFAULT_QUAD) -> CorrelationEstimate:
    """Closed form when the model has one, quadrature otherwise."""
    closed = getattr(model, "closed_form", None)
    if closed is not None:
        return CorrelationEstimate(float(closed(a, b)), method="closed_form")
    return correlation_exact(model, a, b, quad)


# -- premise and convergence checks --------------------------------------------

@dataclass(frozen=True)
class AnticorrelationReport:
    n_probes: int
    violations: list = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return not self.violations


def anticorrelation_violations(model, axes: Sequence[Axis], lam: np.ndarray) -> list[tuple[int, Axis, tuple]]:
    """All (axis index, axis, lam) with A(x, lam) != -B(x, lam)."""
    lam = np.atleast_2d(lam)
    found = []
    for i, x in enumerate(axes):
        if isinstance(model, SignalingReferenceModel):
            alice = np.asarray(model.alice_outcome(x, x, lam))
        else:
            alice = np.asarray(model.alice_outcome(x, lam))
        bob = np.asarray(model.bob_outcome(x, lam))
        for j in np.flatnonzero(alice != -bob):
            found.append((i, x, tuple(float(c) for c in lam[j])))
    return found


def anticorrelation_check(model, axes: Sequence[Axis], n_lambda: int, seed: int) -> AnticorrelationReport:
    if not axes or n_lambda <= 0:
        return AnticorrelationReport(0, [])
    lam = model.dist.sample(make_stream(seed, 0), n_lambda)
    return AnticorrelationReport(len(axes) * n_lambda, anticorrelation_violations(model, axes, lam))


def mc_convergence_scan(
    model,
    a: Axis,
    b: Axis,
    n_list: Sequence[int],
    seed: int,
    quad: QuadratureSpec = DEFAULT_QUAD,
    workers: int | None = None,
) -> list[dict]:
    """Rows (n, estimate, exact, |mc - exact|, stderr); stderr is NaN for n = 1."""
    if any(n2 <= n1 for n1, n2 in zip(n_list, n_list[1:])):
        raise InvalidArgument("n_list must be strictly ascending")
    exact = reference_correlation(model, a, b, quad).value
    rows = []
    for n in n_list:
        est = correlation_mc(model, a, b, n, seed, workers)
        rows.append(
            {
                "n": n,
                "estimate": est.value,
                "exact": exact,
                "abs_error": abs(est.value - exact),
                "stderr": est.stderr if n > 1 else math.nan,
            }
        )
    return rows
