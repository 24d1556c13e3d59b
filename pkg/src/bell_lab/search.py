"""Local bounds by enumerating deterministic strategies, and the quantum CHSH
maximum by coordinate-wise golden-section search over planar angles."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from .core import Axis, InvalidArgument, axis_from_planar_angle, planar_angle
from .correlator import DEFAULT_QUAD, QuadratureSpec, correlation_exact, hidden_nodes, outcome_means
from .inequalities import CLOSED_FORM_TOL, QUADRATURE_TOL, bell_functional, chsh_functional
from .models import QuantumSingletReference, SignalingReferenceModel

Functional = Literal["bell", "chsh"]
TSIRELSON = 2.0 * math.sqrt(2.0)
INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class ScenarioSpec:
    alice_settings: tuple[Axis, ...]
    bob_settings: tuple[Axis, ...]

    def __post_init__(self):
        object.__setattr__(self, "alice_settings", tuple(self.alice_settings))
        object.__setattr__(self, "bob_settings", tuple(self.bob_settings))
        if not self.alice_settings or not self.bob_settings:
            raise InvalidArgument("both parties need at least one setting")

    @classmethod
    def chsh_planar(cls, a: float, a2: float, b: float, b2: float) -> "ScenarioSpec":
        """CHSH scenario from four planar angles in radians."""
        return cls(
            (axis_from_planar_angle(a), axis_from_planar_angle(a2)),
            (axis_from_planar_angle(b), axis_from_planar_angle(b2)),
        )

    @classmethod
    def bell_planar(cls, a: float, b: float, c: float) -> "ScenarioSpec":
        """Bell layout: Alice measures a or b, Bob measures b or c."""
        ax, bx, cx = (axis_from_planar_angle(t) for t in (a, b, c))
        return cls((ax, bx), (bx, cx))

    def planar_angles(self) -> tuple[float, ...]:
        return tuple(planar_angle(x) for x in (*self.alice_settings, *self.bob_settings))


@dataclass(frozen=True)
class StrategyTable:
    alice_values: dict[int, int]
    bob_values: dict[int, int]


def _check_arity(scenario: ScenarioSpec, functional: str) -> None:
    if functional not in ("bell", "chsh"):
        raise InvalidArgument(f"functional must be 'bell' or 'chsh', got {functional!r}")
    if len(scenario.alice_settings) != 2 or len(scenario.bob_settings) != 2:
        raise InvalidArgument(
            f"{functional} needs 2 settings per party, got "
            f"{len(scenario.alice_settings)}x{len(scenario.bob_settings)}"
        )


def enumerate_local_bound(scenario: ScenarioSpec, functional: Functional = "chsh") -> tuple:
    """Exact maximum of the functional over deterministic local strategies.

    For ``chsh`` the value is S. For ``bell`` it is the violation LHS - RHS,
    taken over strategies obeying perfect anti-correlation wherever Alice and
    Bob share an axis; a maximum of 0 means the inequality holds. Only
    integers are involved, so no tolerance is needed.
    """
    _check_arity(scenario, functional)
    shared = [
        (i, j)
        for i, x in enumerate(scenario.alice_settings)
        for j, y in enumerate(scenario.bob_settings)
        if x == y
    ]
    best, witness = None, None
    for av in itertools.product((1, -1), repeat=2):
        for bv in itertools.product((1, -1), repeat=2):
            if functional == "bell" and any(bv[j] != -av[i] for i, j in shared):
                continue
            e = lambda i, j: av[i] * bv[j]  # noqa: E731
            if functional == "chsh":
                value = abs(e(0, 0) - e(0, 1)) + abs(e(1, 1) + e(1, 0))
            else:
                # E(a,b), E(a,c), E(b,c) in the Bell layout
                value = abs(e(0, 0) - e(0, 1)) - (1 + e(1, 1))
            if best is None or value > best:
                best, witness = value, StrategyTable(dict(enumerate(av)), dict(enumerate(bv)))
    return best, witness


# -- quantum optimisation -----------------------------------------------------

def quantum_chsh_value(angles: Sequence[float]) -> float:
    """S for singlet correlations at planar angles (a, a', b, b') in radians."""
    a, a2, b, b2 = angles
    e = lambda x, y: -math.cos(x - y)  # noqa: E731
    return chsh_functional(e(a, b), e(a, b2), e(a2, b), e(a2, b2)).s_value


def golden_section_max(f, lo: float, hi: float, tol: float, max_evals: int):
    """Maximise a unimodal f on [lo, hi]; returns (x, f(x), evaluations used)."""
    c = hi - INV_PHI * (hi - lo)
    d = lo + INV_PHI * (hi - lo)
    fc, fd = f(c), f(d)
    evals = 2
    while hi - lo > tol and evals < max_evals:
        if fc >= fd:
            hi, d, fd = d, c, fc
            c = hi - INV_PHI * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + INV_PHI * (hi - lo)
            fd = f(d)
        evals += 1
    if fc >= fd:
        return c, fc, evals
    return d, fd, evals


@dataclass(frozen=True)
class OptimizationResult:
    s_value: float
    settings: ScenarioSpec
    converged: bool
    evaluations: int

    def __iter__(self):
        return iter((self.s_value, self.settings))


def optimize_quantum_chsh(
    initial: ScenarioSpec,
    budget: int = 5000,
    tol: float = 1e-6,
    bracket: float = math.pi / 4,
) -> OptimizationResult:
    """Coordinate ascent on the four planar angles with golden-section line search.

    Each sweep searches every angle within +-``bracket`` of its current value;
    the bracket halves after a sweep that gains less than ``tol``. Angles are
    kept in [0, 2 pi).
    """
    if budget < 100:
        raise InvalidArgument(f"budget must be at least 100 evaluations, got {budget}")
    x = [t % (2 * math.pi) for t in initial.planar_angles()]
    best = quantum_chsh_value(x)
    evals = 1
    h = bracket
    converged = False
    while evals < budget:
        start = best
        for k in range(4):
            def line(t, k=k):
                y = list(x)
                y[k] = t
                return quantum_chsh_value(y)

            t, val, used = golden_section_max(line, x[k] - h, x[k] + h, 1e-10, budget - evals)
            evals += used
            # first-found maximum wins ties
            if val > best:
                x[k], best = t % (2 * math.pi), val
            if evals >= budget:
                break
        gain = best - start
        if gain < tol * 1e-3:
            if h < 1e-7:
                converged = True
                break
            h /= 2
    return OptimizationResult(best, ScenarioSpec.chsh_planar(*x), converged, evals)


# -- landscapes -----------------------------------------------------------------

def _correlation_grid(source, angles: np.ndarray, quad: QuadratureSpec) -> np.ndarray:
    """E[i, j] for Alice at angles[i] and Bob at angles[j]."""
    axes = [axis_from_planar_angle(float(t)) for t in angles]
    if isinstance(source, QuantumSingletReference):
        return -np.cos(angles[:, None] - angles[None, :])
    if isinstance(source, SignalingReferenceModel):
        return np.array([[correlation_exact(source, x, y, quad).value for y in axes] for x in axes])
    lam, w = hidden_nodes(source.dist, quad)
    # local models: Alice's means do not depend on Bob's axis
    alice = np.array([outcome_means(source, x, x, lam)[0] for x in axes])
    bob = np.array([outcome_means(source, x, x, lam)[1] for x in axes])
    return (alice * w) @ bob.T


def angle_sweep(
    functional: Functional,
    source,
    grid_step: float,
    quad: QuadratureSpec = DEFAULT_QUAD,
) -> list[dict]:
    """Functional values over a planar grid with Alice's first angle pinned at 0.

    ``grid_step`` is in radians. CHSH rows vary (a', b, b'); Bell rows vary
    (b, c). Rows come in lexicographic grid order.
    """
    if not grid_step > 0:
        raise InvalidArgument(f"grid_step must be positive, got {grid_step!r}")
    if functional not in ("bell", "chsh"):
        raise InvalidArgument(f"functional must be 'bell' or 'chsh', got {functional!r}")
    grid = np.arange(0.0, 2 * math.pi - 1e-12, grid_step) if grid_step < 2 * math.pi else np.zeros(1)
    E = _correlation_grid(source, grid, quad)
    tol = CLOSED_FORM_TOL if isinstance(source, QuantumSingletReference) else QUADRATURE_TOL
    rows = []
    idx = range(len(grid))
    if functional == "chsh":
        for i2, j, j2 in itertools.product(idx, idx, idx):
            r = chsh_functional(E[0, j], E[0, j2], E[i2, j], E[i2, j2], tol=tol)
            rows.append({"a": 0.0, "a2": grid[i2], "b": grid[j], "b2": grid[j2], "value": r.s_value, "satisfied": r.satisfied})
    else:
        for j, k in itertools.product(idx, idx):
            r = bell_functional(E[0, j], E[0, k], E[j, k], tol=tol)
            rows.append({"a": 0.0, "b": grid[j], "c": grid[k], "value": r.lhs - r.rhs, "satisfied": r.satisfied})
    return rows
