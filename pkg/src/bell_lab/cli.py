"""Command-line front end.

    bell-lab chsh --model quantum_singlet --angles 0,90,45,135
    bell-lab audit-bell --model sign_sphere --angles 0,45,90 --out audit.csv
    bell-lab sweep --config sweep.ini --step 10

Exit status: 0 success, 1 usage or IO error, 2 a derivation premise fails.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Sequence

from . import __version__
from .core import InvalidArgument, PremiseViolation, axis_from_planar_angle
from .correlator import QuadratureSpec, correlation_exact, correlation_mc, mc_convergence_scan
from .inequalities import (
    CLOSED_FORM_TOL,
    QUADRATURE_TOL,
    audit_bell_derivation,
    audit_chsh_derivation,
    bell_functional,
    chsh_functional,
)
from .models import DeterministicLocalModel, QuantumSingletReference, get_model, lift_deterministic
from .search import (
    TSIRELSON,
    ScenarioSpec,
    angle_sweep,
    enumerate_local_bound,
    optimize_quantum_chsh,
)

COMMANDS = ("correlate", "bell", "chsh", "audit-bell", "audit-chsh", "local-bound", "optimize", "sweep", "mc-scan")
ARITY = {
    "correlate": 2,
    "bell": 3,
    "chsh": 4,
    "audit-bell": 3,
    "audit-chsh": 4,
    "optimize": 4,
    "mc-scan": 2,
}
DEFAULT_ANGLES = {"local-bound": {"chsh": (0.0, 90.0, 45.0, 135.0), "bell": (0.0, 45.0, 90.0)}}
CONFIG_KEYS = {"command", "model", "angles", "n", "seed", "quad", "out", "budget", "step", "functional"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass(frozen=True)
class ExperimentConfig:
    command: str
    model: str = "sign_sphere"
    angles_deg: tuple[float, ...] = ()
    n_samples: int = 100_000
    seed: int = 42
    quad: tuple[int, int] = (64, 64)
    output_path: str = ""
    budget: int = 5000
    grid_step_deg: float = 15.0
    functional: str = "chsh"

    def validate(self) -> "ExperimentConfig":
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r} (expected one of {', '.join(COMMANDS)})")
        if self.functional not in ("bell", "chsh"):
            raise UsageError(f"functional must be 'bell' or 'chsh', got {self.functional!r}")
        cfg = self
        if not cfg.angles_deg and cfg.command in DEFAULT_ANGLES:
            cfg = replace(cfg, angles_deg=DEFAULT_ANGLES[cfg.command][cfg.functional])
        expected = ARITY.get(cfg.command)
        if cfg.command == "local-bound":
            expected = 4 if cfg.functional == "chsh" else 3
        if expected is not None and len(cfg.angles_deg) != expected:
            raise UsageError(
                f"{cfg.command} expects {expected} angles in degrees, got {len(cfg.angles_deg)}"
            )
        if any(not math.isfinite(t) for t in cfg.angles_deg):
            raise UsageError("angles must be finite")
        if cfg.n_samples < 1:
            raise UsageError(f"n must be positive, got {cfg.n_samples}")
        if cfg.grid_step_deg <= 0:
            raise UsageError(f"step must be positive, got {cfg.grid_step_deg}")
        try:
            QuadratureSpec(*cfg.quad)
        except InvalidArgument as exc:
            raise UsageError(str(exc)) from None
        if not cfg.output_path:
            cfg = replace(cfg, output_path=f"{cfg.command}.csv")
        return cfg

    @property
    def angles_rad(self) -> list[float]:
        return [math.radians(t) for t in self.angles_deg]


# -- config parsing -----------------------------------------------------------

def read_config_file(path: str | Path) -> dict[str, str]:
    """Flat ``key = value`` file; ``#`` and ``;`` start comments."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror}") from None
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line[0] in "#;":
            continue
        key, sep, value = line.partition("=")
        key = key.strip().lower()
        if not sep or not key:
            raise UsageError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        if key not in CONFIG_KEYS:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = value.strip()
    return values


def _floats(text: str, what: str) -> tuple[float, ...]:
    try:
        return tuple(float(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise UsageError(f"{what} must be comma-separated numbers, got {text!r}") from None


def _int(text, what: str) -> int:
    try:
        return int(text)
    except (TypeError, ValueError):
        raise UsageError(f"{what} must be an integer, got {text!r}") from None


def _build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="bell-lab", description="Bell/CHSH simulation and audit tool")
    p.add_argument("command", nargs="?", help=", ".join(COMMANDS))
    p.add_argument("--model", help="sign_sphere, local_noise, quantum_singlet, signaling_demo")
    p.add_argument("--angles", help="comma-separated angles in degrees")
    p.add_argument("--n", help="Monte Carlo trials (mc-scan: largest n)")
    p.add_argument("--seed")
    p.add_argument("--quad", help="NTHETA,NPHI")
    p.add_argument("--out", help="CSV output path")
    p.add_argument("--config", help="key = value config file; flags override it")
    p.add_argument("--budget", help="optimizer evaluation budget")
    p.add_argument("--step", help="sweep grid step in degrees")
    p.add_argument("--functional", help="bell or chsh (local-bound, sweep)")
    p.add_argument("--version", action="version", version=f"bell-lab {__version__}")
    return p


def parse_config(argv: Sequence[str]) -> ExperimentConfig:
    args = _build_parser().parse_args(list(argv))
    values = read_config_file(args.config) if args.config else {}
    for key in CONFIG_KEYS:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
    if not values.get("command"):
        raise UsageError("missing required key 'command'")
    kwargs = {"command": values["command"].strip()}
    if "model" in values:
        kwargs["model"] = values["model"].strip()
    if "angles" in values:
        kwargs["angles_deg"] = _floats(values["angles"], "angles")
    if "n" in values:
        kwargs["n_samples"] = _int(values["n"], "n")
    if "seed" in values:
        kwargs["seed"] = _int(values["seed"], "seed")
    if "quad" in values:
        q = _floats(values["quad"], "quad")
        if len(q) != 2 or any(v != int(v) for v in q):
            raise UsageError(f"quad must be two integers NTHETA,NPHI, got {values['quad']!r}")
        kwargs["quad"] = (int(q[0]), int(q[1]))
    if "out" in values:
        kwargs["output_path"] = values["out"]
    if "budget" in values:
        kwargs["budget"] = _int(values["budget"], "budget")
    if "step" in values:
        step = _floats(values["step"], "step")
        if len(step) != 1:
            raise UsageError(f"step must be a single number, got {values['step']!r}")
        kwargs["grid_step_deg"] = step[0]
    if "functional" in values:
        kwargs["functional"] = values["functional"].strip()
    return ExperimentConfig(**kwargs).validate()


# -- output -------------------------------------------------------------------

def _cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".9g")
    return str(v)


def emit_csv(rows: Iterable[dict], path: str | Path, header: Sequence[str], comment: str | None = None) -> None:
    """Write an optional ``#`` provenance line, the header, then the rows."""
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            if comment:
                fh.write(f"# {comment}\n")
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([_cell(row[k]) for k in header])
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from None


# -- commands -----------------------------------------------------------------

def _verdict(ok: bool) -> str:
    return "SATISFIED" if ok else "VIOLATED"


def _tol(model) -> float:
    return CLOSED_FORM_TOL if isinstance(model, QuantumSingletReference) else QUADRATURE_TOL


def _cmd_correlate(cfg, model, quad):
    a, b = (axis_from_planar_angle(t) for t in cfg.angles_rad)
    exact = correlation_exact(model, a, b, quad)
    mc = correlation_mc(model, a, b, cfg.n_samples, cfg.seed)
    rows = [
        {"method": exact.method, "value": exact.value, "stderr": exact.stderr, "n_samples": exact.n_samples},
        {"method": mc.method, "value": mc.value, "stderr": mc.stderr, "n_samples": mc.n_samples},
    ]
    ok = abs(exact.value) <= 1 + CLOSED_FORM_TOL and abs(mc.value) <= 1
    summary = (
        f"E = {exact.value:.6f} ({exact.method}), MC {mc.value:.6f} +- {mc.stderr:.6f} "
        f"(n={mc.n_samples}), {_verdict(ok)} (bound |E| <= 1)"
    )
    return rows, ["method", "value", "stderr", "n_samples"], summary, 0


def _cmd_bell(cfg, model, quad):
    a, b, c = (axis_from_planar_angle(t) for t in cfg.angles_rad)
    e = {
        "e_ab": correlation_exact(model, a, b, quad).value,
        "e_ac": correlation_exact(model, a, c, quad).value,
        "e_bc": correlation_exact(model, b, c, quad).value,
    }
    r = bell_functional(e["e_ab"], e["e_ac"], e["e_bc"], tol=_tol(model))
    rows = [{"quantity": k, "value": v} for k, v in e.items()]
    rows += [
        {"quantity": "lhs", "value": r.lhs},
        {"quantity": "rhs", "value": r.rhs},
        {"quantity": "margin", "value": r.margin},
        {"quantity": "satisfied", "value": r.satisfied},
    ]
    summary = f"LHS = {r.lhs:.4f}, RHS = {r.rhs:.4f}, {_verdict(r.satisfied)} (bound LHS <= RHS)"
    return rows, ["quantity", "value"], summary, 0


def _chsh_correlations(model, angles, quad):
    a, a2, b, b2 = (axis_from_planar_angle(t) for t in angles)
    return {
        "e_ab": correlation_exact(model, a, b, quad).value,
        "e_ab2": correlation_exact(model, a, b2, quad).value,
        "e_a2b": correlation_exact(model, a2, b, quad).value,
        "e_a2b2": correlation_exact(model, a2, b2, quad).value,
    }


def _cmd_chsh(cfg, model, quad):
    e = _chsh_correlations(model, cfg.angles_rad, quad)
    r = chsh_functional(*e.values(), tol=_tol(model))
    rows = [{"quantity": k, "value": v} for k, v in e.items()]
    rows += [
        {"quantity": "s_value", "value": r.s_value},
        {"quantity": "bound", "value": r.bound},
        {"quantity": "satisfied", "value": r.satisfied},
    ]
    summary = f"S = {r.s_value:.6f}, {_verdict(r.satisfied)} (bound 2)"
    return rows, ["quantity", "value"], summary, 0


def _audit_rows(audit):
    rows = [{"step": n, "value": r} for n, r in zip(audit.step_names, audit.step_residuals)]
    rows.append({"step": "four_term_value", "value": audit.four_term_value})
    rows.append({"step": "max_residual", "value": audit.max_residual})
    return rows


def _cmd_audit_bell(cfg, model, quad):
    if not isinstance(model, DeterministicLocalModel):
        raise PremiseViolation(f"{cfg.model} is not a deterministic local model; the Bell derivation does not apply")
    a, b, c = (axis_from_planar_angle(t) for t in cfg.angles_rad)
    audit = audit_bell_derivation(model, a, b, c, quad)
    r = audit.report
    summary = (
        f"audit max residual = {audit.max_residual:.3e}; "
        f"LHS = {r.lhs:.4f}, RHS = {r.rhs:.4f}, {_verdict(r.satisfied)} (bound LHS <= RHS)"
    )
    return _audit_rows(audit), ["step", "value"], summary, 0


def _cmd_audit_chsh(cfg, model, quad):
    if isinstance(model, DeterministicLocalModel):
        model = lift_deterministic(model)
    a, a2, b, b2 = (axis_from_planar_angle(t) for t in cfg.angles_rad)
    audit = audit_chsh_derivation(model, a, a2, b, b2, quad)
    r = audit.report
    summary = f"audit max residual = {audit.max_residual:.3e}; S = {r.s_value:.6f}, {_verdict(r.satisfied)} (bound 2)"
    return _audit_rows(audit), ["step", "value"], summary, 0


def _cmd_local_bound(cfg, model, quad):
    ang = cfg.angles_rad
    scenario = ScenarioSpec.chsh_planar(*ang) if cfg.functional == "chsh" else ScenarioSpec.bell_planar(*ang)
    best, witness = enumerate_local_bound(scenario, cfg.functional)
    rows = [
        {"party": "alice", "setting": i, "value": v} for i, v in witness.alice_values.items()
    ] + [{"party": "bob", "setting": j, "value": v} for j, v in witness.bob_values.items()]
    rows.append({"party": "max", "setting": "", "value": best})
    if cfg.functional == "chsh":
        summary = f"local bound S_max = {best}, {_verdict(best <= 2)} (bound 2)"
    else:
        summary = f"local max of LHS - RHS = {best}, {_verdict(best <= 0)} (bound 0)"
    return rows, ["party", "setting", "value"], summary, 0


def _cmd_optimize(cfg, model, quad):
    result = optimize_quantum_chsh(ScenarioSpec.chsh_planar(*cfg.angles_rad), cfg.budget)
    deg = [math.degrees(t) for t in result.settings.planar_angles()]
    rows = [
        {
            "a": deg[0], "a2": deg[1], "b": deg[2], "b2": deg[3],
            "s_value": result.s_value, "converged": result.converged, "evaluations": result.evaluations,
        }
    ]
    summary = (
        f"S = {result.s_value:.6f}, {_verdict(result.s_value <= 2 + CLOSED_FORM_TOL)} (bound 2); "
        f"quantum maximum 2*sqrt(2) = {TSIRELSON:.6f}, converged={result.converged}"
    )
    return rows, list(rows[0]), summary, 0


def _cmd_sweep(cfg, model, quad):
    rows = angle_sweep(cfg.functional, model, math.radians(cfg.grid_step_deg), quad)
    for row in rows:
        for k in ("a", "a2", "b", "b2", "c"):
            if k in row:
                row[k] = math.degrees(row[k])
    header = list(rows[0])
    best = max(rows, key=lambda r: r["value"])
    where = ",".join(f"{best[k]:g}" for k in header if k not in ("value", "satisfied"))
    n_bad = sum(not r["satisfied"] for r in rows)
    bound = "2" if cfg.functional == "chsh" else "0 for LHS - RHS"
    summary = (
        f"max {cfg.functional} value = {best['value']:.6f} at ({where}), "
        f"{_verdict(n_bad == 0)} (bound {bound}); {n_bad} of {len(rows)} grid points violate"
    )
    return rows, header, summary, 0


def _cmd_mc_scan(cfg, model, quad):
    a, b = (axis_from_planar_angle(t) for t in cfg.angles_rad)
    n_list = []
    n = 1
    while n < cfg.n_samples:
        n_list.append(n)
        n *= 4
    n_list.append(cfg.n_samples)
    rows = mc_convergence_scan(model, a, b, n_list, cfg.seed, quad)
    last = rows[-1]
    ok = len(rows) == 1 or last["abs_error"] <= 5 * last["stderr"]
    summary = (
        f"|MC - exact| = {last['abs_error']:.6f} at n = {last['n']}, stderr {last['stderr']:.6f}, "
        f"{_verdict(ok)} (bound 5 stderr)"
    )
    return rows, ["n", "estimate", "exact", "abs_error", "stderr"], summary, 0


HANDLERS = {
    "correlate": _cmd_correlate,
    "bell": _cmd_bell,
    "chsh": _cmd_chsh,
    "audit-bell": _cmd_audit_bell,
    "audit-chsh": _cmd_audit_chsh,
    "local-bound": _cmd_local_bound,
    "optimize": _cmd_optimize,
    "sweep": _cmd_sweep,
    "mc-scan": _cmd_mc_scan,
}


def run(cfg: ExperimentConfig, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        model = get_model(cfg.model)
        quad = QuadratureSpec(*cfg.quad)
        rows, header, summary, status = HANDLERS[cfg.command](cfg, model, quad)
    except PremiseViolation as exc:
        print(f"PREMISE VIOLATED: {exc}", file=err)
        return 2
    except InvalidArgument as exc:
        print(f"error: {exc}", file=err)
        return 1
    comment = f"bell-lab {__version__} command={cfg.command} model={cfg.model} seed={cfg.seed}"
    try:
        emit_csv(rows, cfg.output_path, header, comment)
    except OSError as exc:
        print(f"error: {exc}", file=err)
        return 1
    print(summary, file=out)
    return status


def main(argv: Sequence[str] | None = None) -> int:
    try:
        cfg = parse_config(sys.argv[1:] if argv is None else argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
