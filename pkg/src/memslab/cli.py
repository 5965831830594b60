"""Batch front-end: JSON config in, CSV/JSON artifacts out.

Commands: solve, curve, eigen, bounds, symmetrize, extremal, check.
Exit codes are part of the contract:

    0  success (solve: converged; check: all criteria pass)
    1  check: at least one criterion failed
    2  solve: nonexistence suspected
    3  solve: inconclusive within budget
    4  invalid configuration (diagnostics as JSON on stderr)
    5  curve: at least one ray failed (partial CSV plus failure manifest)

Identical configs produce byte-identical CSV outputs; every artifact embeds
the config fingerprint.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

from . import acceptance
from .curve import (
    CurveConfig,
    bound_report,
    extremal_on_ray,
    write_bounds_json,
    write_trace_csv,
)
from .diagnostics import approach_extremal, write_approach_csv
from .exceptions import ConfigurationError, HypothesisError, PreconditionError
from .mesh import Mesh, build_radial, build_rect, unit_ball_volume
from .profiles import (
    Profile,
    constant_profile,
    load_tabulated,
    power_profile,
    symmetrize,
)
from .solver import SolveConfig, Verdict, minimal_solve, write_solution_csv
from .stability import classify, linearized_eigen, write_eigen_csv

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_NONEXISTENCE = 2
EXIT_INCONCLUSIVE = 3
EXIT_BAD_CONFIG = 4
EXIT_RAY_FAILED = 5


class _ConfigProblems(Exception):
    def __init__(self, problems):
        super().__init__("; ".join(p["message"] for p in problems))
        self.problems = problems


def _fingerprint(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _scaled(count: int, scale: float) -> int:
    return max(16, int(round(count * scale)))


def _build_mesh(spec: dict, scale: float, problems: list, field: str) -> Mesh | None:
    try:
        kind = spec.get("kind")
        if kind == "radial":
            return build_radial(
                int(spec["dimension"]),
                float(spec["radius"]),
                _scaled(int(spec["nodes"]), scale),
            )
        if kind == "rect":
            return build_rect(
                float(spec["lx"]),
                float(spec["ly"]),
                _scaled(int(spec["nx"]), scale),
                _scaled(int(spec["ny"]), scale),
            )
        problems.append(
            {"field": field, "message": f"unknown domain kind {kind!r}"}
        )
    except (KeyError, TypeError, ValueError, ConfigurationError) as exc:
        problems.append({"field": field, "message": str(exc)})
    return None


def _build_profile(
    spec: dict, mesh: Mesh, problems: list, field: str
) -> Profile | None:
    try:
        kind = spec.get("kind", "constant")
        if kind == "constant":
            return constant_profile(mesh, float(spec.get("value", 1.0)))
        if kind == "power":
            return power_profile(mesh, float(spec["alpha"]))
        if kind == "tabulated":
            return load_tabulated(mesh, spec["path"])
        problems.append({"field": field, "message": f"unknown profile kind {kind!r}"})
    except (KeyError, TypeError, ValueError, OSError,
            ConfigurationError, HypothesisError) as exc:
        problems.append({"field": field, "message": str(exc)})
    return None


def _solve_config(config: dict, problems: list) -> SolveConfig:
    spec = config.get("solver", {})
    try:
        return SolveConfig(
            tol_sup=float(spec.get("tol_sup", 1e-10)),
            max_iter=int(spec.get("max_iter", 10_000)),
            touch_threshold=float(spec.get("touch_threshold", 1e-6)),
        )
    except (TypeError, ValueError, PreconditionError) as exc:
        problems.append({"field": "solver", "message": str(exc)})
        return SolveConfig()


def _curve_config(config: dict, threads: int, problems: list) -> CurveConfig:
    spec = config.get("curve", {})
    try:
        return CurveConfig(
            rtol=float(spec.get("rtol", 1e-3)),
            solve=_solve_config(config, problems),
            threads=threads,
        )
    except (TypeError, ValueError) as exc:
        problems.append({"field": "curve", "message": str(exc)})
        return CurveConfig()


def _require(config: dict, keys: list, problems: list) -> None:
    for key in keys:
        if key not in config:
            problems.append({"field": key, "message": f"missing required field {key!r}"})


def _load_inputs(config: dict, args, need_params=(), profiles=True):
    problems = []
    _require(config, ["domain", *need_params], problems)
    mesh = None
    if "domain" in config:
        mesh = _build_mesh(config["domain"], args.resolution_scale, problems, "domain")
    f = g = None
    if profiles and mesh is not None:
        f = _build_profile(config.get("f", {}), mesh, problems, "f")
        g = _build_profile(config.get("g", {}), mesh, problems, "g")
    if problems:
        raise _ConfigProblems(problems)
    return mesh, f, g


def cmd_solve(config: dict, args, out: Path, fp: str) -> int:
    mesh, f, g = _load_inputs(config, args, need_params=["lambda", "mu"])
    problems = []
    cfg = _solve_config(config, problems)
    if problems:
        raise _ConfigProblems(problems)
    lam, mu = float(config["lambda"]), float(config["mu"])
    if lam < 0 or mu < 0:
        raise _ConfigProblems(
            [{"field": "lambda/mu", "message": "parameters must be nonnegative"}]
        )
    outcome = minimal_solve(mesh, f, g, lam, mu, cfg)
    summary = {
        "config_fingerprint": fp,
        "verdict": outcome.verdict.value,
        "reason": outcome.reason.value if outcome.reason else None,
        "iterations": outcome.iterations,
        "last_increment": outcome.last_increment,
    }
    if outcome.converged:
        su, sv = outcome.state.sup()
        summary.update(
            {"sup_u": su, "sup_v": sv, "residuals": list(outcome.final_residual)}
        )
        write_solution_csv(out / "solution.csv", mesh, outcome.state, fp)
    (out / "solve_summary.json").write_text(
        json.dumps(summary, indent=2, sort_keys=True) + "\n"
    )
    if outcome.verdict is Verdict.CONVERGED:
        return EXIT_OK
    if outcome.verdict is Verdict.NONEXISTENCE_SUSPECTED:
        return EXIT_NONEXISTENCE
    return EXIT_INCONCLUSIVE


def cmd_curve(config: dict, args, out: Path, fp: str) -> int:
    mesh, f, g = _load_inputs(config, args, need_params=["theta_grid"])
    problems = []
    cfg = _curve_config(config, args.threads, problems)
    grid = config["theta_grid"]
    if not isinstance(grid, list) or not grid:
        problems.append({"field": "theta_grid", "message": "must be a non-empty list"})
    elif any(not isinstance(t, (int, float)) or t <= 0 for t in grid):
        problems.append({"field": "theta_grid", "message": "entries must be positive"})
    elif any(b <= a for a, b in zip(grid, grid[1:])):
        problems.append({"field": "theta_grid", "message": "must be strictly increasing"})
    if problems:
        raise _ConfigProblems(problems)

    write_bounds_json(out / "bounds.json", bound_report(mesh, f, g), fp)
    samples, failures = [], []
    for theta in grid:
        try:
            samples.append(extremal_on_ray(mesh, f, g, float(theta), cfg))
        except Exception as exc:  # per-ray failure: keep going, keep partial data
            failures.append({"theta": theta, "error": str(exc)})
    from .curve import CurveTrace

    trace = CurveTrace(
        samples=tuple(samples),
        mesh_fingerprint=mesh.fingerprint(),
        profile_fingerprints=(f.fingerprint(), g.fingerprint()),
    )
    write_trace_csv(out / "curve.csv", trace, fp)
    if failures:
        (out / "curve_failures.json").write_text(
            json.dumps({"config_fingerprint": fp, "failures": failures},
                       indent=2, sort_keys=True) + "\n"
        )
        return EXIT_RAY_FAILED
    return EXIT_OK


def cmd_eigen(config: dict, args, out: Path, fp: str) -> int:
    mesh, f, g = _load_inputs(config, args, need_params=["lambda", "mu"])
    problems = []
    cfg = _solve_config(config, problems)
    if problems:
        raise _ConfigProblems(problems)
    lam, mu = float(config["lambda"]), float(config["mu"])
    outcome = minimal_solve(mesh, f, g, lam, mu, cfg)
    if not outcome.converged:
        (out / "eigen_summary.json").write_text(
            json.dumps({"config_fingerprint": fp,
                        "verdict": outcome.verdict.value}, indent=2) + "\n"
        )
        return (EXIT_NONEXISTENCE
                if outcome.verdict is Verdict.NONEXISTENCE_SUSPECTED
                else EXIT_INCONCLUSIVE)
    result = linearized_eigen(mesh, f, g, lam, mu, outcome.state)
    write_eigen_csv(out / "eigenfunctions.csv", mesh, result, fp)
    (out / "eigen_summary.json").write_text(
        json.dumps({"config_fingerprint": fp, "nu1": result.nu1,
                    "classification": classify(result),
                    "iterations": result.iterations}, indent=2, sort_keys=True) + "\n"
    )
    return EXIT_OK


def cmd_bounds(config: dict, args, out: Path, fp: str) -> int:
    mesh, f, g = _load_inputs(config, args)
    write_bounds_json(out / "bounds.json", bound_report(mesh, f, g), fp)
    return EXIT_OK


def cmd_symmetrize(config: dict, args, out: Path, fp: str) -> int:
    mesh, f, g = _load_inputs(config, args)
    nodes = _scaled(int(config.get("target_nodes", 256)), args.resolution_scale)
    radius = (mesh.volume / unit_ball_volume(2)) ** 0.5
    disk = build_radial(2, radius, nodes)
    for name, prof in (("f", f), ("g", g)):
        star = symmetrize(prof, mesh, disk)
        with open(out / f"{name}_symmetrized.csv", "w", newline="") as fh:
            fh.write(f"# config_fingerprint: {fp}\n")
            fh.write("index,value\n")
            for i, val in enumerate(star.values):
                fh.write(f"{i},{val!r}\n")
    return EXIT_OK


def cmd_extremal(config: dict, args, out: Path, fp: str) -> int:
    mesh, f, g = _load_inputs(config, args, need_params=["theta", "fractions"])
    problems = []
    cfg = _curve_config(config, args.threads, problems)
    if problems:
        raise _ConfigProblems(problems)
    record = approach_extremal(
        mesh, f, g, float(config["theta"]), config["fractions"],
        float(config.get("moser_alpha", 2.0)), cfg,
    )
    write_approach_csv(out / "approach.csv", record, fp)
    (out / "extremal_summary.json").write_text(
        json.dumps({"config_fingerprint": fp, "lambda_star": record.lam_star,
                    "theta": record.theta, "samples": len(record.samples)},
                   indent=2, sort_keys=True) + "\n"
    )
    return EXIT_OK


def cmd_check(config: dict, args, out: Path, fp: str) -> int:
    names = config.get("criteria")
    registry = acceptance.registry()
    if names is None:
        names = list(registry)
    unknown = [n for n in names if n not in registry]
    if unknown:
        raise _ConfigProblems(
            [{"field": "criteria", "message": f"unknown criterion {n!r}"}
             for n in unknown]
        )
    results = []
    all_pass = True
    for name in names:
        result = registry[name](args.resolution_scale)
        results.append(result)
        all_pass &= result.passed
        print(result.line())
    (out / "check_report.json").write_text(
        json.dumps({"config_fingerprint": fp,
                    "results": [r.to_dict() for r in results]},
                   indent=2, sort_keys=True) + "\n"
    )
    return EXIT_OK if all_pass else EXIT_CHECK_FAILED


_COMMANDS = {
    "solve": cmd_solve,
    "curve": cmd_curve,
    "eigen": cmd_eigen,
    "bounds": cmd_bounds,
    "symmetrize": cmd_symmetrize,
    "extremal": cmd_extremal,
    "check": cmd_check,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="memslab",
        description="Coupled MEMS pull-in laboratory: solves, curves, bounds, checks.",
    )
    parser.add_argument("command", choices=sorted(_COMMANDS))
    parser.add_argument("--config", required=True, help="path to a JSON run config")
    parser.add_argument("--out", default="out", help="output directory")
    parser.add_argument("--threads", type=int, default=1,
                        help="worker processes for ray sweeps")
    parser.add_argument("--resolution-scale", type=float, default=1.0,
                        help="multiply configured node counts by this factor")
    args = parser.parse_args(argv)

    try:
        config = json.loads(Path(args.config).read_text())
        if not isinstance(config, dict):
            raise ValueError("config root must be a JSON object")
    except (OSError, ValueError) as exc:
        json.dump({"error": "invalid-config",
                   "violations": [{"field": "--config", "message": str(exc)}]},
                  sys.stderr)
        sys.stderr.write("\n")
        return EXIT_BAD_CONFIG

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    fp = _fingerprint(config)
    try:
        return _COMMANDS[args.command](config, args, out, fp)
    except _ConfigProblems as exc:
        json.dump({"error": "invalid-config", "violations": exc.problems}, sys.stderr)
        sys.stderr.write("\n")
        return EXIT_BAD_CONFIG


if __name__ == "__main__":
    sys.exit(main())
