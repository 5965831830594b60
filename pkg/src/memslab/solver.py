"""Minimal solutions of the coupled singular source problem.

The system couples two deflection fields through singular sources:

    -Lap u = lam * f / (1 - v)^2,   -Lap v = mu * g / (1 - u)^2,

with zero boundary values and both fields confined below 1.  The minimal
solution is the increasing limit of Picard iterates started from (0, 0);
a decreasing variant started from a discrete super-solution pair gives an
upper companion.  Escaping iterates (an iterate entering the touch band
just below 1) are reported as suspected nonexistence, never as a crash.

Both fields are updated from the previous iterate (Jacobi style), so with
identical data the two components stay bit-for-bit equal, and the update
map is order-preserving even in floating point: the right-hand sides are
monotone node-wise and the cached triangular factors of the M-matrix have
sign-fixed entries.
"""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass

import numpy as np

from .exceptions import NumericsError, PreconditionError
from .mesh import RADIAL, Mesh
from .profiles import Profile

DELTA_FLOOR = 1e-10           # floor for (1 - u) in denominators
_RESIDUAL_RTOL = 1e-6         # converged residual <= rtol * (lam + mu)
_SUPERSOLUTION_SLACK = 1e-8   # allowed signed defect when checking a super-solution
_DIVERGENCE_WINDOW = 30       # consecutive increment growths before divergence verdict


@dataclass(frozen=True)
class SolveConfig:
    """Iteration budget and thresholds for the monotone solver."""

    tol_sup: float = 1e-10
    max_iter: int = 10_000
    touch_threshold: float = 1e-6

    def __post_init__(self):
        if not self.tol_sup > 0:
            raise PreconditionError("tol_sup must be positive")
        if not self.touch_threshold > self.tol_sup:
            raise PreconditionError("touch_threshold must exceed tol_sup")


@dataclass(frozen=True)
class StatePair:
    """Pair of deflection fields on a shared mesh, zero on the boundary."""

    u: np.ndarray
    v: np.ndarray

    def sup(self) -> tuple[float, float]:
        return float(self.u.max()), float(self.v.max())


class Verdict(enum.Enum):
    CONVERGED = "converged"
    NONEXISTENCE_SUSPECTED = "nonexistence-suspected"
    INCONCLUSIVE = "inconclusive"


class NonexistenceReason(enum.Enum):
    TOUCHED_ONE = "touched-one"
    RESIDUAL_DIVERGENCE = "residual-divergence"


@dataclass(frozen=True)
class SolveOutcome:
    verdict: Verdict
    iterations: int
    state: StatePair | None = None
    final_residual: tuple[float, float] | None = None
    reason: NonexistenceReason | None = None
    last_increment: float | None = None

    @property
    def converged(self) -> bool:
        return self.verdict is Verdict.CONVERGED


def _clamped_denominator(w: np.ndarray) -> np.ndarray:
    return np.maximum(1.0 - w, DELTA_FLOOR)


def _source(coeff: np.ndarray, other: np.ndarray) -> np.ndarray:
    d = _clamped_denominator(other)
    return coeff / (d * d)


def residual(
    mesh: Mesh, f: Profile, g: Profile, lam: float, mu: float, state: StatePair
) -> tuple[float, float]:
    """Sup-norm defects of the two equations at the given state."""
    op = mesh.operator
    ru = op.apply(state.u) - _source(lam * f.values, state.v)
    rv = op.apply(state.v) - _source(mu * g.values, state.u)
    return float(np.max(np.abs(ru))), float(np.max(np.abs(rv)))


def _iterate(
    mesh: Mesh,
    f: Profile,
    g: Profile,
    lam: float,
    mu: float,
    cfg: SolveConfig,
    u0: np.ndarray,
    v0: np.ndarray,
    watch_touch: bool,
    on_step=None,
) -> SolveOutcome:
    op = mesh.operator
    fu = lam * f.values
    gv = mu * g.values
    u, v = u0, v0
    inc_prev = np.inf
    growth_streak = 0
    for it in range(1, cfg.max_iter + 1):
        u_new = op.solve(_source(fu, v))
        v_new = op.solve(_source(gv, u))
        if not (np.all(np.isfinite(u_new)) and np.all(np.isfinite(v_new))):
            raise NumericsError("non-finite iterate; floor clamp failed")
        if on_step is not None:
            on_step(it, u_new, v_new)
        top = max(u_new.max(), v_new.max())
        if watch_touch and 1.0 - top < cfg.touch_threshold:
            return SolveOutcome(
                verdict=Verdict.NONEXISTENCE_SUSPECTED,
                reason=NonexistenceReason.TOUCHED_ONE,
                iterations=it,
                last_increment=float(
                    max(np.max(np.abs(u_new - u)), np.max(np.abs(v_new - v)))
                ),
            )
        inc = float(max(np.max(np.abs(u_new - u)), np.max(np.abs(v_new - v))))
        u, v = u_new, v_new
        if inc <= cfg.tol_sup:
            state = StatePair(u=u, v=v)
            res = residual(mesh, f, g, lam, mu, state)
            if max(res) <= _RESIDUAL_RTOL * (lam + mu):
                return SolveOutcome(
                    verdict=Verdict.CONVERGED,
                    iterations=it,
                    state=state,
                    final_residual=res,
                    last_increment=inc,
                )
            # increment converged but residual not yet in contract: keep going
        if watch_touch:
            growth_streak = growth_streak + 1 if inc > inc_prev else 0
            if growth_streak >= _DIVERGENCE_WINDOW:
                res = residual(mesh, f, g, lam, mu, StatePair(u=u, v=v))
                if max(res) > 1e3 * (1.0 + lam + mu):
                    return SolveOutcome(
                        verdict=Verdict.NONEXISTENCE_SUSPECTED,
                        reason=NonexistenceReason.RESIDUAL_DIVERGENCE,
                        iterations=it,
                        last_increment=inc,
                    )
                growth_streak = 0
        inc_prev = inc
    return SolveOutcome(
        verdict=Verdict.INCONCLUSIVE, iterations=cfg.max_iter, last_increment=inc
    )


def minimal_solve(
    mesh: Mesh,
    f: Profile,
    g: Profile,
    lam: float,
    mu: float,
    cfg: SolveConfig = SolveConfig(),
    on_step=None,
) -> SolveOutcome:
    """Minimal solution by the increasing Picard iteration from (0, 0).

    Each step solves two Poisson problems with the sources frozen at the
    previous iterate.  Convergence requires the sup-norm increment to fall
    below ``cfg.tol_sup`` and the equation residuals to meet the contract
    ``1e-6 * (lam + mu)``.  An iterate whose maximum enters the band
    ``[1 - touch_threshold, inf)`` yields a TOUCHED_ONE nonexistence verdict;
    exhausting the budget with a still-shrinking increment is INCONCLUSIVE.

    ``on_step(it, u, v)`` is invoked with every fresh iterate, mainly for
    trace instrumentation in tests.
    """
    if lam < 0 or mu < 0:
        raise PreconditionError("parameters must be nonnegative")
    if f.values.shape != (mesh.n_nodes,) or g.values.shape != (mesh.n_nodes,):
        raise PreconditionError("profiles must live on the given mesh")
    zero = np.zeros(mesh.n_nodes)
    return _iterate(
        mesh, f, g, lam, mu, cfg, zero, zero, watch_touch=True, on_step=on_step
    )


def supersolution_descend(
    mesh: Mesh,
    f: Profile,
    g: Profile,
    lam: float,
    mu: float,
    big_u: np.ndarray,
    big_v: np.ndarray,
    cfg: SolveConfig = SolveConfig(),
) -> SolveOutcome:
    """Decreasing iteration from a discrete super-solution pair.

    The pair must satisfy the defect inequalities node-wise (up to a 1e-8
    slack) and stay within [0, 1 - 1e-10]; otherwise the first offending
    node is reported.  The limit is a solution sitting above the minimal
    one.
    """
    op = mesh.operator
    for name, arr in (("U", big_u), ("V", big_v)):
        bad = np.where((arr < 0) | (arr > 1.0 - DELTA_FLOOR))[0]
        if bad.size:
            raise PreconditionError(
                f"{name} leaves [0, 1 - 1e-10] first at node {bad[0]}"
            )
    defect_u = op.apply(big_u) - _source(lam * f.values, big_v)
    defect_v = op.apply(big_v) - _source(mu * g.values, big_u)
    for name, defect in (("first", defect_u), ("second", defect_v)):
        bad = np.where(defect < -_SUPERSOLUTION_SLACK)[0]
        if bad.size:
            raise PreconditionError(
                f"not a super-solution: {name} equation defect "
                f"{defect[bad[0]]:.3e} at node {bad[0]}"
            )
    return _iterate(
        mesh, f, g, lam, mu, cfg, big_u.copy(), big_v.copy(), watch_touch=False
    )


def explicit_supersolution(
    mesh: Mesh, kind: str, alpha: float | None = None
) -> np.ndarray:
    """Classical radial super-solution shapes sampled at the nodes.

    kind = "quadratic":        (1 - (r/R)^2) / 3
    kind = "cusp":             1 - (r/R)^(2/3), clamped to 1 - 1e-10 at r = 0
                               (the clamp makes the node-wise super-solution
                               check fail at the origin; the cusp is mainly
                               useful away from it)
    kind = "power_quadratic":  (1 - (r/R)^(2+alpha)) / 3
    """
    if mesh.kind != RADIAL:
        raise PreconditionError("explicit super-solutions are radial")
    s = mesh.radii / mesh.radius
    if kind == "quadratic":
        return (1.0 - s**2) / 3.0
    if kind == "cusp":
        return np.minimum(1.0 - s ** (2.0 / 3.0), 1.0 - DELTA_FLOOR)
    if kind == "power_quadratic":
        if alpha is None or alpha < 0:
            raise PreconditionError("power_quadratic needs alpha >= 0")
        return (1.0 - s ** (2.0 + alpha)) / 3.0
    raise PreconditionError(f"unknown super-solution kind {kind!r}")


def write_solution_csv(path, mesh: Mesh, state: StatePair, fingerprint: str = "") -> None:
    """Solution snapshot: node coordinate(s), u, v."""
    coords = mesh.node_coordinates()
    with open(path, "w", newline="") as fh:
        if fingerprint:
            fh.write(f"# config_fingerprint: {fingerprint}\n")
        writer = csv.writer(fh)
        if mesh.kind == RADIAL:
            writer.writerow(["r", "u", "v"])
            for r, u, v in zip(coords, state.u, state.v):
                writer.writerow([repr(float(r)), repr(float(u)), repr(float(v))])
        else:
            writer.writerow(["x", "y", "u", "v"])
            for (x, y), u, v in zip(coords, state.u, state.v):
                writer.writerow(
                    [repr(float(x)), repr(float(y)), repr(float(u)), repr(float(v))]
                )
