"""Observables along the approach to the critical curve.

Tracks the minimal branch at fractions of the critical parameter, recording
suprema, the principal eigenvalue of the linearization, and the two weighted
integrals that govern the regularity analysis.  Also validates the explicit
cusp identity: u = 1 - r^(2/3) satisfies -Lap u = ((6N-8)/9) r^(-4/3)
pointwise, which the discrete operator must reproduce at second order away
from the origin.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .curve import CurveConfig, extremal_on_ray
from .exceptions import ConvergenceError, PreconditionError
from .mesh import Mesh, build_radial, integrate
from .profiles import Profile
from .solver import SolveConfig, StatePair, Verdict, minimal_solve
from .stability import linearized_eigen


@dataclass(frozen=True)
class ApproachSample:
    t: float
    lam: float
    mu: float
    sup_u: float
    sup_v: float
    nu1: float
    x_integral: float
    y_integral: float
    iterations: int


@dataclass(frozen=True)
class ApproachRecord:
    theta: float
    lam_star: float
    alpha: float
    samples: tuple[ApproachSample, ...]


def moser_integrals(mesh: Mesh, state: StatePair, alpha: float) -> tuple[float, float]:
    """The two weighted integrals of the regularity argument, alpha > 1:

        X = int (1-u)^((-2 alpha - 1)/2) (1-v)^(-3/2)
        Y = int (1-u)^(-alpha - 1)       (1-v)^((-alpha - 3)/2)

    States too close to 1 overflow to +inf, reported as a sentinel.
    """
    if not alpha > 1:
        raise PreconditionError("alpha must exceed 1")
    du = 1.0 - state.u
    dv = 1.0 - state.v
    with np.errstate(over="ignore"):
        x_val = integrate(mesh, du ** ((-2.0 * alpha - 1.0) / 2.0) * dv**-1.5)
        y_val = integrate(mesh, du ** (-alpha - 1.0) * dv ** ((-alpha - 3.0) / 2.0))
    return float(x_val), float(y_val)


def approach_extremal(
    mesh: Mesh,
    f: Profile,
    g: Profile,
    theta: float,
    fractions,
    alpha: float,
    cfg: CurveConfig = CurveConfig(),
) -> ApproachRecord:
    """Sweep the minimal branch at the given fractions of the critical point.

    Fractions must be strictly increasing in (0, 1).  A solve that fails to
    converge below t = 0.99 means the critical parameter was overestimated
    and raises; at t >= 0.99 the sample is skipped instead.
    """
    fr = [float(t) for t in fractions]
    if any(not 0.0 < t < 1.0 for t in fr):
        raise PreconditionError("fractions must lie strictly inside (0, 1)")
    if any(b <= a for a, b in zip(fr, fr[1:])):
        raise PreconditionError("fractions must be strictly increasing")

    ray = extremal_on_ray(mesh, f, g, theta, cfg)
    # stay pessimistic: sweep below the certified-feasible end of the bracket
    lam_star = ray.lam_star * (1.0 - 0.5 * ray.bracket_width)

    big_budget = SolveConfig(
        tol_sup=cfg.solve.tol_sup,
        max_iter=cfg.solve.max_iter * 4 ** cfg.budget_escalations,
        touch_threshold=cfg.solve.touch_threshold,
    )
    samples = []
    for t in fr:
        lam = t * lam_star
        mu = theta * lam
        out = minimal_solve(mesh, f, g, lam, mu, big_budget)
        if out.verdict is not Verdict.CONVERGED:
            if t < 0.99:
                raise ConvergenceError(
                    f"minimal solve failed at fraction {t} ({out.verdict.value}); "
                    "critical parameter likely overestimated"
                )
            continue
        eig = linearized_eigen(mesh, f, g, lam, mu, out.state)
        x_val, y_val = moser_integrals(mesh, out.state, alpha)
        su, sv = out.state.sup()
        samples.append(
            ApproachSample(
                t=t, lam=lam, mu=mu, sup_u=su, sup_v=sv, nu1=eig.nu1,
                x_integral=x_val, y_integral=y_val, iterations=out.iterations,
            )
        )
    return ApproachRecord(
        theta=theta, lam_star=lam_star, alpha=alpha, samples=tuple(samples)
    )


def singular_residual(dimension: int, nodes: int) -> float:
    """Sup defect of the cusp identity on the annulus 0.1 <= r <= 0.9.

    Applies the discrete operator to 1 - r^(2/3) on the unit ball and
    compares with ((6N-8)/9) r^(-4/3) node-wise; decays at second order
    under refinement.
    """
    if dimension < 2:
        raise PreconditionError("the cusp identity needs dimension >= 2")
    mesh = build_radial(dimension, 1.0, nodes)
    r = mesh.radii
    u = 1.0 - r ** (2.0 / 3.0)
    lhs = mesh.operator.apply(u)
    window = (r >= 0.1) & (r <= 0.9)
    rhs = ((6.0 * dimension - 8.0) / 9.0) * r[window] ** (-4.0 / 3.0)
    return float(np.max(np.abs(lhs[window] - rhs)))


def write_approach_csv(path, record: ApproachRecord, fingerprint: str = "") -> None:
    """Columns: t, lambda, sup_u, sup_v, nu1, X, Y, iters."""
    with open(path, "w", newline="") as fh:
        if fingerprint:
            fh.write(f"# config_fingerprint: {fingerprint}\n")
        writer = csv.writer(fh)
        writer.writerow(["t", "lambda", "sup_u", "sup_v", "nu1", "X", "Y", "iters"])
        for s in record.samples:
            writer.writerow(
                [repr(s.t), repr(s.lam), repr(s.sup_u), repr(s.sup_v),
                 repr(s.nu1), repr(s.x_integral), repr(s.y_integral), s.iterations]
            )
