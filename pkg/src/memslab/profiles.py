"""Permittivity profiles and their decreasing rearrangement.

A profile is a sampled nonnegative field bounded by 1 that is positive on a
node set of positive measure.  The rearrangement maps a profile on any mesh
onto the radial mesh of the equal-measure ball, sorting quadrature cells by
value and averaging the resulting step function over radial shells, so the
output is radially non-increasing and equimeasurable with the input.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .exceptions import ConfigurationError, HypothesisError
from .mesh import RADIAL, Mesh, unit_ball_volume

CONSTANT = "constant"
POWER = "power"
TABULATED = "tabulated"


@dataclass(frozen=True)
class Profile:
    """Sampled permittivity on a mesh.

    ``kind`` is one of "constant", "power", "tabulated"; ``param`` carries the
    constant value or the power exponent.  ``scale`` records a normalization
    factor that was divided out to keep values <= 1 (power profiles on balls
    of radius > 1).
    """

    values: np.ndarray
    kind: str
    param: float | None = None
    scale: float = 1.0

    def sup(self) -> float:
        """Supremum over the continuum domain (exact for known descriptors)."""
        if self.kind == CONSTANT:
            return float(self.param)
        if self.kind == POWER:
            return 1.0  # (r/R)^alpha peaks at the boundary
        return float(self.values.max())

    def inf(self) -> float:
        if self.kind == CONSTANT:
            return float(self.param)
        if self.kind == POWER:
            return 1.0 if self.param == 0 else 0.0
        return float(self.values.min())

    def fingerprint(self) -> str:
        import hashlib

        h = hashlib.sha256()
        h.update(f"{self.kind}:{self.param!r}:{self.scale!r}".encode())
        h.update(np.ascontiguousarray(self.values).tobytes())
        return h.hexdigest()[:16]


def _validate(values: np.ndarray, weights: np.ndarray) -> None:
    if np.any(values < 0) or np.any(values > 1):
        raise HypothesisError("profile values must lie in [0, 1]")
    if float(weights[values > 0].sum()) <= 0:
        raise HypothesisError("profile must be positive on a set of positive measure")


def constant_profile(mesh: Mesh, c: float) -> Profile:
    """Profile identically equal to c, 0 < c <= 1."""
    if not (0.0 < c <= 1.0):
        raise HypothesisError(f"constant profile value must be in (0, 1], got {c!r}")
    values = np.full(mesh.n_nodes, float(c))
    values.flags.writeable = False
    return Profile(values=values, kind=CONSTANT, param=float(c))


def power_profile(mesh: Mesh, alpha: float) -> Profile:
    """Radial power profile (r/R)^alpha, alpha >= 0.

    On balls of radius R > 1 the raw power r^alpha exceeds 1, so the profile
    is normalized by R^alpha and the factor recorded in ``scale``.
    """
    if mesh.kind != RADIAL:
        raise ConfigurationError("power profiles require a radial mesh")
    if alpha < 0:
        raise HypothesisError(f"power exponent must be >= 0, got {alpha!r}")
    scale = mesh.radius**alpha if mesh.radius > 1 else 1.0
    values = (mesh.radii / (mesh.radius if mesh.radius > 1 else 1.0)) ** alpha
    if alpha == 0:
        values = np.ones(mesh.n_nodes)
    values.flags.writeable = False
    return Profile(values=values, kind=POWER, param=float(alpha), scale=float(scale))


def tabulated_profile(mesh: Mesh, values: np.ndarray) -> Profile:
    """Profile from raw node values (validated against the hypotheses)."""
    values = np.asarray(values, dtype=float)
    if values.shape != (mesh.n_nodes,):
        raise ConfigurationError(
            f"expected {mesh.n_nodes} values, got shape {values.shape}"
        )
    _validate(values, mesh.weights)
    values = values.copy()
    values.flags.writeable = False
    return Profile(values=values, kind=TABULATED)


def load_tabulated(mesh: Mesh, path) -> Profile:
    """Load a tabulated profile from CSV with columns (node index, value)."""
    raw = {}
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].startswith("#") or row[0].strip().lower() == "index":
                continue
            raw[int(row[0])] = float(row[1])
    if sorted(raw) != list(range(mesh.n_nodes)):
        raise ConfigurationError(
            f"profile file {path} must cover node indices 0..{mesh.n_nodes - 1}"
        )
    return tabulated_profile(mesh, np.array([raw[i] for i in range(mesh.n_nodes)]))


def symmetrize(profile: Profile, source: Mesh, target: Mesh) -> Profile:
    """Decreasing rearrangement onto the radial mesh of the equal-measure ball.

    Sorts the source quadrature cells by value (descending, ties broken by
    node index), accumulates their measure, and averages the resulting step
    function of measure over the target's radial shells.  The output is
    exactly non-increasing in radius, preserves the integral to rounding,
    and is equimeasurable with the input up to cell granularity.
    """
    if target.kind != RADIAL:
        raise ConfigurationError("rearrangement target must be a radial mesh")
    ball = unit_ball_volume(target.dimension)
    r_equal = (source.volume / ball) ** (1.0 / target.dimension)
    if abs(target.radius - r_equal) > 1e-8 * r_equal:
        raise ConfigurationError(
            f"target radius {target.radius} does not match the equal-measure "
            f"radius {r_equal}"
        )

    vals = profile.values
    order = np.lexsort((np.arange(vals.size), -vals))
    sv = vals[order]
    sw = source.weights[order]
    cum = np.concatenate([[0.0], np.cumsum(sw)])
    cum_integral = np.concatenate([[0.0], np.cumsum(sv * sw)])

    # measure of the centered ball through each target cell edge
    n = target.n_nodes
    h = target.spacing
    edges = np.empty(n + 1)
    edges[0] = 0.0
    edges[1:] = (np.arange(1, n + 1) - 0.5) * h
    edges[n] = target.radius
    m_edges = np.minimum(ball * edges**target.dimension, cum[-1])

    shell_integral = np.diff(np.interp(m_edges, cum, cum_integral))
    out = shell_integral / target.weights
    out = np.clip(out, 0.0, 1.0)
    out.flags.writeable = False
    return Profile(values=out, kind=TABULATED)
