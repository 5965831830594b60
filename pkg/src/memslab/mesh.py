"""Discrete domains and the Dirichlet Laplacian on them.

Two mesh kinds are supported: radial meshes on the N-ball (fields depend on
|x| only) and cell-centered Cartesian grids on a rectangle.  Both carry
quadrature weights whose sum reproduces the domain measure exactly, and a
finite-volume discretization of -Laplace with homogeneous Dirichlet data
eliminated.  The finite-volume form keeps the operator an M-matrix (discrete
maximum principle) in every dimension and makes it symmetric in the
quadrature inner product.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.linalg import cho_solve_banded, cholesky_banded
from scipy.sparse.linalg import splu

from .exceptions import ConfigurationError, ConvergenceError, NumericsError

RADIAL = "radial"
RECT = "rect"

_POISSON_RTOL = 1e-10       # linear-solve residual contract, 2-norm
_EIG_RESIDUAL_RTOL = 1e-8   # sup-norm eigen residual contract relative to mu1
_EIG_MAX_ITER = 10_000


def unit_ball_volume(dimension: int) -> float:
    """Volume of the unit ball in R^dimension."""
    return math.pi ** (dimension / 2.0) / math.gamma(dimension / 2.0 + 1.0)


class DirichletLaplacian:
    """Negative Laplacian with the homogeneous Dirichlet boundary eliminated.

    Internally stored through its symmetric form ``K = W @ A`` where ``W`` is
    the diagonal of quadrature weights: ``K`` is symmetric positive definite
    and tridiagonal (radial) or 5-point (rectangle).  The action of the
    operator itself is ``A u = (K u) / w`` and a Poisson solve amounts to
    ``K u = w * rhs``.  Factorizations are cached and reused; they are
    dropped when pickling, so meshes can travel to worker processes.
    """

    def __init__(self, sym: sp.spmatrix, weights: np.ndarray):
        self._sym = sym.tocsr()
        self._weights = weights
        self._banded = None       # upper banded Cholesky factor, radial case
        self._lu = None           # SuperLU factorization, 2D case
        self._tridiagonal = self._is_tridiagonal(sym)

    @staticmethod
    def _is_tridiagonal(m: sp.spmatrix) -> bool:
        coo = m.tocoo()
        return bool(np.all(np.abs(coo.row - coo.col) <= 1))

    @property
    def size(self) -> int:
        return self._sym.shape[0]

    @property
    def symmetric_form(self) -> sp.csr_matrix:
        """K = W A, the quadratic form of the Dirichlet energy."""
        return self._sym

    @property
    def matrix(self) -> sp.csr_matrix:
        """The operator A itself, acting on interior node values."""
        return sp.diags(1.0 / self._weights) @ self._sym

    def apply(self, u: np.ndarray) -> np.ndarray:
        return (self._sym @ u) / self._weights

    def dirichlet_energy(self, phi: np.ndarray) -> float:
        """Discrete integral of |grad phi|^2 via summation by parts."""
        return float(phi @ (self._sym @ phi))

    def _factorize(self):
        if self._tridiagonal:
            if self._banded is None:
                n = self.size
                ab = np.zeros((2, n))
                ab[1] = self._sym.diagonal()
                ab[0, 1:] = self._sym.diagonal(1)
                self._banded = cholesky_banded(ab, lower=False)
        elif self._lu is None:
            self._lu = splu(self._sym.tocsc())

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        """Solve A u = rhs (equivalently K u = w * rhs)."""
        self._factorize()
        b = self._weights * rhs
        if self._tridiagonal:
            return cho_solve_banded((self._banded, False), b)
        return self._lu.solve(b)

    def __getstate__(self):
        state = self.__dict__.copy()
        state["_banded"] = None
        state["_lu"] = None
        return state


@dataclass
class Mesh:
    """Discretized domain with quadrature and the Dirichlet Laplacian.

    Fields are 1D arrays over interior nodes.  For radial meshes node i sits
    at radius ``radii[i]``; for rectangles node (ix, iy) is flattened to
    index ``ix * ny + iy`` at the cell center ``(xs[ix], ys[iy])``.
    """

    kind: str
    weights: np.ndarray
    volume: float
    operator: DirichletLaplacian
    # radial fields
    dimension: int | None = None
    radius: float | None = None
    radii: np.ndarray | None = None
    spacing: float | None = None
    # rectangle fields
    lx: float | None = None
    ly: float | None = None
    nx: int | None = None
    ny: int | None = None
    hx: float | None = None
    hy: float | None = None
    xs: np.ndarray | None = field(default=None, repr=False)
    ys: np.ndarray | None = field(default=None, repr=False)

    @property
    def n_nodes(self) -> int:
        return self.weights.size

    def node_coordinates(self) -> np.ndarray:
        """(n,) radii for radial meshes, (n, 2) cell centers for rectangles."""
        if self.kind == RADIAL:
            return self.radii
        gx, gy = np.meshgrid(self.xs, self.ys, indexing="ij")
        return np.column_stack([gx.ravel(), gy.ravel()])

    def fingerprint(self) -> str:
        import hashlib

        if self.kind == RADIAL:
            tag = f"radial:N={self.dimension}:R={self.radius!r}:n={self.n_nodes}"
        else:
            tag = f"rect:{self.lx!r}x{self.ly!r}:{self.nx}x{self.ny}"
        return hashlib.sha256(tag.encode()).hexdigest()[:16]


def build_radial(dimension: int, radius: float, nodes: int) -> Mesh:
    """Uniform radial mesh on the ball of the given radius.

    Node i sits at ``r_i = i * h`` with ``h = 2R / (2n - 1)``, so the origin
    is a node and the last quadrature cell ends exactly on the boundary.
    The operator rows are finite-volume fluxes; at the origin the row
    reduces to the regularity limit ``-N u''(0)`` and at the last node the
    boundary flux spans the half cell.

    Parameters
    ----------
    dimension : int
        Space dimension N >= 1 of the ball.
    radius : float
        Ball radius R > 0.
    nodes : int
        Number of interior nodes, >= 16.
    """
    problems = []
    if not (isinstance(dimension, (int, np.integer)) and dimension >= 1):
        problems.append(f"dimension must be an integer >= 1, got {dimension!r}")
    if not (isinstance(radius, (int, float)) and radius > 0):
        problems.append(f"radius must be positive, got {radius!r}")
    if not (isinstance(nodes, (int, np.integer)) and nodes >= 16):
        problems.append(f"nodes must be an integer >= 16, got {nodes!r}")
    if problems:
        raise ConfigurationError("; ".join(problems))

    n = int(nodes)
    N = int(dimension)
    R = float(radius)
    h = 2.0 * R / (2 * n - 1)
    r = h * np.arange(n)

    omega = unit_ball_volume(N)
    # cell edges: 0, h/2, 3h/2, ..., R  (last cell is the boundary half cell)
    edges = np.empty(n + 1)
    edges[0] = 0.0
    edges[1:] = (np.arange(1, n + 1) - 0.5) * h
    edges[n] = R
    w = omega * (edges[1:] ** N - edges[:-1] ** N)

    area = N * omega  # sphere area at rho is area * rho^(N-1)
    s_int = area * edges[1:n] ** (N - 1)   # interfaces between nodes i, i+1
    s_bdy = area * R ** (N - 1)

    diag = np.zeros(n)
    diag[: n - 1] += s_int / h
    diag[1:] += s_int / h
    diag[n - 1] += s_bdy / (h / 2.0)
    off = -s_int / h
    sym = sp.diags([off, diag, off], offsets=[-1, 0, 1], format="csr")

    op = DirichletLaplacian(sym, w)
    mesh = Mesh(
        kind=RADIAL,
        weights=w,
        volume=omega * R ** N,
        operator=op,
        dimension=N,
        radius=R,
        radii=r,
        spacing=h,
    )
    w.flags.writeable = False
    r.flags.writeable = False
    return mesh


def build_rect(lx: float, ly: float, nx: int, ny: int) -> Mesh:
    """Cell-centered grid on the rectangle (0, lx) x (0, ly).

    5-point Laplacian; Dirichlet walls enter through half-cell fluxes, which
    keeps the assembled matrix exactly symmetric with the uniform cell-area
    quadrature.
    """
    problems = []
    if not (isinstance(lx, (int, float)) and lx > 0):
        problems.append(f"lx must be positive, got {lx!r}")
    if not (isinstance(ly, (int, float)) and ly > 0):
        problems.append(f"ly must be positive, got {ly!r}")
    if not (isinstance(nx, (int, np.integer)) and nx >= 16):
        problems.append(f"nx must be an integer >= 16, got {nx!r}")
    if not (isinstance(ny, (int, np.integer)) and ny >= 16):
        problems.append(f"ny must be an integer >= 16, got {ny!r}")
    if problems:
        raise ConfigurationError("; ".join(problems))

    nx, ny = int(nx), int(ny)
    lx, ly = float(lx), float(ly)
    hx, hy = lx / nx, ly / ny
    xs = (np.arange(nx) + 0.5) * hx
    ys = (np.arange(ny) + 0.5) * hy

    def line(n: int, h: float) -> sp.csr_matrix:
        d = np.full(n, 2.0)
        d[0] = d[-1] = 3.0  # half-cell Dirichlet closure
        return sp.diags([-np.ones(n - 1), d, -np.ones(n - 1)], [-1, 0, 1]) / h**2

    a = sp.kronsum(line(ny, hy), line(nx, hx), format="csr")  # index ix*ny + iy
    w = np.full(nx * ny, hx * hy)
    sym = (a * (hx * hy)).tocsr()

    op = DirichletLaplacian(sym, w)
    mesh = Mesh(
        kind=RECT,
        weights=w,
        volume=lx * ly,
        operator=op,
        lx=lx,
        ly=ly,
        nx=nx,
        ny=ny,
        hx=hx,
        hy=hy,
        xs=xs,
        ys=ys,
    )
    for arr in (w, xs, ys):
        arr.flags.writeable = False
    return mesh


def integrate(mesh: Mesh, values: np.ndarray) -> float:
    """Quadrature sum over interior nodes."""
    return float(np.dot(mesh.weights, values))


def solve_poisson(op: DirichletLaplacian, rhs: np.ndarray) -> np.ndarray:
    """Solve -Laplace u = rhs with zero boundary values.

    Raises NumericsError if the algebraic residual exceeds the contract
    ``1e-10 * (1 + ||rhs||_2)``, which would indicate an assembly bug.
    """
    rhs = np.asarray(rhs, dtype=float)
    if not np.all(np.isfinite(rhs)):
        raise NumericsError("right-hand side contains non-finite entries")
    u = op.solve(rhs)
    res = np.linalg.norm(op.apply(u) - rhs)
    if not res <= _POISSON_RTOL * (1.0 + np.linalg.norm(rhs)):
        raise NumericsError(f"Poisson solve residual {res:.3e} out of contract")
    return u


@dataclass(frozen=True)
class EigenPair:
    """Principal Dirichlet eigenvalue and positive eigenfunction (sup = 1)."""

    value: float
    vector: np.ndarray
    iterations: int


def principal_eigenpair(op: DirichletLaplacian, mesh: Mesh) -> EigenPair:
    """Smallest eigenvalue of -Laplace via inverse power iteration.

    The iteration is deterministic (all-ones start).  The returned
    eigenfunction is strictly positive in the interior and normalized to
    sup = 1; the sup-norm residual satisfies
    ``||A psi - mu1 psi||_inf <= 1e-8 * mu1``.
    """
    w = mesh.weights
    x = np.ones(op.size)
    mu = 0.0
    for it in range(1, _EIG_MAX_ITER + 1):
        y = op.solve(x)
        y /= y.max()
        mu_new = float((y @ (op.symmetric_form @ y)) / (w @ (y * y)))
        x = y
        if abs(mu_new - mu) <= 1e-12 * abs(mu_new):
            res = np.max(np.abs(op.apply(x) - mu_new * x))
            if res <= _EIG_RESIDUAL_RTOL * mu_new:
                mu = mu_new
                break
        mu = mu_new
    else:
        raise ConvergenceError("principal eigenpair iteration stagnated")
    if not np.all(x > 0):
        raise NumericsError("principal eigenfunction not positive in the interior")
    x = x / x.max()
    x.flags.writeable = False
    return EigenPair(value=mu, vector=x, iterations=it)
