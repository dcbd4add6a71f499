"""Discretized indefinite euclidean (Nelson) space with singular elements.

Grid functions are treated as exact linear combinations of point evaluations
under the kernel ``-|tau - sigma|/2``, so the inner products below are the
restriction of the continuum indefinite product to a finite-dimensional
subspace rather than an approximation: identities that hold there hold here
to roundoff.  Two extra coordinates extend the grid part: the evaluation at
time zero (coefficient ``a``) and the ergodic-velocity element w (coefficient
``b``), with the closed products

    <d0, d0> = <w, w> = 0,   <d0, w> = -1/2,
    <d0, f> = -1/2 int |s| f(s) ds,   <w, f> = -1/2 int f.

Inner products are conjugate-linear in the first argument.  The metric
operator at scale alpha > 0 flips the sign of ``alpha d0 + w/alpha`` and
fixes its orthogonal complement, making the product positive (Krein
structure); projections onto past/future/time-zero spans realize the Markov
identity E+ E- = E0 without positivity of the underlying product.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .gram import GramMatrix, gram_signature, numerical_rank
from .montecarlo import krein_kernel

FAMILY_LIMIT = 200
PROJECTION_CONDITION_LIMIT = 1e8
GRID_POINT_TOL = 1e-9


class GridMismatchError(ValueError):
    """Raised when vectors on different grids are combined."""


class SupportError(ValueError):
    """Raised when a function violates a support precondition."""


class DegenerateGramError(ValueError):
    """Raised when a projection basis has a (numerically) degenerate Gram."""


@dataclass(frozen=True)
class Grid:
    """Uniform time grid ``start + i*step`` for i < n."""

    start: float
    step: float
    n: int

    @classmethod
    def make(cls, start: float, stop: float, step: float) -> "Grid":
        if step <= 0:
            raise ValueError("step must be positive")
        count = int(round((stop - start) / step)) + 1
        if count < 2 or abs(start + (count - 1) * step - stop) > GRID_POINT_TOL:
            raise ValueError(f"stop {stop} is not reachable from {start} by step {step}")
        return cls(start=float(start), step=float(step), n=count)

    @classmethod
    def parse(cls, spec: str) -> "Grid":
        parts = spec.split(":")
        if len(parts) != 3:
            raise ValueError(f"grid spec {spec!r} is not of the form start:stop:step")
        start, stop, step = (float(p) for p in parts)
        return cls.make(start, stop, step)

    @property
    def points(self) -> np.ndarray:
        return _grid_points(self)

    @property
    def stop(self) -> float:
        return self.start + (self.n - 1) * self.step

    def is_symmetric(self) -> bool:
        return abs(self.start + self.stop) <= GRID_POINT_TOL and self.index_of(0.0) is not None

    def index_of(self, tau: float) -> int | None:
        idx = int(round((tau - self.start) / self.step))
        if 0 <= idx < self.n and abs(self.start + idx * self.step - tau) <= GRID_POINT_TOL:
            return idx
        return None


@lru_cache(maxsize=None)
def _grid_points(grid: Grid) -> np.ndarray:
    pts = grid.start + grid.step * np.arange(grid.n)
    pts.setflags(write=False)
    return pts


@lru_cache(maxsize=None)
def metric_matrix(grid: Grid) -> np.ndarray:
    """Coordinate metric over (grid values, a, b); real symmetric."""
    pts = grid.points
    n = grid.n
    h = grid.step
    m = np.zeros((n + 2, n + 2))
    m[:n, :n] = -0.5 * h * h * np.abs(pts[:, None] - pts[None, :])
    m[:n, n] = m[n, :n] = -0.5 * h * np.abs(pts)
    m[:n, n + 1] = m[n + 1, :n] = -0.5 * h
    m[n, n + 1] = m[n + 1, n] = -0.5
    m.setflags(write=False)
    return m


@dataclass
class ExtendedVector:
    """Grid function plus coefficients of the singular elements d0 and w."""

    grid: Grid
    values: np.ndarray
    a: complex = 0.0
    b: complex = 0.0

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        if values.shape != (self.grid.n,):
            raise GridMismatchError(f"expected {self.grid.n} values, got {values.shape}")
        self.values = values

    def coords(self) -> np.ndarray:
        return np.concatenate((self.values, [self.a, self.b]))

    def _check(self, other: "ExtendedVector"):
        if self.grid != other.grid:
            raise GridMismatchError("vectors live on different grids")

    def __add__(self, other):
        self._check(other)
        return ExtendedVector(self.grid, self.values + other.values, self.a + other.a, self.b + other.b)

    def __sub__(self, other):
        self._check(other)
        return ExtendedVector(self.grid, self.values - other.values, self.a - other.a, self.b - other.b)

    def __mul__(self, scalar):
        if not isinstance(scalar, (int, float, complex)):
            return NotImplemented
        return ExtendedVector(self.grid, self.values * scalar, self.a * scalar, self.b * scalar)

    __rmul__ = __mul__

    def __neg__(self):
        return self * (-1)


def zero_vector(grid: Grid) -> ExtendedVector:
    return ExtendedVector(grid, np.zeros(grid.n))


def from_values(grid: Grid, values) -> ExtendedVector:
    return ExtendedVector(grid, np.asarray(values, dtype=complex))


def delta_zero(grid: Grid) -> ExtendedVector:
    return ExtendedVector(grid, np.zeros(grid.n), a=1.0)


def w_vector(grid: Grid) -> ExtendedVector:
    return ExtendedVector(grid, np.zeros(grid.n), b=1.0)


def point_mass(grid: Grid, tau: float) -> ExtendedVector:
    """The evaluation at an on-grid time, represented as a grid spike."""
    idx = grid.index_of(tau)
    if idx is None:
        raise ValueError(f"{tau} is not a grid point")
    values = np.zeros(grid.n)
    values[idx] = 1.0 / grid.step
    return ExtendedVector(grid, values)


def indefinite_inner(u: ExtendedVector, v: ExtendedVector) -> complex:
    """Indefinite product; conjugate-linear in the first argument."""
    u._check(v)
    m = metric_matrix(u.grid)
    return complex(u.coords().conj() @ m @ v.coords())


def decompose(u: ExtendedVector) -> tuple[complex, complex, ExtendedVector]:
    """Split off the d0 and w content: u = a d0 + b w + h with h orthogonal to both.

    The coefficients are the total mass and the |tau|-weighted mass of the
    grid part (plus any explicit coordinates); idempotent by construction.
    """
    h = u.grid.step
    a = complex(u.a + h * u.values.sum())
    b = complex(u.b + h * (np.abs(u.grid.points) * u.values).sum())
    rest = ExtendedVector(u.grid, u.values.copy(), a=u.a - a, b=u.b - b)
    return a, b, rest


def krein_direction(grid: Grid, alpha: float) -> ExtendedVector:
    """The negative-normalized direction alpha d0 + w/alpha (self-product -1)."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    return ExtendedVector(grid, np.zeros(grid.n), a=alpha, b=1.0 / alpha)


def krein_metric_apply(u: ExtendedVector, alpha: float) -> ExtendedVector:
    """Metric operator at scale alpha: involution flipping the Krein direction."""
    direction = krein_direction(u.grid, alpha)
    overlap = indefinite_inner(direction, u)
    return u + (2.0 * overlap) * direction


def krein_inner(u: ExtendedVector, v: ExtendedVector, alpha: float) -> complex:
    """Positive product [u, v]_alpha = <u, eta_alpha v>."""
    return indefinite_inner(u, krein_metric_apply(v, alpha))


def krein_norm(u: ExtendedVector, alpha: float) -> float:
    return math.sqrt(max(krein_inner(u, u, alpha).real, 0.0))


def signature_of(family: list[ExtendedVector]) -> GramMatrix:
    """Gram matrix and eigen-signature of a finite family."""
    if len(family) > FAMILY_LIMIT:
        raise ValueError(f"family size limited to {FAMILY_LIMIT}")
    if not family:
        return GramMatrix(entries=np.zeros((0, 0), dtype=complex), signature=(0, 0, 0))
    for v in family:
        family[0]._check(v)
    m = metric_matrix(family[0].grid)
    coords = np.stack([v.coords() for v in family])
    entries = coords.conj() @ m @ coords.T
    signature, eigenvalues = gram_signature(entries)
    return GramMatrix(entries=entries, signature=signature, eigenvalues=eigenvalues)


def project_onto(basis: list[ExtendedVector], u: ExtendedVector) -> ExtendedVector:
    """Indefinite-orthogonal projection onto the span of a nondegenerate basis."""
    if not basis:
        raise DegenerateGramError("empty projection basis")
    gram = signature_of(basis).entries
    cond = np.linalg.cond(gram)
    if not np.isfinite(cond) or cond > PROJECTION_CONDITION_LIMIT:
        raise DegenerateGramError(f"projection Gram is degenerate (cond {cond:.3e})")
    moments = np.array([indefinite_inner(b, u) for b in basis])
    weights = np.linalg.solve(gram, moments)
    out = zero_vector(u.grid)
    for w_i, b_i in zip(weights, basis):
        out = out + w_i * b_i
    return out


# -- Osterwalder-Schrader sector ---------------------------------------------------


def _os_moments(grid: Grid, values: np.ndarray) -> tuple[complex, complex]:
    """(f~(0), f~'(0)) with the e^{-i w tau} transform: f~'(0) = -i int tau f."""
    h = grid.step
    f0 = h * values.sum()
    f1 = -1j * h * (grid.points * values).sum()
    return complex(f0), complex(f1)


def _require_positive_support(grid: Grid, values: np.ndarray):
    neg = grid.points < -GRID_POINT_TOL
    if not np.any(neg):
        return
    scale = float(np.abs(values).max()) or 1.0
    if float(np.abs(values[neg]).max()) > 1e-12 * scale:
        raise SupportError("function must be supported in tau >= 0")


def os_inner_routes(
    grid: Grid, f, g, c: float = 0.0
) -> tuple[complex, complex, complex]:
    """The reflected product by three routes: quadrature, closed form, V-sector.

    All three agree analytically; the spread is a discretization self-check.
    """
    f = np.asarray(f, dtype=complex)
    g = np.asarray(g, dtype=complex)
    _require_positive_support(grid, f)
    _require_positive_support(grid, g)
    pts = grid.points
    h = grid.step

    kernel = c - (np.abs(pts)[:, None] + np.abs(pts)[None, :]) / 2.0
    reflected = complex(h * h * (f.conj() @ kernel @ g))

    f0, f1 = _os_moments(grid, f)
    g0, g1 = _os_moments(grid, g)
    closed = 0.5j * (np.conj(f1) * g0 - np.conj(f0) * g1) + c * np.conj(f0) * g0

    v_metric = np.array([[c, -0.5], [-0.5, 0.0]], dtype=complex)
    fv = np.array([f0, 1j * f1])
    gv = np.array([g0, 1j * g1])
    v_sector = complex(fv.conj() @ v_metric @ gv)
    return reflected, complex(closed), v_sector


def os_inner(grid: Grid, f, g, c: float = 0.0) -> complex:
    """Reflected (OS) product of positive-time functions; indefinite here."""
    reflected, closed, v_sector = os_inner_routes(grid, f, g, c)
    scale = max(abs(reflected), abs(closed), abs(v_sector), 1.0)
    if max(abs(reflected - closed), abs(reflected - v_sector)) > 1e-8 * scale:
        raise ArithmeticError("OS product routes disagree beyond tolerance")
    return reflected


def os_rank(grid: Grid, family: list[np.ndarray], c: float = 0.0) -> tuple[int, np.ndarray]:
    """Numerical rank of the OS Gram of positive-support functions (codim-two law)."""
    size = len(family)
    entries = np.zeros((size, size), dtype=complex)
    for i in range(size):
        for j in range(size):
            entries[i, j] = os_inner_routes(grid, family[i], family[j], c)[0]
    return numerical_rank(entries)


# -- Markov projections --------------------------------------------------------------


def _side_basis(grid: Grid, side: int, n_per_side: int) -> list[ExtendedVector]:
    pts = grid.points
    chosen = pts[pts * side > GRID_POINT_TOL]
    if chosen.size == 0:
        raise ValueError("grid has no points on the requested side")
    if n_per_side < chosen.size:
        picks = np.unique(np.linspace(0, chosen.size - 1, n_per_side).round().astype(int))
        chosen = chosen[picks]
    return [delta_zero(grid)] + [point_mass(grid, float(t)) for t in chosen] + [w_vector(grid)]


def _probe_set(grid: Grid, seed: int) -> list[ExtendedVector]:
    rng = np.random.default_rng(seed)
    probes = []
    for _ in range(8):
        probes.append(ExtendedVector(grid, rng.standard_normal(grid.n)))
    for _ in range(4):
        probes.append(
            ExtendedVector(
                grid,
                rng.standard_normal(grid.n),
                a=complex(*rng.standard_normal(2)),
                b=complex(*rng.standard_normal(2)),
            )
        )
    pts = grid.points
    for tau in (pts[1], pts[-2], pts[grid.n // 3]):
        probes.append(point_mass(grid, float(tau)))
    return probes


def markov_diagnostics(grid: Grid, n_per_side: int, alpha: float = 1.0, seed: int = 7) -> dict:
    """Residuals of the Markov projection identity E+ E- = E0.

    Builds the past/future/time-zero projections from point masses plus the
    singular pair and probes them with seeded vectors; all norms are taken in
    the positive product at scale alpha.
    """
    if n_per_side < 2:
        raise ValueError("need at least two points per side")
    if not grid.is_symmetric():
        raise ValueError("Markov projections need a symmetric grid containing 0")
    plus_basis = _side_basis(grid, +1, n_per_side)
    minus_basis = _side_basis(grid, -1, n_per_side)
    v_basis = [delta_zero(grid), w_vector(grid)]

    def e_plus(u):
        return project_onto(plus_basis, u)

    def e_minus(u):
        return project_onto(minus_basis, u)

    def e_zero(u):
        return project_onto(v_basis, u)

    markov = 0.0
    idempotence = 0.0
    for u in _probe_set(grid, seed):
        norm_u = krein_norm(u, alpha)
        if norm_u == 0.0:
            continue
        left = e_plus(e_minus(u))
        markov = max(markov, krein_norm(left - e_zero(u), alpha) / norm_u)
        for proj in (e_plus, e_minus):
            pu = proj(u)
            idempotence = max(idempotence, krein_norm(proj(pu) - pu, alpha) / norm_u)
    fixed_v = 0.0
    for v in v_basis:
        for proj in (e_plus, e_minus):
            fixed_v = max(fixed_v, krein_norm(proj(v) - v, alpha))
    return {
        "markov_residual": markov,
        "idempotence_residual": idempotence,
        "v_fixed_residual": fixed_v,
    }


def markov_projection_residual(grid: Grid, n_per_side: int, alpha: float = 1.0) -> float:
    """Max relative residual of (E+ E- - E0) over the probe set."""
    return markov_diagnostics(grid, n_per_side, alpha)["markov_residual"]


def conditional_independence_residual(
    points, alpha: float, condition_on_v: bool = True
) -> float:
    """Max conditional cross-covariance of past vs future given x(0) (and v).

    The Gaussian vector is (x(tau) for tau in points, v) under the Krein
    measure at scale alpha; the Markov property holds in the pair (x, v), so
    dropping v from the conditioning set leaves a finite residual.
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    pts = np.asarray(points, dtype=float)
    if not np.any(np.abs(pts) <= GRID_POINT_TOL):
        raise ValueError("points must contain 0 (the conditioning time)")
    past = np.where(pts < -GRID_POINT_TOL)[0]
    future = np.where(pts > GRID_POINT_TOL)[0]
    if past.size == 0 or future.size == 0:
        return 0.0
    zero = int(np.where(np.abs(pts) <= GRID_POINT_TOL)[0][0])

    dim = pts.size + 1
    cov = np.zeros((dim, dim))
    for i, t in enumerate(pts):
        for j, s in enumerate(pts):
            cov[i, j] = krein_kernel(t, s, alpha)
        cov[i, -1] = cov[-1, i] = abs(t) * alpha**2 / 2.0
    cov[-1, -1] = alpha**2 / 2.0

    cond = [zero, dim - 1] if condition_on_v else [zero]
    c_block = cov[np.ix_(cond, cond)]
    if abs(np.linalg.det(c_block)) < 1e-300:
        raise ValueError("conditioning block is singular")
    cross = cov[np.ix_(past, future)]
    correction = cov[np.ix_(past, cond)] @ np.linalg.solve(c_block, cov[np.ix_(cond, future)])
    return float(np.abs(cross - correction).max())


# -- duality and reflection ------------------------------------------------------------


def reflect_values(grid: Grid, values) -> np.ndarray:
    """Time reflection theta f(tau) = f(-tau); needs a symmetric grid."""
    if not grid.is_symmetric():
        raise ValueError("reflection needs a symmetric grid")
    return np.asarray(values)[::-1].copy()


def second_difference_operator(grid: Grid, values) -> np.ndarray:
    """D g = -g'' by the central second difference (zero at the boundary rows)."""
    g = np.asarray(values, dtype=complex)
    out = np.zeros_like(g)
    out[1:-1] = -(g[2:] - 2.0 * g[1:-1] + g[:-2]) / grid.step**2
    return out


def l2_inner(grid: Grid, f, g) -> complex:
    return complex(grid.step * (np.conj(np.asarray(f)) * np.asarray(g)).sum())


def duality_residual(grid: Grid, f, g) -> float:
    """|<f, D g> - (f, g)_L2| for the duality operator D = -d^2/dtau^2."""
    dg = second_difference_operator(grid, g)
    lhs = indefinite_inner(from_values(grid, f), from_values(grid, dg))
    return abs(lhs - l2_inner(grid, f, g))


def kernel_cross_inner(f_points, f_values, f_step, g_points, g_values, g_step, c: float = 0.0) -> complex:
    """Double-quadrature product of functions carried on two independent grids."""
    ft = np.asarray(f_points, dtype=float)
    gt = np.asarray(g_points, dtype=float)
    fv = np.asarray(f_values, dtype=complex)
    gv = np.asarray(g_values, dtype=complex)
    kernel = c - np.abs(ft[:, None] - gt[None, :]) / 2.0
    return complex(f_step * g_step * (fv.conj() @ kernel @ gv))


# -- seeded vector families -------------------------------------------------------------


def _bump(points: np.ndarray, center: float, width: float) -> np.ndarray:
    return np.exp(-0.5 * ((points - center) / width) ** 2)


def family(spec: str, grid: Grid, seed: int) -> list[ExtendedVector]:
    """Seeded generator families: meanzero:N, bumps:N, possupport:N."""
    try:
        kind, count_text = spec.split(":")
        count = int(count_text)
    except ValueError:
        raise ValueError(f"family spec {spec!r} is not of the form kind:N") from None
    if count < 0:
        raise ValueError("family size must be nonnegative")
    rng = np.random.default_rng(seed)
    pts = grid.points
    span = grid.stop - grid.start
    out: list[ExtendedVector] = []
    for _ in range(count):
        if kind == "meanzero":
            values = rng.standard_normal(grid.n)
            values -= values.mean()
        elif kind == "bumps":
            center = grid.start + span * rng.uniform(0.2, 0.8)
            values = _bump(pts, center, span * rng.uniform(0.03, 0.1))
        elif kind == "possupport":
            top = grid.stop
            center = top * rng.uniform(0.2, 0.8)
            values = _bump(pts, center, top * rng.uniform(0.05, 0.15))
            values[pts < -GRID_POINT_TOL] = 0.0
        else:
            raise ValueError(f"unknown family kind {kind!r}")
        out.append(ExtendedVector(grid, values))
    return out
