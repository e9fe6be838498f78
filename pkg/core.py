"""
Core types and derivative operators for semi-discrete surfaces.

A semi-discrete surface is a map x(k, t) with an integer k and a real t.
It is stored on a uniform t-grid as an array of points indexed (k, j),
optionally with analytic t-derivatives. Fully discrete quad nets and
planar profile curves live here as well, together with the error types
and the numerical defaults shared by every other module.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

logger = logging.getLogger(__name__)

# =============================================================================
# NUMERICAL CONFIGURATION
# =============================================================================
DEFAULT_DT = 1e-3            # t-step used when the caller does not give one
DEFAULT_TOL = 1e-8           # verifier tolerance with analytic derivatives
STENCIL_TOL = 1e-5           # verifier tolerance with stencil derivatives
STENCIL_POINTS = 5
ZERO_LENGTH = 1e-14          # vectors shorter than this count as zero
UNIFORM_RTOL = 1e-9          # allowed relative spread of t-steps

DISCRETE = 'discrete'
SMOOTH = 'smooth-sampled'

# 5-point first-derivative weights, in units of 1/(12 dt).
# Rows: sample 0, sample 1, interior, sample n-2, sample n-1.
_FIRST_WEIGHTS = (
    (-25.0, 48.0, -36.0, 16.0, -3.0),
    (-3.0, -10.0, 18.0, -6.0, 1.0),
    (1.0, -8.0, 0.0, 8.0, -1.0),
    (-1.0, 6.0, -18.0, 10.0, 3.0),
    (3.0, -16.0, 36.0, -48.0, 25.0),
)

# 5-point second-derivative weights, in units of 1/(12 dt^2).
_SECOND_WEIGHTS = (
    (35.0, -104.0, 114.0, -56.0, 11.0),
    (11.0, -20.0, 6.0, 4.0, -1.0),
    (-1.0, 16.0, -30.0, 16.0, -1.0),
    (-1.0, 4.0, 6.0, -20.0, 11.0),
    (11.0, -56.0, 114.0, -104.0, 35.0),
)


# =============================================================================
# ERRORS
# =============================================================================

class SurfaceError(ValueError):
    """Base class for every error raised by the surface modules."""


class NonFiniteSampleError(SurfaceError):
    """An evaluator produced NaN or infinity."""


class EdgeMissingError(SurfaceError):
    """Row k+1 is outside the surface's k-range."""


class StencilError(SurfaceError):
    """Too few t-samples for the 5-point stencil."""


class GridMismatchError(SurfaceError):
    """Two objects that must share a grid do not."""


class SingularDataError(SurfaceError):
    """Holomorphic data vanishes where it is divided by."""


class PoleError(SurfaceError):
    """A point sits on the pole of a projection or Möbius map."""


class DegenerateFitError(SurfaceError):
    """Not enough independent points for a fit."""


class NoSolutionError(SurfaceError):
    """A scalar equation has no root in the scanned interval."""


class NotCoshError(SurfaceError):
    """A profile cannot lie on a scaled cosh graph."""


class ProfileRangeError(SurfaceError):
    """A profile does not cover the parameter range it is used on."""


class PerturbationError(SurfaceError):
    """A variation does not respect the boundary pinning."""


class InvalidParameterError(SurfaceError):
    """A generator parameter is outside its domain."""


def first_non_finite(values):
    """Index tuple of the first non-finite entry (over the leading axes), or None."""
    values = np.asarray(values)
    bad = ~np.isfinite(values)
    if values.ndim > 2:
        bad = bad.reshape(values.shape[:2] + (-1,)).any(axis=-1)
    if not bad.any():
        return None
    return tuple(int(i) for i in np.argwhere(bad)[0])


def _frozen(array):
    array = np.array(array, dtype=float)
    array.setflags(write=False)
    return array


# =============================================================================
# DOMAIN TYPES
# =============================================================================

@dataclass(frozen=True, eq=False)
class Grid:
    """Integer k-range (inclusive) times a strictly increasing uniform t-grid."""

    k_range: tuple
    t: np.ndarray

    def __post_init__(self):
        k_min, k_max = int(self.k_range[0]), int(self.k_range[1])
        if k_max < k_min:
            raise SurfaceError(f"empty k-range {self.k_range}")
        t = _frozen(self.t)
        if t.ndim != 1 or t.size < 2:
            raise SurfaceError("a t-grid needs at least two samples")
        steps = np.diff(t)
        if np.any(steps <= 0):
            raise SurfaceError("t-grid must be strictly increasing")
        if np.max(np.abs(steps - steps.mean())) > UNIFORM_RTOL * steps.mean():
            raise SurfaceError("t-grid must be uniform; resample before building a surface")
        object.__setattr__(self, 'k_range', (k_min, k_max))
        object.__setattr__(self, 't', t)

    @classmethod
    def uniform(cls, k_range, t_interval, dt=DEFAULT_DT):
        """Build a grid over t_interval with step as close to dt as divides it.

        Samples are placed symmetrically about the interval midpoint, so a
        symmetric interval with an even number of steps contains t = 0 exactly.
        """
        t_min, t_max = float(t_interval[0]), float(t_interval[1])
        if not dt > 0:
            raise InvalidParameterError(f"dt must be positive, got {dt}")
        length = t_max - t_min
        if length < dt * (1.0 - UNIFORM_RTOL):
            raise InvalidParameterError(f"t-interval {t_interval} is shorter than dt={dt}")
        n = max(1, int(round(length / dt)))
        step = length / n
        mid = 0.5 * (t_min + t_max)
        t = mid + (np.arange(n + 1) - 0.5 * n) * step
        return cls(k_range, t)

    @property
    def ks(self):
        return np.arange(self.k_range[0], self.k_range[1] + 1)

    @property
    def nk(self):
        return self.k_range[1] - self.k_range[0] + 1

    @property
    def nt(self):
        return self.t.size

    @property
    def dt(self):
        return float((self.t[-1] - self.t[0]) / (self.nt - 1))

    @property
    def shape(self):
        return (self.nk, self.nt)

    def row(self, k):
        """Array row index of integer k."""
        if not self.k_range[0] <= k <= self.k_range[1]:
            raise EdgeMissingError(f"k={k} outside k-range {self.k_range}")
        return int(k - self.k_range[0])

    def same_as(self, other):
        return (self.k_range == other.k_range and self.nt == other.nt
                and np.allclose(self.t, other.t, rtol=0, atol=1e-12 * max(1.0, np.abs(self.t).max())))


@dataclass(frozen=True, eq=False)
class SampledSurface:
    """A semi-discrete surface x(k, t_j) with optional analytic t-derivatives."""

    grid: Grid
    points: np.ndarray
    d_t: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        points = _frozen(self.points)
        expected = self.grid.shape + (3,)
        if points.shape != expected:
            raise GridMismatchError(f"points have shape {points.shape}, grid needs {expected}")
        bad = first_non_finite(points)
        if bad is not None:
            k = self.grid.k_range[0] + bad[0]
            raise NonFiniteSampleError(f"non-finite point at sample (k={k}, j={bad[1]})")
        object.__setattr__(self, 'points', points)
        if self.d_t is not None:
            d_t = _frozen(self.d_t)
            if d_t.shape != expected:
                raise GridMismatchError(f"d_t has shape {d_t.shape}, grid needs {expected}")
            bad = first_non_finite(d_t)
            if bad is not None:
                k = self.grid.k_range[0] + bad[0]
                raise NonFiniteSampleError(f"non-finite derivative at sample (k={k}, j={bad[1]})")
            object.__setattr__(self, 'd_t', d_t)
        object.__setattr__(self, 'meta', dict(self.meta))

    @property
    def k_range(self):
        return self.grid.k_range

    @property
    def t_grid(self):
        return self.grid.t

    @property
    def dt(self):
        return self.grid.dt

    @property
    def analytic(self):
        return self.d_t is not None

    def row(self, k):
        return self.points[self.grid.row(k)]

    def transformed(self, rotation=None, translation=None):
        """Apply x -> R x + b to points (and R to d_t)."""
        rotation = np.eye(3) if rotation is None else np.asarray(rotation, dtype=float)
        translation = np.zeros(3) if translation is None else np.asarray(translation, dtype=float)
        d_t = None if self.d_t is None else self.d_t @ rotation.T
        return SampledSurface(self.grid, self.points @ rotation.T + translation, d_t, self.meta)

    def without_derivatives(self):
        return SampledSurface(self.grid, self.points, None, self.meta)


@dataclass(frozen=True, eq=False)
class DiscreteNet:
    """A fully discrete quad net x(n, m), rows n (profile) by columns m (rotation)."""

    n_range: tuple
    m_range: tuple
    points: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        n_range = (int(self.n_range[0]), int(self.n_range[1]))
        m_range = (int(self.m_range[0]), int(self.m_range[1]))
        points = _frozen(self.points)
        expected = (n_range[1] - n_range[0] + 1, m_range[1] - m_range[0] + 1, 3)
        if points.shape != expected:
            raise GridMismatchError(f"net points have shape {points.shape}, expected {expected}")
        object.__setattr__(self, 'n_range', n_range)
        object.__setattr__(self, 'm_range', m_range)
        object.__setattr__(self, 'points', points)
        object.__setattr__(self, 'meta', dict(self.meta))

    def vertex(self, n, m):
        return self.points[n - self.n_range[0], m - self.m_range[0]]


@dataclass(frozen=True, eq=False)
class ProfileCurve:
    """A planar curve in the x1x3-plane: a vertex list or a sampled smooth curve."""

    kind: str
    params: np.ndarray
    points: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in (DISCRETE, SMOOTH):
            raise SurfaceError(f"unknown profile kind {self.kind!r}")
        params = _frozen(self.params).reshape(-1)
        points = _frozen(self.points).reshape(-1, 3)
        if params.size != points.shape[0]:
            raise SurfaceError("profile needs one parameter per point")
        if np.any(points[:, 1] != 0.0):
            raise SurfaceError("profile points must have second coordinate exactly 0")
        if params.size > 1 and np.any(np.diff(params) <= 0):
            raise SurfaceError("profile parameters must be strictly increasing")
        object.__setattr__(self, 'params', params)
        object.__setattr__(self, 'points', points)
        object.__setattr__(self, 'meta', dict(self.meta))

    @classmethod
    def from_xz(cls, kind, params, x, z, meta=None):
        x = np.asarray(x, dtype=float)
        points = np.column_stack([x, np.zeros_like(x), np.asarray(z, dtype=float)])
        return cls(kind, params, points, meta or {})

    @property
    def x(self):
        return self.points[:, 0]

    @property
    def z(self):
        return self.points[:, 2]

    def __len__(self):
        return self.params.size

    def scaled(self, factor):
        return ProfileCurve(self.kind, self.params, self.points * factor, self.meta)


@dataclass(frozen=True)
class Check:
    """One named residual against its tolerance."""

    name: str
    residual: float
    tolerance: float

    def __post_init__(self):
        if not self.tolerance > 0:
            raise SurfaceError(f"check {self.name!r}: tolerance must be positive")
        if self.residual < 0:
            raise SurfaceError(f"check {self.name!r}: residual must be non-negative")

    @property
    def passed(self):
        # NaN compares False, so a NaN residual fails
        return bool(self.residual <= self.tolerance)


@dataclass(frozen=True)
class CheckReport:
    """Named residuals with tolerances; the output of every verifier."""

    checks: tuple = ()
    details: dict = field(default_factory=dict)
    title: str = ''

    @property
    def overall(self):
        return all(c.passed for c in self.checks)

    def __getitem__(self, name):
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def names(self):
        return [c.name for c in self.checks]

    def failed(self):
        return [c for c in self.checks if not c.passed]

    def merged(self, *others, title=None):
        checks = list(self.checks)
        details = dict(self.details)
        for other in others:
            checks.extend(other.checks)
            details.update(other.details)
        return CheckReport(tuple(checks), details, title if title is not None else self.title)


# =============================================================================
# CONSTRUCTION
# =============================================================================

def build_sampled(evaluator, k_range, t_interval, dt=DEFAULT_DT, analytic_dt=None, meta=None):
    """Sample evaluator(k, t) -> 3-vector on a uniform grid.

    Args:
        evaluator: callable (k, t) -> 3-vector
        k_range: inclusive (k_min, k_max)
        t_interval: (t_min, t_max), at least dt long
        dt: requested t-step
        analytic_dt: optional callable (k, t) -> dx/dt

    Returns:
        SampledSurface; NonFiniteSampleError names the first bad sample.
    """
    grid = Grid.uniform(k_range, t_interval, dt)
    points = np.empty(grid.shape + (3,))
    d_t = None if analytic_dt is None else np.empty(grid.shape + (3,))
    for row, k in enumerate(grid.ks):
        for j, t in enumerate(grid.t):
            p = np.asarray(evaluator(int(k), float(t)), dtype=float)
            if p.shape != (3,) or not np.all(np.isfinite(p)):
                raise NonFiniteSampleError(f"non-finite evaluator output at sample (k={k}, j={j})")
            points[row, j] = p
            if d_t is not None:
                d = np.asarray(analytic_dt(int(k), float(t)), dtype=float)
                if d.shape != (3,) or not np.all(np.isfinite(d)):
                    raise NonFiniteSampleError(f"non-finite analytic derivative at sample (k={k}, j={j})")
                d_t[row, j] = d
    logger.debug(f"sampled surface on {grid.nk}x{grid.nt} grid, dt={grid.dt:.3g}")
    return SampledSurface(grid, points, d_t, meta or {})


# =============================================================================
# DERIVATIVE OPERATORS
# =============================================================================

def _apply_stencil(values, dt_power, weights, axis):
    values = np.moveaxis(np.asarray(values, dtype=float), axis, 0)
    n = values.shape[0]
    if n < STENCIL_POINTS:
        raise StencilError(f"{n} samples; the stencil needs at least {STENCIL_POINTS}")
    head_0, head_1, central, tail_1, tail_0 = (np.asarray(w) for w in weights)
    out = np.empty_like(values)
    out[2:n - 2] = sum(central[i] * values[i:n - 4 + i] for i in range(5) if central[i] != 0.0)
    head = values[:5]
    tail = values[n - 5:]
    out[0] = np.tensordot(head_0, head, axes=1)
    out[1] = np.tensordot(head_1, head, axes=1)
    out[n - 2] = np.tensordot(tail_1, tail, axes=1)
    out[n - 1] = np.tensordot(tail_0, tail, axes=1)
    out /= 12.0 * dt_power
    return np.moveaxis(out, 0, axis)


def stencil_derivative(values, dt, axis=0):
    """Order-4 first derivative along axis (one-sided 5-point stencils at the ends)."""
    return _apply_stencil(values, dt, _FIRST_WEIGHTS, axis)


def stencil_second_derivative(values, dt, axis=0):
    """Second derivative along axis; order 4 inside, order 3 at the two end samples."""
    return _apply_stencil(values, dt * dt, _SECOND_WEIGHTS, axis)


def tangents(surface):
    """dx/dt on the whole grid: analytic when present, stencil otherwise."""
    if surface.d_t is not None:
        return surface.d_t
    return stencil_derivative(surface.points, surface.dt, axis=1)


def edge_arrays(surface):
    """(dx, dx1, Dx, dDx) for every edge sample, each shaped (nk-1, nt, 3)."""
    if surface.grid.nk < 2:
        raise EdgeMissingError(f"surface with k-range {surface.k_range} has no edges")
    d = tangents(surface)
    dx, dx1 = d[:-1], d[1:]
    Dx = surface.points[1:] - surface.points[:-1]
    return dx, dx1, Dx, dx1 - dx


def discrete_ops(surface, k, j):
    """(dx, Dx, dDx) at edge sample (k, j).

    dx is the analytic derivative when the surface carries one, else the
    5-point stencil; Dx = x(k+1) - x(k); dDx = dx(k+1) - dx(k).
    """
    grid = surface.grid
    row = grid.row(k)
    if k + 1 > grid.k_range[1]:
        raise EdgeMissingError(f"edge ({k}, {k + 1}) leaves k-range {grid.k_range}")
    if not 0 <= j < grid.nt:
        raise StencilError(f"sample index j={j} outside 0..{grid.nt - 1}")
    if surface.d_t is not None:
        dx, dx1 = surface.d_t[row, j], surface.d_t[row + 1, j]
    else:
        n = grid.nt
        if n < STENCIL_POINTS:
            raise StencilError(f"sample (k={k}, j={j}): {n} samples, stencil needs {STENCIL_POINTS}")
        if j < 2:
            start, weights = 0, _FIRST_WEIGHTS[j]
        elif j > n - 3:
            start, weights = n - 5, _FIRST_WEIGHTS[4 - (n - 1 - j)]
        else:
            start, weights = j - 2, _FIRST_WEIGHTS[2]
        w = np.asarray(weights) / (12.0 * grid.dt)
        dx = w @ surface.points[row, start:start + 5]
        dx1 = w @ surface.points[row + 1, start:start + 5]
    Dx = surface.points[row + 1, j] - surface.points[row, j]
    return np.array(dx), Dx, np.array(dx1 - dx)


# =============================================================================
# ALIGNMENT
# =============================================================================

def translation_error(a, b):
    """Max pointwise distance between a and b after removing the mean offset."""
    a = np.asarray(a, dtype=float).reshape(-1, 3)
    b = np.asarray(b, dtype=float).reshape(-1, 3)
    offset = (b - a).mean(axis=0)
    return float(np.max(np.linalg.norm(a + offset - b, axis=1)))


def rigid_alignment_error(a, b):
    """Max pointwise distance after the best rigid motion taking a onto b (Kabsch)."""
    p = np.asarray(a, dtype=float).reshape(-1, 3)
    q = np.asarray(b, dtype=float).reshape(-1, 3)
    pc = p - p.mean(axis=0)
    qc = q - q.mean(axis=0)
    u, _, vt = np.linalg.svd(pc.T @ qc)
    d = math.copysign(1.0, np.linalg.det(u @ vt))
    rotation = u @ np.diag([1.0, 1.0, d]) @ vt
    return float(np.max(np.linalg.norm(pc @ rotation - qc, axis=1)))
