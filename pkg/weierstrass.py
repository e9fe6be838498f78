"""
Semi-discrete Weierstrass representation.

A semi-discrete holomorphic function g(k, t) with isothermic data (ν, σ, τ)
determines a minimal surface x by integrating its t-derivative inside each
row and stepping across rows with the edge formula. The sphere surface
x* = inverse stereographic image of g is the dual of x. SU(2) elements act
on g by Möbius maps and on x by the rotation su2_to_so3(el).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import cumulative_simpson

from core import (
    DEFAULT_TOL, ZERO_LENGTH, Check, CheckReport, Grid, PoleError, SampledSurface,
    SingularDataError, SurfaceError, stencil_derivative,
)
from invariants import IsothermicData, check_dual, check_minimal

logger = logging.getLogger(__name__)

# =============================================================================
# CONFIGURATION
# =============================================================================
LINEAR = 'linear'
EXPONENTIAL = 'exponential'
EXPONENTIAL_SWAPPED = 'exponential_swapped'
SAMPLED = 'sampled'
CATALOGUED = (LINEAR, EXPONENTIAL, EXPONENTIAL_SWAPPED)

ISO_CHECK_K = (-2, 2)
ISO_CHECK_T = (-1.0, 1.0)
ISO_CHECK_DT = 0.25
ISO_CHECK_TOL = 1e-12        # catalogued iso must factor |Δg|², |g'|² this well
SU2_TOL = 1e-9
COMPATIBILITY_TOL = 1e-6
T_FIRST = 't-first'
K_FIRST = 'k-first'


# =============================================================================
# HOLOMORPHIC DATA
# =============================================================================

@dataclass(frozen=True, eq=False)
class HolomorphicSpec:
    """A semi-discrete holomorphic function g with g', Δg and isothermic data.

    Catalogued kinds:
        linear               g = k + it
        exponential          g = c·exp(αk + iβt)
        exponential_swapped  g = c·exp(αt + iβk)
    The sampled kind stores g and g' on a grid with caller-supplied iso data.
    """

    kind: str
    params: dict = field(default_factory=dict)
    grid: Grid | None = None
    g: np.ndarray | None = None
    g_prime: np.ndarray | None = None
    iso: IsothermicData | None = None

    def __post_init__(self):
        if self.kind in (EXPONENTIAL, EXPONENTIAL_SWAPPED):
            for name in ('c', 'alpha', 'beta'):
                value = float(self.params.get(name, 0.0))
                if value == 0.0 or not math.isfinite(value):
                    raise SingularDataError(f"{self.kind} g needs nonzero finite {name}, got {value}")
            if self.kind == EXPONENTIAL_SWAPPED and math.isclose(math.sin(self.params['beta'] / 2), 0.0, abs_tol=1e-15):
                raise SingularDataError("exponential_swapped g with β a multiple of 2π has Δg = 0")
        elif self.kind == SAMPLED:
            if self.grid is None or self.g is None or self.g_prime is None or self.iso is None:
                raise SurfaceError("sampled g needs grid, g, g_prime and iso")
            g = np.array(self.g, dtype=complex)
            gp = np.array(self.g_prime, dtype=complex)
            if g.shape != self.grid.shape or gp.shape != self.grid.shape:
                raise SurfaceError(f"sampled g must have grid shape {self.grid.shape}")
            self.iso.require_grid(self.grid)
            g.setflags(write=False)
            gp.setflags(write=False)
            object.__setattr__(self, 'g', g)
            object.__setattr__(self, 'g_prime', gp)
        elif self.kind != LINEAR:
            raise SurfaceError(f"unknown holomorphic kind {self.kind!r}")
        object.__setattr__(self, 'params', dict(self.params))
        if self.kind in CATALOGUED:
            self._verify_catalogue()

    # -- constructors --------------------------------------------------------

    @classmethod
    def linear(cls):
        return cls(LINEAR)

    @classmethod
    def exponential(cls, c, alpha, beta):
        return cls(EXPONENTIAL, {'c': float(c), 'alpha': float(alpha), 'beta': float(beta)})

    @classmethod
    def exponential_swapped(cls, c, alpha, beta):
        return cls(EXPONENTIAL_SWAPPED, {'c': float(c), 'alpha': float(alpha), 'beta': float(beta)})

    @classmethod
    def sampled(cls, grid, g, g_prime, iso, params=None):
        return cls(SAMPLED, params or {}, grid, g, g_prime, iso)

    # -- closed forms --------------------------------------------------------

    def closed_form(self, k, t):
        """(g, g', Δg) for catalogued kinds at broadcastable k, t."""
        k = np.asarray(k, dtype=float)
        t = np.asarray(t, dtype=float)
        if self.kind == LINEAR:
            g = k + 1j * t
            return g, np.full(g.shape, 1j), np.ones(g.shape, dtype=complex)
        c, a, b = self.params['c'], self.params['alpha'], self.params['beta']
        if self.kind == EXPONENTIAL:
            g = c * np.exp(a * k + 1j * b * t)
            return g, 1j * b * g, g * math.expm1(a)
        g = c * np.exp(a * t + 1j * b * k)
        return g, a * g, g * (np.exp(1j * b) - 1.0)

    def closed_nu(self, k, t):
        k, t = np.broadcast_arrays(np.asarray(k, dtype=float), np.asarray(t, dtype=float))
        if self.kind == LINEAR:
            return np.ones(k.shape)
        c, a = abs(self.params['c']), self.params['alpha']
        return c * np.exp(a * (k if self.kind == EXPONENTIAL else t))

    def closed_sigma(self, k):
        k = np.asarray(k, dtype=float)
        if self.kind == LINEAR:
            return np.ones(k.shape)
        if self.kind == EXPONENTIAL:
            return np.full(k.shape, 4.0 * math.sinh(self.params['alpha'] / 2) ** 2)
        return np.full(k.shape, 4.0 * math.sin(self.params['beta'] / 2) ** 2)

    def closed_tau(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == LINEAR:
            return np.ones(t.shape)
        rate = self.params['beta'] if self.kind == EXPONENTIAL else self.params['alpha']
        return np.full(t.shape, rate * rate)

    def _verify_catalogue(self):
        sample = Grid.uniform(ISO_CHECK_K, ISO_CHECK_T, ISO_CHECK_DT)
        g, gp, dg = self.arrays_on(sample)
        iso = self.iso_on(sample)
        nu = iso.nu
        edge = np.abs(dg) ** 2
        edge_model = iso.sigma[:, None] * nu[:-1] * nu[1:]
        tangent = np.abs(gp) ** 2
        tangent_model = iso.tau[None, :] * nu ** 2
        worst = max(float(np.max(np.abs(edge - edge_model) / edge_model)),
                    float(np.max(np.abs(tangent - tangent_model) / tangent_model)))
        if worst > ISO_CHECK_TOL:
            raise SurfaceError(f"catalogued iso data for {self.kind} fails the factorization ({worst:.2e})")

    # -- grid views ----------------------------------------------------------

    def arrays_on(self, grid):
        """g, g' on the grid (nk, nt) and Δg on its edges (nk - 1, nt)."""
        if self.kind == SAMPLED:
            if not self.grid.same_as(grid):
                raise SurfaceError("sampled g requested on a grid it was not sampled on")
            return self.g, self.g_prime, self.g[1:] - self.g[:-1]
        k, t = np.meshgrid(grid.ks.astype(float), grid.t, indexing='ij')
        g, gp, _ = self.closed_form(k, t)
        _, _, dg = self.closed_form(k[:-1], t[:-1])
        return g, gp, dg

    def iso_on(self, grid):
        if self.kind == SAMPLED:
            if not self.grid.same_as(grid):
                raise SurfaceError("sampled iso requested on a grid it was not sampled on")
            return self.iso
        k, t = np.meshgrid(grid.ks.astype(float), grid.t, indexing='ij')
        return IsothermicData(self.closed_nu(k, t), self.closed_sigma(grid.ks[:-1]), self.closed_tau(grid.t))

    def to_sampled(self, grid):
        if self.kind == SAMPLED:
            return self
        g, gp, _ = self.arrays_on(grid)
        return HolomorphicSpec.sampled(grid, g, gp, self.iso_on(grid), {'from': self.kind, **self.params})

    def with_iso(self, iso):
        """Sampled copy carrying different isothermic data (not validated)."""
        if self.kind != SAMPLED:
            raise SurfaceError("with_iso needs a sampled spec; call to_sampled(grid) first")
        return HolomorphicSpec.sampled(self.grid, self.g, self.g_prime, iso, self.params)


def holomorphic_eval(spec, k, t):
    """g(k, t), ∂g/∂t and g(k+1, t) - g(k, t)."""
    if spec.kind in CATALOGUED:
        g, gp, dg = spec.closed_form(k, t)
        return complex(g), complex(gp), complex(dg)
    grid = spec.grid
    row = grid.row(k)
    if k + 1 > grid.k_range[1]:
        raise SurfaceError(f"Δg at k={k} needs row k+1 outside {grid.k_range}")
    j = int(round((t - grid.t[0]) / grid.dt))
    if not 0 <= j < grid.nt or abs(grid.t[j] - t) > 1e-9 * grid.dt:
        raise SurfaceError(f"t={t} is not a sample of the sampled g grid")
    return complex(spec.g[row, j]), complex(spec.g_prime[row, j]), complex(spec.g[row + 1, j] - spec.g[row, j])


# =============================================================================
# SPHERE MAPS
# =============================================================================

def sphere_points(g):
    """Inverse stereographic projection of complex array g onto the unit sphere."""
    g = np.asarray(g, dtype=complex)
    n = 1.0 + np.abs(g) ** 2
    return np.stack([2 * g.real / n, 2 * g.imag / n, (np.abs(g) ** 2 - 1.0) / n], axis=-1)


def sphere_derivative(g, g_prime):
    """t-derivative of the sphere points of g."""
    g = np.asarray(g, dtype=complex)
    gp = np.asarray(g_prime, dtype=complex)
    factor = 2.0 / (1.0 + np.abs(g) ** 2) ** 2
    planar = factor * (gp - np.conj(gp) * g * g)
    vertical = factor * 2.0 * (np.conj(g) * gp).real
    return np.stack([planar.real, planar.imag, vertical], axis=-1)


def inverse_stereographic(spec, grid):
    """x* = (2g, |g|² - 1) / (1 + |g|²) with ν* = 2ν / (1 + |g|²), σ* = σ, τ* = τ in meta['iso']."""
    g, gp, _ = spec.arrays_on(grid)
    iso = spec.iso_on(grid)
    nu_star = 2.0 * iso.nu / (1.0 + np.abs(g) ** 2)
    meta = {'family': 'sphere', 'g': spec.kind, 'iso': IsothermicData(nu_star, iso.sigma, iso.tau)}
    return SampledSurface(grid, sphere_points(g), sphere_derivative(g, gp), meta)


def stereographic(point):
    """(X1 + iX2) / (1 - X3); works on a single point or an array of points."""
    p = np.asarray(point, dtype=float)
    if np.any(1.0 - p[..., 2] <= ZERO_LENGTH):
        raise PoleError("stereographic projection of the north pole (0, 0, 1)")
    z = (p[..., 0] + 1j * p[..., 1]) / (1.0 - p[..., 2])
    return complex(z) if np.ndim(z) == 0 else z


# =============================================================================
# INTEGRATION
# =============================================================================

def tangent_integrand(g, g_prime, tau):
    """∂x = -(τ/2)·Re((1 - g²)/g', i(1 + g²)/g', 2g/g')."""
    g = np.asarray(g, dtype=complex)
    gp = np.asarray(g_prime, dtype=complex)
    half = -0.5 * np.asarray(tau, dtype=float)
    return np.stack([half * ((1 - g * g) / gp).real,
                     half * (1j * (1 + g * g) / gp).real,
                     half * (2 * g / gp).real], axis=-1)


def edge_integrand(g, g1, delta_g, sigma):
    """Δx = (σ/2)·Re((1 - g g₁)/Δg, i(1 + g g₁)/Δg, (g + g₁)/Δg)."""
    g = np.asarray(g, dtype=complex)
    g1 = np.asarray(g1, dtype=complex)
    dg = np.asarray(delta_g, dtype=complex)
    half = 0.5 * np.asarray(sigma, dtype=float)
    return np.stack([half * ((1 - g * g1) / dg).real,
                     half * (1j * (1 + g * g1) / dg).real,
                     half * ((g + g1) / dg).real], axis=-1)


def _singular_sample(mask, grid, what):
    row, j = np.argwhere(mask)[0]
    return SingularDataError(f"{what} vanishes at sample (k={grid.k_range[0] + int(row)}, j={int(j)})")


def _integrands(spec, grid):
    g, gp, dg = spec.arrays_on(grid)
    if np.any(np.abs(gp) <= ZERO_LENGTH):
        raise _singular_sample(np.abs(gp) <= ZERO_LENGTH, grid, "g'")
    if np.any(np.abs(dg) <= ZERO_LENGTH):
        raise _singular_sample(np.abs(dg) <= ZERO_LENGTH, grid, "Δg")
    iso = spec.iso_on(grid)
    tangent = tangent_integrand(g, gp, iso.tau[None, :])
    edge = edge_integrand(g[:-1], g[1:], dg, iso.sigma[:, None])
    return g, iso, tangent, edge


def _row_integrals(spec, grid, tangent):
    """Cumulative ∫ ∂x dt along every row from t_0, shape (nk, nt, 3)."""
    dt = grid.dt
    if spec.kind == SAMPLED:
        return cumulative_simpson(tangent, dx=dt, axis=1, initial=0.0)
    # Simpson on each interval with the closed form at the midpoint
    k, t_mid = np.meshgrid(grid.ks.astype(float), 0.5 * (grid.t[:-1] + grid.t[1:]), indexing='ij')
    g_mid, gp_mid, _ = spec.closed_form(k, t_mid)
    mid = tangent_integrand(g_mid, gp_mid, spec.closed_tau(t_mid[0])[None, :])
    pieces = dt / 6.0 * (tangent[:, :-1] + 4.0 * mid + tangent[:, 1:])
    out = np.zeros_like(tangent)
    out[:, 1:] = np.cumsum(pieces, axis=1)
    return out


def weierstrass_integrate(spec, grid, x0=None, path=T_FIRST, base_k=None, base_j=0):
    """Minimal surface x of the holomorphic data g on grid.

    Args:
        spec: HolomorphicSpec with iso data defined on grid
        grid: Grid to sample on
        x0: value of x at (base_k, t[base_j]); origin by default
        path: 't-first' integrates the base row then steps across rows per
            column; 'k-first' steps across rows in the base column then
            integrates every row
        base_k, base_j: base row and column; lower-left corner by default

    Returns:
        SampledSurface with analytic d_t and meta['iso'] holding
        ν_x = (1 + |g|²)/(2ν), σ, τ.
    """
    if path not in (T_FIRST, K_FIRST):
        raise SurfaceError(f"path must be {T_FIRST!r} or {K_FIRST!r}, got {path!r}")
    base_k = grid.k_range[0] if base_k is None else base_k
    row0 = grid.row(base_k)
    if not 0 <= base_j < grid.nt:
        raise SurfaceError(f"base column {base_j} outside 0..{grid.nt - 1}")
    x0 = np.zeros(3) if x0 is None else np.asarray(x0, dtype=float)

    g, iso, tangent, edge = _integrands(spec, grid)
    rows = _row_integrals(spec, grid, tangent)
    rows = rows - rows[:, base_j:base_j + 1]

    steps = np.zeros((grid.nk,) + edge.shape[1:])
    steps[1:] = np.cumsum(edge, axis=0)
    steps = steps - steps[row0:row0 + 1]

    if path == T_FIRST:
        points = x0 + rows[row0][None, :, :] + steps
    else:
        points = x0 + steps[:, base_j:base_j + 1, :] + rows
    logger.debug(f"integrated {spec.kind} g on {grid.nk}x{grid.nt} grid, path={path}")

    nu_x = (1.0 + np.abs(g) ** 2) / (2.0 * iso.nu)
    meta = {'family': 'weierstrass', 'g': spec.kind, 'path': path,
            'iso': IsothermicData(nu_x, iso.sigma, iso.tau), **spec.params}
    return SampledSurface(grid, points, tangent, meta)


def compatibility_residual(spec, grid, tol=COMPATIBILITY_TOL):
    """max ‖∂(Δx-integrand) - Δ(∂x-integrand)‖ with ∂ by the order-4 stencil."""
    _, _, tangent, edge = _integrands(spec, grid)
    d_edge = stencil_derivative(edge, grid.dt, axis=1)
    residual = float(np.max(np.linalg.norm(d_edge - (tangent[1:] - tangent[:-1]), axis=-1)))
    logger.debug(f"compatibility residual for {spec.kind}: {residual:.3e}")
    return CheckReport((Check('compatibility', residual, tol),), {}, 'compatibility')


# =============================================================================
# ROTATIONS
# =============================================================================

@dataclass(frozen=True)
class SU2Element:
    """(p, q) with |p|² + |q|² = 1, acting on g by (pg + q)/(-q̄g + p̄)."""

    p: complex
    q: complex

    def __post_init__(self):
        p, q = complex(self.p), complex(self.q)
        norm = abs(p) ** 2 + abs(q) ** 2
        if abs(norm - 1.0) > SU2_TOL:
            raise SurfaceError(f"SU(2) element needs |p|²+|q|² = 1, got {norm!r}")
        object.__setattr__(self, 'p', p)
        object.__setattr__(self, 'q', q)

    @classmethod
    def random(cls, rng):
        v = rng.standard_normal(4)
        v /= np.linalg.norm(v)
        return cls(complex(v[0], v[1]), complex(v[2], v[3]))

    def denominator(self, g):
        return -np.conj(self.q) * g + np.conj(self.p)


def mobius_point(el, z):
    den = el.denominator(z)
    if np.any(np.abs(den) <= ZERO_LENGTH):
        raise PoleError(f"Möbius map of ({el.p}, {el.q}) has a pole at the given point")
    return (el.p * z + el.q) / den


def su2_to_so3(el):
    """Rotation of 3-space induced by the SU(2) element."""
    p1, p2, q1, q2 = el.p.real, el.p.imag, el.q.real, el.q.imag
    return np.array([
        [p1 * p1 - p2 * p2 - q1 * q1 + q2 * q2, -2 * p1 * p2 - 2 * q1 * q2, -2 * p1 * q1 + 2 * p2 * q2],
        [2 * p1 * p2 - 2 * q1 * q2, p1 * p1 - p2 * p2 + q1 * q1 - q2 * q2, -2 * p1 * q2 - 2 * p2 * q1],
        [2 * p1 * q1 + 2 * p2 * q2, 2 * p1 * q2 - 2 * p2 * q1, p1 * p1 + p2 * p2 - q1 * q1 - q2 * q2],
    ])


def mobius_transform(spec, el, grid=None):
    """Sampled ĝ = (pg + q)/(-q̄g + p̄) with ν̂ = ν/|-q̄g + p̄|² and unchanged σ, τ.

    grid defaults to the spec's own grid (sampled kind) and is required for
    catalogued kinds.
    """
    if grid is None:
        if spec.kind != SAMPLED:
            raise SurfaceError("mobius_transform of a catalogued g needs a grid")
        grid = spec.grid
    g, gp, _ = spec.arrays_on(grid)
    iso = spec.iso_on(grid)
    den = el.denominator(g)
    if np.any(np.abs(den) <= ZERO_LENGTH):
        raise _pole_sample(np.abs(den) <= ZERO_LENGTH, grid)
    g_hat = (el.p * g + el.q) / den
    gp_hat = gp / den ** 2
    nu_hat = iso.nu / np.abs(den) ** 2
    params = {'from': spec.kind, 'p': el.p, 'q': el.q}
    return HolomorphicSpec.sampled(grid, g_hat, gp_hat, IsothermicData(nu_hat, iso.sigma, iso.tau), params)


def _pole_sample(mask, grid):
    row, j = np.argwhere(mask)[0]
    return PoleError(f"Möbius pole at sample (k={grid.k_range[0] + int(row)}, j={int(j)})")


def cross_ratio(z1, z2, z3, z4):
    """(z1 - z2)(z3 - z4) / ((z2 - z3)(z4 - z1))."""
    den = (z2 - z3) * (z4 - z1)
    if np.any(np.abs(den) == 0):
        raise SingularDataError("cross ratio of coincident points")
    return (z1 - z2) * (z3 - z4) / den


def quad_cross_ratios(values):
    """Cross ratios of every elementary quad of a complex net g[n, m]."""
    g = np.asarray(values, dtype=complex)
    return cross_ratio(g[:-1, :-1], g[1:, :-1], g[1:, 1:], g[:-1, 1:])


def isothermic_ratio_residual(spec, grid):
    """max relative deviation of |Δg|²/(|g'||g₁'|) from σ/τ."""
    _, gp, dg = spec.arrays_on(grid)
    iso = spec.iso_on(grid)
    lhs = np.abs(dg) ** 2 / (np.abs(gp[:-1]) * np.abs(gp[1:]))
    rhs = iso.sigma[:, None] / iso.tau[None, :]
    return float(np.max(np.abs(lhs - rhs) / rhs))


def weierstrass_report(spec, grid, tol=DEFAULT_TOL):
    """Dual, sphericity and compatibility checks for one holomorphic datum."""
    x = weierstrass_integrate(spec, grid)
    x_star = inverse_stereographic(spec, grid)
    return (check_dual(x, x_star, x.meta['iso'], tol)
            .merged(check_minimal(x_star, tol), compatibility_residual(spec, grid),
                    title=f"weierstrass {spec.kind}"))
