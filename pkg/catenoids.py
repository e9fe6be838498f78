"""
Generators for the seven catenoid families.

    smooth     the classical catenoid (cosh t, 0, t)
    PR         discrete profile with a polygonal rotation (closed form)
    M_pd,rs    discrete profile by the Chebyshev recursion, smooth rotation
    BP         fully discrete, from a cross-ratio factorizing function
    MW_pd,rs   discrete profile by a difference system, smooth rotation, with dual
    MW_ps,rd   smooth profile, discrete rotation, with dual
    M_ps,rd    smooth profile critical for the area of a polygonal piece

Profiles are normalized with neck vertex (1, 0, 0) on the plane z = 0 and
the rotation axis along x3.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import bisect

from core import (
    DEFAULT_DT, DISCRETE, SMOOTH, DiscreteNet, Grid, InvalidParameterError, NoSolutionError,
    ProfileCurve, SampledSurface, SurfaceError, stencil_derivative, stencil_second_derivative,
)
from invariants import IsothermicData

logger = logging.getLogger(__name__)

# =============================================================================
# GENERATOR CONFIGURATION
# =============================================================================
ROOT_XTOL = 1e-13            # bisection tolerance for the neck equation
SCAN_START = 1e-6            # geometric root scan starts here
SCAN_POINTS = 400
ODE_RTOL = 1e-12
ODE_ATOL = 1e-12
DEFAULT_SECTORS = 12         # rotation steps for the smooth catenoid mesh
DEFAULT_T_INTERVAL = (-2.0, 2.0)
FULL_TURN = (0.0, 2.0 * math.pi)
SMALLEST = 'smallest'
LARGEST = 'largest'


# =============================================================================
# PARAMETERS AND RESULTS
# =============================================================================

@dataclass(frozen=True)
class MWPdRsParams:
    """Initial data f(0), c(0) and height step h of the difference system."""

    f0: float = 1.0
    c0: float = 0.0
    h: float = 1.0
    k_range: tuple = (-5, 5)

    def __post_init__(self):
        if not (self.f0 > 0 and self.h > 0):
            raise InvalidParameterError(f"need f0 > 0 and h > 0, got f0={self.f0}, h={self.h}")
        if self.k_range[1] < self.k_range[0]:
            raise InvalidParameterError(f"empty k-range {self.k_range}")


@dataclass(frozen=True)
class MPsRdParams:
    """Number of rotation steps K, half-height r and the root branch of c3."""

    K: int = 5
    r: float = 0.2
    branch: str = SMALLEST

    def __post_init__(self):
        if int(self.K) != self.K or self.K < 3:
            raise InvalidParameterError(f"K must be an integer >= 3, got {self.K}")
        if not self.r > 0:
            raise InvalidParameterError(f"r must be positive, got {self.r}")
        if self.branch not in (SMALLEST, LARGEST):
            raise InvalidParameterError(f"branch must be {SMALLEST!r} or {LARGEST!r}")

    @property
    def theta(self):
        return 2.0 * math.pi / self.K

    @property
    def cos_theta(self):
        return math.cos(self.theta)

    @property
    def sin_theta(self):
        return math.sin(self.theta)


class SmoothCatenoid(NamedTuple):
    profile: ProfileCurve
    surface: SampledSurface
    iso: IsothermicData


class BPCatenoid(NamedTuple):
    net: DiscreteNet
    profile: ProfileCurve


class SemiDiscreteCatenoid(NamedTuple):
    profile: ProfileCurve
    surface: SampledSurface
    dual: SampledSurface | None
    iso: IsothermicData


class MPsRdCatenoid(NamedTuple):
    c3: float
    roots: tuple
    profile: ProfileCurve
    normalized: ProfileCurve
    boundary_c1: np.ndarray
    boundary_c2: np.ndarray
    el_residual: float


# =============================================================================
# SURFACES OF REVOLUTION
# =============================================================================

def surface_of_revolution_pd(f, z, k_range, t_grid, meta=None):
    """x(k, t) = (f_k cos t, f_k sin t, z_k) with ν = f, τ = 1, σ = ((Δf)² + (Δz)²)/(f f₁)."""
    f = np.asarray(f, dtype=float)
    z = np.asarray(z, dtype=float)
    grid = Grid(k_range, t_grid)
    if f.shape != (grid.nk,) or z.shape != (grid.nk,):
        raise SurfaceError(f"profile has {f.size} values for {grid.nk} rows")
    cos, sin = np.cos(grid.t), np.sin(grid.t)
    points = np.stack([f[:, None] * cos, f[:, None] * sin, np.broadcast_to(z[:, None], grid.shape)], axis=-1)
    d_t = np.stack([-f[:, None] * sin, f[:, None] * cos, np.zeros(grid.shape)], axis=-1)
    sigma = (np.diff(f) ** 2 + np.diff(z) ** 2) / (f[:-1] * f[1:])
    iso = IsothermicData(np.broadcast_to(f[:, None], grid.shape), sigma, np.ones(grid.nt))
    return SampledSurface(grid, points, d_t, dict(meta or {}, layout='pd')), iso


def surface_of_revolution_ps(f, f_prime, z, alpha, k_range, t_grid, meta=None):
    """x(k, t) = (f(t) cos αk, f(t) sin αk, z(t)) with ν = f, τ = (f'² + z'²)/f², σ = 4 sin²(α/2).

    z is sampled with its derivative given implicitly as 1 (z = t) unless
    a tuple (z, z_prime) is passed.
    """
    grid = Grid(k_range, t_grid)
    f = np.asarray(f, dtype=float)
    fp = np.asarray(f_prime, dtype=float)
    if isinstance(z, tuple):
        z, zp = (np.asarray(v, dtype=float) for v in z)
    else:
        z, zp = np.asarray(z, dtype=float), np.ones(grid.nt)
    angles = alpha * grid.ks
    cos, sin = np.cos(angles)[:, None], np.sin(angles)[:, None]
    points = np.stack([f * cos, f * sin, np.broadcast_to(z, grid.shape)], axis=-1)
    d_t = np.stack([fp * cos, fp * sin, np.broadcast_to(zp, grid.shape)], axis=-1)
    sigma = np.full(grid.nk - 1, 4.0 * math.sin(alpha / 2) ** 2)
    iso = IsothermicData(np.broadcast_to(f, grid.shape), sigma, (fp ** 2 + zp ** 2) / f ** 2)
    return SampledSurface(grid, points, d_t, dict(meta or {}, layout='ps', alpha=alpha)), iso


def default_sector_range(alpha):
    return (0, max(1, int(round(2.0 * math.pi / alpha)) - 1))


# =============================================================================
# SMOOTH CATENOID
# =============================================================================

def gen_smooth(t_interval=DEFAULT_T_INTERVAL, dt=DEFAULT_DT, sectors=DEFAULT_SECTORS):
    """Profile (cosh t, 0, t) and its surface sampled at `sectors` rotation angles."""
    if int(sectors) != sectors or sectors < 3:
        raise InvalidParameterError(f"sectors must be an integer >= 3, got {sectors}")
    grid = Grid.uniform((0, 0), t_interval, dt)
    t = grid.t
    profile = ProfileCurve.from_xz(SMOOTH, t, np.cosh(t), t, {'family': 'smooth'})
    alpha = 2.0 * math.pi / sectors
    surface, iso = surface_of_revolution_ps(
        np.cosh(t), np.sinh(t), t, alpha, (0, sectors - 1), t,
        {'family': 'smooth', 'sectors': sectors})
    return SmoothCatenoid(profile, surface, iso)


# =============================================================================
# PR AND M_pd,rs: CLOSED FORM AND CHEBYSHEV RECURSION
# =============================================================================

def _signed_range(n_range):
    n = np.arange(int(n_range[0]), int(n_range[1]) + 1)
    if n.size == 0:
        raise InvalidParameterError(f"empty index range {n_range}")
    return n


def pr_step(l, K):
    """arccosh(1 + ℓ²/(1 + cos 2π/K)); K = inf gives the limit arccosh(1 + ℓ²/2)."""
    if not l > 0:
        raise InvalidParameterError(f"ℓ must be positive, got {l}")
    if K < 3:
        raise InvalidParameterError(f"K must be at least 3, got {K}")
    cos_theta = 1.0 if math.isinf(K) else math.cos(2.0 * math.pi / K)
    return math.acosh(1.0 + l * l / (1.0 + cos_theta))


def gen_pr_profile(l, K, n_range=(-5, 5)):
    """Vertices (cosh(|n|·arccosh(1 + ℓ²/(1 + cos 2π/K))), 0, nℓ)."""
    n = _signed_range(n_range)
    step = pr_step(l, K)
    meta = {'family': 'pr', 'l': l, 'K': K}
    return ProfileCurve.from_xz(DISCRETE, n, np.cosh(np.abs(n) * step), n * l, meta)


def rotate_profile(profile, theta, m_range):
    """Discrete net x(n, m) = profile vertex n rotated by mθ about the x3-axis."""
    m = _signed_range(m_range)
    angles = theta * m
    x = profile.x[:, None]
    points = np.stack([x * np.cos(angles), x * np.sin(angles),
                       np.broadcast_to(profile.z[:, None], (x.shape[0], m.size))], axis=-1)
    n_range = (int(profile.params[0]), int(profile.params[-1]))
    return DiscreteNet(n_range, (int(m[0]), int(m[-1])), points, dict(profile.meta, theta=theta))


def gen_pr_net(l, K, n_range=(-5, 5), m_range=None):
    """PR quad net: the profile rotated K times by 2π/K."""
    profile = gen_pr_profile(l, K, n_range)
    return rotate_profile(profile, 2.0 * math.pi / K, m_range or (0, K - 1))


def chebyshev_t(n, z):
    """T_n(z) by T_n = 2z T_{n-1} - T_{n-2}; T_{-n} = T_n."""
    n = abs(int(n))
    z = np.asarray(z, dtype=float)
    prev, cur = np.ones_like(z), z.copy()
    if n == 0:
        return prev
    for _ in range(n - 1):
        prev, cur = cur, 2.0 * z * cur - prev
    return cur


def gen_m_pd_rs(L, n_range=(-5, 5)):
    """Vertices (T_|n|(1 + L²/2), 0, nL), checked against cosh(n·arccosh(1 + L²/2))."""
    if not L > 0:
        raise InvalidParameterError(f"L must be positive, got {L}")
    n = _signed_range(n_range)
    z0 = 1.0 + 0.5 * L * L
    x = np.array([float(chebyshev_t(i, z0)) for i in n])
    closed = np.cosh(np.abs(n) * math.acosh(z0))
    deviation = float(np.max(np.abs(x - closed) / closed))
    logger.debug(f"M_pd,rs L={L}: Chebyshev vs closed form {deviation:.2e}")
    meta = {'family': 'm-pd-rs', 'L': L, 'closed_form_deviation': deviation}
    return ProfileCurve.from_xz(DISCRETE, n, x, n * L, meta)


def profile_surface_pd(profile, t_interval=FULL_TURN, dt=DEFAULT_DT):
    """Semi-discrete pd,rs surface of a discrete profile: each vertex spun into a circle."""
    grid = Grid.uniform((int(profile.params[0]), int(profile.params[-1])), t_interval, dt)
    if grid.nk != len(profile):
        raise SurfaceError("discrete profile parameters must be consecutive integers")
    return surface_of_revolution_pd(profile.x, profile.z, grid.k_range, grid.t, dict(profile.meta))


def gen_m_pd_rs_surface(L, n_range=(-5, 5), t_interval=FULL_TURN, dt=DEFAULT_DT):
    profile = gen_m_pd_rs(L, n_range)
    surface, iso = profile_surface_pd(profile, t_interval, dt)
    return SemiDiscreteCatenoid(profile, surface, None, iso)


# =============================================================================
# BP: CROSS-RATIO FACTORIZING FUNCTION
# =============================================================================

def gen_bp(c1, c2, n_range=(-5, 5), m_range=(0, 6)):
    """x(n, m) = (cosh(c1 n) cos(c2 m), cosh(c1 n) sin(c2 m), n sinh c1)."""
    if c1 == 0:
        raise InvalidParameterError("c1 must be nonzero")
    if not 0 < c2 <= math.pi:
        raise InvalidParameterError(f"c2 must lie in (0, π], got {c2}")
    n = _signed_range(n_range)
    m = _signed_range(m_range)
    if c2 * (m[-1] - m[0]) > 2.0 * math.pi + 1e-12:
        logger.warning(f"BP net with c2={c2} over m={m_range} wraps more than once")
    radius = np.cosh(c1 * n)[:, None]
    angle = c2 * m[None, :]
    points = np.stack([radius * np.cos(angle), radius * np.sin(angle),
                       np.broadcast_to((n * math.sinh(c1))[:, None], (n.size, m.size))], axis=-1)
    meta = {'family': 'bp', 'c1': c1, 'c2': c2, 'theta': c2}
    net = DiscreteNet((int(n[0]), int(n[-1])), (int(m[0]), int(m[-1])), points, meta)
    profile = ProfileCurve.from_xz(DISCRETE, n, np.cosh(c1 * n), n * math.sinh(c1),
                                   {'family': 'bp', 'c1': c1})
    return BPCatenoid(net, profile)


def bp_function(c1, c2, n, m):
    """g(n, m) = -exp(c1 n + i c2 m)."""
    return -np.exp(c1 * np.asarray(n, dtype=float) + 1j * c2 * np.asarray(m, dtype=float))


def bp_edge(g_p, g_q, a):
    """x(q) - x(p) = Re(a/(g_q - g_p)·(1 - g_q g_p, i(1 + g_q g_p), g_q + g_p))."""
    factor = a / (g_q - g_p)
    return np.stack([(factor * (1 - g_q * g_p)).real,
                     (factor * 1j * (1 + g_q * g_p)).real,
                     (factor * (g_q + g_p)).real], axis=-1)


def _bp_increments(c1, c2, n, m):
    """n-edge and m-edge increments on the index box n x m."""
    a_n = 2.0 * math.sinh(c1 / 2) ** 2
    a_m = -2.0 * math.sin(c2 / 2) ** 2
    nn, mm = np.meshgrid(n, m, indexing='ij')
    g = bp_function(c1, c2, nn, mm)
    g_n = bp_function(c1, c2, nn + 1, mm)
    g_m = bp_function(c1, c2, nn, mm + 1)
    return bp_edge(g, g_n, a_n), bp_edge(g, g_m, a_m)


def bp_propagate(c1, c2, n_range=(-5, 5), m_range=(0, 6)):
    """BP net built edge by edge from x(0, 0) = (1, 0, 0).

    The base column n = 0 is walked in m first, then every column is walked
    in n. Index ranges need not contain 0.
    """
    if c1 == 0 or math.isclose(math.sin(c2 / 2), 0.0, abs_tol=1e-15):
        raise InvalidParameterError("bp_propagate needs c1 != 0 and c2 not a multiple of 2π")
    n = _signed_range(n_range)
    m = _signed_range(m_range)
    n_all = np.arange(min(n[0], 0), max(n[-1], 0) + 1)
    m_all = np.arange(min(m[0], 0), max(m[-1], 0) + 1)
    inc_n, inc_m = _bp_increments(c1, c2, n_all, m_all)

    n0 = int(-n_all[0])
    m0 = int(-m_all[0])
    column = np.zeros((m_all.size, 3))
    column[1:] = np.cumsum(inc_m[n0, :-1], axis=0)
    column += np.array([1.0, 0.0, 0.0]) - column[m0]

    walk = np.zeros((n_all.size, m_all.size, 3))
    walk[1:] = np.cumsum(inc_n[:-1], axis=0)
    points = column[None, :, :] + walk - walk[n0:n0 + 1]

    rows = slice(int(n[0] - n_all[0]), int(n[-1] - n_all[0]) + 1)
    cols = slice(int(m[0] - m_all[0]), int(m[-1] - m_all[0]) + 1)
    meta = {'family': 'bp-propagate', 'c1': c1, 'c2': c2, 'theta': c2}
    logger.debug(f"BP propagated over n={tuple(n_range)}, m={tuple(m_range)}")
    return DiscreteNet((int(n[0]), int(n[-1])), (int(m[0]), int(m[-1])), points[rows, cols], meta)


def bp_closure_residual(c1, c2, n_range=(-5, 5), m_range=(0, 6)):
    """max ‖n-then-m minus m-then-n‖ around every elementary quad."""
    n = _signed_range(n_range)[:-1]
    m = _signed_range(m_range)[:-1]
    inc_n, inc_m = _bp_increments(c1, c2, n, m)
    inc_n_up, _ = _bp_increments(c1, c2, n, m + 1)
    _, inc_m_right = _bp_increments(c1, c2, n + 1, m)
    loop = inc_n + inc_m_right - inc_m - inc_n_up
    return float(np.max(np.linalg.norm(loop, axis=-1), initial=0.0))


# =============================================================================
# MW_pd,rs: DIFFERENCE SYSTEM
# =============================================================================

def mw_sequences(params):
    """f(k), c(k) on the params' k-range.

    Forward: f(k+1) = h c f + sqrt((h c f)² + f² + h²), c(k+1) = c + h/(f f₁).
    Backward: f(k) = (f(k+1)² + h²)/f(k+2), c(k) = c(k+1) - h/(f f₁).
    """
    h = params.h
    k_lo, k_hi = params.k_range
    lo, hi = min(k_lo, 0), max(k_hi, 1)
    ks = np.arange(lo, hi + 1)
    f = np.empty(ks.size)
    c = np.empty(ks.size)
    i0 = -lo
    f[i0], c[i0] = params.f0, params.c0
    for i in range(i0, ks.size - 1):
        hcf = h * c[i] * f[i]
        f[i + 1] = hcf + math.sqrt(hcf * hcf + f[i] * f[i] + h * h)
        c[i + 1] = c[i] + h / (f[i] * f[i + 1])
    for i in range(i0 - 1, -1, -1):
        f[i] = (f[i + 1] ** 2 + h * h) / f[i + 2]
        c[i] = c[i + 1] - h / (f[i] * f[i + 1])
    keep = slice(k_lo - lo, k_hi - lo + 1)
    return ks[keep], f[keep], c[keep]


def lemma_residual(f, h):
    """max |f(k+2) f(k) - f(k+1)² - h²| / (f(k+1)² + h²)."""
    f = np.asarray(f, dtype=float)
    if f.size < 3:
        return 0.0
    lhs = f[2:] * f[:-2]
    rhs = f[1:-1] ** 2 + h * h
    return float(np.max(np.abs(lhs - rhs) / rhs))


def gen_mw_pd_rs(params, t_interval=FULL_TURN, dt=DEFAULT_DT):
    """Profile, surface, dual and isothermic data of the MW_pd,rs catenoid.

    Surface x(k, t) = (f cos t, f sin t, hk); dual x*(k, t) =
    (-cos t/f, -sin t/f, c(k)) on the same grid.
    """
    ks, f, c = mw_sequences(params)
    h = params.h
    grid = Grid.uniform(params.k_range, t_interval, dt)
    lemma = lemma_residual(f, h)
    meta = {'family': 'mw-pd-rs', 'f0': params.f0, 'c0': params.c0, 'h': h,
            'lemma_residual': lemma, 'f': f, 'c': c}
    if params.f0 == 1.0 and params.c0 == 0.0:
        closed = np.cosh(ks * math.asinh(h))
        meta['closed_form_deviation'] = float(np.max(np.abs(f - closed) / closed))

    profile = ProfileCurve.from_xz(DISCRETE, ks, f, h * ks, meta)
    surface, iso = surface_of_revolution_pd(f, h * ks, grid.k_range, grid.t, meta)

    cos, sin = np.cos(grid.t), np.sin(grid.t)
    inv = (1.0 / f)[:, None]
    dual_points = np.stack([-inv * cos, -inv * sin, np.broadcast_to(c[:, None], grid.shape)], axis=-1)
    dual_dt = np.stack([inv * sin, -inv * cos, np.zeros(grid.shape)], axis=-1)
    dual = SampledSurface(grid, dual_points, dual_dt, {'family': 'mw-pd-rs-dual', 'h': h})
    logger.debug(f"MW_pd,rs h={h}: lemma residual {lemma:.2e}")
    return SemiDiscreteCatenoid(profile, surface, dual, iso)


# =============================================================================
# MW_ps,rd: PROFILE ODE
# =============================================================================

def solve_profile_ode(t_grid):
    """Integrate f'' = (1 + f'²)/f, f(0) = 1, f'(0) = 0 outward from t = 0.

    Returns (f, f_prime) on t_grid. The equation is f''f - (f')² = 1,
    solved by cosh t.
    """
    t = np.asarray(t_grid, dtype=float)

    def rhs(_, y):
        return [y[1], (1.0 + y[1] * y[1]) / y[0]]

    f = np.empty_like(t)
    fp = np.empty_like(t)
    for mask in (t >= 0, t < 0):
        part = t[mask]
        if part.size == 0:
            continue
        order = np.argsort(np.abs(part))
        targets = part[order]
        end = targets[-1]
        if end == 0.0:
            f[mask], fp[mask] = 1.0, 0.0
            continue
        sol = solve_ivp(rhs, (0.0, end), [1.0, 0.0], method='DOP853',
                        t_eval=targets, rtol=ODE_RTOL, atol=ODE_ATOL)
        if not sol.success:
            raise SurfaceError(f"profile ODE failed: {sol.message}")
        values = np.empty((2, part.size))
        values[:, order] = sol.y
        f[mask], fp[mask] = values
    return f, fp


def gen_mw_ps_rd(alpha, t_interval=DEFAULT_T_INTERVAL, dt=DEFAULT_DT, k_range=None):
    """Profile, surface, dual and isothermic data of the MW_ps,rd catenoid.

    x(k, t) = (cosh t cos αk, cosh t sin αk, t); the dual
    x* = (cos αk/cosh t, sin αk/cosh t, -tanh t) lies on the unit sphere.
    """
    if not 0 < alpha < math.pi:
        raise InvalidParameterError(f"alpha must lie in (0, π), got {alpha}")
    k_range = k_range or default_sector_range(alpha)
    grid = Grid.uniform(k_range, t_interval, dt)
    t = grid.t
    ch, sh = np.cosh(t), np.sinh(t)

    f_ode, fp_ode = solve_profile_ode(t)
    ode_deviation = float(np.max(np.abs(f_ode - ch) / ch))
    f2 = stencil_second_derivative(ch, grid.dt) if grid.nt >= 5 else None
    ode_residual = 0.0 if f2 is None else float(np.max(np.abs(f2[2:-2] * ch[2:-2] - sh[2:-2] ** 2 - 1.0)))
    meta = {'family': 'mw-ps-rd', 'alpha': alpha, 'ode_deviation': ode_deviation,
            'ode_residual': ode_residual}
    logger.debug(f"MW_ps,rd alpha={alpha}: ODE deviation {ode_deviation:.2e}")

    profile = ProfileCurve.from_xz(SMOOTH, t, ch, t, meta)
    surface, iso = surface_of_revolution_ps(ch, sh, t, alpha, k_range, t, meta)

    angles = alpha * grid.ks
    cos, sin = np.cos(angles)[:, None], np.sin(angles)[:, None]
    sech = 1.0 / ch
    dual_points = np.stack([cos * sech, sin * sech, np.broadcast_to(-np.tanh(t), grid.shape)], axis=-1)
    d_sech = -sh * sech ** 2
    dual_dt = np.stack([cos * d_sech, sin * d_sech, np.broadcast_to(-sech ** 2, grid.shape)], axis=-1)
    dual = SampledSurface(grid, dual_points, dual_dt, {'family': 'mw-ps-rd-dual', 'alpha': alpha})
    return SemiDiscreteCatenoid(profile, surface, dual, iso)


# =============================================================================
# M_ps,rd: AREA-CRITICAL PROFILE
# =============================================================================

def neck_weight(K):
    """sqrt((1 + cos 2π/K)/2)."""
    return math.sqrt((1.0 + math.cos(2.0 * math.pi / K)) / 2.0)


def c3_roots(K, r):
    """All positive roots of cosh(c r) = c·sqrt((1 + cos 2π/K)/2), ascending.

    φ(c) = cosh(c r) - c w is convex with its minimum at arcsinh(w/r)/r
    and positive beyond 2w/r², so a geometric scan of (SCAN_START, c_max]
    through the minimum brackets every root.
    """
    if K < 3 or not r > 0:
        raise InvalidParameterError(f"need K >= 3 and r > 0, got K={K}, r={r}")
    w = neck_weight(K)

    def phi(c):
        return math.cosh(c * r) - c * w

    c_min = math.asinh(w / r) / r
    c_max = max(2.0 * w / (r * r), 2.0 * c_min)
    if phi(c_min) > 0:
        raise NoSolutionError(
            f"cosh({r}·c) = c·{w:.6g} has no positive root; scanned ({SCAN_START}, {c_max:.6g}]")
    if phi(c_min) == 0:
        return (c_min,)

    nodes = np.unique(np.append(np.geomspace(SCAN_START, c_max, SCAN_POINTS), c_min))
    values = np.array([phi(c) for c in nodes])
    roots = []
    for a, b, fa, fb in zip(nodes[:-1], nodes[1:], values[:-1], values[1:]):
        if fa == 0.0:
            roots.append(float(a))
        elif fa * fb < 0:
            roots.append(float(bisect(phi, a, b, xtol=ROOT_XTOL)))
    logger.debug(f"c3 roots for K={K}, r={r}: {roots}")
    return tuple(roots)


def solve_c3(params):
    """Root of the neck equation on the requested branch."""
    roots = c3_roots(params.K, params.r)
    return roots[0] if params.branch == SMALLEST else roots[-1]


def solvability_threshold(K):
    """Largest r with a root: tangency at y = c r with y tanh y = 1, r* = w / sinh y."""
    y = bisect(lambda v: v * math.tanh(v) - 1.0, 0.5, 2.0, xtol=ROOT_XTOL)
    return neck_weight(K) / math.sinh(y)


def gen_m_ps_rd(params, t_grid=None, normalized_grid=None, dt=DEFAULT_DT):
    """Raw profile x(t) = cosh(c3 t)/cosh(c3 r) on [-r, r] and its normalized form.

    The normalized profile rescales by cosh(c3 r), giving
    (cosh(T·sqrt(2/(1 + cos 2π/K))), 0, T).
    """
    roots = c3_roots(params.K, params.r)
    c3 = roots[0] if params.branch == SMALLEST else roots[-1]
    r = params.r
    scale = math.cosh(c3 * r)
    t = Grid.uniform((0, 0), (-r, r), dt).t if t_grid is None else np.asarray(t_grid, dtype=float)

    x = np.cosh(c3 * t) / scale
    dt_raw = float(t[1] - t[0]) if t.size > 1 else dt
    el_residual = 0.0
    if t.size >= 5:
        x1 = stencil_derivative(x, dt_raw)
        x2 = stencil_second_derivative(x, dt_raw)
        target = 2.0 / (1.0 + params.cos_theta)
        el = x * x2 - x1 ** 2 - target
        el_residual = float(np.max(np.abs(el[2:-2])))

    half = r * scale
    T = (Grid.uniform((0, 0), (-half, half), dt).t if normalized_grid is None
         else np.asarray(normalized_grid, dtype=float))
    x_norm = np.cosh(c3 * T / scale)
    table_form = np.cosh(T * math.sqrt(2.0 / (1.0 + params.cos_theta)))
    meta = {'family': 'm-ps-rd', 'K': params.K, 'r': r, 'c3': c3, 'branch': params.branch,
            'el_residual': el_residual,
            'normalized_deviation': float(np.max(np.abs(x_norm - table_form) / table_form))}
    logger.debug(f"M_ps,rd K={params.K}, r={r}: c3={c3:.15g}, EL residual {el_residual:.2e}")

    profile = ProfileCurve.from_xz(SMOOTH, t, x, t, meta)
    normalized = ProfileCurve.from_xz(SMOOTH, T, x_norm, T, dict(meta, normalized=True))
    boundary_c1 = np.column_stack([x, np.zeros_like(x), t])
    boundary_c2 = np.column_stack([x * params.cos_theta, x * params.sin_theta, t])
    return MPsRdCatenoid(c3, roots, profile, normalized, boundary_c1, boundary_c2, el_residual)


def gen_m_ps_rd_surface(params, dt=DEFAULT_DT):
    """Semi-discrete ps,rd surface of the normalized M_ps,rd profile, K rotation steps."""
    result = gen_m_ps_rd(params, dt=dt)
    T = result.normalized.params
    scale = math.cosh(result.c3 * params.r)
    rate = result.c3 / scale
    surface, iso = surface_of_revolution_ps(
        np.cosh(rate * T), rate * np.sinh(rate * T), T, params.theta, (0, params.K - 1), T,
        dict(result.normalized.meta))
    return SemiDiscreteCatenoid(result.normalized, surface, None, iso)
