"""
Comparison of the catenoid families after normalization.

Covers the area functional of a polygonal piece and its first variation,
scaled-cosh fits of profile curves, sup-distances between profiles, and
a report that checks how the seven families relate: which coincide, which
converge (and at what observed rate), and which stay apart.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

from core import (
    DEFAULT_DT, Check, CheckReport, NotCoshError, PerturbationError, ProfileRangeError,
    stencil_derivative,
)
from catenoids import (
    MPsRdParams, MWPdRsParams, gen_bp, gen_m_pd_rs, gen_m_ps_rd, gen_mw_pd_rs, gen_mw_ps_rd,
    gen_pr_profile, gen_smooth,
)

logger = logging.getLogger(__name__)

# =============================================================================
# COMPARISON CONFIGURATION
# =============================================================================
DEFAULT_L_GRID = tuple(np.linspace(0.05, 3.0, 21))
DEFAULT_K_GRID = (3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 1000, 10 ** 6)
CONVERGENCE_K = (25, 50, 100, 200, 400)
CONVERGENCE_L = 0.5
CONVERGENCE_N = (-10, 10)
EXPECTED_ORDER = 2.0
ORDER_TOL = 0.1
EQUALITY_N = (-6, 6)
EQUALITY_TOL = 1e-14
COSH_FIT_TOL = 1e-10
DISTANCE_FORMULA_TOL = 1e-8
STRICT_TOL = 1e-300          # sign checks: residual is the size of a violation
NECK_R = 0.2
COSH_RISE = 1e-4             # first off-neck sample must rise this much
FIRST_VARIATION_EPS = 1e-5
KEY_DECIMALS = 9


@dataclass(frozen=True)
class CoshFit:
    """x ≈ a·cosh(b·z) with residual max |x_n - a cosh(b z_n)| / x_n."""

    a: float
    b: float
    residual: float


# =============================================================================
# AREA FUNCTIONAL
# =============================================================================

def _uniform_step(params):
    params = np.asarray(params, dtype=float)
    if params.size < 5:
        raise ProfileRangeError(f"{params.size} samples; at least 5 are needed")
    steps = np.diff(params)
    if np.max(np.abs(steps - steps.mean())) > 1e-9 * steps.mean():
        raise ProfileRangeError("profile parameters must be uniformly spaced")
    return float((params[-1] - params[0]) / (params.size - 1))


def _piece_constants(K):
    theta = 0.0 if math.isinf(K) else 2.0 * math.pi / K
    return math.cos(theta), math.sin(theta)


def _require_span(params, r):
    if abs(params[0] + r) > 1e-9 * max(1.0, r) or abs(params[-1] - r) > 1e-9 * max(1.0, r):
        raise ProfileRangeError(f"profile spans [{params[0]}, {params[-1]}], not [-{r}, {r}]")


def _area(x, dt, K):
    c, s = _piece_constants(K)
    x_prime = stencil_derivative(x, dt)
    return float(simpson(x * np.sqrt(2.0 * (1.0 - c) + s * s * x_prime ** 2), dx=dt))


def area_functional(profile, r, K):
    """∫ x·sqrt(2(1 - c) + s²x'²) dt over [-r, r], c = cos 2π/K, s = sin 2π/K.

    Composite Simpson with the 5-point stencil for x'. K may be math.inf.
    """
    dt = _uniform_step(profile.params)
    _require_span(profile.params, r)
    return _area(profile.x, dt, K)


def first_variation(profile, r, K, perturbation, eps=FIRST_VARIATION_EPS):
    """(A(x + ε x̂) - A(x - ε x̂)) / (2ε) for a perturbation pinned at ±r."""
    t = profile.params
    dt = _uniform_step(t)
    _require_span(t, r)
    bump = np.asarray(perturbation(t), dtype=float) * np.ones_like(t)
    if abs(bump[0]) > 1e-12 or abs(bump[-1]) > 1e-12:
        raise PerturbationError(f"perturbation must vanish at ±{r}: got {bump[0]:.3e}, {bump[-1]:.3e}")
    if not np.any(bump):
        return 0.0
    x = profile.x
    return (_area(x + eps * bump, dt, K) - _area(x - eps * bump, dt, K)) / (2.0 * eps)


def basis_perturbations(r):
    """Twenty variations vanishing at ±r: ten sine modes and ten polynomial bumps."""
    basis = []
    for j in range(1, 11):
        basis.append((f"sin{j}", lambda t, j=j: np.sin(j * np.pi * (t + r) / (2.0 * r))))
    for j in range(10):
        basis.append((f"poly{j}", lambda t, j=j: (r * r - t * t) * t ** j))
    return basis


# =============================================================================
# PROFILE GEOMETRY
# =============================================================================

def cosh_fit(profile):
    """Fit x = a·cosh(b·z): a from the neck sample, b from the first sample off it."""
    if len(profile) < 3:
        raise NotCoshError("cosh fit needs at least 3 samples")
    x, z = profile.x, profile.z
    scale = max(1.0, float(np.max(np.abs(z))))
    neck = np.flatnonzero(np.abs(z) <= 1e-12 * scale)
    if neck.size == 0:
        raise NotCoshError("profile has no sample at z = 0")
    a = float(x[neck[0]])
    if not a > 0:
        raise NotCoshError(f"neck value must be positive, got {a}")

    upper = np.flatnonzero(z > 1e-12 * scale)
    if upper.size == 0:
        raise NotCoshError("profile has no sample above the neck")
    first = upper[np.argsort(z[upper])]
    rising = first[x[first] / a - 1.0 > COSH_RISE]
    pick = rising[0] if rising.size else first[-1]
    if x[first[0]] < a:
        raise NotCoshError(f"sample above the neck has x={x[first[0]]} < a={a}")
    b = math.acosh(x[pick] / a) / z[pick]
    residual = float(np.max(np.abs(x - a * np.cosh(b * z)) / x))
    return CoshFit(a, b, residual)


def _keyed(profile, param_range):
    keys = np.round(profile.params, KEY_DECIMALS)
    if param_range is not None:
        lo, hi = param_range
        mask = (profile.params >= lo - 1e-12) & (profile.params <= hi + 1e-12)
    else:
        mask = np.ones(keys.size, dtype=bool)
    return {float(k): p for k, p, keep in zip(keys, profile.points, mask) if keep}


def _shared(p1, p2, param_range):
    a, b = _keyed(p1, param_range), _keyed(p2, param_range)
    common = sorted(set(a) & set(b))
    if not common:
        raise ProfileRangeError("profiles share no parameter values in the requested range")
    return np.array([a[k] for k in common]), np.array([b[k] for k in common])


def profile_sup_distance(p1, p2, param_range=None):
    """max ‖p1(u) - p2(u)‖ over the parameters u both profiles share."""
    a, b = _shared(p1, p2, param_range)
    return float(np.max(np.linalg.norm(a - b, axis=1)))


def relative_sup_distance(p1, p2, param_range=None):
    """sup-distance divided by the largest vertex norm on the shared parameters."""
    a, b = _shared(p1, p2, param_range)
    norm = max(float(np.max(np.linalg.norm(a, axis=1))), float(np.max(np.linalg.norm(b, axis=1))))
    return float(np.max(np.linalg.norm(a - b, axis=1))) / norm


def observed_orders(distances):
    """log2 of successive ratios of distances taken at doubled parameters."""
    d = np.asarray(distances, dtype=float)
    return np.log2(d[:-1] / d[1:])


def family_profiles(l=0.5, K=6, n_range=EQUALITY_N, r=NECK_R, dt=DEFAULT_DT):
    """One normalized profile per family, keyed by family name."""
    return {
        'smooth': gen_smooth((-2.0, 2.0), dt).profile,
        'pr': gen_pr_profile(l, K, n_range),
        'm-pd-rs': gen_m_pd_rs(l, n_range),
        'bp': gen_bp(math.asinh(l), 2.0 * math.pi / K, n_range, (0, 0)).profile,
        'mw-pd-rs': gen_mw_pd_rs(MWPdRsParams(1.0, 0.0, l, tuple(n_range)), dt=0.5).profile,
        'mw-ps-rd': gen_mw_ps_rd(2.0 * math.pi / K, (-2.0, 2.0), dt, (0, 1)).profile,
        'm-ps-rd': gen_m_ps_rd(MPsRdParams(max(int(K), 3), r), dt=dt).normalized,
    }


# =============================================================================
# COMPARISON REPORT
# =============================================================================

def _pr_to_m_orders(l=CONVERGENCE_L, Ks=CONVERGENCE_K, n_range=CONVERGENCE_N):
    limit = gen_m_pd_rs(l, n_range)
    distances = [profile_sup_distance(gen_pr_profile(l, K, n_range), limit) for K in Ks]
    return distances, observed_orders(distances)


def _m_ps_rd_to_smooth_orders(r=NECK_R, Ks=CONVERGENCE_K, dt=DEFAULT_DT):
    window = gen_smooth((-r / 2, r / 2), dt).profile
    distances = []
    for K in Ks:
        normalized = gen_m_ps_rd(MPsRdParams(K, r), normalized_grid=window.params, dt=dt).normalized
        distances.append(profile_sup_distance(normalized, window))
    return distances, observed_orders(distances)


def _pr_to_m_gaps(l_grid, K_grid, n_range=EQUALITY_N):
    gaps = {}
    for l in l_grid:
        limit = gen_m_pd_rs(float(l), n_range)
        for K in K_grid:
            gaps[f'l={l:.4g} K={K}'] = profile_sup_distance(gen_pr_profile(float(l), K, n_range), limit)
    return gaps


def _m_ps_rd_to_smooth_gaps(K_grid, r=NECK_R, dt=DEFAULT_DT):
    window = gen_smooth((-r / 2, r / 2), dt).profile
    gaps = {}
    for K in K_grid:
        normalized = gen_m_ps_rd(MPsRdParams(K, r), normalized_grid=window.params, dt=dt).normalized
        gaps[f'K={K}'] = profile_sup_distance(normalized, window)
    return gaps


def comparison_report(l_grid=DEFAULT_L_GRID, K_grid=DEFAULT_K_GRID, dt=DEFAULT_DT):
    """Check how the seven normalized catenoid families relate.

    Checks, in order:
        pr_to_m_order            PR profiles converge to M_pd,rs at order 2 in 1/K
        pr_to_m_grid_order       the same order, finest pair, for every ℓ on the ℓ-grid
        pr_never_equals_m        PR and M_pd,rs differ for every (ℓ, K) on the grids
        bp_equals_mw_pd_rs       BP and MW_pd,rs profiles coincide
        separation_margin        1 + ℓ²/2 > sqrt(1 + ℓ²) on the ℓ-grid
        separation_distance      the n = 1 BP/M_pd,rs gap equals that margin
        sign_obstruction         (1 - 2/(1+c))ℓ² < 0 < ℓ⁴/(1+c)² on both grids
        smooth_equals_mw_ps_rd   smooth and MW_ps,rd profiles coincide
        m_ps_rd_to_smooth_order  normalized M_ps,rd converges to smooth at order 2
        m_ps_rd_never_smooth     normalized M_ps,rd differs from smooth for every K on the K-grid
        cosh_fit                 every family lies on a scaled cosh graph
    """
    l_grid = np.asarray(l_grid, dtype=float)
    if l_grid.size == 0 or len(K_grid) == 0:
        raise ProfileRangeError("comparison grids must be nonempty")
    for K in K_grid:
        if K < 3:
            raise ProfileRangeError(f"K-grid entries must be >= 3, got {K}")
    checks = []
    details = {}

    distances, orders = _pr_to_m_orders()
    checks.append(Check('pr_to_m_order', float(np.max(np.abs(orders - EXPECTED_ORDER))), ORDER_TOL))
    details['pr_to_m_distances'] = distances
    details['pr_to_m_orders'] = orders.tolist()

    grid_orders = {}
    for l in l_grid:
        _, finest = _pr_to_m_orders(float(l), CONVERGENCE_K[-2:])
        grid_orders[f'l={l:.4g}'] = float(finest[0])
    worst = max(abs(order - EXPECTED_ORDER) for order in grid_orders.values())
    checks.append(Check('pr_to_m_grid_order', worst, ORDER_TOL))
    details['pr_to_m_grid_orders'] = grid_orders

    gaps = _pr_to_m_gaps(l_grid, K_grid)
    checks.append(Check('pr_never_equals_m', float(sum(gap <= 0.0 for gap in gaps.values())), STRICT_TOL))
    details['pr_to_m_gaps'] = gaps

    worst = 0.0
    for l in l_grid:
        bp = gen_bp(math.asinh(l), math.pi / 3, EQUALITY_N, (0, 0)).profile
        mw = gen_mw_pd_rs(MWPdRsParams(1.0, 0.0, float(l), EQUALITY_N), dt=0.5).profile
        worst = max(worst, relative_sup_distance(bp, mw))
    checks.append(Check('bp_equals_mw_pd_rs', worst, EQUALITY_TOL))

    margins = 1.0 + l_grid ** 2 / 2 - np.sqrt(1.0 + l_grid ** 2)
    checks.append(Check('separation_margin', float(max(0.0, -margins.min())), STRICT_TOL))
    details['separation_min_margin'] = float(margins.min())
    gaps = []
    for l, margin in zip(l_grid, margins):
        bp = gen_bp(math.asinh(l), math.pi / 3, (0, 1), (0, 0)).profile
        m = gen_m_pd_rs(float(l), (0, 1))
        gaps.append(abs(profile_sup_distance(bp, m, (1, 1)) - margin) / margin)
    checks.append(Check('separation_distance', float(max(gaps)), DISTANCE_FORMULA_TOL))

    violation = 0.0
    for K in K_grid:
        c =math.cos(2.0 * math.pi / K)
        lhs = (1.0 - 2.0 / (1.0 + c)) * l_grid ** 2
        rhs = l_grid ** 4 / (1.0 + c) ** 2
        violation = max(violation, float(max(0.0, lhs.max())), float(max(0.0, -rhs.min())))
        if not (lhs < 0).all():
            violation = max(violation, 1.0)
    checks.append(Check('sign_obstruction', violation, STRICT_TOL))

    smooth = gen_smooth((-2.0, 2.0), dt).profile
    worst = max(relative_sup_distance(smooth, gen_mw_ps_rd(alpha, (-2.0, 2.0), dt, (0, 1)).profile)
                for alpha in (math.pi / 3, math.pi / 7))
    checks.append(Check('smooth_equals_mw_ps_rd', worst, EQUALITY_TOL))

    distances, orders = _m_ps_rd_to_smooth_orders(dt=dt)
    checks.append(Check('m_ps_rd_to_smooth_order', float(np.max(np.abs(orders - EXPECTED_ORDER))), ORDER_TOL))
    details['m_ps_rd_to_smooth_distances'] = distances
    details['m_ps_rd_to_smooth_orders'] = orders.tolist()

    gaps = _m_ps_rd_to_smooth_gaps(K_grid, dt=dt)
    checks.append(Check('m_ps_rd_never_smooth', float(sum(gap <= 0.0 for gap in gaps.values())), STRICT_TOL))
    details['m_ps_rd_to_smooth_gaps'] = gaps

    fits = {}
    for name, profile in family_profiles(dt=dt).items():
        fits[name] = cosh_fit(profile).residual
    for l in l_grid:
        for K in K_grid:
            fits[f'pr l={l:.4g} K={K}'] = cosh_fit(gen_pr_profile(float(l), K, EQUALITY_N)).residual
        fits[f'mw-pd-rs l={l:.4g}'] = cosh_fit(
            gen_mw_pd_rs(MWPdRsParams(1.0, 0.0, float(l), EQUALITY_N), dt=0.5).profile).residual
    checks.append(Check('cosh_fit', max(fits.values()), COSH_FIT_TOL))
    details['cosh_fit_residuals'] = fits

    report = CheckReport(tuple(checks), details, 'comparison')
    logger.info(f"comparison report: {'PASS' if report.overall else 'FAIL'}")
    return report
