"""
Numerical verifiers for semi-discrete nets: conjugate, circular, isothermic,
dual and minimal. Every verifier returns a CheckReport; a failed property is
a report entry, never an exception.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from core import (
    DEFAULT_TOL, ZERO_LENGTH, Check, CheckReport, DegenerateFitError, DiscreteNet,
    GridMismatchError, SampledSurface, SingularDataError, SurfaceError, edge_arrays, tangents,
)

logger = logging.getLogger(__name__)

# =============================================================================
# VERIFIER CONFIGURATION
# =============================================================================
RANK_RATIO = 1e-12           # below this s2/s1 the circle plane is undetermined
MAX_LISTED_SAMPLES = 50      # degenerate samples listed in report details


# =============================================================================
# ISOTHERMIC DATA
# =============================================================================

@dataclass(frozen=True, eq=False)
class IsothermicData:
    """The factorization ‖Δx‖² = σνν₁, ‖∂x‖² = τν² on a surface grid.

    nu is sampled on the full (nk, nt) grid, sigma once per edge k -> k+1
    (nk - 1 values) and tau once per t-sample.
    """

    nu: np.ndarray
    sigma: np.ndarray
    tau: np.ndarray

    def __post_init__(self):
        nu = np.array(self.nu, dtype=float)
        sigma = np.array(self.sigma, dtype=float).reshape(-1)
        tau = np.array(self.tau, dtype=float).reshape(-1)
        if nu.ndim != 2 or nu.shape[0] - 1 != sigma.size or nu.shape[1] != tau.size:
            raise GridMismatchError(
                f"nu {nu.shape}, sigma ({sigma.size},), tau ({tau.size},) do not describe one grid")
        for name, values in (('nu', nu), ('sigma', sigma), ('tau', tau)):
            if not np.all(np.isfinite(values)) or np.any(values <= 0):
                raise SingularDataError(f"isothermic {name} must be finite and strictly positive")
            values.setflags(write=False)
        object.__setattr__(self, 'nu', nu)
        object.__setattr__(self, 'sigma', sigma)
        object.__setattr__(self, 'tau', tau)

    @classmethod
    def sample(cls, nu_fn, sigma_fn, tau_fn, grid):
        """Evaluate nu_fn(k, t), sigma_fn(k), tau_fn(t) on a grid.

        The callables receive numpy arrays; constants broadcast.
        """
        k, t = np.meshgrid(grid.ks.astype(float), grid.t, indexing='ij')
        nu = np.broadcast_to(np.asarray(nu_fn(k, t), dtype=float), grid.shape)
        sigma = np.broadcast_to(np.asarray(sigma_fn(grid.ks[:-1].astype(float)), dtype=float),
                                (grid.nk - 1,))
        tau = np.broadcast_to(np.asarray(tau_fn(grid.t), dtype=float), (grid.nt,))
        return cls(nu, sigma, tau)

    @property
    def shape(self):
        return self.nu.shape

    def require_grid(self, grid):
        if self.nu.shape != grid.shape:
            raise GridMismatchError(f"isothermic data on {self.nu.shape}, surface grid is {grid.shape}")

    def with_sigma(self, sigma):
        return IsothermicData(self.nu, sigma, self.tau)


# =============================================================================
# HELPERS
# =============================================================================

def _norms(vectors):
    return np.linalg.norm(vectors, axis=-1)


def _zero_mask(vectors):
    lengths = _norms(vectors)
    scale = max(1.0, float(lengths.max(initial=0.0)))
    return lengths <= ZERO_LENGTH * scale


def _sample_labels(surface, mask):
    k0 = surface.grid.k_range[0]
    idx = np.argwhere(mask)[:MAX_LISTED_SAMPLES]
    return [(int(k0 + row), int(j)) for row, j in idx]


def _masked_max(values, keep):
    kept = values[keep]
    return float(kept.max()) if kept.size else 0.0


def _relative_gap(a, b):
    """|a - b| / max(|a|, |b|) per sample, 0 where both vanish."""
    diff = _norms(a - b)
    scale = np.maximum(_norms(a), _norms(b))
    out = np.zeros_like(diff)
    np.divide(diff, scale, out=out, where=scale > 0)
    return out


def _flat_points(obj):
    if isinstance(obj, (SampledSurface, DiscreteNet)):
        return obj.points.reshape(-1, 3)
    return np.asarray(obj, dtype=float).reshape(-1, 3)


def _require_same_grid(x, x_star):
    if not x.grid.same_as(x_star.grid):
        raise GridMismatchError(f"surfaces live on different grids: {x.grid.shape} vs {x_star.grid.shape}")


# =============================================================================
# SEMI-DISCRETE VERIFIERS
# =============================================================================

def check_conjugate(surface, tol=DEFAULT_TOL):
    """∂x, Δx and ∂Δx linearly dependent at every edge sample.

    Residual per sample is s_min / s_max of the matrix [∂x | Δx | ∂Δx],
    0 when a column vanishes. Samples with ∂x = Δx = 0 are degenerate and
    listed in details instead of entering the maximum.
    """
    dx, _, Dx, dDx = edge_arrays(surface)
    zero_dx, zero_Dx, zero_dDx = _zero_mask(dx), _zero_mask(Dx), _zero_mask(dDx)
    degenerate = zero_dx & zero_Dx

    sv = np.linalg.svd(np.stack([dx, Dx, dDx], axis=-1), compute_uv=False)
    residual = np.zeros(sv.shape[:-1])
    np.divide(sv[..., 2], sv[..., 0], out=residual, where=sv[..., 0] > 0)
    residual[zero_dx | zero_Dx | zero_dDx] = 0.0

    if degenerate.any():
        logger.warning(f"check_conjugate: {int(degenerate.sum())} degenerate edge samples excluded")
    value = _masked_max(residual, ~degenerate)
    logger.debug(f"check_conjugate: max residual {value:.3e}")
    return CheckReport(
        (Check('conjugate', value, tol),),
        {'conjugate_degenerate': _sample_labels(surface, degenerate)},
        'conjugate',
    )


def circle_parameters(surface):
    """Per-edge-sample plane residual, in-plane residual, s and degeneracy mask.

    The plane is the least-squares plane through the unit tangents of both
    rows and the unit edge. Inside it, Δx is fitted by i·s·(u + u₁), with
    the plane oriented so that s is the signed radius of the touching circle.
    """
    dx, dx1, Dx, _ = edge_arrays(surface)
    zero_t = _zero_mask(dx) | _zero_mask(dx1)
    if zero_t.any():
        bad = _sample_labels(surface, zero_t)[0]
        raise SingularDataError(f"zero tangent vector at edge sample (k={bad[0]}, j={bad[1]})")

    u = dx / _norms(dx)[..., None]
    u1 = dx1 / _norms(dx1)[..., None]
    edge_len = _norms(Dx)
    degenerate = _zero_mask(Dx)
    safe_len = np.where(degenerate, 1.0, edge_len)
    e = Dx / safe_len[..., None]

    rows = np.stack([u, u1, e], axis=-2)
    _, sv, vt = np.linalg.svd(rows)
    normal = vt[..., 2, :]
    degenerate = degenerate | (sv[..., 1] <= RANK_RATIO * sv[..., 0])
    plane_residual = np.abs(np.einsum('...ij,...j->...i', rows, normal)).max(axis=-1)
    plane_residual[degenerate] = 0.0

    # orient the plane so that normal · (u × Δx) >= 0
    orient = np.cross(u, e)
    weak = _norms(orient) <= 1e-8
    orient[weak] = np.cross(u, u1)[weak]
    flip = np.einsum('...i,...i->...', normal, orient) < 0
    normal[flip] *= -1.0

    e1 = u - np.einsum('...i,...i->...', u, normal)[..., None] * normal
    e1 /= np.maximum(_norms(e1), ZERO_LENGTH)[..., None]
    e2 = np.cross(normal, e1)

    def planar(v):
        return np.einsum('...i,...i->...', v, e1) + 1j * np.einsum('...i,...i->...', v, e2)

    w = 1j * (planar(u) + planar(u1))
    z = planar(Dx)
    w_sq = np.abs(w) ** 2
    s = np.zeros(edge_len.shape)
    np.divide((np.conj(w) * z).real, w_sq, out=s, where=w_sq > 0)
    fit_residual = np.zeros(edge_len.shape)
    np.divide(np.abs(z - s * w), safe_len, out=fit_residual, where=~degenerate)
    fit_residual[degenerate] = 0.0
    return plane_residual, fit_residual, s, degenerate


def check_circular(surface, tol=DEFAULT_TOL):
    """Adjacent curves touch a common circle at every edge sample (planar reduction)."""
    plane_residual, fit_residual, s, degenerate = circle_parameters(surface)
    if degenerate.any():
        logger.warning(f"check_circular: {int(degenerate.sum())} degenerate edge samples excluded")
    a = _masked_max(plane_residual, ~degenerate)
    b = _masked_max(fit_residual, ~degenerate)
    logger.debug(f"check_circular: plane {a:.3e}, in-plane {b:.3e}")
    return CheckReport(
        (Check('circular_plane', a, tol), Check('circular_fit', b, tol)),
        {'circle_s': s, 'circular_degenerate': _sample_labels(surface, degenerate)},
        'circular',
    )


def check_isothermic(surface, data, tol=DEFAULT_TOL):
    """‖Δx‖² = σνν₁ and ‖∂x‖² = τν² with the candidate data, plus circularity.

    Residuals are |a - b| / max(a, b): the larger side is the denominator,
    not ‖Δx‖² or ‖∂x‖² alone, so the residual is symmetric in its two
    sides and stays below 1. Doubling σ gives 1/2, where dividing by ‖Δx‖²
    would give 1.
    """
    data.require_grid(surface.grid)
    d = tangents(surface)
    Dx = surface.points[1:] - surface.points[:-1]
    nu = data.nu

    edge_sq = _norms(Dx) ** 2
    edge_model = data.sigma[:, None] * nu[:-1] * nu[1:]
    keep = ~_zero_mask(Dx)
    r1 = np.abs(edge_sq - edge_model) / np.maximum(edge_sq, edge_model)

    tangent_sq = _norms(d) ** 2
    tangent_model = data.tau[None, :] * nu ** 2
    r2 = np.abs(tangent_sq - tangent_model) / np.maximum(tangent_sq, tangent_model)

    report = CheckReport(
        (Check('isothermic_edge', _masked_max(r1, keep), tol),
         Check('isothermic_tangent', float(r2.max()), tol)),
        {},
        'isothermic',
    )
    return report.merged(check_circular(surface, tol))


def check_dual(x, x_star, nu, tol=DEFAULT_TOL):
    """∂x* = -ν⁻²∂x and Δx* = (νν₁)⁻¹Δx on a shared grid.

    nu may be IsothermicData or a (nk, nt) array.
    """
    _require_same_grid(x, x_star)
    nu = nu.nu if isinstance(nu, IsothermicData) else np.asarray(nu, dtype=float)
    if nu.shape != x.grid.shape:
        raise GridMismatchError(f"nu has shape {nu.shape}, surface grid is {x.grid.shape}")
    if np.any(nu == 0) or not np.all(np.isfinite(nu)):
        raise SingularDataError("nu must be finite and nonzero")

    d, d_star = tangents(x), tangents(x_star)
    r_tangent = _relative_gap(d_star, -d / (nu ** 2)[..., None])
    Dx = x.points[1:] - x.points[:-1]
    Dx_star = x_star.points[1:] - x_star.points[:-1]
    r_edge = _relative_gap(Dx_star, Dx / (nu[:-1] * nu[1:])[..., None])
    logger.debug(f"check_dual: tangent {r_tangent.max():.3e}, edge {r_edge.max():.3e}")
    return CheckReport(
        (Check('dual_tangent', float(r_tangent.max()), tol),
         Check('dual_edge', float(r_edge.max()), tol)),
        {},
        'dual',
    )


def fit_sphere(points):
    """Algebraic least-squares sphere followed by one Gauss-Newton step.

    Returns (centre, radius). Raises DegenerateFitError for fewer than four
    affinely independent points.
    """
    p = _flat_points(points)
    design = np.column_stack([p, np.ones(len(p))])
    if len(p) < 4 or np.linalg.matrix_rank(design) < 4:
        raise DegenerateFitError(f"sphere fit needs 4 affinely independent points, got {len(p)} points")
    # |p|^2 = 2 c.p + d with d = R^2 - |c|^2
    lhs = np.column_stack([2.0 * p, np.ones(len(p))])
    solution, *_ = np.linalg.lstsq(lhs, np.sum(p * p, axis=1), rcond=None)
    centre = solution[:3]
    radius = float(np.sqrt(max(solution[3] + centre @ centre, 0.0)))

    offsets = p - centre
    dist = np.linalg.norm(offsets, axis=1)
    if np.all(dist > 0):
        jac = np.column_stack([-offsets / dist[:, None], -np.ones(len(p))])
        step, *_ = np.linalg.lstsq(jac, -(dist - radius), rcond=None)
        centre = centre + step[:3]
        radius = radius + float(step[3])
    return centre, radius


def check_minimal(x_star, tol=DEFAULT_TOL):
    """The dual x* is inscribed in a sphere: max |‖p - c‖ - R| / R."""
    centre, radius = fit_sphere(x_star)
    p = _flat_points(x_star)
    if radius <= 0:
        raise DegenerateFitError("sphere fit collapsed to zero radius")
    residual = float(np.max(np.abs(np.linalg.norm(p - centre, axis=1) - radius)) / radius)
    logger.debug(f"check_minimal: centre {centre}, radius {radius:.12g}, residual {residual:.3e}")
    return CheckReport(
        (Check('minimal_sphere', residual, tol),),
        {'sphere_centre': centre, 'sphere_radius': radius},
        'minimal',
    )


def candidate_iso_from_dual(x, x_star):
    """Isothermic data suggested by a surface and its dual.

    ν² = ‖∂x‖ / ‖∂x*‖ pointwise; τ and σ are the t- and k-wise means of
    ‖∂x‖²/ν² and ‖Δx‖²/(νν₁).
    """
    _require_same_grid(x, x_star)
    d, d_star = _norms(tangents(x)), _norms(tangents(x_star))
    if np.any(d_star <= ZERO_LENGTH) or np.any(d <= ZERO_LENGTH):
        raise SingularDataError("tangents of x or x* vanish; cannot read off nu")
    nu = np.sqrt(d / d_star)
    tau = np.mean(d ** 2 / nu ** 2, axis=0)
    Dx = _norms(x.points[1:] - x.points[:-1])
    sigma = np.mean(Dx ** 2 / (nu[:-1] * nu[1:]), axis=1)
    return IsothermicData(nu, sigma, tau)


def run_checks(surface, names, tol=DEFAULT_TOL, iso=None, dual=None):
    """Run the named checks (conjugate, circular, isothermic, dual, minimal) and merge."""
    reports = []
    for name in names:
        if name == 'conjugate':
            reports.append(check_conjugate(surface, tol))
        elif name == 'circular':
            reports.append(check_circular(surface, tol))
        elif name == 'isothermic':
            if iso is None:
                if dual is None:
                    raise SurfaceError("isothermic check needs isothermic data or a dual surface")
                iso = candidate_iso_from_dual(surface, dual)
            reports.append(check_isothermic(surface, iso, tol))
        elif name == 'dual':
            if dual is None:
                raise SurfaceError("dual check needs a dual surface")
            nu = iso if iso is not None else candidate_iso_from_dual(surface, dual)
            reports.append(check_dual(surface, dual, nu, tol))
        elif name == 'minimal':
            reports.append(check_minimal(dual if dual is not None else surface, tol))
        else:
            raise SurfaceError(f"unknown check {name!r}")
    if not reports:
        return CheckReport()
    return reports[0].merged(*reports[1:], title=','.join(names))


# =============================================================================
# FULLY DISCRETE NET VERIFIERS
# =============================================================================

def _quads(net):
    p = net.points
    return p[:-1, :-1], p[1:, :-1], p[1:, 1:], p[:-1, 1:]


def _dist(a, b):
    return _norms(a - b)


def check_net_conjugate(net, tol=DEFAULT_TOL):
    """Every elementary quad is planar: |det(b-a, c-a, d-a)| / (|b-a||c-a||d-a|)."""
    a, b, c, d = _quads(net)
    ab, ac, ad = b - a, c - a, d - a
    vol = np.abs(np.einsum('...i,...i->...', ab, np.cross(ac, ad)))
    scale = _norms(ab) * _norms(ac) * _norms(ad)
    residual = np.zeros_like(vol)
    np.divide(vol, scale, out=residual, where=scale > 0)
    return CheckReport((Check('net_conjugate', float(residual.max(initial=0.0)), tol),), {}, 'net_conjugate')


def check_net_circular(net, tol=DEFAULT_TOL):
    """Every quad is concyclic in cyclic order (Ptolemy equality)."""
    a, b, c, d = _quads(net)
    lhs = _dist(a, c) * _dist(b, d)
    rhs = _dist(a, b) * _dist(c, d) + _dist(a, d) * _dist(b, c)
    residual = np.zeros_like(lhs)
    np.divide(np.abs(lhs - rhs), rhs, out=residual, where=rhs > 0)
    return CheckReport((Check('net_circular', float(residual.max(initial=0.0)), tol),), {}, 'net_circular')


def net_cross_ratio_moduli(net):
    """|ab||cd| / (|bc||da|) per elementary quad."""
    a, b, c, d = _quads(net)
    den = _dist(b, c) * _dist(d, a)
    if np.any(den <= ZERO_LENGTH):
        raise SingularDataError("quad with coincident vertices")
    return _dist(a, b) * _dist(c, d) / den


def check_net_isothermic(net, tol=DEFAULT_TOL):
    """Cross-ratio moduli factor as α(n)/β(m), plus the circularity of every quad."""
    cr = net_cross_ratio_moduli(net)
    product = cr * cr[0, 0]
    factored = cr[:, :1] * cr[:1, :]
    residual = float(np.max(np.abs(product - factored) / product)) if cr.size else 0.0
    report = CheckReport((Check('net_factorizing', residual, tol),), {'cross_ratio_moduli': cr}, 'net_isothermic')
    return report.merged(check_net_circular(net, tol))
