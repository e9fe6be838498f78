"""Tests for the conjugate, circular, isothermic, dual and minimal verifiers."""
import math

import numpy as np
import pytest

from catenoids import MWPdRsParams, gen_bp, gen_mw_pd_rs, gen_mw_ps_rd, gen_pr_net
from core import (
    DegenerateFitError, DiscreteNet, Grid, GridMismatchError, SampledSurface, SingularDataError,
    build_sampled,
)
from invariants import (
    IsothermicData, candidate_iso_from_dual, check_circular, check_conjugate, check_dual,
    check_isothermic, check_minimal, check_net_circular, check_net_conjugate, check_net_isothermic,
    fit_sphere, run_checks,
)


def concentric(radii, t_interval=(0.0, 2.0), shift=None):
    """Circles of the given radii about the x3-axis, corresponding radially."""
    grid = Grid.uniform((0, len(radii) - 1), t_interval, 0.01)
    r = np.asarray(radii, dtype=float)[:, None]
    c, s = np.cos(grid.t), np.sin(grid.t)
    points = np.stack([r * c, r * s, np.zeros(grid.shape)], axis=-1)
    d_t = np.stack([-r * s, r * c, np.zeros(grid.shape)], axis=-1)
    if shift is not None:
        points[1:] += np.asarray(shift, dtype=float)
    return SampledSurface(grid, points, d_t)


def random_rotation(rng):
    q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
    return q if np.linalg.det(q) > 0 else -q


@pytest.fixture(scope='module')
def mw_pd_rs():
    return gen_mw_pd_rs(MWPdRsParams(h=1.0, k_range=(-3, 3)), dt=0.01)


@pytest.fixture(scope='module')
def mw_ps_rd():
    return gen_mw_ps_rd(math.pi / 3, (-2.0, 2.0), 0.01)


# ---- conjugate -------------------------------------------------------------

def test_planar_surface_is_conjugate():
    surface = build_sampled(lambda k, t: (k + t, k * t * t, 0.0), (0, 3), (-1.0, 1.0), 0.05,
                            analytic_dt=lambda k, t: (1.0, 2.0 * k * t, 0.0))
    report = check_conjugate(surface, 1e-12)
    assert report.overall
    assert report['conjugate'].residual < 1e-14


def test_mw_pd_rs_is_conjugate(mw_pd_rs):
    assert check_conjugate(mw_pd_rs.surface, 1e-8).overall


def test_jittered_sphere_is_not_conjugate():
    rng = np.random.default_rng(11)
    grid = Grid.uniform((0, 5), (-1.0, 1.0), 0.1)
    angle = 0.5 * grid.ks[:, None]
    sphere = np.stack([np.cos(grid.t) * np.cos(angle), np.cos(grid.t) * np.sin(angle),
                       np.broadcast_to(np.sin(grid.t), grid.shape)], axis=-1)
    noisy = SampledSurface(grid, sphere + rng.uniform(-0.1, 0.1, sphere.shape))
    report = check_conjugate(noisy, 1e-8)
    assert not report.overall
    assert report['conjugate'].residual > 1e-2


def test_identical_constant_rows_are_degenerate_not_failed():
    surface = build_sampled(lambda k, t: (1.0, 0.0, 0.0), (0, 1), (0.0, 1.0), 0.1)
    report = check_conjugate(surface, 1e-8)
    assert report.overall
    assert len(report.details['conjugate_degenerate']) == surface.grid.nt


# ---- circular --------------------------------------------------------------

def test_concentric_circles_touch_half_gap_circle():
    report = check_circular(concentric([1.0, 2.0]), 1e-10)
    assert report.overall
    assert np.allclose(report.details['circle_s'], 0.5, atol=1e-12)


def test_translated_row_is_not_circular():
    report = check_circular(concentric([1.0, 2.0], shift=(0.3, 0.0, 0.2)), 1e-8)
    assert not report.overall
    assert report['circular_fit'].residual > 1e-2


def test_mw_ps_rd_is_circular(mw_ps_rd):
    assert check_circular(mw_ps_rd.surface, 1e-8).overall


def test_zero_tangent_names_sample():
    grid = Grid.uniform((0, 1), (0.0, 1.0), 0.25)
    points = np.zeros(grid.shape + (3,))
    points[1] = 1.0
    with pytest.raises(SingularDataError, match=r"k=0, j=0"):
        check_circular(SampledSurface(grid, points, np.zeros(grid.shape + (3,))))


# ---- isothermic ------------------------------------------------------------

def test_catalogued_isothermic_data_pass(mw_pd_rs, mw_ps_rd):
    assert check_isothermic(mw_pd_rs.surface, mw_pd_rs.iso, 1e-8).overall
    assert check_isothermic(mw_ps_rd.surface, mw_ps_rd.iso, 1e-8).overall


def test_doubled_sigma_fails_with_half_residual(mw_ps_rd):
    bad = mw_ps_rd.iso.with_sigma(2.0 * mw_ps_rd.iso.sigma)
    report = check_isothermic(mw_ps_rd.surface, bad, 1e-8)
    assert not report.overall
    assert report['isothermic_edge'].residual == pytest.approx(0.5, rel=1e-9)
    assert report['isothermic_tangent'].passed


def test_isothermic_residual_uses_the_larger_side(mw_ps_rd):
    report = check_isothermic(mw_ps_rd.surface, mw_ps_rd.iso.with_sigma(10.0 * mw_ps_rd.iso.sigma), 1e-8)
    assert report['isothermic_edge'].residual == pytest.approx(0.9, rel=1e-9)


def test_isothermic_grid_mismatch(mw_pd_rs, mw_ps_rd):
    with pytest.raises(GridMismatchError):
        check_isothermic(mw_pd_rs.surface, mw_ps_rd.iso)


def test_isothermic_data_must_be_positive():
    with pytest.raises(SingularDataError):
        IsothermicData(np.ones((2, 3)), [0.0], np.ones(3))
    grid = Grid.uniform((0, 2), (0.0, 1.0), 0.5)
    data = IsothermicData.sample(lambda k, t: 1.0 + k + t, lambda k: 2.0, lambda t: 1.0, grid)
    assert data.shape == grid.shape
    assert np.all(data.sigma == 2.0)


# ---- dual ------------------------------------------------------------------

def test_constant_surfaces_are_dual():
    surface = build_sampled(lambda k, t: (1.0, 2.0, 3.0), (0, 2), (0.0, 1.0), 0.1)
    assert check_dual(surface, surface, np.full(surface.grid.shape, 3.0), 1e-12).overall


def test_mw_pd_rs_dual_pair(mw_pd_rs):
    assert check_dual(mw_pd_rs.surface, mw_pd_rs.dual, mw_pd_rs.iso, 1e-9).overall


def test_surface_is_not_its_own_dual(mw_pd_rs):
    report = check_dual(mw_pd_rs.surface, mw_pd_rs.surface, mw_pd_rs.iso, 1e-8)
    assert not report.overall
    assert report['dual_tangent'].residual >= 1.0


def test_candidate_iso_from_dual_recovers_catalogue(mw_ps_rd):
    iso = candidate_iso_from_dual(mw_ps_rd.surface, mw_ps_rd.dual)
    assert np.allclose(iso.nu, mw_ps_rd.iso.nu, rtol=1e-12)
    report = run_checks(mw_ps_rd.surface, ['conjugate', 'isothermic', 'dual', 'minimal'],
                        1e-8, dual=mw_ps_rd.dual)
    assert report.overall, report.failed()


# ---- minimal ---------------------------------------------------------------

def test_unit_sphere_fit():
    grid = Grid.uniform((0, 5), (-1.0, 1.0), 0.1)
    angle = 0.4 * grid.ks[:, None]
    points = np.stack([np.cos(grid.t) * np.cos(angle), np.cos(grid.t) * np.sin(angle),
                       np.broadcast_to(np.sin(grid.t), grid.shape)], axis=-1)
    report = check_minimal(SampledSurface(grid, points), 1e-10)
    assert report.overall
    assert np.allclose(report.details['sphere_centre'], 0.0, atol=1e-10)
    assert report.details['sphere_radius'] == pytest.approx(1.0, abs=1e-10)


def test_mw_ps_rd_dual_is_centred_unit_sphere(mw_ps_rd):
    report = check_minimal(mw_ps_rd.dual, 1e-8)
    assert report.overall
    assert np.allclose(report.details['sphere_centre'], 0.0, atol=1e-8)


def test_cylinder_dual_is_not_spherical():
    alpha = math.pi / 6
    grid = Grid.uniform((0, 11), (-2.0, 2.0), 0.05)
    angle = alpha * grid.ks[:, None]
    dual = np.stack([np.broadcast_to(np.cos(angle), grid.shape), np.broadcast_to(np.sin(angle), grid.shape),
                     np.broadcast_to(-grid.t, grid.shape)], axis=-1)
    report = check_minimal(SampledSurface(grid, dual), 1e-8)
    assert not report.overall
    assert report['minimal_sphere'].residual > 1e-2


def test_degenerate_sphere_fit():
    with pytest.raises(DegenerateFitError):
        fit_sphere(np.eye(3))
    planar = np.column_stack([np.random.default_rng(3).normal(size=(20, 2)), np.zeros(20)])
    with pytest.raises(DegenerateFitError):
        fit_sphere(planar)


# ---- rigid motions ---------------------------------------------------------

def test_reports_are_rigid_motion_invariant(mw_pd_rs):
    rng = np.random.default_rng(5)
    rotation = random_rotation(rng)
    shift = rng.normal(size=3)
    x, dual, iso = mw_pd_rs.surface, mw_pd_rs.dual, mw_pd_rs.iso
    moved, moved_dual = x.transformed(rotation, shift), dual.transformed(rotation)
    pairs = [
        (check_conjugate(x), check_conjugate(moved)),
        (check_circular(x), check_circular(moved)),
        (check_isothermic(x, iso), check_isothermic(moved, iso)),
        (check_dual(x, dual, iso), check_dual(moved, moved_dual, iso)),
    ]
    for before, after in pairs:
        assert before.names() == after.names()
        for a, b in zip(before.checks, after.checks):
            assert abs(a.residual - b.residual) <= 1e-12


# ---- fully discrete nets ---------------------------------------------------

def test_bp_net_is_discrete_isothermic():
    net = gen_bp(math.asinh(1.0), math.pi / 3, (-3, 3), (0, 5)).net
    assert check_net_conjugate(net, 1e-12).overall
    assert check_net_circular(net, 1e-12).overall
    assert check_net_isothermic(net, 1e-12).overall


def test_pr_net_is_discrete_isothermic():
    net = gen_pr_net(0.5, 8, (-4, 4))
    assert check_net_isothermic(net, 1e-12).overall
    assert check_net_conjugate(net, 1e-12).overall


def test_jittered_net_fails():
    rng = np.random.default_rng(2)
    net = gen_bp(0.8, math.pi / 4, (-2, 2), (0, 4)).net
    noisy = DiscreteNet(net.n_range, net.m_range, net.points + rng.uniform(-0.05, 0.05, net.points.shape))
    assert not check_net_conjugate(noisy, 1e-8).overall
    assert not check_net_circular(noisy, 1e-8).overall
