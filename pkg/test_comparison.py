"""Tests for the area functional, cosh fits, profile distances and the comparison report."""
import math

import numpy as np
import pytest

from catenoids import MPsRdParams, gen_bp, gen_m_pd_rs, gen_m_ps_rd, gen_pr_profile, gen_smooth, pr_step
from comparison import (
    EQUALITY_TOL, _pr_to_m_orders, area_functional, basis_perturbations, comparison_report,
    cosh_fit, family_profiles, first_variation, observed_orders, profile_sup_distance,
    relative_sup_distance,
)
from core import DISCRETE, SMOOTH, Grid, NotCoshError, PerturbationError, ProfileCurve, ProfileRangeError


def flat_profile(r, dt=1e-3, height=1.0):
    t = Grid.uniform((0, 0), (-r, r), dt).t
    return ProfileCurve.from_xz(SMOOTH, t, np.full(t.size, height), t)


@pytest.fixture(scope='module')
def neck_solution():
    return gen_m_ps_rd(MPsRdParams(K=5, r=0.2), dt=2.5e-4)


@pytest.fixture(scope='module')
def report():
    return comparison_report()


# ---- area functional -------------------------------------------------------

def test_area_of_unit_cylinder_piece():
    assert area_functional(flat_profile(1.0), 1.0, 4) == pytest.approx(2.0 * math.sqrt(2.0), rel=1e-12)


def test_area_vanishes_in_the_smooth_limit():
    assert area_functional(flat_profile(1.0), 1.0, math.inf) == 0.0


def test_area_doubles_with_flat_profile():
    assert area_functional(flat_profile(0.5, height=2.0), 0.5, 6) == pytest.approx(
        2.0 * area_functional(flat_profile(0.5), 0.5, 6), rel=1e-12)


def test_area_needs_span_and_uniform_samples():
    with pytest.raises(ProfileRangeError):
        area_functional(flat_profile(0.5), 1.0, 5)
    uneven = ProfileCurve.from_xz(SMOOTH, [-1.0, -0.5, 0.0, 0.1, 0.5, 1.0], np.ones(6), np.zeros(6))
    with pytest.raises(ProfileRangeError):
        area_functional(uneven, 1.0, 5)


# ---- first variation -------------------------------------------------------

def test_solution_is_critical(neck_solution):
    bump = lambda t: np.cos(math.pi * t / 0.4)
    assert abs(first_variation(neck_solution.profile, 0.2, 5, bump)) < 1e-6


def test_flat_profile_is_not_critical():
    bump = lambda t: np.cos(math.pi * t / 0.4)
    assert abs(first_variation(flat_profile(0.2, 2.5e-4), 0.2, 5, bump)) > 1e-3


def test_zero_perturbation_and_unpinned_perturbation(neck_solution):
    assert first_variation(neck_solution.profile, 0.2, 5, lambda t: 0.0 * t) == 0.0
    with pytest.raises(PerturbationError):
        first_variation(neck_solution.profile, 0.2, 5, np.ones_like)


def test_every_basis_perturbation_is_stationary(neck_solution):
    basis = basis_perturbations(0.2)
    assert len(basis) == 20
    for name, bump in basis:
        assert abs(first_variation(neck_solution.profile, 0.2, 5, bump)) < 1e-6, name


# ---- cosh fits -------------------------------------------------------------

def test_cosh_fit_bp():
    fit = cosh_fit(gen_bp(math.asinh(1.0), math.pi / 3, (-5, 5), (0, 0)).profile)
    assert fit.a == pytest.approx(1.0, rel=1e-14)
    assert fit.b == pytest.approx(math.asinh(1.0), rel=1e-12)
    assert fit.residual < 1e-12


def test_cosh_fit_pr():
    fit = cosh_fit(gen_pr_profile(0.5, 6, (-5, 5)))
    assert fit.b == pytest.approx(pr_step(0.5, 6) / 0.5, rel=1e-12)
    assert fit.residual < 1e-12


def test_cosh_fit_smooth_and_scaling():
    profile = gen_smooth((-1.0, 1.0), 0.01).profile
    fit = cosh_fit(profile)
    assert fit.a == pytest.approx(1.0)
    assert fit.b == pytest.approx(1.0, rel=1e-9)
    doubled = cosh_fit(profile.scaled(2.0))
    assert doubled.a == pytest.approx(2.0 * fit.a)
    assert doubled.b == pytest.approx(fit.b / 2.0, rel=1e-12)


def test_cosh_fit_rejections():
    with pytest.raises(NotCoshError):
        cosh_fit(ProfileCurve.from_xz(DISCRETE, [1, 2, 3], [1.0, 2.0, 3.0], [1.0, 2.0, 3.0]))
    with pytest.raises(NotCoshError):
        cosh_fit(ProfileCurve.from_xz(DISCRETE, [-1, 0, 1], [0.5, 1.0, 0.5], [-1.0, 0.0, 1.0]))


def test_every_family_is_a_scaled_cosh():
    for name, profile in family_profiles(dt=0.01).items():
        assert cosh_fit(profile).residual < 1e-10, name


# ---- distances -------------------------------------------------------------

def test_identical_profiles_are_zero_apart():
    profile = gen_m_pd_rs(0.5, (-4, 4))
    assert profile_sup_distance(profile, profile) == 0.0
    assert relative_sup_distance(profile, profile) == 0.0


def test_disjoint_profiles_raise():
    with pytest.raises(ProfileRangeError):
        profile_sup_distance(gen_m_pd_rs(0.5, (0, 2)), gen_m_pd_rs(0.5, (3, 5)))
    with pytest.raises(ProfileRangeError):
        profile_sup_distance(gen_m_pd_rs(0.5, (0, 2)), gen_m_pd_rs(0.5, (0, 2)), (10, 12))


def test_pr_converges_to_m_pd_rs_at_second_order():
    distances, orders = _pr_to_m_orders()
    assert np.all(np.abs(orders - 2.0) <= 0.1)
    assert distances[2] / distances[3] == pytest.approx(4.0, rel=0.05)
    assert observed_orders([4.0, 1.0])[0] == 2.0


def test_bp_and_mw_pd_rs_coincide(report):
    assert report['bp_equals_mw_pd_rs'].residual <= EQUALITY_TOL


def test_separation_margin_at_unit_step():
    bp = gen_bp(math.asinh(1.0), math.pi / 3, (0, 1), (0, 0)).profile
    m = gen_m_pd_rs(1.0, (0, 1))
    assert profile_sup_distance(bp, m, (1, 1)) == pytest.approx(1.5 - math.sqrt(2.0), rel=1e-12)
    assert 1.5 - math.sqrt(2.0) == pytest.approx(0.0858, abs=1e-4)


# ---- report ----------------------------------------------------------------

def test_comparison_report_passes(report):
    assert report.overall, report.failed()
    assert report.names()[0] == 'pr_to_m_order'
    assert report.details['separation_min_margin'] > 0


def test_comparison_report_rejects_empty_grids():
    with pytest.raises(ProfileRangeError):
        comparison_report(l_grid=())


def test_comparison_report_follows_caller_grids():
    report = comparison_report(l_grid=(0.5, 2.0), K_grid=(4, 8))
    assert report.overall, report.failed()
    assert set(report.details['pr_to_m_grid_orders']) == {'l=0.5', 'l=2'}
    assert set(report.details['pr_to_m_gaps']) == {'l=0.5 K=4', 'l=0.5 K=8', 'l=2 K=4', 'l=2 K=8'}
    assert set(report.details['m_ps_rd_to_smooth_gaps']) == {'K=4', 'K=8'}


def test_finite_resolution_never_reaches_the_limit(report):
    assert report['pr_never_equals_m'].passed
    assert report['m_ps_rd_never_smooth'].passed
    assert min(report.details['pr_to_m_gaps'].values()) > 0
    assert min(report.details['m_ps_rd_to_smooth_gaps'].values()) > 0
    assert len(report.details['pr_to_m_gaps']) == 21 * 12


def test_comparison_report_rejects_small_K():
    with pytest.raises(ProfileRangeError):
        comparison_report(K_grid=(2, 4))
