"""Tests for holomorphic data, sphere maps, integration and rotations."""
import cmath
import math

import numpy as np
import pytest

from catenoids import MWPdRsParams, bp_function, gen_mw_pd_rs, gen_mw_ps_rd
from core import Grid, PoleError, SingularDataError, SurfaceError, translation_error
from invariants import IsothermicData, check_dual, check_isothermic, check_minimal
from weierstrass import (
    K_FIRST, T_FIRST, HolomorphicSpec, SU2Element, compatibility_residual, cross_ratio,
    holomorphic_eval, inverse_stereographic, isothermic_ratio_residual, mobius_point,
    mobius_transform, quad_cross_ratios, sphere_points, stereographic, su2_to_so3,
    weierstrass_integrate, weierstrass_report,
)


@pytest.fixture(scope='module')
def unit_box():
    return Grid.uniform((0, 3), (0.0, 1.0), 1e-3)


LINEAR_BOXES = (((1, 3), (0.0, 1.0)), ((-3, -1), (0.0, 1.0)),
                ((1, 3), (-4.0, -3.0)), ((-3, -1), (-4.0, -3.0)))


def box_away_from_pole(el):
    """The box of linear g = k + it values whose centre is farthest from the Möbius pole p̄/q̄.

    Some box centre always lies at least 2√2 from any point, so every box
    edge keeps more than 1.7 clear of the pole.
    """
    if el.q == 0:
        return LINEAR_BOXES[0]
    pole = np.conj(el.p) / np.conj(el.q)
    return max(LINEAR_BOXES, key=lambda box: abs(complex(sum(box[0]) / 2, sum(box[1]) / 2) - pole))


# ---- holomorphic data ------------------------------------------------------

def test_linear_eval():
    assert holomorphic_eval(HolomorphicSpec.linear(), 0, 0.0) == (0j, 1j, 1 + 0j)


def test_exponential_eval():
    g, gp, dg = holomorphic_eval(HolomorphicSpec.exponential(1.0, 1.0, 1.0), 0, 0.0)
    assert g == pytest.approx(1.0)
    assert gp == pytest.approx(1j)
    assert dg == pytest.approx(math.e - 1.0, rel=1e-15)


def test_exponential_rejects_zero_parameters():
    with pytest.raises(SingularDataError):
        HolomorphicSpec.exponential(1.0, 0.0, 1.0)
    with pytest.raises(SingularDataError):
        HolomorphicSpec.exponential(0.0, 1.0, 1.0)


@pytest.mark.parametrize("spec", [
    HolomorphicSpec.linear(),
    HolomorphicSpec.exponential(0.7, -0.4, 1.3),
    HolomorphicSpec.exponential_swapped(1.0, -1.0, 2 * math.pi / 13),
])
def test_catalogued_iso_factorizes(spec):
    grid = Grid.uniform((-2, 2), (-1.0, 1.0), 0.05)
    g, gp, dg = spec.arrays_on(grid)
    iso = spec.iso_on(grid)
    assert np.allclose(np.abs(dg) ** 2, iso.sigma[:, None] * iso.nu[:-1] * iso.nu[1:], rtol=1e-12)
    assert np.allclose(np.abs(gp) ** 2, iso.tau[None, :] * iso.nu ** 2, rtol=1e-12)
    assert isothermic_ratio_residual(spec, grid) < 1e-10


def test_sampled_eval_off_grid():
    grid = Grid.uniform((0, 2), (0.0, 1.0), 0.25)
    spec = HolomorphicSpec.linear().to_sampled(grid)
    assert holomorphic_eval(spec, 1, 0.5) == pytest.approx((1 + 0.5j, 1j, 1 + 0j))
    with pytest.raises(SurfaceError):
        holomorphic_eval(spec, 2, 0.5)
    with pytest.raises(SurfaceError):
        holomorphic_eval(spec, 0, 0.3)


# ---- sphere maps -----------------------------------------------------------

def test_inverse_stereographic_examples():
    assert np.allclose(sphere_points(0j), [0.0, 0.0, -1.0])
    assert np.allclose(sphere_points(1 + 0j), [1.0, 0.0, 0.0])


def test_linear_sphere_surface_is_unit_sphere(unit_box):
    x_star = inverse_stereographic(HolomorphicSpec.linear(), unit_box)
    assert np.allclose(np.linalg.norm(x_star.points, axis=-1), 1.0, atol=1e-14)
    report = check_minimal(x_star, 1e-12)
    assert report.overall
    assert np.allclose(report.details['sphere_centre'], 0.0, atol=1e-12)
    assert report.details['sphere_radius'] == pytest.approx(1.0, abs=1e-12)


def test_stereographic_examples_and_pole():
    assert stereographic([0.0, 0.0, -1.0]) == 0
    assert stereographic([1.0, 0.0, 0.0]) == 1
    with pytest.raises(PoleError):
        stereographic([0.0, 0.0, 1.0])


def test_stereographic_round_trip():
    rng = np.random.default_rng(42)
    g = rng.normal(size=100) + 1j * rng.normal(size=100)
    assert np.max(np.abs(stereographic(sphere_points(g)) - g)) < 1e-12


# ---- integration -----------------------------------------------------------

def test_exponential_swapped_gives_mw_ps_rd():
    alpha = 2 * math.pi / 13
    closed = gen_mw_ps_rd(alpha, (-2.0, 2.0), 1e-3, k_range=(0, 12))
    spec = HolomorphicSpec.exponential_swapped(1.0, -1.0, alpha)
    x = weierstrass_integrate(spec, closed.surface.grid)
    assert translation_error(x.points, closed.surface.points) < 1e-6


def test_exponential_gives_mw_pd_rs():
    h = 1.0
    closed = gen_mw_pd_rs(MWPdRsParams(h=h, k_range=(-3, 3)), dt=1e-3)
    spec = HolomorphicSpec.exponential(-1.0, math.asinh(h), 1.0)
    x = weierstrass_integrate(spec, closed.surface.grid)
    assert translation_error(x.points, closed.surface.points) < 1e-6


def test_base_point_is_respected(unit_box):
    x = weierstrass_integrate(HolomorphicSpec.linear(), unit_box, x0=(1.0, 2.0, 3.0), base_k=2, base_j=500)
    assert np.allclose(x.row(2)[500], [1.0, 2.0, 3.0], atol=0)


def test_path_independence(unit_box):
    spec = HolomorphicSpec.linear()
    a = weierstrass_integrate(spec, unit_box, path=T_FIRST)
    b = weierstrass_integrate(spec, unit_box, path=K_FIRST)
    assert np.max(np.abs(a.points - b.points)) < 1e-8


def test_path_independence_sampled(unit_box):
    spec = HolomorphicSpec.exponential(1.0, 0.3, 1.0).to_sampled(unit_box)
    a = weierstrass_integrate(spec, unit_box, path=T_FIRST, base_k=1)
    b = weierstrass_integrate(spec, unit_box, path=K_FIRST, base_k=1)
    assert np.max(np.abs(a.points - b.points)) < 1e-8


def test_integration_rejects_vanishing_derivative():
    grid = Grid.uniform((0, 1), (0.0, 1.0), 0.25)
    spec = HolomorphicSpec.linear().to_sampled(grid)
    gp = np.array(spec.g_prime)
    gp[1, 2] = 0.0
    broken = HolomorphicSpec.sampled(grid, spec.g, gp, spec.iso)
    with pytest.raises(SingularDataError, match=r"k=1, j=2"):
        weierstrass_integrate(broken, grid)


@pytest.mark.parametrize("spec", [HolomorphicSpec.linear(), HolomorphicSpec.exponential(-1.0, math.asinh(1.0), 1.0)])
def test_compatibility_passes(spec, unit_box):
    assert compatibility_residual(spec, unit_box, 1e-6).overall


def test_corrupted_sigma_breaks_compatibility(unit_box):
    spec = HolomorphicSpec.linear().to_sampled(unit_box)
    iso = spec.iso
    corrupted = IsothermicData(iso.nu, iso.sigma * (1.0 + unit_box.ks[:-1] / 10.0), iso.tau)
    assert not compatibility_residual(spec.with_iso(corrupted), unit_box, 1e-6).overall


def test_enneper_is_isothermic_and_minimal(unit_box):
    spec = HolomorphicSpec.linear()
    x = weierstrass_integrate(spec, unit_box)
    x_star = inverse_stereographic(spec, unit_box)
    assert check_isothermic(x, x.meta['iso'], 1e-8).overall
    assert check_minimal(x_star, 1e-10).overall
    assert check_dual(x, x_star, x.meta['iso'], 1e-8).overall


def test_sphere_surface_isothermic_data(unit_box):
    spec = HolomorphicSpec.exponential(0.5, 0.4, 1.2)
    x_star = inverse_stereographic(spec, unit_box)
    assert check_isothermic(x_star, x_star.meta['iso'], 1e-8).overall


@pytest.mark.parametrize("spec", [HolomorphicSpec.linear(), HolomorphicSpec.exponential(1.0, 0.5, 0.8)])
def test_weierstrass_report_passes(spec, unit_box):
    report = weierstrass_report(spec, unit_box, 1e-8)
    assert report.overall, report.failed()


# ---- rotations -------------------------------------------------------------

def test_su2_examples():
    assert np.array_equal(su2_to_so3(SU2Element(1, 0)), np.eye(3))
    assert np.array_equal(su2_to_so3(SU2Element(0, 1)), np.diag([-1.0, 1.0, -1.0]))
    with pytest.raises(SurfaceError):
        SU2Element(1, 0.1)


def test_random_su2_gives_rotations():
    rng = np.random.default_rng(0)
    for _ in range(100):
        a = su2_to_so3(SU2Element.random(rng))
        assert np.max(np.abs(a.T @ a - np.eye(3))) < 1e-12
        assert np.linalg.det(a) == pytest.approx(1.0, abs=1e-12)


def test_sphere_points_rotate_with_mobius_map():
    rng = np.random.default_rng(9)
    g = rng.normal(size=20) + 1j * rng.normal(size=20)
    el = SU2Element.random(rng)
    rotated = sphere_points(mobius_point(el, g))
    assert np.allclose(rotated, sphere_points(g) @ su2_to_so3(el).T, atol=1e-12)


def test_identity_mobius_keeps_g(unit_box):
    spec = HolomorphicSpec.linear()
    same = mobius_transform(spec, SU2Element(1, 0), unit_box)
    g, _, _ = spec.arrays_on(unit_box)
    assert np.array_equal(same.g, g)


def test_half_turn_equivariance():
    grid = Grid.uniform((1, 3), (0.0, 1.0), 1e-3)
    spec = HolomorphicSpec.linear()
    el = SU2Element(0, 1)
    hat = mobius_transform(spec, el, grid)
    g, _, _ = spec.arrays_on(grid)
    assert np.allclose(hat.g, -1.0 / g, rtol=1e-15)
    x = weierstrass_integrate(spec, grid)
    x_hat = weierstrass_integrate(hat, grid)
    assert translation_error(x_hat.points, x.points @ np.diag([-1.0, 1.0, -1.0])) < 1e-6


def test_random_rotation_equivariance():
    spec = HolomorphicSpec.linear()
    surfaces = {}
    rng = np.random.default_rng(21)
    for _ in range(100):
        el = SU2Element.random(rng)
        a = su2_to_so3(el)
        assert np.max(np.abs(a.T @ a - np.eye(3))) < 1e-12
        assert np.linalg.det(a) == pytest.approx(1.0, abs=1e-12)
        box = box_away_from_pole(el)
        if box not in surfaces:
            grid = Grid.uniform(box[0], box[1], 1e-3)
            surfaces[box] = (grid, weierstrass_integrate(spec, grid))
        grid, x = surfaces[box]
        x_hat = weierstrass_integrate(mobius_transform(spec, el, grid), grid)
        assert translation_error(x_hat.points, x.points @ a.T) < 1e-6


def test_mobius_nu_identity():
    grid = Grid.uniform((1, 3), (0.0, 1.0), 0.01)
    spec = HolomorphicSpec.exponential(0.8, 0.3, 1.1)
    rng = np.random.default_rng(4)
    hat = mobius_transform(spec, SU2Element.random(rng), grid)
    rows = rng.integers(0, grid.nk, 20)
    cols = rng.integers(0, grid.nt, 20)
    ratio = np.abs(hat.g_prime[rows, cols]) ** 2 / hat.iso.nu[rows, cols] ** 2
    assert np.allclose(ratio, hat.iso.tau[cols], rtol=1e-10)


def test_mobius_pole_on_grid():
    grid = Grid.uniform((0, 2), (0.0, 1.0), 0.5)
    with pytest.raises(PoleError):
        mobius_transform(HolomorphicSpec.linear(), SU2Element(0, 1), grid)


# ---- cross ratios ----------------------------------------------------------

def test_cross_ratio_of_square():
    assert cross_ratio(0, 1, 1 + 1j, 1j) == pytest.approx(-1.0)


def test_cross_ratio_coincident_points():
    with pytest.raises(SingularDataError):
        cross_ratio(0, 1, 1, 2)


def test_bp_cross_ratio():
    n, m = np.meshgrid(np.arange(-1, 3), np.arange(0, 3), indexing='ij')
    q = quad_cross_ratios(bp_function(1.0, math.pi / 2, n, m))
    expected = -math.sinh(0.5) ** 2 / math.sin(math.pi / 4) ** 2
    assert q[1, 0] == pytest.approx(expected, rel=1e-12)
    assert np.allclose(q, expected, rtol=1e-12)


def test_cross_ratio_mobius_invariance():
    rng = np.random.default_rng(13)
    z = rng.normal(size=(10, 4)) + 1j * rng.normal(size=(10, 4))
    for _ in range(10):
        el = SU2Element.random(rng)
        w = mobius_point(el, z)
        before = cross_ratio(*z.T)
        after = cross_ratio(*w.T)
        assert np.max(np.abs(after - before) / np.abs(before)) < 1e-12


def test_cmath_consistency_of_closed_form():
    spec = HolomorphicSpec.exponential(2.0, 0.5, 0.25)
    g, _, _ = holomorphic_eval(spec, 2, 3.0)
    assert g == pytest.approx(2.0 * cmath.exp(1.0 + 0.75j))
