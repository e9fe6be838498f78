"""
Serialization and the command-line front end.

Formats:
    OBJ                 `v x y z` lines then 1-based `f i j k l` quad lines
    profile CSV         header `param,x1,x2,x3`
    sampled-surface CSV header `k,t,x1,x2,x3`, rows sorted by (k, t)
    report text         one `name residual tolerance PASS|FAIL` line per check

All numbers are written as shortest round-trip decimals with `.` as the
decimal point and LF line endings, so identical input gives identical bytes.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from core import (
    DEFAULT_DT, DISCRETE, SMOOTH, STENCIL_TOL, Grid, InvalidParameterError, NoSolutionError,
    ProfileCurve, SampledSurface, SingularDataError, SurfaceError,
)
from catenoids import (
    FULL_TURN, LARGEST, SMALLEST, MPsRdParams, MWPdRsParams, bp_propagate, gen_bp,
    gen_m_pd_rs_surface, gen_m_ps_rd, gen_m_ps_rd_surface, gen_mw_pd_rs, gen_mw_ps_rd,
    gen_pr_net, gen_pr_profile, gen_smooth, profile_surface_pd,
)
from comparison import DEFAULT_K_GRID, DEFAULT_L_GRID, comparison_report
from invariants import run_checks
from weierstrass import K_FIRST, T_FIRST, HolomorphicSpec, inverse_stereographic, weierstrass_integrate

logger = logging.getLogger(__name__)

# =============================================================================
# CLI CONFIGURATION
# =============================================================================
FAMILIES = ('smooth', 'pr', 'm-pd-rs', 'bp', 'bp-propagate', 'mw-pd-rs', 'mw-ps-rd', 'm-ps-rd', 'weierstrass')
CHECK_NAMES = ('conjugate', 'circular', 'isothermic', 'dual', 'minimal')
G_KINDS = {'linear': 'linear', 'exponential': 'exponential', 'exponential-swapped': 'exponential_swapped'}
SUITES = ('theorem1',)
WRAP_TOL = 1e-9              # a rotation closes when m-steps · angle = 2π to this
EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2


# =============================================================================
# NUMBER FORMATTING
# =============================================================================

def format_number(value):
    """Shortest round-trip decimal; integral values without a fractional part."""
    v = float(value)
    if v == 0.0:
        return '-0' if math.copysign(1.0, v) < 0 else '0'
    if v.is_integer() and abs(v) < 1e16:
        return str(int(v))
    return repr(v)


def _join(values):
    return ','.join(format_number(v) for v in values)


def _write_text(path, text):
    path = Path(path)
    try:
        with path.open('w', encoding='utf-8', newline='\n') as fh:
            fh.write(text)
    except OSError as e:
        raise OSError(f"cannot write {path}: {e.strerror or e}") from e
    logger.debug(f"wrote {path} ({len(text)} bytes)")


def _read_lines(path):
    path = Path(path)
    try:
        with path.open('r', encoding='utf-8') as fh:
            return fh.read().splitlines()
    except OSError as e:
        raise OSError(f"cannot read {path}: {e.strerror or e}") from e


# =============================================================================
# QUAD MESHES
# =============================================================================

@dataclass(frozen=True, eq=False)
class QuadMesh:
    """Vertices and quad faces, faces counter-clockwise seen from outside."""

    vertices: np.ndarray
    faces: np.ndarray

    def __post_init__(self):
        vertices = np.asarray(self.vertices, dtype=float).reshape(-1, 3)
        faces = np.asarray(self.faces, dtype=int).reshape(-1, 4)
        if faces.size and (faces.min() < 0 or faces.max() >= len(vertices)):
            raise SurfaceError("face index out of range")
        for face in faces:
            if len(set(face.tolist())) != 4:
                raise SurfaceError(f"degenerate face {tuple(face)}")
        object.__setattr__(self, 'vertices', vertices)
        object.__setattr__(self, 'faces', faces)

    @classmethod
    def from_grid(cls, points, wrap=False):
        """Mesh a (rows, cols, 3) grid; rows run along the profile, cols around the axis.

        Face (n, m) is (n, m), (n, m+1), (n+1, m+1), (n+1, m); with wrap the
        last column joins back to the first.
        """
        points = np.asarray(points, dtype=float)
        rows, cols = points.shape[:2]
        index = np.arange(rows * cols).reshape(rows, cols)
        right = np.roll(index, -1, axis=1) if wrap else index[:, 1:]
        left = index if wrap else index[:, :-1]
        faces = np.stack([left[:-1], right[:-1], right[1:], left[1:]], axis=-1).reshape(-1, 4)
        return cls(points.reshape(-1, 3), faces)

    @classmethod
    def empty(cls):
        return cls(np.zeros((0, 3)), np.zeros((0, 4), dtype=int))


def _closes(step, count):
    return count >= 3 and abs(step * count - 2.0 * math.pi) <= WRAP_TOL


def mesh_from_net(net):
    theta = net.meta.get('theta')
    wrap = theta is not None and _closes(theta, net.points.shape[1])
    return QuadMesh.from_grid(net.points, wrap)


def mesh_from_surface(surface):
    """Rows of the mesh follow the profile: transpose ps-layout surfaces."""
    if surface.meta.get('layout') == 'ps':
        alpha = surface.meta.get('alpha', 0.0)
        return QuadMesh.from_grid(np.swapaxes(surface.points, 0, 1), _closes(alpha, surface.grid.nk))
    return QuadMesh.from_grid(surface.points)


def obj_text(mesh):
    lines = [f"# quad mesh: {len(mesh.vertices)} vertices, {len(mesh.faces)} faces"]
    lines.extend('v ' + ' '.join(format_number(c) for c in v) for v in mesh.vertices)
    lines.extend('f ' + ' '.join(str(int(i) + 1) for i in f) for f in mesh.faces)
    return '\n'.join(lines) + '\n'


def export_obj(mesh, path):
    _write_text(path, obj_text(mesh))


# =============================================================================
# CSV FORMATS
# =============================================================================

PROFILE_HEADER = 'param,x1,x2,x3'
SURFACE_HEADER = 'k,t,x1,x2,x3'


def profile_csv_text(profile):
    lines = [PROFILE_HEADER]
    lines.extend(_join((u, *p)) for u, p in zip(profile.params, profile.points))
    return '\n'.join(lines) + '\n'


def export_profile_csv(profile, path):
    _write_text(path, profile_csv_text(profile))


def _parse_rows(lines, header, path):
    if not lines or lines[0].strip() != header:
        raise SurfaceError(f"{path}: expected header '{header}'")
    width = header.count(',') + 1
    rows = []
    for number, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        fields = line.split(',')
        if len(fields) != width:
            raise SurfaceError(f"{path}:{number}: expected {width} fields, got {len(fields)}")
        try:
            rows.append([float(v) for v in fields])
        except ValueError as e:
            raise SurfaceError(f"{path}:{number}: {e}") from e
    return np.array(rows, dtype=float).reshape(-1, width)


def import_profile_csv(path, kind=None):
    """Read a profile CSV; kind defaults to discrete when every parameter is an integer."""
    rows = _parse_rows(_read_lines(path), PROFILE_HEADER, path)
    params, points = rows[:, 0], rows[:, 1:]
    if kind is None:
        kind = DISCRETE if params.size and np.all(params == np.round(params)) else SMOOTH
    return ProfileCurve(kind, params, points, {'source': str(path)})


def surface_csv_text(surface):
    lines = [SURFACE_HEADER]
    for k, row in zip(surface.grid.ks, surface.points):
        lines.extend(_join((k, t, *p)) for t, p in zip(surface.grid.t, row))
    return '\n'.join(lines) + '\n'


def export_surface_csv(surface, path):
    _write_text(path, surface_csv_text(surface))


def import_surface_csv(path):
    """Read a sampled-surface CSV; every k must carry the same uniform t-samples."""
    rows = _parse_rows(_read_lines(path), SURFACE_HEADER, path)
    if rows.shape[0] == 0:
        raise SurfaceError(f"{path}: no samples")
    ks = np.unique(rows[:, 0])
    if np.any(ks != np.round(ks)) or np.any(np.diff(ks) != 1):
        raise SurfaceError(f"{path}: k values must be consecutive integers")
    t = rows[rows[:, 0] == ks[0], 1]
    points = []
    for k in ks:
        block = rows[rows[:, 0] == k]
        if block.shape[0] != t.size or np.any(block[:, 1] != t):
            raise SurfaceError(f"{path}: ragged data at k={int(k)}")
        points.append(block[:, 2:])
    grid = Grid((int(ks[0]), int(ks[-1])), t)
    return SampledSurface(grid, np.array(points), None, {'source': str(path)})


def export_surface(surface, path, fmt):
    if fmt == 'obj':
        export_obj(mesh_from_surface(surface), path)
    else:
        export_surface_csv(surface, path)


# =============================================================================
# REPORT TEXT
# =============================================================================

def report_text(report):
    lines = []
    if report.title:
        lines.append(f"# {report.title}")
    for check in report.checks:
        verdict = 'PASS' if check.passed else 'FAIL'
        lines.append(f"{check.name} {format_number(check.residual)} {format_number(check.tolerance)} {verdict}")
    lines.append(f"overall {'PASS' if report.overall else 'FAIL'}")
    return '\n'.join(lines) + '\n'


# =============================================================================
# COMMAND HANDLERS
# =============================================================================

def _infer_format(args, default='obj'):
    if args.format:
        return args.format
    suffix = Path(args.out).suffix.lower()
    return {'.obj': 'obj', '.csv': 'csv'}.get(suffix, default)


def _t_interval(args, default):
    lo = default[0] if args.t_min is None else args.t_min
    hi = default[1] if args.t_max is None else args.t_max
    return (lo, hi)


def _n_range(args, default=(-5, 5)):
    return (default[0] if args.n_min is None else args.n_min,
            default[1] if args.n_max is None else args.n_max)


def _m_range(args, default):
    return (default[0] if args.m_min is None else args.m_min,
            default[1] if args.m_max is None else args.m_max)


def _given(value, default):
    return default if value is None else value


def _dt(args):
    return _given(args.dt, DEFAULT_DT)


def _write_family(args, fmt, profile=None, net=None, surface=None, dual=None):
    """Write the requested view of a generated family."""
    if fmt == 'csv':
        if profile is None:
            fmt = 'surface'
        else:
            export_profile_csv(profile, args.out)
            written = f"profile with {len(profile)} samples"
    if fmt == 'obj':
        mesh = mesh_from_net(net) if net is not None else mesh_from_surface(surface)
        export_obj(mesh, args.out)
        written = f"{len(mesh.vertices)} vertices, {len(mesh.faces)} faces"
    elif fmt == 'surface':
        if surface is None:
            return False, f"{args.family} has no sampled surface to write"
        export_surface_csv(surface, args.out)
        written = f"surface on {surface.grid.nk}x{surface.grid.nt} grid"
    if args.dual_out:
        if dual is None:
            return False, f"{args.family} has no dual surface"
        dual_fmt = 'obj' if Path(args.dual_out).suffix.lower() == '.obj' else 'surface'
        export_surface(dual, args.dual_out, dual_fmt)
    return True, f"wrote {args.out} ({written})"


def handle_gen(args):
    """Generate one family and write it. Returns (success, message)."""
    fmt = _infer_format(args)
    family = args.family
    dt = _dt(args)

    if family == 'smooth':
        result = gen_smooth(_t_interval(args, (-2.0, 2.0)), dt, _given(args.K, 12))
        return _write_family(args, fmt, profile=result.profile, surface=result.surface)

    if family == 'pr':
        l, K = _given(args.l, 1.0), _given(args.K, 6)
        profile = gen_pr_profile(l, K, _n_range(args))
        net = gen_pr_net(l, K, _n_range(args), _m_range(args, (0, K - 1)))
        surface = None
        if fmt == 'surface':
            surface, _ = profile_surface_pd(profile, _t_interval(args, FULL_TURN), dt)
        return _write_family(args, fmt, profile=profile, net=net, surface=surface)

    if family == 'm-pd-rs':
        result = gen_m_pd_rs_surface(_given(args.l, 1.0), _n_range(args), _t_interval(args, FULL_TURN), dt)
        return _write_family(args, fmt, profile=result.profile, surface=result.surface)

    if family in ('bp', 'bp-propagate'):
        c1, c2 = _given(args.c1, math.asinh(1.0)), _given(args.c2, math.pi / 3)
        sectors = int(round(2.0 * math.pi / c2)) if c2 > 0 else 2
        m_range = _m_range(args, (0, max(1, sectors - 1)))
        bp = gen_bp(c1, c2, _n_range(args), m_range)
        net = bp.net if family == 'bp' else bp_propagate(c1, c2, _n_range(args), m_range)
        return _write_family(args, fmt, profile=bp.profile, net=net)

    if family == 'mw-pd-rs':
        params = MWPdRsParams(_given(args.f0, 1.0), _given(args.c0, 0.0), _given(args.h, 1.0), _n_range(args))
        result = gen_mw_pd_rs(params, _t_interval(args, FULL_TURN), dt)
        return _write_family(args, fmt, profile=result.profile, surface=result.surface, dual=result.dual)

    if family == 'mw-ps-rd':
        alpha = _given(args.alpha, math.pi / 3)
        k_range = None if args.n_min is None and args.n_max is None else _n_range(args)
        result = gen_mw_ps_rd(alpha, _t_interval(args, (-2.0, 2.0)), dt, k_range)
        return _write_family(args, fmt, profile=result.profile, surface=result.surface, dual=result.dual)

    if family == 'm-ps-rd':
        params = MPsRdParams(_given(args.K, 5), _given(args.r, 0.2), args.branch)
        if fmt == 'csv':
            return _write_family(args, fmt, profile=gen_m_ps_rd(params, dt=dt).normalized)
        result = gen_m_ps_rd_surface(params, dt)
        return _write_family(args, fmt, profile=result.profile, surface=result.surface)

    # weierstrass
    kind = G_KINDS[args.g]
    if kind == 'linear':
        spec = HolomorphicSpec.linear()
    else:
        maker = HolomorphicSpec.exponential if kind == 'exponential' else HolomorphicSpec.exponential_swapped
        try:
            spec = maker(_given(args.c, 1.0), _given(args.alpha, 1.0), _given(args.beta, 1.0))
        except SingularDataError as e:
            raise InvalidParameterError(str(e)) from e
    grid = Grid.uniform(_n_range(args, (0, 3)), _t_interval(args, (0.0, 1.0)), dt)
    surface = weierstrass_integrate(spec, grid, path=args.path)
    dual = inverse_stereographic(spec, grid)
    return _write_family(args, 'obj' if fmt == 'obj' else 'surface', surface=surface, dual=dual)


def handle_verify(args):
    """Run the requested checks on a sampled-surface CSV. Returns (success, report text)."""
    names = [n.strip() for n in args.checks.split(',') if n.strip()]
    unknown = [n for n in names if n not in CHECK_NAMES]
    if unknown:
        return False, f"unknown checks: {', '.join(unknown)}"
    surface = import_surface_csv(args.file)
    dual = import_surface_csv(args.dual_file) if args.dual_file else None
    report = run_checks(surface, names, args.tol, dual=dual)
    return report.overall, report_text(report)


def _float_list(text):
    return [float(v) for v in text.split(',') if v.strip()]


def handle_compare(args):
    l_grid = _float_list(args.l_grid) if args.l_grid else DEFAULT_L_GRID
    K_grid = [int(v) for v in _float_list(args.K_grid)] if args.K_grid else DEFAULT_K_GRID
    report = comparison_report(l_grid, K_grid)
    return report.overall, report_text(report)


# =============================================================================
# ARGUMENT PARSING
# =============================================================================

def build_parser():
    parser = argparse.ArgumentParser(
        prog='catenoids', description='Semi-discrete and discrete catenoids: generate, verify, compare.')
    parser.add_argument('-v', '--verbose', action='store_true', help='debug logging')
    sub = parser.add_subparsers(dest='command', required=True)

    gen = sub.add_parser('gen', help='generate a catenoid family')
    gen.add_argument('family', choices=FAMILIES)
    for flag in ('--l', '--h', '--f0', '--c0', '--alpha', '--beta', '--c', '--c1', '--c2', '--r',
                 '--t-min', '--t-max', '--dt'):
        gen.add_argument(flag, type=float, default=None)
    for flag in ('--K', '--n-min', '--n-max', '--m-min', '--m-max'):
        gen.add_argument(flag, type=int, default=None)
    gen.add_argument('--branch', choices=(SMALLEST, LARGEST), default=SMALLEST)
    gen.add_argument('--g', choices=tuple(G_KINDS), default='linear')
    gen.add_argument('--path', choices=(T_FIRST, K_FIRST), default=T_FIRST)
    gen.add_argument('--format', choices=('obj', 'csv', 'surface'), default=None)
    gen.add_argument('--out', required=True)
    gen.add_argument('--dual-out', default=None)

    verify = sub.add_parser('verify', help='check a sampled-surface CSV')
    verify.add_argument('file')
    verify.add_argument('--checks', default='conjugate,circular')
    verify.add_argument('--tol', type=float, default=STENCIL_TOL)
    verify.add_argument('--dual-file', default=None)

    compare = sub.add_parser('compare', help='compare the catenoid families')
    compare.add_argument('--suite', choices=SUITES, default='theorem1')
    compare.add_argument('--l-grid', default=None, help='comma-separated ℓ values')
    compare.add_argument('--K-grid', default=None, help='comma-separated K values')
    return parser


HANDLERS = {'gen': handle_gen, 'verify': handle_verify, 'compare': handle_compare}


def cli_main(argv=None):
    """Parse argv and dispatch. Exit codes: 0 pass, 1 failure, 2 usage."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE

    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format='%(levelname)s %(name)s: %(message)s')
    try:
        success, message = HANDLERS[args.command](args)
    except NoSolutionError as e:
        print(f"no solution: {e}", file=sys.stderr)
        return EXIT_FAIL
    except InvalidParameterError as e:
        print(f"invalid parameter: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (SurfaceError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAIL
    print(message, end='' if message.endswith('\n') else '\n')
    return EXIT_OK if success else EXIT_FAIL
