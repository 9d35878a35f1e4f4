"""``plembed`` command-line frontend.

Reports are flat ``key = value`` lines with floats at 17 significant
digits, so identical inputs give byte-identical output.
"""
from __future__ import annotations

import argparse
import hashlib
import re
import sys

import numpy as np

from . import bz, curvature, kuratowski, metric, qc
from .mesh import MeshError, embedded_mesh, load_mesh, save_mesh, topology_report

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_INFEASIBLE, EXIT_NUMERIC = 0, 1, 2, 3, 4

_ANGLE = re.compile(
    r"^\s*(?P<sign>[-+])?\s*(?:(?P<mul>[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*\*\s*)?pi"
    r"(?:\s*/\s*(?P<div>[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?))?\s*$"
)


def parse_angle(text: str) -> float:
    """``pi/K``, ``K*pi``, ``K*pi/M`` or plain radians."""
    m = _ANGLE.match(text)
    if m:
        v = -np.pi if m.group("sign") == "-" else np.pi
        if m.group("mul"):
            v *= float(m.group("mul"))
        if m.group("div"):
            d = float(m.group("div"))
            if d == 0:
                raise argparse.ArgumentTypeError(f"division by zero in angle {text!r}")
            v /= d
        return v
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an angle: {text!r}") from None


def _angle_list(text):
    return [parse_angle(t) for t in text.split(",")]


def _float_list(text):
    try:
        return [float(t) for t in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if v == 0.0:
            return "0"
        return format(v, ".17g")
    if isinstance(value, (list, tuple, np.ndarray)):
        return " ".join(fmt(v) for v in value)
    return str(value)


class Report:
    def __init__(self, argv, digest):
        self.lines = [("command", "plembed " + " ".join(argv)), ("input_sha256", digest)]
        self.warnings = []
        self.status = EXIT_OK

    def add(self, key, value):
        self.lines.append((key, fmt(value)))

    def warn(self, text):
        self.warnings.append(text)

    def text(self):
        out = [f"{k} = {v}" for k, v in self.lines]
        out += [f"warning = {w}" for w in self.warnings]
        out.append(f"exit_status = {self.status}")
        return "\n".join(out) + "\n"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


class Infeasible(Exception):
    pass


def _digest(args, argv):
    h = hashlib.sha256()
    paths = [getattr(args, k) for k in ("mesh", "source_mesh", "target_mesh", "map", "poly_mesh")
             if getattr(args, k, None)]
    if paths:
        for p in paths:
            with open(p, "rb") as fh:
                h.update(fh.read())
    else:
        h.update("\0".join(argv).encode())
    return h.hexdigest()


_MESH_SUFFIXES = (".obj", ".off")


def _route_outputs(args):
    """Resolve aliases; ``--out x.obj`` on a geometry command means the mesh."""
    if getattr(args, "mesh_opt", None):
        args.poly_mesh = args.mesh_opt
    out = getattr(args, "out", None)
    if hasattr(args, "obj_out") and out and out.lower().endswith(_MESH_SUFFIXES) and not args.obj_out:
        args.obj_out, args.out = out, None
    return getattr(args, "report", None) or args.out


def _emit(args, mesh):
    if getattr(args, "obj_out", None):
        save_mesh(mesh, args.obj_out)


# ---------------------------------------------------------------------------
# subcommands


def cmd_validate(args, rep):
    m = load_mesh(args.mesh)
    t = topology_report(m.surface)
    rep.add("n_vertices", t.n_vertices)
    rep.add("n_edges", t.n_edges)
    rep.add("n_faces", t.n_faces)
    rep.add("euler_characteristic", t.euler_characteristic)
    rep.add("boundary_components", t.boundary_component_count)
    rep.add("orientable", t.orientable)
    rep.add("closed", m.surface.is_closed)
    rep.add("components", m.surface.n_components)
    rep.add("valid", True)


def cmd_curvature(args, rep):
    m = load_mesh(args.mesh)
    s = m.surface
    try:
        d = curvature.dihedral_data(m)
    except MeshError as exc:
        rep.warn(f"dihedral data skipped: {exc}")
        d = curvature.angle_defects(s)
    rep.add("euler_characteristic", s.euler_characteristic)
    rep.add("total_defect", d.total_defect)
    rep.add("two_pi_chi", d.two_pi_chi)
    if s.is_closed:
        rep.add("gauss_bonnet_residual", curvature.gauss_bonnet_check(s))
    else:
        rep.warn("surface has boundary; boundary vertices use the pi - angle convention")
        rep.add("gauss_bonnet_residual_with_boundary", d.total_defect - d.two_pi_chi)
    rep.add("min_defect", float(d.defects.min()))
    rep.add("max_defect", float(d.defects.max()))
    if d.dihedral is not None and np.isfinite(d.dihedral).any():
        rep.add("min_dihedral", float(np.nanmin(d.dihedral)))
        rep.add("max_dihedral", float(np.nanmax(d.dihedral)))
        rep.add("total_mean_measure", float(np.nansum(d.mean_measure)))
    if args.totals_only:
        return
    for i, v in enumerate(d.defects):
        rep.add(f"defect.{i}", float(v))
    if d.dihedral is not None:
        for e, (u, v) in enumerate(s.edges):
            if np.isfinite(d.dihedral[e]):
                rep.add(f"dihedral.{u}.{v}", float(d.dihedral[e]))
                rep.add(f"mean_measure.{u}.{v}", float(d.mean_measure[e]))


def cmd_distances(args, rep):
    m = load_mesh(args.mesh)
    f = metric.distance_field(m.surface, args.source, refine=args.refine)
    rep.add("source", f.source)
    rep.add("refine", f.refine)
    if f.unreachable.size:
        rep.warn(f"{f.unreachable.size} vertices unreachable from the source")
    if args.target is not None:
        if not 0 <= args.target < m.n_vertices:
            raise IndexError(f"target vertex {args.target} does not exist")
        rep.add("target", args.target)
        rep.add("distance", float(f.distances[args.target]))
    else:
        rep.add("max_distance", float(f.distances[np.isfinite(f.distances)].max()))
        for i, v in enumerate(f.distances):
            rep.add(f"distance.{i}", float(v))


def _net(args, s):
    return metric.farthest_point_net(s, epsilon=args.epsilon, count=args.count, refine=args.refine)


def cmd_net(args, rep):
    m = load_mesh(args.mesh)
    net = _net(args, m.surface)
    rep.add("refine", net.refine)
    rep.add("size", net.size)
    rep.add("covering_radius", net.covering_radius)
    rep.add("landmarks", net.landmarks)


def cmd_kuratowski(args, rep):
    m = load_mesh(args.mesh)
    net = _net(args, m.surface)
    emb = kuratowski.kuratowski_embed(m.surface, net)
    rep.add("refine", emb.refine)
    rep.add("landmark_count", emb.dim)
    rep.add("covering_radius", net.covering_radius)
    rep.add("landmarks", emb.landmarks)
    rep.add("landmark_isometry_error", kuratowski.verify_isometry_on_landmarks(emb))
    if not args.no_coords:
        for p, row in zip(emb.points, emb.coords):
            rep.add(f"coord.{p}", row)
    if not (args.check_bilipschitz or args.pairs is not None):
        return
    seed = kuratowski.default_seed()
    n_pairs = kuratowski.DEFAULT_PAIRS if args.pairs is None else args.pairs
    br = kuratowski.verify_bilipschitz(emb, n_pairs=n_pairs, seed=seed)
    rep.add("seed", seed)
    rep.add("n_pairs", br.n_pairs)
    rep.add("skipped_pairs", br.skipped)
    rep.add("min_ratio", br.min_ratio)
    rep.add("max_ratio", br.max_ratio)
    rep.add("constant", br.constant)
    rep.add("upper_bound_holds", br.upper_bound_holds)
    rep.add("witness_min", br.witness_min)
    if not br.upper_bound_holds:
        rep.warn("sup-norm distance exceeds the intrinsic distance on some pair")


def _dilatation_fields(rep, r: qc.DilatationReport):
    rep.add("kind", r.kind)
    rep.add("dim", r.dim)
    rep.add("K_I", r.K_I)
    rep.add("K_O_bound" if r.K_O_is_bound else "K_O", r.K_O)
    rep.add("K", r.K)
    rep.add("inequalities_hold", r.satisfies_inequalities())


def cmd_dilatation(args, rep):
    kind = args.kind
    if kind == "folding":
        r = qc.folding_map_dilatation(args.alpha, args.beta, args.dim)
        _dilatation_fields(rep, r)
        if args.numeric:
            worst, _ = qc.folding_numeric_agreement(args.alpha, args.beta, args.dim,
                                                    n_points=args.numeric,
                                                    seed=kuratowski.default_seed())
            rep.add("numeric_samples", args.numeric)
            rep.add("numeric_max_relative_error", worst)
    elif kind == "wedge":
        _dilatation_fields(rep, qc.wedge_coefficients(args.alpha, args.dim))
    elif kind == "dihedral":
        _dilatation_fields(rep, qc.dihedral_wedge_coefficients(args.angles, args.dim))
    else:
        if args.poly_mesh:
            r = qc.polyhedron_dihedral_bound(load_mesh(args.poly_mesh), args.dim)
            _dilatation_fields(rep, r)
            rep.add("witness_edge", r.witness_edge)
        elif args.faces is not None:
            _dilatation_fields(rep, qc.convex_polyhedron_bound(args.faces, args.dim))
        else:
            raise ValueError("polyhedron bound needs --faces or --mesh")


def cmd_flatten(args, rep):
    m = load_mesh(args.mesh)
    lay = bz.flatten_cone_vertex(m.surface, args.vertex, args.lam, args.scale)
    rep.add("vertex", lay.vertex)
    rep.add("theta", lay.theta)
    rep.add("lambda", args.lam)
    rep.add("scale", args.scale)
    rep.add("exponent", args.lam / lay.theta)
    rep.add("image_angle_sum", lay.image_angle_sum)
    rep.add("closes", lay.closes)
    for k in range(len(lay.link) - 1):
        rep.add(f"link.{k}", int(lay.link[k]))
        rep.add(f"rho.{k}", lay.rho[k])
        rep.add(f"phi.{k}", lay.phi[k])
        rep.add(f"r.{k}", lay.r[k])
        rep.add(f"psi.{k}", lay.psi[k])
        rep.add(f"xy.{k}", lay.coords[k])
    if args.obj_out:
        n = len(lay.link) - 1
        if lay.closes:
            pts = lay.coords[:n]
            faces = [[0, 1 + k, 1 + (k + 1) % n] for k in range(n)]
        else:
            pts = lay.coords
            faces = [[0, 1 + k, 2 + k] for k in range(n)]
        pts = np.vstack([np.zeros(2), pts])
        save_mesh(embedded_mesh(np.column_stack([pts, np.zeros(len(pts))]), faces), args.obj_out)


def cmd_subdivide(args, rep):
    m = load_mesh(args.mesh)
    out = bz.subdivide_n2(m, args.n)
    s0, s1 = m.surface, out.surface
    rep.add("n", args.n)
    rep.add("n_vertices", s1.n_vertices)
    rep.add("n_faces", s1.n_faces)
    rep.add("euler_characteristic", s1.euler_characteristic)
    rep.add("euler_characteristic_unchanged", s1.euler_characteristic == s0.euler_characteristic)
    a0, a1 = s0.face_areas().sum(), s1.face_areas().sum()
    rep.add("area_relative_change", abs(a1 - a0) / a0)
    d0 = curvature.vertex_defects(s0)
    d1 = curvature.vertex_defects(s1)
    rep.add("max_defect_change", float(np.abs(d1[: s0.n_vertices] - d0).max()))
    _emit(args, out)


def cmd_fold(args, rep):
    if len(args.big) != 3:
        raise ValueError("--big needs three side lengths")
    inp = bz.BasicConstructionInput.from_ratio(args.big, args.small, alpha_min=args.alpha_min,
                                               shrink=args.shrink)
    seed = kuratowski.default_seed()
    res = bz.fold_basic_construction(inp, args.level, np.deg2rad(args.face_rot_max), seed=seed)
    rep.add("seed", seed)
    rep.add("level", args.level)
    rep.add("ratio", inp.ratio)
    rep.add("pieces", res.pattern.n_pieces)
    for h in res.history:
        rep.add(f"residual.level.{h.level}", h.constraint_residual)
        rep.add(f"iterations.level.{h.level}", h.iterations)
    rep.add("constraint_residual", res.constraint_residual)
    rep.add("max_constraint_error", res.max_constraint_error)
    rep.add("isometry_residual", res.isometry_residual)
    rep.add("seam_gap", res.seam_gap)
    rep.add("apex_height", res.apex_height)
    rep.add("prism_height", res.prism_height)
    rep.add("iterations", res.iterations)
    rep.add("tolerance", res.tolerance)
    rep.add("feasibility", "feasible" if res.feasible else "infeasible")
    _emit(args, res.mesh)
    if not res.feasible:
        raise Infeasible(f"constraint residual {res.constraint_residual:.3e} above {res.tolerance:g}")


def cmd_ripple(args, rep):
    c = bz.build_rippled_cone(args.theta, args.teeth, args.radius, args.delta)
    rep.add("theta", c.theta)
    rep.add("teeth", c.teeth)
    rep.add("radius", c.radius)
    rep.add("delta", c.delta)
    rep.add("beta", c.beta)
    rep.add("elevation", c.elevation)
    rep.add("lift_height", c.lift_height)
    rep.add("apex_angle_sum", c.apex_angle_sum)
    rep.add("apex_angle_error", c.apex_angle_sum - c.theta)
    rep.add("apex_defect", c.apex_defect)
    rep.add("congruence_error", c.congruence_error())
    rep.add("double_gauss_bonnet_residual", c.double_gauss_bonnet())
    rep.add("n_vertices", c.mesh.n_vertices)
    rep.add("n_faces", c.mesh.surface.n_faces)
    _emit(args, c.mesh)


def cmd_shortcheck(args, rep):
    src = load_mesh(args.source_mesh)
    tgt = load_mesh(args.target_mesh)
    vmap = None
    if args.map:
        with open(args.map, encoding="utf-8") as fh:
            vmap = [int(t) for t in fh.read().split()]
    elif src.n_vertices != tgt.n_vertices:
        raise ValueError("meshes differ in vertex count; pass --map")
    r = metric.short_map_check(src.surface, tgt.surface, vmap, refine=args.refine)
    rep.add("refine", r.refine)
    rep.add("n_pairs", r.n_pairs)
    rep.add("constant", r.constant)
    rep.add("witness", r.witness)
    rep.add("is_short", r.is_short)


# ---------------------------------------------------------------------------
# argument parsing


def _common(p, out=True, geometry=False):
    if out:
        p.add_argument("--out", help="write the report here instead of stdout")
    if geometry:
        p.add_argument("--obj-out", dest="obj_out", help="write emitted geometry (.obj or .off)")


def _net_args(p):
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--epsilon", type=float)
    g.add_argument("--count", "--landmarks", dest="count", type=int)
    p.add_argument("--refine", type=int, default=0)


def build_parser():
    ap = _Parser(prog="plembed", description="PL surface geometry toolkit")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("validate", help="parse and validate a mesh")
    p.add_argument("mesh")
    _common(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("curvature", help="angle defects, dihedrals, Gauss-Bonnet")
    p.add_argument("mesh")
    p.add_argument("--totals-only", dest="totals_only", action="store_true",
                   help="omit the per-vertex and per-edge tables")
    _common(p)
    p.set_defaults(func=cmd_curvature)

    p = sub.add_parser("distances", help="intrinsic distances from a vertex")
    p.add_argument("mesh")
    p.add_argument("--source", type=int, required=True)
    p.add_argument("--target", type=int)
    p.add_argument("--refine", type=int, default=0)
    _common(p)
    p.set_defaults(func=cmd_distances)

    p = sub.add_parser("net", help="farthest-point epsilon-net")
    p.add_argument("mesh")
    _net_args(p)
    _common(p)
    p.set_defaults(func=cmd_net)

    p = sub.add_parser("kuratowski", help="landmark embedding and bi-Lipschitz check")
    p.add_argument("mesh")
    _net_args(p)
    p.add_argument("--check-bilipschitz", dest="check_bilipschitz", action="store_true")
    p.add_argument("--pairs", type=int, help="sampled pairs for the check (implies it)")
    p.add_argument("--no-coords", dest="no_coords", action="store_true",
                   help="omit the coordinate table")
    _common(p)
    p.set_defaults(func=cmd_kuratowski)

    p = sub.add_parser("dilatation", help="quasiconformal dilatations")
    dsub = p.add_subparsers(dest="kind", required=True, parser_class=_Parser)
    q = dsub.add_parser("folding")
    q.add_argument("--alpha", type=parse_angle, required=True)
    q.add_argument("--beta", type=parse_angle, required=True)
    q.add_argument("--dim", type=int, default=3)
    q.add_argument("--numeric", type=int, nargs="?", const=100, default=0,
                   help="also compare with finite differences on this many samples (default 100)")
    _common(q)
    q = dsub.add_parser("wedge")
    q.add_argument("--alpha", type=parse_angle, required=True)
    q.add_argument("--dim", type=int, default=3)
    _common(q)
    q = dsub.add_parser("dihedral")
    q.add_argument("--angles", type=_angle_list, required=True)
    q.add_argument("--dim", type=int, default=3)
    _common(q)
    q = dsub.add_parser("polyhedron")
    q.add_argument("poly_mesh", nargs="?", metavar="mesh")
    q.add_argument("--faces", type=int)
    q.add_argument("--mesh", dest="mesh_opt")
    q.add_argument("--dim", type=int, default=3)
    _common(q)
    p.set_defaults(func=cmd_dilatation)

    p = sub.add_parser("flatten", help="standard conformal map at a cone vertex")
    p.add_argument("mesh")
    p.add_argument("--vertex", type=int, required=True)
    p.add_argument("--lambda", dest="lam", type=parse_angle, default=2 * np.pi)
    p.add_argument("--scale", type=float, default=1.0)
    _common(p, geometry=True)
    p.set_defaults(func=cmd_flatten)

    p = sub.add_parser("subdivide", help="n^2 similar subdivision")
    p.add_argument("mesh")
    p.add_argument("--n", type=int, required=True)
    _common(p, geometry=True)
    p.set_defaults(func=cmd_subdivide)

    p = sub.add_parser("fold", help="pleated fold of T into the prism over t")
    p.add_argument("--big", type=_float_list, required=True)
    p.add_argument("--small", type=float, required=True)
    p.add_argument("--level", type=int, default=0)
    p.add_argument("--face-rot-max", dest="face_rot_max", type=float, default=0.0,
                   help="bound on lateral-face rotations, degrees")
    p.add_argument("--alpha-min", dest="alpha_min", type=parse_angle)
    p.add_argument("--shrink", type=float)
    p.add_argument("--report", help="write the report here")
    _common(p, geometry=True)
    p.set_defaults(func=cmd_fold)

    p = sub.add_parser("ripple", help="cogwheel realisation of a large cone angle")
    p.add_argument("--theta", type=parse_angle, required=True)
    p.add_argument("--teeth", type=int, required=True)
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--delta", type=float, default=0.25)
    _common(p, geometry=True)
    p.set_defaults(func=cmd_ripple)

    p = sub.add_parser("shortcheck", help="shortness constant of a vertex map")
    p.add_argument("source_mesh", metavar="source")
    p.add_argument("target_mesh", metavar="target")
    p.add_argument("--map", help="file with the image vertex of every source vertex")
    p.add_argument("--refine", type=int, default=0)
    _common(p)
    p.set_defaults(func=cmd_shortcheck)
    return ap


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    dest = _route_outputs(args)
    try:
        rep = Report(argv, _digest(args, argv))
    except OSError as exc:
        print(f"plembed: {exc}", file=sys.stderr)
        return EXIT_INVALID
    try:
        with np.errstate(invalid="raise", divide="raise", over="raise"):
            args.func(args, rep)
    except Infeasible as exc:
        rep.status = EXIT_INFEASIBLE
        rep.warn(str(exc))
    except (FloatingPointError, np.linalg.LinAlgError, ArithmeticError) as exc:
        rep.status = EXIT_NUMERIC
        rep.warn(f"numeric error: {exc}")
    except (MeshError, qc.DilatationError, ValueError, IndexError, OSError) as exc:
        rep.status = EXIT_INVALID
        rep.warn(f"{type(exc).__name__}: {exc}")
    text = rep.text()
    if dest:
        with open(dest, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if rep.status != EXIT_OK:
        print(f"plembed: {rep.warnings[-1]}", file=sys.stderr)
    return rep.status


if __name__ == "__main__":
    sys.exit(main())
