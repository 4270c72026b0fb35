"""Command-line interface: ``moutardnet <subcommand> ...``.

Exit codes: 0 success (and passing verification), 1 failing verification
(the report is still written), 2 usage, input or computation errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import netio
from .checks import CHECKS, compare_translated, parse_checks, run_check
from .continuum import convergence_study, propagate_plus_moutard
from .errors import MoutardError
from .laguerre import generate_L_isothermic
from .lattice import set_threads
from .lie import (
    darboux_transform,
    dualize_s_isothermic,
    grid_touching_congruence,
    propagate_s_isothermic,
)
from .moebius import (
    dualize_isothermic,
    extract_moutard_lift,
    generate_isothermic_with_metric,
    isothermic_labels,
    moebius_decode,
    moebius_lift,
    moebius_space,
    propagate_circular_net,
)
from .moutard_core import TNet, moutard_transform, propagate_tnet
from .obj import ObjOptions, write_obj
from .pseudo_euclidean import Space
from .quadric import QuadricSpec, propagate_quadric_tnet, quadric_darboux_transform
from .samples import (
    DEFAULT_SEED,
    isothermic_labels_for,
    isothermic_sample,
    lisothermic_sample,
    quadric_axes,
    smooth_axes,
    tnet_sample,
)
from .spheres import OrientedSphere

DEFAULT_TOL = 1e-9


class UsageError(Exception):
    pass


def _default_tol() -> float:
    env = os.environ.get("MOUTARDNET_TOL")
    if env is None:
        return DEFAULT_TOL
    try:
        return float(env)
    except ValueError:
        raise UsageError(f"MOUTARDNET_TOL={env!r} is not a number") from None


def _floats(text: str, count: int | None = None) -> list[float]:
    try:
        vals = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"expected a comma-separated list of numbers, got {text!r}") from None
    if count is not None and len(vals) != count:
        raise UsageError(f"expected {count} numbers, got {text!r}")
    return vals


def _size(text: str) -> tuple[int, int]:
    vals = [int(x) for x in text.split(",")]
    if len(vals) == 1:
        vals = vals * 2
    if len(vals) != 2 or min(vals) < 2:
        raise UsageError("--size takes n or n1,n2 with n >= 2")
    return vals[0], vals[1]


def _load_json(path):
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def _axes_from(data) -> list[np.ndarray]:
    axes = data["axes"] if isinstance(data, dict) else data
    return [np.asarray(a, dtype=float) for a in axes]


# gen

def cmd_gen(args) -> int:
    n1, n2 = _size(args.size)
    seed = args.seed
    prov = f"gen {args.kind} size={n1},{n2} seed={seed}"
    if args.kind == "isothermic":
        if args.axes:
            axes = _axes_from(_load_json(args.axes))
            prov = f"gen isothermic axes={args.axes}"
        else:
            axes = list(smooth_axes(n1, n2, seed))
        if args.labels:
            consts = _floats(args.labels, len(axes))
            labels = [np.full(len(a) - 1, c) for a, c in zip(axes, consts)]
        else:
            labels = isothermic_labels_for(axes, seed)
        f, s, _ = generate_isothermic_with_metric(axes, labels)
        doc = netio.euclidean_document(f, s=s, labels=isothermic_labels(f, s).values, provenance=prov)
    elif args.kind == "tnet":
        axes, coeffs = tnet_sample(n1, n2, seed)
        net = propagate_tnet(axes, coeffs)
        doc = netio.projective_document(net.vertices, net.coefficients, provenance=prov)
    elif args.kind == "quadric":
        net = propagate_quadric_tnet(quadric_axes(n1, n2, seed), QuadricSpec(Space.euclidean(3), 1.0))
        doc = netio.quadric_document(net.vertices, 1.0, (3, 0), "euclidean", net.coefficients, prov)
    elif args.kind == "lisothermic":
        gauss, labels, offsets = lisothermic_sample(n1, n2, seed)
        doc = netio.plane_document(generate_L_isothermic(gauss, labels, offsets), prov)
    elif args.kind == "sisothermic":
        axes, labels = isothermic_sample(n1, n2, seed)
        f, s, _ = generate_isothermic_with_metric(axes, labels)
        k = args.kappa
        net = propagate_s_isothermic([f[:, 0], f[0, :]], [k * s[:, 0], k * s[0, :]], k)
        doc = netio.sphere_document(net, prov + f" kappa={k}")
    elif args.kind == "touching":
        doc = netio.sphere_document(grid_touching_congruence(n1, n2), prov)
    else:  # pragma: no cover - argparse restricts choices
        raise UsageError(f"unknown kind {args.kind}")
    netio.write_net(doc, args.output)
    print(f"wrote {doc.kind} net {doc.box} to {args.output}")
    return 0


# propagate

def cmd_propagate(args) -> int:
    spec = _load_json(args.input)
    kind = spec.get("kind")
    axes = _axes_from(spec)
    prov = f"propagate {kind} from {args.input}"
    if kind == "tnet":
        coeffs = {tuple(int(k) for k in key.split(",")): np.asarray(v, dtype=float)
                  for key, v in spec["coefficients"].items()}
        net = propagate_tnet(axes, coeffs)
        doc = netio.projective_document(net.vertices, net.coefficients, provenance=prov)
    elif kind == "quadric":
        sig = spec.get("signature", [axes[0].shape[1], 0])
        space = Space.diagonal(sig[0], sig[1])
        net = propagate_quadric_tnet(axes, QuadricSpec(space, float(spec["kappa0"])))
        doc = netio.quadric_document(net.vertices, float(spec["kappa0"]), tuple(sig), "euclidean",
                                     net.coefficients, prov)
    elif kind == "circular":
        f = propagate_circular_net(axes, np.asarray(spec["q"], dtype=float))
        doc = netio.euclidean_document(f, provenance=prov)
    elif kind == "plus":
        y = propagate_plus_moutard(axes, np.asarray(spec["a"], dtype=float))
        y = y[..., None] if y.ndim == 2 else y
        doc = netio.projective_document(y, provenance=prov)
    elif kind == "sisothermic":
        net = propagate_s_isothermic(axes, [np.asarray(r, dtype=float) for r in spec["radii"]],
                                     float(spec.get("kappa", 1.0)))
        doc = netio.sphere_document(net, prov)
    else:
        raise UsageError(f"propagate: unknown kind {kind!r} (tnet, quadric, circular, plus, sisothermic)")
    netio.write_net(doc, args.output)
    print(f"wrote {doc.kind} net {doc.box} to {args.output}")
    return 0


# transform

def cmd_transform(args) -> int:
    doc = netio.read_net(args.input)
    prov = f"transform of {args.input}"
    if doc.kind == "projective":
        if not args.seed_point or not args.b:
            raise UsageError("projective transform needs --seed-point and --b")
        m = len(doc.box)
        b = _floats(args.b, m)
        seed = _floats(args.seed_point, doc.signature[0] + doc.signature[1])
        coeffs = doc.coefficients() or {}
        from .moutard_core import recover_coefficients
        coeffs = coeffs or recover_coefficients(doc.array("vertices"))
        out, data = moutard_transform(TNet(doc.array("vertices"), coeffs), seed, b)
        new = netio.projective_document(out.vertices, out.coefficients, provenance=prov)
    elif doc.kind == "sphere":
        if not args.sphere:
            raise UsageError("sphere transform needs --sphere cx,cy,cz,r")
        c = _floats(args.sphere, 4)
        out, _ = darboux_transform(netio.sphere_congruence(doc), OrientedSphere(np.array(c[:3]), c[3]))
        new = netio.sphere_document(out, prov)
    elif doc.kind == "euclidean":
        if not args.seed_point:
            raise UsageError("isothermic Darboux transform needs --seed-point (and optionally --seed-s)")
        f = doc.array("vertices")
        s = doc.array("s") if "s" in doc.payload else extract_moutard_lift(f, args.tol)[0]
        p = np.array(_floats(args.seed_point, f.shape[-1]))
        spec = QuadricSpec(moebius_space(f.shape[-1]), 0.0)
        out, _ = quadric_darboux_transform(moebius_lift(f, s), moebius_lift(p, args.seed_s), spec)
        fp = moebius_decode(out.vertices)
        sp = 1.0 / out.vertices[..., f.shape[-1]]
        new = netio.euclidean_document(fp, s=sp, provenance=prov)
    else:
        raise UsageError(f"transform does not support {doc.kind!r} documents")
    netio.write_net(new, args.output)
    print(f"wrote transformed {new.kind} net to {args.output}")
    return 0


# dualize

def cmd_dualize(args) -> int:
    doc = netio.read_net(args.input)
    prov = f"dual of {args.input}"
    if doc.kind == "euclidean":
        f = doc.array("vertices")
        s = doc.array("s") if "s" in doc.payload else extract_moutard_lift(f, args.tol)[0]
        fs = dualize_isothermic(f, s, args.tol)
        new = netio.euclidean_document(fs, s=1.0 / s, labels=isothermic_labels(fs, 1.0 / s).values, provenance=prov)
    elif doc.kind == "sphere":
        new = netio.sphere_document(dualize_s_isothermic(netio.sphere_congruence(doc), args.tol), prov)
    else:
        raise UsageError(f"dualize does not support {doc.kind!r} documents")
    out = args.output or str(Path(args.input).with_name(Path(args.input).stem + "_dual.json"))
    netio.write_net(new, out)
    print(f"wrote dual net to {out}")
    return 0


# verify

def cmd_verify(args) -> int:
    doc = netio.read_net(args.input)
    try:
        names = parse_checks(args.checks)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    reports = [run_check(doc, name, args.tol) for name in names]
    if args.against:
        reports.append(compare_translated(doc, netio.read_net(args.against), args.tol))
    passed = all(r.passed for r in reports)
    for r in reports:
        print(r.summary())
    if args.json_report:
        Path(args.json_report).write_text(json.dumps(
            {"input": str(args.input), "passed": passed, "tol": args.tol,
             "checks": [r.to_dict() for r in reports]}, indent=1) + "\n")
    return 0 if passed else 1


# export

def cmd_export(args) -> int:
    objects = []
    seen = {}
    for path in args.input:
        name = Path(path).stem
        seen[name] = seen.get(name, 0) + 1
        if seen[name] > 1:
            name = f"{name}_{seen[name]}"
        objects.append((name, netio.read_net(path)))
    write_obj(objects, args.output, ObjOptions(subdivision=args.subdivision))
    print(f"wrote {len(objects)} object(s) to {args.output}")
    if args.png:
        from .plotting import plot_nets
        nets = [(name, d.array("vertices")) for name, d in objects if d.kind == "euclidean"]
        if nets:
            plot_nets(nets, args.png)
            print(f"wrote figure {args.png}")
    return 0


# limit

def cmd_limit(args) -> int:
    eps = _floats(args.eps)
    target = _floats(args.target, 2)
    try:
        table = convergence_study(args.q, tuple(target), eps, lam=args.lam, form=args.form, threads=args.threads)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    table.write_csv(args.output)
    print(f"fitted order {table.order:.4f}; table written to {args.output}")
    if not args.no_plot:
        from .plotting import plot_convergence
        png = str(Path(args.output).with_suffix(".png"))
        plot_convergence(table, png)
        print(f"wrote figure {png}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="moutardnet", description=__doc__.splitlines()[0])
    p.add_argument("--threads", type=int, default=None, help="cap on certifier worker threads")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED, help=f"seed for randomized data (default {DEFAULT_SEED})")
    p.add_argument("--tol", type=float, default=None, help="tolerance (default $MOUTARDNET_TOL or 1e-9)")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a sample net")
    g.add_argument("kind", choices=["isothermic", "tnet", "quadric", "lisothermic", "sisothermic", "touching"])
    g.add_argument("--axes", help="JSON file with {'axes': [axis1, axis2, ...]} (isothermic)")
    g.add_argument("--labels", help="constant labels per direction, e.g. '1,-1' (isothermic)")
    g.add_argument("--size", default="10", help="n or n1,n2")
    g.add_argument("--kappa", type=float, default=0.1, help="kappa for sisothermic congruences")
    g.add_argument("-o", "--output", required=True)
    g.set_defaults(func=cmd_gen)

    pr = sub.add_parser("propagate", help="propagate a net from Goursat data in a JSON file")
    pr.add_argument("-i", "--input", required=True)
    pr.add_argument("-o", "--output", required=True)
    pr.set_defaults(func=cmd_propagate)

    t = sub.add_parser("transform", help="Moutard / Darboux transform")
    t.add_argument("-i", "--input", required=True)
    t.add_argument("-o", "--output", required=True)
    t.add_argument("--seed-point", help="transformed origin vertex (comma list)")
    t.add_argument("--seed-s", type=float, default=1.0, help="metric value of the seed point (isothermic)")
    t.add_argument("--b", help="constant edge functions b_i on the axes (projective)")
    t.add_argument("--sphere", help="transformed origin sphere cx,cy,cz,r (sphere congruences)")
    t.set_defaults(func=cmd_transform)

    d = sub.add_parser("dualize", help="Christoffel dual of an isothermic net or S-isothermic congruence")
    d.add_argument("-i", "--input", required=True)
    d.add_argument("-o", "--output")
    d.set_defaults(func=cmd_dualize)

    v = sub.add_parser("verify", help="run certifiers")
    v.add_argument("-i", "--input", required=True)
    v.add_argument("--checks", default="tnet", help=f"comma list from: {', '.join(CHECKS)}")
    v.add_argument("--json-report", help="write the verification reports as JSON")
    v.add_argument("--against", help="compare with another document up to translation")
    v.set_defaults(func=cmd_verify)

    e = sub.add_parser("export", help="export nets to Wavefront OBJ")
    e.add_argument("-i", "--input", action="append", required=True, help="net document (repeatable)")
    e.add_argument("-o", "--output", required=True)
    e.add_argument("--subdivision", type=int, default=1, help="icosphere subdivision level for spheres")
    e.add_argument("--png", help="also render a matplotlib figure of Euclidean nets")
    e.set_defaults(func=cmd_export)

    li = sub.add_parser("limit", help="convergence study of the plus-form Moutard scheme (CSV + PNG)")
    li.add_argument("--q", type=float, required=True)
    li.add_argument("--eps", default="0.125,0.0625,0.03125,0.015625")
    li.add_argument("--target", default="1,1")
    li.add_argument("--lam", type=float, default=1.0)
    li.add_argument("--form", choices=["symmetric", "linear"], default="symmetric")
    li.add_argument("--no-plot", action="store_true")
    li.add_argument("-o", "--output", required=True)
    li.set_defaults(func=cmd_limit)
    return p


def run_cli(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.tol is None:
            args.tol = _default_tol()
        if args.threads is not None:
            if args.threads < 1:
                raise UsageError("--threads must be >= 1")
            set_threads(args.threads)
        else:
            args.threads = int(os.environ.get("MOUTARDNET_THREADS", "1"))
        return args.func(args)
    except (UsageError, OSError, KeyError, ValueError, MoutardError) as exc:
        kind = "error" if isinstance(exc, MoutardError) else "usage error"
        print(f"moutardnet: {kind}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
