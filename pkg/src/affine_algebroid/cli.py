"""Command-line front end.

Subcommands: verify, curvature, geodesic, residuals, affine.
Exit status: 0 all checks pass, 1 a check failed, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import affine_algebra as aff
from . import algebroid as al
from .dynamics import IntegrationError, WorldlineState, integrate, lift_check
from .em_extension import local_second_order
from .field_equation import UNIT_BANNER, einstein_blocks_from, residuals
from .geometry import ChartError, FrameError, SignatureError
from .scenario import Entries, ScenarioError, load_file, parse_text
from .verification import run_suites

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

log = logging.getLogger("affine_algebroid")


class UsageError(Exception):
    pass


def _num(x) -> str:
    return f"{x: .12e}"


def _row(v) -> str:
    return " ".join(_num(x) for x in np.ravel(v))


def _emit(lines, out):
    text = "\n".join(lines) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _point(text) -> np.ndarray:
    try:
        p = np.array([float(s) for s in text.split(",")])
    except ValueError:
        raise UsageError(f"bad point {text!r}; expected t,x,y,z") from None
    if p.size != 4:
        raise UsageError(f"point {text!r} must have 4 coordinates")
    return p


def _header(sc) -> list[str]:
    return [f"# {UNIT_BANNER}"] + [f"# {line}" for line in sc.describe()]


def cmd_verify(args) -> int:
    sc = load_file(args.scenario, args.seed)
    results = run_suites(sc.metric, sc.potential, sc.points, sc.tolerances, sc.triples,
                         sc.seed, sc.h)
    lines = _header(sc)
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        lines.append(f"{r.name:<10} {status}  worst={r.worst:.3e}  tol={r.tolerance:.1e}  "
                     f"at_point={r.worst_index}")
    ok = all(r.passed for r in results)
    lines.append(f"overall {'PASS' if ok else 'FAIL'}")
    _emit(lines, args.out)
    return EXIT_OK if ok else EXIT_FAIL


def curvature_report(sc, p) -> list[str]:
    pack, em = local_second_order(sc.metric, sc.potential, p, sc.h)
    ric = al.ricci_hat_from(pack, em)
    blocks = einstein_blocks_from(pack, em)
    lines = _header(sc)
    lines.append(f"point: {_row(p)}")
    lines.append(f"R: {_num(pack.scalar)}")
    lines.append(f"trFF: {_num(em.trFF)}")
    lines.append(f"R_hat: {_num(al.scalar_hat_from(pack, em))}")
    lines.append("ricci_hat (operator matrix on e0..e3, xi):")
    lines += [f"  {_row(r)}" for r in ric.M]
    lines.append("blocks.barbar:")
    lines += [f"  {_row(r)}" for r in blocks.barbar]
    lines.append(f"blocks.mixed: {_row(blocks.mixed)}")
    lines.append(f"blocks.xixi: {_num(blocks.xixi)}")
    return lines


def cmd_curvature(args) -> int:
    sc = load_file(args.scenario, args.seed)
    p = _point(args.at)
    sc.metric.box.require(p, 2 * sc.h)
    _emit(curvature_report(sc, p), args.out)
    return EXIT_OK


def cmd_geodesic(args) -> int:
    sc = load_file(args.scenario, args.seed)
    x0 = _point(args.at) if args.at else sc.geodesic_x
    u0 = _point(args.u) if args.u else sc.geodesic_u
    if x0 is None or u0 is None:
        raise UsageError("initial state needs --at/--u or geodesic.x/geodesic.u in the scenario")
    if not args.out:
        raise UsageError("geodesic requires --out <file>")
    try:
        traj = integrate(sc.metric, sc.potential, WorldlineState(x0, u0, args.lam), args.step,
                         args.steps, sc.h, normalize=args.normalize or sc.geodesic_normalize)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    traj.write(args.out)
    lines = [f"# {UNIT_BANNER}", f"samples: {len(traj)}", f"lambda: {_num(traj.lam)}",
             f"tau_end: {_num(traj.tau[-1])}", f"max_norm_drift: {traj.max_norm_drift:.3e}"]
    if len(traj) >= 3:
        lines.append(f"lift_violation: {lift_check(traj, sc.metric, sc.potential, sc.h):.3e}")
    if traj.exited:
        lines.append(f"exited_chart: {traj.message}")
    _emit(lines, None)
    return EXIT_OK


def residual_report(sc):
    cols = ["index", "x0", "x1", "x2", "x3", "einstein_max", "einstein_fro", "maxwell_max",
            "maxwell_l2", "scalar", "aggregate_fro", "R", "trFF", "R_hat"]
    lines = _header(sc) + ["\t".join(cols)]
    worst = {"einstein_max": 0.0, "maxwell_max": 0.0, "scalar": 0.0, "aggregate_fro": 0.0}
    for i, p in enumerate(sc.points):
        pack, em = local_second_order(sc.metric, sc.potential, p, sc.h)
        rec = residuals(einstein_blocks_from(pack, em), sc.source_at(i))
        s = rec.summary()
        for k in worst:
            worst[k] = max(worst[k], abs(s[k]))
        vals = [*p, s["einstein_max"], s["einstein_fro"], s["maxwell_max"], s["maxwell_l2"],
                s["scalar"], s["aggregate_fro"], pack.scalar, em.trFF, pack.scalar + em.trFF]
        lines.append("\t".join([str(i)] + [f"{v:.12e}" for v in vals]))
    for k, v in worst.items():
        lines.append(f"# max_{k}: {v:.6e}")
    return lines, worst


def cmd_residuals(args) -> int:
    sc = load_file(args.scenario, args.seed)
    lines, worst = residual_report(sc)
    tol = sc.tolerances["residual"]
    ok = worst["einstein_max"] < tol and worst["maxwell_max"] < tol
    if np.isfinite(tol):
        lines.append(f"# einstein/maxwell within {tol:.1e}: {'PASS' if ok else 'FAIL'}")
    _emit(lines, args.out)
    return EXIT_OK if ok or not np.isfinite(tol) else EXIT_FAIL


def _affine_input(path) -> Entries:
    try:
        return Entries(parse_text(Path(path).read_text()))
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None


def cmd_affine(args) -> int:
    e = _affine_input(args.file)
    B = e.matrix("B")
    n = B.shape[0]
    if B.shape != (n, n):
        raise ScenarioError("B must be square", key="B")
    if args.action == "decompose":
        a = e.vector("a", n, np.zeros(n))
        c = e.float("c", 0.0)
        P = aff.decompose(aff.TwoAffineSample(lambda u, v: c + a @ u + a @ v + u @ B @ v, n))
        lines = ["B = " + " ; ".join(", ".join(f"{x:.17g}" for x in r) for r in P.B),
                 "z = " + ", ".join(f"{x:.17g}" for x in P.z),
                 f"lambda = {P.lam:.17g}"]
    else:
        P = aff.AffineInnerProduct(B, e.vector("z", n, np.zeros(n)), e.float("lambda"))
        G = aff.hat_metric(P)
        lines = ["hat_metric = " + " ; ".join(", ".join(f"{x:.17g}" for x in r) for r in G)]
    _emit(lines, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="affine-algebroid", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, scenario=True):
        if scenario:
            p.add_argument("--scenario", required=True)
            p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out", default=None)

    p = sub.add_parser("verify", help="run the identity suites over the scenario grid")
    common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("curvature", help="curvature and Einstein blocks at one point")
    common(p)
    p.add_argument("--at", required=True)
    p.set_defaults(func=cmd_curvature)

    p = sub.add_parser("geodesic", help="integrate a charged world-line")
    common(p)
    p.add_argument("--at", default=None, help="initial point t,x,y,z")
    p.add_argument("--u", default=None, help="initial 4-velocity")
    p.add_argument("--lambda", dest="lam", type=float, default=0.0)
    p.add_argument("--step", type=float, default=1e-3)
    p.add_argument("--steps", type=int, default=1000)
    p.add_argument("--normalize", action="store_true")
    p.set_defaults(func=cmd_geodesic)

    p = sub.add_parser("residuals", help="field-equation residuals over the grid")
    common(p)
    p.set_defaults(func=cmd_residuals)

    p = sub.add_parser("affine", help="affine inner-product utilities")
    p.add_argument("action", choices=["decompose", "hat-metric"])
    p.add_argument("file")
    common(p, scenario=False)
    p.set_defaults(func=cmd_affine)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (UsageError, ScenarioError, ChartError, SignatureError, FrameError,
            aff.DegenerateFormError, aff.ContractViolation) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except IntegrationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
