"""Command-line interface: one subcommand per constructor plus both pipelines.

Exit codes: 0 success; 1 the requested inverse does not exist (a diagnostic
JSON is still produced); 2 usage or input-format errors.  All machine-readable
output is JSON (``--json``) or the documented CSV/PPM/.qmat files; stdout
carries a short human summary.  ``--seed`` falls back to the QUATINV_SEED
environment variable, then 0.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .qcore import (
    QMatrix,
    QmatFormatError,
    fro_norm,
    mat_mul,
    read_qmat,
    write_qmat,
)
from .factor import full_rank_decompose, qsvd
from .geninv import (
    InverseExistenceError,
    drazin,
    group_inverse,
    mat_index,
    outer_both,
    outer_left,
    outer_right,
    outer_w_left,
    outer_w_right,
    pinv_report,
)
from .bench import SUITES, emit_csv, run_bench
from .apps import (
    PpmFormatError,
    blur,
    build_blur,
    build_filter_system,
    deblur_quaternion,
    deblur_report,
    default_order,
    lorenz_simulate,
    metrics,
    read_ppm,
    real_block_restore,
    write_filter_csv,
    write_ppm,
    write_trajectory_csv,
)

__all__ = ["main", "build_parser"]


def _resolve_seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("QUATINV_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ValueError(f"QUATINV_SEED must be an integer, got {env!r}")
    return 0


def _emit_json(args, payload) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True)
    if getattr(args, "json", None):
        with open(args.json, "w", encoding="ascii") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _report_payload(op, rep, tol):
    worst = max(rep.residuals.values()) if rep.residuals else 0.0
    return {
        "op": op,
        "route": rep.route,
        "side": rep.side,
        "exists": rep.exists,
        "reason": rep.reason,
        "classification": rep.classification,
        "ranks": rep.ranks,
        "residuals": rep.residuals,
        "within_tol": bool(worst <= tol),
        "shape": list(rep.x.shape),
    }


def _maybe_write(args, x: QMatrix) -> None:
    if args.out:
        write_qmat(args.out, x)


def cmd_pinv(args) -> int:
    a = read_qmat(args.infile)
    rep = pinv_report(a, method=args.method, route=args.route)
    _maybe_write(args, rep.x)
    payload = _report_payload("pinv", rep, args.tol)
    payload["method"] = args.method
    _emit_json(args, payload)
    print(f"pinv {a.shape[0]}x{a.shape[1]} method={args.method} "
          f"route={args.route}: max residual "
          f"{max(rep.residuals.values()):.3e}")
    return 0


def cmd_outer(args) -> int:
    a = read_qmat(args.infile)
    s = read_qmat(args.s)
    t = read_qmat(args.t)
    if args.side == "right":
        rep = outer_right(a, s, t, route=args.route)
    elif args.side == "left":
        rep = outer_left(a, s, t, route=args.route)
    else:
        rep = outer_both(a, s, t, route=args.route)
    _maybe_write(args, rep.x)
    _emit_json(args, _report_payload("outer", rep, args.tol))
    flags = ", ".join(k for k, v in rep.classification.items() if v is True)
    print(f"outer side={args.side}: {flags or 'no classification flags set'}")
    return 0


def cmd_outer_w(args) -> int:
    a = read_qmat(args.infile)
    w = read_qmat(args.w)
    ctor = outer_w_right if args.side == "right" else outer_w_left
    rep = ctor(a, w, route=args.route)
    payload = _report_payload("outer-w", rep, args.tol)
    if not rep.exists:
        _emit_json(args, payload)
        print(f"outer-w: {rep.reason}", file=sys.stderr)
        return 1
    _maybe_write(args, rep.x)
    _emit_json(args, payload)
    print(f"outer-w side={args.side}: outer residual "
          f"{rep.residuals['outer']:.3e}")
    return 0


def _spectral_payload(op, a, k, route, extra_residuals):
    return {
        "op": op,
        "route": route,
        "index": k,
        "shape": list(a.shape),
        "residuals": extra_residuals,
    }


def cmd_drazin(args) -> int:
    a = read_qmat(args.infile)
    k = mat_index(a)
    x = drazin(a, route=args.route)
    _maybe_write(args, x)
    ax, xa = mat_mul(a, x), mat_mul(x, a)
    pow_k = _mat_power(a, k)
    res = {
        "outer": fro_norm(mat_mul(xa, x) - x),
        "commute": fro_norm(ax - xa),
        "power": fro_norm(mat_mul(a, mat_mul(pow_k, x)) - pow_k),
    }
    _emit_json(args, _spectral_payload("drazin", a, k, args.route, res))
    print(f"drazin: index {k}, residuals outer={res['outer']:.3e} "
          f"commute={res['commute']:.3e} power={res['power']:.3e}")
    return 0


def cmd_group(args) -> int:
    a = read_qmat(args.infile)
    x = group_inverse(a, route=args.route)
    _maybe_write(args, x)
    ax, xa = mat_mul(a, x), mat_mul(x, a)
    res = {
        "outer": fro_norm(mat_mul(xa, x) - x),
        "commute": fro_norm(ax - xa),
        "one": fro_norm(mat_mul(ax, a) - a),
    }
    _emit_json(args, _spectral_payload("group", a, mat_index(a),
                                       args.route, res))
    print(f"group: residuals one={res['one']:.3e} "
          f"commute={res['commute']:.3e}")
    return 0


def _mat_power(a: QMatrix, k: int) -> QMatrix:
    out = QMatrix.eye(a.shape[0])
    for _ in range(k):
        out = mat_mul(out, a)
    return out


def cmd_rank(args) -> int:
    from .factor import rank as qrank
    a = read_qmat(args.infile)
    r = qrank(a)
    _emit_json(args, {"op": "rank", "shape": list(a.shape), "rank": r})
    print(f"rank {r}")
    return 0


def cmd_frd(args) -> int:
    a = read_qmat(args.infile)
    fact = full_rank_decompose(a, side=args.side, route=args.route)
    if args.out:
        write_qmat(args.out + ".F.qmat", fact.f)
        write_qmat(args.out + ".G.qmat", fact.g)
    recon = fro_norm(mat_mul(fact.f, fact.g) - a)
    _emit_json(args, {"op": "frd", "side": args.side, "route": args.route,
                      "rank": fact.r, "shape": list(a.shape),
                      "f_shape": list(fact.f.shape),
                      "g_shape": list(fact.g.shape),
                      "reconstruction_residual": recon})
    print(f"frd {args.side}: rank {fact.r}, ||FG-A|| = {recon:.3e}")
    return 0


def cmd_svd(args) -> int:
    a = read_qmat(args.infile)
    sv = qsvd(a, method=args.route)
    if args.out:
        write_qmat(args.out + ".U.qmat", sv.u)
        write_qmat(args.out + ".V.qmat", sv.v)
    _emit_json(args, {"op": "svd", "route": args.route,
                      "shape": list(a.shape), "rank": sv.rank,
                      "sigma": [float(s) for s in sv.sigma]})
    print(f"svd: rank {sv.rank}, sigma_max {sv.sigma[0] if len(sv.sigma) else 0.0:.6g}")
    return 0


def cmd_deblur(args) -> int:
    img = read_ppm(args.image)
    op = build_blur(args.p, args.q, args.sigma, args.r, args.s)
    b = blur(op, img)
    restored, quat_m = deblur_quaternion(op, b, truth=img, route=args.route)
    real_m = None
    if args.compare_real:
        real_img = real_block_restore(op, b)
        real_m = metrics(img, real_img)
        if args.real_out:
            write_ppm(args.real_out, real_img)
    if args.out:
        write_ppm(args.out, restored)
    seed = _resolve_seed(args)
    _emit_json(args, deblur_report(op, img, quat_m, real_m, seed))
    print(f"deblur {img.h}x{img.w}: PSNR {quat_m.psnr:.2f} dB, "
          f"SSIM {quat_m.ssim:.4f}, RR {quat_m.rr:.3e}")
    return 0


def cmd_lorenz_filter(args) -> int:
    traj = lorenz_simulate(args.T, args.dt)
    delay = round(1.0 / args.dt)
    order = args.order if args.order is not None \
        else default_order(traj.shape[0], delay)
    seed = _resolve_seed(args)
    fs = build_filter_system(traj, args.dt, delay, args.noise_sigma,
                             order, seed=seed, route=args.route)
    if args.out:
        write_trajectory_csv(args.out + ".trajectory.csv", traj, args.dt)
        write_filter_csv(args.out + ".filter.csv", fs, args.dt)
    _emit_json(args, {"op": "lorenz-filter", "T": args.T, "dt": args.dt,
                      "n_samples": int(traj.shape[0]),
                      "delay_samples": delay, "order": order,
                      "noise_sigma": args.noise_sigma, "seed": seed,
                      "relative_error": fs.e})
    print(f"lorenz-filter: C is {order + 1}x{order + 1}, e = {fs.e:.6e}")
    return 0


def cmd_bench(args) -> int:
    k_list = [int(tok) for tok in args.k.split(",") if tok]
    seed = _resolve_seed(args)
    records = run_bench(args.suite, k_list, args.trials, seed=seed)
    if args.out:
        emit_csv(records, args.out)
    _emit_json(args, {"op": "bench", "suite": args.suite, "k": k_list,
                      "trials": args.trials, "seed": seed,
                      "rows": len(records)})
    for rec in records:
        res = " ".join(f"{k}={v:.2e}" for k, v in sorted(rec.residuals.items()))
        print(f"{rec.op:12s} {rec.route:6s} k={rec.k:<3d} "
              f"{rec.mean_seconds:.4f}s {res}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--route", choices=["direct", "crep"],
                        default="direct",
                        help="quaternion arithmetic or complex representation")
    shared.add_argument("--seed", type=int, default=None,
                        help="RNG seed (default: QUATINV_SEED or 0)")
    shared.add_argument("--tol", type=float, default=1e-8,
                        help="tolerance used in report flags")
    shared.add_argument("--out", default=None,
                        help="output file (or prefix for multi-file commands)")
    shared.add_argument("--json", default=None,
                        help="write the JSON report here instead of stdout")

    parser = argparse.ArgumentParser(
        prog="quatinv",
        description="Generalized inverses of quaternion matrices")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pinv", parents=[shared],
                       help="Moore-Penrose inverse")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--method", choices=["svd", "frd"], default="svd")
    p.set_defaults(func=cmd_pinv)

    p = sub.add_parser("outer", parents=[shared],
                       help="outer inverse from generator pair (S, T)")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--s", required=True)
    p.add_argument("--t", required=True)
    p.add_argument("--side", choices=["right", "left", "both"],
                   default="right")
    p.set_defaults(func=cmd_outer)

    p = sub.add_parser("outer-w", parents=[shared],
                       help="outer inverse with both spaces prescribed by W")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--w", required=True)
    p.add_argument("--side", choices=["right", "left"], default="right")
    p.set_defaults(func=cmd_outer_w)

    p = sub.add_parser("drazin", parents=[shared], help="Drazin inverse")
    p.add_argument("--in", dest="infile", required=True)
    p.set_defaults(func=cmd_drazin)

    p = sub.add_parser("group", parents=[shared], help="group inverse")
    p.add_argument("--in", dest="infile", required=True)
    p.set_defaults(func=cmd_group)

    p = sub.add_parser("rank", parents=[shared], help="numerical rank")
    p.add_argument("--in", dest="infile", required=True)
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("frd", parents=[shared],
                       help="full rank decomposition A = F G")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--side", choices=["column-form", "row-form"],
                   default="column-form")
    p.set_defaults(func=cmd_frd)

    p = sub.add_parser("svd", parents=[shared],
                       help="quaternion singular value decomposition")
    p.add_argument("--in", dest="infile", required=True)
    p.set_defaults(func=cmd_svd)

    p = sub.add_parser("deblur", parents=[shared],
                       help="blur + pseudoinverse restore a PPM image")
    p.add_argument("--image", required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--sigma", type=float, default=3.0)
    p.add_argument("--r", type=int, default=3)
    p.add_argument("--s", type=int, default=3)
    p.add_argument("--compare-real", action="store_true",
                   help="also restore through the real block system")
    p.add_argument("--real-out", default=None,
                   help="write the real-block restoration here (PPM)")
    p.set_defaults(func=cmd_deblur)

    p = sub.add_parser("lorenz-filter", parents=[shared],
                       help="quaternion FIR filter on a Lorenz trajectory")
    p.add_argument("--T", type=float, default=10.0)
    p.add_argument("--dt", type=float, default=0.05)
    p.add_argument("--noise-sigma", type=float, default=0.01)
    p.add_argument("--order", type=int, default=None,
                   help="filter order n (default: largest that fits)")
    p.set_defaults(func=cmd_lorenz_filter)

    p = sub.add_parser("bench", parents=[shared],
                       help="timing/accuracy sweep over problem sizes")
    p.add_argument("--suite", choices=list(SUITES), required=True)
    p.add_argument("--k", default="5,10,20",
                   help="comma-separated size parameters")
    p.add_argument("--trials", type=int, default=3)
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except InverseExistenceError as exc:
        _emit_json(args, {"op": args.command, "exists": False,
                          "reason": str(exc)})
        print(f"{args.command}: {exc}", file=sys.stderr)
        return 1
    except (QmatFormatError, PpmFormatError, ValueError, OSError) as exc:
        print(f"{args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
