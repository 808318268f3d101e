"""Command line frontend.

Exit codes: 0 success, 1 a property check failed, 2 invalid input.  Input
errors are reported on standard error as one JSON object
``{"error": CODE, "message": ...}``.  Set ``KDQ_LOG`` (e.g. ``INFO``) for
log output.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

import numpy as np

from . import climit, determinism, dynamics, kdcore, weaksim
from .errors import KDQError
from .hilbert import TOL, density_operator, require_overlap
from .serialize import (
    basis_to_json,
    complex_to_json,
    dumps,
    fig1_csv,
    kd_csv,
    kd_from_json,
    kd_to_json,
    kernel_csv,
    kernel_to_json,
    load_basis,
    load_json,
    load_operator,
    load_state,
)

log = logging.getLogger("kdq")

EXIT_OK, EXIT_CHECK_FAILED, EXIT_INVALID = 0, 1, 2


class UsageError(Exception):
    code = "USAGE"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _floats(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _emit(text, out):
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _tol(args):
    return TOL if args.tolerance is None else args.tolerance


# -- subcommands ---------------------------------------------------------------

def cmd_kd(args):
    rho = load_state(args.state)
    A, B = load_basis(args.basis_a), load_basis(args.basis_b)
    # a table written to disk should be reconstructible, so the pair must overlap
    require_overlap(A, B)
    kd = kdcore.kd_distribution(rho, A, B)
    summary = {
        "row_marginals": kd.row_marginals().tolist(),
        "column_marginals": kd.column_marginals().tolist(),
        "normalization": complex_to_json(kd.values.sum()),
    }
    if args.format == "json":
        _emit(dumps(kd_to_json(kd, **summary)), args.out)
    else:
        _emit(kd_csv(kd.values), args.out)
        if args.out:
            sys.stdout.write(dumps(summary))
    return EXIT_OK


def cmd_reconstruct(args):
    kd = kd_from_json(load_json(args.kd))
    rho = kdcore.reconstruct_density(kd)
    if args.format == "csv":
        _emit(kd_csv(rho).replace("a,b,re,im", "i,j,re,im", 1), args.out)
    else:
        _emit(dumps({"density": complex_to_json(rho)}), args.out)
    return EXIT_OK


def cmd_transform(args):
    kd = kd_from_json(load_json(args.kd))
    C = load_basis(args.basis_c)
    out = determinism.transform_kd(kd, determinism.conditional_kernel(C, kd.basis_a, kd.basis_b))
    direct = kdcore.kd_distribution(kdcore.reconstruct_density(kd), C, kd.basis_b)
    diff = float(np.max(np.abs(out.values - direct.values)))
    if args.format == "json":
        _emit(dumps(kd_to_json(out, direct_max_diff=diff)), args.out)
    else:
        _emit(kd_csv(out.values), args.out)
        if args.out:
            sys.stdout.write(dumps({"direct_max_diff": diff}))
    return EXIT_OK if diff < _tol(args) else EXIT_CHECK_FAILED


def cmd_determinism(args):
    A, B, C = (load_basis(x) for x in (args.basis_a, args.basis_b, args.basis_c))
    dev = determinism.verify_determinism(A, B, C)
    tol = _tol(args)
    report = {"max_deviation": dev, "tolerance": tol, "pass": dev < tol,
              "bases": [A.label, B.label, C.label]}
    if args.out:
        kernel = determinism.conditional_kernel(C, A, B)
        if args.format == "csv":
            _emit(kernel_csv(kernel.values), args.out)
        else:
            _emit(dumps(kernel_to_json(kernel)), args.out)
    sys.stdout.write(dumps(report))
    return EXIT_OK if dev < tol else EXIT_CHECK_FAILED


def cmd_fig1(args):
    if args.vq <= 0:
        raise ValueError("Vq must be positive")
    panels = climit.figure1_data(args.vq, args.sigmas, args.fc0, args.grid_step, args.grid_span)
    if args.format == "json":
        doc = [{"sigma": p.sigma, "epsilon": p.epsilon, "c": p.c.tolist(), "re_q": p.re_q.tolist(),
                "im_q": p.im_q.tolist(), "classical": p.classical.tolist(), "meta": p.meta}
               for p in panels]
        _emit(dumps(doc), args.out)
    elif args.split:
        if not args.out or "{sigma}" not in args.out:
            raise ValueError("--split needs --out containing '{sigma}'")
        for p in panels:
            _emit(fig1_csv([p]), args.out.format(sigma=p.sigma))
    else:
        _emit(fig1_csv(panels), args.out)
    return EXIT_OK


def cmd_climit(args):
    report = {}
    if args.a or args.b or args.c:
        if not (args.a and args.b and args.c):
            raise ValueError("--a, --b and --c must be given together")
        a, b, c = (np.asarray(load_state(x)) for x in (args.a, args.b, args.c))
        if a.ndim != 1 or b.ndim != 1 or c.ndim != 1:
            raise ValueError("the Gaussian model needs pure state vectors")
        model = climit.GaussianModel.from_states(a, b, c)
        report["vq"] = model.vq
        report["dfda"] = model.dfda
        report["dfdb"] = model.dfdb
        report["epsilon"] = {repr(s): climit.epsilon(model.vq, s) for s in args.sigmas}
    if args.law_dim:
        from .hilbert import computational_basis, fourier_basis

        d = args.law_dim
        kd = kdcore.kd_distribution(climit.smooth_test_state(d), computational_basis(d), fourier_basis(d))
        report["im_law_residual"] = {"dim": d, "residual": climit.discrete_im_law_residual(kd)}
    if not report:
        raise ValueError("nothing to do: give --a/--b/--c and/or --law-dim")
    _emit(dumps(report), args.out)
    return EXIT_OK


def cmd_dynamics(args):
    rho = load_state(args.state)
    A = load_basis(args.basis_a)
    H = load_operator(args.hamiltonian)
    times = args.times
    if len(times) not in (2, 3):
        raise ValueError("--times takes t1,t2 or t1,t2,t3")
    kd = dynamics.two_time_kd(rho, A, H, times[0], times[1])
    extra = {}
    status = EXIT_OK
    if len(times) == 3:
        stepped = dynamics.three_time_step(kd, A, H, times[2])
        direct = dynamics.two_time_kd(rho, A, H, times[0], times[2])
        diff = float(np.max(np.abs(stepped.values - direct.values)))
        extra["direct_max_diff"] = diff
        kd = stepped
        status = EXIT_OK if diff < _tol(args) else EXIT_CHECK_FAILED
    if args.format == "json":
        _emit(dumps(kd_to_json(kd, **extra)), args.out)
    else:
        _emit(kd_csv(kd.values), args.out)
        if args.out:
            sys.stdout.write(dumps(dict(extra, times=kd.meta["times"])))
    return status


def cmd_path(args):
    A = load_basis(args.basis_a)
    H = load_operator(args.hamiltonian)
    chained = dynamics.path_kernel(A, H, args.times)
    direct = dynamics.direct_path_kernel(A, H, args.times)
    diff = float(np.max(np.abs(chained.values - direct.values)))
    tol = _tol(args)
    report = {"times": list(chained.times), "max_diff_vs_direct": diff,
              "normalization_error": chained.normalization_error(), "tolerance": tol,
              "pass": diff < tol}
    if args.out:
        if args.format == "csv":
            _emit(kernel_csv(chained.values).replace("c,a,b", "an,a1,a2", 1), args.out)
        else:
            _emit(dumps({"basis": basis_to_json(A), "times": list(chained.times),
                         "values": complex_to_json(chained.values)}), args.out)
    sys.stdout.write(dumps(report))
    return EXIT_OK if diff < tol else EXIT_CHECK_FAILED


def cmd_ratelaw(args):
    rho = density_operator(load_state(args.state))
    A = load_basis(args.basis_a)
    H = load_operator(args.hamiltonian)
    indices = range(A.dim) if args.index is None else [args.index]
    rows = []
    worst = 0.0
    for a in indices:
        r = dynamics.rate_via_imaginary_energy(rho, A, H, a)
        c = dynamics.rate_via_commutator(rho, A, H, a)
        worst = max(worst, abs(r - c))
        rows.append({"a": a, "rate": r, "commutator": c})
    tol = _tol(args)
    _emit(dumps({"rates": rows, "max_diff": worst, "tolerance": tol, "pass": worst < tol}), args.out)
    return EXIT_OK if worst < tol else EXIT_CHECK_FAILED


def cmd_weaksim(args):
    rho = load_state(args.state)
    A = load_basis(args.basis_a)
    B = load_basis(args.basis_b)
    spec = weaksim.PointerSpec(args.g, args.width, args.grid_step, args.grid_span)
    if args.n:
        res = weaksim.sample_weak_records(rho, A, B, spec, args.n, args.seed)
    else:
        res = weaksim.weak_estimate_kd(rho, A, B, spec)
    exact = kdcore.kd_distribution(rho, A, B).values
    cells = []
    for (a, b), v in np.ndenumerate(res.est):
        cells.append({
            "a": a, "b": b,
            "estimate": [float(v.real), float(v.imag)],
            "stderr": None if res.stderr is None else [float(res.stderr[a, b].real),
                                                       float(res.stderr[a, b].imag)],
            "exact": [float(exact[a, b].real), float(exact[a, b].imag)],
            "g": args.g, "n": args.n, "seed": args.seed,
        })
    report = {"g": args.g, "n": args.n, "seed": args.seed, "width": args.width,
              "max_abs_error": float(np.max(np.abs(res.est - exact))), "cells": cells}
    _emit(dumps(report), args.out)
    return EXIT_OK


# -- parser ---------------------------------------------------------------------

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output file (default: standard output)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tolerance", type=float, default=None,
                        help=f"pass threshold for property checks (default {TOL:g})")
    common.add_argument("--grid-step", type=float, default=None)
    common.add_argument("--grid-span", type=float, default=None, help="grid half width")

    def fmt(p, default):
        p.add_argument("--format", choices=("csv", "json"), default=default)

    parser = _Parser(prog="kdq", description="Kirkwood-Dirac joint probabilities and quantum determinism.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("kd", parents=[common], help="joint distribution of a state")
    p.add_argument("--state", required=True)
    p.add_argument("--basis-a", required=True)
    p.add_argument("--basis-b", required=True)
    fmt(p, "csv")
    p.set_defaults(func=cmd_kd)

    p = sub.add_parser("reconstruct", parents=[common], help="density operator from a KD JSON file")
    p.add_argument("--kd", required=True)
    fmt(p, "json")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("transform", parents=[common], help="replace the first basis of a KD JSON file")
    p.add_argument("--kd", required=True)
    p.add_argument("--basis-c", required=True)
    fmt(p, "json")
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("determinism", parents=[common], help="check sum_c p(a'|c,b) p(c|a,b) = delta")
    p.add_argument("--basis-a", required=True)
    p.add_argument("--basis-b", required=True)
    p.add_argument("--basis-c", required=True)
    fmt(p, "json")
    p.set_defaults(func=cmd_determinism)

    p = sub.add_parser("fig1", parents=[common], help="coarse-grained conditional vs classical curves")
    p.add_argument("--vq", type=float, default=1.0)
    p.add_argument("--sigmas", type=_floats, default=[0.25, 0.5, 1.0, 2.0])
    p.add_argument("--fc0", type=float, default=0.0)
    p.add_argument("--split", action="store_true", help="one CSV per sigma; --out must contain {sigma}")
    fmt(p, "csv")
    p.set_defaults(func=cmd_fig1)

    p = sub.add_parser("climit", parents=[common], help="Gaussian model of a state triple")
    p.add_argument("--a")
    p.add_argument("--b")
    p.add_argument("--c")
    p.add_argument("--sigmas", type=_floats, default=[0.25, 0.5, 1.0, 2.0])
    p.add_argument("--law-dim", type=int, default=None,
                   help="also report the imaginary-part law residual of the smooth test state")
    p.set_defaults(func=cmd_climit)

    p = sub.add_parser("dynamics", parents=[common], help="two-time (and three-time) KD")
    p.add_argument("--state", required=True)
    p.add_argument("--basis-a", required=True)
    p.add_argument("--hamiltonian", required=True)
    p.add_argument("--times", type=_floats, required=True)
    fmt(p, "csv")
    p.set_defaults(func=cmd_dynamics)

    p = sub.add_parser("path", parents=[common], help="chained vs direct path kernel")
    p.add_argument("--basis-a", required=True)
    p.add_argument("--hamiltonian", required=True)
    p.add_argument("--times", type=_floats, required=True)
    fmt(p, "json")
    p.set_defaults(func=cmd_path)

    p = sub.add_parser("ratelaw", parents=[common], help="Born-probability rates from imaginary energy weak values")
    p.add_argument("--state", required=True)
    p.add_argument("--basis-a", required=True)
    p.add_argument("--hamiltonian", required=True)
    p.add_argument("--index", type=int, default=None)
    p.set_defaults(func=cmd_ratelaw)

    p = sub.add_parser("weaksim", parents=[common], help="simulated weak measurement of a KD table")
    p.add_argument("--state", required=True)
    p.add_argument("--basis-a", required=True)
    p.add_argument("--basis-b", required=True)
    p.add_argument("--g", type=float, default=0.1)
    p.add_argument("--width", type=float, default=1.0)
    p.add_argument("--n", type=int, default=0, help="samples per cell and quadrature (0: exact)")
    p.set_defaults(func=cmd_weaksim)
    return parser


def _fail(code, message):
    sys.stderr.write(json.dumps({"error": code, "message": message}) + "\n")
    return EXIT_INVALID


def main(argv=None) -> int:
    level = os.environ.get("KDQ_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args = build_parser().parse_args(argv)
        log.info("running %s", args.command)
        return args.func(args)
    except UsageError as exc:
        return _fail(UsageError.code, str(exc))
    except KDQError as exc:
        return _fail(exc.code, str(exc))
    except ValueError as exc:
        return _fail("INVALID_ARGUMENT", str(exc))
    except OSError as exc:
        return _fail("IO", str(exc))


if __name__ == "__main__":
    sys.exit(main())
