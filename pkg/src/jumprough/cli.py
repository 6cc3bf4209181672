"""Command-line front end.

All machine output is JSON (sorted keys, fixed layout) so identical
arguments, including seeds, produce byte-identical reports. Exit codes:
0 success, 2 argument/file errors, 3 numeric or regime errors.
"""

import argparse
import io
import json
import os
import sys

import numpy as np

from . import __version__
from . import levy as lv
from . import marcus as mc
from . import rough as rg
from . import tensor as ta
from . import young as yg
from .errors import NumericsError, RegimeError
from .path import CadlagPath, p_variation, path_from_csv


def _tolist(x):
    return np.asarray(x).tolist()


def _load_json(path):
    with io.open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _load_path(spec, interp=None):
    if isinstance(spec, str):
        return path_from_csv(spec, interp)
    return CadlagPath(spec["times"], spec["values"],
                      spec.get("left_values"),
                      spec.get("interp", interp or "piecewise_linear"))


def _load_rough(obj):
    X = _load_path(obj["path"])
    if "second" in obj:
        return rg.CadlagRoughPath(X, np.asarray(obj["second"]),
                                  np.asarray(obj["second_left"])
                                  if "second_left" in obj else None,
                                  flavor=obj.get("flavor", "custom"))
    lift = obj.get("lift", "marcus")
    p = float(obj.get("p", 1.0))
    if lift == "marcus":
        return rg.lift_young_marcus(X, p)
    if lift == "canonical":
        return rg.lift_young_canonical(X, p)
    raise ValueError(f"unknown lift {lift!r}")


def _load_controlled(obj, driver):
    if "constant" in obj:
        return rg.constant_controlled(np.asarray(obj["constant"],
                                                 dtype=np.float64), driver)
    return rg.ControlledPath(
        obj["times"], np.asarray(obj["values"], dtype=np.float64),
        np.asarray(obj["prime"], dtype=np.float64),
        np.asarray(obj["left_values"], dtype=np.float64)
        if "left_values" in obj else None,
        np.asarray(obj["prime_left"], dtype=np.float64)
        if "prime_left" in obj else None)


def _load_triplet(path, enhanced):
    obj = _load_json(path)
    if enhanced:
        return lv.EnhancedLevyTriplet.from_json(obj)
    return lv.LevyTriplet.from_json(obj)


def _make_field(name, params):
    if name.startswith("builtin:"):
        name = name[len("builtin:"):]
    if name == "sphere":
        return mc.sphere_field()
    if name == "linear":
        return mc.linear_field(params["mats"])
    if name == "scalar_poly":
        return mc.scalar_poly_field(params["coeffs"])
    if name == "tensor_linear":
        return mc.tensor_linear_field(int(params["dim"]), int(params["level"]))
    raise ValueError(f"unknown vector field {name!r}")


def _emit(report, args):
    text = json.dumps(report, indent=2, sort_keys=True)
    if getattr(args, "out", None):
        with io.open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def _report(command, config, payload):
    return {"command": command, "version": __version__,
            "config": config, **payload}


def cmd_pvar(args):
    X = path_from_csv(args.path, args.interp)
    value = p_variation(X, args.p)
    return _report("pvar", {"path": args.path, "p": args.p,
                            "interp": X.interp},
                   {"p_variation": value})


def cmd_signature(args):
    X = path_from_csv(args.path, args.interp)
    sig = mc.signature(X, args.level)
    return _report("signature", {"path": args.path, "level": args.level,
                                 "interp": X.interp},
                   {"signature": sig.to_json()})


def cmd_young(args):
    X = path_from_csv(args.x)
    Y = path_from_csv(args.y)
    res = yg.young_integral(Y, X, args.p, args.q, variant=args.variant)
    return _report("young-integrate",
                   {"x": args.x, "y": args.y, "p": args.p, "q": args.q,
                    "variant": args.variant},
                   {"value": _tolist(res.value),
                    "bound": res.bound,
                    "refinement_trace": [
                        {"partition_size": n, "value": _tolist(v)}
                        for n, v in res.refinement_trace]})


def cmd_rough(args):
    X = _load_rough(_load_json(args.x))
    Yc = _load_controlled(_load_json(args.y), X)
    res = rg.rough_integral(Yc, X, p=args.p, variant=args.variant)
    return _report("rough-integrate",
                   {"x": args.x, "y": args.y, "p": args.p,
                    "variant": args.variant},
                   {"value": _tolist(res.value),
                    "bound": res.bound,
                    "partial_times": _tolist(res.partial_times),
                    "partial_values": _tolist(res.partial_values),
                    "refinement_trace": [
                        {"partition_size": n, "value": _tolist(v)}
                        for n, v in res.refinement_trace]})


def cmd_marcus_rde(args):
    driver = _load_rough(_load_json(args.driver))
    params = json.loads(args.field_params) if args.field_params else {}
    field = _make_field(args.field, params)
    z0 = np.array([float(v) for v in args.z0.split(",")])
    Z = mc.marcus_rde_solve(field, driver, z0, tol=args.tol,
                            jump_steps=args.jump_steps)
    return _report("marcus-rde",
                   {"field": args.field, "driver": args.driver,
                    "z0": _tolist(z0), "tol": args.tol,
                    "jump_steps": args.jump_steps},
                   {"times": _tolist(Z.times),
                    "values": _tolist(Z.values),
                    "left_values": _tolist(Z.left_values)})


def cmd_levy_sim(args):
    tr = _load_triplet(args.triplet, args.enhanced)
    config = {"triplet": args.triplet, "T": args.T, "grid_n": args.grid_n,
              "seed": args.seed, "enhanced": args.enhanced}
    if args.enhanced:
        gp = lv.sample_enhanced(tr, args.T, args.grid_n, args.seed)
        return _report("levy-sim", config,
                       {"times": _tolist(gp.times),
                        "points": [g.to_json() for g in gp.points]})
    X = lv.sample_path(tr, args.T, args.grid_n, args.seed)
    return _report("levy-sim", config,
                   {"times": _tolist(X.times), "values": _tolist(X.values),
                    "left_values": _tolist(X.left_values)})


def cmd_expected_signature(args):
    tr = _load_triplet(args.triplet, args.enhanced)
    config = {"triplet": args.triplet, "level": args.level, "T": args.T,
              "enhanced": args.enhanced,
              "mode": "mc" if args.mc else "analytic"}
    if args.mc:
        config.update({"grid_n": args.grid_n, "nsamples": args.nsamples,
                       "seed": args.seed, "threads": args.threads})
        est = lv.mc_expected_signature(tr, args.level, args.T, args.grid_n,
                                       args.nsamples, args.seed,
                                       threads=args.threads)
        return _report("expected-signature", config,
                       {"mean": est.mean.to_json(),
                        "stderr": est.stderr.to_json(),
                        "nsamples": est.nsamples, "seed": est.seed})
    if args.enhanced:
        value = lv.expected_signature_enhanced(tr, args.level, args.T)
    else:
        value = lv.expected_signature_levy(tr, args.level, args.T)
    return _report("expected-signature", config,
                   {"value": value.to_json()})


def cmd_diagnostics(args):
    tr = _load_triplet(args.triplet, args.enhanced)
    config = {"triplet": args.triplet, "T": args.T, "grid_n": args.grid_n,
              "nsamples": args.nsamples, "seed": args.seed,
              "enhanced": args.enhanced, "kind": args.kind}
    if args.kind == "area-moment":
        table = lv.area_moment_diagnostic(tr, args.T, args.grid_n,
                                          args.nsamples, args.seed)
        if args.csv:
            sys.stdout.write("h,ratio\n")
            for h, r in table:
                sys.stdout.write(f"{h},{r}\n")
            return None
        return _report("diagnostics", config,
                       {"area_moment": [{"h": h, "ratio": r}
                                        for h, r in table]})
    h_grid = [float(v) for v in args.h_grid.split(",")]
    a_grid = [float(v) for v in args.a_grid.split(",")]
    paths = []
    for i in range(args.nsamples):
        if args.enhanced:
            paths.append(lv.sample_enhanced(tr, args.T, args.grid_n,
                                            args.seed + i))
        else:
            X = lv.sample_path(tr, args.T, args.grid_n, args.seed + i)
            paths.append(mc.signature_group_path(X, 2))
    fit = lv.manstavicius_diagnostic(paths, h_grid, a_grid)
    if args.csv:
        sys.stdout.write("h,a,alpha,stderr\n")
        for hi, h in enumerate(h_grid):
            for ai, a in enumerate(a_grid):
                sys.stdout.write(
                    f"{h},{a},{fit['alpha'][hi, ai]},{fit['stderr'][hi, ai]}\n")
        return None
    return _report("diagnostics", config,
                   {"h_grid": h_grid, "a_grid": a_grid,
                    "alpha": _tolist(fit["alpha"]),
                    "alpha_stderr": _tolist(fit["stderr"]),
                    "beta": fit["beta"], "gamma": fit["gamma"],
                    "ratio": fit["ratio"]})


def build_parser():
    parser = argparse.ArgumentParser(
        prog="jumprough",
        description="Cadlag rough-path numerics: signatures, Young/rough "
                    "integration, Marcus RDEs, Levy expected signatures.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_out(p):
        p.add_argument("--out", help="write the JSON report to this file")

    p = sub.add_parser("pvar", help="exact p-variation of a sampled path")
    p.add_argument("--path", required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--interp", default=None)
    add_out(p)
    p.set_defaults(fn=cmd_pvar)

    p = sub.add_parser("signature", help="step-N Marcus signature")
    p.add_argument("--path", required=True)
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--interp", default=None)
    add_out(p)
    p.set_defaults(fn=cmd_signature)

    p = sub.add_parser("young-integrate", help="Young integral of Y against dX")
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--variant", default="left_limit",
                   choices=["left_value", "left_limit"])
    add_out(p)
    p.set_defaults(fn=cmd_young)

    p = sub.add_parser("rough-integrate",
                       help="rough integral of a controlled path")
    p.add_argument("--x", required=True, help="rough-path JSON")
    p.add_argument("--y", required=True, help="controlled-path JSON")
    p.add_argument("--p", type=float, default=2.5)
    p.add_argument("--variant", default="left_limit_compensated",
                   choices=["left_value", "left_limit_compensated"])
    add_out(p)
    p.set_defaults(fn=cmd_rough)

    p = sub.add_parser("marcus-rde", help="Marcus canonical RDE solve")
    p.add_argument("--field", required=True,
                   help="builtin:{linear,sphere,scalar_poly,tensor_linear}")
    p.add_argument("--field-params", default=None,
                   help="JSON parameters for the field family")
    p.add_argument("--driver", required=True, help="rough-path JSON")
    p.add_argument("--z0", required=True, help="comma-separated start state")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--jump-steps", type=int, default=64)
    add_out(p)
    p.set_defaults(fn=cmd_marcus_rde)

    p = sub.add_parser("levy-sim", help="simulate one Levy sample path")
    p.add_argument("--triplet", required=True)
    p.add_argument("--T", type=float, required=True)
    p.add_argument("--grid-n", type=int, default=256)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--enhanced", action="store_true")
    add_out(p)
    p.set_defaults(fn=cmd_levy_sim)

    p = sub.add_parser("expected-signature",
                       help="analytic or Monte-Carlo expected signature")
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--analytic", action="store_true")
    mode.add_argument("--mc", action="store_true")
    p.add_argument("--triplet", required=True)
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--T", type=float, required=True)
    p.add_argument("--grid-n", type=int, default=256)
    p.add_argument("--nsamples", type=int, default=10000)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--threads", type=int,
                   default=int(os.environ.get("JUMP_ROUGH_THREADS", "1")))
    p.add_argument("--enhanced", action="store_true")
    add_out(p)
    p.set_defaults(fn=cmd_expected_signature)

    p = sub.add_parser("diagnostics", help="regularity diagnostics")
    kind = p.add_mutually_exclusive_group(required=True)
    kind.add_argument("--area-moment", dest="kind", action="store_const",
                      const="area-moment")
    kind.add_argument("--manstavicius", dest="kind", action="store_const",
                      const="manstavicius")
    p.add_argument("--triplet", required=True)
    p.add_argument("--T", type=float, default=1.0)
    p.add_argument("--grid-n", type=int, default=256)
    p.add_argument("--nsamples", type=int, default=200)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--enhanced", action="store_true")
    p.add_argument("--h-grid", default="0.25,0.125,0.0625,0.03125")
    p.add_argument("--a-grid", default="0.1,0.2,0.4,0.8")
    p.add_argument("--csv", action="store_true")
    add_out(p)
    p.set_defaults(fn=cmd_diagnostics)

    return parser


def run(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command in ("expected-signature",) and args.mc and args.seed is None:
        parser.error("--seed is required for stochastic commands")
    report = args.fn(args)
    if report is not None:
        _emit(report, args)
    return 0


def main(argv=None):
    try:
        return run(argv)
    except (RegimeError, NumericsError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 3
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
