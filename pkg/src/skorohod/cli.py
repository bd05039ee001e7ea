"""Command-line front end.

Exit codes: 0 success, 1 a verification check failed, 2 bad usage or input.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys

from . import corpus as corpus_mod
from .cadlag import modulus_wprime, modulus_wsecond
from .diagnostics import PathEnsemble, compactness_profile, tightness_report
from .errors import SkorohodError, ValidationError
from .fileio import dumps, emit, load
from .invariants import run_all
from .metric import distance
from .nested import NestedPath, nested_distance, w_D_prime, w_D_second, w_u_second
from .simulate import SimConfig, make_ensemble

SCALAR_MODULI = {"wprime": modulus_wprime, "wsecond": modulus_wsecond}
NESTED_MODULI = {"wDprime": w_D_prime, "wDsecond": w_D_second, "wusecond": w_u_second}


def float_list(text):
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _ensembles(files, seed):
    out = []
    for f in files:
        obj = load(f, expect=("config", "ensemble", "nested"))
        if isinstance(obj, SimConfig):
            if seed is not None:
                obj = SimConfig(obj.alpha, obj.n, obj.m, seed, obj.sign_balance)
            obj = make_ensemble(obj)
        elif isinstance(obj, NestedPath):
            obj = PathEnsemble((obj,), n=1)
        out.append(obj)
    return out


def cmd_dist(args):
    expect = ("scalar",) if args.level == "scalar" else ("nested",)
    x, y = load(args.x, expect), load(args.y, expect)
    if args.level == "scalar":
        result = distance(x, y, args.objective)
    else:
        result = nested_distance(x, y, args.objective)
    emit(dumps(result.to_json()), args.out)
    return 0


def cmd_moduli(args):
    obj = load(args.path, expect=("scalar", "nested"))
    nested = isinstance(obj, NestedPath)
    table = NESTED_MODULI if nested else SCALAR_MODULI
    which = args.which.split(",") if args.which else list(table)
    unknown = [w for w in which if w not in table]
    if unknown:
        level = "nested" if nested else "scalar"
        raise ValidationError(f"moduli {unknown} do not apply to a {level} path; "
                              f"choose from {sorted(table)}")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["modulus", "delta", "value"])
    for name in which:
        for d in args.delta_grid:
            w.writerow([name, repr(d), repr(table[name](obj, d))])
    emit(buf.getvalue(), args.out)
    return 0


def cmd_compactness(args):
    paths = [X for ens in _ensembles(args.inputs, args.seed) for X in ens.paths]
    rep = compactness_profile(paths, args.delta_grid, args.variant)
    emit(dumps(rep.to_json()) if args.format == "json" else rep.to_csv(), args.out)
    return 0


def cmd_tightness(args):
    ensembles = _ensembles(args.inputs, args.seed)
    rep = tightness_report(ensembles, args.a_grid, args.delta_grid, args.epsilon_grid,
                           args.t_subset)
    emit(dumps(rep.to_json()) if args.format == "json" else rep.to_csv(), args.out)
    return 0


def cmd_simulate(args):
    cfg = load(args.config, expect=("config",))
    if args.seed is not None:
        cfg = SimConfig(cfg.alpha, cfg.n, cfg.m, args.seed, cfg.sign_balance)
    emit(dumps(make_ensemble(cfg).to_json()), args.out)
    return 0


def cmd_verify(args):
    data = corpus_mod.load(args.corpus)
    results = run_all(data)
    failed = False
    for name, (passed, total) in results.items():
        status = "ok" if passed == total else "FAIL"
        failed |= passed != total
        print(f"{name:12s} {passed:6d}/{total:<6d} {status}")
    return 1 if failed else 0


def build_parser():
    p = argparse.ArgumentParser(prog="skorohod", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, fmt=False):
        sp.add_argument("--out", help="output file (default: stdout)")
        if fmt:
            sp.add_argument("--format", choices=("json", "csv"), default="json")

    d = sub.add_parser("dist", help="Skorohod distance between two paths")
    d.add_argument("x")
    d.add_argument("y")
    d.add_argument("--objective", choices=("j1", "j1_0"), default="j1_0")
    d.add_argument("--level", choices=("scalar", "nested"), default="scalar")
    common(d)
    d.set_defaults(func=cmd_dist)

    m = sub.add_parser("moduli", help="moduli of continuity as CSV")
    m.add_argument("path")
    m.add_argument("--delta-grid", type=float_list, required=True)
    m.add_argument("--which", help="comma-separated subset of "
                   + ", ".join([*SCALAR_MODULI, *NESTED_MODULI]))
    common(m)
    m.set_defaults(func=cmd_moduli)

    c = sub.add_parser("compactness", help="moduli profiles over a family of paths")
    c.add_argument("inputs", nargs="+", help="ensembles, nested paths or simulation configs")
    c.add_argument("--delta-grid", type=float_list, required=True)
    c.add_argument("--variant", choices=("wprime", "wsecond"), default="wprime")
    c.add_argument("--seed", type=int)
    common(c, fmt=True)
    c.set_defaults(func=cmd_compactness)

    t = sub.add_parser("tightness", help="exceedance frequencies for tightness conditions")
    t.add_argument("inputs", nargs="+", help="ensembles or simulation configs")
    t.add_argument("--a-grid", type=float_list, required=True)
    t.add_argument("--delta-grid", type=float_list, required=True)
    t.add_argument("--epsilon-grid", type=float_list, required=True)
    t.add_argument("--t-subset", type=float_list, default=[1.0])
    t.add_argument("--seed", type=int)
    common(t, fmt=True)
    t.set_defaults(func=cmd_tightness)

    s = sub.add_parser("simulate", help="simulate a partial-sum ensemble")
    s.add_argument("config")
    s.add_argument("--seed", type=int)
    common(s)
    s.set_defaults(func=cmd_simulate)

    v = sub.add_parser("verify", help="run the property suites over a corpus")
    v.add_argument("corpus", nargs="?", help="corpus directory (default: shipped corpus)")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SkorohodError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
