"""Command line: ``apeuler {build,verify,sample,probe-freq,report}``.

Exit status is 0 when every check passes, 1 when a check fails and 2 for
usage or configuration errors.
"""
import argparse
import csv
import datetime
import json
import logging
import os
import sys
import time

import numpy as np

from apeuler import suites
from apeuler.assembly import EmbeddingPoint, TangentVector
from apeuler.config import (ConfigError, build, dump_bundle, field_from_bundle, load_bundle,
                            load_config, make_bundle)
from apeuler.errors import ConstructionError, EnumerationBudgetError, PackingInfeasibleError
from apeuler.frequencies import exact_combination, probe_nonresonance
from apeuler.kernels import BACKEND
from apeuler.packing import verify_layout

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

log = logging.getLogger("apeuler")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _write(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(text)


def _open_bundle(args, theta=None):
    if not args.bundle:
        raise UsageError("--bundle is required")
    if not os.path.exists(args.bundle):
        raise UsageError(f"bundle {args.bundle!r} not found")
    data = load_bundle(args.bundle)
    return (*field_from_bundle(data, theta), data)


def parse_grid(spec, d):
    """``"64x64"`` (one size per axis, even) or ``"64"`` (same size on every axis)."""
    try:
        sizes = [int(s) for s in spec.lower().split("x")]
    except ValueError:
        raise UsageError(f"bad grid spec {spec!r}") from None
    if len(sizes) == 1:
        sizes *= d
    if len(sizes) != d or min(sizes) < 1:
        raise UsageError(f"grid spec {spec!r} needs {d} positive sizes")
    return sizes


def parse_theta(spec, shapes):
    """A single value for every entry, or a comma list of all entries in block order."""
    total = sum(int(np.prod(s)) for s in shapes)
    try:
        vals = [float(v) for v in spec.split(",")]
    except ValueError:
        raise UsageError(f"bad --theta {spec!r}") from None
    if len(vals) == 1:
        vals *= total
    if len(vals) != total:
        raise UsageError(f"--theta needs 1 or {total} values, got {len(vals)}")
    return EmbeddingPoint(TangentVector.from_flat(vals, shapes).blocks)


# -- subcommands -------------------------------------------------------------------


def cmd_build(args):
    if not args.config:
        raise UsageError("--config is required")
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg.seed = args.seed
        cfg.validate()
    layout, freqs = build(cfg)
    rep = verify_layout(layout)
    text = dump_bundle(make_bundle(cfg, layout, freqs))
    out = args.out or os.path.join(cfg.out, "bundle.json")
    _write(out, text)
    print(f"{len(layout.to_records())} cylinders, disjoint={rep.condition_a}, "
          f"eps_0={rep.eps0:.6g} -> {out}", file=sys.stderr)
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_verify(args):
    try:
        names = suites.resolve(args.suite)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    af, cfg, _ = _open_bundle(args)
    if args.seed is not None:
        cfg.seed = args.seed
    started = datetime.datetime.now(datetime.timezone.utc).isoformat()
    t0 = time.perf_counter()
    report = suites.run(af, cfg, names, progress=lambda n: log.info("running suite %s", n))
    meta = {"started": started, "elapsed": time.perf_counter() - t0, "backend": BACKEND,
            "suites": names, "bundle": os.path.abspath(args.bundle)}
    if args.out:
        _write(args.out, report.to_json(meta))
    print(report.summary())
    for e in report.failures():
        print(f"FAILED: {e.name}", file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_sample(args):
    what = args.what
    af, cfg, _ = _open_bundle(args)
    theta = parse_theta(args.theta, af.shapes) if args.theta is not None else af.theta
    sizes = parse_grid(args.grid, af.d)
    axes = [2 * np.pi * np.arange(n) / n for n in sizes]
    pts = np.stack([g.ravel() for g in np.meshgrid(*axes, indexing="ij")], axis=1)
    phase = theta.shifted(af.nus, args.t)
    d = af.d
    coords = [f"x{i + 1}" for i in range(d)]
    if what == "p":
        raw = af.embedding_pressure(phase, pts)
        header = coords + ["p", "p_mean_free"]
        cols = np.column_stack([pts, raw, raw - af.pressure_mean()])
    else:
        if what == "u":
            vals = af.eval_embedding(phase, pts)
        else:
            vals = af.eval_embedding_derivative(phase, TangentVector(af.nus), pts)
        header = coords + [f"{what}{i + 1}" for i in range(d)] + [f"|{what}|"]
        cols = np.column_stack([pts, vals, np.linalg.norm(vals, axis=1)])
    out = sys.stdout if args.out in (None, "-") else open(args.out, "w", newline="")
    try:
        writer = csv.writer(out)
        writer.writerow(header)
        writer.writerows([repr(float(v)) for v in row] for row in cols)
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def cmd_probe(args):
    if args.bundle:
        af, cfg, _ = _open_bundle(args)
        freqs = af.freqs
    elif args.config:
        cfg = load_config(args.config)
        freqs = build(cfg)[1]
    else:
        raise UsageError("probe-freq needs --bundle or --config")
    pr = cfg.probe
    try:
        res = probe_nonresonance(freqs, weight_max=pr.weight_max, comp_max=pr.comp_max, budget=pr.budget)
    except EnumerationBudgetError as exc:
        print(f"probe aborted: {exc}", file=sys.stderr)
        return EXIT_USAGE
    out = {"minimum": res.minimum, "argmin": res.argmin, "count": res.count, "eta": res.eta,
           "weight_max": res.weight_max, "comp_max": res.comp_max, "passed": res.passed}
    if freqs.mode == "sqrt_prime" and res.argmin:
        out["certificate"] = str(exact_combination(freqs, res.argmin))
    _write(args.out, json.dumps(out, indent=2, sort_keys=True) + "\n")
    return EXIT_OK if res.passed else EXIT_FAIL


def cmd_report(args):
    """Describe a bundle: parameters, cylinders, frequencies and derived constants."""
    af, cfg, data = _open_bundle(args)
    rep = verify_layout(af.layout)
    summary = {
        "parameters": data["parameters"],
        "eps0": rep.eps0,
        "eps11": af.layout.eps11,
        "min_gap": rep.min_gap,
        "uncovered_fraction": rep.leftover,
        "cylinders": data["layout"]["records"],
        "frequency_blocks": data["frequencies"]["blocks"],
        "frequency_sup": af.freqs.sup_norm(),
        "pressure_mean": af.pressure_mean(),
        "kernel_backend": BACKEND,
    }
    _write(args.out, json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def make_parser():
    parser = _Parser(prog="apeuler", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("build", help="select centers and frequencies, write a bundle")
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("verify", help="run verification suites on a bundle")
    p.add_argument("--bundle", required=True)
    p.add_argument("--suite", default="full",
                   help="comma list of " + ", ".join(suites.SUITES) + "; 'full' or 'all'")
    p.add_argument("--out", help="report JSON")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sample", help="sample u, d_t u or p on a grid (CSV)")
    p.add_argument("--bundle", required=True)
    p.add_argument("--grid", default="64")
    p.add_argument("--what", choices=("u", "dtu", "p"), default="u")
    p.add_argument("--t", type=float, default=0.0)
    p.add_argument("--theta")
    p.add_argument("--out")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("probe-freq", help="non-resonance probe of the frequencies")
    p.add_argument("--bundle")
    p.add_argument("--config")
    p.add_argument("--out")
    p.set_defaults(func=cmd_probe)

    p = sub.add_parser("report", help="describe a bundle (JSON)")
    p.add_argument("--bundle", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None):
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a subcommand is required")
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(message)s")
        return args.func(args)
    except UsageError as exc:
        print(f"apeuler: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConfigError, ConstructionError, PackingInfeasibleError) as exc:
        print(f"apeuler: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
