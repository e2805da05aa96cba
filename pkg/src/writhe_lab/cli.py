"""Command-line front end: ``writhe-lab <command> ...``."""

from __future__ import annotations

import argparse
import math
import os
import sys
import warnings

import numpy as np

from . import curves as C
from . import invariants as I
from .errors import WritheLabError
from .fixtures import coplanar_squares
from .io import dumps_csv, dumps_json, read_curves, write_csv, write_curves, \
    write_json
from .pathway import default_tube, run_pathway, traced_frame_writhes
from .reconnection import ReconnectionSite, reconnect_tubes, \
    self_reconnect_tubes

DEFAULT_TOLERANCES = {"conservation": 1e-9}


def _vector(text):
    try:
        parts = [float(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected X,Y,Z, got {text!r}")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected X,Y,Z, got {text!r}")
    return np.array(parts)


def _site(text):
    try:
        i, j = (int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected I,J, got {text!r}")
    if i < 0 or j < 0:
        raise argparse.ArgumentTypeError("site indices must be >= 0")
    return i, j


def _pair(text):
    name, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected NAME=VAL, got {text!r}")
    return name.strip(), value.strip()


def _nonneg(text):
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return v


def build_parser():
    p = argparse.ArgumentParser(
        prog="writhe-lab",
        description="Writhe, twist and helicity of polygonal curves under "
                    "anti-parallel reconnection.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--in", dest="inp", metavar="PATH")
        sp.add_argument("--out", metavar="PATH")
        sp.add_argument("--seed", type=_nonneg, default=0)
        sp.add_argument("--samples", type=_nonneg, default=2 ** 20)
        sp.add_argument("--site", type=_site)
        sp.add_argument("--nu", type=_vector)
        sp.add_argument("--tol", type=_pair, action="append", default=[],
                        metavar="NAME=VAL")
        sp.add_argument("--parallel", action="store_true",
                        help="use the multi-threaded pair kernel")

    g = sub.add_parser("gen", help="write a generated curve file")
    g.add_argument("kind", choices=["circle", "torus_knot", "hopf", "random",
                                    "squares", "twisted"])
    g.add_argument("--param", type=_pair, action="append", default=[],
                   metavar="NAME=VAL")
    common(g)
    for name, text in (("invariants", "report every invariant of a file"),
                       ("reconnect", "reconnect at a site and write the "
                                     "ledger"),
                       ("pathway", "run the trefoil reconnection pathway"),
                       ("sweep", "Monte Carlo writhe convergence table")):
        common(sub.add_parser(name, help=text))
    return p


def _tolerances(pairs):
    tol = dict(DEFAULT_TOLERANCES)
    for name, value in pairs:
        if name not in tol:
            raise WritheLabError(f"unknown tolerance {name!r}; known: "
                                 f"{', '.join(sorted(tol))}")
        v = float(value)
        if not v > 0.0:
            raise WritheLabError(f"tolerance {name} must be positive")
        tol[name] = v
    return tol


def _stem(path):
    root, ext = os.path.splitext(path)
    return root if ext in (".json", ".csv") else path


def _emit(text, path):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


# ---------------------------------------------------------------------------


def cmd_gen(args):
    prm = dict(args.param)

    def get(name, default, cast=float):
        return cast(prm.pop(name, default))

    kind = args.kind
    if kind == "circle":
        n, r = get("n", 64, int), get("radius", 1.0)
        items = [C.make_circle((0.0, 0.0, 0.0), (0.0, 0.0, 1.0), r, n)]
    elif kind == "torus_knot":
        items = [C.make_torus_knot(get("p", 2, int), get("q", 3, int),
                                   get("R", 2.0), get("r", 0.5),
                                   get("n", 256, int))]
    elif kind == "hopf":
        items = list(C.make_hopf_link(get("separation", 1.0),
                                      get("radius", 1.0), get("n", 64, int)))
    elif kind == "random":
        items = [C.make_random_closed_polygon(get("n", 32, int), args.seed)]
    else:
        k = get("k", 0 if kind == "squares" else 1, int)
        a, b, _ = coplanar_squares(k)
        items = [a, b]
    if prm:
        raise WritheLabError(f"unknown parameters for {kind}: "
                             f"{', '.join(sorted(prm))}")
    if args.out is None:
        raise WritheLabError("gen needs --out")
    write_curves(args.out, items)
    return 0


def _ribbon_of(item):
    if isinstance(item, C.FluxTube):
        return item.ribbon
    if isinstance(item, C.Ribbon):
        return item
    return None


def invariants_report(system, items, nu=None, parallel=False):
    comps, rows = [], []
    for k, (curve, item) in enumerate(zip(system, items)):
        rec = {"index": k, "vertices": curve.n, "closed": curve.closed}
        if curve.closed:
            rec["writhe"] = I.writhe(curve, parallel)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", I.DegenerateTorsionWarning)
                rec["total_torsion"] = I.total_torsion(curve)
            rib = _ribbon_of(item)
            if rib is not None:
                rec["twist"] = I.twist(rib)
                rec["intrinsic_twist"] = rec["twist"] - rec["total_torsion"]
                rec["self_linking"] = rec["writhe"] + rec["twist"]
            if isinstance(item, C.FluxTube):
                rec["flux"] = item.flux
                rec["helicity"] = item.flux ** 2 * rec["self_linking"]
        comps.append(rec)
        rows += [("component", str(k), q, v) for q, v in rec.items()
                 if q != "index"]
    pairs = []
    closed = [c.closed for c in system]
    for k in range(len(system)):
        for l in range(k + 1, len(system)):
            if closed[k] and closed[l]:
                lk = I.linking_number_gauss(system[k], system[l])
                pairs.append({"a": k, "b": l, "linking_gauss": lk,
                              "linking": int(round(lk))})
                rows.append(("pair", f"{k}-{l}", "linking_gauss", lk))
                rows.append(("pair", f"{k}-{l}", "linking", int(round(lk))))
    report = {"components": comps, "pairs": pairs}
    if all(closed):
        report["system"] = {"writhe": I.writhe_system(system, parallel)}
        rows.append(("system", "", "writhe", report["system"]["writhe"]))
    if nu is not None:
        norm = float(np.linalg.norm(nu))
        if not norm > 0.0:
            raise WritheLabError("--nu must be a nonzero vector")
        nu = np.asarray(nu, dtype=np.float64) / norm
        rep = I.directional_writhe(system, nu, retry=True)
        report["projection"] = rep.to_dict()
        rows.append(("system", "", "directional_writhe",
                     rep.directional_writhe))
    return report, rows


def cmd_invariants(args):
    if args.inp is None:
        raise WritheLabError("invariants needs --in")
    system, items = read_curves(args.inp)
    report, rows = invariants_report(system, items, args.nu, args.parallel)
    _emit(dumps_json(report), args.out)
    if args.out is not None:
        write_csv(_stem(args.out) + ".csv",
                  ["scope", "index", "quantity", "value"], rows)
    return 0


def _as_tube(item, curve):
    if isinstance(item, C.FluxTube):
        return item
    if isinstance(item, C.Ribbon):
        return C.FluxTube(item, 1.0)
    return default_tube(curve)


def cmd_reconnect(args):
    if args.inp is None or args.site is None:
        raise WritheLabError("reconnect needs --in and --site")
    tol = _tolerances(args.tol)
    system, items = read_curves(args.inp)
    site = ReconnectionSite(*args.site)
    tubes = [_as_tube(it, c) for c, it in zip(system, items)]
    try:
        if len(system) == 2:
            out, led = reconnect_tubes(tubes[0], tubes[1], site,
                                       args.parallel)
            out = [out]
        elif len(system) == 1:
            out, led = self_reconnect_tubes(tubes[0], site, args.parallel)
            out = list(out)
        else:
            raise WritheLabError("reconnect needs one or two components")
    except WritheLabError as exc:
        raise type(exc)(f"site {args.site[0]},{args.site[1]}: {exc}") \
            from None
    ledger = led.to_dict()
    if args.out is not None:
        write_curves(args.out, out)
        write_json(_stem(args.out) + ".ledger.json", ledger)
    else:
        sys.stdout.write(dumps_json(ledger))
    dwr = abs(led.wr_after - led.wr_before)
    if dwr > tol["conservation"]:
        print(f"writhe not conserved: |dWr| = {dwr:.3e} > "
              f"{tol['conservation']:.1e}", file=sys.stderr)
        return 1
    return 0


def cmd_pathway(args):
    if args.out is None:
        raise WritheLabError("pathway needs --out DIR")
    tol = _tolerances(args.tol)
    os.makedirs(args.out, exist_ok=True)
    initial, steps = run_pathway()
    write_curves(os.path.join(args.out, "step0.json"), [initial])
    rows = [(0, "start", 1, 1, "", "", I.writhe(initial), "", "")]
    bad = False
    for s in steps:
        write_curves(os.path.join(args.out, f"step{s.step}.json"),
                     list(s.state))
        write_json(os.path.join(args.out, f"step{s.step}.json").replace(
            ".json", ".report.json"),
            {"step": s.step, "operation": s.operation,
             "components": s.components_after, "writhe_before": s.wr_deformed,
             "writhe_after": s.wr_after, "linking": s.linking_after,
             "ledger": s.ledger})
        lk = s.linking_after[0][1] if s.components_after == 2 else ""
        rows.append((s.step, s.operation, s.components_before,
                     s.components_after, s.wr_start, s.wr_deformed,
                     s.wr_after, s.delta_wr, lk))
        bad |= abs(s.delta_wr) > tol["conservation"]
    write_csv(os.path.join(args.out, "summary.csv"),
              ["step", "operation", "components_before", "components_after",
               "wr_start", "wr_before", "wr_after", "delta_wr", "linking"],
              rows)
    write_csv(os.path.join(args.out, "fig2c.csv"),
              ["frame", "directional_writhe"], traced_frame_writhes())
    return 1 if bad else 0


def sweep_rows(curve, samples, seed):
    values, _ = I.directional_writhe_samples(curve, samples, seed)
    ref = I.writhe(curve)
    x = values.astype(np.float64)
    csum = np.cumsum(x)
    csq = np.cumsum(x * x)
    rows = []
    k = 2
    while k <= len(x):
        mean = csum[k - 1] / k
        var = max(csq[k - 1] / k - mean * mean, 0.0) * k / (k - 1)
        se = math.sqrt(var / k)
        err = abs(mean - ref)
        rows.append((k, mean, se, ref, err, err <= 3.0 * se))
        k *= 2
    return rows


def cmd_sweep(args):
    if args.inp is None:
        raise WritheLabError("sweep needs --in")
    system, _ = read_curves(args.inp)
    if len(system) != 1:
        raise WritheLabError("sweep needs a single-component file")
    rows = sweep_rows(system[0], args.samples, args.seed)
    text = dumps_csv(["samples", "estimate", "stderr", "reference",
                      "abs_error", "within_3_sigma"], rows)
    _emit(text, args.out)
    return 0


COMMANDS = {"gen": cmd_gen, "invariants": cmd_invariants,
            "reconnect": cmd_reconnect, "pathway": cmd_pathway,
            "sweep": cmd_sweep}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except WritheLabError as exc:
        print(f"writhe-lab {args.command}: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"writhe-lab {args.command}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
