"""Command line interface: solve, sweep, classify, repro.

Every command accepts ``--config FILE``, a flat ``key = value`` file whose keys
are the long option names (dashes or underscores); options given on the
command line override the file. Exit codes: 0 success, 1 configuration error,
2 solver degeneracy, 3 I/O error.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

from . import __version__
from .atlas import (
    DEFAULTS,
    BUILTIN_VARIETIES,
    SliceSpec,
    SweepSpec,
    builtin_for,
    classify_slice,
    operation_range,
    render_svg,
    solve_point,
    verify_boundaries,
    write_csv,
)
from .dksp import EliminationDegenerateError
from .freelength import solve_freelength
from .model import Geometry, Loading

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER, EXIT_IO = 0, 1, 2, 3


class ConfigError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def read_config(path) -> dict:
    """Parse a flat ``key = value`` file; ``#`` starts a comment."""
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def _add_mechanism(p):
    g = p.add_argument_group("mechanism")
    g.add_argument("--L1", type=float, help="strut A1A3 length (default 1)")
    g.add_argument("--L2", type=float, help="strut A2A4 length (default 1)")
    g.add_argument("--k", type=float, help="spring stiffness (default 100)")
    g.add_argument("--l0", type=float, help="spring free length (default 0)")
    g.add_argument("--F3", type=float, help="vertical force at A3 (default 0)")
    g.add_argument("--F4", type=float, help="vertical force at A4 (default 0)")
    g.add_argument("--F3x", type=float, help="horizontal force at A3 (default 0)")
    g.add_argument("--F4x", type=float, help="horizontal force at A4 (default 0)")
    g.add_argument("--tie", action="append", metavar="TARGET=SOURCE",
                   help="copy one parameter from another, e.g. F3=F4 (repeatable)")
    p.add_argument("--config", help="flat key = value config file")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tensegrity-ptm", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    s = sub.add_parser("solve", help="all equilibria at one actuator input")
    _add_mechanism(s)
    s.add_argument("--rho", type=float, help="actuator length (default 1)")
    s.add_argument("--format", choices=("table", "json"), help="output format (default table)")
    s.add_argument("--output", help="write JSON to this file instead of stdout")
    s.add_argument("--method", choices=("auto", "general"), help="fast paths or elimination only (default auto)")
    s.add_argument("--seeds", type=int, help="free-length seed grid size per angle (default 24)")

    w = sub.add_parser("sweep", help="equilibria along a 1-D rho sweep")
    _add_mechanism(w)
    w.add_argument("--rho-min", type=float, help="sweep start (default 0.005)")
    w.add_argument("--rho-max", type=float, help="sweep end (default 4)")
    w.add_argument("--n", type=int, help="number of sweep points (default 800)")
    w.add_argument("--output", help="CSV of per-(rho, branch) rows (default sweep.csv)")
    w.add_argument("--method", choices=("auto", "general"))

    c = sub.add_parser("classify", help="stable-count map over a 2-D slice")
    _add_mechanism(c)
    c.add_argument("--rho", type=float, help="fixed rho when not an axis")
    c.add_argument("--axis1", choices=("rho", "L2", "F3", "F4"), help="row axis (default rho)")
    c.add_argument("--min1", type=float)
    c.add_argument("--max1", type=float)
    c.add_argument("--n1", type=int, help="row resolution (default 200)")
    c.add_argument("--axis2", choices=("rho", "L2", "F3", "F4"), help="column axis (default L2)")
    c.add_argument("--min2", type=float)
    c.add_argument("--max2", type=float)
    c.add_argument("--n2", type=int, help="column resolution (default 200)")
    c.add_argument("--csv", help="region map CSV (default map.csv)")
    c.add_argument("--svg", help="region map SVG (default map.svg)")
    c.add_argument("--verify-varieties", choices=("none", "builtin", *BUILTIN_VARIETIES),
                   help="overlay/verify built-in boundary varieties (default none)")
    c.add_argument("--method", choices=("auto", "general"))
    c.add_argument("--workers", type=int, help="worker processes (default 1)")

    r = sub.add_parser("repro", help="run the full reproduction suite")
    r.add_argument("--config", help="flat key = value config file")
    r.add_argument("--out", help="output directory (default repro_out)")
    r.add_argument("--resolution", type=int, help="slice grid resolution (default 200)")
    r.add_argument("--workers", type=int)
    return parser


COMMAND_DEFAULTS = {
    "solve": {"rho": 1.0, "format": "table", "output": None, "method": "auto", "seeds": 24},
    "sweep": {"rho_min": 0.005, "rho_max": 4.0, "n": 800, "output": "sweep.csv", "method": "auto"},
    "classify": {"rho": 1.0, "axis1": "rho", "min1": 0.01, "max1": 2.0, "n1": 200,
                 "axis2": "L2", "min2": 0.01, "max2": 2.0, "n2": 200, "csv": "map.csv",
                 "svg": "map.svg", "verify_varieties": "none", "method": "auto", "workers": 1},
    "repro": {"out": "repro_out", "resolution": 200, "workers": 1},
}
MECHANISM_KEYS = ("L1", "L2", "k", "l0", "F3", "F4", "F3x", "F4x", "tie")


def resolve_options(parser, argv) -> argparse.Namespace:
    """Parse ``argv`` and merge: built-in defaults < config file < command line."""
    args = parser.parse_args(argv)
    if args.command is None:
        raise ConfigError("a command is required (solve, sweep, classify, repro)")
    known = dict(COMMAND_DEFAULTS[args.command])
    if args.command != "repro":
        known.update({"L1": 1.0, "L2": 1.0, "k": 100.0, "l0": 0.0, "F3": 0.0, "F4": 0.0,
                      "F3x": 0.0, "F4x": 0.0, "tie": None})
    merged = dict(known)
    if getattr(args, "config", None):
        cfg = read_config(args.config)
        unknown = sorted(set(cfg) - set(known))
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        for key, raw in cfg.items():
            merged[key] = _coerce(key, raw, known[key])
    for key in known:
        val = getattr(args, key, None)
        if val is not None:
            merged[key] = val
    ns = argparse.Namespace(command=args.command, **merged)
    return ns


def _coerce(key, raw, default):
    try:
        if key == "tie":
            return [t.strip() for t in raw.split(",") if t.strip()]
        if isinstance(default, bool):
            return raw.lower() in ("1", "true", "yes")
        if isinstance(default, int):
            return int(raw)
        if isinstance(default, float):
            return float(raw)
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {raw!r}") from exc
    return raw


def _ties(opts) -> tuple:
    out = []
    for t in opts.tie or ():
        if "=" not in t:
            raise ConfigError(f"tie must look like TARGET=SOURCE, got {t!r}")
        a, b = (s.strip() for s in t.split("=", 1))
        if a not in DEFAULTS or b not in DEFAULTS:
            raise ConfigError(f"unknown parameter in tie {t!r}")
        out.append((a, b))
    return tuple(out)


def _fixed(opts) -> dict:
    return {k: getattr(opts, k) for k in ("L1", "L2", "k", "F3", "F4", "F3x", "F4x")}


def _fmt(v) -> str:
    return format(float(v), ".17g")


def equilibrium_record(e, degrees: bool = True) -> dict:
    rec = {
        "theta1": e.config.theta1,
        "theta2": e.config.theta2,
    }
    if degrees:
        rec["theta1_deg"] = math.degrees(e.config.theta1)
        rec["theta2_deg"] = math.degrees(e.config.theta2)
    rec.update({
        "x3": e.nodes.x3, "y3": e.nodes.y3, "x4": e.nodes.x4, "y4": e.nodes.y4,
        "energy": e.energy, "minor1": e.minor1, "det_h": e.det_h,
        "stability": e.stability, "flat": e.flat, "residual": e.residual,
    })
    return rec


def cmd_solve(opts, out=None) -> int:
    out = out or sys.stdout
    p = dict(DEFAULTS)
    p.update(_fixed(opts))
    p["rho"] = opts.rho
    for a, b in _ties(opts):
        p[a] = p[b]
    g = Geometry(L1=p["L1"], L2=p["L2"], k=p["k"], l0=opts.l0)
    l = Loading(p["F3"], p["F4"], p["F3x"], p["F4x"])
    doc = {
        "command": "solve",
        "geometry": {"L1": g.L1, "L2": g.L2, "k": g.k, "l0": g.l0},
        "loading": {"F3": l.F3, "F4": l.F4, "F3x": l.F3x, "F4x": l.F4x},
        "rho": opts.rho,
    }
    if g.l0 > 0:
        res = solve_freelength(g, l, opts.rho, seeds=opts.seeds)
        sols = res.equilibria
        st = res.multistart_stats
        doc["solver"] = "freelength"
        doc["freelength"] = {
            "seeds": st.seeds, "converged": st.converged, "degenerate": st.degenerate,
            "deduplicated": st.deduplicated, "rejected_short_spring": res.rejected_short_spring,
            "margins": res.margins,
        }
    else:
        sols = solve_point(p, opts.method)
        doc["solver"] = "dksp" if opts.method == "general" else "auto"
    doc["stable_count"] = sum(1 for e in sols if e.stable)
    doc["equilibria"] = [equilibrium_record(e, degrees=opts.output is None) for e in sols]

    if opts.format == "json" or opts.output:
        text = json.dumps(doc, indent=2)
        if opts.output:
            Path(opts.output).write_text(text + "\n")
        else:
            print(text, file=out)
        return EXIT_OK

    print(f"rho = {opts.rho:g}   L1 = {g.L1:g}  L2 = {g.L2:g}  k = {g.k:g}  l0 = {g.l0:g}   "
          f"F3 = {l.F3:g}  F4 = {l.F4:g}  F3x = {l.F3x:g}  F4x = {l.F4x:g}", file=out)
    hdr = f"{'#':>2} {'theta1[rad]':>12} {'theta2[rad]':>12} {'theta1[deg]':>12} {'theta2[deg]':>12} " \
          f"{'y3':>9} {'y4':>9} {'energy':>11} {'H11':>11} {'det(H)':>12}  stability"
    print(hdr, file=out)
    for idx, e in enumerate(sols):
        flat = " (flat)" if e.flat else ""
        print(f"{idx:>2} {e.config.theta1:>12.6f} {e.config.theta2:>12.6f} "
              f"{math.degrees(e.config.theta1):>12.4f} {math.degrees(e.config.theta2):>12.4f} "
              f"{e.nodes.y3:>9.4f} {e.nodes.y4:>9.4f} {e.energy:>11.4f} {e.minor1:>11.4f} "
              f"{e.det_h:>12.4f}  {e.stability}{flat}", file=out)
    print(f"{len(sols)} equilibria, {doc['stable_count']} stable", file=out)
    if "freelength" in doc:
        f = doc["freelength"]
        print(f"multistart: {f['seeds']} seeds, {f['converged']} converged, {f['degenerate']} degenerate, "
              f"{f['deduplicated']} distinct, {f['rejected_short_spring']} rejected (spring <= l0)", file=out)
    return EXIT_OK


def cmd_sweep(opts, out=None) -> int:
    out = out or sys.stdout
    if opts.l0 != 0:
        raise ConfigError("sweep supports zero free length only")
    spec = SweepSpec((opts.rho_min, opts.rho_max), opts.n, fixed=_fixed(opts), ties=_ties(opts))
    rng = operation_range(spec, opts.method)
    with open(opts.output, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["rho", "branch", "theta1", "theta2", "y3", "y4", "energy", "minor1", "det_h", "stability"])
        for rho, sols in zip(rng.rhos, rng.solutions):
            for b, e in enumerate(sols):
                w.writerow([_fmt(rho), b, _fmt(e.config.theta1), _fmt(e.config.theta2), _fmt(e.nodes.y3),
                            _fmt(e.nodes.y4), _fmt(e.energy), _fmt(e.minor1), _fmt(e.det_h), e.stability])
    ivs = ", ".join(f"[{lo:.6g}, {hi:.6g}] (width {hi - lo:.6g})" for lo, hi in rng.intervals) or "none"
    print(f"sweep: {spec.n} points, step {spec.step:.6g}; 2-stable intervals: {ivs}", file=out)
    return EXIT_OK


def _slice_from(opts) -> SliceSpec:
    fixed = _fixed(opts)
    fixed["rho"] = opts.rho
    for ax in (opts.axis1, opts.axis2):
        fixed.pop(ax, None)
    return SliceSpec(opts.axis1, (opts.min1, opts.max1), opts.n1, opts.axis2, (opts.min2, opts.max2),
                     opts.n2, fixed=fixed, ties=_ties(opts))


def _varieties(opts, spec):
    if opts.verify_varieties == "none":
        return ()
    if opts.verify_varieties == "builtin":
        return builtin_for(spec)
    return BUILTIN_VARIETIES[opts.verify_varieties]


def cmd_classify(opts, out=None) -> int:
    out = out or sys.stdout
    if opts.l0 != 0:
        raise ConfigError("classify supports zero free length only")
    spec = _slice_from(opts)
    m = classify_slice(spec, method=opts.method, workers=opts.workers)
    vs = _varieties(opts, spec)
    write_csv(m, opts.csv)
    if opts.svg:
        render_svg(m, opts.svg, vs)
    hist = ", ".join(f"{k}: {v}" for k, v in m.histogram().items())
    line = f"classify: {spec.n1}x{spec.n2} nodes, {m.region_count} regions, stable-count histogram {{{hist}}}"
    if vs:
        rep = verify_boundaries(m, vs)
        line += f", alignment {rep.fraction:.4f} over {rep.n_edges} edges (worst {rep.worst_distance:.3g} steps)"
    elif opts.verify_varieties == "builtin":
        line += ", no built-in varieties for this slice"
    print(line, file=out)
    return EXIT_OK


def cmd_repro(opts, out=None) -> int:
    out = out or sys.stdout
    from .repro import run_repro

    run_repro(Path(opts.out), resolution=opts.resolution, workers=opts.workers, log=out)
    return EXIT_OK


COMMANDS = {"solve": cmd_solve, "sweep": cmd_sweep, "classify": cmd_classify, "repro": cmd_repro}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        opts = resolve_options(parser, argv)
        return COMMANDS[opts.command](opts)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except EliminationDegenerateError as exc:
        print(f"solver degeneracy: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
