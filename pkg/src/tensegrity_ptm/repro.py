"""Reproduction suite: reference points, sweeps and slices plus a markdown report.

The report only contains derived numbers (no timings or paths), so two runs
with the same resolution produce byte-identical output directories.
"""
from __future__ import annotations

import math
import sys
from pathlib import Path

import numpy as np

from .atlas import (
    SliceSpec,
    SweepSpec,
    UNLOADED_LINES,
    SYMMETRIC_SEXTICS,
    classify_slice,
    connected_regions,
    operation_range,
    render_svg,
    reverse_configuration_check,
    solve_point,
    verify_boundaries,
    write_csv,
)

# Point checks: name -> parameters (others default)
POINTS = {
    "unloaded": {"L2": 1.5, "rho": 1.0},
    "symmetric": {"F3": -10.0, "F4": -10.0, "rho": 0.75},
    "general": {"L2": 1.5, "F3": -10.0, "F4": -10.0, "rho": 0.7},
}

# Ranges avoid grid nodes that sit exactly on a boundary line.
SLICES = {
    "unloaded": dict(axis1="rho", range1=(0.0131, 1.9937), axis2="L2", range2=(0.0173, 2.9971)),
    "symmetric": dict(axis1="rho", range1=(0.0107, 1.9967), axis2="F4", range2=(-10.0, 0.0),
                      ties=(("F3", "F4"),)),
    "rhoL2-F-10": dict(axis1="rho", range1=(0.01, 2.0), axis2="L2", range2=(0.01, 2.0),
                    fixed={"F3": -10.0, "F4": -10.0}),
    "rhoF4-F3-10": dict(axis1="rho", range1=(0.01, 2.0), axis2="F4", range2=(-30.0, 0.0),
                            fixed={"F3": -10.0, "L2": 1.5}),
    "rhoF4-F3-30": dict(axis1="rho", range1=(0.01, 2.0), axis2="F4", range2=(-30.0, 0.0),
                               fixed={"F3": -30.0, "L2": 1.0}),
}
SLICE_VARIETIES = {"unloaded": UNLOADED_LINES, "symmetric": SYMMETRIC_SEXTICS}

SWEEPS = {
    "unloaded L2=1.5": {"L2": 1.5},
    "unloaded L2=0.5": {"L2": 0.5},
    "symmetric F=-10": {"F3": -10.0, "F4": -10.0},
    "general L2=1 F=-10": {"L2": 1.0, "F3": -10.0, "F4": -10.0},
}


def _hist(h: dict) -> str:
    return ", ".join(f"{k}: {v}" for k, v in h.items())


def run_repro(out: Path, resolution: int = 200, workers: int = 1, log=None) -> dict:
    """Run every check, write CSV/SVG artefacts and ``report.md`` into ``out``."""
    log = log or sys.stdout
    out.mkdir(parents=True, exist_ok=True)
    lines = ["# Reproduction report", "", f"Slice resolution: {resolution} x {resolution}.", ""]
    summary = {"points": {}, "slices": {}, "sweeps": {}}

    lines += ["## Point checks", "",
              "| case | parameters | equilibria | stable | stable poses (theta1, theta2) [deg] |",
              "|---|---|---|---|---|"]
    for name, par in POINTS.items():
        p = {"L1": 1.0, "L2": 1.0, "k": 100.0, "F3": 0.0, "F4": 0.0, "F3x": 0.0, "F4x": 0.0}
        p.update(par)
        sols = solve_point(p, "general")
        stable = [e for e in sols if e.stable]
        poses = "; ".join(f"({math.degrees(e.config.theta1):.4f}, {math.degrees(e.config.theta2):.4f})"
                          for e in stable)
        desc = ", ".join(f"{k}={v:g}" for k, v in par.items())
        lines.append(f"| {name} | {desc} | {len(sols)} | {len(stable)} | {poses} |")
        summary["points"][name] = len(stable)
        print(f"point {name}: {len(sols)} equilibria, {len(stable)} stable", file=log)

    lines += ["", "## Operation ranges (1-D rho sweeps, step 0.005)", "",
              "| sweep | 2-stable intervals | widths |", "|---|---|---|"]
    for name, fixed in SWEEPS.items():
        rng = operation_range(SweepSpec((0.005, 4.0), 800, fixed=fixed))
        ivs = "; ".join(f"[{lo:.3f}, {hi:.3f}]" for lo, hi in rng.intervals) or "none"
        ws = "; ".join(f"{w:.3f}" for w in rng.widths) or "-"
        lines.append(f"| {name} | {ivs} | {ws} |")
        summary["sweeps"][name] = rng.widths
        print(f"sweep {name}: {ivs}", file=log)

    lines += ["", "## Slices", "",
              "| slice | fixed | regions | 2-stable components | histogram | boundary alignment |",
              "|---|---|---|---|---|---|"]
    for name, kw in SLICES.items():
        spec = SliceSpec(n1=resolution, n2=resolution, **kw)
        m = classify_slice(spec, workers=workers)
        vs = SLICE_VARIETIES.get(name, ())
        write_csv(m, out / f"{name}.csv")
        render_svg(m, out / f"{name}.svg", vs)
        align = "-"
        rec = {"histogram": m.histogram(), "components2": connected_regions(m, 2)}
        if vs:
            rep = verify_boundaries(m, vs)
            align = f"{rep.fraction:.4f} of {rep.n_edges} edges"
            rec["alignment"] = rep.fraction
        rev = reverse_configuration_check(m)
        if rev is not None and np.any(np.isfinite(rev)):
            rec["reverse_fraction"] = float(np.nanmean(rev))
        fixed = ", ".join(f"{k}={v:g}" for k, v in kw.get("fixed", {}).items())
        fixed += "".join(f"{a}={b}" for a, b in kw.get("ties", ()))
        lines.append(f"| {name} | {fixed or '-'} | {m.region_count} | {rec['components2']} | "
                     f"{{{_hist(rec['histogram'])}}} | {align} |")
        summary["slices"][name] = rec
        print(f"slice {name}: histogram {{{_hist(rec['histogram'])}}}, alignment {align}", file=log)

    lines += ["", "## Notes", ""]
    rev = [f"{n}: {r['reverse_fraction']:.3f}" for n, r in summary["slices"].items() if "reverse_fraction" in r]
    lines.append("Fraction of 1-stable nodes whose stable pose has both struts below the base "
                 "(reverse configuration): " + (", ".join(rev) or "n/a") + ".")
    lines.append("")
    h10 = summary["slices"]["rhoF4-F3-10"]["histogram"]
    h30 = summary["slices"]["rhoF4-F3-30"]["histogram"]
    lines.append("The (rho, F4) slice for the general case has two conflicting reference parameter sets: "
                 "F3 = -10 with L2 = 1.5, and F3 = -30 with L2 = 1. Both were run. "
                 f"Stable-count values: F3 = -10 gives {sorted(h10)}, F3 = -30 gives {sorted(h30)}. "
                 "The discrepancy is recorded, not resolved.")
    lines.append("")
    (out / "report.md").write_text("\n".join(lines))
    return summary
