"""Stable-solution counts over 2-D parameter slices.

Each grid node is solved independently; nodes where the stable count differs
from a 4-neighbour define boundary edges, and same-count nodes are merged
into connected regions. Reference boundary varieties can then be checked
against the detected edges.
"""
from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import ndimage

from .dksp import EliminationDegenerateError, solve_dksp
from .model import Geometry, Loading
from .special import solve_symmetric, solve_unloaded

AXES = ("rho", "L2", "F3", "F4")
DEFAULTS = {"L1": 1.0, "L2": 1.0, "k": 100.0, "rho": 1.0, "F3": 0.0, "F4": 0.0, "F3x": 0.0, "F4x": 0.0}

FLAG_DEGENERATE = 1
FLAG_MARGINAL = 2
FLAG_BOUNDARY = 4


@dataclass
class SliceSpec:
    axis1: str
    range1: tuple[float, float]
    n1: int
    axis2: str
    range2: tuple[float, float]
    n2: int
    fixed: dict = field(default_factory=dict)
    # (target, source): target parameter copies source, e.g. ("F3", "F4")
    ties: tuple = ()

    def __post_init__(self):
        for ax in (self.axis1, self.axis2):
            if ax not in AXES:
                raise ValueError(f"unknown axis {ax!r}; expected one of {AXES}")
        if self.axis1 == self.axis2:
            raise ValueError("slice axes must differ")
        if self.n1 < 2 or self.n2 < 2:
            raise ValueError("grid resolutions must be >= 2")
        for ax, rng in ((self.axis1, self.range1), (self.axis2, self.range2)):
            if not all(math.isfinite(v) for v in rng):
                raise ValueError(f"range for {ax} must be finite")
            if ax == "rho" and min(rng) <= 0:
                raise ValueError("rho range must be strictly positive")
        unknown = set(self.fixed) - set(DEFAULTS)
        if unknown:
            raise ValueError(f"unknown fixed parameters {sorted(unknown)}")

    @property
    def values1(self) -> np.ndarray:
        return np.linspace(self.range1[0], self.range1[1], self.n1)

    @property
    def values2(self) -> np.ndarray:
        return np.linspace(self.range2[0], self.range2[1], self.n2)

    def params_at(self, v1: float, v2: float) -> dict:
        p = dict(DEFAULTS)
        p.update(self.fixed)
        p[self.axis1] = float(v1)
        p[self.axis2] = float(v2)
        for target, source in self.ties:
            p[target] = p[source]
        return p


@dataclass
class NodeResult:
    stable_count: int
    total_count: int
    flags: int
    # (theta1, theta2, y3, y4) of each stable equilibrium
    stable_poses: tuple = ()


def solve_point(p: dict, method: str = "auto"):
    """Equilibria at one parameter point given as a dict of DEFAULTS keys."""
    g = Geometry(L1=p["L1"], L2=p["L2"], k=p["k"])
    l = Loading(p["F3"], p["F4"], p["F3x"], p["F4x"])
    rho = p["rho"]
    if method == "auto":
        if l.unloaded:
            return solve_unloaded(g, rho)
        if g.L1 == g.L2 and l.F3 == l.F4 and l.F3x == 0 and l.F4x == 0:
            return solve_symmetric(g, l.F4, rho).all
    elif method != "general":
        raise ValueError(f"unknown method {method!r}")
    try:
        return solve_dksp(g, l, rho)
    except EliminationDegenerateError:
        return solve_dksp(g, l, rho, order="t2")


def evaluate_node(p: dict, method: str = "auto") -> NodeResult:
    try:
        sols = solve_point(p, method)
    except (EliminationDegenerateError, ValueError, ArithmeticError):
        return NodeResult(-1, -1, FLAG_DEGENERATE)
    flags = FLAG_MARGINAL if any(s.stability == "marginal" for s in sols) else 0
    stable = [s for s in sols if s.stable]
    poses = tuple((s.config.theta1, s.config.theta2, s.nodes.y3, s.nodes.y4) for s in stable)
    return NodeResult(len(stable), len(sols), flags, poses)


def _evaluate_row(args):
    spec, i, method = args
    v1 = spec.values1[i]
    return [evaluate_node(spec.params_at(v1, v2), method) for v2 in spec.values2]


@dataclass
class RegionMap:
    spec: SliceSpec
    stable: np.ndarray
    total: np.ndarray
    flags: np.ndarray
    boundary_edges: list
    labels: np.ndarray
    region_count: int
    stable_poses: list

    @property
    def values1(self):
        return self.spec.values1

    @property
    def values2(self):
        return self.spec.values2

    def histogram(self) -> dict[int, int]:
        vals, counts = np.unique(self.stable, return_counts=True)
        return {int(v): int(c) for v, c in zip(vals, counts)}

    def interior_mask(self) -> np.ndarray:
        """Nodes not adjacent to a detected transition and not degenerate."""
        return (self.flags & (FLAG_BOUNDARY | FLAG_DEGENERATE)) == 0

    def params_at(self, i: int, j: int) -> dict:
        return self.spec.params_at(self.values1[i], self.values2[j])


def classify_slice(spec: SliceSpec, method: str = "auto", workers: int = 1) -> RegionMap:
    """Solve every grid node of ``spec`` and assemble the region map.

    Rows are evaluated independently (in worker processes when
    ``workers > 1``) and assembled by row index, so the result does not
    depend on the number of workers.
    """
    tasks = [(spec, i, method) for i in range(spec.n1)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            rows = list(ex.map(_evaluate_row, tasks))
    else:
        rows = [_evaluate_row(t) for t in tasks]
    return assemble(spec, rows)


def assemble(spec: SliceSpec, rows) -> RegionMap:
    stable = np.array([[n.stable_count for n in row] for row in rows], dtype=int)
    total = np.array([[n.total_count for n in row] for row in rows], dtype=int)
    flags = np.array([[n.flags for n in row] for row in rows], dtype=int)
    poses = [[n.stable_poses for n in row] for row in rows]

    edges = []
    n1, n2 = stable.shape
    for i in range(n1):
        for j in range(n2):
            for di, dj in ((1, 0), (0, 1)):
                a, b = i + di, j + dj
                if a < n1 and b < n2 and stable[i, j] != stable[a, b]:
                    edges.append(((i, j), (a, b)))
                    flags[i, j] |= FLAG_BOUNDARY
                    flags[a, b] |= FLAG_BOUNDARY

    labels = np.zeros(stable.shape, dtype=int)
    count = 0
    for value in np.unique(stable):
        lab, n = ndimage.label(stable == value)
        labels[lab > 0] = lab[lab > 0] + count
        count += n
    return RegionMap(spec, stable, total, flags, edges, labels, count, poses)


def connected_regions(m: RegionMap, value: int, interior_only: bool = False) -> int:
    """Number of 4-connected components of nodes with the given stable count."""
    mask = m.stable == value
    if interior_only:
        mask &= m.interior_mask()
    return int(ndimage.label(mask)[1])


@dataclass(frozen=True)
class Variety:
    """Zero set of a function of the parameter dict (keys as in DEFAULTS)."""

    name: str
    func: Callable[[dict], float]

    def __call__(self, p: dict) -> float:
        return self.func(p)


def _sextic_a(p):
    F, r = p["F4"], p["rho"]
    return F ** 6 + 12e4 * F ** 4 * r ** 2 + 48e8 * F ** 2 * r ** 4 + 64e12 * r ** 6 - 16e8 * F ** 2 * r ** 2


def _sextic_b(p):
    F, r = p["F4"], p["rho"]
    return (F ** 6 + 12e4 * F ** 4 * r ** 2 + 48e8 * F ** 2 * r ** 4 + 64e12 * r ** 6 - 12e4 * F ** 4
            + 336e8 * F ** 2 * r ** 2 - 192e12 * r ** 4 + 48e8 * F ** 2 + 192e12 * r ** 2 - 64e12)


# k = 100 and L1 = 1 are baked into these coefficients
UNLOADED_LINES = (
    Variety("2rho-L2-1", lambda p: 2 * p["rho"] - p["L2"] - 1),
    Variety("2rho-L2+1", lambda p: 2 * p["rho"] - p["L2"] + 1),
    Variety("2rho+L2-1", lambda p: 2 * p["rho"] + p["L2"] - 1),
)
SYMMETRIC_SEXTICS = (Variety("sextic-a", _sextic_a), Variety("sextic-b", _sextic_b))
BUILTIN_VARIETIES = {"unloaded": UNLOADED_LINES, "symmetric": SYMMETRIC_SEXTICS}


def builtin_for(spec: SliceSpec) -> tuple[Variety, ...]:
    """Built-in varieties matching the slice kind, or () if none apply."""
    p = spec.params_at(*(spec.values1[0], spec.values2[0]))
    axes = {spec.axis1, spec.axis2}
    loads_fixed = spec.axis1 not in ("F3", "F4") and spec.axis2 not in ("F3", "F4")
    if axes == {"rho", "L2"} and loads_fixed and all(p[f] == 0 for f in ("F3", "F4", "F3x", "F4x")):
        return UNLOADED_LINES
    tied = ("F3", "F4") in spec.ties or ("F4", "F3") in spec.ties
    if axes == {"rho", "F4"} and tied and p["L2"] == p["L1"] == 1.0 and p["k"] == 100.0:
        return SYMMETRIC_SEXTICS
    return ()


@dataclass
class AlignmentReport:
    fraction: float
    worst_distance: float
    n_edges: int
    n_aligned: int
    misaligned: list
    mismatch: bool
    # fraction aligned by the sign-change test alone (no distance fallback)
    sign_fraction: float = 1.0


def _grid_point(m: RegionMap, x: float, y: float) -> dict:
    """Parameters at fractional grid coordinates (x along axis1, y along axis2)."""
    s = m.spec
    h1 = (s.range1[1] - s.range1[0]) / (s.n1 - 1)
    h2 = (s.range2[1] - s.range2[0]) / (s.n2 - 1)
    return s.params_at(s.range1[0] + x * h1, s.range2[0] + y * h2)


def verify_boundaries(m: RegionMap, varieties, threshold: float = 0.9) -> AlignmentReport:
    """Check detected boundary edges against the zero sets of ``varieties``.

    An edge is aligned when some variety changes sign across it, or across
    the edge extended by one grid step on each side, or when the first-order
    distance |v| / |grad v| at the edge midpoint (in grid steps) is at most
    one step. ``worst_distance`` is the largest such distance over all edges,
    taking the nearest variety for each.
    """
    varieties = tuple(varieties)
    if not m.boundary_edges:
        return AlignmentReport(1.0, 0.0, 0, 0, [], False)
    aligned = 0
    by_sign = 0
    worst = 0.0
    bad = []
    for (i, j), (a, b) in m.boundary_edges:
        di, dj = a - i, b - j
        pts = [(i - di, j - dj), (i, j), (a, b), (a + di, b + dj)]
        mid = (i + 0.5 * di, j + 0.5 * dj)
        ok = False
        sign = False
        best = math.inf
        for v in varieties:
            vals = [v(_grid_point(m, *pt)) for pt in pts]
            if vals[1] * vals[2] <= 0 or vals[0] * vals[1] <= 0 or vals[2] * vals[3] <= 0:
                ok = sign = True
            vm = v(_grid_point(m, *mid))
            gx = v(_grid_point(m, mid[0] + 0.5, mid[1])) - v(_grid_point(m, mid[0] - 0.5, mid[1]))
            gy = v(_grid_point(m, mid[0], mid[1] + 0.5)) - v(_grid_point(m, mid[0], mid[1] - 0.5))
            gnorm = math.hypot(gx, gy)
            dist = abs(vm) / gnorm if gnorm > 0 else (0.0 if vm == 0 else math.inf)
            best = min(best, dist)
        if best <= 1.0:
            ok = True
        worst = max(worst, best)
        by_sign += sign
        if ok:
            aligned += 1
        else:
            bad.append(((i, j), (a, b)))
    n = len(m.boundary_edges)
    frac = aligned / n
    return AlignmentReport(frac, worst, n, aligned, bad, frac < threshold, by_sign / n)


@dataclass
class SweepSpec:
    rho_range: tuple[float, float]
    n: int
    fixed: dict = field(default_factory=dict)
    ties: tuple = ()

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("sweep needs at least 2 points")
        if min(self.rho_range) <= 0:
            raise ValueError("rho range must be strictly positive")
        unknown = set(self.fixed) - set(DEFAULTS)
        if unknown:
            raise ValueError(f"unknown fixed parameters {sorted(unknown)}")

    @property
    def values(self) -> np.ndarray:
        return np.linspace(self.rho_range[0], self.rho_range[1], self.n)

    @property
    def step(self) -> float:
        return (self.rho_range[1] - self.rho_range[0]) / (self.n - 1)

    def params_at(self, rho: float) -> dict:
        p = dict(DEFAULTS)
        p.update(self.fixed)
        p["rho"] = float(rho)
        for target, source in self.ties:
            p[target] = p[source]
        return p


@dataclass
class OperationRange:
    intervals: list
    rhos: np.ndarray
    stable_counts: np.ndarray
    solutions: list

    @property
    def widths(self) -> list[float]:
        return [hi - lo for lo, hi in self.intervals]


def sweep_rho(spec: SweepSpec, method: str = "auto") -> list:
    """(rho, equilibria) for every sweep point."""
    return [(float(r), solve_point(spec.params_at(r), method)) for r in spec.values]


def operation_range(spec: SweepSpec, method: str = "auto", count: int = 2) -> OperationRange:
    """Maximal runs of sweep points with exactly ``count`` stable equilibria.

    Each run is reported as an interval whose endpoints are the crossing
    estimates halfway to the neighbouring grid node outside the run (or the
    sweep end when the run touches it), so endpoints are within half a step
    of the true transition.
    """
    rows = sweep_rho(spec, method)
    rhos = np.array([r for r, _ in rows])
    counts = np.array([sum(1 for s in sols if s.stable) for _, sols in rows])
    inside = np.concatenate([[False], counts == count, [False]])
    starts = np.flatnonzero(~inside[:-1] & inside[1:])
    stops = np.flatnonzero(inside[:-1] & ~inside[1:]) - 1
    intervals = []
    for a, b in zip(starts, stops):
        lo = rhos[a] if a == 0 else 0.5 * (rhos[a - 1] + rhos[a])
        hi = rhos[b] if b == len(rhos) - 1 else 0.5 * (rhos[b] + rhos[b + 1])
        intervals.append((float(lo), float(hi)))
    return OperationRange(intervals, rhos, counts, [s for _, s in rows])


def reverse_configuration_check(m: RegionMap):
    """Per-node flag: the single stable pose has y3 < 0 and y4 < 0.

    Returns a float array (1.0 true, 0.0 false, nan where the node does not
    have exactly one stable equilibrium), or None for an unloaded slice.
    """
    p0 = m.params_at(0, 0)
    loaded = any(ax in ("F3", "F4") for ax in (m.spec.axis1, m.spec.axis2)) or any(
        p0[f] != 0 for f in ("F3", "F4", "F3x", "F4x"))
    if not loaded:
        return None
    out = np.full(m.stable.shape, np.nan)
    for i in range(m.stable.shape[0]):
        for j in range(m.stable.shape[1]):
            if m.stable[i, j] == 1:
                _, _, y3, y4 = m.stable_poses[i][j][0]
                out[i, j] = 1.0 if (y3 < 0 and y4 < 0) else 0.0
    return out


def _fmt(v) -> str:
    return format(float(v), ".17g")


def write_csv(m: RegionMap, path) -> None:
    """One row per node: axis1, axis2, stable_count, total_count, flags."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([m.spec.axis1, m.spec.axis2, "stable_count", "total_count", "flags"])
        for i, v1 in enumerate(m.values1):
            for j, v2 in enumerate(m.values2):
                w.writerow([_fmt(v1), _fmt(v2), int(m.stable[i, j]), int(m.total[i, j]), int(m.flags[i, j])])


def read_csv(path) -> dict:
    """Parse a region-map CSV into column arrays keyed by header name."""
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        rows = list(r)
    cols = {}
    for k, name in enumerate(header):
        conv = float if k < 2 else int
        cols[name] = np.array([conv(row[k]) for row in rows])
    return cols


def render_svg(m: RegionMap, path, varieties=()) -> None:
    """Colored stable-count map with variety zero contours overlaid."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    from matplotlib.colors import BoundaryNorm, ListedColormap

    matplotlib.rcParams["svg.hashsalt"] = "tensegrity-ptm"
    cmap = ListedColormap(["#444444", "#dddddd", "#4c72b0", "#c44e52", "#8172b2"])
    norm = BoundaryNorm([-1.5, -0.5, 0.5, 1.5, 2.5, 3.5], cmap.N)
    fig, ax = plt.subplots(figsize=(6, 5))
    x, y = m.values2, m.values1
    mesh = ax.pcolormesh(x, y, m.stable, cmap=cmap, norm=norm, shading="nearest")
    cb = fig.colorbar(mesh, ax=ax, ticks=[-1, 0, 1, 2, 3])
    cb.set_label("stable equilibria")
    if varieties:
        X, Y = np.meshgrid(np.linspace(x[0], x[-1], 400), np.linspace(y[0], y[-1], 400))
        for v in varieties:
            Z = np.vectorize(lambda a, b: v(m.spec.params_at(b, a)))(X, Y)
            ax.contour(X, Y, Z, levels=[0.0], colors="k", linewidths=1.0)
    ax.set_xlabel(m.spec.axis2)
    ax.set_ylabel(m.spec.axis1)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
