import math
from dataclasses import replace

import numpy as np
import pytest

from tensegrity_ptm.dksp import solve_dksp
from tensegrity_ptm.freelength import gradient_residual, seed_grid, solve_freelength
from tensegrity_ptm.model import Geometry, Loading, gradient, spring_lengths

import _oracles
from _util import split

SYMMETRIC_POINT = dict(L1=1.0, L2=1.0, k=100.0, rho=0.75, F3=-10.0, F4=-10.0)


def angles(sols):
    return [s.angles for s in sols]


def test_seed_grid():
    a, b = seed_grid(4)
    assert len(a) == 16
    assert np.all(np.abs(a) < math.pi) and np.all(np.abs(b) < math.pi)
    assert sorted(set(np.round(a, 12))) == pytest.approx([-3 * math.pi / 4, -math.pi / 4, math.pi / 4, 3 * math.pi / 4])


def test_requires_positive_free_length():
    with pytest.raises(ValueError):
        solve_freelength(Geometry(), Loading(), 1.0)
    with pytest.raises(ValueError):
        solve_freelength(Geometry(l0=0.1), Loading(), 0.0)


@pytest.mark.parametrize("seed", range(10))
def test_zero_limit_matches_dksp(seed):
    rng = np.random.default_rng(500 + seed)
    p = _oracles.random_params(rng, horizontal=seed % 3 == 0)
    g, l, rho = split(p)
    ref = angles(solve_dksp(g, l, rho))
    got = angles(solve_freelength(replace(g, l0=1e-8), l, rho).equilibria)
    assert _oracles.match(got, ref, 1e-5)


def test_accepted_are_admissible_equilibria():
    rng = np.random.default_rng(9)
    for _ in range(20):
        p = _oracles.random_params(rng, horizontal=True, l0=True)
        g, l, rho = split(p)
        res = solve_freelength(g, l, rho)
        assert len(res.equilibria) <= 6
        assert len(res.margins) == len(res.equilibria)
        for e, m in zip(res.equilibria, res.margins):
            assert min(spring_lengths(g, e.config)) > g.l0
            assert m > 0
            gr = gradient(g, l, e.config)
            assert np.linalg.norm(gr) < 1e-8 * g.scale
            assert gradient_residual(g, *gr) < 1e-8


def test_stats_are_consistent():
    g, l, rho = split(dict(SYMMETRIC_POINT, l0=0.1))
    res = solve_freelength(g, l, rho, seeds=10)
    st = res.multistart_stats
    assert st.seeds == 100 + len(solve_dksp(replace(g, l0=0.0), l, rho))
    assert st.converged <= st.seeds - st.degenerate
    assert st.deduplicated >= len(res.equilibria)
    assert res.rejected_short_spring + len(res.equilibria) <= st.deduplicated


def test_continuity_in_free_length():
    # stable poses move continuously as l0 grows from zero
    g, l, rho = split(SYMMETRIC_POINT)
    prev = [e.angles for e in solve_dksp(g, l, rho) if e.stable]
    for l0 in np.linspace(0.01, 0.15, 8):
        cur = [e.angles for e in solve_freelength(replace(g, l0=float(l0)), l, rho).equilibria if e.stable]
        assert _oracles.match(cur, prev, 0.05)
        prev = cur


def test_deterministic():
    g, l, rho = split(dict(SYMMETRIC_POINT, l0=0.2))
    a = solve_freelength(g, l, rho)
    b = solve_freelength(g, l, rho)
    assert angles(a.equilibria) == angles(b.equilibria)


@pytest.mark.parametrize("seed", range(4))
def test_complete_against_grid(seed):
    rng = np.random.default_rng(900 + seed)
    p = _oracles.random_params(rng, horizontal=True, l0=True)
    g, l, rho = split(p)
    got = angles(solve_freelength(g, l, rho).equilibria)
    ref = [q for q in _oracles.grid_equilibria(p, n=500)
           if min(_oracles.lengths(p, *q)) > p["l0"]]
    assert _oracles.match(got, ref, 1e-6)

