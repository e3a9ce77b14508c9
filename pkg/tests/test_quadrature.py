"""Grid construction, the analytic tail bound, and integration.

Frozen reference values come from tools/oracle_constants.py; section
names in comments match that script's output.
"""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bcs_edge import (
    CutoffTooSmall,
    ModelParams,
    RefusedRegime,
    ToleranceUnreachable,
    build_grid,
    integrate,
    tail_bound,
)

# [tail] closed form at mu=1, cutoff=50
TAIL_BOUND_MU1_L50 = 0.16008541534707285
# [tail] brute-force integral of sup_p B over |q| > 50 (same point);
# the bound must dominate it
TAIL_TRUE_MU1_L50 = 0.14408533001292031


def check_invariants(grid):
    assert grid.nodes.ndim == 1 and grid.nodes.size == grid.n
    assert np.all(np.diff(grid.nodes) > 0)
    assert np.all(grid.weights > 0)
    assert grid.weights.sum() == pytest.approx(grid.cutoff, rel=1e-12)
    assert grid.panel_edges[0] == 0.0
    assert grid.panel_edges[-1] == grid.cutoff
    assert grid.n == grid.policy.points_per_panel * (grid.panel_edges.size - 1)
    assert grid.self_convergence <= grid.policy.tol


def test_grid_invariants_mu_zero():
    grid = build_grid(ModelParams(T=1.0, mu=0.0), tol=1e-9)
    check_invariants(grid)
    assert 0.0 in grid.refinement_centers


def test_grid_invariants_small_T():
    params = ModelParams(T=1e-3, mu=1.0)
    grid = build_grid(params, tol=1e-9)
    check_invariants(grid)
    # edges land exactly on the kernel crossovers
    for c in (1.0, 2.0):
        assert c in grid.refinement_centers
        assert np.any(grid.panel_edges == c)
    # ridge of B(0,.) at q = 2 sqrt(mu) needs panels of width ~T there
    i = np.searchsorted(grid.panel_edges, 2.0)
    local = np.diff(grid.panel_edges)[max(i - 2, 0) : i + 2]
    assert local.min() <= params.T


def test_extra_centers_are_honored():
    grid = build_grid(
        ModelParams(T=0.5, mu=1.0), tol=1e-8, extra_centers=(0.37,)
    )
    assert 0.37 in grid.refinement_centers
    assert np.any(grid.panel_edges == 0.37)


def test_refused_regime():
    with pytest.raises(RefusedRegime):
        build_grid(ModelParams(T=1e-9, mu=1.0), tol=1e-8)


def test_bad_tolerance_rejected():
    with pytest.raises(ValueError):
        build_grid(ModelParams(T=1.0, mu=1.0), tol=0.0)
    with pytest.raises(ToleranceUnreachable):
        # double precision cannot self-certify to 1e-30
        build_grid(ModelParams(T=1.0, mu=0.0), tol=1e-30, extend_tail=False)


def test_tail_bound_oracle():
    got = tail_bound(ModelParams(T=1.0, mu=1.0), 50.0)
    assert got == pytest.approx(TAIL_BOUND_MU1_L50, rel=1e-13)
    assert got > TAIL_TRUE_MU1_L50


def test_tail_bound_branches():
    # mu = 0: exactly 8/cutoff
    assert tail_bound(ModelParams(T=2.0, mu=0.0), 40.0) == pytest.approx(
        0.2, rel=1e-15
    )
    # mu < 0: arctan form, positive and decreasing
    params = ModelParams(T=1.0, mu=-1.0)
    vals = [tail_bound(params, c) for c in (10.0, 20.0, 40.0)]
    assert vals[0] > vals[1] > vals[2] > 0
    # near-cutoff cap: finite even below the q^2 = 4 mu resonance
    capped = tail_bound(ModelParams(T=0.1, mu=1.0), 1.5)
    assert np.isfinite(capped) and capped > 0
    with pytest.raises(CutoffTooSmall):
        tail_bound(ModelParams(T=1.0, mu=1.0), 1.0)
    with pytest.raises(CutoffTooSmall):
        tail_bound(ModelParams(T=1.0, mu=1.0), -3.0)


def test_integrate_polynomial_exactness():
    # 16-point panels are exact through degree 31, affine maps included
    grid = build_grid(ModelParams(T=1.0, mu=0.5), tol=1e-7, extend_tail=False)
    lam = grid.cutoff
    assert integrate(lambda q: np.ones_like(q), grid) == pytest.approx(
        lam, rel=1e-13
    )
    assert integrate(lambda q: q * q, grid) == pytest.approx(
        lam**3 / 3.0, rel=1e-12
    )
    assert integrate(lambda q: q**31, grid) == pytest.approx(
        lam**32 / 32.0, rel=1e-11
    )


def test_integrate_scalar_callable_fallback():
    grid = build_grid(ModelParams(T=1.0, mu=0.5), tol=1e-7, extend_tail=False)
    vec = integrate(lambda q: np.cos(q), grid)
    scal = integrate(lambda q: math.cos(q), grid)  # rejects arrays
    assert scal == pytest.approx(vec, rel=1e-13)


@given(
    T=st.floats(1e-3, 10.0),
    mu=st.one_of(st.just(0.0), st.floats(1e-2, 4.0)),
)
def test_grid_invariants_random(T, mu):
    grid = build_grid(ModelParams(T=T, mu=mu), tol=1e-7)
    check_invariants(grid)
