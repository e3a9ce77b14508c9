"""Trial-state gap bound, threshold temperature, and temperature limits.

Reference constants come from tools/oracle_constants.py (mpmath at 30
digits, independent of the package code).
"""

import dataclasses

import numpy as np
import pytest

from bcs_edge import variational
from bcs_edge.bs_operator import BoundaryCondition, assemble, spectral_gap
from bcs_edge.errors import DenominatorNonnegative, NoSignChange
from bcs_edge.kernels import ModelParams, eval_F
from bcs_edge.quadrature import build_grid
from bcs_edge.variational import (
    TrialConfig,
    _pieces,
    find_T0,
    int_F_residual,
    scaled_sup,
    trial_gap,
)

I_G_ORACLE = 18.161754073186723
SANDWICH_LO = 0.073262555554936721
SANDWICH_HI = 4.0
A_1_0 = 0.42890235186151114
# r(T) = int_R F - 2 (ln(mu/T) + gamma + ln(8/pi)) at mu = 1
R_ORACLE = {
    1e-1: -0.013125613880913827,
    1e-2: -1.2343231115674998e-4,
    1e-3: -1.2337067651458341e-6,
    1e-4: -1.2337006122852099e-8,
}


@pytest.fixture(scope="module")
def pieces_small_T():
    return _pieces(ModelParams(T=1e-4, mu=1.0), TrialConfig(b=1.0, tol=1e-9))


def test_trial_config_validation():
    with pytest.raises(ValueError):
        TrialConfig(b=0.0)
    with pytest.raises(ValueError):
        TrialConfig(b=-1.0)
    with pytest.raises(ValueError):
        TrialConfig(b=1.0, tol=0.0)
    cfg = TrialConfig(b=1.0)
    with pytest.raises(dataclasses.FrozenInstanceError):
        cfg.b = 2.0


def test_trial_pieces_match_oracle(pieces_small_T):
    b00, i0, denom, _ = pieces_small_T
    assert b00 == pytest.approx(1.0, rel=1e-15)
    assert i0 == pytest.approx(I_G_ORACLE, rel=1e-10)
    assert denom < 0.0


def test_sandwich_bounds(pieces_small_T):
    _, i0, _, _ = pieces_small_T
    ratio = i0 / np.log(1.0 / 1e-4)
    assert SANDWICH_LO < ratio < SANDWICH_HI
    # the bounds hold down to the smallest supported temperatures
    _, i0_cold, _, _ = _pieces(
        ModelParams(T=1e-6, mu=1.0), TrialConfig(b=1.0, tol=1e-8)
    )
    assert SANDWICH_LO < i0_cold / np.log(1e6) < SANDWICH_HI


def test_denominator_negative_and_log_bounded():
    # <g|A-a|g> stays negative with |denom|/ln(mu/T) bounded as T drops
    for T in (1e-3, 1e-5):
        for b in (0.5, 2.0):
            _, _, denom, _ = _pieces(
                ModelParams(T=T, mu=1.0), TrialConfig(b=b, tol=1e-7)
            )
            assert denom < 0.0
            assert abs(denom) / np.log(1.0 / T) < 1.0


def test_trial_gap_sign_change_in_T():
    cfg = TrialConfig(b=1.0, tol=1e-8)
    assert trial_gap(ModelParams(T=1e-4, mu=1.0), cfg) > 0.0
    assert trial_gap(ModelParams(T=0.5, mu=1.0), cfg) < 0.0


def test_trial_gap_default_config_and_bad_mu():
    val = trial_gap(ModelParams(T=1e-3, mu=2.0))
    assert np.isfinite(val) and val > 0.0
    with pytest.raises(ValueError):
        trial_gap(ModelParams(T=1.0, mu=0.0))


def test_positive_trial_gap_implies_eigensolver_gap():
    # the trial value is not itself the gap, but its positivity certifies one
    for T in (1e-4, 1e-2):
        params = ModelParams(T=T, mu=1.0)
        assert trial_gap(params, TrialConfig(b=1.0, tol=1e-8)) > 0.0
        op = assemble(params, build_grid(params, 1e-8), BoundaryCondition.DIRICHLET)
        assert spectral_gap(op) > 0.0


def test_denominator_guard(monkeypatch):
    monkeypatch.setattr(
        variational, "_pieces", lambda params, cfg: (1.0, 1.0, 0.5, None)
    )
    with pytest.raises(DenominatorNonnegative):
        trial_gap(ModelParams(T=1.0, mu=1.0), TrialConfig(b=1.0))


def test_find_T0_brackets_the_sign_change():
    cfg = TrialConfig(b=1.0, tol=1e-8)
    T0 = find_T0(1.0, cfg, tol=2e-2)
    assert 1e-6 < T0 < 1.0
    assert trial_gap(ModelParams(T=0.9 * T0, mu=1.0), cfg) > 0.0
    assert trial_gap(ModelParams(T=1.1 * T0, mu=1.0), cfg) < 0.0


def test_find_T0_scales_with_mu():
    # with b proportional to mu the problem rescales exactly, so T0/mu
    # is the same number up to quadrature and bisection width
    ratios = [
        find_T0(mu, TrialConfig(b=mu, tol=1e-7), tol=2e-2) / mu
        for mu in (0.5, 1.0, 2.0)
    ]
    for r in ratios[1:]:
        assert r == pytest.approx(ratios[0], rel=0.1)


def test_find_T0_no_sign_change(monkeypatch):
    monkeypatch.setattr(variational, "trial_gap", lambda p, c: 1.0)
    with pytest.raises(NoSignChange):
        find_T0(1.0, TrialConfig(b=1.0))
    monkeypatch.setattr(variational, "trial_gap", lambda p, c: -1.0)
    with pytest.raises(NoSignChange):
        find_T0(1.0, TrialConfig(b=1.0))


def test_find_T0_bad_inputs():
    with pytest.raises(ValueError):
        find_T0(0.0, TrialConfig(b=1.0))
    with pytest.raises(ValueError):
        find_T0(1.0, TrialConfig(b=1.0), tol=0.0)


def test_int_F_residual_matches_oracle():
    for T, r in R_ORACLE.items():
        val = int_F_residual(ModelParams(T=T, mu=1.0), tol=1e-12)
        assert val == pytest.approx(r, abs=1e-11), f"T={T}"


def test_int_F_residual_decays():
    vals = [
        abs(int_F_residual(ModelParams(T=T, mu=1.0), tol=1e-10))
        for T in (1e-2, 1e-3, 1e-4)
    ]
    assert vals[0] > vals[1] > vals[2]
    with pytest.raises(ValueError):
        int_F_residual(ModelParams(T=1.0, mu=-1.0))


def test_int_F_window_bounded():
    # mass of F beyond sqrt(2 mu) stays O(1): below 2 integral_{sqrt(2)}^inf
    # dp/(p^2-1) = 2 ln(1+sqrt 2), approached as T -> 0 where tanh -> 1
    bound = 2.0 * np.log(1.0 + np.sqrt(2.0))
    smu2 = np.sqrt(2.0)
    for T, slack in ((1.0, -0.05), (1e-4, 1e-8)):
        params = ModelParams(T=T, mu=1.0)
        grid = build_grid(params, 1e-9, extra_centers=(smu2,))
        m = grid.nodes > smu2
        w = 2.0 * float(grid.weights[m] @ eval_F(grid.nodes[m], params))
        assert 1.0 < w <= bound + slack


def test_scaled_sup_dirichlet_approaches_flat_band_edge():
    diffs = [
        abs(scaled_sup(T, 1.0, BoundaryCondition.DIRICHLET) - A_1_0)
        for T in (10.0, 100.0, 1000.0)
    ]
    assert diffs[0] > diffs[1] > diffs[2]
    assert diffs[2] < 1e-4
    # at mu = 0 the rescaling is trivial and the top sits at the edge
    assert scaled_sup(1.0, 0.0, BoundaryCondition.DIRICHLET) == pytest.approx(
        A_1_0, abs=1e-5
    )


def test_scaled_sup_neumann_keeps_positive_excess():
    d = scaled_sup(1.0, 0.0, BoundaryCondition.NEUMANN) - A_1_0
    assert d > 0.1
    excess = scaled_sup(1000.0, 1.0, BoundaryCondition.NEUMANN) - A_1_0
    assert excess == pytest.approx(d, rel=1e-2)


def test_scaled_sup_exact_rescaling_identity():
    for bc in BoundaryCondition:
        lhs = scaled_sup(10.0, 1.0, bc, tol=1e-9)
        rhs = scaled_sup(1.0, 0.1, bc, tol=1e-9)
        assert lhs == pytest.approx(rhs, abs=5e-9)


def test_scaled_sup_bad_T():
    with pytest.raises(ValueError):
        scaled_sup(0.0, 1.0, BoundaryCondition.DIRICHLET)
