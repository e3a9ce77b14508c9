"""Kernel evaluators against closed forms and a high-precision oracle.

Frozen reference values were produced by tools/oracle_constants.py
(mpmath at 30 significant digits, independent quadrature splits); the
section names in comments match that script's output.
"""

import dataclasses

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bcs_edge import (
    CALIBRATED_SERIES_TERMS,
    EULER_GAMMA,
    ModelParams,
    QuadratureUnderresolved,
    build_grid,
    eval_A,
    eval_B,
    eval_E,
    eval_F,
    eval_L,
    eval_L_series,
    eval_a,
)
from bcs_edge.kernels import TANH_RATIO_SWITCH

# [a10] a_{T,mu} at T=1, mu=0
A_ORACLE_T1_MU0 = 0.42890235186151114
# [a_at_Tem3] a_{T,mu} at T=1e-3, mu=1
A_ORACLE_T1EM3_MU1 = 2.6800680136681097


def test_params_validation():
    with pytest.raises(ValueError):
        ModelParams(T=0.0, mu=1.0)
    with pytest.raises(ValueError):
        ModelParams(T=-1.0, mu=1.0)
    with pytest.raises(ValueError):
        ModelParams(T=1.0, mu=1.0, v=0.0)
    p = ModelParams(T=1.0, mu=-2.0)
    with pytest.raises(dataclasses.FrozenInstanceError):
        p.T = 2.0


def test_euler_gamma_digits():
    assert EULER_GAMMA == float(mp.euler)


def test_F_removable_singularity():
    # p^2 = mu exactly -> 1/(2T), through the series branch
    assert eval_F(1.0, ModelParams(T=0.25, mu=1.0)) == pytest.approx(
        2.0, rel=1e-15
    )
    assert eval_F(0.0, ModelParams(T=2.0, mu=0.0)) == pytest.approx(
        0.25, rel=1e-15
    )


def test_F_branch_continuity():
    # values straddling the series/direct switch agree to near machine
    T, mu = 0.5, 1.0
    params = ModelParams(T=T, mu=mu)
    for side in (0.999999, 1.000001):
        x = side * TANH_RATIO_SWITCH
        p = np.sqrt(mu + 2.0 * T * x)
        direct = np.tanh(x) / x / (2.0 * T)
        assert eval_F(p, params) == pytest.approx(direct, rel=1e-12)


@given(
    p=st.floats(-30, 30),
    T=st.floats(1e-3, 1e3),
    mu=st.floats(-5, 5),
)
def test_F_range_and_parity(p, T, mu):
    params = ModelParams(T=T, mu=mu)
    val = eval_F(p, params)
    assert 0.0 < val <= 1.0 / (2.0 * T) * (1 + 1e-15)
    assert val == eval_F(-p, params)


def test_L_matches_F_on_diagonal():
    params = ModelParams(T=0.3, mu=0.7)
    for p in (0.0, 0.5, np.sqrt(0.7), 2.0, 10.0):
        assert eval_L(p, p, params) == pytest.approx(
            eval_F(p, params), rel=1e-14
        )


def test_L_removable_singularities():
    # x + y = 0 with x = y = 0: value 1/(2T)
    assert eval_L(1.0, 1.0, ModelParams(T=0.5, mu=1.0)) == pytest.approx(
        1.0, rel=1e-15
    )
    # x + y = 0 with x = -y = 1: the limit is sech^2(x/2T)/(2T)
    val = eval_L(np.sqrt(2.0), 0.0, ModelParams(T=0.5, mu=1.0))
    assert val == pytest.approx(1.0 / np.cosh(1.0) ** 2, rel=1e-14)


@given(
    p=st.floats(0, 10),
    q=st.floats(0, 10),
    T=st.floats(1e-2, 1e2),
    mu=st.floats(-3, 3),
)
def test_L_naive_formula_agreement(p, q, T, mu):
    # away from the removable set the textbook formula is safe to compare
    x = p * p - mu
    y = q * q - mu
    if abs(x + y) < 1e-3 * (1.0 + abs(mu)):
        return
    naive = (np.tanh(x / (2 * T)) + np.tanh(y / (2 * T))) / (x + y)
    assert eval_L(p, q, ModelParams(T=T, mu=mu)) == pytest.approx(
        naive, rel=1e-12
    )


@given(
    p=st.floats(-8, 8),
    q=st.floats(-8, 8),
    T=st.floats(1e-3, 1e2),
    mu=st.floats(-3, 3),
)
def test_L_symmetry_positivity_bound(p, q, T, mu):
    params = ModelParams(T=T, mu=mu)
    val = eval_L(p, q, params)
    assert val == eval_L(q, p, params) == eval_L(-p, q, params)
    assert 0.0 <= val <= 1.0 / (2.0 * T) * (1 + 1e-15)
    # strict positivity holds wherever the true value is representable;
    # for opposite-sign arguments beyond tanh saturation it underflows
    if (abs(p * p - mu) + abs(q * q - mu)) / (2.0 * T) < 350.0:
        assert val > 0.0


def test_L_extreme_arguments_no_overflow():
    # tanh saturates; L collapses to 2/(x+y) without inf/nan
    val = eval_L(50.0, 50.0, ModelParams(T=1e-6, mu=1.0))
    assert val == pytest.approx(2.0 / 4998.0, rel=1e-14)
    val = eval_L(3.0, 4.0, ModelParams(T=1e-300, mu=1.0))
    assert np.isfinite(val) and val == pytest.approx(2.0 / 23.0, rel=1e-12)


def test_L_series_first_term_closed_form():
    p, q, T, mu = 0.3, 0.7, 1.1, 0.2
    x, y = p * p - mu, q * q - mu
    w0sq = (np.pi * T) ** 2
    expected = 4.0 * T * (x * y + w0sq) / ((x * x + w0sq) * (y * y + w0sq))
    got = eval_L_series(p, q, ModelParams(T=T, mu=mu), 1)
    assert got == pytest.approx(expected, rel=1e-15)


def test_L_series_requires_positive_terms():
    with pytest.raises(ValueError):
        eval_L_series(0.1, 0.2, ModelParams(T=1.0, mu=0.0), 0)


def test_L_series_monotone_convergence():
    # in the calibration box every term is positive, so truncations
    # increase toward the closed form
    params = ModelParams(T=2.0, mu=0.2)
    exact = eval_L(0.5, -0.3, params)
    approx = [eval_L_series(0.5, -0.3, params, n) for n in (10, 100, 1000)]
    assert approx[0] < approx[1] < approx[2] < exact
    errs = [abs(a - exact) / exact for a in approx]
    assert errs[0] > errs[1] > errs[2]


def test_L_series_calibrated_accuracy_spot():
    # cheap 30-sample slice of the acceptance sweep
    assert CALIBRATED_SERIES_TERMS == 400_000
    rng = np.random.default_rng(7)
    for _ in range(30):
        T = np.exp(rng.uniform(np.log(1.0), np.log(4.0)))
        params = ModelParams(T=T, mu=rng.uniform(0.0, 0.3))
        p, q = rng.uniform(-0.8, 0.8, 2)
        exact = eval_L(p, q, params)
        got = eval_L_series(p, q, params, CALIBRATED_SERIES_TERMS)
        assert abs(got - exact) <= 1e-6 * abs(exact)


@given(
    p=st.floats(-6, 6),
    q=st.floats(-6, 6),
    T=st.floats(1e-2, 10),
    mu=st.floats(-2, 2),
)
def test_B_symmetries(p, q, T, mu):
    params = ModelParams(T=T, mu=mu)
    val = eval_B(p, q, params)
    assert val == eval_B(q, p, params) == eval_B(-p, q, params)


def test_B_reduces_to_F_at_zero():
    params = ModelParams(T=0.2, mu=0.9)
    for q in (0.0, 0.3, 1.0, 4.0):
        assert eval_B(0.0, q, params) == pytest.approx(
            eval_F(q / 2.0, params), rel=1e-14
        )


def test_a_oracle_values():
    params = ModelParams(T=1.0, mu=0.0)
    grid = build_grid(params, tol=1e-9)
    assert abs(eval_a(params, grid) - A_ORACLE_T1_MU0) < 1e-9

    params = ModelParams(T=1e-3, mu=1.0)
    grid = build_grid(params, tol=1e-9)
    assert abs(eval_a(params, grid) - A_ORACLE_T1EM3_MU1) < 1e-9


def test_a_decreasing_in_T():
    mu = 1.0
    vals = []
    for T in (0.05, 0.2, 1.0, 5.0):
        params = ModelParams(T=T, mu=mu)
        vals.append(eval_a(params, build_grid(params, tol=1e-8)))
    assert vals == sorted(vals, reverse=True)


def test_E_zero_at_origin_and_positive():
    params = ModelParams(T=0.1, mu=1.0)
    grid = build_grid(params, tol=1e-8)
    assert eval_E(0.0, params, grid) == 0.0
    vals = eval_E(np.array([0.5, 1.0, 2.0, 5.0]), params, grid)
    assert np.all(vals > 0)


def test_E_saturates_at_4pi_a():
    # A(p) -> 0, so E(p)/(4 pi a) -> 1; at p = 100, A <= 1/(2p)
    params = ModelParams(T=0.5, mu=1.0)
    grid = build_grid(params, tol=1e-8)
    a = eval_a(params, grid)
    assert eval_E(100.0, params, grid) == pytest.approx(
        4.0 * np.pi * a, rel=2e-2
    )


def test_A_vectorized_matches_scalar():
    params = ModelParams(T=0.7, mu=0.4)
    grid = build_grid(params, tol=1e-8)
    ps = np.array([0.0, 0.9, 3.0])
    vec = eval_A(ps, params, grid)
    assert vec.shape == (3,)
    # BLAS batches the matrix product differently; agree to an ulp
    for pi, vi in zip(ps, vec):
        assert eval_A(float(pi), params, grid) == pytest.approx(vi, rel=1e-14)
    assert vec[0] == pytest.approx(eval_a(params, grid), rel=1e-14)


def test_underresolved_grid_is_rejected():
    params = ModelParams(T=1.0, mu=0.5)
    grid = build_grid(params, tol=1e-7)
    bad = dataclasses.replace(grid, self_convergence=10.0 * grid.policy.tol)
    with pytest.raises(QuadratureUnderresolved):
        eval_a(params, bad)
