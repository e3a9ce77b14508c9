"""Calibrate the truncation order for the frequency-series kernel.

The truncated series converges like 1/(pi^2 T N) in absolute terms, so the
relative error against the closed form is roughly 2/(pi^2 N) wherever the
kernel is of size 1/(2T).  This script measures the actual worst-case
relative error over a fixed sample box and a ladder of N values, so the
shipped default can be frozen with an explicit margin.

Sample box: T log-uniform in [1, 4], mu uniform in [0, 0.3], p and q
uniform in [-0.8, 0.8].  In this box every series term is positive
(x*y + w_n^2 > 0 since |x|,|y| <= 0.94 < w_0^2 = (pi T)^2), so the
truncation error is monotone in N sample by sample.

Run:  python3 tools/calibrate_series.py
"""

import time

import numpy as np

from bcs_edge.kernels import ModelParams, eval_L, eval_L_series

RNG_SEED = 20260815
N_SAMPLES = 10_000


def draw_samples(rng, n):
    T = np.exp(rng.uniform(np.log(1.0), np.log(4.0), n))
    mu = rng.uniform(0.0, 0.3, n)
    p = rng.uniform(-0.8, 0.8, n)
    q = rng.uniform(-0.8, 0.8, n)
    return T, mu, p, q


def max_rel_err(T, mu, p, q, n_terms):
    err = np.empty_like(T)
    for i in range(T.size):
        params = ModelParams(T=T[i], mu=mu[i])
        exact = eval_L(p[i], q[i], params)
        approx = eval_L_series(p[i], q[i], params, n_terms)
        err[i] = abs(approx - exact) / abs(exact)
    return err.max()


def main():
    rng = np.random.default_rng(RNG_SEED)
    T, mu, p, q = draw_samples(rng, N_SAMPLES)
    print(f"{N_SAMPLES} samples, seed {RNG_SEED}")
    print(f"{'N':>10} {'max rel err':>14} {'time/sample':>12}")
    for n_terms in (1_000, 10_000, 100_000, 200_000, 400_000):
        t0 = time.perf_counter()
        worst = max_rel_err(T, mu, p, q, n_terms)
        dt = (time.perf_counter() - t0) / N_SAMPLES
        print(f"{n_terms:>10} {worst:>14.3e} {dt*1e3:>10.3f}ms")
    print()
    print("pick the smallest N with worst < 5e-7 (2x margin under 1e-6)")


if __name__ == "__main__":
    main()
