"""Momentum grids and integration.

Composite Gauss-Legendre panels on [0, Lambda] with geometric grading
toward the kernel crossovers (|q| near 2*sqrt(mu) for B(0,.), sqrt(mu)
for F, and the origin), an analytic tail bound used to certify the
cutoff, and an a-posteriori self-convergence measurement stored on the
grid.  Grids are immutable after construction.
"""

from __future__ import annotations

from contextlib import contextmanager
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import CutoffTooSmall, RefusedRegime, ToleranceUnreachable
from .kernels import ModelParams, eval_B

__all__ = [
    "GridPolicy",
    "MomentumGrid",
    "build_grid",
    "grid_defaults",
    "integrate",
    "tail_bound",
]

# Panel grading: width grows like BETA * (distance to nearest feature),
# i.e. geometric ladders of ratio 1 + BETA on both sides of each
# refinement center.  With 16-point panels this is far inside the
# Bernstein-ellipse convergence region of the tanh crossovers.
BETA = 2.0

# Refuse T/mu below this; double-precision cancellation in the log-scale
# quantities dominates beyond it and no supported use case needs it.
REFUSED_REGIME_RATIO = 1e-8

# Self-convergence probes are differences of O(1) double sums, so they
# cannot certify tolerances near machine epsilon; refuse outright rather
# than return a grid whose estimate is vacuous.
_TOL_FLOOR = 1e-14

_DEPTH_CAP = 8

# Fallbacks for the two knobs a front end may want to steer globally.
_KNOB_DEFAULTS = {"points_per_panel": 16, "cutoff_factor": 3.0}
_knob_overrides: dict = {}


@contextmanager
def grid_defaults(**overrides):
    """Temporarily replace build_grid keyword defaults.

    Explicit call-site keywords still win; this only moves the fallback
    used when a caller leaves the knob unspecified, so one switch can
    steer every grid built inside a deep call chain.  None values mean
    "keep the current default".
    """
    unknown = set(overrides) - set(_KNOB_DEFAULTS)
    if unknown:
        raise ValueError(f"unknown grid knobs: {sorted(unknown)}")
    previous = dict(_knob_overrides)
    _knob_overrides.update(
        {k: v for k, v in overrides.items() if v is not None}
    )
    try:
        yield
    finally:
        _knob_overrides.clear()
        _knob_overrides.update(previous)


def _knob(name, explicit):
    if explicit is not None:
        return explicit
    return _knob_overrides.get(name, _KNOB_DEFAULTS[name])


@dataclass(frozen=True)
class GridPolicy:
    """Construction record: the knobs that determine a grid bit-for-bit."""

    T: float
    mu: float
    tol: float
    points_per_panel: int = 16
    cutoff_factor: float = 3.0
    tail_k: float = 20.0
    extend_tail: bool = True
    extra_centers: tuple = ()
    depth: int = 0


@dataclass(frozen=True)
class MomentumGrid:
    """Quadrature nodes/weights on (0, Lambda] plus refinement metadata."""

    nodes: np.ndarray
    weights: np.ndarray
    cutoff: float
    panel_edges: np.ndarray
    refinement_centers: tuple
    policy: GridPolicy
    self_convergence: float | None = None

    @property
    def n(self) -> int:
        return self.nodes.size


@lru_cache(maxsize=None)
def _leggauss(k: int):
    return np.polynomial.legendre.leggauss(k)


def _panels_to_grid(edges: np.ndarray, ppp: int):
    """Map reference Gauss-Legendre nodes onto every panel."""
    xi, wi = _leggauss(ppp)
    lo = edges[:-1]
    half = (edges[1:] - lo) / 2.0
    mid = lo + half
    nodes = (mid[:, None] + half[:, None] * xi[None, :]).ravel()
    weights = (half[:, None] * wi[None, :]).ravel()
    return nodes, weights


def _march_edges(hi: float, centers, floor: float, beta: float) -> np.ndarray:
    """Panel edges on [0, hi], graded toward each center down to `floor`.

    Widths follow max(floor, min(beta*d_behind, d_ahead*beta/(1+beta)))
    where d_* are distances to the refinement centers, so panels approach
    and leave every center in geometric ladders and land on the centers
    exactly.
    """
    alpha = beta / (1.0 + beta)
    cs = sorted(c for c in centers if 0.0 <= c < hi)
    edges = [0.0]
    q = 0.0
    for _ in range(200000):
        if q >= hi:
            break
        ahead = [c for c in cs if c > q]
        behind = [c for c in cs if c <= q]
        d_ahead = (ahead[0] - q) if ahead else np.inf
        d_behind = (q - behind[-1]) if behind else np.inf
        h = max(floor, min(beta * d_behind, alpha * d_ahead))
        if ahead and d_ahead <= max(h, 1.5 * floor):
            q = ahead[0]
        else:
            q = min(q + h, hi)
        edges.append(q)
    else:
        raise ToleranceUnreachable("panel marching failed to terminate")
    edges[-1] = hi
    return np.asarray(edges)


def _a_functional(params: ModelParams, nodes, weights) -> float:
    """(1/2pi) * integral_0^Lambda B(0,q) dq, the self-convergence probe."""
    return float(weights @ eval_B(0.0, nodes, params)) / (2.0 * np.pi)


def tail_bound(params: ModelParams, cutoff: float) -> float:
    """Analytic upper bound on sup_p integral_{|q|>cutoff} B(p,q) dq.

    Uses B(p,q) <= min(1/(2T), 4/|p^2+q^2-4mu|); the supremum over p of
    the second branch at fixed |q| > 2 sqrt(mu) sits at p = 0, and the
    1/(2T) cap keeps the bound integrable when the cutoff falls below
    2 sqrt(mu).  Closed form, no quadrature.
    """
    mu, T = params.mu, params.T
    if not cutoff > 0 or cutoff * cutoff <= 2.0 * mu:
        raise CutoffTooSmall(
            f"cutoff {cutoff} too small for tail bound (need cutoff^2 > 2*mu)"
        )
    if mu > 0:
        a = 2.0 * np.sqrt(mu)
        qstar = np.sqrt(4.0 * mu + 8.0 * T)
        lam = max(cutoff, qstar)
        flat = (lam - cutoff) / (2.0 * T)
        log_part = (2.0 / a) * np.log((lam + a) / (lam - a))
        return 2.0 * (flat + log_part)
    if mu < 0:
        s = 2.0 * np.sqrt(-mu)
        return (8.0 / s) * (np.pi / 2.0 - np.arctan(cutoff / s))
    return 8.0 / cutoff


def build_grid(
    params: ModelParams,
    tol: float = 1e-8,
    *,
    points_per_panel: int | None = None,
    cutoff_factor: float | None = None,
    tail_k: float = 20.0,
    extend_tail: bool = True,
    extra_centers: tuple = (),
) -> MomentumGrid:
    """Build a composite Gauss-Legendre grid on [0, Lambda] for params.

    Lambda starts at cutoff_factor*(2*sqrt(max(mu,0)) + tail_k*
    sqrt(max(T,mu,1))) and, when extend_tail is set, grows by octaves
    until the analytic tail_bound certifies a truncation error below
    tol/2 in the units of a = (1/4pi) integral B(0,q) dq.  Panels refine
    geometrically toward 0, sqrt(mu), 2*sqrt(mu) (plus extra_centers)
    down to the crossover width; construction then measures an
    a-posteriori estimate by doubling points per panel and by halving
    panels, and deepens the grading until that estimate is below tol.

    points_per_panel defaults to 16 and cutoff_factor to 3.0; leaving
    them as None picks up any grid_defaults override in effect.

    Raises RefusedRegime for T/mu < 1e-8 and ToleranceUnreachable if the
    depth cap is hit first.
    """
    points_per_panel = int(_knob("points_per_panel", points_per_panel))
    cutoff_factor = float(_knob("cutoff_factor", cutoff_factor))
    if points_per_panel < 2:
        raise ValueError(
            f"points_per_panel must be at least 2, got {points_per_panel}"
        )
    if not cutoff_factor > 0:
        raise ValueError(f"cutoff_factor must be positive, got {cutoff_factor}")
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")
    if tol < _TOL_FLOOR:
        raise ToleranceUnreachable(
            f"tol {tol:.1e} is below the double-precision certification "
            f"floor {_TOL_FLOOR:.0e}"
        )
    T, mu = params.T, params.mu
    if mu > 0 and T / mu < REFUSED_REGIME_RATIO:
        raise RefusedRegime(
            f"T/mu = {T / mu:.2e} below supported floor {REFUSED_REGIME_RATIO}"
        )

    smu = np.sqrt(mu) if mu > 0 else 0.0
    scale = np.sqrt(max(T, mu))
    base = scale / 2.0
    if mu > 0:
        centers = (0.0, smu, 2.0 * smu) + tuple(extra_centers)
        floor0 = min(T / smu, base) / 4.0
    else:
        centers = (0.0,) + tuple(extra_centers)
        floor0 = base / 4.0
    lam0 = cutoff_factor * (2.0 * smu + tail_k * np.sqrt(max(T, mu, 1.0)))

    conv = None
    edges = None
    for depth in range(_DEPTH_CAP):
        floor = floor0 / 2.0**depth
        edges = _march_edges(lam0, centers, floor, BETA)
        n1, w1 = _panels_to_grid(edges, points_per_panel)
        n2, w2 = _panels_to_grid(edges, 2 * points_per_panel)
        split = np.sort(np.concatenate([edges, (edges[:-1] + edges[1:]) / 2.0]))
        n3, w3 = _panels_to_grid(split, points_per_panel)
        j1 = _a_functional(params, n1, w1)
        conv = max(
            abs(j1 - _a_functional(params, n2, w2)),
            abs(j1 - _a_functional(params, n3, w3)),
        )
        if conv <= tol:
            break
    else:
        raise ToleranceUnreachable(
            f"self-convergence {conv:.3e} > tol {tol:.3e} at depth cap"
        )

    cutoff = lam0
    if extend_tail:
        for _ in range(80):
            if tail_bound(params, cutoff) / (4.0 * np.pi) <= tol / 2.0:
                break
            edges = np.append(edges, 2.0 * cutoff)
            cutoff *= 2.0
        else:
            raise ToleranceUnreachable("tail extension failed to certify cutoff")

    nodes, weights = _panels_to_grid(edges, points_per_panel)
    assert abs(weights.sum() - cutoff) <= 1e-12 * cutoff, "weights must sum to Lambda"
    assert np.all(np.diff(nodes) > 0) and np.all(weights > 0)
    policy = GridPolicy(
        T=T,
        mu=mu,
        tol=tol,
        points_per_panel=points_per_panel,
        cutoff_factor=cutoff_factor,
        tail_k=tail_k,
        extend_tail=extend_tail,
        extra_centers=tuple(extra_centers),
        depth=depth,
    )
    return MomentumGrid(
        nodes=nodes,
        weights=weights,
        cutoff=float(cutoff),
        panel_edges=edges,
        refinement_centers=centers,
        policy=policy,
        self_convergence=float(conv),
    )


def integrate(f, grid: MomentumGrid) -> float:
    """Sum_i w_i f(node_i).  f may be vectorized or scalar-valued."""
    try:
        vals = np.asarray(f(grid.nodes), dtype=float)
        if vals.shape != grid.nodes.shape:
            raise TypeError
    except (TypeError, ValueError):
        vals = np.asarray([f(q) for q in grid.nodes], dtype=float)
    return float(grid.weights @ vals)
