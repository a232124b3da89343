"""Reference numerical integration and differentiation.

Composite Gauss-Legendre rules over panels, with optional breakpoint
refinement so integrands that are only piecewise smooth can be split at
their kinks. A rule of order n integrates polynomials of degree 2n-1
exactly, so the defaults (order 16, 8 panels) are exact with a huge margin
for the polynomial corpus used elsewhere in the package.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Optional, Sequence

import numpy as np

from .core import (
    BivariateFunction,
    DerivativeBounds,
    EngineError,
    EvalPoint,
    Interval1D,
    MissingMixedPartial,
    QuadConfig,
    Rectangle,
    UnivariateFunction,
)

__all__ = [
    "NonFiniteSample",
    "UnsupportedOrder",
    "GLRule",
    "gl_rule",
    "integrate_1d",
    "integrate_2d",
    "mixed_partial_fd",
    "estimate_bounds",
    "default_fd_steps",
    "sample_univariate",
    "sample_bivariate",
    "sample_mixed",
]

_EPS = float(np.finfo(float).eps)


class NonFiniteSample(EngineError):
    """An integrand or derivative sample came back NaN or infinite."""


class UnsupportedOrder(EngineError):
    """Gauss-Legendre order outside the supported range 2..64."""


@dataclass(frozen=True)
class GLRule:
    """Gauss-Legendre nodes and weights on the reference interval (-1, 1)."""

    order: int
    nodes: np.ndarray
    weights: np.ndarray


@lru_cache(maxsize=None)
def gl_rule(order: int) -> GLRule:
    """Nodes and weights by Newton iteration on the Legendre polynomial.

    Initial guesses are the Chebyshev angle approximations; iteration runs
    to 1e-15 on the node update. Nodes are symmetrized about 0 so the rule
    is exactly even.
    """
    if int(order) != order or not 2 <= order <= 64:
        raise UnsupportedOrder(f"Gauss-Legendre order must be in 2..64, got {order!r}")
    n = int(order)
    k = np.arange(1, n + 1, dtype=float)
    x = np.cos(np.pi * (k - 0.25) / (n + 0.5))
    dp = np.ones_like(x)
    for _ in range(100):
        p_prev = np.ones_like(x)
        p = x.copy()
        for j in range(2, n + 1):
            p_prev, p = p, ((2 * j - 1) * x * p - (j - 1) * p_prev) / j
        dp = n * (x * p - p_prev) / (x * x - 1.0)
        dx = p / dp
        x -= dx
        if np.max(np.abs(dx)) < 1e-15:
            break
    # one clean evaluation at the converged nodes
    p_prev = np.ones_like(x)
    p = x.copy()
    for j in range(2, n + 1):
        p_prev, p = p, ((2 * j - 1) * x * p - (j - 1) * p_prev) / j
    dp = n * (x * p - p_prev) / (x * x - 1.0)
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    idx = np.argsort(x)
    x = x[idx]
    w = w[idx]
    x = 0.5 * (x - x[::-1])
    w = 0.5 * (w + w[::-1])
    x.setflags(write=False)
    w.setflags(write=False)
    return GLRule(order=n, nodes=x, weights=w)


def _segment_edges(lo: float, hi: float, breakpoints: Iterable[float]) -> list[float]:
    inner = sorted({float(b) for b in breakpoints if lo < float(b) < hi})
    return [lo, *inner, hi]


def _axis_quadrature(
    iv: Interval1D, q: QuadConfig, breakpoints: Iterable[float] = ()
) -> tuple[np.ndarray, np.ndarray]:
    """All nodes and weights of the composite rule on one axis."""
    rule = gl_rule(q.gl_order)
    edges = _segment_edges(iv.lo, iv.hi, breakpoints)
    nodes = []
    weights = []
    for e0, e1 in zip(edges, edges[1:]):
        step = (e1 - e0) / q.panels
        for p in range(q.panels):
            left = e0 + p * step
            half = 0.5 * step
            mid = left + half
            nodes.append(mid + half * rule.nodes)
            weights.append(half * rule.weights)
    return np.concatenate(nodes), np.concatenate(weights)


def as_univariate(g) -> UnivariateFunction:
    if isinstance(g, UnivariateFunction):
        return g
    return UnivariateFunction(fn=g)


def as_bivariate(f) -> BivariateFunction:
    if isinstance(f, BivariateFunction):
        return f
    return BivariateFunction(fn=f)


def sample_univariate(g, ts: np.ndarray) -> np.ndarray:
    """Evaluate g over a node array, honouring the vectorized promise."""
    g = as_univariate(g)
    if g.vectorized:
        out = np.asarray(g.fn(ts), dtype=float)
        if out.shape != ts.shape:
            out = np.broadcast_to(out, ts.shape)
        return out
    return np.array([float(g.fn(t)) for t in ts], dtype=float)


def sample_bivariate(f, T: np.ndarray, S: np.ndarray) -> np.ndarray:
    f = as_bivariate(f)
    if f.vectorized:
        out = np.asarray(f.fn(T, S), dtype=float)
        if out.shape != T.shape:
            out = np.broadcast_to(out, T.shape)
        return out
    out = np.empty(T.shape, dtype=float)
    for idx in np.ndindex(T.shape):
        out[idx] = float(f.fn(T[idx], S[idx]))
    return out


def _check_finite(values: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(values)):
        bad = int(np.count_nonzero(~np.isfinite(values)))
        raise NonFiniteSample(f"{bad} non-finite sample(s) while evaluating {what}")


def integrate_1d(
    g,
    iv: Interval1D,
    q: QuadConfig,
    breakpoints: Sequence[float] = (),
) -> float:
    """Composite Gauss-Legendre integral of g over iv.

    Panels are refined at the given breakpoints, which must lie inside the
    interval (outside values are ignored); use them to split integrands at
    known kinks so each panel sees a smooth function.
    """
    g = as_univariate(g)
    nodes, weights = _axis_quadrature(iv, q, breakpoints)
    vals = sample_univariate(g, nodes)
    _check_finite(vals, g.label)
    return float(weights @ vals)


def integrate_2d(
    f,
    r: Rectangle,
    q: QuadConfig,
    split: Optional[EvalPoint] = None,
) -> float:
    """Tensor-product composite Gauss-Legendre integral of f over r."""
    f = as_bivariate(f)
    t_breaks = (split.x,) if split is not None else ()
    s_breaks = (split.y,) if split is not None else ()
    tn, tw = _axis_quadrature(r.t_axis, q, t_breaks)
    sn, sw = _axis_quadrature(r.s_axis, q, s_breaks)
    T, S = np.meshgrid(tn, sn, indexing="ij")
    vals = sample_bivariate(f, T, S)
    _check_finite(vals, f.label)
    return float(tw @ vals @ sw)


def mixed_partial_fd(f, t: float, s: float, h_t: float, h_s: float) -> float:
    """Cross central difference for d2f/dtds.

    (f(t+h,s+k) - f(t+h,s-k) - f(t-h,s+k) + f(t-h,s-k)) / (4hk); exact for
    bilinear functions at any step.
    """
    f = as_bivariate(f)
    v = (
        f.eval(t + h_t, s + h_s)
        - f.eval(t + h_t, s - h_s)
        - f.eval(t - h_t, s + h_s)
        + f.eval(t - h_t, s - h_s)
    ) / (4.0 * h_t * h_s)
    if not np.isfinite(v):
        raise NonFiniteSample(f"non-finite mixed-partial stencil at ({t}, {s})")
    return float(v)


def default_fd_steps(r: Rectangle) -> tuple[float, float]:
    """cbrt(machine eps) scaled by axis length, balancing truncation
    against cancellation for the cross stencil."""
    h = _EPS ** (1.0 / 3.0)
    return h * r.t_axis.length, h * r.s_axis.length


def sample_mixed(
    f: BivariateFunction,
    T: np.ndarray,
    S: np.ndarray,
    r: Rectangle,
    fd_fallback: bool = True,
) -> np.ndarray:
    """Mixed-partial values on a grid: exact capability if present, else
    the finite-difference stencil when the fallback is allowed."""
    if f.has_exact_mixed:
        if f.vectorized:
            out = np.asarray(f.mixed_fn(T, S), dtype=float)
            if out.shape != T.shape:
                out = np.broadcast_to(out, T.shape)
            return out
        out = np.empty(T.shape, dtype=float)
        for idx in np.ndindex(T.shape):
            out[idx] = float(f.mixed_fn(T[idx], S[idx]))
        return out
    if not fd_fallback:
        raise MissingMixedPartial(
            f"function {f.label!r} has no exact mixed partial and the "
            "finite-difference fallback is disabled"
        )
    h_t, h_s = default_fd_steps(r)
    fpp = sample_bivariate(f, T + h_t, S + h_s)
    fpm = sample_bivariate(f, T + h_t, S - h_s)
    fmp = sample_bivariate(f, T - h_t, S + h_s)
    fmm = sample_bivariate(f, T - h_t, S - h_s)
    return (fpp - fpm - fmp + fmm) / (4.0 * h_t * h_s)


def estimate_bounds(
    f: BivariateFunction,
    r: Rectangle,
    grid_n: int = 33,
    pad_rel: float = 0.05,
) -> DerivativeBounds:
    """Sampled bounds on the mixed partial over r, padded outward.

    Min/max over a grid_n x grid_n grid (boundary lines included), widened
    by pad_rel * (max - min) plus an absolute floor of 1e-12 on each side.
    Sampling cannot certify the true extremum, so results built on these
    bounds must be flagged non-rigorous by the caller.
    """
    if grid_n < 2:
        raise ValueError(f"grid_n must be >= 2, got {grid_n}")
    ts = np.linspace(r.t_axis.lo, r.t_axis.hi, grid_n)
    ss = np.linspace(r.s_axis.lo, r.s_axis.hi, grid_n)
    T, S = np.meshgrid(ts, ss, indexing="ij")
    vals = sample_mixed(f, T, S, r, fd_fallback=True)
    _check_finite(vals, f"mixed partial of {f.label}")
    lo = float(np.min(vals))
    hi = float(np.max(vals))
    pad = pad_rel * (hi - lo) + 1e-12
    return DerivativeBounds(lo - pad, hi + pad)
