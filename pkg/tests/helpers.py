"""Shared test machinery: independent brute-force oracles and generators.

Everything here deliberately avoids the package's Gauss-Legendre machinery
so oracle agreement tests compare two genuinely different computations:
kernel moments use kink-aligned composite trapezoid sums (exact for the
piecewise-linear kernels), and the kernel-weighted integral uses composite
Simpson per quadrant.
"""

from __future__ import annotations

import random

import numpy as np

from ostrocube.expr import Binary, Const, ExprNode, Unary, Var, XorShift64Star


def trapz(values: np.ndarray, xs: np.ndarray) -> float:
    return float(np.sum(0.5 * (values[1:] + values[:-1]) * np.diff(xs)))


def _kernel_segments(lo: float, hi: float, anchor: float) -> list[tuple[float, float]]:
    left_root = (3.0 * lo + anchor) / 4.0
    right_root = (3.0 * hi + anchor) / 4.0
    pts = sorted({lo, hi, anchor, left_root, right_root})
    return [(e0, e1) for e0, e1 in zip(pts, pts[1:]) if e1 > e0]


def _kernel_offset(lo: float, hi: float, anchor: float, where: float) -> float:
    if where <= anchor:
        return (3.0 * lo + anchor) / 4.0
    return (3.0 * hi + anchor) / 4.0


def brute_kernel_moment_1d(
    lo: float, hi: float, anchor: float, absolute: bool, panels: int = 2000
) -> float:
    """Composite trapezoid of the kernel (or |kernel|), split at the root
    and jump points; exact up to roundoff for the piecewise-linear kernel."""
    total = 0.0
    for e0, e1 in _kernel_segments(lo, hi, anchor):
        n = max(2, int(np.ceil(panels * (e1 - e0) / (hi - lo))))
        xs = np.linspace(e0, e1, n + 1)
        vals = xs - _kernel_offset(lo, hi, anchor, 0.5 * (e0 + e1))
        if absolute:
            vals = np.abs(vals)
        total += trapz(vals, xs)
    return total


def _kernel_axis_nodes(
    lo: float, hi: float, anchor: float, per_segment: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(nodes, trapezoid weights, kernel values) with branch-correct values
    on each kink segment (joint nodes are duplicated across the jump)."""
    nodes, weights, values = [], [], []
    for e0, e1 in _kernel_segments(lo, hi, anchor):
        xs = np.linspace(e0, e1, per_segment + 1)
        w = np.full(xs.size, (e1 - e0) / per_segment)
        w[0] *= 0.5
        w[-1] *= 0.5
        nodes.append(xs)
        weights.append(w)
        values.append(xs - _kernel_offset(lo, hi, anchor, 0.5 * (e0 + e1)))
    return np.concatenate(nodes), np.concatenate(weights), np.concatenate(values)


def brute_kernel_moment_2d(
    a: float,
    b: float,
    c: float,
    d: float,
    x: float,
    y: float,
    absolute: bool,
    per_segment: int = 200,
) -> float:
    """Kink-aligned 2D tensor trapezoid of p*q (or |p*q|) over the rectangle."""
    _, tw, pv = _kernel_axis_nodes(a, b, x, per_segment)
    _, sw, qv = _kernel_axis_nodes(c, d, y, per_segment)
    grid = np.outer(pv, qv)
    if absolute:
        grid = np.abs(grid)
    return float(tw @ grid @ sw)


def _simpson_axis(lo: float, hi: float, intervals: int) -> tuple[np.ndarray, np.ndarray]:
    if intervals % 2:
        intervals += 1
    xs = np.linspace(lo, hi, intervals + 1)
    h = (hi - lo) / intervals
    w = np.ones(intervals + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return xs, w * (h / 3.0)


def simpson_kernel_weighted(
    mixed, a: float, b: float, c: float, d: float, x: float, y: float,
    intervals: int = 400,
) -> float:
    """Composite Simpson of p*q*mixed, one grid per quadrant. `mixed` must
    accept numpy array arguments."""
    total = 0.0
    for t0, t1 in ((a, x), (x, b)):
        if t1 <= t0:
            continue
        for s0, s1 in ((c, y), (y, d)):
            if s1 <= s0:
                continue
            ts, tw = _simpson_axis(t0, t1, intervals)
            ss, sw = _simpson_axis(s0, s1, intervals)
            pv = ts - _kernel_offset(a, b, x, 0.5 * (t0 + t1))
            qv = ss - _kernel_offset(c, d, y, 0.5 * (s0 + s1))
            T, S = np.meshgrid(ts, ss, indexing="ij")
            grid = pv[:, None] * qv[None, :] * np.asarray(mixed(T, S), dtype=float)
            total += float(tw @ grid @ sw)
    return total


def simpson_2d(fn, a: float, b: float, c: float, d: float, intervals: int = 256) -> float:
    """Composite Simpson tensor product of a smooth vectorized integrand."""
    ts, tw = _simpson_axis(a, b, intervals)
    ss, sw = _simpson_axis(c, d, intervals)
    T, S = np.meshgrid(ts, ss, indexing="ij")
    vals = np.asarray(fn(T, S), dtype=float)
    return float(tw @ vals @ sw)


# ---------------------------------------------------------------------------
# seeded geometry, matching the unit-scale corpus convention
# ---------------------------------------------------------------------------


def random_interval(rng: XorShift64Star, span: float = 1.0, min_width: float = 0.4):
    lo = rng.uniform(-span, span - 2 * min_width)
    hi = lo + rng.uniform(min_width, span - lo)
    return lo, hi


def random_rect_point(rng: XorShift64Star, span: float = 1.0, min_width: float = 0.4):
    a, b = random_interval(rng, span, min_width)
    c, d = random_interval(rng, span, min_width)
    x = rng.uniform(a, b)
    y = rng.uniform(c, d)
    return (a, b, c, d), (x, y)


# ---------------------------------------------------------------------------
# random syntax trees for parser/derivative properties
# ---------------------------------------------------------------------------


def random_ast(rnd: random.Random, depth: int) -> ExprNode:
    """Well-behaved random expression: denominators, log and sqrt arguments
    are built positive by construction, exp arguments are damped, so the
    tree is smooth on [0.2, 1.5]^2."""
    if depth <= 0 or rnd.random() < 0.25:
        return rnd.choice(
            [Var("t"), Var("s"), Const(round(rnd.uniform(0.2, 2.5), 3))]
        )
    roll = rnd.random()
    if roll < 0.45:
        op = rnd.choice(["+", "-", "*"])
        return Binary(op, random_ast(rnd, depth - 1), random_ast(rnd, depth - 1))
    if roll < 0.60:
        return Unary(rnd.choice(["sin", "cos", "neg"]), random_ast(rnd, depth - 1))
    if roll < 0.70:
        leaf = rnd.choice([Var("t"), Var("s")])
        return Unary("exp", Binary("*", Const(0.3), leaf))
    if roll < 0.80:
        u = random_ast(rnd, depth - 2)
        den = Binary("+", Const(round(rnd.uniform(1.5, 3.0), 3)), Binary("*", u, u))
        return Binary("/", random_ast(rnd, depth - 1), den)
    if roll < 0.90:
        return Binary("^", random_ast(rnd, depth - 1), Const(float(rnd.randint(2, 3))))
    u = random_ast(rnd, depth - 2)
    arg = Binary("+", Const(round(rnd.uniform(0.5, 1.5), 3)), Binary("*", u, u))
    return Unary(rnd.choice(["log", "sqrt"]), arg)
