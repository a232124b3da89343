"""The inequality catalogue.

Five Ostrowski-type bounds, each returning (lhs, rhs, satisfied, slack) so
the verification harness can quantify violations instead of just flagging
them. In CLI vocabulary the rules are t1..t5:

    t1  ostrowski_1d            |f(x) - avg| <= [1/4 + u^2/L^2] L M
    t2  cheng_1d                trapezoid-corrected deviation vs (upper-lower)
    t3  sarikaya_functional     midpoint-kernel two-variable rule
    t4  qiaoling_functional     lambda-weighted two-variable rule
    t5  quarter_rule_functional quarter-offset-kernel two-variable rule

t5 is a fidelity implementation: it reproduces its catalogued stated form
term by term, even though the constant-function audit in the identity
module shows that form inconsistent (lhs 3/16 on the unit square with a
constant integrand and zero derivative spread). That failure is an
asserted outcome, not a bug; enclosures are built on the oracle-validated
derived expansion instead.

A variant transcription of t3 halves its double-integral term, which also
breaks constant annihilation; this implementation carries the
self-consistent coefficient 1/((b-a)(d-c)), under which the rule holds
with zero observed violations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .core import (
    BivariateFunction,
    DerivativeBound1D,
    DerivativeBounds,
    EngineError,
    EvalPoint,
    Interval1D,
    InvalidBounds,
    PointOutsideDomain,
    QuadConfig,
    Rectangle,
    UnivariateFunction,
)
from .quadrature import integrate_1d, integrate_2d

__all__ = [
    "PointOutsideLambdaBox",
    "RuleOutcome",
    "Lambda",
    "default_slack",
    "ostrowski_1d",
    "cheng_1d",
    "sarikaya_H",
    "sarikaya_functional",
    "qiaoling_functional",
    "quarter_rule_anchor_weight",
    "quarter_rule_boundary_term",
    "quarter_rule_functional",
]


class PointOutsideLambdaBox(EngineError):
    """Anchor outside the shrunken box required by the lambda rule."""


@dataclass(frozen=True)
class RuleOutcome:
    """One evaluated inequality: absolute-value lhs against its bound."""

    lhs: float
    rhs: float
    satisfied: bool
    slack: float

    @property
    def gap(self) -> float:
        """lhs - rhs; positive means the bound was exceeded."""
        return self.lhs - self.rhs


@dataclass(frozen=True)
class Lambda:
    """Convex weight between the anchor rule (0) and the endpoint rule (1)."""

    value: float

    def __post_init__(self) -> None:
        v = float(self.value)
        if not math.isfinite(v) or not 0.0 <= v <= 1.0:
            raise InvalidBounds(f"lambda must lie in [0, 1], got {self.value!r}")
        object.__setattr__(self, "value", v)


def default_slack(rhs: float) -> float:
    """Absorbs quadrature noise when classifying lhs <= rhs."""
    return 1e-9 * (1.0 + abs(rhs))


def _outcome(lhs: float, rhs: float, slack: Optional[float]) -> RuleOutcome:
    s = default_slack(rhs) if slack is None else float(slack)
    return RuleOutcome(lhs=lhs, rhs=rhs, satisfied=lhs <= rhs + s, slack=s)


def _require_inside(iv: Interval1D, x: float) -> float:
    x = float(x)
    if not iv.contains(x):
        raise PointOutsideDomain(f"x={x} outside [{iv.lo}, {iv.hi}]")
    return x


def ostrowski_1d(
    f: UnivariateFunction,
    iv: Interval1D,
    x: float,
    m: DerivativeBound1D,
    q: QuadConfig,
    slack: Optional[float] = None,
) -> RuleOutcome:
    """Deviation of a point value from the interval average, |f'| <= M."""
    x = _require_inside(iv, x)
    if m.kind != "abs":
        raise InvalidBounds("ostrowski_1d needs an abs-kind derivative bound")
    length = iv.length
    avg = integrate_1d(f, iv, q) / length
    lhs = abs(f.eval(x) - avg)
    u = x - iv.midpoint
    rhs = (0.25 + u * u / (length * length)) * length * m.magnitude
    return _outcome(lhs, rhs, slack)


def cheng_1d(
    f: UnivariateFunction,
    iv: Interval1D,
    x: float,
    b1: DerivativeBound1D,
    q: QuadConfig,
    slack: Optional[float] = None,
) -> RuleOutcome:
    """Trapezoid-corrected deviation bounded by the derivative spread."""
    x = _require_inside(iv, x)
    if b1.kind != "range":
        raise InvalidBounds("cheng_1d needs a range-kind derivative bound")
    a, b = iv.lo, iv.hi
    length = iv.length
    avg = integrate_1d(f, iv, q) / length
    lhs = abs(
        0.5 * f.eval(x)
        - ((x - b) * f.eval(b) - (x - a) * f.eval(a)) / (2.0 * length)
        - avg
    )
    rhs = ((x - a) ** 2 + (b - x) ** 2) / (8.0 * length) * (b1.upper - b1.lower)
    return _outcome(lhs, rhs, slack)


def _axes(r: Rectangle) -> tuple[float, float, float, float]:
    return r.t_axis.lo, r.t_axis.hi, r.s_axis.lo, r.s_axis.hi


def sarikaya_H(f: BivariateFunction, r: Rectangle, pt: EvalPoint) -> float:
    """Boundary-value combination of the midpoint-kernel rule: one corner
    block over the area plus one edge block per axis."""
    a, b, c, d = _axes(r)
    x, y = pt.x, pt.y
    corner = (
        (x - a) * ((y - c) * f.eval(a, c) + (d - y) * f.eval(a, d))
        + (b - x) * ((y - c) * f.eval(b, c) + (d - y) * f.eval(b, d))
    ) / r.area
    edge_t = ((x - a) * f.eval(a, y) + (b - x) * f.eval(b, y)) / r.t_axis.length
    edge_s = ((y - c) * f.eval(x, c) + (d - y) * f.eval(x, d)) / r.s_axis.length
    return corner + edge_t + edge_s


def sarikaya_functional(
    f: BivariateFunction,
    r: Rectangle,
    pt: EvalPoint,
    db: DerivativeBounds,
    q: QuadConfig,
    slack: Optional[float] = None,
) -> RuleOutcome:
    a, b, c, d = _axes(r)
    x, y = pt.x, pt.y
    area = r.area
    int_ty = integrate_1d(f.fix_s(y), r.t_axis, q)
    int_xs = integrate_1d(f.fix_t(x), r.s_axis, q)
    int_tc = integrate_1d(f.fix_s(c), r.t_axis, q)
    int_td = integrate_1d(f.fix_s(d), r.t_axis, q)
    int_as = integrate_1d(f.fix_t(a), r.s_axis, q)
    int_bs = integrate_1d(f.fix_t(b), r.s_axis, q)
    dbl = integrate_2d(f, r, q, split=pt)
    lhs = abs(
        0.25 * f.eval(x, y)
        + 0.25 * sarikaya_H(f, r, pt)
        - int_ty / (2.0 * r.t_axis.length)
        - int_xs / (2.0 * r.s_axis.length)
        - ((y - c) * int_tc + (d - y) * int_td) / (2.0 * area)
        - ((x - a) * int_as + (b - x) * int_bs) / (2.0 * area)
        + dbl / area
    )
    rhs = (
        ((x - a) ** 2 + (b - x) ** 2)
        * ((y - c) ** 2 + (d - y) ** 2)
        / (32.0 * area)
        * (db.upper - db.lower)
    )
    return _outcome(lhs, rhs, slack)


def _lambda_box(iv: Interval1D, lam: float) -> tuple[float, float]:
    shrink = 0.5 * lam * iv.length
    return iv.lo + shrink, iv.hi - shrink


def qiaoling_functional(
    f: BivariateFunction,
    r: Rectangle,
    pt: EvalPoint,
    db: DerivativeBounds,
    lam: Lambda,
    q: QuadConfig,
    slack: Optional[float] = None,
) -> RuleOutcome:
    """Lambda-weighted rule; the anchor must lie in the shrunken box."""
    a, b, c, d = _axes(r)
    x, y = pt.x, pt.y
    lv = lam.value
    tol_t = 1e-12 * r.t_axis.length
    tol_s = 1e-12 * r.s_axis.length
    x_lo, x_hi = _lambda_box(r.t_axis, lv)
    y_lo, y_hi = _lambda_box(r.s_axis, lv)
    if not (x_lo - tol_t <= x <= x_hi + tol_t and y_lo - tol_s <= y <= y_hi + tol_s):
        raise PointOutsideLambdaBox(
            f"point ({x}, {y}) outside [{x_lo}, {x_hi}] x [{y_lo}, {y_hi}] "
            f"for lambda={lv}"
        )
    w0 = 1.0 - lv
    half = 0.5 * lv
    int_ty = integrate_1d(f.fix_s(y), r.t_axis, q)
    int_xs = integrate_1d(f.fix_t(x), r.s_axis, q)
    int_tc = integrate_1d(f.fix_s(c), r.t_axis, q)
    int_td = integrate_1d(f.fix_s(d), r.t_axis, q)
    int_as = integrate_1d(f.fix_t(a), r.s_axis, q)
    int_bs = integrate_1d(f.fix_t(b), r.s_axis, q)
    dbl = integrate_2d(f, r, q, split=pt)
    u = x - r.t_axis.midpoint
    v = y - r.s_axis.midpoint
    lhs = abs(
        w0 * w0 * f.eval(x, y)
        + half * w0 * (f.eval(a, y) + f.eval(b, y) + f.eval(x, c) + f.eval(x, d))
        + half * half * (f.eval(a, c) + f.eval(b, c) + f.eval(a, d) + f.eval(b, d))
        - (w0 * int_ty + half * (int_tc + int_td)) / r.t_axis.length
        - (w0 * int_xs + half * (int_as + int_bs)) / r.s_axis.length
        - db.midpoint * w0 * w0 * u * v
        + dbl / r.area
    )
    shape = lv * lv + w0 * w0
    rhs = (
        db.halfwidth
        / r.area
        * (shape * r.t_axis.length ** 2 / 4.0 + u * u)
        * (shape * r.s_axis.length ** 2 / 4.0 + v * v)
    )
    return _outcome(lhs, rhs, slack)


def quarter_rule_anchor_weight(r: Rectangle, pt: EvalPoint) -> float:
    """Weight K multiplying f(x, y) in the quarter-kernel rule."""
    a, b, c, d = _axes(r)
    x, y = pt.x, pt.y
    return (3.0 * (x - a) - (b - x)) * (3.0 * (y - c) - (d - y)) / r.area


def quarter_rule_boundary_term(
    f: BivariateFunction, r: Rectangle, pt: EvalPoint
) -> float:
    """Boundary-value combination H of the quarter-kernel rule: the four
    stated blocks summed, divided by the area."""
    a, b, c, d = _axes(r)
    x, y = pt.x, pt.y
    ky = 3.0 * (y - c) - (d - y)
    kx = 3.0 * (x - a) - (b - x)
    blocks = (
        (3.0 * (b - x) * f.eval(b, y) - (x - a) * f.eval(a, y)) * ky
        + (3.0 * (d - y) * f.eval(x, d) - (y - c) * f.eval(x, c)) * kx
        + ((y - c) * f.eval(a, c) - 3.0 * (d - y) * f.eval(a, d)) * (x - a)
        + (3.0 * (d - y) * f.eval(b, d) - (y - c) * f.eval(b, c)) * (b - x)
    )
    return blocks / r.area


def quarter_rule_functional(
    f: BivariateFunction,
    r: Rectangle,
    pt: EvalPoint,
    db: DerivativeBounds,
    q: QuadConfig,
    slack: Optional[float] = None,
) -> RuleOutcome:
    """The quarter-kernel rule exactly as catalogued (see module docstring).

    Expected to fail the constant-function case: with f == 1 and zero
    derivative spread on the unit square the lhs evaluates to 3/16 while
    the rhs is 0.
    """
    a, b, c, d = _axes(r)
    x, y = pt.x, pt.y
    area = r.area
    int_xs = integrate_1d(f.fix_t(x), r.s_axis, q)
    int_ty = integrate_1d(f.fix_s(y), r.t_axis, q)
    int_as = integrate_1d(f.fix_t(a), r.s_axis, q)
    int_bs = integrate_1d(f.fix_t(b), r.s_axis, q)
    int_tc = integrate_1d(f.fix_s(c), r.t_axis, q)
    int_td = integrate_1d(f.fix_s(d), r.t_axis, q)
    dbl = integrate_2d(f, r, q, split=pt)
    kx = 3.0 * (x - a) - (b - x)
    ky = 3.0 * (y - c) - (d - y)
    signed_factor = ((y - c) ** 2 - (d - y) ** 2) * ((x - a) ** 2 - (b - x) ** 2)
    lhs = abs(
        quarter_rule_anchor_weight(r, pt) * f.eval(x, y) / 16.0
        + quarter_rule_boundary_term(f, r, pt) / 16.0
        - kx * int_xs / (4.0 * area)
        - ky * int_ty / (4.0 * area)
        - (3.0 * (b - x) * int_bs - (x - a) * int_as) / (4.0 * area)
        - (3.0 * (d - y) * int_td - (y - c) * int_tc) / (4.0 * area)
        - signed_factor * (db.upper + db.lower) / (32.0 * area)
        + dbl / area
    )
    rhs = (
        25.0
        * ((y - c) ** 2 + (d - y) ** 2)
        * ((x - a) ** 2 + (b - x) ** 2)
        / (512.0 * area)
        * (db.upper - db.lower)
    )
    return _outcome(lhs, rhs, slack)
