"""Parameters, derived rate constants, region classification, and the
piecewise-linear (G, H) change of variables.

The model is a six-tick order-book window whose interior queue pair (w, x)
determines where the bid and ask sit.  Everything downstream consumes the
derived constants computed here, and the (G, H) coordinates are the
drift-free / collapsing pair used by the diffusion limit.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass


@dataclass(frozen=True)
class ModelParams:
    """Primitive model parameters.

    a, b
        Shape parameters of the arrival-rate family; both must exceed 1 and
        satisfy a + b > a*b.
    lambda0
        Market-buy rate; all buy-side rates scale off it.
    theta_b, theta_s
        Per-order cancellation intensities (before the 1/sqrt(n) scaling)
        for stale buy and sell orders.
    """

    a: float = 1.5
    b: float = 1.5
    lambda0: float = 1.0
    theta_b: float = 1.0
    theta_s: float = 1.0


@dataclass(frozen=True)
class DerivedConstants:
    """Rates and limit constants derived from :class:`ModelParams`.

    sigma_plus and sigma_minus are diffusion standard deviations per unit
    square-root time; kappa_L > 0 and kappa_R < 0 are the scaled queue levels
    the outer queues snap to; frac_one_tick/frac_two_tick are the limiting
    fractions of time the spread is one/two ticks wide.
    """

    lambda1: float
    lambda2: float
    mu0: float
    mu1: float
    mu2: float
    c: float
    kappa_L: float
    kappa_R: float
    sigma_plus: float
    sigma_minus: float
    rho: float
    alpha_plus: float
    alpha_minus: float
    frac_one_tick: float
    frac_two_tick: float


class Region(enum.Enum):
    """Classification of the interior queue pair (w, x).

    w counts orders at the third window tick and x at the fourth, with buy
    orders positive and sell orders negative.  The quadrant {w < 0, x > 0}
    (sells resting below buys) is unreachable.
    """

    NE = "NE"
    E = "E"
    SE_plus = "SE+"
    SE = "SE"
    SE_minus = "SE-"
    S = "S"
    SW = "SW"
    O = "O"


def _require(cond: bool, name: str) -> None:
    if not cond:
        raise ValueError(f"parameter constraint violated: requires {name}")


def derive_constants(params: ModelParams) -> DerivedConstants:
    """Validate ``params`` and compute all derived constants.

    Raises ValueError naming the violated constraint if the parameters are
    outside the admissible family (a > 1, b > 1, a + b > a*b, positive
    lambda0/theta_b/theta_s).
    """
    a, b = params.a, params.b
    lambda0 = params.lambda0
    _require(a > 1, "a > 1")
    _require(b > 1, "b > 1")
    _require(a + b > a * b, "a + b > a*b")
    _require(lambda0 > 0, "lambda0 > 0")
    _require(params.theta_b > 0, "theta_b > 0")
    _require(params.theta_s > 0, "theta_s > 0")

    mu0 = a * lambda0 / b          # balance of market flow: a*lambda0 = b*mu0
    lambda1 = (a - 1) * lambda0
    lambda2 = (a + b - a * b) * lambda0
    mu1 = (b - 1) * mu0
    mu2 = (a + b - a * b) * mu0
    c = mu0 - lambda1              # equals lambda0 - mu1 and lambda2/b and mu2/a

    kappa_L = lambda2 * mu1 / (params.theta_b * lambda1)
    kappa_R = -mu2 * lambda1 / (params.theta_s * mu1)

    sigma_plus = math.sqrt(2.0 * (lambda0 + b * lambda1))
    sigma_minus = math.sqrt(2.0 * (mu0 + a * mu1))
    rho = -2.0 * (lambda1 + mu1) / (sigma_plus * sigma_minus)
    alpha_plus = -rho * sigma_minus / sigma_plus
    alpha_minus = -rho * sigma_plus / sigma_minus

    frac_one_tick = 2.0 - (a + b) / (a * b)
    frac_two_tick = (a + b) / (a * b) - 1.0

    return DerivedConstants(
        lambda1=lambda1,
        lambda2=lambda2,
        mu0=mu0,
        mu1=mu1,
        mu2=mu2,
        c=c,
        kappa_L=kappa_L,
        kappa_R=kappa_R,
        sigma_plus=sigma_plus,
        sigma_minus=sigma_minus,
        rho=rho,
        alpha_plus=alpha_plus,
        alpha_minus=alpha_minus,
        frac_one_tick=frac_one_tick,
        frac_two_tick=frac_two_tick,
    )


def region_of(w: float, x: float) -> Region:
    """Classify the interior pair (w, x).

    Comparisons are exact; callers quantize first if they carry float noise.
    Raises ValueError for the unreachable quadrant {w < 0, x > 0}.
    """
    if w < 0 and x > 0:
        raise ValueError(f"invalid interior state (w={w}, x={x}): w < 0 with x > 0")
    if x > 0:
        return Region.NE
    if x == 0:
        if w > 0:
            return Region.E
        if w < 0:
            return Region.SW
        return Region.O
    # x < 0
    if w < 0:
        return Region.SW
    if w == 0:
        return Region.S
    s = w + x
    if s > 0:
        return Region.SE_plus
    if s == 0:
        return Region.SE
    return Region.SE_minus


_G_NE = frozenset((Region.NE, Region.E))
_G_SW = frozenset((Region.SW, Region.S))
_H_X = frozenset((Region.NE, Region.E, Region.SE_plus, Region.SE, Region.O))


def gh_transform(w: float, x: float, params: ModelParams) -> tuple[float, float]:
    """Map the interior pair (w, x) to the (G, H) coordinates.

    G is the drift-free combination (w + b*x on the buy-heavy side, w + x in
    the middle wedge, a*w + x on the sell-heavy side); H is the coordinate
    that collapses in the diffusion limit (x on the buy-heavy side, -w on the
    sell-heavy side).  The map is continuous and piecewise linear.
    """
    r = region_of(w, x)
    if r in _G_NE:
        g = w + params.b * x
    elif r in _G_SW:
        g = params.a * w + x
    else:
        g = w + x
    h = x if r in _H_X else -w
    return float(g), float(h)


def gh_inverse(g: float, h: float, params: ModelParams) -> tuple[float, float]:
    """Invert :func:`gh_transform`.

    Raises ValueError when (g, h) lies outside the image of the valid
    (w, x) half-plane, i.e. when h > g/b for g >= 0 or h > -g/a for g < 0.
    """
    a, b = params.a, params.b
    if g >= 0:
        if h > g / b:
            raise ValueError(
                f"(g={g}, h={h}) outside transform image: requires h <= g/b when g >= 0"
            )
        if h >= 0:
            w = g - b * h
        else:
            w = g - h
        x = h
    else:
        if h > -g / a:
            raise ValueError(
                f"(g={g}, h={h}) outside transform image: requires h <= -g/a when g < 0"
            )
        w = -h
        x = g + h if h < 0 else g + a * h
    return float(w), float(x)
