"""Closed-form and quadrature evaluation of the diffusion-limit statistics.

Covers the first-passage machinery of a correlated planar Brownian motion
absorbed at the two edges of a quadrant (joint and conditional passage-time
densities, absorption-order probabilities), the excursion-conditioned
densities for the bracketing processes to reach zero, the renewal
intensities and price-shift direction probability built from them, the
renewal-time characteristic functions, the Brownian excursion kernels, and
the subordinator Fourier identity used to close the oscillatory tails.

Everything here is a pure function of its arguments.  Functions that rely on
truncated series or truncated improper integrals accept an optional mutable
``flags`` list into which quality warnings are appended (``"series_cap"``,
``"tail_estimate_uncertainty"``, ``"quadrature_tolerance"``).
"""

from __future__ import annotations

import cmath
import functools
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from .model_params import DerivedConstants

__all__ = [
    "QuadratureConfig",
    "QuadrantParams",
    "DEFAULT_QUADRATURE",
    "quadrant_params",
    "bessel_i",
    "exit_probs",
    "metzler_density",
    "conditional_fpt_density_D",
    "conditional_fpt_density_E",
    "kernel_K",
    "kernel_p0",
    "h_l",
    "p_vstar_density",
    "p_ystar_density",
    "p_vstar_total",
    "p_ystar_total",
    "renewal_intensities",
    "renewal_down_prob",
    "renewal_cf",
    "identity_7_62",
]

FLAG_SERIES_CAP = "series_cap"
FLAG_TAIL = "tail_estimate_uncertainty"
FLAG_QUAD = "quadrature_tolerance"

# largest log representable in a float; beyond this bessel_i must be asked
# for the log-scaled value
_MAX_EXP = math.log(np.finfo(float).max)

# power series is used up to this argument; at the switch it still
# converges comfortably inside the default term cap
_SERIES_Z_MAX = 240.0

# mass certified away by the reflection envelope: exp(-_ENV_LOG) ~ 1e-13
_ENV_LOG = 30.0


@dataclass(frozen=True)
class QuadratureConfig:
    """Error targets and truncation rules shared by the evaluators.

    abs_tol, rel_tol
        Error targets for series truncation and quadrature.
    series_terms_max
        Cap on the number of summed Bessel-series terms; hitting the cap
        is reported through the ``flags`` mechanism, never by raising.
    tail_cut
        (lower, upper) cutoffs for improper integrals over excursion
        length.  Below the lower cutoff the integrand is certified small by
        a reflection envelope; above the upper cutoff the hit probability
        is frozen and the pure power tail integrated in closed form.
    """

    abs_tol: float = 1e-10
    rel_tol: float = 1e-8
    series_terms_max: int = 200
    tail_cut: tuple[float, float] = (1e-4, 1e3)

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.series_terms_max < 1:
            raise ValueError("series_terms_max must be at least 1")
        lo, hi = self.tail_cut
        if not (0 < lo < hi):
            raise ValueError("tail_cut must satisfy 0 < lower < upper")


DEFAULT_QUADRATURE = QuadratureConfig()


def _cfg(config):
    return DEFAULT_QUADRATURE if config is None else config


def _note(flags, message):
    if flags is not None and message not in flags:
        flags.append(message)


@dataclass(frozen=True)
class QuadrantParams:
    """Start point and geometry for the planar first-passage problem.

    The driving pair is a correlated Brownian motion with standard
    deviations sigma_plus/sigma_minus and correlation rho, started at
    distance v1 > 0 from one absorbing edge and x1 < 0 relative to the
    other.  After the normalizing linear map the state space is a wedge of
    opening alpha; theta0 is the angular coordinate of the start point and
    r0 its radius.
    """

    v1: float
    x1: float
    sigma_plus: float
    sigma_minus: float
    rho: float
    alpha: float
    theta0: float
    r0: float


def quadrant_params(v1, x1, constants=None, *, sigma_plus=None,
                    sigma_minus=None, rho=None):
    """Build :class:`QuadrantParams`, deriving the wedge geometry.

    Diffusion coefficients come from ``constants`` (a
    :class:`DerivedConstants`) unless given explicitly by keyword.
    """
    if constants is not None:
        sigma_plus = constants.sigma_plus
        sigma_minus = constants.sigma_minus
        rho = constants.rho
    if sigma_plus is None or sigma_minus is None or rho is None:
        raise ValueError("need constants or explicit sigma_plus/sigma_minus/rho")
    v1 = float(v1)
    x1 = float(x1)
    if not (math.isfinite(v1) and v1 > 0):
        raise ValueError("v1 must be finite and positive")
    if not (math.isfinite(x1) and x1 < 0):
        raise ValueError("x1 must be finite and negative")
    if not (sigma_plus > 0 and sigma_minus > 0):
        raise ValueError("diffusion coefficients must be positive")
    if not -1.0 < rho < 1.0:
        raise ValueError("correlation must lie strictly inside (-1, 1)")
    sin_a = math.sqrt(1.0 - rho * rho)
    alpha = math.atan2(sin_a, -rho)
    theta0 = math.atan2(sigma_plus * sin_a * abs(x1),
                        sigma_minus * v1 + sigma_plus * rho * x1)
    r0_sq = (v1 * v1 / (sigma_plus * sigma_plus)
             + 2.0 * rho * v1 * x1 / (sigma_plus * sigma_minus)
             + x1 * x1 / (sigma_minus * sigma_minus)) / (1.0 - rho * rho)
    if not 0.0 < theta0 < alpha:
        raise ValueError("start point must lie strictly inside the wedge")
    return QuadrantParams(v1=v1, x1=x1, sigma_plus=float(sigma_plus),
                          sigma_minus=float(sigma_minus), rho=float(rho),
                          alpha=alpha, theta0=theta0, r0=math.sqrt(r0_sq))


# ---------------------------------------------------------------------------
# modified Bessel function of the first kind


def _log_i_series(nu, z, terms_max):
    """log I_nu(z) by the ascending series, accumulated in log space so no
    intermediate can overflow.  Terms are summed until the next falls below
    relative machine precision or the cap is hit."""
    log_term = nu * math.log(0.5 * z) - math.lgamma(nu + 1.0)
    log_x = 2.0 * math.log(0.5 * z)
    acc = log_term
    for k in range(1, terms_max + 1):
        log_term += log_x - math.log(k * (nu + k))
        acc = np.logaddexp(acc, log_term)
        if log_term < acc + math.log(1e-17):
            break
    return float(acc)


def _log_i_asym(nu, z):
    """Large-argument expansion of log I_nu(z), valid while the order stays
    well below the argument; terms are summed while they decrease."""
    mu4 = 4.0 * nu * nu
    term = 1.0
    acc = 1.0
    for k in range(1, 50):
        nxt = -term * (mu4 - (2.0 * k - 1.0) ** 2) / (8.0 * z * k)
        if abs(nxt) >= abs(term):
            break
        acc += nxt
        term = nxt
        if abs(term) <= 1e-17 * acc:
            break
    return z - 0.5 * math.log(2.0 * math.pi * z) + math.log(max(acc, 1e-300))


def bessel_i(nu, z, log=False, config=None):
    """Modified Bessel function of the first kind, I_nu(z).

    Evaluated by the ascending power series, switching to the scaled
    large-argument expansion once the argument is large and dominates the
    order; for large arguments with comparably large orders the log-space
    series is kept, where the term cap can bind and accuracy degrades
    gracefully.  With ``log=True`` returns log I_nu(z), which stays
    representable long after the plain value overflows; without it an
    OverflowError is raised once the value exceeds the floating-point
    range.
    """
    nu = float(nu)
    z = float(z)
    if not (math.isfinite(nu) and nu >= 0):
        raise ValueError("order must be finite and nonnegative")
    if not (math.isfinite(z) and z >= 0):
        raise ValueError("argument must be finite and nonnegative")
    cfg = _cfg(config)
    if z == 0.0:
        lv = 0.0 if nu == 0.0 else -math.inf
    elif z <= _SERIES_Z_MAX or 4.0 * nu * nu > 2.0 * z:
        lv = _log_i_series(nu, z, cfg.series_terms_max)
    else:
        lv = _log_i_asym(nu, z)
    if log:
        return lv
    if lv > _MAX_EXP:
        raise OverflowError("I_nu(z) exceeds the floating-point range; "
                            "request log=True for the log-scaled value")
    return math.exp(lv)


# ---------------------------------------------------------------------------
# composite quadrature helpers

_GL_ORDER = 12
_GL_X, _GL_W = np.polynomial.legendre.leggauss(_GL_ORDER)
# Legendre-coefficient transform: coef_k = sum_j _LEG_M[k, j] * f(x_j)
_LEG_M = (0.5 * (2.0 * np.arange(_GL_ORDER) + 1.0)[:, None]
          * _GL_W[None, :]
          * np.polynomial.legendre.legvander(_GL_X, _GL_ORDER - 1).T)


def _panel_nodes(edges):
    """Gauss-Legendre nodes/weights on consecutive panels.

    Returns (nodes, weights, half_widths, midpoints); nodes and weights are
    flattened in panel order.
    """
    edges = np.asarray(edges, dtype=float)
    a = edges[:-1]
    b = edges[1:]
    h = 0.5 * (b - a)
    m = 0.5 * (b + a)
    nodes = (m[:, None] + h[:, None] * _GL_X[None, :]).ravel()
    weights = (h[:, None] * _GL_W[None, :]).ravel()
    return nodes, weights, h, m


def _inner_edges(lo, ell, n_lead=14, n_tail=6):
    """Panel edges on (lo, ell): geometric growth from lo, geometric
    shrinking into the right endpoint."""
    lo = min(lo, 0.25 * ell)
    mid = 0.5 * ell
    lead = np.geomspace(lo, mid, n_lead + 1)
    gaps = np.geomspace(mid, mid * 1e-3, n_tail)
    tail = ell - gaps[1:]
    return np.concatenate([lead, tail, [ell]])


def _legendre_moments(c):
    """Oscillatory panel moments: integral of P_k(x) e^{i c x} over [-1, 1]
    for k below the panel order, elementwise over c."""
    c = np.asarray(c, dtype=float)
    ac = np.abs(c)
    J = np.stack([special.spherical_jn(k, ac) for k in range(_GL_ORDER)],
                 axis=-1)
    mom = 2.0 * (1j ** np.arange(_GL_ORDER)) * J
    neg = c < 0
    mom[neg, :] = np.conj(mom[neg, :])
    return mom


def _filon_coefs(samples):
    """Per-panel Legendre coefficients from samples of shape (..., order)."""
    return np.einsum("...j,kj->...k", samples, _LEG_M)


def _filon_integral(h, m, coefs, alpha):
    """Sum over panels of integral f(s) e^{i alpha s} ds, f given by its
    Legendre coefficients per panel."""
    mom = _legendre_moments(alpha * h)
    phase = np.exp(1j * alpha * m)
    return complex(np.sum(h * phase * np.sum(coefs * mom, axis=-1)))


def _osc_power_tail(alpha, L):
    """Closed form of integral_L^inf e^{i alpha ell} (2 pi ell^3)^{-1/2} d ell."""
    if alpha == 0.0:
        return complex(math.sqrt(2.0 / math.pi) / math.sqrt(L))
    a = abs(alpha)
    y = math.sqrt(2.0 * a * L / math.pi)
    S, C = special.fresnel(y)
    half = complex(0.5 - C, 0.5 - S) * math.sqrt(math.pi / (2.0 * a))
    val = (2.0 * cmath.exp(1j * a * L) / math.sqrt(L) + 2j * a * 2.0 * half)
    val /= math.sqrt(2.0 * math.pi)
    return val if alpha > 0 else val.conjugate()


# ---------------------------------------------------------------------------
# wedge series shared by the joint passage density and the hit densities


def _wedge_sum_scaled(z, w, nu_step, kind, phase, config):
    """Blockwise sum over n of coef(n) I_{n nu_step}(z) e^{-w}.

    kind "sine" uses coef(n) = n sin(n phase); kind "alt" uses
    coef(n) = (-1)^(n-1) n^2.  Each term is assembled from the scaled
    Bessel function times exp(z - w), a damping factor never above one
    here, so nothing can overflow.  Truncation stops after three
    consecutive orders whose largest scaled term falls below
    abs_tol (1 + |partial|).  Returns (values, converged).
    """
    z = np.asarray(z, dtype=float)
    w = np.asarray(w, dtype=float)
    shape = np.broadcast_shapes(z.shape, w.shape)
    zf = np.broadcast_to(z, shape).ravel()
    wf = np.broadcast_to(w, shape).ravel()
    damp = np.exp(zf - wf)
    total = np.zeros(zf.shape)
    converged = False
    small_run = 0
    block = 16
    n0 = 1
    while n0 <= config.series_terms_max and not converged:
        n1 = min(n0 + block - 1, config.series_terms_max)
        ns = np.arange(n0, n1 + 1, dtype=float)
        if kind == "sine":
            coef = ns * np.sin(ns * phase)
        else:
            coef = np.where(np.arange(n0, n1 + 1) % 2 == 1, 1.0, -1.0) * ns * ns
        terms = (coef[:, None]
                 * special.ive(ns[:, None] * nu_step, zf[None, :])
                 * damp[None, :])
        total += terms.sum(axis=0)
        threshold = config.abs_tol * (1.0 + np.max(np.abs(total), initial=0.0))
        for row in np.max(np.abs(terms), axis=1, initial=0.0):
            if row <= threshold:
                small_run += 1
                if small_run >= 3:
                    converged = True
                    break
            else:
                small_run = 0
        n0 = n1 + 1
    return total.reshape(shape), bool(converged)


def _wedge_joint(u, v, q, phase, config):
    """Joint passage density at earlier time u and later times v (array),
    with the sine phase of the branch already chosen."""
    v = np.asarray(v, dtype=float)
    rho = q.rho
    cos2a = 2.0 * rho * rho - 1.0
    sin_a = math.sqrt(1.0 - rho * rho)
    A = v - u
    B = v - u * cos2a
    denom = A + B
    qq = q.r0 * q.r0 / (2.0 * u)
    wexp = qq * B / denom
    zarg = qq * A / denom
    pref = (math.pi * sin_a
            / (2.0 * q.alpha ** 2 * A * np.sqrt(u * (v - u * rho * rho))))
    series, okc = _wedge_sum_scaled(zarg, wexp, math.pi / (2.0 * q.alpha),
                                    "sine", phase, config)
    return np.maximum(pref * series, 0.0), okc


def metzler_density(s, t, q, config=None, flags=None):
    """Joint density of the two edge-passage times of the driving pair.

    The first argument is the passage time of the v side, the second of the
    x side; the two branches s < t and s > t carry different series phases.
    Values within roundoff of zero are clamped to zero.
    """
    s = float(s)
    t = float(t)
    if not (s > 0 and t > 0):
        raise ValueError("both passage times must be positive")
    if s == t:
        raise ValueError("the joint density is defined off the diagonal only")
    cfg = _cfg(config)
    if s < t:
        phase = math.pi * (q.alpha - q.theta0) / q.alpha
        vals, okc = _wedge_joint(s, np.array([t]), q, phase, cfg)
    else:
        phase = math.pi * q.theta0 / q.alpha
        vals, okc = _wedge_joint(t, np.array([s]), q, phase, cfg)
    if not okc:
        _note(flags, FLAG_SERIES_CAP)
    return float(vals[0])


def exit_probs(q):
    """Probability that each absorbing edge is reached first.

    Returns (v side first, x side first); the pair sums to one.
    """
    p = q.theta0 / q.alpha
    return p, 1.0 - p


def _joint_time_integral(u, q, phase, config):
    """Integral over the later passage time of the chosen joint branch,
    the tail reduced to a finite integral by an inverse-sqrt substitution."""
    span = 25.0 * max(q.r0 * q.r0, 1.0, u)
    t_hi = u + span
    edges = u + np.geomspace(span * 1e-8, span, 21)
    nodes, wts, _, _ = _panel_nodes(edges)
    vals, ok1 = _wedge_joint(u, nodes, q, phase, config)
    finite = float(vals @ wts)
    # beyond t_hi the integrand decays like t^{-3/2}; u_sub = t^{-1/2}
    u_edges = np.linspace(0.0, t_hi ** -0.5, 5)
    un, uw, _, _ = _panel_nodes(u_edges)
    keep = un > 0
    tv = un[keep] ** -2.0
    tail_vals, ok2 = _wedge_joint(u, tv, q, phase, config)
    tail = float((2.0 * tail_vals * un[keep] ** -3.0) @ uw[keep])
    return finite + tail, ok1 and ok2


def conditional_fpt_density_D(s, q, config=None, flags=None):
    """Density of the v-side passage time given that edge is reached first."""
    s = float(s)
    if s <= 0:
        raise ValueError("passage time must be positive")
    cfg = _cfg(config)
    phase = math.pi * (q.alpha - q.theta0) / q.alpha
    val, okc = _joint_time_integral(s, q, phase, cfg)
    if not okc:
        _note(flags, FLAG_SERIES_CAP)
    return (q.alpha / q.theta0) * val


def conditional_fpt_density_E(t, q, config=None, flags=None):
    """Density of the x-side passage time given that edge is reached first."""
    t = float(t)
    if t <= 0:
        raise ValueError("passage time must be positive")
    cfg = _cfg(config)
    phase = math.pi * q.theta0 / q.alpha
    val, okc = _joint_time_integral(t, q, phase, cfg)
    if not okc:
        _note(flags, FLAG_SERIES_CAP)
    return (q.alpha / (q.alpha - q.theta0)) * val


# ---------------------------------------------------------------------------
# Brownian excursion kernels


def kernel_K(t, x):
    """First-passage kernel sqrt(2/(pi t^3)) |x| exp(-x^2 / (2t))."""
    t = float(t)
    if t <= 0:
        raise ValueError("time must be positive")
    x = float(x)
    return math.sqrt(2.0 / (math.pi * t ** 3)) * abs(x) * math.exp(-x * x / (2.0 * t))


def kernel_p0(t, x, y):
    """Transition density of Brownian motion on (0, inf) absorbed at zero."""
    t = float(t)
    if t <= 0:
        raise ValueError("time must be positive")
    x = float(x)
    y = float(y)
    if x < 0 or y < 0:
        raise ValueError("states must be nonnegative")
    return (math.exp(-(x - y) ** 2 / (2.0 * t))
            - math.exp(-(x + y) ** 2 / (2.0 * t))) / math.sqrt(2.0 * math.pi * t)


def h_l(ell, s, a, t, b):
    """Transition density of the excursion bridge of length ell.

    Interior case 0 < s < t < ell with a > 0, plus the entrance case
    s = 0, a = 0.
    """
    ell = float(ell)
    s = float(s)
    t = float(t)
    a = float(a)
    b = float(b)
    if not 0.0 <= s < t < ell:
        raise ValueError("times must satisfy 0 <= s < t < ell")
    if b < 0:
        raise ValueError("target state must be nonnegative")
    if s == 0.0:
        if a != 0.0:
            raise ValueError("the entrance case requires a = 0")
        return math.sqrt(math.pi * ell ** 3 / 2.0) * kernel_K(t, b) * kernel_K(ell - t, b)
    if a <= 0:
        raise ValueError("interior case requires a positive starting state")
    return kernel_K(ell - t, b) / kernel_K(ell - s, a) * kernel_p0(t - s, a, b)


# ---------------------------------------------------------------------------
# excursion-conditioned hit densities for the bracketing processes


def _hit_density_core(s, ell, kappa, st2, rho, config):
    """Density (broadcast over s and ell) that the bracketing process first
    hits zero at time s during an excursion of length ell.

    kappa is the starting gap, st2 the variance rate of its free Brownian
    component, rho the driving correlation.
    """
    s = np.asarray(s, dtype=float)
    ell = np.asarray(ell, dtype=float)
    sin_a = math.sqrt(1.0 - rho * rho)
    alpha = math.atan2(sin_a, -rho)
    cos2a = 2.0 * rho * rho - 1.0
    A = ell - s
    B = ell - s * cos2a
    denom = A + B
    qq = kappa * kappa / (2.0 * st2 * s)
    wexp = qq * B / denom
    zarg = qq * A / denom
    pref = (np.sqrt(2.0 * math.pi * ell ** 3 * st2) * math.pi ** 2 * sin_a
            / (2.0 * kappa * alpha ** 3 * A * np.sqrt(s * (ell - s * rho * rho))))
    series, okc = _wedge_sum_scaled(zarg, wexp, math.pi / (2.0 * alpha),
                                    "alt", 0.0, config)
    return np.maximum(pref * series, 0.0), okc


def _hit_sides(constants):
    """(kappa, free-variance, excursion-side weight) for the two brackets."""
    rho = constants.rho
    side_v = (constants.kappa_L,
              (1.0 - rho * rho) * constants.sigma_plus ** 2,
              1.0 / constants.sigma_minus)
    side_y = (-constants.kappa_R,
              (1.0 - rho * rho) * constants.sigma_minus ** 2,
              1.0 / constants.sigma_plus)
    return side_v, side_y


def p_vstar_density(s, ell, params, config=None, flags=None):
    """Density for the left bracketing process to first reach zero at time
    s within a negative excursion of length ell."""
    (kappa, st2, _), _ = _hit_sides(params)
    return _hit_density_point(s, ell, kappa, st2, params.rho, config, flags)


def p_ystar_density(s, ell, params, config=None, flags=None):
    """Density for the right bracketing process to first reach zero at time
    s within a positive excursion of length ell."""
    _, (kappa, st2, _) = _hit_sides(params)
    return _hit_density_point(s, ell, kappa, st2, params.rho, config, flags)


def _hit_density_point(s, ell, kappa, st2, rho, config, flags):
    s = float(s)
    ell = float(ell)
    if not 0.0 < s < ell:
        raise ValueError("hit time must satisfy 0 < s < ell")
    vals, okc = _hit_density_core(np.array([s]), ell, kappa, st2, rho, _cfg(config))
    if not okc:
        _note(flags, FLAG_SERIES_CAP)
    return float(vals[0])


def _envelope_cut(kappa, st2):
    """Time below which the free component alone certifies the hit mass
    under exp(-_ENV_LOG)."""
    return kappa * kappa / (2.0 * st2 * _ENV_LOG)


def _envelope_mass(s, kappa, st2):
    """Reflection bound on the chance of a hit by time s."""
    if s <= 0:
        return 0.0
    return math.erfc(kappa / math.sqrt(2.0 * st2 * s))


def _hit_total(ell, kappa, st2, rho, config):
    """Probability of a hit within an excursion of length ell, with a
    refinement pass; returns (value, error_bound, converged)."""
    lo = min(_envelope_cut(kappa, st2), 0.25 * ell)
    ok = True
    vals = []
    for n_lead, n_tail in ((10, 4), (14, 6)):
        nodes, wts, _, _ = _panel_nodes(_inner_edges(lo, ell, n_lead, n_tail))
        dens, okc = _hit_density_core(nodes, ell, kappa, st2, rho, config)
        ok &= okc
        vals.append(float(dens @ wts))
    err = abs(vals[1] - vals[0]) + _envelope_mass(lo, kappa, st2)
    value = min(max(vals[1], 0.0), 1.0)
    return value, err, ok


def p_vstar_total(ell, params, config=None, flags=None):
    """Probability that the left bracketing process reaches zero within a
    negative excursion of length ell."""
    (kappa, st2, _), _ = _hit_sides(params)
    return _hit_total_checked(ell, kappa, st2, params.rho, config, flags)


def p_ystar_total(ell, params, config=None, flags=None):
    """Probability that the right bracketing process reaches zero within a
    positive excursion of length ell."""
    _, (kappa, st2, _) = _hit_sides(params)
    return _hit_total_checked(ell, kappa, st2, params.rho, config, flags)


def _hit_total_checked(ell, kappa, st2, rho, config, flags):
    ell = float(ell)
    if ell <= 0:
        raise ValueError("excursion length must be positive")
    cfg = _cfg(config)
    value, err, ok = _hit_total(ell, kappa, st2, rho, cfg)
    if not ok:
        _note(flags, FLAG_SERIES_CAP)
    if err > max(cfg.abs_tol, cfg.rel_tol * max(value, 1e-12)) * 100.0:
        _note(flags, FLAG_QUAD)
    return value


# ---------------------------------------------------------------------------
# renewal intensities, direction probability, characteristic functions


def _intensity_side(kappa, st2, weight, rho, config):
    """One renewal intensity: weighted integral of the hit probability
    against the excursion-length measure.  Returns (value, error, flags)."""
    lmin, lmax = config.tail_cut
    side_flags = []

    def integrand(ell):
        value, _, ok = _hit_total(ell, kappa, st2, rho, config)
        if not ok:
            _note(side_flags, FLAG_SERIES_CAP)
        return value / math.sqrt(2.0 * math.pi * ell ** 3)

    interior = [p for p in (0.01, 0.05, 0.2, 1.0, 5.0, 25.0, 125.0)
                if lmin < p < lmax]
    mid, mid_err = integrate.quad(integrand, lmin, lmax, points=interior,
                                  limit=200, epsabs=1e-10, epsrel=1e-7)
    # below lmin the integrand sits under the reflection envelope
    c_env = kappa * kappa / (2.0 * st2)
    below = (math.sqrt(st2) / (2.0 * math.pi * kappa)) * float(special.exp1(c_env / lmin))
    # above lmax the hit probability is frozen and the power tail is exact
    p_far, p_err, ok_far = _hit_total(lmax, kappa, st2, rho, config)
    if not ok_far:
        _note(side_flags, FLAG_SERIES_CAP)
    tail_mass = math.sqrt(2.0 / math.pi) / math.sqrt(lmax)
    value = weight * (mid + p_far * tail_mass)
    error = weight * (mid_err + below + (1.0 - p_far + p_err) * tail_mass)
    return value, error, side_flags


@functools.lru_cache(maxsize=16)
def _intensities_cached(params, config):
    side_v, side_y = _hit_sides(params)
    lam_minus = _intensity_side(side_v[0], side_v[1], side_v[2], params.rho, config)
    lam_plus = _intensity_side(side_y[0], side_y[1], side_y[2], params.rho, config)
    return lam_minus, lam_plus


def renewal_intensities(params, config=None, flags=None):
    """Arrival intensities (lambda_minus, lambda_plus), per unit excursion
    local time, of excursions in which the corresponding bracketing process
    reaches zero."""
    cfg = _cfg(config)
    (vm, em, fm), (vp, ep, fp) = _intensities_cached(params, cfg)
    for f in fm + fp:
        _note(flags, f)
    if em > cfg.rel_tol * vm or ep > cfg.rel_tol * vp:
        _note(flags, FLAG_TAIL)
    return vm, vp


def renewal_down_prob(params, config=None, flags=None):
    """Probability that the first renewal shifts the price window down."""
    lam_minus, lam_plus = renewal_intensities(params, config, flags)
    return lam_minus / (lam_minus + lam_plus)


class _CfSide:
    """Precomputed quadrature table for one bracketing side.

    The joint transform over hit time and excursion length integrates the
    length coordinate first (a positive, oscillation-free integrand), so the
    only complex exponential left lives on the hit-time axis where the panel
    moments treat it exactly.  Beyond the upper length cutoff the hit density
    is frozen at its cutoff shape, matching the tail handling of the
    intensities; the induced bias is flagged by the caller.
    """

    __slots__ = ("weight", "s_h", "s_m", "s_coefs", "l_h", "l_m", "l_coefs",
                 "ptot_far", "lam_tab", "ok")

    def __init__(self, kappa, st2, weight, rho, lmin, lmax, config):
        self.weight = weight
        ok = True
        tail_mass = math.sqrt(2.0 / math.pi) / math.sqrt(lmax)
        # hit probability on a length grid, for the transform against the
        # excursion-length measure
        n_l = max(8, int(round(6.0 * math.log10(lmax / lmin))))
        l_nodes, l_w, self.l_h, self.l_m = _panel_nodes(
            np.geomspace(lmin, lmax, n_l + 1))
        lo_env = _envelope_cut(kappa, st2)
        grids = [_panel_nodes(_inner_edges(min(lo_env, 0.25 * ell), ell))
                 for ell in l_nodes]
        s_mat = np.array([g[0] for g in grids])
        w_mat = np.array([g[1] for g in grids])
        dens, okc = _hit_density_core(s_mat, l_nodes[:, None], kappa, st2,
                                      rho, config)
        ok &= okc
        ptot = np.einsum("ij,ij->i", dens, w_mat)
        far_total, _, okf = _hit_total(lmax, kappa, st2, rho, config)
        ok &= okf
        self.ptot_far = far_total
        g_l = 1.0 / np.sqrt(2.0 * math.pi * l_nodes ** 3)
        self.l_coefs = _filon_coefs((ptot * g_l).reshape(-1, _GL_ORDER))
        # marginal hit-time weight m(s): length integrated out from s to the
        # cutoff plus the frozen far tail
        s_lo = min(lo_env, 1e-3 * lmax)
        n_s = max(8, int(round(6.0 * math.log10(lmax / s_lo))))
        s_nodes, s_w, self.s_h, self.s_m = _panel_nodes(
            np.geomspace(s_lo, lmax, n_s + 1))
        gap0 = (lmax - s_nodes) * 1e-9
        edges = s_nodes[:, None] + np.stack(
            [np.geomspace(g, lmax - s, 17) for g, s in zip(gap0, s_nodes)])
        half = 0.5 * (edges[:, 1:] - edges[:, :-1])
        mid = 0.5 * (edges[:, 1:] + edges[:, :-1])
        l_mat = (mid[:, :, None] + half[:, :, None] * _GL_X).reshape(len(s_nodes), -1)
        lw_mat = (half[:, :, None] * _GL_W).reshape(len(s_nodes), -1)
        dens_m, okm = _hit_density_core(s_nodes[:, None], l_mat, kappa, st2,
                                        rho, config)
        ok &= okm
        g_mat = 1.0 / np.sqrt(2.0 * math.pi * l_mat ** 3)
        m_vals = np.einsum("ij,ij,ij->i", dens_m, g_mat, lw_mat)
        far_dens, okd = _hit_density_core(s_nodes, lmax, kappa, st2, rho, config)
        ok &= okd
        m_vals = m_vals + far_dens * tail_mass
        self.s_coefs = _filon_coefs(m_vals.reshape(-1, _GL_ORDER))
        self.lam_tab = weight * float(np.sum(m_vals * s_w))
        self.ok = ok

    def numerator(self, alpha):
        """Transform of the joint hit-time and length law, hit-time axis
        carrying the oscillation."""
        return self.weight * _filon_integral(self.s_h, self.s_m,
                                             self.s_coefs, alpha)

    def denominator_part(self, alpha, lmax):
        """Transform of the hit probability against the length measure."""
        finite = _filon_integral(self.l_h, self.l_m, self.l_coefs, alpha)
        tail = self.ptot_far * _osc_power_tail(alpha, lmax)
        return self.weight * (finite + tail)


@functools.lru_cache(maxsize=8)
def _cf_table(params, config):
    lmin, lmax = config.tail_cut
    side_v, side_y = _hit_sides(params)
    tab_v = _CfSide(side_v[0], side_v[1], side_v[2], params.rho, lmin, lmax, config)
    tab_y = _CfSide(side_y[0], side_y[1], side_y[2], params.rho, lmin, lmax, config)
    return tab_v, tab_y


def renewal_cf(alpha_arg, params, config=None, flags=None):
    """Characteristic function of the renewal time, evaluated at alpha_arg.

    Returns three complex values: conditional on a down shift, conditional
    on an up shift, and unconditional.  At zero all three are one by
    normalization and are returned exactly.
    """
    alpha_arg = float(alpha_arg)
    if not math.isfinite(alpha_arg):
        raise ValueError("argument must be finite")
    if alpha_arg == 0.0:
        one = complex(1.0, 0.0)
        return one, one, one
    cfg = _cfg(config)
    _, lmax = cfg.tail_cut
    tab_v, tab_y = _cf_table(params, cfg)
    if not (tab_v.ok and tab_y.ok):
        _note(flags, FLAG_SERIES_CAP)
    n_v = tab_v.numerator(alpha_arg)
    n_y = tab_y.numerator(alpha_arg)
    d_v = tab_v.denominator_part(alpha_arg, lmax)
    d_y = tab_y.denominator_part(alpha_arg, lmax)
    root = math.sqrt(abs(alpha_arg)) * complex(1.0, -math.copysign(1.0, alpha_arg))
    denom = d_v + d_y + (tab_v.weight + tab_y.weight) * root
    lam_minus, lam_plus = renewal_intensities(params, cfg, flags)
    # freezing the hit probability beyond the cutoff biases each piece by
    # O((1 - p(lmax)) / sqrt(lmax)); surface it with the tail flag
    tail_bias = ((1.0 - tab_v.ptot_far) * tab_v.weight
                 + (1.0 - tab_y.ptot_far) * tab_y.weight) \
        * math.sqrt(2.0 / math.pi) / math.sqrt(lmax)
    if tail_bias > cfg.rel_tol * abs(denom):
        _note(flags, FLAG_TAIL)
    total = lam_minus + lam_plus
    cf_down = (total / lam_minus) * n_v / denom
    cf_up = (total / lam_plus) * n_y / denom
    cf_all = (n_v + n_y) / denom
    return cf_down, cf_up, cf_all


# ---------------------------------------------------------------------------
# subordinator Fourier identity


def identity_7_62(alpha_arg, config=None):
    """Both sides of the length-measure Fourier identity: the integral of
    (1 - e^{i alpha ell}) (2 pi ell^3)^{-1/2} over ell > 0 against the
    closed form sqrt(|alpha|) (1 - sign(alpha) i).

    Returns (numeric, closed).  The numeric side substitutes ell = u^2 and
    finishes the oscillatory tail in closed form.
    """
    alpha_arg = float(alpha_arg)
    if alpha_arg == 0.0 or not math.isfinite(alpha_arg):
        raise ValueError("argument must be finite and nonzero")
    a = abs(alpha_arg)
    closed = math.sqrt(a) * complex(1.0, -math.copysign(1.0, alpha_arg))
    scale = math.sqrt(2.0 / math.pi)
    cut = 8.0 / math.sqrt(min(a, 1.0))

    def re_part(u):
        return scale * (1.0 - math.cos(a * u * u)) / (u * u)

    def im_part(u):
        return -scale * math.sin(a * u * u) / (u * u)

    re_val, _ = integrate.quad(re_part, 0.0, cut, limit=500,
                               epsabs=1e-11, epsrel=1e-11)
    im_val, _ = integrate.quad(im_part, 0.0, cut, limit=500,
                               epsabs=1e-11, epsrel=1e-11)
    y = cut * math.sqrt(2.0 * a / math.pi)
    S, C = special.fresnel(y)
    fres = complex(0.5 - C, 0.5 - S) * math.sqrt(math.pi / (2.0 * a))
    tail = scale * (1.0 / cut
                    - cmath.exp(1j * a * cut * cut) / cut
                    - 2j * a * fres)
    numeric = complex(re_val, im_val) + tail
    if alpha_arg < 0:
        numeric = numeric.conjugate()
    return numeric, closed
