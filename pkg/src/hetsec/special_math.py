"""Exponential integral and the quadrature rules used by the closed forms.

``exp_integral`` follows the standard convention ``Ei(-u) = -E1(u)`` for
``u > 0`` and the Cauchy principal value for positive arguments.  Every
closed form in this package calls it at negative arguments, usually through
the overflow-free ``exp_integral_scaled``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import integrate

from .errors import ConvergenceError, DomainError, EvaluationError

__all__ = [
    "EULER_GAMMA",
    "QuadratureSpec",
    "exp_integral",
    "exp_integral_scaled",
    "inner_inverse_square_integral",
    "integrate_exp_weighted",
]

EULER_GAMMA = 0.57721566490153286061

_EPS = np.finfo(float).eps
_TINY = 1e-300

# Crossovers between expansions.  Below _E1_SERIES_MAX the alternating E1
# series loses at most a factor e^2 to cancellation; above it the continued
# fraction converges in < 100 steps.  The positive-argument Ei series has no
# cancellation, the asymptotic series is accurate to ~1e-17 beyond 40.
_E1_SERIES_MAX = 1.0
_EI_SERIES_MAX = 40.0

# Endpoint-cancellation limit for the antiderivative path of
# inner_inverse_square_integral (estimated relative rounding error).
_CANCELLATION_LIMIT = 1e-12


def _e1_series(u):
    # E1(u) = -gamma - ln u - sum_{k>=1} (-u)^k / (k k!)
    total = 0.0
    term = 1.0
    for k in range(1, 200):
        term *= -u / k
        contrib = term / k
        total += contrib
        if abs(contrib) <= _EPS * abs(total):
            break
    return -EULER_GAMMA - math.log(u) - total


def _e1_scaled_cf(u):
    """``exp(u) * E1(u)`` by the modified Lentz continued fraction, u > 1."""
    b = u + 1.0
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, 10_000):
        an = -float(i * i)
        b += 2.0
        d = 1.0 / (an * d + b)
        c = b + an / c
        delta = c * d
        h *= delta
        if abs(delta - 1.0) <= _EPS:
            return h
    raise ConvergenceError("E1 continued fraction did not converge", best_estimate=h)


def _ei_series(x):
    # Ei(x) = gamma + ln x + sum_{k>=1} x^k / (k k!), all terms positive
    total = 0.0
    term = 1.0
    for k in range(1, 500):
        term *= x / k
        contrib = term / k
        total += contrib
        if contrib <= _EPS * total:
            break
    return EULER_GAMMA + math.log(x) + total


def _ei_scaled_asymptotic(x):
    """``exp(-x) * Ei(x)`` for large positive x, truncated at the smallest term."""
    total = 0.0
    term = 1.0 / x
    last = math.inf
    for k in range(1, 200):
        if term >= last:
            break
        total += term
        if term <= _EPS * total:
            break
        last = term
        term *= k / x
    return total


def exp_integral(x: float) -> float:
    """Exponential integral Ei(x).

    Parameters
    ----------
    x : float
        Nonzero real argument.  For ``x < 0`` this is ``-E1(-x)``; for
        ``x > 0`` the principal value.

    Raises
    ------
    DomainError
        If ``x == 0`` (logarithmic singularity) or ``x`` is not finite.
    """
    x = float(x)
    if x == 0.0 or math.isnan(x):
        raise DomainError(f"Ei is undefined at x = {x}")
    if math.isinf(x):
        return 0.0 if x < 0 else math.inf
    if x < 0:
        u = -x
        if u <= _E1_SERIES_MAX:
            return -_e1_series(u)
        if u > 745.2:
            return -0.0
        return -math.exp(-u) * _e1_scaled_cf(u)
    if x <= _EI_SERIES_MAX:
        return _ei_series(x)
    if x > 709.7:
        return math.inf
    return math.exp(x) * _ei_scaled_asymptotic(x)


def exp_integral_scaled(x: float) -> float:
    """Return ``exp(-x) * Ei(x)`` without intermediate overflow.

    The closed forms need products like ``exp(h) * Ei(-h)`` with ``h`` up to
    ~1e12; this is ``exp_integral_scaled(-h)``.
    """
    x = float(x)
    if x == 0.0 or math.isnan(x):
        raise DomainError(f"Ei is undefined at x = {x}")
    if math.isinf(x):
        return 0.0
    if x < 0:
        u = -x
        if u <= _E1_SERIES_MAX:
            return -math.exp(u) * _e1_series(u)
        return -_e1_scaled_cf(u)
    if x <= _EI_SERIES_MAX:
        return math.exp(-x) * _ei_series(x)
    return _ei_scaled_asymptotic(x)


def _q(y):
    # 1/y - exp(-y) Ei(y), y > 0.  Asymptotically -1/y^2 - 2/y^3 - ...
    if y <= _EI_SERIES_MAX:
        return 1.0 / y - exp_integral_scaled(y)
    return 1.0 / y - _ei_scaled_asymptotic(y)


def _q_abs_error(y):
    # rounding error of _q: the subtraction loses ~y relative digits below 40
    if y <= _EI_SERIES_MAX:
        return 4 * _EPS * (1.0 / y + abs(exp_integral_scaled(y)))
    return 4 * _EPS * abs(_q(y))


def inner_inverse_square_integral(a: float, b: float, shift: float = 0.0) -> float:
    """Integral of ``exp(-t) / t**2`` over ``[a, b]`` with ``a < b < 0``.

    The value is returned multiplied by ``exp(-shift)``; choosing
    ``shift = -a`` keeps the result finite for very negative ``a``, where the
    unscaled integral overflows.

    The antiderivative ``-exp(-t)/t - Ei(-t)`` is used unless the two
    endpoint terms cancel so badly that the estimated relative rounding
    error exceeds 1e-12, in which case the integral is done by adaptive
    quadrature.
    """
    a = float(a)
    b = float(b)
    if not (a < b < 0.0):
        raise DomainError(f"need a < b < 0, got a={a}, b={b}")
    if not math.isfinite(a):
        raise DomainError("lower limit must be finite")
    # substitute y = -t: integral of exp(y) / y^2 over [y_lo, y_hi]
    y_lo, y_hi = -b, -a
    t_lo = math.exp(y_lo - shift) * _q(y_lo)
    t_hi = math.exp(y_hi - shift) * _q(y_hi)
    value = t_lo - t_hi
    rounding = (math.exp(y_lo - shift) * _q_abs_error(y_lo)
                + math.exp(y_hi - shift) * _q_abs_error(y_hi)
                + _EPS * (abs(t_lo) + abs(t_hi)))
    if value > 0 and rounding <= _CANCELLATION_LIMIT * value:
        return value
    return _inverse_square_by_quadrature(y_lo, y_hi, shift)


def _inverse_square_by_quadrature(y_lo, y_hi, shift):
    # w = y_hi - y keeps the exponential factor bounded by 1 on [0, width]
    width = y_hi - y_lo
    scale = math.exp(y_hi - shift)
    val, err = integrate.quad(lambda w: math.exp(-w) / (y_hi - w) ** 2,
                              0.0, width, epsabs=0.0, epsrel=1e-13, limit=200)
    return scale * val


@dataclass(frozen=True)
class QuadratureSpec:
    """How to evaluate a semi-infinite integral with weight ``exp(-x)``.

    ``method="laguerre"`` runs a Gauss-Laguerre rule with ``node_count``
    nodes and again with twice as many; if the two disagree beyond
    ``relative_tolerance`` it escalates to the adaptive rule.
    ``method="adaptive"`` integrates on ``u = ln x`` with QUADPACK, splitting
    at any characteristic scales the caller supplies, using at most
    ``max_refinements`` subintervals.
    """

    method: str = "laguerre"
    node_count: int = 64
    relative_tolerance: float = 1e-10
    max_refinements: int = 500

    def __post_init__(self):
        if self.method not in ("laguerre", "adaptive"):
            raise DomainError(f"unknown quadrature method {self.method!r}")
        if self.node_count < 2:
            raise DomainError("node_count must be >= 2")
        if not self.relative_tolerance > 0:
            raise DomainError("relative_tolerance must be > 0")
        if self.max_refinements < 1:
            raise DomainError("max_refinements must be >= 1")


_LAGUERRE_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _laguerre_rule(n):
    rule = _LAGUERRE_CACHE.get(n)
    if rule is None:
        rule = np.polynomial.laguerre.laggauss(n)
        _LAGUERRE_CACHE[n] = rule
    return rule


def _checked(f):
    def wrapped(x):
        y = f(x)
        if not math.isfinite(y):
            raise EvaluationError(f"integrand is {y} at x = {x!r}", abscissa=x)
        return y
    return wrapped


def _laguerre(f, n):
    nodes, weights = _laguerre_rule(n)
    total = 0.0
    for x, w in zip(nodes, weights):
        if w == 0.0:
            continue
        total += w * f(float(x))
    return total


# Outer cut-offs of the adaptive rule.  Beyond x = 120 the weight is below
# 1e-52; below the smallest scale / 1e30 the integral of a bounded f is
# negligible.
_X_HI = 120.0
_MIN_QUAD_RTOL = 50 * _EPS  # QUADPACK's floor on epsrel
_LOW_DECADES = 30.0


def integrate_exp_weighted(
    f: Callable[[float], float],
    spec: QuadratureSpec | None = None,
    scales: Sequence[float] = (),
) -> tuple[float, float]:
    """Integrate ``f(x) * exp(-x)`` over ``(0, inf)``.

    ``f`` is never evaluated at ``x = 0``.  ``scales`` are abscissae where
    ``f`` changes behaviour (steps, kinks); the adaptive rule splits there,
    and a scale below the first node of the fixed rule sends the integral
    straight to the adaptive rule.

    Returns
    -------
    value, error_bound : float
    """
    spec = spec or QuadratureSpec()
    f = _checked(f)
    # a feature below the first node of the doubled rule is invisible to it
    unresolved = any(0 < s < _laguerre_rule(2 * spec.node_count)[0][0] for s in scales)
    if spec.method == "laguerre" and not unresolved:
        n = spec.node_count
        coarse = _laguerre(f, n)
        fine = _laguerre(f, 2 * n)
        diff = abs(fine - coarse)
        if diff <= spec.relative_tolerance * abs(fine) or fine == coarse:
            return fine, max(diff, _EPS * abs(fine))
    return _adaptive_exp_weighted(f, spec, scales)


def _adaptive_exp_weighted(f, spec, scales):
    positive = [float(s) for s in scales if s > 0 and math.isfinite(s)]
    smallest = min(positive + [1.0])
    u_lo = math.log(smallest) - _LOW_DECADES * math.log(10.0)
    u_hi = math.log(_X_HI)
    points = sorted({math.log(s) for s in positive if u_lo < math.log(s) < u_hi})

    def g(u):
        x = math.exp(u)
        return f(x) * math.exp(u - x)

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        value, err, _info, *message = integrate.quad(
            g, u_lo, u_hi, points=points or None, epsabs=0.0,
            epsrel=max(spec.relative_tolerance, _MIN_QUAD_RTOL), limit=spec.max_refinements,
            full_output=1)
    # QUADPACK flags roundoff conservatively; accept a flagged result when
    # its own error estimate still meets a 100x-relaxed tolerance
    if message and err > 100 * spec.relative_tolerance * abs(value):
        raise ConvergenceError(
            f"adaptive quadrature failed: {message[0].splitlines()[0]} "
            f"(value={value:.6g}, err={err:.3g})",
            best_estimate=value, error_estimate=err)
    # lower cut-off: bounded f contributes at most exp(u_lo) * |f(x_lo)|-ish
    tail = abs(f(math.exp(u_lo))) * math.exp(u_lo)
    return value, err + tail
