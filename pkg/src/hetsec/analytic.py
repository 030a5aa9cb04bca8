"""Closed-form secrecy outage probabilities of the three sharing schemes.

All SNRs are linear with unit noise power.  ``gamma_M`` is the macro-cell
SNR and the small cell runs at ``gamma_S = beta * gamma_M``.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, replace

import numpy as np

from .channel import LinkGains
from .errors import ConsistencyError, DomainError, ModelWarning
from .special_math import (
    QuadratureSpec,
    exp_integral_scaled,
    inner_inverse_square_integral,
    integrate_exp_weighted,
)


class Scheme(str, enum.Enum):
    OSS = "OSS"
    IL = "IL"
    IC = "IC"


class Cell(str, enum.Enum):
    MACRO = "macro"
    SMALL = "small"


class Combiner(str, enum.Enum):
    """How the two per-cell outage probabilities become one number."""

    PRODUCT = "product"
    MEAN = "mean"


def db_to_linear(db):
    return 10.0 ** (db / 10.0)


def linear_to_db(x):
    return 10.0 * math.log10(x)


def _pow2(x):
    try:
        return 2.0 ** x
    except OverflowError:
        return math.inf


@dataclass(frozen=True)
class SystemConfig:
    """Operating point shared by all schemes.

    Attributes
    ----------
    gamma_M : float
        Macro-cell transmit SNR P_M / N0 (linear).
    beta : float
        Small-to-macro SNR ratio, so gamma_S = beta * gamma_M.
    alpha_split : float
        Spectrum fraction given to the macro cell under OSS.
    R_M, R_S : float
        Target secrecy rates in bit/s/Hz; must be strictly positive.
    """

    gamma_M: float
    beta: float = 0.5
    alpha_split: float = 0.5
    R_M: float = 1.0
    R_S: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.gamma_M) and self.gamma_M > 0):
            raise DomainError(f"gamma_M must be positive, got {self.gamma_M}")
        if not (math.isfinite(self.beta) and self.beta >= 0):
            raise DomainError(f"beta must be >= 0, got {self.beta}")
        if not 0.0 <= self.alpha_split <= 1.0:
            raise DomainError(f"alpha_split must lie in [0, 1], got {self.alpha_split}")
        # the closed forms drop the (.)^+ and are wrong at R = 0
        if not (self.R_M > 0 and self.R_S > 0):
            raise DomainError("secrecy rates must be strictly positive")

    @property
    def gamma_S(self):
        return self.beta * self.gamma_M

    @classmethod
    def from_db(cls, gamma_M_dB, **kwargs):
        return cls(gamma_M=db_to_linear(gamma_M_dB), **kwargs)

    def with_(self, **changes):
        return replace(self, **changes)


def ic_beta_limit(gains: LinkGains) -> float:
    """Largest SMR for which the cancelling signal fits in the MBS power budget."""
    return gains.Mm / gains.Sm


def check_ic_feasible(cfg: SystemConfig, gains: LinkGains):
    limit = ic_beta_limit(gains)
    if cfg.beta > limit:
        raise DomainError(
            f"IC-NOSS needs beta <= sigma2_Mm/sigma2_Sm = {limit:.6g} so that the "
            f"cancelling signal's mean power stays within P_M; got beta = {cfg.beta}")


# -- OSS ---------------------------------------------------------------------

def _oss_sop(share, rate, snr, main, eve):
    if share <= 0.0 or snr <= 0.0:
        warnings.warn("cell has no spectrum or no power: certain outage", ModelWarning,
                      stacklevel=3)
        return 1.0
    growth = _pow2(rate / share)
    if math.isinf(growth):
        return 1.0
    threshold = (growth - 1.0) / snr
    return 1.0 - main / (main + eve * growth) * math.exp(-threshold / main)


def sop_oss_macro(cfg: SystemConfig, gains: LinkGains) -> float:
    """Macro-cell SOP with a fraction ``alpha_split`` of the band."""
    return _oss_sop(cfg.alpha_split, cfg.R_M, cfg.gamma_M, gains.Mm, gains.Me)


def sop_oss_small(cfg: SystemConfig, gains: LinkGains) -> float:
    """Small-cell SOP with the remaining ``1 - alpha_split`` of the band."""
    return _oss_sop(1.0 - cfg.alpha_split, cfg.R_S, cfg.gamma_S, gains.Ss, gains.Se)


# -- shared kernel -----------------------------------------------------------

@dataclass(frozen=True)
class KernelParams:
    """Parameters of ``Pr[U < e + f V]`` with U, V interference-limited ratios.

    ``a = 1/mean(signal)``, ``b = gamma_int * mean(interferer) / mean(signal)``
    for the legitimate link; ``c``, ``d`` the same for the wiretap link;
    ``e`` the rate offset and ``f = gamma * e + 1``.
    """

    a: float
    b: float
    c: float
    d: float
    e: float
    f: float

    def __post_init__(self):
        if not (self.a > 0 and self.c > 0):
            raise DomainError(f"a and c must be > 0: {self}")
        if not (self.b > 0 and self.d > 0):
            raise DomainError(f"b and d must be > 0: {self}")
        if not self.e >= 0:
            raise DomainError(f"e must be >= 0: {self}")
        if not self.f >= 1:
            raise DomainError(f"f must be >= 1: {self}")
        for v in (self.a, self.b, self.c, self.d, self.e, self.f):
            if not math.isfinite(v):
                raise DomainError(f"kernel parameters must be finite: {self}")

    @property
    def gap(self):
        """``bf - d(be+1)``; zero on the degenerate branch."""
        return self.b * self.f - self.d * (self.b * self.e + 1.0)

    @property
    def g(self):
        b, c, d, e, f = self.b, self.c, self.d, self.e, self.f
        return (b * f * (c + d) - c * d * (b * e + 1.0)) / self.gap ** 2

    @property
    def h(self):
        return (self.b * self.e + 1.0) * (self.a * self.f + self.c) / (self.b * self.f)

    @property
    def i(self):
        return (self.a * self.f + self.c) / self.d

    @property
    def j(self):
        return -self.d / self.gap

    @property
    def k(self):
        a, b, d, e, f = self.a, self.b, self.d, self.e, self.f
        return (a * b * (d * e - f) + (a + b) * d) * f / self.gap ** 2

    @property
    def l(self):  # noqa: E743
        return (self.c - self.a * self.f) / (2.0 * self.d * (self.b * self.e + 1.0))


# Below BRANCH_EPS (relative gap) the degenerate closed form is used as is.
# The general form loses ~eps/delta^2 to cancellation, so inside
# DEGENERATE_WINDOW the value is interpolated in delta from general-form
# evaluations at +-1x and +-2x the window and the degenerate value at 0.
BRANCH_EPS = 1e-9
DEGENERATE_WINDOW = 2e-3
_CLAMP = 1e-9


def _kernel_general(p):
    inner = (-p.g * exp_integral_scaled(-p.h) + p.k * exp_integral_scaled(-p.i) + p.j)
    return 1.0 - math.exp(-p.a * p.e) * inner


def _kernel_degenerate(p):
    inner = p.l + p.d / (2.0 * p.b * p.f) + p.l * p.i * exp_integral_scaled(-p.i)
    return 1.0 - math.exp(-p.a * p.e) * inner


def _kernel_near_degenerate(p, delta):
    # move along d only: gap = b f delta with d = d0 (1 - delta)
    d0 = p.b * p.f / (p.b * p.e + 1.0)
    w = DEGENERATE_WINDOW
    nodes = (-2 * w, -w, 0.0, w, 2 * w)
    values = []
    for t in nodes:
        q = replace(p, d=d0 * (1.0 - t))
        values.append(_kernel_degenerate(q) if t == 0.0 else _kernel_general(q))
    total = 0.0
    for m, (tm, vm) in enumerate(zip(nodes, values)):
        weight = 1.0
        for n, tn in enumerate(nodes):
            if n != m:
                weight *= (delta - tn) / (tm - tn)
        total += weight * vm
    return total


def il_kernel(p: KernelParams) -> float:
    """``Pr[U < e + f V]`` in closed form (general or degenerate branch)."""
    delta = p.gap / (p.b * p.f)
    if abs(delta) <= BRANCH_EPS:
        value = _kernel_degenerate(p)
    elif abs(delta) < DEGENERATE_WINDOW:
        value = _kernel_near_degenerate(p, delta)
    else:
        value = _kernel_general(p)
    if not math.isfinite(value) or value < -_CLAMP or value > 1.0 + _CLAMP:
        raise ConsistencyError(f"kernel returned {value!r} for {p}")
    return min(max(value, 0.0), 1.0)


# -- IL-NOSS -----------------------------------------------------------------

def _require_small_cell_power(cfg):
    if cfg.beta <= 0:
        raise DomainError("non-orthogonal schemes need beta > 0 for this closed form")


def il_macro_params(cfg: SystemConfig, gains: LinkGains) -> KernelParams:
    _require_small_cell_power(cfg)
    offset = (_pow2(cfg.R_M) - 1.0) / cfg.gamma_M
    return KernelParams(
        a=1.0 / gains.Mm,
        b=cfg.gamma_S * gains.Sm / gains.Mm,
        c=1.0 / gains.Me,
        d=cfg.gamma_S * gains.Se / gains.Me,
        e=offset,
        f=cfg.gamma_M * offset + 1.0,
    )


def il_small_params(cfg: SystemConfig, gains: LinkGains) -> KernelParams:
    _require_small_cell_power(cfg)
    offset = (_pow2(cfg.R_S) - 1.0) / cfg.gamma_S
    return KernelParams(
        a=1.0 / gains.Ss,
        b=cfg.gamma_M * gains.Ms / gains.Ss,
        c=1.0 / gains.Se,
        d=cfg.gamma_M * gains.Me / gains.Se,
        e=offset,
        f=cfg.gamma_S * offset + 1.0,
    )


def sop_il_macro(cfg: SystemConfig, gains: LinkGains) -> float:
    return il_kernel(il_macro_params(cfg, gains))


def sop_il_small(cfg: SystemConfig, gains: LinkGains) -> float:
    return il_kernel(il_small_params(cfg, gains))


# -- IC-NOSS -----------------------------------------------------------------

_IC_QUADRATURE = QuadratureSpec(method="adaptive", relative_tolerance=1e-9, max_refinements=1000)


def ic_macro_integrand(x: float, cfg: SystemConfig, gains: LinkGains) -> float:
    """Outage probability of the high-SNR macro event given
    ``|h_Mm|^2 / sigma2_Mm = x``.
    """
    c = _pow2(cfg.R_M)
    bg = cfg.beta * cfg.gamma_M
    k = gains.Mm * gains.Se * bg * x * x
    first = c * gains.Me / (k + gains.Me * c)
    phi = gains.Mm * gains.Se * x / (gains.Sm * gains.Me)
    varphi = (k + gains.Me * c) / (gains.Sm * gains.Me * bg * x)
    if not math.isfinite(varphi):
        return first
    if phi < 1e-280:
        # phi * scaled integral -> exp(-varphi) as phi -> 0
        return first - math.exp(phi - varphi)
    exponent = c / (gains.Sm * bg * x)
    z_max = c / (gains.Mm * bg * x * x)
    if exponent <= 1.0 and gains.Me * z_max <= 4.0 * gains.Se:
        return _ic_macro_integrand_far(exponent, z_max, gains)
    second = phi * inner_inverse_square_integral(-varphi, -phi, shift=varphi)
    return first - second


# Once both the interference budget and the eavesdropper-ratio range are
# small the two terms of the closed form cancel to most of their digits.
# The defining integral over the ratio is then smooth on a short interval
# and a fixed Gauss-Legendre rule resolves it to rounding level.
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


def _ic_macro_integrand_far(exponent, z_max, gains):
    s = 0.5 * (_GL_NODES + 1.0)
    z = z_max * s
    density = gains.Me * gains.Se / (gains.Se + gains.Me * z) ** 2
    # Pr(|h_Sm|^2 below the remaining budget) = 1 - exp(-exponent (1 - s))
    inner = -np.expm1(-exponent * (1.0 - s))
    return float(0.5 * z_max * np.dot(_GL_WEIGHTS, density * inner))


def ic_macro_scales(cfg: SystemConfig, gains: LinkGains):
    """Abscissae where the macro integrand changes shape."""
    c = _pow2(cfg.R_M)
    bg = cfg.beta * cfg.gamma_M
    return (
        c / (gains.Sm * bg),                                   # exponent of order 1
        math.sqrt(c * gains.Me / (gains.Mm * gains.Se * bg)),  # knee of the ratio CDF
        gains.Sm * gains.Me / (gains.Mm * gains.Se),           # phi of order 1
    )


def sop_ic_macro(cfg: SystemConfig, gains: LinkGains,
                 spec: QuadratureSpec | None = None) -> float:
    """High-SNR macro-cell SOP of IC-NOSS as a one-dimensional integral.

    The noise terms of order 1/gamma_M are dropped, so this is only accurate
    once gamma_M is large; compare with the Monte-Carlo estimate of the
    exact event when in doubt.
    """
    check_ic_feasible(cfg, gains)
    _require_small_cell_power(cfg)
    value, _err = integrate_exp_weighted(
        lambda x: ic_macro_integrand(x, cfg, gains), spec or _IC_QUADRATURE,
        scales=ic_macro_scales(cfg, gains))
    return _as_probability(value, "IC macro")


def ic_small_params(x: float, cfg: SystemConfig, gains: LinkGains) -> KernelParams:
    """Kernel parameters of the small-cell event given ``|h_Mm|^2/sigma2_Mm = x``."""
    _require_small_cell_power(cfg)
    offset = (_pow2(cfg.R_S) - 1.0) / cfg.gamma_S
    return KernelParams(
        a=1.0 / (gains.Ss * x),
        b=cfg.gamma_M * gains.Ms / (gains.Ss * x),
        c=1.0 / (gains.Se * x),
        d=cfg.gamma_M * gains.Me / (gains.Se * x),
        e=offset,
        f=cfg.gamma_S * offset + 1.0,
    )


def ic_small_integrand(x: float, cfg: SystemConfig, gains: LinkGains) -> float:
    return il_kernel(ic_small_params(x, cfg, gains))


def ic_small_scales(cfg: SystemConfig, gains: LinkGains):
    offset = (_pow2(cfg.R_S) - 1.0) / cfg.gamma_S
    return (
        offset / gains.Ss,
        cfg.gamma_M * gains.Ms / gains.Ss,
        cfg.gamma_M * gains.Me / gains.Se,
    )


# Above this sigma2_Sm / sigma2_Mm the small-cell closed form's neglect of
# the cancelling signal's power is questionable.
SMALL_INTERFERENCE_RATIO = 0.1


def sop_ic_small(cfg: SystemConfig, gains: LinkGains,
                 spec: QuadratureSpec | None = None) -> float:
    """Small-cell SOP of IC-NOSS assuming weak SBS-to-MU interference.

    The cancelling signal's power is neglected next to gamma_M, which needs
    ``sigma2_Sm`` small; a ``ModelWarning`` is issued when
    ``sigma2_Sm > 0.1 * sigma2_Mm``.
    """
    check_ic_feasible(cfg, gains)
    if gains.Sm > SMALL_INTERFERENCE_RATIO * gains.Mm:
        warnings.warn(
            f"sigma2_Sm/sigma2_Mm = {gains.Sm / gains.Mm:.3g} > {SMALL_INTERFERENCE_RATIO}; "
            "the small-cell IC closed form assumes weak interference", ModelWarning,
            stacklevel=2)
    value, _err = integrate_exp_weighted(
        lambda x: ic_small_integrand(x, cfg, gains), spec or _IC_QUADRATURE,
        scales=ic_small_scales(cfg, gains))
    return _as_probability(value, "IC small")


def _as_probability(value, what):
    if not math.isfinite(value) or value < -_CLAMP or value > 1.0 + _CLAMP:
        raise ConsistencyError(f"{what} integral returned {value!r}")
    return min(max(value, 0.0), 1.0)


# -- dispatch and combination -------------------------------------------------

_ANALYTIC = {
    (Scheme.OSS, Cell.MACRO): sop_oss_macro,
    (Scheme.OSS, Cell.SMALL): sop_oss_small,
    (Scheme.IL, Cell.MACRO): sop_il_macro,
    (Scheme.IL, Cell.SMALL): sop_il_small,
    (Scheme.IC, Cell.MACRO): sop_ic_macro,
    (Scheme.IC, Cell.SMALL): sop_ic_small,
}


def sop(scheme, cell, cfg: SystemConfig, gains: LinkGains) -> float:
    """Closed-form SOP of one cell under one scheme."""
    return _ANALYTIC[Scheme(scheme), Cell(cell)](cfg, gains)


def overall_sop(p_macro: float, p_small: float, combiner=Combiner.PRODUCT) -> float:
    """Combine per-cell SOPs by product or by mean."""
    for p in (p_macro, p_small):
        if not 0.0 <= p <= 1.0:
            raise DomainError(f"probabilities must lie in [0, 1], got {p}")
    if Combiner(combiner) is Combiner.PRODUCT:
        return p_macro * p_small
    return 0.5 * (p_macro + p_small)
