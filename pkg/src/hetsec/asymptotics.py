"""High-SNR behaviour: diversity slopes, the IL macro floor and the IC macro
bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .analytic import (
    Combiner,
    Scheme,
    SystemConfig,
    _pow2,
    check_ic_feasible,
    db_to_linear,
    overall_sop,
    sop,
)
from .channel import LinkGains, RngStream
from .errors import DomainError, EvaluationError

def _log_ratio_weight(r):
    """``(r - 1 - ln r) / (r - 1)^2``, equal to 1/2 at r = 1."""
    t = r - 1.0
    if abs(t) < 0.1:
        return sum((-t) ** (k - 2) / k for k in range(2, 20))
    return (t - math.log(r)) / (t * t)


def il_macro_floor(gains: LinkGains, R: float, beta: float) -> float:
    """Limit of the IL macro-cell SOP as gamma_M grows with gamma_S = beta gamma_M.

    With X = |h_Mm|^2/|h_Sm|^2 and Y = |h_Me|^2/|h_Se|^2 the outage event
    tends to ``X < 2^R Y + beta (2^R - 1)``.  The second term is the rate
    offset ``(2^R - 1)/gamma_M`` measured against the interference power
    ``gamma_S |h_Sm|^2``; both scale as 1/gamma_M, so it survives the limit.
    ``beta = 0`` gives the noise-free ratio comparison ``X < 2^R Y``.

    Both ratios have rational CDFs, so the probability is elementary::

        P = (sigma2_Sm o + sigma2_Mm r w(r)) / a,   w(r) = (r - 1 - ln r) / (r - 1)^2

    with ``o = beta (2^R - 1)``, ``a = sigma2_Mm + sigma2_Sm o`` and
    ``r = 2^R sigma2_Sm sigma2_Me / (sigma2_Se a)``.
    """
    if not R > 0:
        raise DomainError(f"R must be > 0, got {R}")
    if not beta >= 0:
        raise DomainError(f"beta must be >= 0, got {beta}")
    c = _pow2(R)
    if math.isinf(c):
        return 1.0
    offset = beta * (c - 1.0)
    a = gains.Mm + gains.Sm * offset
    r = c * gains.Sm * gains.Me / (gains.Se * a)
    if math.isinf(r) or math.isinf(a):
        return 1.0
    value = (gains.Sm * offset + gains.Mm * r * _log_ratio_weight(r)) / a
    return min(max(value, 0.0), 1.0)


def ic_macro_bounds(cfg: SystemConfig, gains: LinkGains) -> tuple[float, float]:
    """Lower and upper high-SNR bounds on the IC macro-cell SOP.

    ``lower = 2^R ln(gamma_M) / (8 sigma2_Sm beta gamma_M)`` and
    ``upper = 4 * lower``.
    """
    if not cfg.gamma_M > 1.0:
        raise DomainError(f"bounds need gamma_M > 1 (ln gamma_M > 0), got {cfg.gamma_M}")
    if not cfg.beta > 0:
        raise DomainError("bounds need beta > 0")
    check_ic_feasible(cfg, gains)
    lower = _pow2(cfg.R_M) * math.log(cfg.gamma_M) / (8.0 * gains.Sm * cfg.beta * cfg.gamma_M)
    return lower, 4.0 * lower


@dataclass
class DiversityReport:
    """Log-log slopes of an SOP curve.

    Attributes
    ----------
    scheme : Scheme
    gamma_grid_dB : list of float
    probabilities : list of float
    slopes : list of float
        ``-d log10 P / d log10 gamma_M`` for each adjacent pair of points.
    extrapolated : float
        The last pairwise slope.
    """

    scheme: Scheme
    gamma_grid_dB: list
    probabilities: list
    slopes: list = field(default_factory=list)

    @property
    def extrapolated(self):
        return self.slopes[-1]


def _overall_value(scheme, cfg, gains, combiner, method, n, seed, index):
    if method == "analytic":
        return overall_sop(sop(scheme, "macro", cfg, gains), sop(scheme, "small", cfg, gains),
                           combiner)
    from .montecarlo import estimate_cells
    est = estimate_cells(scheme, cfg, gains, n, RngStream(seed, index))
    return est.overall(combiner)[0]


def diversity_slope(scheme, cfg_template: SystemConfig, gains: LinkGains,
                    gamma_grid_dB: Sequence[float], method: str = "analytic",
                    combiner=Combiner.PRODUCT, n: int = 10**6,
                    seed: int = 0) -> DiversityReport:
    """Estimate the secrecy diversity of the overall SOP along an SNR grid.

    ``beta``, the spectrum split and the rates are taken from
    ``cfg_template``; only gamma_M changes.  ``method="mc"`` is available
    for moderate SNRs but cannot resolve the tiny probabilities of the
    high-SNR regime at practical sample counts.

    Raises
    ------
    DomainError
        If the grid has fewer than 3 points or is not strictly increasing.
    EvaluationError
        If the SOP is zero (or not finite) at a grid point; the offending
        SNR in dB is stored on ``abscissa``.
    """
    scheme = Scheme(scheme)
    grid = [float(v) for v in gamma_grid_dB]
    if len(grid) < 3:
        raise DomainError("the slope grid needs at least 3 points")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise DomainError("the slope grid must be strictly increasing")
    if method not in ("analytic", "mc"):
        raise DomainError(f"unknown method {method!r}")
    probs = []
    for i, db in enumerate(grid):
        cfg = cfg_template.with_(gamma_M=db_to_linear(db))
        p = _overall_value(scheme, cfg, gains, combiner, method, n, seed, i)
        if not (p > 0 and math.isfinite(p)):
            raise EvaluationError(f"SOP is {p} at {db} dB; slope undefined", abscissa=db)
        probs.append(p)
    slopes = [
        -(math.log10(p1) - math.log10(p0)) / ((d1 - d0) / 10.0)
        for (d0, p0), (d1, p1) in zip(zip(grid, probs), zip(grid[1:], probs[1:]))
    ]
    return DiversityReport(scheme, grid, probs, slopes)
