"""Monte-Carlo simulation of the signal model.

Every estimator draws exponential channel powers from counter-based streams
(one stream per chunk), computes the per-draw capacities of the chosen
scheme and counts secrecy outages ``(C_main - C_eve)^+ < R``.  Noise power
is 1, so SNRs equal transmit powers.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .analytic import Cell, Combiner, Scheme, SystemConfig, _pow2, check_ic_feasible
from .channel import LINKS, FadingDraw, LinkGains, RngStream, sample_powers
from .errors import DomainError

DEFAULT_CHUNK = 2 ** 18

_LN2 = math.log(2.0)


@dataclass(frozen=True)
class CapacityTuple:
    """Per-draw capacities in bit/s/Hz (arrays of equal shape)."""

    c_main_macro: np.ndarray
    c_main_small: np.ndarray
    c_eve_macro: np.ndarray
    c_eve_small: np.ndarray

    def secrecy_macro(self):
        return np.maximum(self.c_main_macro - self.c_eve_macro, 0.0)

    def secrecy_small(self):
        return np.maximum(self.c_main_small - self.c_eve_small, 0.0)


@dataclass(frozen=True)
class SopEstimate:
    """Bernoulli proportion with its standard error ``sqrt(p (1 - p) / n)``."""

    p_hat: float
    n: int
    stderr: float

    @classmethod
    def from_count(cls, hits, n):
        p = hits / n
        return cls(p_hat=p, n=n, stderr=math.sqrt(p * (1.0 - p) / n))


@dataclass(frozen=True)
class IcPowerState:
    """Special-signal powers of the cancelling design, N0 = 1.

    ``p_bar_m`` is the average power reserved at the MBS and ``p_m`` the
    instantaneous power for each draw.
    """

    p_bar_m: float
    p_m: np.ndarray

    @property
    def gamma_bar_m(self):
        return self.p_bar_m

    @property
    def gamma_m(self):
        return self.p_m


def _powers(draw):
    if isinstance(draw, FadingDraw):
        return {name: draw.power(name) for name in LINKS}
    return {name: np.asarray(draw[name], dtype=float) for name in LINKS}


def _log2_1p(x):
    return np.log1p(x) / _LN2


def capacities_oss(draw, cfg: SystemConfig, gains: LinkGains) -> CapacityTuple:
    """Capacities when the macro cell owns a fraction ``alpha_split`` of the band."""
    h = _powers(draw)
    a = cfg.alpha_split
    return CapacityTuple(
        c_main_macro=a * _log2_1p(cfg.gamma_M * h["Mm"]),
        c_main_small=(1.0 - a) * _log2_1p(cfg.gamma_S * h["Ss"]),
        c_eve_macro=a * _log2_1p(cfg.gamma_M * h["Me"]),
        c_eve_small=(1.0 - a) * _log2_1p(cfg.gamma_S * h["Se"]),
    )


def capacities_il(draw, cfg: SystemConfig, gains: LinkGains) -> CapacityTuple:
    """Capacities with both cells on the full band, interference as noise."""
    h = _powers(draw)
    gM, gS = cfg.gamma_M, cfg.gamma_S
    return CapacityTuple(
        c_main_macro=_log2_1p(gM * h["Mm"] / (gS * h["Sm"] + 1.0)),
        c_main_small=_log2_1p(gS * h["Ss"] / (gM * h["Ms"] + 1.0)),
        c_eve_macro=_log2_1p(gM * h["Me"] / (gS * h["Se"] + 1.0)),
        c_eve_small=_log2_1p(gS * h["Se"] / (gM * h["Me"] + 1.0)),
    )


def ic_power_state(draw, cfg: SystemConfig, gains: LinkGains) -> IcPowerState:
    check_ic_feasible(cfg, gains)
    h = _powers(draw)
    p_S = cfg.gamma_S
    return IcPowerState(p_bar_m=gains.Sm / gains.Mm * p_S, p_m=h["Sm"] / gains.Mm * p_S)


def capacities_ic(draw, cfg: SystemConfig, gains: LinkGains) -> CapacityTuple:
    """Capacities with the MBS cancelling the SBS signal at the macro user.

    The MBS keeps ``gamma_M - gamma_bar_m`` for its own data.  The SBS
    signal is weighted by ``|h_Mm|^2 / sigma2_Mm`` and the special signal
    reaches the small-cell user and the eavesdropper as interference.
    """
    h = _powers(draw)
    state = ic_power_state(draw, cfg, gains)
    info = cfg.gamma_M - state.gamma_bar_m
    gm = state.gamma_m
    weight = h["Mm"] / gains.Mm
    small_signal = cfg.gamma_S * weight
    return CapacityTuple(
        c_main_macro=_log2_1p(info * h["Mm"]),
        c_main_small=_log2_1p(h["Ss"] * small_signal / (h["Ms"] * (info + gm) + 1.0)),
        c_eve_macro=_log2_1p(h["Me"] * info / (h["Me"] * gm + h["Se"] * small_signal + 1.0)),
        c_eve_small=_log2_1p(h["Se"] * small_signal / (h["Me"] * (info + gm) + 1.0)),
    )


_CAPACITIES = {
    Scheme.OSS: capacities_oss,
    Scheme.IL: capacities_il,
    Scheme.IC: capacities_ic,
}


def capacities(scheme, draw, cfg: SystemConfig, gains: LinkGains) -> CapacityTuple:
    return _CAPACITIES[Scheme(scheme)](draw, cfg, gains)


def ic_cancellation_residual(draw: FadingDraw, cfg: SystemConfig, gains: LinkGains,
                             phase_error: float = 0.0) -> np.ndarray:
    """Magnitude of the SBS interference left at the macro user.

    Builds the special signal and the SBS weight from the complex
    coefficients for a unit probe symbol and returns
    ``|sqrt(P_bar_m) h_Mm x_m + sqrt(P_S) h_Sm w_S x_S|``, which the design
    makes zero.  ``phase_error`` offsets the MBS-MU phase the MBS uses, to
    check that the residual reacts to a mismatched design.
    """
    check_ic_feasible(cfg, gains)
    p_S = cfg.gamma_S
    p_bar_m = gains.Sm / gains.Mm * p_S
    x_S = 1.0
    theta_Mm = draw.phase("Mm") + phase_error
    x_m = -np.abs(draw.Sm) / math.sqrt(gains.Sm) * np.exp(-1j * theta_Mm) * x_S
    w_S = np.abs(draw.Mm) / math.sqrt(gains.Mm) * np.exp(-1j * draw.phase("Sm"))
    residual = math.sqrt(p_bar_m) * draw.Mm * x_m + math.sqrt(p_S) * draw.Sm * w_S * x_S
    return np.abs(residual)


# -- estimators --------------------------------------------------------------

def _exact_ic_macro_outage(h, cfg, gains):
    # product form of the macro IC outage event, noise terms kept
    c = _pow2(cfg.R_M)
    g = cfg.gamma_M
    info = g - gains.Sm / gains.Mm * cfg.gamma_S
    gm = h["Sm"] / gains.Mm * cfg.gamma_S
    left = (1.0 - c) / g + h["Mm"] * info / g
    with np.errstate(divide="ignore"):
        right = (gm / g + h["Se"] * h["Mm"] * cfg.gamma_S / (gains.Mm * h["Me"] * g)
                 + 1.0 / (g * h["Me"]))
    return left * right < c * info / (g * g)


def _chunk_counts(job):
    kind, scheme, cfg, gains, stream, chunk, size = job
    h = sample_powers(gains, stream.generator(chunk), size)
    if kind == "exact_ic_macro":
        hit = _exact_ic_macro_outage(h, cfg, gains)
        count = int(np.count_nonzero(hit))
        return count, 0, 0
    caps = capacities(scheme, h, cfg, gains)
    macro = caps.secrecy_macro() < cfg.R_M
    small = caps.secrecy_small() < cfg.R_S
    return (int(np.count_nonzero(macro)), int(np.count_nonzero(small)),
            int(np.count_nonzero(macro & small)))


def _run_chunks(kind, scheme, cfg, gains, n, rng, chunk_size, workers):
    if n < 1:
        raise DomainError(f"need at least one sample, got n = {n}")
    if chunk_size < 1:
        raise DomainError("chunk_size must be >= 1")
    if not isinstance(rng, RngStream):
        raise DomainError("rng must be an RngStream")
    n_chunks = -(-n // chunk_size)
    jobs = [(kind, scheme, cfg, gains, rng, k, min(chunk_size, n - k * chunk_size))
            for k in range(n_chunks)]
    if workers > 1 and n_chunks > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_chunk_counts, jobs))
    else:
        parts = [_chunk_counts(job) for job in jobs]
    # integer counts: the sum does not depend on the order of the chunks
    return tuple(sum(p[i] for p in parts) for i in range(3))


@dataclass(frozen=True)
class CellEstimates:
    """Macro and small-cell estimates from one set of shared draws."""

    macro: SopEstimate
    small: SopEstimate
    both: int

    def overall(self, combiner=Combiner.PRODUCT):
        """Combined SOP and its delta-method standard error.

        The two cells share draws, so the covariance of the outage
        indicators enters the error.
        """
        n = self.macro.n
        pm, ps = self.macro.p_hat, self.small.p_hat
        vm, vs = self.macro.stderr ** 2, self.small.stderr ** 2
        cov = (self.both / n - pm * ps) / n
        if Combiner(combiner) is Combiner.PRODUCT:
            value = pm * ps
            var = ps * ps * vm + pm * pm * vs + 2.0 * pm * ps * cov
        else:
            value = 0.5 * (pm + ps)
            var = 0.25 * (vm + vs + 2.0 * cov)
        return value, math.sqrt(max(var, 0.0))


def estimate_cells(scheme, cfg: SystemConfig, gains: LinkGains, n: int, rng: RngStream,
                   chunk_size: int = DEFAULT_CHUNK, workers: int = 1) -> CellEstimates:
    """Estimate both cells' SOPs from ``n`` shared draws."""
    scheme = Scheme(scheme)
    if scheme is Scheme.IC:
        check_ic_feasible(cfg, gains)
    macro, small, both = _run_chunks("capacity", scheme, cfg, gains, n, rng, chunk_size, workers)
    return CellEstimates(SopEstimate.from_count(macro, n), SopEstimate.from_count(small, n), both)


def estimate_sop(scheme, cell, cfg: SystemConfig, gains: LinkGains, n: int, rng: RngStream,
                 chunk_size: int = DEFAULT_CHUNK, workers: int = 1) -> SopEstimate:
    """Fraction of ``n`` draws in secrecy outage for one cell.

    Parameters
    ----------
    scheme : Scheme or str
    cell : Cell or str
    n : int
        Number of draws, split into chunks of ``chunk_size``.
    rng : RngStream
        Chunk ``k`` uses ``rng.generator(k)``, so the estimate depends only
        on ``(seed, index, n, chunk_size)`` and not on ``workers``.
    """
    est = estimate_cells(scheme, cfg, gains, n, rng, chunk_size, workers)
    return est.macro if Cell(cell) is Cell.MACRO else est.small


def estimate_sop_exact_ic_macro(cfg: SystemConfig, gains: LinkGains, n: int, rng: RngStream,
                                chunk_size: int = DEFAULT_CHUNK,
                                workers: int = 1) -> SopEstimate:
    """Macro-cell IC outage from the rearranged product-form event.

    The 1/gamma_M noise terms that the high-SNR integral drops are kept,
    so this is exact at any SNR.  The eavesdropper noise term is
    ``1 / (gamma_M |h_Me|^2)``, which makes the event identical draw by draw
    to comparing the capacities.
    """
    check_ic_feasible(cfg, gains)
    hits, _, _ = _run_chunks("exact_ic_macro", Scheme.IC, cfg, gains, n, rng, chunk_size,
                             workers)
    return SopEstimate.from_count(hits, n)
