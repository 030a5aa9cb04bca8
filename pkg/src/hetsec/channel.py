"""Link gains, Rayleigh fading draws and the ratio distributions used by the
closed forms.

Links are named by transmitter and receiver: ``Mm`` is MBS to macro user,
``Ms`` MBS to small-cell user, ``Ss`` SBS to small-cell user, ``Sm`` SBS to
macro user, ``Me``/``Se`` MBS/SBS to the eavesdropper.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np

from .errors import DomainError

LINKS = ("Mm", "Ms", "Ss", "Sm", "Me", "Se")


@dataclass(frozen=True)
class LinkGains:
    """Average power gains E|h|^2 of the six links (linear)."""

    Mm: float
    Ms: float
    Ss: float
    Sm: float
    Me: float
    Se: float

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not (math.isfinite(v) and v > 0):
                raise DomainError(f"gain sigma2_{f.name} must be positive and finite, got {v}")

    def as_dict(self):
        return {name: getattr(self, name) for name in LINKS}

    def replace(self, **changes):
        return LinkGains(**{**self.as_dict(), **changes})


@dataclass(frozen=True)
class Link:
    distance: float
    path_loss_exponent: float
    fading_variance: float = 1.0

    def __post_init__(self):
        if not self.distance > 0:
            raise DomainError(f"distance must be > 0, got {self.distance}")
        if not self.path_loss_exponent >= 0:
            raise DomainError(f"path-loss exponent must be >= 0, got {self.path_loss_exponent}")
        if not self.fading_variance > 0:
            raise DomainError(f"fading variance must be > 0, got {self.fading_variance}")

    @property
    def gain(self):
        return link_gain(self.distance, self.path_loss_exponent, self.fading_variance)


@dataclass(frozen=True)
class LinkGeometry:
    """Per-link distance, path-loss exponent and small-scale variance."""

    Mm: Link
    Ms: Link
    Ss: Link
    Sm: Link
    Me: Link
    Se: Link

    def gains(self) -> LinkGains:
        return LinkGains(**{name: getattr(self, name).gain for name in LINKS})

    @classmethod
    def default(cls):
        """300 m everywhere except the 30 m small cell; exponent 2.5 on
        direct and eavesdropper links, 3 on the cross links; unit variance."""
        return cls(
            Mm=Link(300.0, 2.5), Ms=Link(300.0, 3.0), Ss=Link(30.0, 2.5),
            Sm=Link(300.0, 3.0), Me=Link(300.0, 2.5), Se=Link(300.0, 2.5),
        )


def link_gain(d: float, alpha_pl: float, delta2: float = 1.0) -> float:
    """Average gain ``d**-alpha_pl * delta2`` of a link."""
    if not d > 0:
        raise DomainError(f"distance must be > 0, got {d}")
    if not delta2 > 0:
        raise DomainError(f"small-scale variance must be > 0, got {delta2}")
    return d ** (-alpha_pl) * delta2


def default_gains() -> LinkGains:
    return LinkGeometry.default().gains()


# Gain set of the macro-cell bound comparison; the small-cell links are not
# used there and are set to unity.
FIG2_GAINS = LinkGains(Mm=1.0, Ms=1.0, Ss=1.0, Sm=0.2, Me=1.0, Se=1.0)


# -- random streams ----------------------------------------------------------

@dataclass(frozen=True)
class RngStream:
    """Counter-based random stream identified by ``(seed, index)``.

    Each ``(seed, index, chunk)`` triple maps to its own Philox key, so chunks
    can be generated in any order or on any worker and still reproduce the
    serial sequence.
    """

    seed: int
    index: int = 0

    def generator(self, chunk: int = 0) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.index, chunk))
        return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True)
class FadingDraw:
    """Complex channel coefficients for a batch of independent realizations.

    Every attribute is an array of the same shape (one entry per draw).
    """

    Mm: np.ndarray
    Ms: np.ndarray
    Ss: np.ndarray
    Sm: np.ndarray
    Me: np.ndarray
    Se: np.ndarray

    def __len__(self):
        return np.size(self.Mm)

    def power(self, link: str) -> np.ndarray:
        h = getattr(self, link)
        return h.real ** 2 + h.imag ** 2

    def phase(self, link: str) -> np.ndarray:
        return np.angle(getattr(self, link))

    @classmethod
    def from_powers(cls, phases=None, **powers):
        """Build a draw from |h|^2 values (and optional phases)."""
        phases = phases or {}
        coeffs = {}
        for name in LINKS:
            p = np.asarray(powers[name], dtype=float)
            theta = np.asarray(phases.get(name, 0.0), dtype=float)
            coeffs[name] = np.sqrt(p) * np.exp(1j * theta)
        return cls(**coeffs)


def sample_fading(gains: LinkGains, rng: RngStream | np.random.Generator, n: int = 1,
                  chunk: int = 0) -> FadingDraw:
    """Draw ``n`` independent Rayleigh realizations of all six links.

    ``|h|^2`` is exponential with the link's mean gain and the phase is
    uniform on [0, 2*pi).  The draw order is fixed (all powers, then all
    phases, links in ``LINKS`` order) so a given stream always yields the
    same coefficients.
    """
    gen = rng.generator(chunk) if isinstance(rng, RngStream) else rng
    powers = gen.standard_exponential((len(LINKS), n))
    phases = gen.random((len(LINKS), n)) * (2 * np.pi)
    coeffs = {}
    for k, name in enumerate(LINKS):
        mag = np.sqrt(powers[k] * getattr(gains, name))
        coeffs[name] = mag * np.exp(1j * phases[k])
    return FadingDraw(**coeffs)


def sample_powers(gains: LinkGains, gen: np.random.Generator, n: int) -> dict:
    """``|h|^2`` only, for estimators that never need phases."""
    powers = gen.standard_exponential((len(LINKS), n))
    return {name: powers[k] * getattr(gains, name) for k, name in enumerate(LINKS)}


# -- analytic distributions --------------------------------------------------

def cdf_interference_ratio(u, sigma2_num, sigma2_den, gamma):
    """CDF of ``|h_num|^2 / (gamma |h_den|^2 + 1)`` for exponential powers."""
    u = np.asarray(u, dtype=float)
    if np.any(u < 0):
        raise DomainError("u must be >= 0")
    out = 1.0 - sigma2_num / (gamma * sigma2_den * u + sigma2_num) * np.exp(-u / sigma2_num)
    return out if out.ndim else float(out)


def pdf_interference_ratio(v, sigma2_num, sigma2_den, gamma):
    """Density of ``|h_num|^2 / (gamma |h_den|^2 + 1)``."""
    v = np.asarray(v, dtype=float)
    den = gamma * sigma2_den * v + sigma2_num
    out = (gamma * sigma2_num * sigma2_den / den ** 2 + 1.0 / den) * np.exp(-v / sigma2_num)
    return out if out.ndim else float(out)


def cdf_plain_ratio(z, sigma2_num, sigma2_den):
    """CDF of ``|h_num|^2 / |h_den|^2``.

    For the eavesdropper ratio ``|h_Se|^2 / |h_Me|^2`` this is
    ``sigma2_Me z / (sigma2_Se + sigma2_Me z)``.
    """
    z = np.asarray(z, dtype=float)
    if np.any(z < 0):
        raise DomainError("z must be >= 0")
    out = sigma2_den * z / (sigma2_num + sigma2_den * z)
    return out if out.ndim else float(out)


def pdf_plain_ratio(z, sigma2_num, sigma2_den):
    z = np.asarray(z, dtype=float)
    out = sigma2_num * sigma2_den / (sigma2_num + sigma2_den * z) ** 2
    return out if out.ndim else float(out)
