"""Per-band channel physics: SNR, fading laws, single-hop and route throughput.

All quantities are SI linear units (W, m, Hz, linear power ratios).  dB/dBm/dBi
conversions belong to the config layer, never here.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np
from scipy import special


class Band(Enum):
    THZ = "thz"
    RF = "rf"


# ---------------------------------------------------------------------------
# Small-scale fading models
# ---------------------------------------------------------------------------

class ExponentialFading:
    """Unit-mean exponential power fading (Rayleigh envelope)."""

    def mean(self) -> float:
        return 1.0

    def ccdf(self, m):
        m = np.asarray(m, dtype=float)
        if np.any(m < 0):
            raise ValueError("fading CCDF argument must be >= 0")
        return np.exp(-m)

    def sample(self, rng: np.random.Generator, size=None):
        return rng.exponential(1.0, size=size)

    def __repr__(self):
        return "ExponentialFading()"


class AlphaMuFading:
    """Generalized alpha-mu power fading.

    PDF: f(m) = alpha mu^mu m^(alpha mu/2 - 1) / (2 mbar^(alpha mu/2) Gamma(mu))
                * exp(-mu (m/mbar)^(alpha/2))

    ``mbar`` defaults to the value that makes E[X] = 1, so that the average-SNR
    form of the hop throughput is the exact fading expectation of the SNR.
    With alpha=2 the variable is Gamma(mu, mbar/mu) distributed.
    """

    def __init__(self, alpha: float, mu: float, mbar: float | None = None):
        if alpha <= 0 or mu <= 0:
            raise ValueError("alpha and mu must be positive")
        self.alpha = float(alpha)
        self.mu = float(mu)
        if mbar is None:
            mbar = self.unit_mean_mbar(alpha, mu)
        if mbar <= 0:
            raise ValueError("mbar must be positive")
        self.mbar = float(mbar)

    @staticmethod
    def unit_mean_mbar(alpha: float, mu: float) -> float:
        """mbar solving E[X] = 1 from the Gamma moment formula."""
        return mu ** (2.0 / alpha) * special.gamma(mu) / special.gamma(mu + 2.0 / alpha)

    def mean(self) -> float:
        return (
            self.mbar
            * self.mu ** (-2.0 / self.alpha)
            * special.gamma(self.mu + 2.0 / self.alpha)
            / special.gamma(self.mu)
        )

    def ccdf(self, m):
        """Upper-incomplete-Gamma CCDF: Gamma(mu, mu (m/mbar)^(alpha/2)) / Gamma(mu)."""
        m = np.asarray(m, dtype=float)
        if np.any(m < 0):
            raise ValueError("fading CCDF argument must be >= 0")
        return special.gammaincc(self.mu, self.mu * (m / self.mbar) ** (self.alpha / 2.0))

    def sample(self, rng: np.random.Generator, size=None):
        # g ~ Gamma(mu, scale mbar^(alpha/2)/mu), X = g^(2/alpha)
        g = rng.gamma(self.mu, self.mbar ** (self.alpha / 2.0) / self.mu, size=size)
        return g ** (2.0 / self.alpha)

    def __repr__(self):
        return f"AlphaMuFading(alpha={self.alpha}, mu={self.mu}, mbar={self.mbar:.6g})"


FadingModel = ExponentialFading | AlphaMuFading


def alpha_mu_ccdf(fading: AlphaMuFading, m):
    """Module-level alias for the alpha-mu CCDF."""
    return fading.ccdf(m)


def sample_fading(fading: FadingModel, rng: np.random.Generator, size=None):
    """Draw small-scale fading factors from the given model."""
    return fading.sample(rng, size=size)


# ---------------------------------------------------------------------------
# Band parameters and hop links
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BandParams:
    """Physical constants of one band, all in SI linear units.

    THz uses exponential molecular absorption over squared distance,
    RF uses a power-law path loss exponent (>= 2).
    """

    band: Band
    gain: float                    # linear antenna power gain
    mean_additional_loss: float    # linear ratio (< 1 for a loss)
    noise_power: float             # W
    bandwidth: float               # Hz
    fading: FadingModel
    absorption_coeff: float | None = None   # 1/m, THz only
    pathloss_exponent: float | None = None  # dimensionless, RF only
    carrier_freq: float | None = None       # Hz, metadata

    def __post_init__(self):
        for name in ("gain", "mean_additional_loss", "noise_power", "bandwidth"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.band is Band.THZ:
            if self.absorption_coeff is None or self.absorption_coeff <= 0:
                raise ValueError("THz band requires a positive absorption_coeff")
            if self.pathloss_exponent is not None:
                raise ValueError("THz band must not set pathloss_exponent")
        else:
            if self.pathloss_exponent is None or self.pathloss_exponent < 2:
                raise ValueError("RF band requires pathloss_exponent >= 2")
            if self.absorption_coeff is not None:
                raise ValueError("RF band must not set absorption_coeff")

    def with_absorption(self, absorption_coeff: float) -> "BandParams":
        """Copy of a THz band with a different absorption coefficient."""
        if self.band is not Band.THZ:
            raise ValueError("with_absorption only applies to THz bands")
        return BandParams(
            band=self.band,
            gain=self.gain,
            mean_additional_loss=self.mean_additional_loss,
            noise_power=self.noise_power,
            bandwidth=self.bandwidth,
            fading=self.fading,
            absorption_coeff=absorption_coeff,
            carrier_freq=self.carrier_freq,
        )


@dataclass(frozen=True)
class HopLink:
    """One transmitter-receiver link: distance in m, transmit power in W."""

    distance: float
    power: float

    def __post_init__(self):
        if self.distance <= 0:
            raise ValueError("hop distance must be positive (SNR singular at r=0)")
        if self.power < 0:
            raise ValueError("hop power must be nonnegative")


# ---------------------------------------------------------------------------
# SNR and throughput
# ---------------------------------------------------------------------------

def unit_power_snr(band: BandParams, distance) -> np.ndarray | float:
    """Average SNR per watt of transmit power at the given distance(s)."""
    r = np.asarray(distance, dtype=float)
    if np.any(r <= 0):
        raise ValueError("distance must be positive")
    pre = band.gain * band.mean_additional_loss / band.noise_power
    if band.band is Band.THZ:
        out = pre * np.exp(-band.absorption_coeff * r) / r**2
    else:
        out = pre * r ** (-band.pathloss_exponent)
    return out if out.ndim else float(out)


def avg_snr(band: BandParams, link: HopLink) -> float:
    """Fading-averaged SNR of one hop (expectation over unit-mean fading)."""
    return link.power * unit_power_snr(band, link.distance)


def hop_throughput_avg(band: BandParams, link: HopLink) -> float:
    """Hop throughput at the average SNR: B log2(1 + avg_snr), in bit/s."""
    return band.bandwidth * np.log2(1.0 + avg_snr(band, link))


def hop_throughput_instant(band: BandParams, link: HopLink, fading_draw) -> np.ndarray | float:
    """Instantaneous Shannon throughput with an explicit fading factor."""
    x = np.asarray(fading_draw, dtype=float)
    if np.any(x < 0):
        raise ValueError("fading draw must be >= 0")
    out = band.bandwidth * np.log2(1.0 + avg_snr(band, link) * x)
    return out if out.ndim else float(out)


def total_throughput(hop_rates: Sequence[float]) -> float:
    """Route throughput from per-hop rates: 1 / sum(1/tau_k).

    Store-and-forward relaying sums per-hop buffering latencies, so the route
    rate is the harmonic combination; it is zero if any hop is zero.
    """
    rates = np.asarray(hop_rates, dtype=float)
    if rates.size == 0:
        raise ValueError("route must contain at least one hop")
    if np.any(rates < 0):
        raise ValueError("hop throughputs must be nonnegative")
    if np.any(rates == 0.0):
        return 0.0
    return float(1.0 / np.sum(1.0 / rates))
