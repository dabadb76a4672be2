"""Analytical throughput and coverage of the stepwise-suboptimal route.

Per-hop throughput is the fading-and-distance expectation of the Shannon rate,
computed as a CCDF integral in the rate domain nested over the hop distance
law (Type-I for the two edge hops, Type-II for middle hops).  Route throughput
combines the two hop classes harmonically; route coverage is the product of
per-hop coverage integrals under the hop-independence approximation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import special

from .channel import BandParams, unit_power_snr
from .geometry import DistanceKind, DistancePdf
from .optimizer import Scenario, stepwise_hop_count


class QuadratureFailure(RuntimeError):
    """Adaptive refinement could not reach the requested tolerance."""


class HopKind(Enum):
    EDGE = "edge"       # first/last hop, Type-I distance
    MIDDLE = "middle"   # interior hop, Type-II distance


@dataclass
class AnalysisConfig:
    """Inputs of the analytical evaluation.

    ``hop_count`` defaults to the stepwise (cap-clamped) optimum for the
    scenario; truncation radii default to the distance-law tail bounds.
    """

    scenario: Scenario
    hop_count: int | None = None
    snr_threshold: float = 1.0          # linear gamma
    quad_rel_tol: float = 1e-4
    coverage_rel_tol: float = 1e-5
    rho_upper: float | None = None
    fading_tail: float = 1e-12          # CCDF level defining the rate-domain cutoff

    def __post_init__(self):
        if self.hop_count is None:
            self.hop_count = stepwise_hop_count(self.scenario)
        if self.hop_count < 1:
            raise ValueError("hop_count must be >= 1")
        if not 0.0 < self.quad_rel_tol < 1.0 or not 0.0 < self.coverage_rel_tol < 1.0:
            raise ValueError("tolerances must lie in (0, 1)")
        if self.snr_threshold < 0:
            raise ValueError("snr_threshold must be >= 0")

    @property
    def hop_spacing(self) -> float:
        return self.scenario.total_distance / self.hop_count

    @property
    def hop_power(self) -> float:
        return self.scenario.total_power / self.hop_count

    def distance_law(self, kind: HopKind) -> DistancePdf:
        dk = DistanceKind.TYPE_I if kind is HopKind.EDGE else DistanceKind.TYPE_II
        return DistancePdf(dk, self.hop_spacing, self.scenario.relay_density)


def _fading_cutoff(band: BandParams, tail: float) -> float:
    """Fading value whose CCDF falls below ``tail``."""
    fad = band.fading
    if hasattr(fad, "mu"):
        z = special.gammainccinv(fad.mu, tail)
        return float(fad.mbar * (z / fad.mu) ** (2.0 / fad.alpha))
    return float(-np.log(tail))


def expected_instant_throughput(band: BandParams, avg_snr: float, rel_tol: float = 1e-7,
                                fading_tail: float = 1e-12) -> float:
    """Fading expectation of the instantaneous rate at a given average SNR.

    E[B log2(1 + a X)] = (B/ln 2) Int_0^umax CCDF_X((e^u - 1)/a) du; the
    substitution places the nodes logarithmically in the SNR domain so the
    integrand decays like the fading tail and never overflows.
    """
    out = _expected_log1p(band, np.asarray([avg_snr]), rel_tol, fading_tail)
    return float(band.bandwidth * out[0] / np.log(2.0))


def _expected_log1p(band: BandParams, a: np.ndarray, rel_tol: float, fading_tail: float,
                    n0: int = 64, n_max: int = 4096) -> np.ndarray:
    """Vectorized E[ln(1 + a X)] over an array of average SNRs."""
    a = np.asarray(a, dtype=float)
    xmax = _fading_cutoff(band, fading_tail)
    umax = np.log1p(a * xmax)
    prev = None
    n = n0
    while n <= n_max:
        x, w = leggauss(n)
        u = 0.5 * umax[:, None] * (x + 1.0)
        wu = 0.5 * umax[:, None] * w
        ccdf = band.fading.ccdf(np.expm1(u) / a[:, None])
        val = np.sum(ccdf * wu, axis=1)
        if prev is not None:
            err = np.max(np.abs(val - prev) / np.maximum(np.abs(val), 1e-300))
            if err < rel_tol:
                return val
        prev = val
        n *= 2
    raise QuadratureFailure("rate-domain integral did not converge")


def _distance_expectation(cfg: AnalysisConfig, kind: HopKind, hop_fn, rel_tol: float) -> float:
    """E_rho[hop_fn(rho)] under the hop's distance law, by nested refinement."""
    law = cfg.distance_law(kind)
    hi = cfg.rho_upper if cfg.rho_upper is not None else law.support_upper()
    lo = hi * 1e-9
    prev = None
    n = 128
    while n <= 8192:
        x, w = leggauss(n)
        rho = 0.5 * (hi - lo) * (x + 1.0) + lo
        wr = 0.5 * (hi - lo) * w
        dens = np.asarray(law.pdf(rho))
        val = float(np.sum(dens * hop_fn(rho) * wr))
        if prev is not None and abs(val - prev) <= rel_tol * max(abs(val), 1e-300):
            return val
        prev = val
        n *= 2
    raise QuadratureFailure("distance expectation did not converge")


def analytic_hop_throughput(cfg: AnalysisConfig, kind: HopKind) -> float:
    """Expected hop throughput (bit/s) for an edge or middle hop."""
    band = cfg.scenario.band
    s = cfg.hop_power
    if cfg.hop_count == 1:
        # direct source-target link, fixed length, no relay law
        a = s * unit_power_snr(band, cfg.scenario.total_distance)
        return expected_instant_throughput(band, a, cfg.quad_rel_tol * 1e-2, cfg.fading_tail)
    if kind is HopKind.MIDDLE and cfg.hop_count == 2:
        raise ValueError("a 2-hop route has no middle hop")

    def hop_fn(rho):
        a = s * unit_power_snr(band, rho)
        return _expected_log1p(band, a, cfg.quad_rel_tol * 1e-2, cfg.fading_tail)

    val = _distance_expectation(cfg, kind, hop_fn, cfg.quad_rel_tol)
    return band.bandwidth * val / np.log(2.0)


def combine_route_throughput(tau_edge: float, tau_middle: float | None, hop_count: int) -> float:
    """Harmonic combination: two edge hops, hop_count-2 middle hops."""
    if hop_count == 1:
        return tau_edge
    if hop_count == 2:
        return tau_edge / 2.0
    if tau_middle is None:
        raise ValueError("middle-hop throughput required for hop_count >= 3")
    return tau_edge * tau_middle / (2.0 * tau_middle + (hop_count - 2) * tau_edge)


def analytic_total_throughput(cfg: AnalysisConfig) -> float:
    """Route throughput of the stepwise-suboptimal strategy (bit/s)."""
    tau_e = analytic_hop_throughput(cfg, HopKind.EDGE)
    tau_m = analytic_hop_throughput(cfg, HopKind.MIDDLE) if cfg.hop_count >= 3 else None
    return combine_route_throughput(tau_e, tau_m, cfg.hop_count)


def _hop_coverage(cfg: AnalysisConfig, kind: HopKind) -> float:
    """Per-hop coverage: E_rho[CCDF_X(gamma / avg_snr(rho))]."""
    band = cfg.scenario.band
    s, gamma = cfg.hop_power, cfg.snr_threshold
    if gamma == 0.0:
        return 1.0
    if cfg.hop_count == 1:
        a = s * unit_power_snr(band, cfg.scenario.total_distance)
        return float(band.fading.ccdf(gamma / a))

    def hop_fn(rho):
        return band.fading.ccdf(gamma / (s * unit_power_snr(band, rho)))

    return _distance_expectation(cfg, kind, hop_fn, cfg.coverage_rel_tol)


def analytic_coverage(cfg: AnalysisConfig) -> float:
    """Route coverage probability (hops treated as independent).

    (edge integral)^2 * (middle integral)^(K-2); for the direct link, the
    single-hop CCDF.
    """
    if cfg.hop_count == 1:
        return min(1.0, max(0.0, _hop_coverage(cfg, HopKind.EDGE)))
    p_edge = _hop_coverage(cfg, HopKind.EDGE)
    p = p_edge**2
    if cfg.hop_count > 2:
        p *= _hop_coverage(cfg, HopKind.MIDDLE) ** (cfg.hop_count - 2)
    return min(1.0, max(0.0, float(p)))


def fairness_threshold(band_a: BandParams, band_b: BandParams, gamma_a: float) -> float:
    """Map an SNR threshold across bands at equal rate: gamma_b = gamma_a Ba/Bb."""
    return gamma_a * band_a.bandwidth / band_b.bandwidth
