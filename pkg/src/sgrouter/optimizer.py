"""Stepwise maximum-throughput optimizer: power allocation, hop count, ideal route.

The three sub-problems are solved in the paper's order: per-hop power for fixed
distances (stationarity conditions in the two SNR asymptotes), uniform relay
spacing, then the hop count from the transcendental equation of the equal-split
objective.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.optimize import brentq

from .channel import BandParams, HopLink, hop_throughput_avg, unit_power_snr

# Hop counts beyond this are treated as the "more hops always help" regime,
# where the node-scarcity cap (not the transcendental root) decides.
MAX_HOP_ROOT = 1_000_000

DEFAULT_EPSILON = 0.01   # adjacent-hop same-relay probability target


class Regime(Enum):
    HIGH_SNR = "high"
    LOW_SNR = "low"


class RegimeViolation(RuntimeError):
    """High-SNR allocation requested where some hop cannot reach SNR >= 1."""


class NoConvergence(RuntimeError):
    """Bisection on the power-allocation constant failed to converge."""


class NoRoot(RuntimeError):
    """Hop-count equation has no root in the searchable bracket."""


@dataclass(frozen=True)
class Scenario:
    """End-to-end problem instance."""

    band: BandParams
    total_distance: float     # m
    total_power: float        # W
    relay_density: float      # 1/m^2

    def __post_init__(self):
        if min(self.total_distance, self.total_power, self.relay_density) <= 0:
            raise ValueError("scenario parameters must be positive")


@dataclass
class RoutePlan:
    """Hop distances plus the power allocated to each hop."""

    hop_distances: np.ndarray
    hop_powers: np.ndarray
    regime: Regime

    def __post_init__(self):
        self.hop_distances = np.asarray(self.hop_distances, dtype=float)
        self.hop_powers = np.asarray(self.hop_powers, dtype=float)
        if self.hop_distances.shape != self.hop_powers.shape:
            raise ValueError("distances and powers must have equal length")

    @property
    def hop_count(self) -> int:
        return self.hop_distances.size


# ---------------------------------------------------------------------------
# Power allocation (fixed distances)
# ---------------------------------------------------------------------------

def allocate_power_low_snr(band: BandParams, distances, total_power: float) -> np.ndarray:
    """Low-SNR optimum: SNR_k * s_k constant, i.e. s_k proportional to a_k^(-1/2)."""
    r = np.asarray(distances, dtype=float)
    if total_power <= 0:
        raise ValueError("total power must be positive")
    a = unit_power_snr(band, r)
    w = a ** -0.5
    return total_power * w / np.sum(w)


def _invert_high_snr(a_k: float, c: float, s_hi: float) -> float:
    """Solve log2(a_k s) * sqrt(s) = c for s >= 1/a_k (monotone there)."""
    if c <= 0.0:
        return 1.0 / a_k
    g = lambda s: np.log2(a_k * s) * np.sqrt(s) - c
    hi = max(s_hi, 2.0 / a_k)
    while g(hi) < 0.0:
        hi *= 2.0
        if hi > 1e30:
            raise NoConvergence("per-hop inversion bracket blew up")
    return brentq(g, 1.0 / a_k, hi, xtol=1e-14, rtol=1e-14)


def allocate_power_high_snr(
    band: BandParams, distances, total_power: float, max_iter: int = 200
) -> np.ndarray:
    """High-SNR optimum: log2(SNR_k) * sqrt(s_k) constant across hops.

    Bisects the shared constant; each evaluation inverts the per-hop monotone
    map.  Requires that every hop can sit at average SNR >= 1 within the power
    budget, otherwise the high-SNR stationarity condition is meaningless.
    """
    r = np.asarray(distances, dtype=float)
    if total_power <= 0:
        raise ValueError("total power must be positive")
    a = unit_power_snr(band, r)
    if np.sum(1.0 / a) > total_power:
        raise RegimeViolation(
            "power budget cannot hold every hop at average SNR >= 1"
        )

    def total_for(c: float) -> np.ndarray:
        return np.array([_invert_high_snr(ak, c, total_power) for ak in a])

    c_lo, c_hi = 0.0, np.log2(np.max(a) * total_power) * np.sqrt(total_power)
    if np.sum(total_for(c_hi)) < total_power:
        raise NoConvergence("upper bracket does not exhaust the power budget")
    s = None
    for _ in range(max_iter):
        c_mid = 0.5 * (c_lo + c_hi)
        s = total_for(c_mid)
        tot = np.sum(s)
        if abs(tot - total_power) <= 1e-9 * total_power:
            break
        if tot > total_power:
            c_hi = c_mid
        else:
            c_lo = c_mid
    else:
        raise NoConvergence("power bisection did not reach tolerance")
    # exact budget: the residual is far below tolerance; rescale to close it
    s *= total_power / np.sum(s)
    if np.any(a * s < 1.0 - 1e-9):
        raise RegimeViolation("solution left a hop below average SNR 1")
    return s


def allocation_regime(band: BandParams, distances, total_power: float) -> Regime:
    """High-SNR iff the equal power split holds every hop at average SNR >= 1."""
    r = np.asarray(distances, dtype=float)
    s_equal = total_power / r.size
    return (
        Regime.HIGH_SNR
        if np.all(unit_power_snr(band, r) * s_equal >= 1.0)
        else Regime.LOW_SNR
    )


def allocate_power(band: BandParams, distances, total_power: float) -> tuple[np.ndarray, Regime]:
    """Regime-dispatched optimal allocation for the given hop distances."""
    regime = allocation_regime(band, distances, total_power)
    if regime is Regime.HIGH_SNR:
        return allocate_power_high_snr(band, distances, total_power), regime
    return allocate_power_low_snr(band, distances, total_power), regime


# ---------------------------------------------------------------------------
# Hop-count design
# ---------------------------------------------------------------------------

def equal_split_throughput(scenario: Scenario, hops: int | np.ndarray):
    """Equal-split route objective: hop_throughput(R/K, S/K) / K."""
    K = np.asarray(hops, dtype=float)
    r = scenario.total_distance / K
    s = scenario.total_power / K
    a = unit_power_snr(scenario.band, r)
    out = scenario.band.bandwidth * np.log2(1.0 + a * s) / K
    return out if out.ndim else float(out)


def hop_count_root(scenario: Scenario) -> float:
    """Continuous root of the high-SNR hop-count equation.

    THz: 2 R beta / K - ln(S G eta / (sigma^2 R^2)) + 1 = ln K, unique root by
    monotonicity, found by bisection.  RF: closed form from the power-law.
    Returns +inf when the root exceeds MAX_HOP_ROOT (throughput keeps growing
    with hops at any sane count; the caller falls back to the density cap).
    """
    band, R, S = scenario.band, scenario.total_distance, scenario.total_power
    lnc = np.log(
        S * band.gain * band.mean_additional_loss / (band.noise_power * R**2)
        if band.absorption_coeff is not None
        else S * band.gain * band.mean_additional_loss / band.noise_power
    )
    if band.absorption_coeff is not None:
        g = lambda K: 2.0 * R * band.absorption_coeff / K + 1.0 - lnc - np.log(K)
        if g(1.0) <= 0.0:
            # root below one hop; the objective peaks at the single-hop clamp
            lo = 1e-9
            if g(lo) <= 0.0:
                raise NoRoot("hop-count equation has no positive root")
            return brentq(g, lo, 1.0, xtol=1e-12)
        if g(MAX_HOP_ROOT) > 0.0:
            return np.inf
        return brentq(g, 1.0, MAX_HOP_ROOT, xtol=1e-9)
    beta = band.pathloss_exponent
    c = np.exp(1.0 - beta + lnc)
    root = (c * R**-beta) ** (1.0 / (1.0 - beta))
    return np.inf if root > MAX_HOP_ROOT else root


def hop_cap_bound(relay_density: float, total_distance: float, epsilon: float) -> float:
    """Raw Eq.-style cap sqrt(lambda pi R^2 / (4 ln(1/eps))) before flooring."""
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie in (0, 1)")
    if relay_density <= 0 or total_distance <= 0:
        raise ValueError("density and distance must be positive")
    return np.sqrt(
        relay_density * np.pi * total_distance**2 / (4.0 * np.log(1.0 / epsilon))
    )


def hop_cap(relay_density: float, total_distance: float, epsilon: float = DEFAULT_EPSILON) -> int:
    """Largest hop count keeping adjacent same-relay probability within epsilon."""
    bound = hop_cap_bound(relay_density, total_distance, epsilon)
    k = int(np.ceil(bound)) - 1          # largest integer strictly below
    return max(k, 1)


def optimal_hop_count(scenario: Scenario, epsilon: float = DEFAULT_EPSILON) -> int:
    """Optimal hop count for the equal-split route.

    High-SNR branch: the exact objective exceeds its high-SNR approximation by
    a margin that shrinks with K, so the integer argmax lies at or below the
    transcendental root; comparing the objective over [1, ceil(root)] is exact
    and reduces to the floor/ceil comparison wherever the approximation is
    tight.  When the root runs away (low-SNR regime, "more hops always help"),
    return the same-relay cap instead.
    """
    root = hop_count_root(scenario)
    if not np.isfinite(root):
        return hop_cap(scenario.relay_density, scenario.total_distance, epsilon)
    hi = max(1, int(np.ceil(root)))
    ks = np.arange(1, hi + 1)
    return int(ks[np.argmax(equal_split_throughput(scenario, ks))])


def stepwise_hop_count(scenario: Scenario, epsilon: float = DEFAULT_EPSILON) -> int:
    """Hop count actually routable on a random field: optimum clamped by the cap."""
    return min(
        optimal_hop_count(scenario, epsilon),
        hop_cap(scenario.relay_density, scenario.total_distance, epsilon),
    )


def ideal_route(scenario: Scenario) -> tuple[RoutePlan, float]:
    """Theorem-level optimum with relays exactly on the source-target segment.

    Node scarcity is ignored (no cap): this is the unreachable upper bound the
    realizable strategies are measured against.
    """
    K = optimal_hop_count(scenario)
    r = np.full(K, scenario.total_distance / K)
    s = np.full(K, scenario.total_power / K)
    regime = allocation_regime(scenario.band, r, scenario.total_power)
    bound = float(equal_split_throughput(scenario, K))
    return RoutePlan(r, s, regime), bound
