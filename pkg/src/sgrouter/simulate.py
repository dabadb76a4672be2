"""Monte Carlo engine: realize relay fields, route, measure throughput/coverage.

Strategies: the ideal plan (relays exactly at the optimal positions), the two
stepwise strategies (nearest real node to each ideal position, with optimal or
equal power), and the long-hop / short-hop greedy baselines.

Randomness contract: trial i of a run seeded with ``seed`` draws only from
``np.random.default_rng([seed, i])``, so results are reproducible bit-for-bit
regardless of chunking or worker count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channel import BandParams, HopLink, hop_throughput_avg, total_throughput, unit_power_snr
from .geometry import PointField, Window, sample_ppp, sim_window
from .optimizer import (
    DEFAULT_EPSILON,
    Regime,
    RoutePlan,
    Scenario,
    allocate_power,
    ideal_route,
    stepwise_hop_count,
)


class RouteFailure(RuntimeError):
    """The strategy could not reach the target on this field."""


# ---------------------------------------------------------------------------
# Strategy kinds
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Ideal:
    pass


@dataclass(frozen=True)
class StepwiseOptimal:
    epsilon: float = DEFAULT_EPSILON


@dataclass(frozen=True)
class StepwiseSuboptimal:
    epsilon: float = DEFAULT_EPSILON


@dataclass(frozen=True)
class LongHop:
    radius: float

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("long-hop radius must be positive")


@dataclass(frozen=True)
class ShortHop:
    max_angle: float = np.pi / 4

    def __post_init__(self):
        if not 0.0 < self.max_angle < np.pi:
            raise ValueError("short-hop angle must lie in (0, pi)")


StrategyKind = Ideal | StepwiseOptimal | StepwiseSuboptimal | LongHop | ShortHop


def default_long_hop(band: BandParams) -> LongHop:
    """Baseline search radius: 40 m for THz, 400 m for RF."""
    return LongHop(40.0 if band.absorption_coeff is not None else 400.0)


@dataclass(frozen=True)
class TrialResult:
    strategy: StrategyKind
    hop_count: int
    throughput: float
    covered: bool
    failed: bool


@dataclass(frozen=True)
class McSummary:
    trials: int
    mean_throughput: float
    throughput_ci95: float
    coverage_rate: float
    failure_rate: float


# ---------------------------------------------------------------------------
# Route planning
# ---------------------------------------------------------------------------

def ideal_positions(scenario: Scenario, hop_count: int) -> np.ndarray:
    """Planned relay positions, uniformly spaced on the source-target segment."""
    spacing = scenario.total_distance / hop_count
    xs = spacing * np.arange(1, hop_count)
    return np.column_stack([xs, np.zeros_like(xs)])


def _stepwise_nodes(scenario: Scenario, field: PointField, epsilon: float) -> tuple[np.ndarray, int, int]:
    """Waypoints (source, relays, target) for the stepwise strategies.

    The nearest field node to each ideal position becomes a relay; a node
    selected by two adjacent positions collapses to a single waypoint (the
    hop-cap criterion keeps such events rare).  Returns the waypoints, the
    planned hop count, and the number of adjacent same-relay merges.
    """
    k_hat = stepwise_hop_count(scenario, epsilon)
    src = np.array([0.0, 0.0])
    tgt = np.array([scenario.total_distance, 0.0])
    if k_hat == 1:
        return np.vstack([src, tgt]), 1, 0
    if len(field) == 0:
        raise RouteFailure("no relay nodes available")
    pos = ideal_positions(scenario, k_hat)
    d2 = np.sum((field.points[None, :, :] - pos[:, None, :]) ** 2, axis=2)
    idx = np.argmin(d2, axis=1)
    keep = np.concatenate([[True], idx[1:] != idx[:-1]])
    merges = int(np.sum(~keep))
    relays = field.points[idx[keep]]
    return np.vstack([src, relays, tgt]), k_hat, merges


def _hops_from_nodes(nodes: np.ndarray) -> np.ndarray:
    return np.sqrt(np.sum(np.diff(nodes, axis=0) ** 2, axis=1))


def _plan_long_hop(strategy: LongHop, scenario: Scenario, field: PointField) -> np.ndarray:
    """Greedy: within the radius, hop to the node closest to the target."""
    tgt = np.array([scenario.total_distance, 0.0])
    cur = np.array([0.0, 0.0])
    nodes = [cur]
    pts = field.points
    for _ in range(len(field) + 1):
        to_tgt = np.linalg.norm(tgt - cur)
        if to_tgt <= strategy.radius:
            nodes.append(tgt)
            return _hops_from_nodes(np.asarray(nodes))
        if len(field) == 0:
            break
        d_cur = np.linalg.norm(pts - cur, axis=1)
        in_range = (d_cur <= strategy.radius) & (d_cur > 1e-12)
        if not np.any(in_range):
            break
        d_tgt = np.linalg.norm(pts - tgt, axis=1)
        d_tgt[~in_range] = np.inf
        best = int(np.argmin(d_tgt))
        if d_tgt[best] >= to_tgt:
            break  # no progressing node in range
        cur = pts[best]
        nodes.append(cur)
    raise RouteFailure("long-hop routing found no progressing relay")


def _plan_short_hop(strategy: ShortHop, scenario: Scenario, field: PointField) -> np.ndarray:
    """Greedy: nearest unused node within the direction-angle cone."""
    tgt = np.array([scenario.total_distance, 0.0])
    cur = np.array([0.0, 0.0])
    nodes = [cur]
    pts = field.points
    unused = np.ones(len(field), dtype=bool)
    cos_max = np.cos(strategy.max_angle)
    for _ in range(len(field) + 1):
        to_tgt = tgt - cur
        d_tgt = np.linalg.norm(to_tgt)
        eligible = np.zeros(len(field), dtype=bool)
        if len(field) > 0:
            vecs = pts - cur
            d = np.linalg.norm(vecs, axis=1)
            with np.errstate(invalid="ignore", divide="ignore"):
                cosang = (vecs @ to_tgt) / (d * d_tgt)
            eligible = unused & (d > 1e-12) & (cosang > cos_max)
        if not np.any(eligible):
            nodes.append(tgt)
            return _hops_from_nodes(np.asarray(nodes))
        d_masked = np.where(eligible, np.linalg.norm(pts - cur, axis=1), np.inf)
        best = int(np.argmin(d_masked))
        if d_tgt < d_masked[best]:
            nodes.append(tgt)
            return _hops_from_nodes(np.asarray(nodes))
        cur = pts[best]
        unused[best] = False
        nodes.append(cur)
    raise RouteFailure("short-hop routing exhausted the field")


def plan_route(strategy: StrategyKind, scenario: Scenario, field: PointField) -> RoutePlan:
    """Route one field realization under the given strategy.

    Raises RouteFailure when a baseline strategy cannot progress.
    """
    S = scenario.total_power
    if isinstance(strategy, Ideal):
        return ideal_route(scenario)[0]
    if isinstance(strategy, (StepwiseOptimal, StepwiseSuboptimal)):
        nodes, k_hat, _ = _stepwise_nodes(scenario, field, strategy.epsilon)
        hops = _hops_from_nodes(nodes)
        if isinstance(strategy, StepwiseSuboptimal):
            # equal split over the planned count even if merges dropped a hop
            powers = np.full(hops.size, S / k_hat)
            regime = (
                Regime.HIGH_SNR
                if np.all(unit_power_snr(scenario.band, hops) * S / k_hat >= 1.0)
                else Regime.LOW_SNR
            )
            return RoutePlan(hops, powers, regime)
        powers, regime = allocate_power(scenario.band, hops, S)
        return RoutePlan(hops, powers, regime)
    if isinstance(strategy, LongHop):
        hops = _plan_long_hop(strategy, scenario, field)
    elif isinstance(strategy, ShortHop):
        hops = _plan_short_hop(strategy, scenario, field)
    else:
        raise TypeError(f"unknown strategy {strategy!r}")
    powers = np.full(hops.size, S / hops.size)
    return RoutePlan(hops, powers, Regime.LOW_SNR)


# ---------------------------------------------------------------------------
# Realized metrics
# ---------------------------------------------------------------------------

def realize_throughput(plan: RoutePlan, band: BandParams) -> float:
    """Route throughput of a plan at the per-hop average SNR."""
    rates = [
        hop_throughput_avg(band, HopLink(r, s))
        for r, s in zip(plan.hop_distances, plan.hop_powers)
    ]
    return total_throughput(rates)


def realize_coverage(plan: RoutePlan, band: BandParams, gamma: float,
                     rng: np.random.Generator) -> bool:
    """True iff every hop's instantaneous SNR (fresh fading draw) exceeds gamma."""
    if gamma < 0:
        raise ValueError("gamma must be >= 0")
    snr_avg = plan.hop_powers * unit_power_snr(band, plan.hop_distances)
    x = band.fading.sample(rng, size=snr_avg.size)
    return bool(np.all(snr_avg * x > gamma))


def _strategy_window(strategy: StrategyKind, scenario: Scenario) -> Window | None:
    """Sampling window sized to the strategy's reach.

    Stepwise strategies only consult nodes near the ideal positions, so a
    strip around the segment (nearest-node tail mass < 1e-9 per position) is
    statistically equivalent to the full window; baselines roam and get the
    full default window.
    """
    if isinstance(strategy, Ideal):
        return None
    R = scenario.total_distance
    if isinstance(strategy, (StepwiseOptimal, StepwiseSuboptimal)):
        if stepwise_hop_count(scenario, strategy.epsilon) == 1:
            return None
        margin = np.sqrt(np.log(1e9) / (scenario.relay_density * np.pi))
        return Window(-margin, R + margin, -margin, margin)
    return sim_window(R)


def run_trial(strategy: StrategyKind, scenario: Scenario, gamma: float,
              seed: int, trial_index: int) -> TrialResult:
    """One independent trial, seeded by (seed, trial_index)."""
    rng = np.random.default_rng([seed, trial_index])
    window = _strategy_window(strategy, scenario)
    field = (
        sample_ppp(scenario.relay_density, window, rng)
        if window is not None
        else PointField(np.empty((0, 2)), scenario.relay_density, sim_window(scenario.total_distance))
    )
    try:
        plan = plan_route(strategy, scenario, field)
    except RouteFailure:
        return TrialResult(strategy, 0, 0.0, False, True)
    tput = realize_throughput(plan, scenario.band)
    covered = realize_coverage(plan, scenario.band, gamma, rng)
    return TrialResult(strategy, plan.hop_count, tput, covered, failed=False)


def monte_carlo(strategy: StrategyKind, scenario: Scenario, gamma: float,
                trials: int, seed: int, workers: int = 1) -> McSummary:
    """Summary over independent trials; deterministic for a given seed."""
    if trials < 1:
        raise ValueError("trials must be >= 1")

    tput = np.zeros(trials)
    covered = np.zeros(trials, dtype=bool)
    failed = np.zeros(trials, dtype=bool)

    def block(lo: int, hi: int) -> None:
        for t in range(lo, hi):
            res = run_trial(strategy, scenario, gamma, seed, t)
            tput[t] = res.throughput
            covered[t] = res.covered
            failed[t] = res.failed

    if workers > 1:
        bounds = np.linspace(0, trials, workers + 1).astype(int)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(lambda b: block(*b), zip(bounds[:-1], bounds[1:])))
    else:
        block(0, trials)

    # reduction in trial order keeps results bit-identical across worker counts
    mean = float(np.mean(tput))
    var = float(np.var(tput))
    ci95 = 1.96 * np.sqrt(var / trials)
    return McSummary(trials, mean, ci95, float(np.mean(covered)), float(np.mean(failed)))


# ---------------------------------------------------------------------------
# Vectorized stepwise sampling (heavy validation runs)
# ---------------------------------------------------------------------------

@dataclass
class StepwiseBatch:
    """Per-trial realized hop distances of the stepwise relay selection.

    ``hops`` has one row per trial and ``k_hat`` columns; merged (adjacent
    same-relay) hops appear as zero-length entries, counted in ``merges``.
    """

    k_hat: int
    hops: np.ndarray
    merges: np.ndarray

    @property
    def trials(self) -> int:
        return self.hops.shape[0]


def sample_stepwise_batch(scenario: Scenario, trials: int, seed: int,
                          epsilon: float = DEFAULT_EPSILON,
                          window_scale: float = 1.0) -> StepwiseBatch:
    """Vectorized stepwise relay selection over many independent fields.

    Uses one stream for the whole batch (deterministic per seed, not aligned
    with monte_carlo's per-trial streams).  ``window_scale`` widens the strip
    margin for truncation checks.
    """
    rng = np.random.default_rng([seed, 0x57EF])
    k_hat = stepwise_hop_count(scenario, epsilon)
    R = scenario.total_distance
    if k_hat == 1:
        return StepwiseBatch(1, np.full((trials, 1), R), np.zeros(trials, dtype=int))

    pos = ideal_positions(scenario, k_hat)
    lam = scenario.relay_density
    margin = window_scale * np.sqrt(np.log(1e9) / (lam * np.pi))
    win = Window(-margin, R + margin, -margin * max(1.0, window_scale), margin * max(1.0, window_scale))
    hops_out = np.zeros((trials, k_hat))
    merges = np.zeros(trials, dtype=int)

    chunk = max(1, int(2e6 / max(1.0, lam * win.area)))
    src = np.array([0.0, 0.0])
    tgt = np.array([R, 0.0])
    done = 0
    while done < trials:
        n = min(chunk, trials - done)
        counts = rng.poisson(lam * win.area, size=n)
        # a realization with an empty strip cannot select relays; resample
        empty = counts == 0
        while np.any(empty):
            counts[empty] = rng.poisson(lam * win.area, size=int(empty.sum()))
            empty = counts == 0
        tot = int(counts.sum())
        xs = rng.uniform(win.xmin, win.xmax, size=tot)
        ys = rng.uniform(win.ymin, win.ymax, size=tot)
        seg = np.repeat(np.arange(n), counts)
        starts = np.searchsorted(seg, np.arange(n))
        relay_idx = np.empty((n, k_hat - 1), dtype=np.int64)
        for j, p in enumerate(pos):
            d2 = (xs - p[0]) ** 2 + (ys - p[1]) ** 2
            order = np.lexsort((d2, seg))
            relay_idx[:, j] = order[starts]
        rel_xy = np.stack([xs[relay_idx], ys[relay_idx]], axis=2)
        nodes = np.concatenate(
            [np.broadcast_to(src, (n, 1, 2)), rel_xy, np.broadcast_to(tgt, (n, 1, 2))], axis=1
        )
        hops = np.sqrt(np.sum(np.diff(nodes, axis=1) ** 2, axis=2))
        same = relay_idx[:, 1:] == relay_idx[:, :-1]
        if same.size:
            merges[done:done + n] = same.sum(axis=1)
            # zero the hop between merged relays so downstream code drops it
            trial_i, pair_j = np.nonzero(same)
            hops[trial_i, pair_j + 1] = 0.0
        hops_out[done:done + n] = hops
        done += n
    return StepwiseBatch(k_hat, hops_out, merges)


def batch_route_throughput(batch: StepwiseBatch, scenario: Scenario) -> np.ndarray:
    """Equal-split route throughput per trial at the average per-hop SNR."""
    band = scenario.band
    s = scenario.total_power / batch.k_hat
    live = batch.hops > 0.0
    rates = np.zeros_like(batch.hops)
    rates[live] = band.bandwidth * np.log2(1.0 + s * unit_power_snr(band, batch.hops[live]))
    inv = np.zeros_like(rates)
    inv[live] = 1.0 / rates[live]
    return 1.0 / np.sum(inv, axis=1)


def batch_hop_throughput_instant(batch: StepwiseBatch, scenario: Scenario, seed: int
                                 ) -> tuple[np.ndarray, np.ndarray]:
    """Per-trial instantaneous edge/middle hop throughputs with fresh fading.

    Returns (edge samples, middle samples) pooled over trials; merged hops are
    excluded.  Used to validate the analytical hop integrals.
    """
    rng = np.random.default_rng([seed, 0xFAD])
    band = scenario.band
    s = scenario.total_power / batch.k_hat
    x = band.fading.sample(rng, size=batch.hops.shape)
    live = batch.hops > 0.0
    tput = np.zeros_like(batch.hops)
    tput[live] = band.bandwidth * np.log2(
        1.0 + s * unit_power_snr(band, batch.hops[live]) * x[live]
    )
    edge = np.concatenate([tput[:, 0][live[:, 0]], tput[:, -1][live[:, -1]]])
    mid = tput[:, 1:-1][live[:, 1:-1]] if batch.k_hat > 2 else np.empty(0)
    return edge, mid


def batch_coverage(batch: StepwiseBatch, scenario: Scenario, gamma: float, seed: int) -> np.ndarray:
    """Per-trial coverage indicator with independent per-hop fading draws."""
    rng = np.random.default_rng([seed, 0xC0F])
    band = scenario.band
    s = scenario.total_power / batch.k_hat
    x = band.fading.sample(rng, size=batch.hops.shape)
    live = batch.hops > 0.0
    snr = np.full_like(batch.hops, np.inf)
    snr[live] = s * unit_power_snr(band, batch.hops[live]) * x[live]
    return np.all(snr > gamma, axis=1)
