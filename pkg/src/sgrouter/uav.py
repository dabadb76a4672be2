"""Ground-UAV-ground multi-hop routing with probabilistic line-of-sight.

A ground source reaches a ground target through relays flying at a fixed
altitude.  The two ground-to-air hops mix LoS and NLoS absorption with an
elevation-dependent LoS probability; the air-to-air segment follows the
stepwise-suboptimal routing of the main model with the LoS absorption.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import BandParams, unit_power_snr
from .geometry import PointField, Window, sample_ppp
from .optimizer import DEFAULT_EPSILON, Scenario, stepwise_hop_count
from .simulate import RouteFailure, ideal_positions

# Ground-UAV association considers the forward half-plane: the highest-LoS
# (nearest) UAV that still makes progress toward the other end.
DEFAULT_ASSOC_MAX_ANGLE = np.pi / 2


@dataclass(frozen=True)
class LosParams:
    """Terrain constants of the elevation-angle LoS model."""

    a: float = 25.27
    b: float = 0.5    # per degree

    def __post_init__(self):
        if self.a <= 0 or self.b <= 0:
            raise ValueError("LoS parameters must be positive")


@dataclass(frozen=True)
class UavScenario:
    """THz relaying over a UAV field at fixed altitude."""

    base: Scenario                    # band must be THz; relay_density unused here
    altitude: float                   # m
    uav_density: float                # 1/m^2
    los_params: LosParams = LosParams()
    absorption_los: float = 0.005     # 1/m
    absorption_nlos: float = 0.5      # 1/m
    assoc_max_angle: float = DEFAULT_ASSOC_MAX_ANGLE
    epsilon: float = DEFAULT_EPSILON

    def __post_init__(self):
        if self.altitude <= 0 or self.uav_density <= 0:
            raise ValueError("altitude and UAV density must be positive")
        if self.absorption_nlos <= self.absorption_los:
            raise ValueError("NLoS absorption must exceed LoS absorption")
        if self.base.band.absorption_coeff is None:
            raise ValueError("UAV routing uses the THz band")

    @property
    def los_band(self) -> BandParams:
        return self.base.band.with_absorption(self.absorption_los)

    @property
    def nlos_band(self) -> BandParams:
        return self.base.band.with_absorption(self.absorption_nlos)


def los_probability(params: LosParams, theta_deg) -> np.ndarray | float:
    """LoS probability of a ground-air link at elevation angle theta (degrees)."""
    th = np.asarray(theta_deg, dtype=float)
    if np.any(th < 0) or np.any(th > 90):
        raise ValueError("elevation angle must lie in [0, 90] degrees")
    out = 1.0 / (1.0 + params.a * np.exp(-params.b * (th - params.a)))
    return out if out.ndim else float(out)


def elevation_angle(altitude: float, horizontal_distance) -> np.ndarray | float:
    """Elevation angle in degrees; 90 when the UAV is overhead."""
    if altitude <= 0:
        raise ValueError("altitude must be positive")
    d = np.asarray(horizontal_distance, dtype=float)
    if np.any(d < 0):
        raise ValueError("horizontal distance must be >= 0")
    out = np.degrees(np.arctan2(altitude, d))
    return out if out.ndim else float(out)


def associate_ground_uav(field: PointField, ground_point, altitude: float) -> np.ndarray:
    """UAV with the highest LoS probability toward the ground point.

    The LoS probability increases with elevation angle, which decreases with
    horizontal distance, so this is the horizontally nearest UAV.
    """
    if len(field) == 0:
        raise RouteFailure("no UAV available for association")
    gp = np.asarray(ground_point, dtype=float)
    d = np.linalg.norm(field.points - gp, axis=1)
    p = los_probability(LosParams(), elevation_angle(altitude, d))
    return field.points[int(np.argmax(p))]


def _associate_forward(scn: UavScenario, field: PointField, origin: np.ndarray,
                       toward: np.ndarray) -> np.ndarray:
    """Max-LoS (nearest) UAV within the forward cone from origin toward a point.

    Restricting the association to the progress cone keeps the route from
    starting backwards; outside-cone fallback is the global nearest.
    """
    if len(field) == 0:
        raise RouteFailure("no UAV available for association")
    vecs = field.points - origin
    d = np.linalg.norm(vecs, axis=1)
    axis = toward - origin
    axis = axis / np.linalg.norm(axis)
    with np.errstate(invalid="ignore", divide="ignore"):
        cosang = (vecs @ axis) / d
    in_cone = (d > 1e-12) & (cosang > np.cos(scn.assoc_max_angle))
    if not np.any(in_cone):
        in_cone = d > 1e-12
        if not np.any(in_cone):
            raise RouteFailure("no usable UAV in the field")
    masked = np.where(in_cone, d, np.inf)
    return field.points[int(np.argmin(masked))]


@dataclass(frozen=True)
class UavRoute:
    """Planned hops: ground slant hops at the ends, plane hops inside."""

    horizontal: np.ndarray     # per-hop horizontal distance
    is_ground: np.ndarray      # bool per hop

    @property
    def hop_count(self) -> int:
        return self.horizontal.size


def _route_from_mid_count(scn: UavScenario, field: PointField, src, tgt,
                          a, b, r_ab: float, k_mid: int) -> UavRoute:
    mid_sc = Scenario(scn.los_band, r_ab, scn.base.total_power, scn.uav_density)
    axis = (b - a) / r_ab
    relays = []
    if k_mid > 1:
        pos = a + ideal_positions(mid_sc, k_mid)[:, :1] * axis  # x-offsets along AB
        d2 = np.sum((field.points[None, :, :] - pos[:, None, :]) ** 2, axis=2)
        idx = np.argmin(d2, axis=1)
        keep = np.concatenate([[True], idx[1:] != idx[:-1]])
        relays = [field.points[i] for i in idx[keep]]
    nodes = [src, a, *relays, b, tgt]
    # collapse duplicates (an associated UAV selected again as a relay)
    dedup = [nodes[0]]
    for nd in nodes[1:]:
        if np.linalg.norm(nd - dedup[-1]) > 1e-9:
            dedup.append(nd)
    nodes = np.asarray(dedup)
    horiz = np.sqrt(np.sum(np.diff(nodes, axis=0) ** 2, axis=1))
    is_ground = np.zeros(horiz.size, dtype=bool)
    is_ground[0] = True
    is_ground[-1] = True
    return UavRoute(horiz, is_ground)


def _plan_uav_route(scn: UavScenario, field: PointField) -> UavRoute:
    src = np.array([0.0, 0.0])
    tgt = np.array([scn.base.total_distance, 0.0])
    a = _associate_forward(scn, field, src, tgt)
    b = _associate_forward(scn, field, tgt, src)
    r_ab = float(np.linalg.norm(b - a))
    if r_ab < 1e-9:
        horiz = np.array([np.linalg.norm(a - src), np.linalg.norm(tgt - a)])
        return UavRoute(horiz, np.array([True, True]))
    mid_sc = Scenario(scn.los_band, r_ab, scn.base.total_power, scn.uav_density)
    k_mid = stepwise_hop_count(mid_sc, scn.epsilon)
    return _route_from_mid_count(scn, field, src, tgt, a, b, r_ab, k_mid)


def _route_throughput(scn: UavScenario, route: UavRoute, force_los: bool = False,
                      altitude: float | None = None,
                      rng: np.random.Generator | None = None) -> float:
    """Harmonic route throughput; ground hops mix LoS/NLoS by expectation.

    With ``rng`` given, the LoS state of each ground hop is sampled instead of
    averaged (used for coverage-style Monte Carlo).
    """
    h = scn.altitude if altitude is None else altitude
    s = scn.base.total_power / route.hop_count
    a_los = unit_power_snr(scn.los_band, np.where(route.is_ground,
                                                  np.hypot(route.horizontal, h),
                                                  route.horizontal))
    bw = scn.base.band.bandwidth
    tau_los = bw * np.log2(1.0 + s * a_los)
    inv = np.zeros(route.hop_count)
    plane = ~route.is_ground
    inv[plane] = 1.0 / tau_los[plane]
    gidx = np.nonzero(route.is_ground)[0]
    slant = np.hypot(route.horizontal[gidx], h)
    p_los = (
        np.ones(gidx.size)
        if force_los
        else np.asarray(los_probability(scn.los_params, elevation_angle(h, route.horizontal[gidx])))
    )
    a_nlos = unit_power_snr(scn.nlos_band, slant)
    tau_g_los = tau_los[gidx]
    tau_g_nlos = bw * np.log2(1.0 + s * a_nlos)
    if rng is not None:
        states = rng.uniform(size=gidx.size) < p_los
        tau_g = np.where(states, tau_g_los, tau_g_nlos)
    else:
        tau_g = p_los * tau_g_los + (1.0 - p_los) * tau_g_nlos
    if np.any(tau_g <= 0.0):
        return 0.0
    inv[gidx] = 1.0 / tau_g
    return float(1.0 / np.sum(inv))


def uav_route_throughput(scn: UavScenario, field: PointField,
                         rng: np.random.Generator | None = None,
                         force_los: bool = False) -> float:
    """Throughput of one routed field realization (bit/s)."""
    return _route_throughput(scn, _plan_uav_route(scn, field), force_los=force_los, rng=rng)


def uav_window(scn: UavScenario) -> Window:
    """Window covering associations and mid relays with negligible truncation."""
    margin = 6.0 / np.sqrt(scn.uav_density * np.pi) + 2.0 / np.sqrt(scn.uav_density)
    R = scn.base.total_distance
    return Window(-margin, R + margin, -margin, margin)


def uav_ideal_bound(scn: UavScenario) -> float:
    """Dense-UAV limit of the strategy: every relay exactly where wanted.

    The association UAVs sit directly above source and target (vertical ground
    hops at unit LoS probability) and the mid relays at their uniform ideal
    positions.  The realized mean converges to this value as the UAV density
    grows; at finite density the association's forward offsets can sit
    slightly above it by trading slant length against mid-hop length.
    """
    R = scn.base.total_distance
    mid_sc = Scenario(scn.los_band, R, scn.base.total_power, scn.uav_density)
    k_mid = stepwise_hop_count(mid_sc, scn.epsilon)
    horiz = np.concatenate([[0.0], np.full(k_mid, R / k_mid), [0.0]])
    is_ground = np.zeros(horiz.size, dtype=bool)
    is_ground[[0, -1]] = True
    return _route_throughput(scn, UavRoute(horiz, is_ground))


def altitude_sweep(scn: UavScenario, altitudes, trials: int, seed: int) -> np.ndarray:
    """Mean throughput at each altitude, common fields across altitudes.

    The field and the routed geometry do not depend on altitude, so reusing
    them across the grid removes almost all Monte Carlo jitter from the
    location of the optimum.
    """
    alts = np.asarray(altitudes, dtype=float)
    acc = np.zeros(alts.size)
    win = uav_window(scn)
    for t in range(trials):
        rng = np.random.default_rng([seed, t])
        field = sample_ppp(scn.uav_density, win, rng)
        try:
            route = _plan_uav_route(scn, field)
        except RouteFailure:
            continue
        acc += [_route_throughput(scn, route, altitude=h) for h in alts]
    return acc / trials


def density_sweep(scn: UavScenario, densities, trials: int, seed: int) -> np.ndarray:
    """Mean throughput at each UAV density (fixed altitude).

    Each trial samples one field at the largest density and thins it with
    per-point uniform marks for the smaller ones (a thinned PPP is a PPP), so
    the fields are nested across the grid and the density comparison is
    nearly noise-free.
    """
    dens = np.asarray(sorted(densities), dtype=float)
    lam_max = float(dens[-1])
    scns = [
        UavScenario(scn.base, scn.altitude, lam, scn.los_params,
                    scn.absorption_los, scn.absorption_nlos,
                    scn.assoc_max_angle, scn.epsilon)
        for lam in dens
    ]
    win = uav_window(scns[-1])
    acc = np.zeros(dens.size)
    for t in range(trials):
        rng = np.random.default_rng([seed, t])
        full = sample_ppp(lam_max, win, rng)
        marks = rng.uniform(size=len(full))
        for i, (lam, scn_i) in enumerate(zip(dens, scns)):
            pts = full.points[marks < lam / lam_max]
            field = PointField(pts, lam, win)
            try:
                acc[i] += uav_route_throughput(scn_i, field)
            except RouteFailure:
                pass
    order = np.argsort(np.argsort(densities))
    return (acc / trials)[order]
