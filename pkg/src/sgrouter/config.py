"""Configuration: engineering-unit parsing and the shipped default parameter set.

Config files are flat ``key = value`` text with dotted section prefixes
(band.thz.*, band.rf.*, scenario.*, run.*, uav.*).  Engineering units (dBi,
dB, dBm, MHz, GHz) live only at this boundary; everything behind it is SI.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .channel import AlphaMuFading, Band, BandParams, ExponentialFading


class ConfigError(ValueError):
    """Unparseable or out-of-range configuration."""


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def dbm_to_watt(dbm: float) -> float:
    return 10.0 ** (dbm / 10.0) / 1000.0


def parse_kv_text(text: str) -> dict[str, str]:
    """Parse flat key-value lines; '#' starts a comment."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, val = (part.strip() for part in line.split("=", 1))
        if not key or not val:
            raise ConfigError(f"line {lineno}: empty key or value")
        out[key] = val
    return out


def _floats(val: str) -> list[float]:
    try:
        return [float(tok) for tok in val.replace(",", " ").split()]
    except ValueError as exc:
        raise ConfigError(f"cannot parse number list from {val!r}") from exc


def _float(val: str) -> float:
    nums = _floats(val)
    if len(nums) != 1:
        raise ConfigError(f"expected a single number, got {val!r}")
    return nums[0]


DEFAULT_CONFIG = """\
# sg-router default parameters (linear-scale values given in engineering units)

band.thz.gain_dbi = 20
band.rf.gain_dbi = 0
band.thz.carrier_ghz = 1000
band.rf.carrier_ghz = 2.1
band.thz.mean_additional_loss_db = -93
band.rf.mean_additional_loss_db = -39
band.thz.absorption_coeff_per_m = 0.05
band.rf.pathloss_exponent = 2.5
band.thz.bandwidth_mhz = 500
band.rf.bandwidth_mhz = 40
band.thz.noise_dbm = -107
band.rf.noise_dbm = -128
band.thz.fading_alpha = 2
band.thz.fading_mu = 4
band.thz.density_per_m2 = 10e-3
band.rf.density_per_m2 = 0.5e-3

scenario.thz.r_m = 100
scenario.rf.r_m = 1000
scenario.s_dbm = -20 -10 0 10 20 30
scenario.gamma_db = 0

run.trials = 10000
run.seed = 1
run.strategies = ideal stepwise-optimal stepwise-suboptimal long-hop short-hop
run.long_hop_radius_thz_m = 40
run.long_hop_radius_rf_m = 400
run.short_hop_max_angle_deg = 45
run.hop_cap_epsilon = 0.01

uav.altitude_m = 80
uav.altitude_grid_m = 20:300:10
uav.density_per_km2 = 100
uav.density_grid_per_km2 = 25 50 100 200 400
uav.r_m = 500
uav.s_dbm = 30
uav.los_a = 25.27
uav.los_b_per_deg = 0.5
uav.absorption_los_per_m = 0.005
uav.absorption_nlos_per_m = 0.5
"""


@dataclass
class RunConfig:
    """Validated run configuration in SI units."""

    thz: BandParams
    rf: BandParams
    thz_density: float
    rf_density: float
    thz_r: list[float]
    rf_r: list[float]
    s_dbm: list[float]
    gamma_db: float
    trials: int
    seed: int
    strategies: list[str]
    long_hop_radius: dict[Band, float]
    short_hop_max_angle: float
    hop_cap_epsilon: float
    uav_altitude: float
    uav_altitude_grid: list[float]
    uav_density: float
    uav_density_grid: list[float]
    uav_r: float
    uav_s_dbm: float
    uav_los_a: float
    uav_los_b: float
    uav_absorption_los: float
    uav_absorption_nlos: float

    def band(self, name: str) -> BandParams:
        return self.thz if name == "thz" else self.rf

    def density(self, name: str) -> float:
        return self.thz_density if name == "thz" else self.rf_density


def _grid(val: str) -> list[float]:
    """Either an explicit list or 'start:stop:step' (inclusive)."""
    if ":" in val:
        start, stop, step = (float(tok) for tok in val.split(":"))
        return list(np.arange(start, stop + 0.5 * step, step))
    return _floats(val)


KNOWN_STRATEGIES = {"ideal", "stepwise-optimal", "stepwise-suboptimal", "long-hop", "short-hop"}


def load_config(path: str | None = None, overrides: dict[str, str] | None = None) -> RunConfig:
    """Build a RunConfig from defaults, optional file, and optional overrides."""
    kv = parse_kv_text(DEFAULT_CONFIG)
    if path is not None:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                kv.update(parse_kv_text(fh.read()))
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    if overrides:
        kv.update(overrides)

    def get(key: str) -> str:
        try:
            return kv[key]
        except KeyError as exc:
            raise ConfigError(f"missing config key {key}") from exc

    for band in ("thz", "rf"):
        noise = _float(get(f"band.{band}.noise_dbm"))
        if noise >= 0:
            raise ConfigError(f"band.{band}.noise_dbm must be negative, got {noise}")

    alpha = _float(get("band.thz.fading_alpha"))
    mu = _float(get("band.thz.fading_mu"))
    thz = BandParams(
        band=Band.THZ,
        gain=db_to_linear(_float(get("band.thz.gain_dbi"))),
        mean_additional_loss=db_to_linear(_float(get("band.thz.mean_additional_loss_db"))),
        noise_power=dbm_to_watt(_float(get("band.thz.noise_dbm"))),
        bandwidth=_float(get("band.thz.bandwidth_mhz")) * 1e6,
        fading=AlphaMuFading(alpha, mu),
        absorption_coeff=_float(get("band.thz.absorption_coeff_per_m")),
        carrier_freq=_float(get("band.thz.carrier_ghz")) * 1e9,
    )
    rf = BandParams(
        band=Band.RF,
        gain=db_to_linear(_float(get("band.rf.gain_dbi"))),
        mean_additional_loss=db_to_linear(_float(get("band.rf.mean_additional_loss_db"))),
        noise_power=dbm_to_watt(_float(get("band.rf.noise_dbm"))),
        bandwidth=_float(get("band.rf.bandwidth_mhz")) * 1e6,
        fading=ExponentialFading(),
        pathloss_exponent=_float(get("band.rf.pathloss_exponent")),
        carrier_freq=_float(get("band.rf.carrier_ghz")) * 1e9,
    )

    strategies = get("run.strategies").split()
    unknown = set(strategies) - KNOWN_STRATEGIES
    if unknown:
        raise ConfigError(f"unknown strategies: {sorted(unknown)}")

    trials = int(_float(get("run.trials")))
    if trials < 1:
        raise ConfigError("run.trials must be >= 1")

    return RunConfig(
        thz=thz,
        rf=rf,
        thz_density=_float(get("band.thz.density_per_m2")),
        rf_density=_float(get("band.rf.density_per_m2")),
        thz_r=_grid(get("scenario.thz.r_m")),
        rf_r=_grid(get("scenario.rf.r_m")),
        s_dbm=_grid(get("scenario.s_dbm")),
        gamma_db=_float(get("scenario.gamma_db")),
        trials=trials,
        seed=int(_float(get("run.seed"))),
        strategies=strategies,
        long_hop_radius={
            Band.THZ: _float(get("run.long_hop_radius_thz_m")),
            Band.RF: _float(get("run.long_hop_radius_rf_m")),
        },
        short_hop_max_angle=np.deg2rad(_float(get("run.short_hop_max_angle_deg"))),
        hop_cap_epsilon=_float(get("run.hop_cap_epsilon")),
        uav_altitude=_float(get("uav.altitude_m")),
        uav_altitude_grid=_grid(get("uav.altitude_grid_m")),
        uav_density=_float(get("uav.density_per_km2")) * 1e-6,
        uav_density_grid=[d * 1e-6 for d in _grid(get("uav.density_grid_per_km2"))],
        uav_r=_float(get("uav.r_m")),
        uav_s_dbm=_float(get("uav.s_dbm")),
        uav_los_a=_float(get("uav.los_a")),
        uav_los_b=_float(get("uav.los_b_per_deg")),
        uav_absorption_los=_float(get("uav.absorption_los_per_m")),
        uav_absorption_nlos=_float(get("uav.absorption_nlos_per_m")),
    )


def table1_thz() -> BandParams:
    """THz band with the shipped default constants."""
    return load_config().thz


def table1_rf() -> BandParams:
    """RF band with the shipped default constants."""
    return load_config().rf
