"""Run configuration: key=value files, CLI overrides, resolution to model specs.

Configuration speaks ordinary frequencies (MHz) and times (ns) and scales
the drive/disorder knobs by the mean coupling J, mirroring how the chain
parameters are usually quoted.  Resolution converts everything to angular
units and builds the immutable spec objects the simulation modules consume.
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from pathlib import Path

import numpy as np

from .basis import SectorBasis, build_sector_basis
from .device import DeviceTable, load_device_table, bundled_table_path
from .errors import ConfigError
from .hamiltonian import SectorModel
from .model import (ChainSpec, DisorderSpec, DriveSpec, PotentialSpec,
                    build_potential, resonance_drive_frequency)
from .semiclassical import SemiclassicalParams
from .units import rad_ns_from_mhz

_PROFILES = ("cosine", "flat", "table")


def parse_site_range(text: str, n_sites: int, field_name: str) -> tuple:
    """Parse "7-12" or "7,9,11" into a tuple of 1-based site numbers."""
    text = str(text).strip()
    if not text or text.lower() == "none":
        return ()
    sites: list = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if "-" in chunk:
            lo, _, hi = chunk.partition("-")
            try:
                lo_i, hi_i = int(lo), int(hi)
            except ValueError as exc:
                raise ConfigError(f"{field_name}: bad range {chunk!r}") from exc
            if lo_i > hi_i:
                raise ConfigError(f"{field_name}: empty range {chunk!r}")
            sites.extend(range(lo_i, hi_i + 1))
        else:
            try:
                sites.append(int(chunk))
            except ValueError as exc:
                raise ConfigError(f"{field_name}: bad site {chunk!r}") from exc
    if any(s < 1 or s > n_sites for s in sites):
        raise ConfigError(f"{field_name}: sites outside 1..{n_sites}")
    return tuple(sites)


@dataclass
class RunConfig:
    """All user-facing knobs with their defaults (the nominal experiment)."""

    n_sites: int = 12
    boson_cutoff: int = 1
    sector: int = 1
    coupling_mhz: tuple = (11.5,)          # scalar or one value per bond
    nonlinearity_mhz: float = -250.0
    dc_amplitude_over_j: float = 3.0
    ac_amplitude_over_j: float = 3.0
    drive_frequency_mhz: float = 0.0       # 0 -> resonance condition
    resonance_order: int = 3
    drive_phase_rad: float = 0.0
    time_origin_ns: float = 0.0
    profile: str = "cosine"
    flat_level_fraction: float = 1.0
    device_table: str = ""                 # path; empty -> bundled table
    device_row: str = "cosine"
    disorder_w_over_j: float = 0.0
    disordered_sites: str = ""             # e.g. "7-12"; empty -> second half
    driven_sites: str = ""                 # e.g. "1-6"; empty -> first half
    master_seed: int = 12345
    realizations: int = 50
    t_max_ns: float = 150.0
    sample_dt_ns: float = 1.0
    steps_per_period: int = 256
    init_site: int = 3
    czz_reference_site: int = 7
    histogram_bins: int = 20
    stability_resolution: int = 200
    contour_resolution: int = 101
    keep_realizations: bool = False

    def validate(self) -> "RunConfig":
        if self.profile not in _PROFILES:
            raise ConfigError(f"profile must be one of {_PROFILES}, got {self.profile!r}")
        if self.profile == "table":
            if self.n_sites != 12:
                raise ConfigError("device-table mode requires n_sites = 12")
            if self.device_row not in ("cosine", "flat"):
                raise ConfigError("device_row must be cosine or flat")
        else:
            if self.n_sites < 4 or self.n_sites % 2:
                raise ConfigError("formula mode requires an even n_sites >= 4")
        if self.boson_cutoff < 1:
            raise ConfigError("boson_cutoff must be >= 1")
        if not 0 <= self.sector <= self.n_sites * self.boson_cutoff:
            raise ConfigError("sector outside 0..N*n_max")
        if len(self.coupling_mhz) not in (1, self.n_sites - 1):
            raise ConfigError("coupling_mhz needs 1 or n_sites-1 values")
        if any(not np.isfinite(j) for j in self.coupling_mhz):
            raise ConfigError("couplings must be finite")
        if self.disorder_w_over_j < 0:
            raise ConfigError("disorder_w_over_j must be >= 0")
        if self.realizations < 1:
            raise ConfigError("realizations must be >= 1")
        if self.steps_per_period < 1:
            raise ConfigError("steps_per_period must be >= 1")
        if self.t_max_ns <= 0 or self.sample_dt_ns <= 0:
            raise ConfigError("t_max_ns and sample_dt_ns must be positive")
        if not 1 <= self.init_site <= self.n_sites:
            raise ConfigError(f"init_site outside 1..{self.n_sites}")
        if not 1 <= self.czz_reference_site <= self.n_sites:
            raise ConfigError(f"czz_reference_site outside 1..{self.n_sites}")
        if self.histogram_bins < 2:
            raise ConfigError("histogram_bins must be >= 2")
        if self.stability_resolution < 2 or self.contour_resolution < 2:
            raise ConfigError("grid resolutions must be >= 2")
        if self.resonance_order < 1:
            raise ConfigError("resonance_order must be >= 1")
        return self

    def to_dict(self) -> dict:
        out = {}
        for f in fields(self):
            value = getattr(self, f.name)
            out[f.name] = list(value) if isinstance(value, tuple) else value
        return out


_BOOL_KEYS = {"keep_realizations"}
_INT_KEYS = {"n_sites", "boson_cutoff", "sector", "resonance_order", "master_seed",
             "realizations", "steps_per_period", "init_site", "czz_reference_site",
             "histogram_bins", "stability_resolution", "contour_resolution"}
_FLOAT_KEYS = {"nonlinearity_mhz", "dc_amplitude_over_j", "ac_amplitude_over_j",
               "drive_frequency_mhz", "drive_phase_rad", "time_origin_ns",
               "flat_level_fraction", "disorder_w_over_j", "t_max_ns",
               "sample_dt_ns"}
_STR_KEYS = {"profile", "device_table", "device_row", "disordered_sites",
             "driven_sites"}


def _parse_value(key: str, raw: str):
    raw = raw.strip()
    if key == "coupling_mhz":
        try:
            return tuple(float(x) for x in raw.split(","))
        except ValueError as exc:
            raise ConfigError(f"coupling_mhz: bad value {raw!r}") from exc
    if key in _BOOL_KEYS:
        if raw.lower() in ("1", "true", "yes", "on"):
            return True
        if raw.lower() in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"{key}: bad boolean {raw!r}")
    try:
        if key in _INT_KEYS:
            return int(raw, 0)
        if key in _FLOAT_KEYS:
            return float(raw)
    except ValueError as exc:
        raise ConfigError(f"{key}: bad value {raw!r}") from exc
    if key in _STR_KEYS:
        return raw
    raise ConfigError(f"unknown config key {key!r}")


def load_config(path) -> RunConfig:
    """Read a key=value config file ('#' starts a comment)."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, _, raw = line.partition("=")
        key = key.strip()
        values[key] = _parse_value(key, raw)
    return replace(RunConfig(), **values)


@dataclass(frozen=True)
class ResolvedRun:
    """Concrete spec objects derived from one validated RunConfig."""

    config: RunConfig
    chain: ChainSpec
    drive: DriveSpec
    potential: PotentialSpec            # clean (no disorder overlay)
    disorder: DisorderSpec
    basis: SectorBasis
    device: DeviceTable | None
    drive_frequency_mhz: float

    @property
    def model(self) -> SectorModel:
        return SectorModel(self.chain, self.drive, self.potential, self.basis)

    @property
    def step_ns(self) -> float:
        return self.drive.period / self.config.steps_per_period

    def sample_times(self) -> np.ndarray:
        cfg = self.config
        count = int(round(cfg.t_max_ns / cfg.sample_dt_ns))
        return np.arange(count + 1) * cfg.sample_dt_ns

    def semiclassical_params(self) -> SemiclassicalParams:
        return SemiclassicalParams(
            n_sites=self.chain.n_sites,
            dc_amplitude=self.drive.dc_amplitude,
            ac_amplitude=self.drive.ac_amplitude,
            drive_angular_frequency=self.drive.angular_frequency,
            hopping=self.chain.mean_coupling,
        )


def resolve(config: RunConfig) -> ResolvedRun:
    """Validate and convert a RunConfig into immutable model specs."""
    config.validate()
    n = config.n_sites

    device = None
    if config.profile == "table":
        table_path = config.device_table or bundled_table_path()
        device = load_device_table(table_path)
        chain = device.chain_spec(config.boson_cutoff)
        dc_mhz = device.dc_amplitude_mhz(config.device_row)
        potential = device.potential_spec(config.device_row)
    else:
        couplings = config.coupling_mhz
        if len(couplings) == 1:
            couplings = couplings * (n - 1)
        chain = ChainSpec(
            n, np.array([rad_ns_from_mhz(j) for j in couplings]),
            rad_ns_from_mhz(config.nonlinearity_mhz), config.boson_cutoff)
        dc_mhz = config.dc_amplitude_over_j * (1e3 / (2 * np.pi)) \
            * chain.mean_coupling  # mean coupling back to MHz
        potential = build_potential(
            config.profile, n, config.dc_amplitude_over_j * chain.mean_coupling,
            localized_sites=parse_site_range(config.disordered_sites, n,
                                             "disordered_sites") or None,
            flat_level_fraction=config.flat_level_fraction)

    mean_coupling_mhz = chain.mean_coupling * 1e3 / (2 * np.pi)
    if config.drive_frequency_mhz > 0:
        drive_mhz = config.drive_frequency_mhz
    else:
        dc_for_resonance = config.dc_amplitude_over_j * mean_coupling_mhz
        if dc_for_resonance * mean_coupling_mhz <= 0:
            raise ConfigError(
                "drive_frequency_mhz must be given explicitly when the "
                "resonance condition is undefined (dc amplitude * J <= 0)")
        drive_mhz = resonance_drive_frequency(
            n, dc_for_resonance, mean_coupling_mhz, config.resonance_order)

    driven = parse_site_range(config.driven_sites, n, "driven_sites") or None
    drive = DriveSpec.cosine(
        n,
        dc_amplitude=rad_ns_from_mhz(dc_mhz),
        ac_amplitude=config.ac_amplitude_over_j * chain.mean_coupling,
        angular_frequency=rad_ns_from_mhz(drive_mhz),
        driven_sites=driven,
        phase=config.drive_phase_rad,
        time_origin=config.time_origin_ns,
    )

    disorder = DisorderSpec(
        n_sites=n,
        strength=config.disorder_w_over_j * chain.mean_coupling,
        disordered_sites=parse_site_range(config.disordered_sites, n,
                                          "disordered_sites"),
        master_seed=config.master_seed,
        realization_count=config.realizations,
    )

    basis = build_sector_basis(n, config.sector, config.boson_cutoff)
    return ResolvedRun(config, chain, drive, potential, disorder, basis,
                       device, drive_mhz)
