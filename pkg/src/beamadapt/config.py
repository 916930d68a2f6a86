"""Experiment configuration: flat INI files with one section per module.

Unknown sections or keys are rejected with the offending name; every value
is validated against the owning type's invariants at load time.  CLI flags
override file values.  The same dialect is re-emitted as the run manifest
(plus a tool-version line), and a manifest loads back as a config.
"""

from __future__ import annotations

import configparser
import dataclasses
import io
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .adaptation import BASELINE, GENERALIZED, AdaptationPolicy
from .array import Direction, ElementPattern, PlanarArrayGeometry
from .linkbudget import LinkBudget
from .outage import IntegrationGrid
from .uncertainty import AngularCovariance


class ConfigError(Exception):
    """Bad configuration; ``key`` names the offending entry when known."""

    def __init__(self, message: str, key: str | None = None):
        super().__init__(message)
        self.key = key


@dataclass(frozen=True)
class ExperimentConfig:
    # [array]
    rows: int = 16
    cols: int = 16
    spacing_wavelengths: float = 0.5
    theta_3db_deg: float = 65.0
    psi_3db_deg: float = 65.0
    sl_v_db: float = 30.0
    a_m_db: float = 30.0
    g_max_dbi: float = 8.0
    # [linkbudget]
    tx_power_density_dbm_per_mhz: float = 3.0
    bandwidth_mhz: float = 400.0
    carrier_frequency_ghz: float = 28.0
    n_tx_antennas: int = 256
    noise_psd_dbm_per_hz: float = -174.0
    path_loss_exponent: float = 2.5
    snr_threshold_db: float = 3.0
    # [uncertainty]
    sigma_theta_deg: float = 2.0
    sigma_psi_deg: float = 2.0
    rho: float = 0.5
    # [adaptation]
    confidence_level: float = 0.95
    outage_threshold: float = 0.05
    steer_offset_beta_deg: float = 0.0
    # [outage]
    grid_resolution_deg: float = 0.025
    grid_half_width_sigmas: float = 6.0
    mean_theta_deg: float = 0.0
    mean_psi_deg: float = 0.0
    # [experiments]
    distance_min_m: float = 10.0
    distance_max_m: float = 4000.0
    distance_points: int = 60
    fixed_distance_m: float = 2000.0
    correlation_min: float = 0.0
    correlation_max: float = 0.9
    correlation_points: int = 10
    orientation_min_deg: float = 0.0
    orientation_max_deg: float = 90.0
    orientation_points: int = 19
    policy: str = "both"
    output_dir: str = "out"
    seed: int = 1234

    # --- builders -------------------------------------------------------

    def geometry(self) -> PlanarArrayGeometry:
        return PlanarArrayGeometry(
            rows=self.rows,
            cols=self.cols,
            spacing=self.spacing_wavelengths,
            carrier_frequency=self.carrier_frequency_ghz * 1e9,
        )

    def element_pattern(self) -> ElementPattern:
        return ElementPattern(
            theta_3db=self.theta_3db_deg,
            psi_3db=self.psi_3db_deg,
            sl_v=self.sl_v_db,
            a_m=self.a_m_db,
            g_max=self.g_max_dbi,
        )

    def link_budget(self) -> LinkBudget:
        return LinkBudget(
            tx_power_density=self.tx_power_density_dbm_per_mhz,
            bandwidth=self.bandwidth_mhz,
            carrier_frequency=self.carrier_frequency_ghz,
            n_tx_antennas=self.n_tx_antennas,
            noise_psd=self.noise_psd_dbm_per_hz,
            path_loss_exponent=self.path_loss_exponent,
            snr_threshold=self.snr_threshold_db,
        )

    def covariance(self, rho: float | None = None) -> AngularCovariance:
        return AngularCovariance(
            sigma_theta=self.sigma_theta_deg,
            sigma_psi=self.sigma_psi_deg,
            rho=self.rho if rho is None else rho,
        )

    def mean_direction(self) -> Direction:
        return Direction(self.mean_theta_deg, self.mean_psi_deg)

    def integration_grid(self) -> IntegrationGrid:
        return IntegrationGrid(
            half_width_sigmas=self.grid_half_width_sigmas,
            resolution=self.grid_resolution_deg,
            center=self.mean_direction(),
        )

    def adaptation_policy(self, kind: str) -> AdaptationPolicy:
        return AdaptationPolicy(
            kind=kind,
            confidence_level=self.confidence_level,
            steer_offset_beta=self.steer_offset_beta_deg,
        )

    def policy_kinds(self) -> list[str]:
        return {
            "generalized": [GENERALIZED],
            "baseline": [BASELINE],
            "both": [GENERALIZED, BASELINE],
        }[self.policy]

    def validate(self) -> "ExperimentConfig":
        try:
            self.geometry()
            self.element_pattern()
            self.link_budget()
            self.covariance()
            self.integration_grid()
            self.adaptation_policy(GENERALIZED)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if self.policy not in ("generalized", "baseline", "both"):
            raise ConfigError(f"policy must be generalized|baseline|both, got {self.policy!r}", "experiments.policy")
        if not 0.0 < self.outage_threshold < 1.0:
            raise ConfigError("outage_threshold must lie in (0, 1)", "adaptation.outage_threshold")
        if self.distance_min_m <= 0 or self.distance_max_m <= self.distance_min_m:
            raise ConfigError("distance range must satisfy 0 < min < max", "experiments.distance_min_m")
        if self.distance_points < 2 or self.correlation_points < 2 or self.orientation_points < 2:
            raise ConfigError("sweeps need at least two points", "experiments.distance_points")
        if not 0.0 <= self.correlation_min <= self.correlation_max <= 0.95:
            raise ConfigError("correlation sweep must stay within [0, 0.95]", "experiments.correlation_max")
        if not 0.0 <= self.orientation_min_deg <= self.orientation_max_deg <= 90.0:
            raise ConfigError("orientation sweep must stay within [0, 90]", "experiments.orientation_max_deg")
        if self.fixed_distance_m <= 0:
            raise ConfigError("fixed_distance_m must be positive", "experiments.fixed_distance_m")
        return self


_SECTIONS: dict[str, tuple[str, ...]] = {
    "array": (
        "rows", "cols", "spacing_wavelengths",
        "theta_3db_deg", "psi_3db_deg", "sl_v_db", "a_m_db", "g_max_dbi",
    ),
    "linkbudget": (
        "tx_power_density_dbm_per_mhz", "bandwidth_mhz", "carrier_frequency_ghz",
        "n_tx_antennas", "noise_psd_dbm_per_hz", "path_loss_exponent", "snr_threshold_db",
    ),
    "uncertainty": ("sigma_theta_deg", "sigma_psi_deg", "rho"),
    "adaptation": ("confidence_level", "outage_threshold", "steer_offset_beta_deg"),
    "outage": (
        "grid_resolution_deg", "grid_half_width_sigmas", "mean_theta_deg", "mean_psi_deg",
    ),
    "experiments": (
        "distance_min_m", "distance_max_m", "distance_points", "fixed_distance_m",
        "correlation_min", "correlation_max", "correlation_points",
        "orientation_min_deg", "orientation_max_deg", "orientation_points",
        "policy", "output_dir", "seed",
    ),
}

_FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(ExperimentConfig)}


def _parse_value(section: str, key: str, raw: str):
    kind = _FIELD_TYPES[key]
    try:
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
        return raw.strip()
    except ValueError as exc:
        raise ConfigError(f"invalid value for {section}.{key}: {raw!r}", f"{section}.{key}") from exc


def loads(text: str) -> ExperimentConfig:
    """Parse a config (or manifest) from INI text, strictly."""
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from exc
    values = {}
    for section in parser.sections():
        if section == "meta":
            continue  # manifest bookkeeping, not configuration
        if section not in _SECTIONS:
            raise ConfigError(f"unknown config section [{section}]", section)
        for key, raw in parser.items(section):
            if key not in _SECTIONS[section]:
                raise ConfigError(f"unknown config key {section}.{key}", f"{section}.{key}")
            values[key] = _parse_value(section, key, raw)
    return ExperimentConfig(**values).validate()


def load(path: str | Path) -> ExperimentConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return loads(text)


def _format_value(value) -> str:
    if isinstance(value, float):
        return repr(value)  # shortest round-trip form
    return str(value)


def dumps(cfg: ExperimentConfig, manifest: bool = False) -> str:
    """Emit a config as INI text; with ``manifest=True`` add the tool version."""
    out = io.StringIO()
    for section, keys in _SECTIONS.items():
        out.write(f"[{section}]\n")
        for key in keys:
            out.write(f"{key} = {_format_value(getattr(cfg, key))}\n")
        out.write("\n")
    if manifest:
        out.write("[meta]\n")
        out.write(f"tool_version = {__version__}\n")
    return out.getvalue()
