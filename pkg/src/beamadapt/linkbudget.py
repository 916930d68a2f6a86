"""Link budget: received power, noise power, and the distance-dependent
receive-gain threshold implied by the SNR threshold.

All arithmetic stays in the dB domain so the model is well behaved over the
full 10 m to 4 km range.  Transmit power is a spectral density (dBm/MHz)
integrated over the signal bandwidth; transmit beamforming gain is the
transmit element count.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .array import SPEED_OF_LIGHT


@dataclass(frozen=True)
class LinkBudget:
    """Downlink parameters.  Units follow the field names."""

    tx_power_density: float = 3.0  # dBm/MHz
    bandwidth: float = 400.0  # MHz
    carrier_frequency: float = 28.0  # GHz
    n_tx_antennas: int = 256
    noise_psd: float = -174.0  # dBm/Hz
    path_loss_exponent: float = 2.5
    snr_threshold: float = 3.0  # dB

    def __post_init__(self):
        if self.bandwidth <= 0:
            raise ValueError("bandwidth must be positive")
        if self.carrier_frequency <= 0:
            raise ValueError("carrier_frequency must be positive")
        if self.n_tx_antennas < 1:
            raise ValueError("n_tx_antennas must be >= 1")
        if self.path_loss_exponent < 2:
            raise ValueError("path_loss_exponent must be >= 2")

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / (self.carrier_frequency * 1e9)

    @property
    def tx_power_total(self) -> float:
        """Total transmit power in dBm (density integrated over bandwidth)."""
        return self.tx_power_density + 10.0 * np.log10(self.bandwidth)

    @property
    def tx_gain(self) -> float:
        """Transmit beamforming gain in dB (element count, power gain)."""
        return 10.0 * np.log10(self.n_tx_antennas)


def _path_gain_db(lb: LinkBudget, distance):
    distance = np.asarray(distance, dtype=float)
    if np.any(distance <= 0):
        raise ValueError("distance must be positive")
    return lb.path_loss_exponent * 10.0 * np.log10(lb.wavelength / (4.0 * np.pi * distance))


def received_power(lb: LinkBudget, g_rx_db: float, distance) -> float:
    """Received power in dBm at a given receive gain and distance (m)."""
    out = lb.tx_power_total + lb.tx_gain + g_rx_db + _path_gain_db(lb, distance)
    return float(out) if np.isscalar(distance) else out


def noise_power(lb: LinkBudget) -> float:
    """Thermal noise power in dBm over the signal bandwidth."""
    return lb.noise_psd + 10.0 * np.log10(lb.bandwidth * 1e6)


def required_gain_threshold(lb: LinkBudget, distance) -> float:
    """Minimum receive gain G0 (dB) meeting the SNR threshold at ``distance``.

    Strictly increasing in distance; plugging G0 back into received_power
    recovers the SNR threshold exactly.
    """
    out = lb.snr_threshold + noise_power(lb) - lb.tx_power_total - lb.tx_gain - _path_gain_db(lb, distance)
    return float(out) if np.isscalar(distance) else out


def distance_for_gain_threshold(lb: LinkBudget, g0_db: float) -> float:
    """Inverse of required_gain_threshold: distance (m) where G0 equals ``g0_db``."""
    margin = g0_db - (lb.snr_threshold + noise_power(lb) - lb.tx_power_total - lb.tx_gain)
    return lb.wavelength / (4.0 * np.pi) * 10.0 ** (margin / (10.0 * lb.path_loss_exponent))
