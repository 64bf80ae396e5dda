"""Satellite-to-gateway channel, SINR, rate and model transfer times.

Beamforming is reduced to a scalar effective gain: the received power of a
link is |h|^2 * p_tx.  Within a gateway the associated satellites occupy
orthogonal subcarriers; a satellite served by another gateway on the same
subcarrier index is a co-channel interferer.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import NonPositiveNoise, ZeroRate

SPEED_OF_LIGHT_KMPS = 299_792.458


@dataclass(frozen=True)
class ChannelRealization:
    gain: float
    doppler_hz: float = 0.0
    delay_s: float = 0.0
    carrier_hz: float = 10e9
    time_s: float = 0.0

    def __post_init__(self):
        if self.gain < 0 or self.delay_s < 0:
            raise ValueError("gain and delay_s must be non-negative")

    def coefficient(self) -> complex:
        return channel_at(self.gain, self.doppler_hz, self.delay_s, self.time_s,
                          self.carrier_hz)


@dataclass(frozen=True)
class LinkBudget:
    sinr: float
    bandwidth_hz: float
    rate_bps: float
    uplink_s: float
    downlink_s: float
    distance_km: float


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def channel_gain(sat_gain_dbi: float, gw_gain_dbi: float, pathloss_db: float) -> float:
    return math.sqrt(db_to_linear(sat_gain_dbi) * db_to_linear(gw_gain_dbi)) \
        * 10.0 ** (-pathloss_db / 10.0)


def channel_at(gain: float, doppler_hz: float, delay_s: float, t: float, f: float) -> complex:
    """Channel coefficient gain * exp(j 2 pi (t nu - f tau)).

    The cycle count is reduced modulo 1 before forming the phase so that
    large f*tau products (GHz carrier, ms delay) keep full precision.
    """
    cycles = math.fmod(t * doppler_hz, 1.0) - math.fmod(f * delay_s, 1.0)
    phase = 2.0 * math.pi * cycles
    return complex(gain * math.cos(phase), gain * math.sin(phase))


def sinr(signal_power: float, interferer_powers: Sequence[float], noise_power: float) -> float:
    if noise_power <= 0:
        raise NonPositiveNoise(f"noise power must be > 0, got {noise_power}")
    return signal_power / (noise_power + math.fsum(interferer_powers))


def achievable_rate(assoc: bool, bandwidth_hz: float, sinr_value: float) -> float:
    if not assoc:
        return 0.0
    return bandwidth_hz * math.log2(1.0 + sinr_value)


def propagation_delay(distance_km: float) -> float:
    return distance_km / SPEED_OF_LIGHT_KMPS


def transfer_time(model_bits: float, rate_bps: float, distance_km: float) -> float:
    if rate_bps <= 0:
        raise ZeroRate("transfer over a link with zero rate")
    return model_bits / rate_bps + propagation_delay(distance_km)


def bandwidth_check(allocations: Mapping[int, Sequence[float]] | Sequence[Sequence[float]],
                    budget_hz: float) -> bool:
    """True iff every satellite's summed allocation fits in `budget_hz`.

    `allocations` maps each satellite to the bandwidths of its active
    (associated) links.
    """
    rows = allocations.values() if isinstance(allocations, Mapping) else allocations
    return all(math.fsum(row) <= budget_hz for row in rows)


@dataclass(frozen=True)
class LinkParams:
    """Fixed link constants shared by all satellites and gateways."""
    sat_gain_dbi: float = 25.0
    pathloss_db: float = 1.5
    carrier_hz: float = 10e9
    bandwidth_hz: float = 1e9
    doppler_hz: float = 20e3
    tx_power_w: float = 1.0


def received_power(gain: float, tx_power_w: float) -> float:
    return gain * gain * tx_power_w


def link_budgets(assignments: Mapping[int, int | None], positions, gateways,
                 model_bits: float, params: LinkParams = LinkParams()) -> dict[int, LinkBudget]:
    """Link budget of every associated satellite.

    Args:
        assignments: satellite id -> gateway id (or None).
        positions: satellite id -> GroundPoint at the association instant.
        gateways: iterable of GatewayConfig.
        model_bits: payload size, used both ways.
    """
    gw_by_id = {gw.id: gw for gw in gateways}
    # subcarrier index = position in the gateway's (id-sorted) association list
    subcarrier: dict[int, int] = {}
    members: dict[int, list[int]] = {g: [] for g in gw_by_id}
    for s in sorted(assignments):
        g = assignments[s]
        if g is not None:
            subcarrier[s] = len(members[g])
            members[g].append(s)

    out = {}
    for s, g in sorted(assignments.items()):
        if g is None:
            continue
        gw = gw_by_id[g]
        gain = channel_gain(params.sat_gain_dbi, gw.antenna_gain_dbi, params.pathloss_db)
        dist = positions[s].distance(gw.position)
        h = channel_at(gain, params.doppler_hz, propagation_delay(dist), 0.0, params.carrier_hz)
        signal = received_power(abs(h), params.tx_power_w)
        interferers = [
            received_power(gain, params.tx_power_w)
            for s2, g2 in assignments.items()
            if g2 is not None and g2 != g and subcarrier[s2] == subcarrier[s]
        ]
        gamma = sinr(signal, interferers, gw.noise_power)
        rate = achievable_rate(True, params.bandwidth_hz, gamma)
        t = transfer_time(model_bits, rate, dist)
        out[s] = LinkBudget(sinr=gamma, bandwidth_hz=params.bandwidth_hz, rate_bps=rate,
                            uplink_s=t, downlink_s=t, distance_km=dist)
    return out


def complex_gains(gains: np.ndarray, doppler_hz: np.ndarray, delay_s: np.ndarray,
                  t: float, f: float) -> np.ndarray:
    """Vectorised channel_at."""
    cycles = np.fmod(t * doppler_hz, 1.0) - np.fmod(f * delay_s, 1.0)
    return gains * np.exp(2j * np.pi * cycles)
