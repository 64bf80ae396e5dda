"""Per-satellite compute allocation under a contact window and an energy budget.

Training one epoch over D samples at C Hz takes D*C_d/C seconds and costs
eps*C^2*C_d*D joules.  The epoch count is limited both by the time left in
the window after the model transfers and by the energy budget; the
frequency that balances the two limits is cbrt(E / (eps * T_eff)).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import NoData, WindowTooShort, ZeroFrequency

DEFAULT_CYCLES_PER_SAMPLE = 1e8
DEFAULT_CHIP_CONST = 5e-24


@dataclass(frozen=True)
class ComputePlan:
    freq_hz: float
    epochs: int
    epoch_time_s: float
    epoch_energy_j: float
    window_s: float
    uplink_s: float
    downlink_s: float

    @property
    def busy_s(self) -> float:
        return self.downlink_s + self.epochs * self.epoch_time_s + self.uplink_s

    @property
    def energy_j(self) -> float:
        return self.epochs * self.epoch_energy_j

    def satisfies(self, energy_budget: float, max_freq: float) -> bool:
        return (self.busy_s <= self.window_s
                and self.energy_j <= energy_budget
                and self.freq_hz <= max_freq)


def epoch_time(data_count: float, cycles_per_sample: float, freq_hz: float) -> float:
    if freq_hz <= 0:
        raise ZeroFrequency(f"computing frequency must be > 0, got {freq_hz}")
    return data_count * cycles_per_sample / freq_hz


def epoch_energy(chip_const: float, freq_hz: float, cycles_per_sample: float,
                 data_count: float) -> float:
    return chip_const * freq_hz ** 2 * cycles_per_sample * data_count


def optimal_frequency(energy_budget: float, chip_const: float, window_s: float,
                      uplink_s: float, downlink_s: float, max_freq: float) -> float:
    """Frequency maximising the attainable epoch count, capped at `max_freq`."""
    effective = window_s - uplink_s - downlink_s
    if effective <= 0:
        raise WindowTooShort(
            f"window {window_s:.6g}s leaves no compute time after transfers "
            f"({downlink_s:.6g}s down, {uplink_s:.6g}s up)")
    return min(max_freq, (energy_budget / (chip_const * effective)) ** (1.0 / 3.0))


def epoch_count(energy_budget: float, chip_const: float, freq_hz: float,
                cycles_per_sample: float, data_count: int, effective_window_s: float) -> int:
    """Largest K with K*t_s <= T_eff and K*E_s <= E^m."""
    if data_count == 0:
        raise NoData("satellite holds no training samples")
    if freq_hz <= 0:
        raise ZeroFrequency(f"computing frequency must be > 0, got {freq_hz}")
    if energy_budget <= 0 or effective_window_s <= 0:
        return 0
    e_s = epoch_energy(chip_const, freq_hz, cycles_per_sample, data_count)
    t_s = epoch_time(data_count, cycles_per_sample, freq_hz)
    k = min(math.floor(energy_budget / e_s), math.floor(effective_window_s / t_s))
    # floor of a rounded quotient can overshoot by one
    while k > 0 and (k * e_s > energy_budget or k * t_s > effective_window_s):
        k -= 1
    return max(k, 0)


def plan_compute(energy_budget: float, chip_const: float, max_freq: float,
                 data_count: int, window_s: float, uplink_s: float, downlink_s: float,
                 cycles_per_sample: float = DEFAULT_CYCLES_PER_SAMPLE) -> ComputePlan:
    """Closed-form frequency followed by the feasible epoch count.

    A window too short for the transfers, an empty budget, or no data all
    produce a zero-epoch plan rather than an error.
    """
    effective = window_s - uplink_s - downlink_s
    if data_count == 0 or energy_budget <= 0 or effective <= 0:
        return ComputePlan(0.0, 0, 0.0, 0.0, window_s, uplink_s, downlink_s)
    freq = optimal_frequency(energy_budget, chip_const, window_s, uplink_s, downlink_s, max_freq)
    k = epoch_count(energy_budget, chip_const, freq, cycles_per_sample, data_count, effective)
    # the busy time is summed in a different order than the per-term check
    t_s = epoch_time(data_count, cycles_per_sample, freq)
    while k > 0 and downlink_s + k * t_s + uplink_s > window_s:
        k -= 1
    return ComputePlan(
        freq_hz=freq,
        epochs=k,
        epoch_time_s=t_s,
        epoch_energy_j=epoch_energy(chip_const, freq, cycles_per_sample, data_count),
        window_s=window_s,
        uplink_s=uplink_s,
        downlink_s=downlink_s,
    )
