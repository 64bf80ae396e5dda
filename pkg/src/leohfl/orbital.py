"""Constellation geometry on a flat ground plane.

Satellites fly circular tracks at a fixed altitude above the z = 0 plane.
Coverage is decided on the ground projection: a satellite is covered by a
gateway when the planar (x, y) distance is within the coverage radius,
boundary included.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import NotInCoverage

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class GroundPoint:
    x: float
    y: float
    z: float = 0.0

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.x, self.y, self.z)):
            raise ValueError(f"non-finite coordinates: {self}")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def planar_distance(self, other: "GroundPoint") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)

    def distance(self, other: "GroundPoint") -> float:
        return math.dist((self.x, self.y, self.z), (other.x, other.y, other.z))


@dataclass(frozen=True)
class OrbitTrack:
    """Circular track; `center` is the ground-plane projection of its centre."""
    center: GroundPoint
    radius: float           # km
    altitude: float         # km
    angular_speed: float    # rad/s

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError(f"radius must be > 0, got {self.radius}")
        if self.altitude < 0:
            raise ValueError(f"altitude must be >= 0, got {self.altitude}")
        if self.angular_speed <= 0:
            raise ValueError(f"angular_speed must be > 0, got {self.angular_speed}")

    @classmethod
    def from_speed(cls, center: GroundPoint, radius: float, altitude: float,
                   speed_kmps: float) -> "OrbitTrack":
        return cls(center, radius, altitude, speed_kmps / radius)

    @property
    def speed(self) -> float:
        """Linear speed in km/s."""
        return self.angular_speed * self.radius

    @property
    def period(self) -> float:
        return TWO_PI / self.angular_speed


@dataclass(frozen=True)
class SatelliteState:
    id: int
    track: OrbitTrack
    phase: float = 0.0
    direction: int = 1
    data_count: int = 0
    energy_budget: float = 0.0   # J
    max_freq: float = 1e9        # Hz
    chip_const: float = 5e-24

    def __post_init__(self):
        if self.direction not in (1, -1):
            raise ValueError(f"direction must be +1 or -1, got {self.direction}")
        if self.data_count < 0 or self.energy_budget < 0:
            raise ValueError("data_count and energy_budget must be non-negative")
        if self.max_freq <= 0 or self.chip_const <= 0:
            raise ValueError("max_freq and chip_const must be positive")
        object.__setattr__(self, "phase", self.phase % TWO_PI)

    def advanced(self, dt: float) -> "SatelliteState":
        """State after flying for `dt` seconds."""
        return replace(self, phase=phase_at(self, dt))


@dataclass(frozen=True)
class GatewayConfig:
    id: int
    position: GroundPoint
    coverage_radius: float = 2200.0   # km
    n_antennas_x: int = 1
    n_antennas_y: int = 1
    n_beams: int = 1
    noise_power: float = 4.0e-12      # W
    antenna_gain_dbi: float = 45.0

    def __post_init__(self):
        if self.coverage_radius <= 0:
            raise ValueError("coverage_radius must be > 0")
        if self.n_antennas_x < 1 or self.n_antennas_y < 1 or self.n_beams < 1:
            raise ValueError("antenna and beam counts must be >= 1")
        if self.noise_power <= 0:
            raise ValueError("noise_power must be > 0")

    @property
    def n_antennas(self) -> int:
        return self.n_antennas_x * self.n_antennas_y


def phase_at(sat: SatelliteState, t: float) -> float:
    return (sat.phase + sat.direction * sat.track.angular_speed * t) % TWO_PI


def position_at(sat: SatelliteState, t: float = 0.0) -> GroundPoint:
    """Position of `sat` after `t` seconds of flight."""
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    theta = phase_at(sat, t)
    c = sat.track.center
    r = sat.track.radius
    return GroundPoint(c.x + r * math.cos(theta), c.y + r * math.sin(theta),
                       c.z + sat.track.altitude)


def in_coverage(sat_pos: GroundPoint, gw: GatewayConfig) -> bool:
    return sat_pos.planar_distance(gw.position) <= gw.coverage_radius


def covering_gateways(sat: SatelliteState, gws) -> list[GatewayConfig]:
    pos = position_at(sat)
    return [gw for gw in gws if in_coverage(pos, gw)]


def window_time(sat: SatelliteState, gw: GatewayConfig) -> float:
    """Seconds until `sat` leaves the coverage disk of `gw`.

    The track/disk intersection is solved in closed form: a track point at
    angle theta is inside the disk iff cos(theta - psi) <= k, where psi is the
    bearing from the gateway to the track centre.  Tracks that never leave the
    disk get one full orbital period.

    Raises:
        NotInCoverage: if `sat` is not currently covered by `gw`.
    """
    if not in_coverage(position_at(sat), gw):
        raise NotInCoverage(f"satellite {sat.id} is outside gateway {gw.id}")
    track = sat.track
    qx = track.center.x - gw.position.x
    qy = track.center.y - gw.position.y
    q = math.hypot(qx, qy)
    r, R = track.radius, gw.coverage_radius
    if q == 0.0 or (R * R - q * q - r * r) / (2.0 * r * q) >= 1.0:
        return track.period
    k = (R * R - q * q - r * r) / (2.0 * r * q)
    # k < -1 would mean the track never enters the disk; excluded by the
    # coverage precondition up to rounding
    a = math.acos(max(k, -1.0))
    alpha = (sat.phase - math.atan2(qy, qx)) % TWO_PI
    if sat.direction > 0:
        remaining = TWO_PI - a - alpha
    else:
        remaining = alpha - a
    return max(remaining, 0.0) / track.angular_speed


def evenly_spaced_phases(n: int, offset: float = 0.0) -> list[float]:
    return [(offset + TWO_PI * i / n) % TWO_PI for i in range(n)]
