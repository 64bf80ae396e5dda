"""Scenario definition and its JSON representation.

Field names in the JSON document carry their units (``coverage_radius_km``,
``energy_mean_j`` ...).  Everything not given falls back to the defaults
below, which describe the three-gateway, three-orbit, ten-satellite layout.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, replace
from importlib import resources
from pathlib import Path

from ..aggregation import AggregatorConfig, Scheme
from ..association import ASSOCIATION_MODES
from ..learner import AutoencoderSpec, TrainConfig
from ..linkmodel import LinkParams
from ..orbital import (GatewayConfig, GroundPoint, OrbitTrack, SatelliteState,
                       evenly_spaced_phases)
from ..resource import DEFAULT_CHIP_CONST, DEFAULT_CYCLES_PER_SAMPLE

KMPH_TO_KMPS = 1.0 / 3600.0


@dataclass(frozen=True)
class OrbitSpec:
    radius_km: float
    n_satellites: int
    center: GroundPoint = GroundPoint(1500.0, 2000.0 / 3.0, 0.0)
    altitude_km: float = 500.0
    direction: int = 1
    phase_offset_rad: float = 0.0


@dataclass(frozen=True)
class DataConfig:
    n_train: int = 2000
    n_eval: int = 256
    tile_side: int = 8
    dirichlet_lambda: float = 0.1
    min_samples_per_satellite: int = 10
    partition_groups: int = 10
    corpus_dir: str | None = None


@dataclass(frozen=True)
class Scenario:
    gateways: tuple[GatewayConfig, ...]
    orbits: tuple[OrbitSpec, ...]
    speed_kmph: float = 28_000.0
    max_freq_hz: float = 1e9
    chip_const: float = DEFAULT_CHIP_CONST
    cycles_per_sample: float = DEFAULT_CYCLES_PER_SAMPLE
    link: LinkParams = LinkParams()
    global_rounds: int = 60
    subregion_rounds: int = 1
    aggregator: AggregatorConfig = AggregatorConfig()
    association_mode: str = "proposed"
    model: AutoencoderSpec = AutoencoderSpec()
    train: TrainConfig = TrainConfig()
    data: DataConfig = DataConfig()
    energy_mean_j: float = 100e3
    energy_std_j: float = 20e3
    energy_floor_j: float = 1e3
    eval_snrs_db: tuple[float, ...] = (1.0, 3.0, 5.0, 7.0, 9.0, 11.0)
    idle_step_s: float = 60.0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "gateways", tuple(self.gateways))
        object.__setattr__(self, "orbits", tuple(self.orbits))
        object.__setattr__(self, "eval_snrs_db", tuple(float(s) for s in self.eval_snrs_db))
        if self.global_rounds < 1 or self.subregion_rounds < 1:
            raise ValueError("global_rounds and subregion_rounds must be >= 1")
        if self.energy_std_j < 0:
            raise ValueError("energy_std_j must be >= 0")
        if self.association_mode not in ASSOCIATION_MODES:
            raise ValueError(f"association_mode must be one of {sorted(ASSOCIATION_MODES)}")
        if len({g.id for g in self.gateways}) != len(self.gateways):
            raise ValueError("gateway ids must be unique")

    @property
    def n_satellites(self) -> int:
        return sum(o.n_satellites for o in self.orbits)

    def satellites(self) -> list[SatelliteState]:
        """Initial satellite states, ids numbered orbit by orbit."""
        speed = self.speed_kmph * KMPH_TO_KMPS
        sats = []
        for orbit in self.orbits:
            track = OrbitTrack.from_speed(orbit.center, orbit.radius_km, orbit.altitude_km, speed)
            for phase in evenly_spaced_phases(orbit.n_satellites, orbit.phase_offset_rad):
                sats.append(SatelliteState(
                    id=len(sats), track=track, phase=phase, direction=orbit.direction,
                    max_freq=self.max_freq_hz, chip_const=self.chip_const))
        return sats

    def with_overrides(self, **kw) -> "Scenario":
        """Copy with top-level fields replaced; None values are ignored."""
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


def reference_gateways() -> tuple[GatewayConfig, ...]:
    coords = [(0.0, 0.0), (3000.0, 0.0), (1500.0, 2000.0)]
    return tuple(GatewayConfig(id=i, position=GroundPoint(x, y, 0.0), coverage_radius=2200.0,
                               n_antennas_x=8, n_antennas_y=8, n_beams=8)
                 for i, (x, y) in enumerate(coords))


def reference_orbits(split: tuple[int, int, int] = (3, 3, 4)) -> tuple[OrbitSpec, ...]:
    return tuple(OrbitSpec(radius_km=r, n_satellites=n)
                 for r, n in zip((1200.0, 1700.0, 2200.0), split))


def default_scenario(**overrides) -> Scenario:
    """Three gateways, three concentric orbits, ten satellites."""
    fields = {"gateways": reference_gateways(), "orbits": reference_orbits(), **overrides}
    return Scenario(**fields)


# --- JSON --------------------------------------------------------------------

def _gateway_from_json(d: dict) -> GatewayConfig:
    return GatewayConfig(
        id=int(d["id"]),
        position=GroundPoint(float(d["x_km"]), float(d["y_km"]), float(d.get("z_km", 0.0))),
        coverage_radius=float(d.get("coverage_radius_km", 2200.0)),
        n_antennas_x=int(d.get("n_antennas_x", 1)),
        n_antennas_y=int(d.get("n_antennas_y", 1)),
        n_beams=int(d.get("n_beams", 1)),
        noise_power=float(d.get("noise_power_w", 4.0e-12)),
        antenna_gain_dbi=float(d.get("antenna_gain_dbi", 45.0)),
    )


def _orbit_from_json(d: dict) -> OrbitSpec:
    return OrbitSpec(
        radius_km=float(d["radius_km"]),
        n_satellites=int(d["n_satellites"]),
        center=GroundPoint(float(d.get("center_x_km", 1500.0)),
                           float(d.get("center_y_km", 2000.0 / 3.0)), 0.0),
        altitude_km=float(d.get("altitude_km", 500.0)),
        direction=int(d.get("direction", 1)),
        phase_offset_rad=float(d.get("phase_offset_rad", 0.0)),
    )


def scenario_from_dict(doc: dict) -> Scenario:
    base = default_scenario()
    sat = doc.get("satellite", {})
    link = doc.get("link", {})
    energy = doc.get("energy", {})
    agg = doc.get("aggregator", {})
    model = doc.get("model", {})
    train = doc.get("train", {})
    data = doc.get("data", {})
    return Scenario(
        gateways=tuple(_gateway_from_json(g) for g in doc["gateways"]) if "gateways" in doc
        else base.gateways,
        orbits=tuple(_orbit_from_json(o) for o in doc["orbits"]) if "orbits" in doc
        else base.orbits,
        speed_kmph=float(doc.get("speed_kmph", base.speed_kmph)),
        max_freq_hz=float(sat.get("max_freq_hz", base.max_freq_hz)),
        chip_const=float(sat.get("chip_const", base.chip_const)),
        cycles_per_sample=float(sat.get("cycles_per_sample", base.cycles_per_sample)),
        link=LinkParams(
            sat_gain_dbi=float(sat.get("antenna_gain_dbi", base.link.sat_gain_dbi)),
            tx_power_w=float(sat.get("tx_power_w", base.link.tx_power_w)),
            pathloss_db=float(link.get("pathloss_db", base.link.pathloss_db)),
            carrier_hz=float(link.get("carrier_hz", base.link.carrier_hz)),
            bandwidth_hz=float(link.get("bandwidth_hz", base.link.bandwidth_hz)),
            doppler_hz=float(link.get("doppler_hz", base.link.doppler_hz)),
        ),
        global_rounds=int(doc.get("global_rounds", base.global_rounds)),
        subregion_rounds=int(doc.get("subregion_rounds", base.subregion_rounds)),
        aggregator=AggregatorConfig(
            scheme=Scheme.parse(agg.get("scheme", base.aggregator.scheme)),
            beta=float(agg.get("beta", base.aggregator.beta)),
            kappa=float(agg.get("kappa", base.aggregator.kappa)),
        ),
        association_mode=doc.get("association_mode", base.association_mode),
        model=AutoencoderSpec(
            input_dim=int(model.get("input_dim", base.model.input_dim)),
            latent_dim=int(model.get("latent_dim", base.model.latent_dim)),
            hidden_dims=tuple(model.get("hidden_dims", base.model.hidden_dims)),
            activation=model.get("activation", base.model.activation),
        ),
        train=TrainConfig(
            learning_rate=float(train.get("learning_rate", base.train.learning_rate)),
            batch_size=int(train.get("batch_size", base.train.batch_size)),
            snr_db=float(train.get("snr_db", base.train.snr_db)),
            seed=int(train.get("seed", base.train.seed)),
        ),
        data=DataConfig(
            n_train=int(data.get("n_train", base.data.n_train)),
            n_eval=int(data.get("n_eval", base.data.n_eval)),
            tile_side=int(data.get("tile_side", base.data.tile_side)),
            dirichlet_lambda=float(data.get("dirichlet_lambda", base.data.dirichlet_lambda)),
            min_samples_per_satellite=int(data.get("min_samples_per_satellite",
                                                   base.data.min_samples_per_satellite)),
            partition_groups=int(data.get("partition_groups", base.data.partition_groups)),
            corpus_dir=data.get("corpus_dir", base.data.corpus_dir),
        ),
        energy_mean_j=float(energy.get("mean_j", base.energy_mean_j)),
        energy_std_j=float(energy.get("std_j", base.energy_std_j)),
        energy_floor_j=float(energy.get("floor_j", base.energy_floor_j)),
        eval_snrs_db=tuple(doc.get("eval_snrs_db", base.eval_snrs_db)),
        idle_step_s=float(doc.get("idle_step_s", base.idle_step_s)),
        seed=int(doc.get("seed", base.seed)),
    )


def scenario_to_dict(sc: Scenario) -> dict:
    return {
        "seed": sc.seed,
        "global_rounds": sc.global_rounds,
        "subregion_rounds": sc.subregion_rounds,
        "association_mode": sc.association_mode,
        "speed_kmph": sc.speed_kmph,
        "gateways": [
            {"id": g.id, "x_km": g.position.x, "y_km": g.position.y, "z_km": g.position.z,
             "coverage_radius_km": g.coverage_radius, "n_antennas_x": g.n_antennas_x,
             "n_antennas_y": g.n_antennas_y, "n_beams": g.n_beams,
             "noise_power_w": g.noise_power, "antenna_gain_dbi": g.antenna_gain_dbi}
            for g in sc.gateways],
        "orbits": [
            {"radius_km": o.radius_km, "n_satellites": o.n_satellites,
             "center_x_km": o.center.x, "center_y_km": o.center.y,
             "altitude_km": o.altitude_km, "direction": o.direction,
             "phase_offset_rad": o.phase_offset_rad}
            for o in sc.orbits],
        "satellite": {"max_freq_hz": sc.max_freq_hz, "chip_const": sc.chip_const,
                      "cycles_per_sample": sc.cycles_per_sample,
                      "antenna_gain_dbi": sc.link.sat_gain_dbi, "tx_power_w": sc.link.tx_power_w},
        "link": {"pathloss_db": sc.link.pathloss_db, "carrier_hz": sc.link.carrier_hz,
                 "bandwidth_hz": sc.link.bandwidth_hz, "doppler_hz": sc.link.doppler_hz},
        "energy": {"mean_j": sc.energy_mean_j, "std_j": sc.energy_std_j,
                   "floor_j": sc.energy_floor_j},
        "aggregator": {"scheme": sc.aggregator.scheme.value, "beta": sc.aggregator.beta,
                       "kappa": sc.aggregator.kappa},
        "model": {"input_dim": sc.model.input_dim, "latent_dim": sc.model.latent_dim,
                  "hidden_dims": list(sc.model.hidden_dims), "activation": sc.model.activation},
        "train": asdict(sc.train),
        "data": asdict(sc.data),
        "eval_snrs_db": list(sc.eval_snrs_db),
        "idle_step_s": sc.idle_step_s,
    }


def load_scenario(path: str | Path) -> Scenario:
    with open(path, encoding="utf-8") as fh:
        return scenario_from_dict(json.load(fh))


def save_scenario(sc: Scenario, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(scenario_to_dict(sc), fh, indent=2)
        fh.write("\n")


def bundled_scenario(name: str = "three_gateways") -> Scenario:
    """Load one of the scenario files shipped with the package."""
    text = resources.files("leohfl.scenarios").joinpath(f"{name}.json").read_text("utf-8")
    return scenario_from_dict(json.loads(text))
