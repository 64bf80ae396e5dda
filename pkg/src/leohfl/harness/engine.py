"""Two-tier training loop: satellites -> gateways -> cloud.

Each global round starts from the cloud model.  Within it, every sub-region
round re-associates the satellites at their current positions, trains each
participant for its planned epoch count on a private copy of its gateway's
model, and merges the returned models at the gateways.  After M sub-region
rounds the cloud merges the gateway models.  The orbital clock advances by
the busiest participant's downlink + training + uplink time.
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from ..aggregation import (AggregatorConfig, ClientReport, ParamVector, Scheme, global_merge,
                           global_weights, merge, subregion_weights)
from ..association import ASSOCIATION_MODES, AssociationPlan
from ..errors import LeoHflError, RoundFailure
from ..learner import (Dataset, batch_ssim, dirichlet_partition, init_params, load_tile_corpus,
                       psnr_from_mse, reconstruct, synthetic_tiles, train_epochs)
from ..orbital import SatelliteState
from .scenario import Scenario

log = logging.getLogger(__name__)

# SeedSequence stream tags
_DATA, _EVAL, _PARTITION, _INIT, _ENERGY, _TRAIN, _EVAL_NOISE = range(7)


@dataclass
class SubroundRecord:
    global_round: int
    subround: int
    clock_s: float
    assignments: dict[int, int | None]
    epochs: dict[int, int]
    window_s: dict[int, float]
    freq_hz: dict[int, float]
    busy_s: dict[int, float]
    energy_j: dict[int, float]
    gateway_weights: dict[int, dict[int, float]]
    gateway_loss: dict[int, float]
    time_violations: int = 0
    energy_violations: int = 0


@dataclass
class RoundMetrics:
    round: int
    subround_index: int
    clock_s: float
    per_gateway_loss: dict[int, float]
    global_psnr_db: dict[float, float]
    global_ssim: dict[float, float]
    weights_used: dict
    epochs_executed: dict[int, int]
    window_s: dict[int, float]
    freq_hz: dict[int, float]
    time_violations: int = 0
    energy_violations: int = 0

    @property
    def mean_loss(self) -> float:
        vals = [v for v in self.per_gateway_loss.values() if not math.isnan(v)]
        return float(np.mean(vals)) if vals else math.nan


@dataclass
class RunResult:
    scenario: Scenario
    metrics: list[RoundMetrics]
    final_params: ParamVector
    subrounds: list[SubroundRecord] = field(default_factory=list)
    label: str = ""

    def final_psnr(self, snr_db: float) -> float:
        return self.metrics[-1].global_psnr_db[float(snr_db)]

    def final_ssim(self, snr_db: float) -> float:
        return self.metrics[-1].global_ssim[float(snr_db)]


def _rng(seed: int, *tags: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, *tags]))


@dataclass
class Workload:
    shards: list[Dataset]
    eval_set: np.ndarray


def build_workload(sc: Scenario) -> Workload:
    d = sc.data
    n_total = d.n_train + d.n_eval
    if d.corpus_dir:
        tiles = load_tile_corpus(d.corpus_dir, d.tile_side)
        if len(tiles) < n_total:
            raise ValueError(f"corpus has {len(tiles)} tiles, scenario needs {n_total}")
        tiles = tiles[_rng(sc.seed, _DATA).permutation(len(tiles))[:n_total]]
        train, eval_set = tiles[:d.n_train], tiles[d.n_train:]
    else:
        train = synthetic_tiles(d.n_train, d.tile_side, _rng(sc.seed, _DATA))
        eval_set = synthetic_tiles(d.n_eval, d.tile_side, _rng(sc.seed, _EVAL))
    if sc.model.input_dim != d.tile_side ** 2:
        raise ValueError("model input_dim must equal tile_side**2")
    shards = dirichlet_partition(Dataset(train), sc.n_satellites, d.dirichlet_lambda,
                                 _rng(sc.seed, _PARTITION), d.min_samples_per_satellite,
                                 d.partition_groups)
    return Workload(shards, eval_set)


def sample_energy(sc: Scenario, global_round: int) -> np.ndarray:
    """Per-satellite budgets for one global round, Normal(mean, std) floored."""
    draws = _rng(sc.seed, _ENERGY, global_round).normal(sc.energy_mean_j, sc.energy_std_j,
                                                         sc.n_satellites)
    return np.maximum(draws, sc.energy_floor_j)


def evaluate(sc: Scenario, params: ParamVector, eval_set: np.ndarray):
    psnr, ssim = {}, {}
    for j, snr in enumerate(sc.eval_snrs_db):
        rec = reconstruct(sc.model, params, eval_set, snr, seed=int(
            _rng(sc.seed, _EVAL_NOISE, j).integers(2 ** 63)))
        psnr[snr] = psnr_from_mse(float(np.mean((rec - eval_set) ** 2)))
        ssim[snr] = batch_ssim(eval_set, rec, sc.data.tile_side)
    return psnr, ssim


def _check_plan(sat: SatelliteState, plan, energy_before: float) -> tuple[int, int]:
    time_bad = int(plan.busy_s > plan.window_s)
    energy_bad = int(plan.energy_j > energy_before)
    return time_bad, energy_bad


def _train_one(sc: Scenario, model: ParamVector, shard: Dataset, k: int,
               global_round: int, subround: int, sat_id: int) -> ClientReport:
    rng = _rng(sc.seed, _TRAIN, global_round, subround, sat_id)
    return train_epochs(sc.model, model, shard, k, sc.train, rng)


class Simulation:
    """Stateful driver around one scenario; `run()` is the usual entry point."""

    def __init__(self, sc: Scenario, workload: Workload | None = None, train: bool = True,
                 max_workers: int | None = None, strict: bool = True):
        self.sc = sc
        self.train = train
        self.strict = strict
        self.max_workers = max_workers
        self.workload = workload if workload is not None else build_workload(sc)
        counts = [len(s) for s in self.workload.shards]
        self.base_sats = [replace(s, data_count=n) for s, n in zip(sc.satellites(), counts)]
        self.assoc_fn = ASSOCIATION_MODES[sc.association_mode]
        self.model_bits = 32 * sc.model.n_params
        self.clock = 0.0
        self.records: list[SubroundRecord] = []

    def _sats_now(self, energy: np.ndarray) -> list[SatelliteState]:
        return [replace(s.advanced(self.clock), energy_budget=float(energy[s.id]))
                for s in self.base_sats]

    def _plan(self, sats) -> AssociationPlan:
        return self.assoc_fn(sats, self.sc.gateways, self.model_bits, self.sc.link,
                             self.sc.cycles_per_sample)

    def subround(self, i: int, m: int, energy_left: np.ndarray,
                 gw_models: dict[int, ParamVector] | None,
                 gw_reports: dict[int, list[ClientReport]]) -> SubroundRecord:
        sc = self.sc
        sats = self._sats_now(energy_left)
        plan = self._plan(sats)
        participants = plan.participants()

        time_bad = energy_bad = 0
        for s in participants:
            tb, eb = _check_plan(sats[s], plan.plans[s], energy_left[s])
            time_bad += tb
            energy_bad += eb
        if self.strict and (time_bad or energy_bad):
            raise RoundFailure(f"round {i}.{m}: {time_bad} time and {energy_bad} energy "
                               "constraint violations in the compute plan")

        gw_weights: dict[int, dict[int, float]] = {}
        gw_loss: dict[int, float] = {}
        if self.train and participants:
            reports = self._train(i, m, plan, participants, gw_models)
            for g in sorted({plan.assignments[s] for s in participants}):
                reps = [reports[s] for s in participants if plan.assignments[s] == g]
                try:
                    w = subregion_weights(reps, sc.aggregator)
                    gw_models[g] = merge(reps, w)
                except LeoHflError as exc:
                    raise RoundFailure(f"round {i}.{m}, gateway {g}: {exc}") from exc
                gw_weights[g] = {r.satellite_id: float(x) for r, x in zip(reps, w)}
                gw_loss[g] = float(np.dot(w, [r.loss for r in reps]))
                gw_reports[g].extend(reps)

        for s in participants:
            energy_left[s] -= plan.plans[s].energy_j

        busy = {s: plan.plans[s].busy_s for s in participants}
        rec = SubroundRecord(
            global_round=i, subround=m, clock_s=self.clock,
            assignments=dict(plan.assignments),
            epochs={s: plan.plans[s].epochs for s in participants},
            window_s={s: plan.plans[s].window_s for s in participants},
            freq_hz={s: plan.plans[s].freq_hz for s in participants},
            busy_s=busy,
            energy_j={s: plan.plans[s].energy_j for s in participants},
            gateway_weights=gw_weights, gateway_loss=gw_loss,
            time_violations=time_bad, energy_violations=energy_bad,
        )
        self.clock += max(busy.values()) if busy else sc.idle_step_s
        self.records.append(rec)
        return rec

    def _train(self, i, m, plan: AssociationPlan, participants, gw_models):
        shards = self.workload.shards

        def job(s):
            try:
                return _train_one(self.sc, gw_models[plan.assignments[s]], shards[s],
                                  plan.plans[s].epochs, i, m, s)
            except LeoHflError as exc:
                raise RoundFailure(f"round {i}.{m}, satellite {s}: {exc}") from exc

        if self.max_workers and self.max_workers > 1:
            with ThreadPoolExecutor(self.max_workers) as pool:
                results = list(pool.map(job, participants))
        else:
            results = [job(s) for s in participants]
        # collected in satellite-id order regardless of completion order
        return dict(zip(participants, results))

    def run(self) -> RunResult:
        sc = self.sc
        params = init_params(sc.model, _rng(sc.seed, _INIT)) if self.train else None
        metrics = []
        for i in range(sc.global_rounds):
            energy_sampled = sample_energy(sc, i)
            energy_left = energy_sampled.copy()
            gw_models = {g.id: params for g in sc.gateways} if self.train else None
            gw_reports: dict[int, list[ClientReport]] = {g.id: [] for g in sc.gateways}
            subs = [self.subround(i, m, energy_left, gw_models, gw_reports)
                    for m in range(sc.subregion_rounds)]
            if np.any(energy_left < -1e-9 * energy_sampled):
                raise RoundFailure(f"round {i}: cumulative energy exceeds the sampled budget")

            cloud_w = {}
            if self.train and any(gw_reports.values()):
                gids = [g.id for g in sc.gateways]
                try:
                    W = global_weights([gw_reports[g] for g in gids], sc.aggregator.cloud_kappa)
                except LeoHflError as exc:
                    raise RoundFailure(f"round {i}, cloud merge: {exc}") from exc
                params = global_merge([gw_models[g] for g in gids], W)
                cloud_w = {g: float(w) for g, w in zip(gids, W)}

            if self.train and sc.eval_snrs_db:
                psnr, ssim = evaluate(sc, params, self.workload.eval_set)
            else:
                psnr, ssim = {}, {}

            epochs: dict[int, int] = {}
            for rec in subs:
                for s, k in rec.epochs.items():
                    epochs[s] = epochs.get(s, 0) + k
            per_gw_loss = {g.id: subs[-1].gateway_loss.get(g.id, math.nan) for g in sc.gateways}
            rm = RoundMetrics(
                round=i + 1,
                subround_index=(i + 1) * sc.subregion_rounds,
                clock_s=self.clock,
                per_gateway_loss=per_gw_loss,
                global_psnr_db=psnr,
                global_ssim=ssim,
                weights_used={"gateway": [r.gateway_weights for r in subs], "cloud": cloud_w},
                epochs_executed=epochs,
                window_s=subs[-1].window_s,
                freq_hz=subs[-1].freq_hz,
                time_violations=sum(r.time_violations for r in subs),
                energy_violations=sum(r.energy_violations for r in subs),
            )
            metrics.append(rm)
            log.info("round %d/%d clock=%.1fs loss=%.5g %s", i + 1, sc.global_rounds,
                     self.clock, rm.mean_loss,
                     " ".join(f"psnr@{k:g}={v:.3f}" for k, v in psnr.items()))
        return RunResult(sc, metrics, params, self.records,
                         label=sc.aggregator.scheme.label)


def run(sc: Scenario, max_workers: int | None = None) -> RunResult:
    """Train the global model over `sc.global_rounds` cloud rounds."""
    return Simulation(sc, max_workers=max_workers).run()


def run_single_gateway(sc: Scenario, max_workers: int | None = None) -> dict[int, RunResult]:
    """Benchmark: each gateway trains alone with FedAvg over the satellites it sees."""
    out = {}
    agg = AggregatorConfig(Scheme.FEDAVG, sc.aggregator.beta, sc.aggregator.kappa)
    workload = build_workload(sc)
    for gw in sc.gateways:
        single = replace(sc, gateways=(gw,), aggregator=agg)
        res = Simulation(single, workload=workload, max_workers=max_workers).run()
        res.label = f"Gateway {gw.id}"
        out[gw.id] = res
    return out


def schedule_only(sc: Scenario, rounds: int | None = None) -> list[SubroundRecord]:
    """Association and compute planning without any training."""
    sim = Simulation(sc if rounds is None else replace(sc, global_rounds=rounds), train=False)
    sim.run()
    return sim.records


@dataclass(frozen=True)
class ScheduleStats:
    mean_window_s: float
    mean_freq_hz: float
    mean_epochs: float
    per_satellite_window_s: dict[int, float]
    per_satellite_freq_hz: dict[int, float]


def schedule_statistics(records: list[SubroundRecord]) -> ScheduleStats:
    """Averages over all (satellite, sub-round) participations, then over satellites."""
    windows: dict[int, list[float]] = {}
    freqs: dict[int, list[float]] = {}
    epochs: list[int] = []
    for rec in records:
        for s, w in rec.window_s.items():
            windows.setdefault(s, []).append(w)
            freqs.setdefault(s, []).append(rec.freq_hz[s])
            epochs.append(rec.epochs[s])
    per_w = {s: float(np.mean(v)) for s, v in sorted(windows.items())}
    per_f = {s: float(np.mean(v)) for s, v in sorted(freqs.items())}
    return ScheduleStats(
        mean_window_s=float(np.mean(list(per_w.values()))) if per_w else math.nan,
        mean_freq_hz=float(np.mean(list(per_f.values()))) if per_f else math.nan,
        mean_epochs=float(np.mean(epochs)) if epochs else math.nan,
        per_satellite_window_s=per_w,
        per_satellite_freq_hz=per_f,
    )
