"""Satellite-to-gateway association followed by compute allocation.

`associate` sends each covered satellite to the gateway it will stay with the
longest; `nearest_associate` is the distance-based benchmark.  Both then size
each satellite's frequency and epoch count for the chosen link.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

from . import linkmodel
from .linkmodel import LinkParams
from .orbital import (GatewayConfig, SatelliteState, covering_gateways, position_at,
                      window_time)
from .resource import DEFAULT_CYCLES_PER_SAMPLE, ComputePlan, plan_compute


@dataclass
class AssociationPlan:
    assignments: dict[int, int | None]
    plans: dict[int, ComputePlan] = field(default_factory=dict)

    def members(self, gateway_id: int) -> list[int]:
        return sorted(s for s, g in self.assignments.items() if g == gateway_id)

    def participants(self) -> list[int]:
        """Satellites that will actually train (assigned, at least one epoch)."""
        return sorted(s for s, p in self.plans.items() if p.epochs > 0)

    def chi(self, gateway_ids: Sequence[int]) -> list[list[int]]:
        """Binary association matrix, rows = satellites (by id), cols = gateways."""
        return [[int(self.assignments[s] == g) for g in gateway_ids]
                for s in sorted(self.assignments)]


def _max_window_choice(sat: SatelliteState, covering: list[GatewayConfig]) -> GatewayConfig:
    # ties go to the lowest gateway id
    return max(sorted(covering, key=lambda g: g.id), key=lambda g: window_time(sat, g))


def _nearest_choice(sat: SatelliteState, covering: list[GatewayConfig]) -> GatewayConfig:
    pos = position_at(sat)
    return min(sorted(covering, key=lambda g: g.id), key=lambda g: pos.distance(g.position))


def _build(sats: Sequence[SatelliteState], gws: Sequence[GatewayConfig],
           choose: Callable[[SatelliteState, list[GatewayConfig]], GatewayConfig],
           model_bits: float, link: LinkParams,
           cycles_per_sample: float) -> AssociationPlan:
    assignments: dict[int, int | None] = {}
    for sat in sats:
        covering = covering_gateways(sat, gws)
        if not covering:
            assignments[sat.id] = None
        elif len(covering) == 1:
            assignments[sat.id] = covering[0].id
        else:
            assignments[sat.id] = choose(sat, covering).id

    gw_by_id = {g.id: g for g in gws}
    positions = {sat.id: position_at(sat) for sat in sats}
    budgets = linkmodel.link_budgets(assignments, positions, gws, model_bits, link)
    plans = {}
    for sat in sats:
        g = assignments[sat.id]
        if g is None:
            continue
        lb = budgets[sat.id]
        plans[sat.id] = plan_compute(
            energy_budget=sat.energy_budget,
            chip_const=sat.chip_const,
            max_freq=sat.max_freq,
            data_count=sat.data_count,
            window_s=window_time(sat, gw_by_id[g]),
            uplink_s=lb.uplink_s,
            downlink_s=lb.downlink_s,
            cycles_per_sample=cycles_per_sample,
        )
    return AssociationPlan(assignments, plans)


def associate(sats: Sequence[SatelliteState], gws: Sequence[GatewayConfig],
              model_bits: float = 0.0, link: LinkParams = LinkParams(),
              cycles_per_sample: float = DEFAULT_CYCLES_PER_SAMPLE) -> AssociationPlan:
    """Longest-transit association and per-satellite compute plans.

    Satellites seen by a single gateway go to it; satellites in an overlap go
    to the gateway whose disk they stay inside the longest; uncovered
    satellites are left unassigned.
    """
    return _build(sats, gws, _max_window_choice, model_bits, link, cycles_per_sample)


def nearest_associate(sats: Sequence[SatelliteState], gws: Sequence[GatewayConfig],
                      model_bits: float = 0.0, link: LinkParams = LinkParams(),
                      cycles_per_sample: float = DEFAULT_CYCLES_PER_SAMPLE) -> AssociationPlan:
    """Benchmark: each covered satellite goes to the closest covering gateway."""
    return _build(sats, gws, _nearest_choice, model_bits, link, cycles_per_sample)


ASSOCIATION_MODES = {"proposed": associate, "nearest": nearest_associate}
