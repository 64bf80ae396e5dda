"""Weighted model merging at the gateways and at the cloud.

A gateway merges the models returned by its satellites with weights that
blend a data-times-epochs share with a loss share::

    w_s = beta * D_s K_s^kappa / sum(D K^kappa)
          + (1 - beta) / (U - 1) * (sum(L) - L_s) / sum(L)

The cloud weights each gateway by its summed D K^kappa mass.  FedAvg,
FedAvep, FedLol and FedIndi are the benchmark weightings.
"""
from __future__ import annotations

import enum
import hashlib
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (AllZeroMass, EmptyReportSet, LayoutMismatch, UnnormalizedWeights,
                     ZeroTotalLoss)

WEIGHT_SUM_TOL = 1e-9


class Scheme(str, enum.Enum):
    FEDAVG = "fedavg"
    FEDAVEP = "fedavep"
    FEDINDI = "fedindi"
    FEDLOL = "fedlol"
    FEDSEL = "fedsel"

    @classmethod
    def parse(cls, name: "str | Scheme") -> "Scheme":
        if isinstance(name, cls):
            return name
        try:
            return cls(name.lower())
        except ValueError:
            raise ValueError(f"unknown aggregation scheme {name!r}; "
                             f"choose from {[s.value for s in cls]}") from None

    @property
    def label(self) -> str:
        return {"fedavg": "FedAvg", "fedavep": "FedAvep", "fedindi": "FedIndi",
                "fedlol": "FedLol", "fedsel": "FedSEL"}[self.value]


@dataclass(frozen=True)
class ParamVector:
    values: np.ndarray
    layout_tag: str

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 1:
            raise ValueError("ParamVector values must be a flat vector")
        if not np.all(np.isfinite(values)):
            raise ValueError("ParamVector contains non-finite entries")
        object.__setattr__(self, "values", values)

    def __len__(self):
        return self.values.size

    @property
    def n_bits(self) -> int:
        """Serialized size, float32 per parameter."""
        return 32 * self.values.size

    def digest(self) -> str:
        return hashlib.sha256(self.values.tobytes()).hexdigest()

    def copy(self) -> "ParamVector":
        return ParamVector(self.values.copy(), self.layout_tag)


@dataclass(frozen=True)
class ClientReport:
    params: ParamVector
    data_count: int
    epochs: int
    loss: float
    satellite_id: int | None = None

    def __post_init__(self):
        if self.loss < 0 or not math.isfinite(self.loss):
            raise ValueError(f"loss must be finite and >= 0, got {self.loss}")
        if self.epochs < 0:
            raise ValueError(f"epochs must be >= 0, got {self.epochs}")


@dataclass(frozen=True)
class AggregatorConfig:
    scheme: Scheme = Scheme.FEDSEL
    beta: float = 0.5
    kappa: float = 0.5

    def __post_init__(self):
        object.__setattr__(self, "scheme", Scheme.parse(self.scheme))
        if not 0.0 <= self.beta <= 1.0:
            raise ValueError(f"beta must lie in [0, 1], got {self.beta}")
        if self.kappa < 0:
            raise ValueError(f"kappa must be >= 0, got {self.kappa}")

    @property
    def effective_beta(self) -> float:
        return {Scheme.FEDAVEP: 1.0, Scheme.FEDLOL: 0.0}.get(self.scheme, self.beta)

    @property
    def cloud_kappa(self) -> float:
        """Epoch exponent used for the cloud weights; FedAvg weighs by samples only."""
        return 0.0 if self.scheme is Scheme.FEDAVG else self.kappa


def _mass(reports: Sequence[ClientReport], kappa: float, relative: bool = False) -> np.ndarray:
    d = np.array([r.data_count for r in reports], dtype=np.float64)
    k = np.array([r.epochs for r in reports], dtype=np.float64) ** kappa
    if relative and k.max() > 0:
        # cancels in the share and makes equal epoch counts multiply by exactly 1.0
        k = k / k.max()
    return d * k


def mass_term(reports: Sequence[ClientReport], kappa: float) -> np.ndarray:
    """D_s K_s^kappa / sum D K^kappa."""
    m = _mass(reports, kappa, relative=True)
    total = m.sum()
    if total <= 0:
        raise AllZeroMass("every report has zero data-epoch mass")
    return m / total


def loss_term(reports: Sequence[ClientReport]) -> np.ndarray:
    """(sum L - L_s) / ((U - 1) sum L); sums to one for U >= 2."""
    u = len(reports)
    losses = np.array([r.loss for r in reports], dtype=np.float64)
    total = math.fsum(losses)
    if total <= 0:
        raise ZeroTotalLoss("loss-weighted aggregation needs a positive total loss")
    return (total - losses) / ((u - 1) * total)


def subregion_weights(reports: Sequence[ClientReport], cfg: AggregatorConfig) -> np.ndarray:
    """Gateway-level weights for `reports` under `cfg.scheme`.

    A single report always gets weight 1 (the model passes through).

    Raises:
        EmptyReportSet: no reports.
        ZeroTotalLoss: a loss-dependent scheme with all losses zero.
        AllZeroMass: every report has zero data-epoch mass.
    """
    if not reports:
        raise EmptyReportSet("no client reports to weigh")
    if len(reports) == 1:
        return np.ones(1)

    scheme = cfg.scheme
    if scheme is Scheme.FEDAVG:
        return mass_term(reports, 0.0)
    if scheme is Scheme.FEDINDI:
        d = mass_term(reports, 0.0)
        k = np.array([r.epochs for r in reports], dtype=np.float64) ** cfg.kappa
        if k.sum() <= 0:
            raise AllZeroMass("every report ran zero epochs")
        prod = d * (k / k.sum()) * loss_term(reports)
        if prod.sum() <= 0:
            raise AllZeroMass("independent factors multiply to zero for every report")
        return prod / prod.sum()

    beta = cfg.effective_beta
    w = np.zeros(len(reports))
    if beta > 0:
        w += beta * mass_term(reports, cfg.kappa)
    if beta < 1:
        w += (1.0 - beta) * loss_term(reports)
    return w


def global_weights(per_gateway_reports: Sequence[Sequence[ClientReport]], kappa: float) -> np.ndarray:
    """Cloud weights: each gateway's share of the total D K^kappa mass."""
    masses = np.array([_mass(reps, kappa).sum() if reps else 0.0
                       for reps in per_gateway_reports])
    total = masses.sum()
    if total <= 0:
        raise AllZeroMass("no gateway contributed any data-epoch mass")
    return masses / total


def merge_vectors(vectors: Sequence[ParamVector], weights) -> ParamVector:
    weights = np.asarray(weights, dtype=np.float64)
    if len(vectors) == 0:
        raise EmptyReportSet("nothing to merge")
    if weights.shape != (len(vectors),):
        raise UnnormalizedWeights(f"{weights.size} weights for {len(vectors)} models")
    if abs(math.fsum(weights) - 1.0) > WEIGHT_SUM_TOL:
        raise UnnormalizedWeights(f"weights sum to {math.fsum(weights)!r}, not 1")
    tag = vectors[0].layout_tag
    if any(v.layout_tag != tag for v in vectors):
        raise LayoutMismatch("models with different layouts cannot be merged")
    # fixed-order accumulation keeps merges bit-stable
    out = np.zeros_like(vectors[0].values)
    for w, v in zip(weights, vectors):
        out += w * v.values
    return ParamVector(out, tag)


def merge(reports: Sequence[ClientReport], weights) -> ParamVector:
    return merge_vectors([r.params for r in reports], weights)


def global_merge(gateway_models: Sequence[ParamVector], weights) -> ParamVector:
    return merge_vectors(gateway_models, weights)
