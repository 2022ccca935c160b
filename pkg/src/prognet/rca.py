"""Revealed comparative advantage, its binarization, and specialization labels."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import RangeOutsidePanel, YearNotInPanel
from .ingest import Layer, Panel, SectorRef

DEFAULT_EARLY = (2010, 2014)
DEFAULT_LATE = (2017, 2019)


def balassa(values: np.ndarray, min_total: float = 0.0) -> np.ndarray:
    """Balassa index of a countries x items block.

    Cells whose country total or item world total is zero get 0, as do
    countries whose total is below ``min_total``.
    """
    e = np.asarray(values, dtype=float)
    country_tot = e.sum(axis=1)
    item_tot = e.sum(axis=0)
    world = e.sum()
    rca = np.zeros_like(e)
    rows = (country_tot > 0) & (country_tot >= min_total)
    cols = item_tot > 0
    if world > 0 and rows.any() and cols.any():
        block = e[np.ix_(rows, cols)]
        rca[np.ix_(rows, cols)] = (block / country_tot[rows, None]) / (item_tot[None, cols] / world)
    return rca


@dataclass(frozen=True, eq=False)
class SpecMatrix:
    """One year's RCA matrix and its binary specialization matrix ``m``."""

    year: int
    countries: tuple[str, ...]
    sectors: tuple[SectorRef, ...]
    rca: np.ndarray
    m: np.ndarray
    layer_blocks: dict

    @property
    def diversification(self) -> np.ndarray:
        return self.m.sum(axis=1)

    @property
    def ubiquity(self) -> np.ndarray:
        return self.m.sum(axis=0)

    def columns(self, sectors: Sequence[SectorRef]) -> np.ndarray:
        idx = {s: i for i, s in enumerate(self.sectors)}
        return np.array([idx[s] for s in sectors], dtype=int)


def binarize(rca: np.ndarray) -> np.ndarray:
    return (np.asarray(rca) > 1.0).astype(np.int8)


def compute_rca(panel: Panel, year: int, min_layer_total: float = 0.0) -> SpecMatrix:
    """RCA of every country in every sector for one year, layer by layer."""
    if int(year) not in panel.years:
        raise YearNotInPanel(f"year {year} not in panel ({panel.years[0]}-{panel.years[-1]})")
    e = panel.at_year(year)
    rca = np.zeros(e.shape)
    blocks = {}
    for layer in panel.layers:
        sl = panel.layer_slice(layer)
        blocks[layer] = sl
        rca[:, sl] = balassa(e[:, sl], min_layer_total)
    rca.flags.writeable = False
    m = binarize(rca)
    m.flags.writeable = False
    return SpecMatrix(int(year), panel.countries, panel.sectors, rca, m, blocks)


def world_shares(panel: Panel, year: int, layer: Layer) -> np.ndarray:
    """Each sector's share of the layer's world total."""
    e = panel.at_year(year)[:, panel.layer_slice(layer)]
    tot = e.sum()
    return e.sum(axis=0) / tot if tot > 0 else np.zeros(e.shape[1])


class Label(str, enum.Enum):
    CLASSIC = "Classic"
    ABSENT = "Absent"
    DISAPPEARING = "Disappearing"
    EMERGING = "Emerging"


_LABELS = {
    (True, True): Label.CLASSIC,
    (False, False): Label.ABSENT,
    (True, False): Label.DISAPPEARING,
    (False, True): Label.EMERGING,
}


def classify(early_avg: float, late_avg: float) -> Label:
    return _LABELS[(bool(early_avg > 1.0), bool(late_avg > 1.0))]


@dataclass(frozen=True)
class SpecLabel:
    country: str
    sector: SectorRef
    label: Label
    early_avg_rca: float
    late_avg_rca: float


def _years_in(panel: Panel, span: tuple[int, int]) -> list[int]:
    lo, hi = int(span[0]), int(span[1])
    years = list(range(lo, hi + 1))
    if lo > hi or any(y not in panel.years for y in years):
        raise RangeOutsidePanel(
            f"sub-period {lo}-{hi} not covered by panel years {panel.years[0]}-{panel.years[-1]}"
        )
    return years


def average_rca(panel: Panel, span: tuple[int, int], min_layer_total: float = 0.0) -> np.ndarray:
    """Mean of the yearly RCA matrices over an inclusive year range."""
    years = _years_in(panel, span)
    return np.mean([compute_rca(panel, y, min_layer_total).rca for y in years], axis=0)


def label_specializations(panel: Panel, early: tuple[int, int] = DEFAULT_EARLY,
                          late: tuple[int, int] = DEFAULT_LATE,
                          min_layer_total: float = 0.0) -> list[SpecLabel]:
    early_avg = average_rca(panel, early, min_layer_total)
    late_avg = average_rca(panel, late, min_layer_total)
    return [
        SpecLabel(c, s, classify(early_avg[i, j], late_avg[i, j]),
                  float(early_avg[i, j]), float(late_avg[i, j]))
        for i, c in enumerate(panel.countries)
        for j, s in enumerate(panel.sectors)
    ]
