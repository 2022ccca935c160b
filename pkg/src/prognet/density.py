"""Country densities around target sectors and recommendation tables."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

from ._io import fmt, write_csv
from .errors import UnknownCountry, YearNotInPanel
from .ingest import Layer, Panel, SectorRef
from .network import ProgressionNetwork
from .rca import Label, SpecLabel, SpecMatrix, compute_rca

RELATED_AI_CAP = 5


class Application(str, enum.Enum):
    ENHANCE = "Enhance"
    STRENGTHEN = "Strengthen"
    REGAIN = "Regain"
    DISCOVER = "Discover"


APPLICATION = {
    Label.CLASSIC: Application.ENHANCE,
    Label.EMERGING: Application.STRENGTHEN,
    Label.DISAPPEARING: Application.REGAIN,
    Label.ABSENT: Application.DISCOVER,
}


def active_ai(m_final: SpecMatrix, country: str) -> set[SectorRef]:
    row = m_final.m[m_final.countries.index(country)]
    return {s for s, v in zip(m_final.sectors, row) if v and s.layer == Layer.AI}


def density(active: set[SectorRef], incoming: dict[SectorRef, float]) -> float:
    """Share of the target's incoming AI weight held by active sectors; 0 without support."""
    total = sum(incoming.values())
    if total <= 0:
        return 0.0
    return sum(w for s, w in incoming.items() if s in active) / total


def compute_density(m_final: SpecMatrix, net: ProgressionNetwork, country: str,
                    target: SectorRef) -> float:
    if country not in m_final.countries:
        raise UnknownCountry(f"country {country} not in matrix")
    return density(active_ai(m_final, country), net.incoming(target, Layer.AI))


@dataclass(frozen=True)
class DensityRow:
    target: SectorRef
    density: float
    contributing_ai: tuple[SectorRef, ...]
    status: Label
    application: Application
    no_support: bool

    @property
    def related_ai(self) -> tuple[SectorRef, ...]:
        return self.contributing_ai[:RELATED_AI_CAP]


@dataclass(frozen=True)
class DensityReport:
    country: str
    year: int
    rows: tuple[DensityRow, ...]


def country_report(panel: Panel, net: ProgressionNetwork, labels: Sequence[SpecLabel], country: str,
                   top_k: int | None = 10, min_layer_total: float = 0.0) -> DensityReport:
    """Goods and services targets ranked by density for one country.

    Density uses the country's AI specializations in the panel's last
    year.  ``contributing_ai`` lists the active AI sectors with a
    validated link to the target, strongest link first.
    """
    if country not in panel.countries:
        raise UnknownCountry(f"country {country} not in panel")
    year = panel.years[-1]
    m_final = compute_rca(panel, year, min_layer_total)
    active = active_ai(m_final, country)
    status = {lab.sector: lab.label for lab in labels if lab.country == country}
    rows = []
    for target in panel.sectors:
        if target.layer == Layer.AI:
            continue
        incoming = net.incoming(target, Layer.AI)
        contributing = sorted((s for s in incoming if s in active), key=lambda s: (-incoming[s], s.key))
        st = status.get(target, Label.ABSENT)
        rows.append(DensityRow(target, density(active, incoming), tuple(contributing), st,
                               APPLICATION[st], sum(incoming.values()) <= 0))
    rows.sort(key=lambda r: (-r.density, r.target.key))
    if top_k is not None:
        rows = rows[:top_k]
    return DensityReport(country, year, tuple(rows))


REPORT_HEADER = ["rank", "target_layer", "target", "density", "related_ai", "status",
                 "application", "no_support"]


def report_rows(report: DensityReport) -> list[list[str]]:
    return [[i, r.target.layer.value, r.target.code, fmt(r.density),
             ";".join(s.code for s in r.related_ai), r.status.value, r.application.value,
             "true" if r.no_support else "false"]
            for i, r in enumerate(report.rows, start=1)]


def write_report(report: DensityReport, path) -> None:
    write_csv(path, REPORT_HEADER, report_rows(report))


def top_specializations(panel: Panel, country: str, year: int | None = None,
                        top_k: int | None = 10, min_layer_total: float = 0.0
                        ) -> dict[Layer, list[tuple[SectorRef, float]]]:
    """Per-layer sectors ranked by the country's RCA, ties by code."""
    if country not in panel.countries:
        raise UnknownCountry(f"country {country} not in panel")
    year = panel.years[-1] if year is None else int(year)
    if year not in panel.years:
        raise YearNotInPanel(f"year {year} not in panel")
    spec = compute_rca(panel, year, min_layer_total)
    row = spec.rca[panel.country_index(country)]
    out = {}
    for layer in panel.layers:
        ranked = sorted(((s, float(v)) for s, v in zip(panel.sectors, row) if s.layer == layer),
                        key=lambda sv: (-sv[1], sv[0].code))
        out[layer] = ranked if top_k is None else ranked[:top_k]
    return out


def write_top_specializations(tops: dict, path) -> None:
    write_csv(path, ["layer", "rank", "code", "name", "rca"],
              [[layer.value, i, s.code, s.name, fmt(v)]
               for layer, ranked in tops.items() for i, (s, v) in enumerate(ranked, start=1)])
