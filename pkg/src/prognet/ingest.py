"""Loading, validating and aligning country x sector x year panels.

Panels come in the long CSV layout ``country,sector,year,value``.  Raw
sector labels are mapped through a :class:`Taxonomy` onto canonical
:class:`SectorRef` codes; cells that collapse onto the same code are
summed.  :func:`align` concatenates single-layer panels into the
universal (AI + Goods + Services) panel.
"""

from __future__ import annotations

import csv
import enum
import math
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from ._io import atomic_open
from .errors import (
    EmptyPanel,
    InputIOError,
    LayerConflict,
    MalformedRow,
    NegativeValue,
    NoCommonCountries,
    NoCommonYears,
    TaxonomyError,
    UnknownSector,
)

PANEL_HEADER = ("country", "sector", "year", "value")
TAXONOMY_HEADER = ("layer", "raw_label", "code", "name")

_ISO3 = re.compile(r"^[A-Z]{3}$")


class Layer(str, enum.Enum):
    AI = "AI"
    GOODS = "Goods"
    SERVICES = "Services"

    @classmethod
    def parse(cls, text: str) -> "Layer":
        for layer in cls:
            if text.strip().lower() == layer.value.lower():
                return layer
        raise ValueError(f"unknown layer {text!r}; expected one of AI, Goods, Services")

    @property
    def rank(self) -> int:
        return _LAYER_RANK[self]


_LAYER_RANK = {Layer.AI: 0, Layer.GOODS: 1, Layer.SERVICES: 2}


@dataclass(frozen=True)
class SectorRef:
    """A node of every network: a sector code tagged with its layer.

    Identity is ``(layer, code)``; ``name`` is display only.
    """

    layer: Layer
    code: str
    name: str = field(default="", compare=False)

    def __post_init__(self):
        if not isinstance(self.layer, Layer):
            object.__setattr__(self, "layer", Layer.parse(str(self.layer)))
        if not self.code or any(ch.isspace() for ch in self.code):
            raise ValueError(f"sector code must be non-empty without whitespace: {self.code!r}")
        if not self.name:
            object.__setattr__(self, "name", self.code)

    @property
    def key(self) -> tuple[int, str]:
        return (self.layer.rank, self.code)

    @property
    def id(self) -> str:
        return f"{self.layer.value}:{self.code}"

    def __lt__(self, other: "SectorRef") -> bool:
        return self.key < other.key

    def __str__(self) -> str:
        return self.id


def _norm_label(label: str) -> str:
    return " ".join(label.split()).casefold()


class Taxonomy:
    """Sector universe plus raw-label -> sector lookups, one per layer.

    A canonical code always resolves to itself, so panels written with
    canonical codes load through the same taxonomy.
    """

    def __init__(self, sectors: Iterable[SectorRef], label_map: dict[tuple[Layer, str], SectorRef]):
        self.sectors = tuple(sorted(set(sectors)))
        keys = {s.key for s in self.sectors}
        if len(keys) != len(self.sectors):
            raise TaxonomyError("duplicate (layer, code) pairs in taxonomy")
        self._by_key = {s.key: s for s in self.sectors}
        self._labels: dict[tuple[Layer, str], SectorRef] = {}
        for (layer, label), target in label_map.items():
            if target.key not in self._by_key:
                raise TaxonomyError(f"mapping target {target} is not a declared sector")
            self._labels[(layer, _norm_label(label))] = self._by_key[target.key]
        for s in self.sectors:
            self._labels.setdefault((s.layer, _norm_label(s.code)), s)

    def layer_sectors(self, layer: Layer) -> tuple[SectorRef, ...]:
        return tuple(s for s in self.sectors if s.layer == layer)

    def resolve(self, layer: Layer, raw_label: str) -> SectorRef:
        try:
            return self._labels[(layer, _norm_label(raw_label))]
        except KeyError:
            raise UnknownSector(f"{layer.value} label {raw_label!r} is not in the taxonomy") from None

    def get(self, layer: Layer | str, code: str) -> SectorRef:
        layer = layer if isinstance(layer, Layer) else Layer.parse(layer)
        try:
            return self._by_key[(layer.rank, code)]
        except KeyError:
            raise UnknownSector(f"no sector {layer.value}:{code}") from None

    def _mapping(self, layer: Layer) -> dict[str, str]:
        return {label: s.code for (lay, label), s in self._labels.items() if lay == layer}

    @property
    def ai_subsector_map(self) -> dict[str, str]:
        return self._mapping(Layer.AI)

    @property
    def goods_community_map(self) -> dict[str, str]:
        return self._mapping(Layer.GOODS)

    def merge(self, other: "Taxonomy") -> "Taxonomy":
        labels = {}
        for t in (self, other):
            for k, v in t._labels.items():
                if k in labels and labels[k].key != v.key:
                    raise TaxonomyError(f"label {k[1]!r} maps to both {labels[k]} and {v}")
                labels[k] = v
        sectors = {s.key: s for s in self.sectors}
        for s in other.sectors:
            if s.key in sectors and sectors[s.key].name != s.name:
                raise TaxonomyError(f"sector {s} declared with two names")
            sectors[s.key] = s
        return Taxonomy(sectors.values(), labels)


def _open_csv(path) -> tuple[list[str], list[list[str]]]:
    path = Path(path)
    try:
        with path.open(newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except FileNotFoundError:
        raise InputIOError(f"file not found: {path}") from None
    except OSError as exc:
        raise InputIOError(f"cannot read {path}: {exc}") from None
    rows = [r for r in rows if r and any(cell.strip() for cell in r)]
    if not rows:
        return [], []
    return [h.strip().lower() for h in rows[0]], rows[1:]


def load_taxonomy(path) -> Taxonomy:
    """Read a ``layer,raw_label,code,name`` taxonomy file.

    A raw label that maps to two different codes within a layer is an
    error; so is a code declared with two different names.
    """
    header, rows = _open_csv(path)
    if tuple(header[:4]) != TAXONOMY_HEADER:
        raise TaxonomyError(f"{path}: expected header {','.join(TAXONOMY_HEADER)}")
    names: dict[tuple[Layer, str], str] = {}
    labels: dict[tuple[Layer, str], tuple[Layer, str]] = {}
    for lineno, row in enumerate(rows, start=2):
        if len(row) < 4:
            raise TaxonomyError(f"{path}:{lineno}: expected 4 fields")
        try:
            layer = Layer.parse(row[0])
        except ValueError as exc:
            raise TaxonomyError(f"{path}:{lineno}: {exc}") from None
        raw, code, name = row[1].strip(), row[2].strip(), row[3].strip()
        if not code or any(ch.isspace() for ch in code):
            raise TaxonomyError(f"{path}:{lineno}: invalid code {code!r}")
        if names.setdefault((layer, code), name) != name:
            raise TaxonomyError(f"{path}:{lineno}: code {code} declared with two names")
        if raw:
            key = (layer, _norm_label(raw))
            if labels.setdefault(key, (layer, code)) != (layer, code):
                raise TaxonomyError(
                    f"{path}:{lineno}: label {raw!r} maps to both {labels[key][1]} and {code}"
                )
    sectors = {k: SectorRef(k[0], k[1], n) for k, n in names.items()}
    return Taxonomy(sectors.values(), {k: sectors[v] for k, v in labels.items()})


def default_taxonomy() -> Taxonomy:
    """The curated AI sub-sector aggregation shipped with the package."""
    with resources.as_file(resources.files("prognet") / "data" / "ai_taxonomy.csv") as p:
        return load_taxonomy(p)


@dataclass(frozen=True, eq=False)
class Panel:
    """Dense country x sector x year tensor of non-negative USD values.

    ``present`` marks cells that were actually reported; unreported cells
    hold 0 in ``values``.  Sectors are kept sorted by (layer, code) so
    every layer occupies a contiguous block.
    """

    countries: tuple[str, ...]
    sectors: tuple[SectorRef, ...]
    years: tuple[int, ...]
    values: np.ndarray
    present: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        present = np.array(self.present, dtype=bool)
        shape = (len(self.countries), len(self.sectors), len(self.years))
        if values.shape != shape or present.shape != shape:
            raise ValueError(f"value tensor shape {values.shape} does not match axes {shape}")
        if not np.all(np.isfinite(values)) or np.any(values < 0):
            raise NegativeValue("panel values must be finite and >= 0")
        if list(self.sectors) != sorted(self.sectors):
            raise ValueError("sectors must be sorted by (layer, code)")
        values.flags.writeable = False
        present.flags.writeable = False
        object.__setattr__(self, "countries", tuple(self.countries))
        object.__setattr__(self, "sectors", tuple(self.sectors))
        object.__setattr__(self, "years", tuple(int(y) for y in self.years))
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "present", present)

    def __eq__(self, other):
        if not isinstance(other, Panel):
            return NotImplemented
        return (
            self.countries == other.countries
            and self.sectors == other.sectors
            and [s.name for s in self.sectors] == [s.name for s in other.sectors]
            and self.years == other.years
            and np.array_equal(self.values, other.values)
            and np.array_equal(self.present, other.present)
        )

    __hash__ = None

    @property
    def layers(self) -> tuple[Layer, ...]:
        return tuple(sorted({s.layer for s in self.sectors}, key=lambda l: l.rank))

    def layer_slice(self, layer: Layer) -> slice:
        idx = [i for i, s in enumerate(self.sectors) if s.layer == layer]
        if not idx:
            return slice(0, 0)
        return slice(idx[0], idx[-1] + 1)

    def country_index(self, country: str) -> int:
        return self.countries.index(country)

    def year_index(self, year: int) -> int:
        return self.years.index(int(year))

    def sector_index(self, sector: SectorRef) -> int:
        return self.sectors.index(sector)

    def at_year(self, year: int) -> np.ndarray:
        """Country x sector slice for one year."""
        return self.values[:, :, self.year_index(year)]

    def subset(self, countries: Sequence[str] | None = None,
               years: Sequence[int] | None = None) -> "Panel":
        countries = self.countries if countries is None else tuple(countries)
        years = self.years if years is None else tuple(years)
        ci = [self.country_index(c) for c in countries]
        ti = [self.year_index(y) for y in years]
        return Panel(countries, self.sectors, years,
                     self.values[np.ix_(ci, range(len(self.sectors)), ti)],
                     self.present[np.ix_(ci, range(len(self.sectors)), ti)])


def load_panel(path, layer: Layer | str, taxonomy: Taxonomy) -> Panel:
    """Read one layer's long CSV and aggregate it onto canonical sectors.

    The sector axis is every taxonomy sector of ``layer``; the country and
    year axes are those observed in the file.
    """
    layer = layer if isinstance(layer, Layer) else Layer.parse(layer)
    header, rows = _open_csv(path)
    if not header and not rows:
        raise EmptyPanel(f"{path}: empty file")
    if tuple(header[:4]) != PANEL_HEADER:
        raise MalformedRow(f"{path}: expected header {','.join(PANEL_HEADER)}")
    if not rows:
        raise EmptyPanel(f"{path}: no data rows")
    sectors = taxonomy.layer_sectors(layer)
    if not sectors:
        raise TaxonomyError(f"taxonomy declares no {layer.value} sectors")
    col = {s.key: i for i, s in enumerate(sectors)}

    cells: dict[tuple[str, int, int], float] = {}
    for lineno, row in enumerate(rows, start=2):
        if len(row) < 4:
            raise MalformedRow(f"{path}:{lineno}: expected 4 fields, got {len(row)}")
        country, label, year_s, value_s = (cell.strip() for cell in row[:4])
        if not _ISO3.match(country):
            raise MalformedRow(f"{path}:{lineno}: bad ISO-3 country code {country!r}")
        try:
            year = int(year_s)
        except ValueError:
            raise MalformedRow(f"{path}:{lineno}: bad year {year_s!r}") from None
        try:
            value = float(value_s)
        except ValueError:
            raise MalformedRow(f"{path}:{lineno}: bad value {value_s!r}") from None
        if not math.isfinite(value):
            raise MalformedRow(f"{path}:{lineno}: non-finite value {value_s!r}")
        if value < 0:
            raise NegativeValue(f"{path}:{lineno}: negative value {value_s}")
        sector = taxonomy.resolve(layer, label)
        key = (country, col[sector.key], year)
        cells[key] = cells.get(key, 0.0) + value

    countries = sorted({k[0] for k in cells})
    years = sorted({k[2] for k in cells})
    ci = {c: i for i, c in enumerate(countries)}
    ti = {y: i for i, y in enumerate(years)}
    values = np.zeros((len(countries), len(sectors), len(years)))
    present = np.zeros(values.shape, dtype=bool)
    for (c, x, y), v in cells.items():
        values[ci[c], x, ti[y]] = v
        present[ci[c], x, ti[y]] = True
    return Panel(tuple(countries), sectors, tuple(years), values, present)


def save_panel(panel: Panel, path) -> None:
    """Write a single-layer panel back to the long CSV layout.

    Only reported cells are written, with shortest round-trip float
    formatting, so ``load_panel`` recovers the panel exactly.
    """
    if len(panel.layers) != 1:
        raise ValueError("save_panel writes one layer per file; split the panel first")
    with atomic_open(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(PANEL_HEADER)
        for c, x, t in zip(*np.nonzero(panel.present)):
            w.writerow([panel.countries[c], panel.sectors[x].code, panel.years[t],
                        repr(float(panel.values[c, x, t]))])


def split_layers(panel: Panel) -> dict[Layer, Panel]:
    out = {}
    for layer in panel.layers:
        sl = panel.layer_slice(layer)
        out[layer] = Panel(panel.countries, panel.sectors[sl], panel.years,
                           panel.values[:, sl, :], panel.present[:, sl, :])
    return out


def align(panels: Sequence[Panel]) -> Panel:
    """Concatenate layer panels over their common countries and years."""
    if len(panels) < 2:
        raise ValueError("align needs at least two panels")
    seen: set[Layer] = set()
    for p in panels:
        overlap = seen.intersection(p.layers)
        if overlap:
            raise LayerConflict(f"layer {sorted(l.value for l in overlap)[0]} appears in two panels")
        seen.update(p.layers)

    countries = sorted(set.intersection(*(set(p.countries) for p in panels)))
    if not countries:
        raise NoCommonCountries("panels share no country")
    years = sorted(set.intersection(*(set(p.years) for p in panels)))
    if not years:
        raise NoCommonYears("panels share no year")

    parts = sorted((p.subset(countries, years) for p in panels), key=lambda p: p.sectors[0].key)
    return Panel(
        tuple(countries),
        tuple(s for p in parts for s in p.sectors),
        tuple(years),
        np.concatenate([p.values for p in parts], axis=1),
        np.concatenate([p.present for p in parts], axis=1),
    )
