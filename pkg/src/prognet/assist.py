"""Time-lagged assist matrix between sectors.

``b[x, x']`` is the probability that a walker leaving source sector ``x``
at year ``t`` reaches target ``x'`` at ``t + delay``, stepping uniformly
to a country specialized in ``x`` and then uniformly to one of that
country's specializations ``delay`` years later.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import CountryAxisMismatch, EmptySourceSet, SourceNotActive
from .ingest import Layer, SectorRef
from .rca import SpecMatrix

SectorFilter = Union[None, Layer, str, Iterable[Union[Layer, str, SectorRef]]]


def select_sectors(sectors: Sequence[SectorRef], filt: SectorFilter,
                   default: SectorFilter = None) -> tuple[SectorRef, ...]:
    """Resolve a filter (None, layer(s), or explicit sectors) against an axis."""
    if filt is None:
        filt = default
    if filt is None:
        return tuple(sectors)
    if isinstance(filt, (Layer, str)):
        filt = [filt]
    layers, explicit = set(), set()
    for f in filt:
        if isinstance(f, SectorRef):
            explicit.add(f)
        else:
            layers.add(f if isinstance(f, Layer) else Layer.parse(f))
    unknown = explicit.difference(sectors)
    if unknown:
        raise KeyError(f"sectors not on axis: {sorted(map(str, unknown))}")
    return tuple(s for s in sectors if s.layer in layers or s in explicit)


def assist_weights(m_src: np.ndarray, m_tgt: np.ndarray, diversification: np.ndarray) -> np.ndarray:
    """Assist weights from binary blocks; works on stacked leading axes.

    ``m_src`` is (..., countries, sources), ``m_tgt`` is (..., countries,
    targets) and ``diversification`` is (..., countries), counted over the
    full sector axis at the later year.  Rows of sources with ubiquity 0
    come back as NaN.
    """
    m_src = np.asarray(m_src, dtype=float)
    m_tgt = np.asarray(m_tgt, dtype=float)
    d = np.asarray(diversification, dtype=float)
    inv_d = np.divide(1.0, d, out=np.zeros_like(d), where=d > 0)
    co = np.matmul(np.swapaxes(m_src, -1, -2), m_tgt * inv_d[..., :, None])
    u = m_src.sum(axis=-2)
    b = np.divide(co, u[..., :, None], out=np.full(co.shape, np.nan), where=u[..., :, None] > 0)
    return b


@dataclass(frozen=True, eq=False)
class AssistMatrix:
    source_year: int
    delay: int
    countries: tuple[str, ...]
    sources: tuple[SectorRef, ...]
    targets: tuple[SectorRef, ...]
    b: np.ndarray
    ubiquity: np.ndarray
    diversification: np.ndarray

    @property
    def defined(self) -> np.ndarray:
        """Mask of source rows with at least one specialized country."""
        return self.ubiquity > 0

    def weight(self, source: SectorRef, target: SectorRef) -> float:
        return float(self.b[self.sources.index(source), self.targets.index(target)])


def _check_axes(m_t: SpecMatrix, m_t_delta: SpecMatrix) -> None:
    if m_t.countries != m_t_delta.countries:
        raise CountryAxisMismatch("the two specialization matrices have different country axes")
    if m_t.sectors != m_t_delta.sectors:
        raise ValueError("the two specialization matrices have different sector axes")
    if m_t_delta.year < m_t.year:
        raise ValueError("later matrix precedes the source matrix")


def assist(m_t: SpecMatrix, m_t_delta: SpecMatrix, sources: SectorFilter = None,
           targets: SectorFilter = None) -> AssistMatrix:
    """Assist matrix from AI sources (default) to all sectors (default)."""
    _check_axes(m_t, m_t_delta)
    src = select_sectors(m_t.sectors, sources, default=Layer.AI)
    tgt = select_sectors(m_t.sectors, targets)
    if not src:
        raise EmptySourceSet("no source sectors selected")
    si, ti = m_t.columns(src), m_t.columns(tgt)
    d = m_t_delta.m.sum(axis=1)
    b = assist_weights(m_t.m[:, si], m_t_delta.m[:, ti], d)
    b.flags.writeable = False
    return AssistMatrix(m_t.year, m_t_delta.year - m_t.year, m_t.countries, src, tgt, b,
                        m_t.m[:, si].sum(axis=0), d)


def random_walk_oracle(m_t: SpecMatrix, m_t_delta: SpecMatrix, source: SectorRef, n_walks: int,
                       seed=None, targets: SectorFilter = None) -> np.ndarray:
    """Monte Carlo estimate of one assist row by simulating walkers.

    Walkers stranded at a country with no later specialization arrive
    nowhere, so the returned frequencies may sum to less than one.
    """
    _check_axes(m_t, m_t_delta)
    if n_walks < 1:
        raise ValueError("n_walks must be >= 1")
    tgt = select_sectors(m_t.sectors, targets)
    col = m_t.sectors.index(source)
    start = np.flatnonzero(m_t.m[:, col])
    if start.size == 0:
        raise SourceNotActive(f"no country is specialized in {source} in {m_t.year}")
    rng = np.random.default_rng(seed)
    country = start[rng.integers(0, start.size, n_walks)]
    later = np.asarray(m_t_delta.m)
    d = later.sum(axis=1)
    # active sectors first within each row, so the k-th column of `order` is the k-th active sector
    order = np.argsort(-later, axis=1, kind="stable")
    alive = d[country] > 0
    k = np.floor(rng.random(n_walks) * np.maximum(d[country], 1)).astype(int)
    arrived = order[country[alive], k[alive]]
    counts = np.bincount(arrived, minlength=len(m_t.sectors))
    return counts[m_t.columns(tgt)] / n_walks
