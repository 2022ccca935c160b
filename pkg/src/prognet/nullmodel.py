"""Bipartite configuration model (BiCM) null model and link validation.

The BiCM is the maximum-entropy ensemble of binary country x sector
matrices whose expected row and column sums equal the observed
diversification and ubiquity.  Link probabilities take the form
``p = x_c y_s / (1 + x_c y_s)``.  Assist weights computed on matrix pairs
drawn from the two years' fits give each observed link a null
distribution and a right-tail Monte Carlo p-value.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np
from scipy.stats import false_discovery_control

from .assist import AssistMatrix, assist_weights
from .errors import EmptyMatrix, IterationLimit
from .ingest import SectorRef
from .rca import SpecMatrix

TOL = 1e-8
MAX_ITERS = 10_000
DAMPING = 0.5
# float slack when comparing a null assist weight with the observed one
_TIE_EPS = 1e-12
_CHUNK = 50


@dataclass(frozen=True, eq=False)
class BicmFit:
    """Fitted BiCM for one binary matrix.

    Rows or columns forced to all-ones carry fitness ``inf``; forced
    all-zeros carry ``0``.  ``sectors`` is set when fitted from a
    :class:`SpecMatrix`.
    """

    row_fitness: np.ndarray
    col_fitness: np.ndarray
    link_prob: np.ndarray
    residual: float
    iterations: int = 0
    sectors: tuple[SectorRef, ...] | None = None

    @property
    def shape(self) -> tuple[int, int]:
        return self.link_prob.shape


def link_probability(x, y) -> np.ndarray:
    """``x y / (1 + x y)`` for every row/column pair, with 0 and inf limits."""
    x = np.asarray(x, dtype=float)[:, None]
    y = np.asarray(y, dtype=float)[None, :]
    with np.errstate(invalid="ignore", over="ignore"):
        xy = x * y
        p = xy / (1.0 + xy)
    p = np.where(np.isinf(xy), 1.0, p)
    p = np.where((x == 0) | (y == 0), 0.0, p)
    return p


def _reduce(m: np.ndarray):
    """Peel off lines whose residual degree is 0 or saturated.

    Returns the fixed-probability matrix (NaN where free), the free row
    and column masks, their residual degrees, and fitnesses for the
    peeled lines.
    """
    n_rows, n_cols = m.shape
    fixed = np.full(m.shape, np.nan)
    rows = np.ones(n_rows, bool)
    cols = np.ones(n_cols, bool)
    rdeg = m.sum(axis=1).astype(float)
    cdeg = m.sum(axis=0).astype(float)
    xf = np.full(n_rows, np.nan)
    yf = np.full(n_cols, np.nan)
    changed = True
    while changed:
        changed = False
        n_c = cols.sum()
        for i in np.flatnonzero(rows):
            if rdeg[i] == 0 or rdeg[i] == n_c:
                full = rdeg[i] == n_c and n_c > 0
                fixed[i, cols] = 1.0 if full else 0.0
                xf[i] = np.inf if full else 0.0
                if full:
                    cdeg[cols] -= 1
                rows[i] = False
                changed = True
        n_r = rows.sum()
        for j in np.flatnonzero(cols):
            if cdeg[j] == 0 or cdeg[j] == n_r:
                full = cdeg[j] == n_r and n_r > 0
                fixed[rows, j] = 1.0 if full else 0.0
                yf[j] = np.inf if full else 0.0
                if full:
                    rdeg[rows] -= 1
                cols[j] = False
                changed = True
    return fixed, rows, cols, rdeg[rows], cdeg[cols], xf, yf


def _solve(rdeg: np.ndarray, cdeg: np.ndarray, tol: float, max_iters: int, damping: float):
    # lines with equal degree share a fitness; iterate on the distinct values
    r_val, r_inv, r_cnt = np.unique(rdeg, return_inverse=True, return_counts=True)
    c_val, c_inv, c_cnt = np.unique(cdeg, return_inverse=True, return_counts=True)
    total = rdeg.sum()
    x = r_val / np.sqrt(total)
    y = c_val / np.sqrt(total)
    residual = np.inf
    for it in range(1, max_iters + 1):
        xy = x[:, None] * y[None, :]
        x_new = r_val / ((c_cnt * y)[None, :] / (1.0 + xy)).sum(axis=1)
        y_new = c_val / ((r_cnt * x)[:, None] / (1.0 + xy)).sum(axis=0)
        x = damping * x + (1.0 - damping) * x_new
        y = damping * y + (1.0 - damping) * y_new
        p = link_probability(x, y)
        residual = max(np.abs((p * c_cnt).sum(axis=1) - r_val).max(),
                       np.abs((p * r_cnt[:, None]).sum(axis=0) - c_val).max())
        if residual <= tol:
            break
    return x[r_inv], y[c_inv], float(residual), it


def fit_bicm(m, tol: float = TOL, max_iters: int = MAX_ITERS, damping: float = DAMPING) -> BicmFit:
    """Fit BiCM fitnesses to a binary matrix by damped fixed-point iteration.

    ``m`` may be a 0/1 array or a :class:`SpecMatrix`.  Raises
    :class:`IterationLimit` if the expected degrees do not match the
    observed ones within ``tol`` after ``max_iters`` sweeps.
    """
    sectors = None
    if isinstance(m, SpecMatrix):
        sectors = m.sectors
        m = m.m
    m = np.asarray(m)
    if m.ndim != 2 or m.size == 0:
        raise EmptyMatrix("BiCM needs a non-empty 2-d matrix")
    if not np.isin(m, (0, 1)).all():
        raise ValueError("BiCM input must be binary")
    m = m.astype(np.int64)

    fixed, rows, cols, rdeg, cdeg, xf, yf = _reduce(m)
    x, y = xf, yf
    residual, iters = 0.0, 0
    if rows.any() and cols.any():
        xs, ys, residual, iters = _solve(rdeg, cdeg, tol, max_iters, damping)
        x, y = xf.copy(), yf.copy()
        x[rows], y[cols] = xs, ys
    p = np.where(np.isnan(fixed), 0.0, fixed)
    if rows.any() and cols.any():
        p[np.ix_(rows, cols)] = link_probability(x[rows], y[cols])
    residual = max(residual,
                   float(np.abs(p.sum(axis=1) - m.sum(axis=1)).max()),
                   float(np.abs(p.sum(axis=0) - m.sum(axis=0)).max()))
    if residual > tol:
        raise IterationLimit(f"BiCM residual {residual:.3g} > {tol:g} after {iters} iterations")
    for arr in (x, y, p):
        arr.flags.writeable = False
    return BicmFit(x, y, p, residual, iters, sectors)


def sample_rng(seed: int, index: int) -> np.random.Generator:
    """Generator for null sample ``index``; depends only on (seed, index)."""
    return np.random.default_rng([int(seed), int(index)])


def sample_pair(fit_t: BicmFit, fit_t_delta: BicmFit, seed: int, index: int):
    """Draw one independent Bernoulli matrix from each fit.

    Passing the same fit object twice (zero delay) draws a single matrix
    and returns it for both years.
    """
    rng = sample_rng(seed, index)
    a = (rng.random(fit_t.shape) < fit_t.link_prob).astype(np.int8)
    if fit_t_delta is fit_t:
        return a, a
    b = (rng.random(fit_t_delta.shape) < fit_t_delta.link_prob).astype(np.int8)
    return a, b


def sample_null(fit_t: BicmFit, fit_t_delta: BicmFit, n_samples: int,
                seed: int = 0) -> Iterator[tuple[np.ndarray, np.ndarray]]:
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    for i in range(n_samples):
        yield sample_pair(fit_t, fit_t_delta, seed, i)


@dataclass(frozen=True)
class ValidationResult:
    source: SectorRef
    target: SectorRef
    observed_b: float
    p_value: float
    n_samples: int
    validated: bool
    q_value: float | None = None


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get("PROGNET_THREADS", "1")))
    except ValueError:
        return 1


def null_exceedances(observed_b: np.ndarray, fit_t: BicmFit, fit_t_delta: BicmFit,
                     source_cols: Sequence[int], target_cols: Sequence[int],
                     n_samples: int, seed: int, threads: int | None = None) -> np.ndarray:
    """Count, per link, null samples whose assist weight reaches the observed one.

    Null weights undefined in a sample (source absent) count as 0.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    si = np.asarray(source_cols)
    ti = np.asarray(target_cols)
    obs = np.asarray(observed_b, dtype=float)

    def chunk(lo: int) -> np.ndarray:
        idx = range(lo, min(lo + _CHUNK, n_samples))
        pairs = [sample_pair(fit_t, fit_t_delta, seed, i) for i in idx]
        early = np.stack([a[:, si] for a, _ in pairs])
        late = np.stack([b for _, b in pairs])
        null = assist_weights(early, late[:, :, ti], late.sum(axis=2))
        null = np.nan_to_num(null, nan=0.0)
        return (null >= obs[None] - _TIE_EPS).sum(axis=0)

    starts = range(0, n_samples, _CHUNK)
    threads = thread_count() if threads is None else threads
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            parts = list(pool.map(chunk, starts))
    else:
        parts = [chunk(lo) for lo in starts]
    return np.sum(parts, axis=0)


def empirical_p_value(exceed, n_samples: int):
    """Add-one right-tail estimate ``(1 + #{null >= obs}) / (1 + n)``."""
    return (1.0 + np.asarray(exceed, dtype=float)) / (1.0 + n_samples)


def validate(observed: AssistMatrix, fit_t: BicmFit, fit_t_delta: BicmFit, n_samples: int = 1000,
             alpha: float = 0.05, seed: int = 0, fdr: bool = False,
             threads: int | None = None) -> list[ValidationResult]:
    """Test every defined link of ``observed`` against the BiCM null.

    Both fits must carry the sector axis the assist matrix was built on.
    With ``fdr`` the Benjamini-Hochberg adjusted value decides validation.
    """
    if fit_t.sectors is None or fit_t_delta.sectors is None:
        raise ValueError("fits must be built from SpecMatrix objects to map sectors")
    col = {s: i for i, s in enumerate(fit_t.sectors)}
    rows = np.flatnonzero(observed.defined)
    sources = [observed.sources[r] for r in rows]
    obs = observed.b[rows]
    exceed = null_exceedances(obs, fit_t, fit_t_delta, [col[s] for s in sources],
                              [col[t] for t in observed.targets], n_samples, seed, threads)
    pvals = empirical_p_value(exceed, n_samples)
    qvals = false_discovery_control(pvals.ravel(), method="bh").reshape(pvals.shape) \
        if fdr and pvals.size else None
    decide = qvals if qvals is not None else pvals
    out = []
    for i, s in enumerate(sources):
        for j, t in enumerate(observed.targets):
            out.append(ValidationResult(
                s, t, float(obs[i, j]), float(pvals[i, j]), n_samples,
                bool(decide[i, j] <= alpha + _TIE_EPS),
                None if qvals is None else float(qvals[i, j]),
            ))
    return out
