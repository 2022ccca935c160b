from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from prognet.assist import assist, random_walk_oracle, select_sectors
from prognet.errors import CountryAxisMismatch, EmptySourceSet, SourceNotActive
from prognet.ingest import Layer, SectorRef

from conftest import spec_from

LAYERS = [Layer.AI, Layer.GOODS, Layer.SERVICES]


def exact_assist(m1, m2, src, tgt):
    """Assist weights by direct summation in rationals."""
    m1, m2 = np.asarray(m1), np.asarray(m2)
    d = m2.sum(axis=1)
    out = {}
    for x in src:
        u = int(m1[:, x].sum())
        if u == 0:
            out[x] = None
            continue
        out[x] = [sum((Fraction(1, int(d[c])) for c in range(m1.shape[0])
                       if m1[c, x] and m2[c, y] and d[c] > 0), Fraction(0)) / u for y in tgt]
    return out


@pytest.fixture
def worked():
    # columns: a (AI), g (Goods), s (Services)
    layers = LAYERS
    early = spec_from([[1, 0, 0], [1, 0, 0]], 2010, layers, ["a", "g", "s"], ["AAA", "BBB"])
    late = spec_from([[0, 1, 0], [0, 1, 1]], 2013, layers, ["a", "g", "s"], ["AAA", "BBB"])
    return early, late


def test_worked_example(worked):
    am = assist(*worked)
    assert am.delay == 3
    g = SectorRef(Layer.GOODS, "g")
    assert am.weight(SectorRef(Layer.AI, "a"), g) == 0.75
    assert am.b.tolist() == [[0.0, 0.75, 0.25]]
    assert am.ubiquity.tolist() == [2]
    assert am.diversification.tolist() == [1, 2]


def test_worked_example_random_walk(worked):
    est = random_walk_oracle(*worked, SectorRef(Layer.AI, "a"), 10**6, seed=42)
    assert abs(est[1] - 0.75) <= 0.002


def test_undefined_row():
    early = spec_from([[0, 1], [0, 1]], 2010, LAYERS[:2], ["a", "g"])
    late = spec_from([[1, 1], [0, 1]], 2011, LAYERS[:2], ["a", "g"])
    am = assist(early, late)
    assert not am.defined[0]
    assert np.isnan(am.b[0]).all()


def test_disjoint_specializations_give_zero():
    early = spec_from([[1, 0], [0, 0]], 2010, LAYERS[:2], ["a", "g"])
    late = spec_from([[0, 0], [0, 1]], 2011, LAYERS[:2], ["a", "g"])
    assert (assist(early, late).b == 0).all()


def test_dead_end_country_is_skipped():
    early = spec_from([[1, 0], [1, 0]], 2010, LAYERS[:2], ["a", "g"])
    late = spec_from([[0, 1], [0, 0]], 2011, LAYERS[:2], ["a", "g"])
    assert assist(early, late).b.tolist() == [[0.0, 0.5]]


def test_errors(worked):
    early, late = worked
    other = spec_from([[1, 0, 0]], 2013, LAYERS, ["a", "g", "s"], ["AAA"])
    with pytest.raises(CountryAxisMismatch):
        assist(early, other)
    no_ai = spec_from([[0, 1]], 2010, LAYERS[1:], ["g", "s"], ["AAA"])
    with pytest.raises(EmptySourceSet):
        assist(no_ai, no_ai)


def test_oracle_contract(worked):
    early, late = worked
    with pytest.raises(ValueError):
        random_walk_oracle(early, late, SectorRef(Layer.AI, "a"), 0)
    with pytest.raises(SourceNotActive):
        random_walk_oracle(late, late, SectorRef(Layer.AI, "a"), 10)


def test_oracle_deterministic_walk():
    early = spec_from([[1, 0]], 2010, LAYERS[:2], ["a", "g"], ["AAA"])
    late = spec_from([[0, 1]], 2011, LAYERS[:2], ["a", "g"], ["AAA"])
    est = random_walk_oracle(early, late, SectorRef(Layer.AI, "a"), 1000, seed=0,
                             targets=[SectorRef(Layer.GOODS, "g")])
    assert est.tolist() == [1.0]


def test_filters():
    s = [SectorRef(Layer.AI, "a"), SectorRef(Layer.GOODS, "g"), SectorRef(Layer.SERVICES, "s")]
    assert select_sectors(s, None, Layer.AI) == (s[0],)
    assert select_sectors(s, ["Goods", "Services"]) == tuple(s[1:])
    assert select_sectors(s, [s[2]]) == (s[2],)
    with pytest.raises(KeyError):
        select_sectors(s, [SectorRef(Layer.AI, "zzz")])


def random_instance(rng, max_c=6, max_x=8, delay=1):
    n_c = int(rng.integers(1, max_c + 1))
    n_x = int(rng.integers(2, max_x + 1))
    layers = [LAYERS[int(i)] for i in rng.integers(0, 3, n_x)]
    layers[0] = Layer.AI
    codes = [f"x{j}" for j in range(n_x)]
    countries = [f"K{i:02d}" for i in range(n_c)]
    dens = rng.uniform(0.2, 0.8)
    m1 = (rng.random((n_c, n_x)) < dens).astype(int)
    m2 = (rng.random((n_c, n_x)) < dens).astype(int)
    return (spec_from(m1, 2010, layers, codes, countries),
            spec_from(m2, 2010 + delay, layers, codes, countries))


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_matches_exact_rationals(seed):
    early, late = random_instance(np.random.default_rng(seed))
    am = assist(early, late)
    src = early.columns(am.sources)
    tgt = early.columns(am.targets)
    exact = exact_assist(early.m, late.m, src, tgt)
    for i, x in enumerate(src):
        if exact[x] is None:
            assert not am.defined[i]
        else:
            np.testing.assert_allclose(am.b[i], [float(v) for v in exact[x]], rtol=1e-14, atol=0)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_row_substochastic(seed):
    early, late = random_instance(np.random.default_rng(seed))
    am = assist(early, late, targets=None)
    d = late.m.sum(axis=1)
    for i, x in enumerate(early.columns(am.sources)):
        if not am.defined[i]:
            continue
        reach = early.m[:, x] @ (d > 0) / early.m[:, x].sum()
        assert am.b[i].sum() == pytest.approx(reach, abs=1e-12)
        assert am.b[i].sum() <= 1 + 1e-12
        assert ((0 <= am.b[i]) & (am.b[i] <= 1)).all()


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_country_permutation_invariance(seed):
    rng = np.random.default_rng(seed)
    early, late = random_instance(rng)
    perm = rng.permutation(len(early.countries))
    shuffle = lambda s: type(s)(s.year, tuple(s.countries[i] for i in perm), s.sectors,
                                s.rca[perm], s.m[perm], s.layer_blocks)
    a = assist(early, late).b
    b = assist(shuffle(early), shuffle(late)).b
    np.testing.assert_allclose(a, b, rtol=1e-14, equal_nan=True)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_zero_delay_detailed_balance(seed):
    early, _ = random_instance(np.random.default_rng(seed), delay=0)
    am = assist(early, early, sources=LAYERS, targets=LAYERS)
    u = am.ubiquity.astype(float)
    lhs = u[:, None] * np.nan_to_num(am.b)
    assert np.abs(lhs - lhs.T).max() <= 1e-12
