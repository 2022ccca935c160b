import numpy as np
import pytest

from prognet.ingest import Layer, Panel, SectorRef, align, load_panel, load_taxonomy
from prognet.pipeline import demo_dir
from prognet.rca import SpecMatrix


def make_panel(values, layer=Layer.GOODS, countries=None, years=None, codes=None):
    """Single-layer panel from a (countries, sectors[, years]) array."""
    v = np.asarray(values, dtype=float)
    if v.ndim == 2:
        v = v[:, :, None]
    countries = countries or [f"C{chr(65 + i)}{chr(65 + i)}"[:3] for i in range(v.shape[0])]
    countries = [c if len(c) == 3 else c[:3] for c in countries]
    years = years or list(range(2010, 2010 + v.shape[2]))
    codes = codes or [f"s{j:02d}" for j in range(v.shape[1])]
    sectors = [SectorRef(layer, c) for c in codes]
    return Panel(tuple(countries), tuple(sectors), tuple(years), v, np.ones(v.shape, bool))


def spec_from(m, year=2010, layer=Layer.AI, codes=None, countries=None):
    """SpecMatrix from an explicit 0/1 matrix (rca set to 2*m)."""
    m = np.asarray(m, dtype=np.int8)
    codes = codes or [f"x{j}" for j in range(m.shape[1])]
    countries = countries or [f"K{i:02d}" for i in range(m.shape[0])]
    if isinstance(layer, Layer):
        layers = [layer] * m.shape[1]
    else:
        layers = layer
    sectors = tuple(SectorRef(l, c) for l, c in zip(layers, codes))
    order = sorted(range(len(sectors)), key=lambda j: sectors[j].key)
    sectors = tuple(sectors[j] for j in order)
    m = m[:, order]
    return SpecMatrix(year, tuple(countries), sectors, 2.0 * m, m, {})


@pytest.fixture(scope="session")
def demo_taxonomy():
    return load_taxonomy(demo_dir() / "taxonomy.csv")


@pytest.fixture(scope="session")
def demo_panel(demo_taxonomy):
    d = demo_dir()
    return align([load_panel(d / "ai.csv", Layer.AI, demo_taxonomy),
                  load_panel(d / "goods.csv", Layer.GOODS, demo_taxonomy),
                  load_panel(d / "services.csv", Layer.SERVICES, demo_taxonomy)])


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(RESULTS, key=lambda l: int(l.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
