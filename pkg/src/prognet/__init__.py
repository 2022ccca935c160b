"""Statistically validated progression networks from AI investment to trade.

Typical use::

    from prognet import load_taxonomy, load_panel, align, build_progression

    tax = load_taxonomy("taxonomy.csv")
    panel = align([load_panel("ai.csv", "AI", tax),
                   load_panel("goods.csv", "Goods", tax),
                   load_panel("services.csv", "Services", tax)])
    net = build_progression(panel, delay=3)
"""

from .assist import AssistMatrix, assist, random_walk_oracle
from .density import (
    Application,
    DensityReport,
    compute_density,
    country_report,
    top_specializations,
)
from .ingest import Layer, Panel, SectorRef, Taxonomy, align, default_taxonomy, load_panel, \
    load_taxonomy, save_panel
from .network import (
    NullConfig,
    ProgressionNetwork,
    build_progression,
    export_graph,
    load_network_json,
    node_summary,
    to_dot,
)
from .nullmodel import BicmFit, ValidationResult, fit_bicm, sample_null, validate
from .rca import Label, SpecLabel, SpecMatrix, compute_rca, label_specializations, world_shares

__version__ = "0.1.0"
