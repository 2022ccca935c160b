"""End-to-end pipeline and the file writers behind each command."""

from __future__ import annotations

import logging
import os
import shutil
import tempfile
from importlib import resources
from pathlib import Path

from ._io import atomic_open, fmt, write_csv
from .assist import AssistMatrix
from .config import RunConfig
from .density import country_report, top_specializations, write_report, write_top_specializations
from .errors import EmptyNetwork
from .ingest import Layer, Panel, Taxonomy, align, load_panel, load_taxonomy, save_panel, split_layers
from .network import NullConfig, ProgressionNetwork, build_progression, export_graph, write_heatmap, \
    write_node_summary
from .nullmodel import ValidationResult
from .rca import SpecLabel, SpecMatrix, compute_rca, label_specializations

log = logging.getLogger(__name__)

UNDEFINED = "undefined"


def demo_dir() -> Path:
    return Path(str(resources.files("prognet") / "data" / "demo"))


def demo_config(**overrides) -> dict:
    d = demo_dir()
    values = {
        "ai_panel": str(d / "ai.csv"),
        "goods_panel": str(d / "goods.csv"),
        "services_panel": str(d / "services.csv"),
        "taxonomy": str(d / "taxonomy.csv"),
    }
    values.update(overrides)
    return values


def load_inputs(cfg: RunConfig) -> tuple[Panel, Taxonomy]:
    cfg.check_inputs()
    tax = load_taxonomy(cfg.taxonomy)
    panels = [load_panel(cfg.ai_panel, Layer.AI, tax),
              load_panel(cfg.goods_panel, Layer.GOODS, tax),
              load_panel(cfg.services_panel, Layer.SERVICES, tax)]
    return align(panels), tax


def null_config(cfg: RunConfig) -> NullConfig:
    return NullConfig(n_samples=cfg.n_samples, alpha=cfg.alpha, seed=cfg.seed, fdr=cfg.fdr,
                      min_validations=cfg.min_validations,
                      include_self_loops=cfg.include_self_loops,
                      weight_average=cfg.weight_average, min_layer_total=cfg.min_layer_total)


# --- writers ---------------------------------------------------------------

def write_panels(panel: Panel, out: Path) -> None:
    for layer, part in split_layers(panel).items():
        save_panel(part, out / f"panel_{layer.value}.csv")


def write_rca(spec: SpecMatrix, path) -> None:
    write_csv(path, ["country", "layer", "code", "rca", "m"],
              [[c, s.layer.value, s.code, fmt(spec.rca[i, j]), int(spec.m[i, j])]
               for i, c in enumerate(spec.countries) for j, s in enumerate(spec.sectors)])


def write_labels(labels: list[SpecLabel], path) -> None:
    write_csv(path, ["country", "layer", "code", "label", "early_avg", "late_avg"],
              [[lab.country, lab.sector.layer.value, lab.sector.code, lab.label.value,
                fmt(lab.early_avg_rca), fmt(lab.late_avg_rca)] for lab in labels])


def write_assist(am: AssistMatrix, path) -> None:
    rows = []
    for i, s in enumerate(am.sources):
        cells = [fmt(v) for v in am.b[i]] if am.defined[i] else [UNDEFINED] * len(am.targets)
        rows.append([s.id] + cells)
    write_csv(path, ["source"] + [t.id for t in am.targets], rows)


def write_validation(results: list[ValidationResult], path) -> None:
    write_csv(path, ["source_layer", "source", "target_layer", "target", "observed_b", "p_value",
                     "validated"],
              [[r.source.layer.value, r.source.code, r.target.layer.value, r.target.code,
                fmt(r.observed_b), fmt(r.p_value), "true" if r.validated else "false"]
               for r in results])


def write_network(net: ProgressionNetwork, out: Path, stem: str) -> None:
    for kind, ext in (("json", "json"), ("graphml", "graphml"), ("dot", "dot")):
        export_graph(net, kind, out / f"{stem}.{ext}")
    try:
        write_node_summary(net, out / f"{stem}_nodes.csv")
    except EmptyNetwork:
        write_csv(out / f"{stem}_nodes.csv",
                  ["layer", "code", "name", "in_degree", "out_degree", "degree", "strength"], [])


def write_country_reports(panel: Panel, net: ProgressionNetwork, labels, cfg: RunConfig, out: Path):
    countries = cfg.country_list or list(panel.countries)
    for c in countries:
        rep = country_report(panel, net, labels, c, cfg.top_k, cfg.min_layer_total)
        write_report(rep, out / f"report_{c}.csv")
        tops = top_specializations(panel, c, None, cfg.top_k, cfg.min_layer_total)
        write_top_specializations(tops, out / f"top_{c}.csv")


def write_all(cfg: RunConfig, out: Path) -> None:
    panel, _ = load_inputs(cfg)
    out.mkdir(parents=True, exist_ok=True)
    with atomic_open(out / "config.resolved") as fh:
        fh.write(cfg.to_text())
    log.info("panel: %d countries, %d sectors, %d years", *panel.values.shape)
    for y in panel.years:
        write_rca(compute_rca(panel, y, cfg.min_layer_total), out / "rca" / f"rca_{y}.csv")
    labels = label_specializations(panel, cfg.early_span, cfg.late_span, cfg.min_layer_total)
    write_labels(labels, out / "labels.csv")

    ncfg = null_config(cfg)
    net = build_progression(panel, cfg.delay, Layer.AI, None, ncfg)
    write_network(net, out, "network")
    write_heatmap(net, out / "heatmap.csv", [s for s in panel.sectors if s.layer == Layer.AI],
                  [s for s in panel.sectors if s.layer != Layer.AI])
    cooc = build_progression(panel, 0, Layer.AI, Layer.AI, ncfg)
    write_network(cooc, out, "cooccurrence")
    write_country_reports(panel, net, labels, cfg, out / "reports")


def publish(staging: Path, out: Path) -> None:
    """Move every staged file into ``out``, one atomic rename per file."""
    for src in sorted(staging.rglob("*")):
        if src.is_file():
            dest = out / src.relative_to(staging)
            dest.parent.mkdir(parents=True, exist_ok=True)
            os.replace(src, dest)


def staged(cfg: RunConfig, writer) -> Path:
    """Run ``writer(cfg, tmpdir)`` and publish its files only if it succeeds."""
    out = Path(cfg.output_dir)
    out.parent.mkdir(parents=True, exist_ok=True)
    staging = Path(tempfile.mkdtemp(prefix=f".{out.name}.partial-", dir=out.parent))
    try:
        writer(cfg, staging)
        publish(staging, out)
    finally:
        shutil.rmtree(staging, ignore_errors=True)
    return out


def run_pipeline(cfg: RunConfig) -> Path:
    """Write every pipeline product into ``cfg.output_dir``."""
    cfg.check()
    cfg.check_inputs()
    return staged(cfg, write_all)
