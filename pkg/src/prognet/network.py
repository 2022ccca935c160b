"""Progression networks: validated assist links aggregated over year pairs."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import networkx as nx
import numpy as np

from ._io import atomic_open, fmt, write_csv
from .assist import SectorFilter, assist
from .errors import EmptyNetwork, InputIOError, InsufficientYears
from .ingest import Layer, Panel, SectorRef
from .nullmodel import fit_bicm, validate
from .rca import compute_rca


@dataclass(frozen=True)
class NullConfig:
    n_samples: int = 1000
    alpha: float = 0.05
    seed: int = 0
    fdr: bool = False
    min_validations: int = 1
    include_self_loops: bool = False
    weight_average: str = "validated"  # or "all"
    min_layer_total: float = 0.0
    threads: int | None = None


@dataclass(frozen=True)
class Edge:
    source: SectorRef
    target: SectorRef
    weight: float
    validation_count: int
    year_pairs: tuple[int, ...]


@dataclass(frozen=True)
class ProgressionNetwork:
    delay: int
    directed: bool
    nodes: tuple[SectorRef, ...]
    edges: tuple[Edge, ...] = field(default=())

    def __eq__(self, other):
        if not isinstance(other, ProgressionNetwork):
            return NotImplemented
        return (self.delay, self.directed, self.nodes, self.edges) == \
            (other.delay, other.directed, other.nodes, other.edges) and \
            [n.name for n in self.nodes] == [n.name for n in other.nodes]

    __hash__ = None

    def weights(self) -> dict[tuple[SectorRef, SectorRef], float]:
        """Edge weights keyed by (source, target); both orientations if undirected."""
        out = {(e.source, e.target): e.weight for e in self.edges}
        if not self.directed:
            out.update({(e.target, e.source): e.weight for e in self.edges})
        return out

    def incoming(self, target: SectorRef, layer: Layer | None = Layer.AI) -> dict[SectorRef, float]:
        return {s: w for (s, t), w in self.weights().items()
                if t == target and (layer is None or s.layer == layer)}


def pair_seed(seed: int, delay: int, year: int) -> int:
    """Seed for one year pair, derived from the global seed."""
    return int(np.random.SeedSequence([int(seed), int(delay), int(year)]).generate_state(1)[0])


def year_pairs(panel: Panel, delay: int) -> list[tuple[int, int]]:
    years = set(panel.years)
    return [(t, t + delay) for t in panel.years if t + delay in years]


def validate_year_pairs(panel: Panel, delay: int = 3, sources: SectorFilter = None,
                        targets: SectorFilter = None, null_cfg: NullConfig = NullConfig()):
    """Validation results for every (t, t + delay) pair in the panel.

    Returns ``{t: list[ValidationResult]}``.  Each year's specialization
    matrix and BiCM fit are computed once and reused across pairs.
    """
    if delay < 0:
        raise ValueError("delay must be >= 0")
    pairs = year_pairs(panel, delay)
    if not pairs:
        raise InsufficientYears(f"panel spans {len(panel.years)} years; delay {delay} needs at least {delay + 1}")
    specs, fits = {}, {}
    for y in sorted({y for p in pairs for y in p}):
        specs[y] = compute_rca(panel, y, null_cfg.min_layer_total)
        fits[y] = fit_bicm(specs[y])
    results = {}
    for t, t2 in pairs:
        observed = assist(specs[t], specs[t2], sources, targets)
        results[t] = validate(observed, fits[t], fits[t2], null_cfg.n_samples, null_cfg.alpha,
                              pair_seed(null_cfg.seed, delay, t), null_cfg.fdr, null_cfg.threads)
    return results


def aggregate(results: dict, delay: int, nodes: Sequence[SectorRef],
              null_cfg: NullConfig = NullConfig()) -> ProgressionNetwork:
    """Merge per-pair validation results into one network.

    A link enters when validated in at least ``min_validations`` pairs;
    its weight averages the observed weights over the validated pairs
    (or over all pairs with ``weight_average="all"``).  With zero delay
    links are undirected: a pair validates ``{x, y}`` only if every
    tested orientation validates, and the weight is read in the
    canonical ``source < target`` orientation when it was tested.
    """
    directed = delay > 0
    stats: dict[tuple[SectorRef, SectorRef], dict] = {}
    for t in sorted(results):
        by_dir = {(r.source, r.target): r for r in results[t]}
        groups: dict[tuple[SectorRef, SectorRef], list] = {}
        for (s, g), r in by_dir.items():
            if s == g and not null_cfg.include_self_loops:
                continue
            key = (s, g) if directed else (min(s, g), max(s, g))
            groups.setdefault(key, []).append(r)
        for key, rs in groups.items():
            canon = next((r for r in rs if (r.source, r.target) == key), rs[0])
            ok = all(r.validated for r in rs)
            st = stats.setdefault(key, {"pairs": [], "valid_b": [], "all_b": []})
            st["all_b"].append(canon.observed_b)
            if ok:
                st["pairs"].append(t)
                st["valid_b"].append(canon.observed_b)
    edges = []
    for (s, g), st in sorted(stats.items(), key=lambda kv: (kv[0][0].key, kv[0][1].key)):
        if not st["pairs"] or len(st["pairs"]) < null_cfg.min_validations:
            continue
        ws = st["valid_b"] if null_cfg.weight_average == "validated" else st["all_b"]
        edges.append(Edge(s, g, float(np.mean(ws)), len(st["pairs"]), tuple(st["pairs"])))
    return ProgressionNetwork(delay, directed, tuple(sorted(set(nodes))), tuple(edges))


def build_progression(panel: Panel, delay: int = 3, sources: SectorFilter = None,
                      targets: SectorFilter = None,
                      null_cfg: NullConfig = NullConfig()) -> ProgressionNetwork:
    """Validate assist links for every year pair and aggregate them."""
    if null_cfg.weight_average not in ("validated", "all"):
        raise ValueError("weight_average must be 'validated' or 'all'")
    results = validate_year_pairs(panel, delay, sources, targets, null_cfg)
    first = next(iter(results.values()))
    nodes = {r.source for r in first} | {r.target for r in first}
    return aggregate(results, delay, nodes, null_cfg)


@dataclass(frozen=True)
class NodeStats:
    sector: SectorRef
    in_degree: int
    out_degree: int
    degree: int
    strength: float


def node_summary(net: ProgressionNetwork) -> list[NodeStats]:
    """Degree and strength of every node, most connected first.

    Undirected edges count once toward each endpoint, and then
    ``in_degree == out_degree == degree``.
    """
    if not net.edges:
        raise EmptyNetwork("network has no edges")
    ins = {n: 0 for n in net.nodes}
    outs = {n: 0 for n in net.nodes}
    strength = {n: 0.0 for n in net.nodes}
    for e in net.edges:
        for n in (e.source, e.target):
            ins.setdefault(n, 0), outs.setdefault(n, 0), strength.setdefault(n, 0.0)
        outs[e.source] += 1
        ins[e.target] += 1
        strength[e.source] += e.weight
        strength[e.target] += e.weight
    rows = []
    for n in ins:
        if net.directed:
            rows.append(NodeStats(n, ins[n], outs[n], ins[n] + outs[n], strength[n]))
        else:
            deg = ins[n] + outs[n]
            rows.append(NodeStats(n, deg, deg, deg, strength[n]))
    return sorted(rows, key=lambda r: (-r.degree, r.sector.key))


# --- export / import -------------------------------------------------------

def to_json_dict(net: ProgressionNetwork) -> dict:
    return {
        "delay": net.delay,
        "directed": net.directed,
        "nodes": [{"layer": n.layer.value, "code": n.code, "name": n.name} for n in net.nodes],
        "edges": [{"source": e.source.id, "target": e.target.id, "weight": e.weight,
                   "count": e.validation_count, "year_pairs": list(e.year_pairs)}
                  for e in net.edges],
    }


def from_json_dict(data: dict) -> ProgressionNetwork:
    nodes = tuple(SectorRef(Layer.parse(n["layer"]), n["code"], n["name"]) for n in data["nodes"])
    by_id = {n.id: n for n in nodes}
    edges = tuple(Edge(by_id[e["source"]], by_id[e["target"]], float(e["weight"]), int(e["count"]),
                       tuple(int(y) for y in e["year_pairs"])) for e in data["edges"])
    return ProgressionNetwork(int(data["delay"]), bool(data["directed"]), nodes, edges)


def load_network_json(path) -> ProgressionNetwork:
    try:
        with Path(path).open(encoding="utf-8") as fh:
            return from_json_dict(json.load(fh))
    except FileNotFoundError:
        raise InputIOError(f"file not found: {path}") from None


def to_networkx(net: ProgressionNetwork) -> nx.Graph:
    g = nx.DiGraph() if net.directed else nx.Graph()
    for n in net.nodes:
        g.add_node(n.id, layer=n.layer.value, code=n.code, name=n.name)
    for e in net.edges:
        g.add_edge(e.source.id, e.target.id, weight=e.weight, count=e.validation_count)
    return g


def _dot_quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(net: ProgressionNetwork) -> str:
    kind, arrow = ("digraph", "->") if net.directed else ("graph", "--")
    lines = [f"{kind} progression {{"]
    for n in net.nodes:
        lines.append(f"  {_dot_quote(n.id)} [layer={_dot_quote(n.layer.value)}, "
                     f"code={_dot_quote(n.code)}, name={_dot_quote(n.name)}];")
    for e in net.edges:
        lines.append(f"  {_dot_quote(e.source.id)} {arrow} {_dot_quote(e.target.id)} "
                     f"[weight={fmt(e.weight)}, count={e.validation_count}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def export_graph(net: ProgressionNetwork, format: str, path) -> Path:
    """Write the network as GraphML, DOT or JSON."""
    path = Path(path)
    kind = format.lower()
    try:
        if kind == "json":
            with atomic_open(path) as fh:
                json.dump(to_json_dict(net), fh, indent=2, ensure_ascii=False)
                fh.write("\n")
        elif kind == "dot":
            with atomic_open(path) as fh:
                fh.write(to_dot(net))
        elif kind == "graphml":
            with atomic_open(path, "wb") as fh:
                nx.write_graphml(to_networkx(net), fh)
        else:
            raise ValueError(f"unknown graph format {format!r}")
    except OSError as exc:
        raise InputIOError(f"cannot write {path}: {exc}") from None
    return path


def write_node_summary(net: ProgressionNetwork, path) -> None:
    write_csv(path, ["layer", "code", "name", "in_degree", "out_degree", "degree", "strength"],
              [[r.sector.layer.value, r.sector.code, r.sector.name, r.in_degree, r.out_degree,
                r.degree, fmt(r.strength)] for r in node_summary(net)])


def heatmap(net: ProgressionNetwork, sources: Sequence[SectorRef],
            targets: Sequence[SectorRef]) -> np.ndarray:
    """Dense weight matrix with zeros where no link was validated."""
    w = net.weights()
    return np.array([[w.get((s, t), 0.0) for t in targets] for s in sources])


def write_heatmap(net: ProgressionNetwork, path, sources: Sequence[SectorRef] | None = None,
                  targets: Sequence[SectorRef] | None = None) -> None:
    sources = [n for n in net.nodes if n.layer == Layer.AI] if sources is None else list(sources)
    targets = [n for n in net.nodes if n.layer != Layer.AI] if targets is None else list(targets)
    mat = heatmap(net, sources, targets)
    write_csv(path, ["source"] + [t.id for t in targets],
              [[s.id] + [fmt(v) for v in row] for s, row in zip(sources, mat)])
