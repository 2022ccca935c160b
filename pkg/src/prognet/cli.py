"""Command line entry point: ``prognet <command> [--config FILE] [--key value ...]``.

Every configuration key can be given as ``--key`` (dashes or
underscores).  Failures print one line ``error: <category>: <Class>:
<message>`` on stderr and exit with a category-specific status.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import pipeline
from .assist import assist
from .config import RunConfig, make_config, read_config_file
from .errors import ConfigError, PrognetError, YearNotInPanel
from .ingest import Layer
from .network import build_progression, pair_seed, write_heatmap
from .nullmodel import fit_bicm, validate
from .rca import compute_rca, label_specializations

EXIT_CODES = {"config": 2, "io": 3, "data": 4, "convergence": 5}

_HELP = {
    "ai_panel": "AI investment panel CSV",
    "goods_panel": "goods export panel CSV",
    "services_panel": "services export panel CSV",
    "taxonomy": "sector taxonomy CSV (layer,raw_label,code,name)",
    "output_dir": "directory receiving the outputs",
    "delay": "years between source and target specialization",
    "alpha": "significance level for link validation",
    "n_samples": "null-model samples per year pair",
    "seed": "global random seed",
    "early": "early sub-period, e.g. 2010-2014",
    "late": "late sub-period, e.g. 2017-2019",
    "min_validations": "year pairs a link must be validated in",
    "top_k": "rows per country report",
    "min_layer_total": "countries with a smaller layer total get RCA 0",
    "include_self_loops": "keep x -> x links (true/false)",
    "weight_average": "'validated' or 'all' year pairs",
    "fdr": "Benjamini-Hochberg adjustment (true/false)",
    "countries": "comma-separated ISO-3 codes for reports (default all)",
}
_ALIASES = {"n_samples": ["--samples"], "top_k": ["--top-k"], "countries": ["--country"],
            "output_dir": ["-o"]}


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key = value configuration file")
    for name in RunConfig.__dataclass_fields__:
        flags = [f"--{name}"]
        if "_" in name:
            flags.append(f"--{name.replace('_', '-')}")
        flags += [a for a in _ALIASES.get(name, []) if a not in flags]
        p.add_argument(*flags, dest=name, default=None, help=_HELP.get(name))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="prognet", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    cmds = {
        "ingest": "load and align the panels; write canonical per-layer CSVs",
        "rca": "per-year RCA and binary specialization CSVs",
        "labels": "Classic/Absent/Disappearing/Emerging labels",
        "assist": "one year's assist matrix",
        "validate": "validate one year's assist links against the BiCM null",
        "network": "aggregate validated links over all year pairs and export graphs",
        "report": "country density reports",
        "run": "full pipeline",
        "demo": "full pipeline on the bundled synthetic dataset",
    }
    for name, help_ in cmds.items():
        p = sub.add_parser(name, help=help_)
        _add_config_flags(p)
        if name in ("rca", "assist", "validate"):
            p.add_argument("--year", type=int, help="source year (default: all years for rca, "
                                                    "first year otherwise)")
        if name in ("assist", "validate"):
            p.add_argument("--source-layer", default="AI")
            p.add_argument("--target-layers", default="AI,Goods,Services",
                           help="comma-separated layers")
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    file_values, base = {}, None
    if args.config:
        file_values = read_config_file(args.config)
        base = Path(args.config).resolve().parent
    if args.command == "demo":
        file_values = {**pipeline.demo_config(), **file_values}
        if "output_dir" not in file_values:
            file_values["output_dir"] = "prognet-demo"
    overrides = {k: getattr(args, k) for k in RunConfig.__dataclass_fields__}
    return make_config(file_values, overrides, base)


def _layers(text: str) -> list[Layer]:
    try:
        return [Layer.parse(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _year_pair(panel, year, delay):
    year = panel.years[0] if year is None else year
    for y in (year, year + delay):
        if y not in panel.years:
            raise YearNotInPanel(f"year {y} not in panel")
    return year


def _command_writer(args: argparse.Namespace):
    cmd = args.command

    def write(cfg: RunConfig, out: Path) -> None:
        panel, _ = pipeline.load_inputs(cfg)
        if cmd == "ingest":
            pipeline.write_panels(panel, out)
        elif cmd == "rca":
            years = panel.years if args.year is None else [args.year]
            for y in years:
                pipeline.write_rca(compute_rca(panel, y, cfg.min_layer_total), out / f"rca_{y}.csv")
        elif cmd == "labels":
            pipeline.write_labels(label_specializations(panel, cfg.early_span, cfg.late_span,
                                                        cfg.min_layer_total), out / "labels.csv")
        elif cmd in ("assist", "validate"):
            y = _year_pair(panel, args.year, cfg.delay)
            m1 = compute_rca(panel, y, cfg.min_layer_total)
            m2 = compute_rca(panel, y + cfg.delay, cfg.min_layer_total)
            am = assist(m1, m2, _layers(args.source_layer), _layers(args.target_layers))
            if cmd == "assist":
                pipeline.write_assist(am, out / f"assist_{y}_d{cfg.delay}.csv")
            else:
                f1 = fit_bicm(m1)
                f2 = f1 if cfg.delay == 0 else fit_bicm(m2)
                res = validate(am, f1, f2, cfg.n_samples, cfg.alpha,
                               pair_seed(cfg.seed, cfg.delay, y), cfg.fdr)
                pipeline.write_validation(res, out / f"validate_{y}_d{cfg.delay}.csv")
        elif cmd in ("network", "report"):
            ncfg = pipeline.null_config(cfg)
            net = build_progression(panel, cfg.delay, Layer.AI, None, ncfg)
            if cmd == "network":
                pipeline.write_network(net, out, "network")
                write_heatmap(net, out / "heatmap.csv",
                              [s for s in panel.sectors if s.layer == Layer.AI],
                              [s for s in panel.sectors if s.layer != Layer.AI])
                pipeline.write_network(build_progression(panel, 0, Layer.AI, Layer.AI, ncfg),
                                       out, "cooccurrence")
            else:
                labels = label_specializations(panel, cfg.early_span, cfg.late_span,
                                               cfg.min_layer_total)
                pipeline.write_country_reports(panel, net, labels, cfg, out)
        else:
            pipeline.write_all(cfg, out)

    return write


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve_config(args)
        cfg.check_inputs()
        out = pipeline.staged(cfg, _command_writer(args))
    except PrognetError as exc:
        print(f"error: {exc.category}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CODES.get(exc.category, 1)
    except OSError as exc:
        print(f"error: io: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CODES["io"]
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
