"""Run configuration: a flat ``key = value`` file plus command-line overrides."""

from __future__ import annotations

import dataclasses
import re
from dataclasses import dataclass, fields
from pathlib import Path

from .errors import ConfigError, InputIOError

_SPAN = re.compile(r"^\s*(\d{4})\s*-\s*(\d{4})\s*$")


def parse_span(text: str) -> tuple[int, int]:
    m = _SPAN.match(str(text))
    if not m:
        raise ConfigError(f"year range must look like 2010-2014, got {text!r}")
    lo, hi = int(m.group(1)), int(m.group(2))
    if lo > hi:
        raise ConfigError(f"year range {text!r} is reversed")
    return lo, hi


def _parse_bool(text: str) -> bool:
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {text!r}")


@dataclass(frozen=True)
class RunConfig:
    ai_panel: str = ""
    goods_panel: str = ""
    services_panel: str = ""
    taxonomy: str = ""
    output_dir: str = "prognet-out"
    delay: int = 3
    alpha: float = 0.05
    n_samples: int = 1000
    seed: int = 7
    early: str = "2010-2014"
    late: str = "2017-2019"
    min_validations: int = 1
    top_k: int = 10
    min_layer_total: float = 0.0
    include_self_loops: bool = False
    weight_average: str = "validated"
    fdr: bool = False
    countries: str = ""

    @property
    def early_span(self) -> tuple[int, int]:
        return parse_span(self.early)

    @property
    def late_span(self) -> tuple[int, int]:
        return parse_span(self.late)

    @property
    def country_list(self) -> list[str]:
        return [c.strip() for c in self.countries.split(",") if c.strip()]

    def check(self) -> "RunConfig":
        """Raise :class:`ConfigError` unless every value is in range."""
        if self.delay < 0:
            raise ConfigError("delay must be >= 0")
        if not 0.0 < self.alpha < 1.0:
            raise ConfigError(f"alpha must be in (0, 1), got {self.alpha}")
        if self.n_samples < 1:
            raise ConfigError("n_samples must be >= 1")
        if self.top_k < 1:
            raise ConfigError("top_k must be >= 1")
        if self.min_validations < 1:
            raise ConfigError("min_validations must be >= 1")
        if self.min_layer_total < 0:
            raise ConfigError("min_layer_total must be >= 0")
        if self.weight_average not in ("validated", "all"):
            raise ConfigError("weight_average must be 'validated' or 'all'")
        if self.seed < 0:
            raise ConfigError("seed must be >= 0")
        self.early_span, self.late_span
        return self

    def check_inputs(self) -> None:
        for key in ("taxonomy", "ai_panel", "goods_panel", "services_panel"):
            value = getattr(self, key)
            if not value:
                raise ConfigError(f"{key} is not set")
            if not Path(value).is_file():
                raise InputIOError(f"{key} file not found: {value}")

    def to_text(self) -> str:
        return "".join(f"{f.name} = {_render(getattr(self, f.name))}\n" for f in fields(self))


def _render(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


def _coerce(field: dataclasses.Field, raw):
    kind = field.type
    try:
        if kind == "bool":
            return raw if isinstance(raw, bool) else _parse_bool(raw)
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
    except (TypeError, ValueError):
        raise ConfigError(f"{field.name}: cannot parse {raw!r} as {kind}") from None
    return str(raw).strip()


FIELD_NAMES = tuple(f.name for f in fields(RunConfig))


def read_config_file(path) -> dict[str, str]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise InputIOError(f"config file not found: {path}") from None
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in FIELD_NAMES:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = value
    return values


def make_config(file_values: dict | None = None, overrides: dict | None = None,
                base_dir: Path | None = None) -> RunConfig:
    """Defaults, then config-file values, then overrides; validated.

    Relative input paths from a config file resolve against ``base_dir``.
    """
    merged = {}
    for key, value in (file_values or {}).items():
        if base_dir is not None and key in ("ai_panel", "goods_panel", "services_panel", "taxonomy") \
                and value and not Path(value).is_absolute():
            value = str(base_dir / value)
        merged[key] = value
    merged.update({k: v for k, v in (overrides or {}).items() if v is not None})
    by_name = {f.name: f for f in fields(RunConfig)}
    unknown = set(merged) - set(by_name)
    if unknown:
        raise ConfigError(f"unknown config key {sorted(unknown)[0]!r}")
    return RunConfig(**{k: _coerce(by_name[k], v) for k, v in merged.items()}).check()
