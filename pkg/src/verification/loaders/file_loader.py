"""File-based loaders for run configs and family files."""

import json
import re
from pathlib import Path
from typing import Dict, Iterable, List, Optional

import numpy as np

from ...config import ParamValue, RunConfig
from ...errors import ConfigParse, DimensionMismatch
from ...frames import DomainSubspace, MeasureGrid, VectorFamily
from ...hilbert import AmbientSpace

SCALAR_KEYS = ("case", "family", "levels", "seed", "output_dir")
GRID_KEYS = ("k_grid", "m_grid")


def coerce_value(raw: str) -> ParamValue:
    """
    int if it parses as one, then float, otherwise the stripped string
    """
    text = raw.strip()
    for kind in (int, float):
        try:
            return kind(text)
        except ValueError:
            continue
    return text


def _needs_quotes(text: str) -> bool:
    return text == "" or text != text.strip() or text.startswith('"') or any(c in text for c in '#\n\r')


def quote(text: str) -> str:
    """
    JSON string literal when `text` would not survive the line parser bare
    """
    return json.dumps(text) if _needs_quotes(text) else text


def unquote(raw: str) -> str:
    if len(raw) >= 2 and raw.startswith('"') and raw.endswith('"'):
        try:
            return json.loads(raw)
        except json.JSONDecodeError as e:
            raise ValueError(f"bad quoted string {raw}: {e.msg}")
    return raw


def strip_comment(line: str) -> str:
    """
    Drop a trailing `# comment`, leaving `#` inside double quotes alone
    """
    in_quotes, escaped = False, False
    for i, char in enumerate(line):
        if escaped:
            escaped = False
        elif char == '\\':
            escaped = in_quotes
        elif char == '"':
            in_quotes = not in_quotes
        elif char == '#' and not in_quotes:
            return line[:i]
    return line


def _format_value(value: ParamValue) -> str:
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, str) and (_needs_quotes(value) or not isinstance(coerce_value(value), str)):
        return json.dumps(value)
    return str(value)


class ConfigFileLoader:
    """
    Reads and writes `key = value` run configs
    """

    def __init__(self, path: Optional[str] = None):
        self.path = Path(path) if path else None
        self.entry_pattern = re.compile(r'^([A-Za-z_][\w.]*)\s*=\s*(.*?)\s*$')

    def load(self) -> RunConfig:
        if self.path is None:
            raise ConfigParse("No config path given")
        try:
            with open(self.path, 'r', encoding='utf-8') as f:
                return self.parse_config(f)
        except FileNotFoundError:
            raise ConfigParse(f"Config file {self.path} not found")

    def parse_config(self, file: Iterable[str]) -> RunConfig:
        config = RunConfig()
        seen = set()
        for line_num, line in enumerate(file, 1):
            line = strip_comment(line).strip()
            if not line:
                continue

            match = self.entry_pattern.match(line)
            if not match:
                raise ConfigParse(f"Invalid syntax at line {line_num}: {line}")
            key, value = match.groups()
            if key in seen:
                raise ConfigParse(f"Duplicate key '{key}' at line {line_num}")
            seen.add(key)

            try:
                self._apply(config, key, value)
            except ValueError as e:
                raise ConfigParse(f"Invalid value for '{key}' at line {line_num}: {str(e)}")
        return config

    def _apply(self, config: RunConfig, key: str, value: str) -> None:
        if key.startswith("param."):
            name = key[len("param."):]
            if not name:
                raise ValueError("empty parameter name")
            config.params[name] = unquote(value) if value.startswith('"') else coerce_value(value)
        elif key in ("case", "family", "output_dir"):
            setattr(config, key, unquote(value))
        elif key in ("levels", "seed"):
            setattr(config, key, int(value))
        elif key in GRID_KEYS:
            setattr(config, key, tuple(float(v) for v in value.split(',') if v.strip()))
        elif key == "fn_pairs":
            pairs = []
            for item in value.split(','):
                g, sep, h = item.strip().partition(':')
                if not sep or not g or not h:
                    raise ValueError(f"expected g:h pairs, got '{item.strip()}'")
                pairs.append((g.strip(), h.strip()))
            config.fn_pairs = tuple(pairs)
        else:
            raise ValueError(f"unknown key '{key}'")

    def emit_config(self, config: RunConfig) -> str:
        lines = []
        for key in SCALAR_KEYS:
            value = getattr(config, key)
            if value is not None:
                lines.append(f"{key} = {quote(value) if isinstance(value, str) else value}")
        for name, value in config.params.items():
            lines.append(f"param.{name} = {_format_value(value)}")
        for key in GRID_KEYS:
            grid = getattr(config, key)
            if grid:
                lines.append(f"{key} = {','.join(repr(float(v)) for v in grid)}")
        if config.fn_pairs:
            lines.append(f"fn_pairs = {','.join(f'{g}:{h}' for g, h in config.fn_pairs)}")
        return "\n".join(lines) + "\n"


def parse_config(text: str) -> RunConfig:
    return ConfigFileLoader().parse_config(text.splitlines())


def emit_config(config: RunConfig) -> str:
    return ConfigFileLoader().emit_config(config)


class FamilyFileLoader:
    """
    Loads a family from JSON: {dim, points, weights, vectors, domain?}

    Every vector is a list of [re, im] pairs, one per coordinate.
    """

    def __init__(self, path: str):
        self.path = Path(path)

    @staticmethod
    def _vectors(rows: List, dim: int, field: str) -> np.ndarray:
        out = np.zeros((len(rows), dim), dtype=complex)
        for i, row in enumerate(rows):
            if len(row) != dim:
                raise DimensionMismatch(f"{field}[{i}] has {len(row)} coordinates, expected {dim}")
            for k, pair in enumerate(row):
                re_part, im_part = pair
                out[i, k] = complex(float(re_part), float(im_part))
        return out

    def parse(self, data: Dict) -> VectorFamily:
        try:
            dim = int(data["dim"])
            vectors = self._vectors(data["vectors"], dim, "vectors")
            points = data.get("points", list(range(len(vectors))))
            weights = data.get("weights", [1.0] * len(vectors))
        except KeyError as e:
            raise ConfigParse(f"Family file {self.path} is missing field {str(e)}")
        except (TypeError, ValueError) as e:
            raise ConfigParse(f"Family file {self.path} is malformed: {str(e)}")

        domain = None
        if data.get("domain"):
            domain = DomainSubspace(self._vectors(data["domain"], dim, "domain"))
        return VectorFamily(MeasureGrid(points, weights), vectors, AmbientSpace(dim), domain)

    def load(self) -> VectorFamily:
        try:
            with open(self.path, 'r', encoding='utf-8') as f:
                data = json.load(f)
        except FileNotFoundError:
            raise ConfigParse(f"Family file {self.path} not found")
        except json.JSONDecodeError as e:
            raise ConfigParse(f"Family file {self.path} is not valid JSON at line {e.lineno}: {e.msg}")
        return self.parse(data)
