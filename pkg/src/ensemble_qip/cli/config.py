"""Flat ``key = value [unit]`` scenario configuration.

Example::

    # Fig. 4(a) parameters
    g = 34 MHz_2pi
    kappa = 4.1 MHz_2pi
    sweep_count = 12

Frequencies are stored as angular frequency (rad/s); ``MHz_2pi`` means the
quoted number is omega/2pi in MHz. Lengths are stored in metres.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Any, Callable, Optional

from ..errors import ConfigError

TWO_PI = 2 * math.pi

UNITS = {
    "frequency": {
        "rad_s": 1.0,
        "Hz_2pi": TWO_PI,
        "kHz_2pi": TWO_PI * 1e3,
        "MHz_2pi": TWO_PI * 1e6,
        "GHz_2pi": TWO_PI * 1e9,
    },
    "length": {"m": 1.0, "mm": 1e-3, "um": 1e-6, "nm": 1e-9},
    "c3": {
        "rad_s_m3": 1.0,
        "MHz_2pi_um3": TWO_PI * 1e6 * 1e-18,
        "GHz_2pi_um3": TWO_PI * 1e9 * 1e-18,
    },
    "time": {"s": 1.0, "ms": 1e-3, "us": 1e-6, "ns": 1e-9},
}
# unit used when echoing a resolved value
DISPLAY_UNIT = {"frequency": "MHz_2pi", "length": "um", "c3": "MHz_2pi_um3", "time": "us"}
SI_UNIT = {"frequency": "rad_s", "length": "m", "c3": "rad_s_m3", "time": "s"}
NUMERIC_KINDS = {"float", "frequency", "length", "c3", "time"}


@dataclass(frozen=True)
class Key:
    name: str
    kind: str  # float | int | bool | str | ints | frequency | length | c3 | time
    default: Any = None
    help: str = ""
    check: Optional[Callable[[Any], Optional[str]]] = None

    def describe(self) -> str:
        unit = f" [{DISPLAY_UNIT[self.kind]}]" if self.kind in DISPLAY_UNIT else ""
        default = "required" if self.default is None else f"default {format_value(self, self.default)}"
        return f"{self.name}{unit}: {self.help} ({default})"


def positive(v):
    return None if v > 0 else "must be > 0"


def non_negative(v):
    return None if v >= 0 else "must be >= 0"


def probability(v):
    return None if 0 < v <= 1 else "must be in (0, 1]"


def one_of(*options):
    def check(v):
        return None if v in options else f"must be one of {', '.join(options)}"

    return check


SWEEP_KEYS = ("sweep_start", "sweep_stop", "sweep_count", "sweep_scale")
COMMON_KEYS = ("seed", "output")


@dataclass(frozen=True)
class SweepSpec:
    start: float
    stop: float
    count: int
    scale: str = "linear"

    def values(self) -> list:
        if self.count <= 0:
            return []
        if self.count == 1:
            return [self.start]
        if self.scale == "log":
            if self.start <= 0 or self.stop <= 0:
                raise ConfigError("log sweeps need positive start and stop")
            r = (self.stop / self.start) ** (1 / (self.count - 1))
            return [self.start * r**k for k in range(self.count)]
        step = (self.stop - self.start) / (self.count - 1)
        return [self.start + step * k for k in range(self.count)]


@dataclass
class ScenarioConfig:
    scenario: str
    params: dict
    output: Optional[str] = None
    seed: int = 0
    sweep: Optional[SweepSpec] = None
    explicit: set = field(default_factory=set)

    def __getitem__(self, key):
        return self.params[key]


_LINE = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*=\s*(.*?)\s*$")


def _strip_comment(line: str) -> str:
    return line.split("#", 1)[0]


def _to_number(text: str, lineno: int, key: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"line {lineno}: {key}: cannot parse number {text!r}") from None


def convert(key: Key, raw: str, lineno: int = 0):
    raw = raw.strip()
    if key.kind == "str":
        return raw.strip("\"'")
    if key.kind == "bool":
        low = raw.lower()
        if low in ("true", "yes", "1", "on"):
            return True
        if low in ("false", "no", "0", "off"):
            return False
        raise ConfigError(f"line {lineno}: {key.name}: expected a boolean, got {raw!r}")
    if key.kind == "int":
        try:
            return int(raw)
        except ValueError:
            raise ConfigError(f"line {lineno}: {key.name}: expected an integer, got {raw!r}") from None
    if key.kind == "ints":
        try:
            return tuple(int(x) for x in raw.replace(" ", "").split(",") if x)
        except ValueError:
            raise ConfigError(f"line {lineno}: {key.name}: expected comma-separated integers") from None
    parts = raw.split()
    if not parts or len(parts) > 2:
        raise ConfigError(f"line {lineno}: {key.name}: expected '<number> [unit]', got {raw!r}")
    value = _to_number(parts[0], lineno, key.name)
    if len(parts) == 2:
        unit = parts[1]
        table = UNITS.get(key.kind)
        if table is None or unit not in table:
            kind = next((k for k, t in UNITS.items() if unit in t), None)
            if kind is None:
                raise ConfigError(f"line {lineno}: {key.name}: unknown unit {unit!r}")
            raise ConfigError(f"line {lineno}: {key.name}: unit mismatch, {unit!r} is a {kind} unit but {key.name} is {key.kind}")
        value *= table[unit]
    return value


def format_value(key: Key, value) -> str:
    if value is None:
        return "none"
    if key.kind in DISPLAY_UNIT:
        unit = DISPLAY_UNIT[key.kind]
        return f"{value / UNITS[key.kind][unit]:.12g} {unit}"
    if key.kind == "ints":
        return ",".join(str(v) for v in value)
    if key.kind == "bool":
        return "true" if value else "false"
    if key.kind == "float":
        return f"{value:.12g}"
    return str(value)


def parse_lines(text: str) -> list:
    """``[(lineno, key, raw_value)]`` from config text; raises on malformed lines."""
    out = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = _strip_comment(line)
        if not body.strip():
            continue
        m = _LINE.match(body)
        if not m:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line.strip()!r}")
        out.append((lineno, m.group(1), m.group(2)))
    return out


def parse_config(text: str, scenario: str, keys: dict, sweep_kind: Optional[str] = None, sweep_default=None) -> ScenarioConfig:
    """Parse and validate config text for one scenario.

    ``keys`` maps names to :class:`Key`. Sweep keys are accepted only when the
    scenario declares a swept quantity (``sweep_kind``); ``sweep_default`` is a
    :class:`SweepSpec` in SI units.
    """
    sweep_keys = {}
    if sweep_kind is not None:
        d = sweep_default or SweepSpec(0.0, 0.0, 0)
        sweep_keys = {
            "sweep_start": Key("sweep_start", sweep_kind, d.start, "first sweep value"),
            "sweep_stop": Key("sweep_stop", sweep_kind, d.stop, "last sweep value"),
            "sweep_count": Key("sweep_count", "int", d.count, "number of sweep points", non_negative),
            "sweep_scale": Key("sweep_scale", "str", d.scale, "linear or log", one_of("linear", "log")),
        }
    common = {
        "seed": Key("seed", "int", 0, "random seed", non_negative),
        "output": Key("output", "str", "", "CSV output path"),
    }
    allowed = {**keys, **sweep_keys, **common}
    values, explicit = {}, set()
    for lineno, name, raw in parse_lines(text):
        key = allowed.get(name)
        if key is None:
            raise ConfigError(f"line {lineno}: unknown key {name!r} for scenario {scenario}")
        values[name] = convert(key, raw, lineno)
        explicit.add(name)
    for name, key in allowed.items():
        if name not in values:
            if key.default is None:
                raise ConfigError(f"missing required key {name!r} for scenario {scenario}")
            values[name] = key.default
        if key.check is not None and values[name] is not None:
            problem = key.check(values[name])
            if problem:
                shown = values[name] if key.kind in SI_UNIT else format_value(key, values[name])
                unit = f" {SI_UNIT[key.kind]}" if key.kind in SI_UNIT else ""
                raise ConfigError(f"invalid {name}: {problem} (got {shown}{unit})")
    sweep = None
    if sweep_kind is not None:
        sweep = SweepSpec(values.pop("sweep_start"), values.pop("sweep_stop"), values.pop("sweep_count"), values.pop("sweep_scale"))
    seed = values.pop("seed")
    output = values.pop("output") or None
    return ScenarioConfig(scenario, values, output, seed, sweep, explicit)


def echo_lines(cfg: ScenarioConfig, keys: dict, sweep_kind: Optional[str] = None) -> list:
    """Full resolved configuration as ``key = value unit`` lines (deterministic order)."""
    lines = [f"scenario = {cfg.scenario}", f"seed = {cfg.seed}"]
    for name in sorted(keys):
        lines.append(f"{name} = {format_value(keys[name], cfg.params[name])}")
    if cfg.sweep is not None:
        k = Key("sweep", sweep_kind)
        lines += [
            f"sweep_start = {format_value(k, cfg.sweep.start)}",
            f"sweep_stop = {format_value(k, cfg.sweep.stop)}",
            f"sweep_count = {cfg.sweep.count}",
            f"sweep_scale = {cfg.sweep.scale}",
        ]
    return lines
