"""Scenario configuration: a flat TOML document with optional sections.

Section headers only group keys; every key must be a :class:`ScenarioConfig`
field and may appear once.  ``omega`` and ``delta`` are in units of ``g``.
"""

from __future__ import annotations

import dataclasses
import math
import sys
from dataclasses import dataclass

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import ConfigError

SCENARIOS = ("rabi", "vacuum-rabi", "collapse-thermal", "collapse-revival",
             "spectrum", "swap", "epr", "rwa-check")
FIELD_KINDS = ("fock", "coherent", "thermal")
ATOM_KINDS = ("e", "g", "bloch")
FORMATS = ("csv", "json")
CONVENTIONS = ("standard", "real")


@dataclass(frozen=True)
class HarochePreset:
    """Constants of the 1996 Rydberg-atom Rabi-oscillation experiment (read-only).

    Only ``mean_n`` enters a simulation (as a coherent field); the rest is
    documentation, since no dissipation is modelled.
    """

    name: str
    mean_n: float
    g_hz: float = 1.6e5
    transition_ghz: float = 51.0
    rabi_vacuum_khz: float = 47.0


HAROCHE_PRESETS = {
    "haroche-A": HarochePreset("haroche-A", 0.0),
    "haroche-B": HarochePreset("haroche-B", 0.40),
    "haroche-C": HarochePreset("haroche-C", 0.85),
    "haroche-D": HarochePreset("haroche-D", 1.77),
}


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: str
    g: float = 1.0
    omega: float = 1000.0
    delta: float = 0.0
    field: str = "fock"
    n: int = 0
    alpha: float = 0.0
    mean_n: float = 0.0
    atom: str = "e"
    atom_theta: float = 0.0
    atom_phi: float = 0.0
    t_max: float = 64.0
    samples: int = 4096
    n_max: int | None = None
    tail_tol: float = 1e-10
    window_start: float = 20.0
    window_stop: float = 40.0
    threshold: float = 0.05
    convention: str = "standard"
    preset: str | None = None
    out: str = "out"
    format: str = "csv"


FIELDS = {f.name: f for f in dataclasses.fields(ScenarioConfig)}
_INT_KEYS = {"n", "samples", "n_max"}
_STR_KEYS = {"scenario", "field", "atom", "convention", "preset", "out", "format"}

SCENARIO_DEFAULTS = {
    "rabi": {"field": "fock", "n": 0, "t_max": 20.0, "samples": 2001},
    "vacuum-rabi": {"field": "fock", "n": 0, "atom": "e", "t_max": 20.0, "samples": 2001},
    "collapse-thermal": {"field": "thermal", "mean_n": 10.0, "n_max": 120, "tail_tol": 1e-4,
                         "window_start": 20.0, "window_stop": 40.0},
    "collapse-revival": {"field": "coherent", "alpha": 5.0,
                         "window_start": 5.0, "window_stop": 25.0},
    "spectrum": {"field": "coherent", "preset": "haroche-C"},
    "swap": {"atom": "bloch", "atom_theta": math.pi / 2, "n_max": 2,
             "t_max": math.pi / 2, "samples": 201},
    "epr": {"n_max": 3, "convention": "real"},
    "rwa-check": {"field": "fock", "n": 0, "atom": "e", "n_max": 20,
                  "t_max": 20.0, "samples": 2001},
}


def _check_type(key: str, value):
    if key in _STR_KEYS:
        if not isinstance(value, str):
            raise ConfigError(f"{key}: expected a string, got {value!r}")
        return value
    if isinstance(value, bool):
        raise ConfigError(f"{key}: expected a number, got {value!r}")
    if key in _INT_KEYS:
        if isinstance(value, float) and value.is_integer():
            value = int(value)
        if not isinstance(value, int):
            raise ConfigError(f"{key}: expected an integer, got {value!r}")
        return value
    if not isinstance(value, (int, float)):
        raise ConfigError(f"{key}: expected a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise ConfigError(f"{key}: must be finite, got {value!r}")
    return value


def _flatten(doc: dict) -> dict:
    flat = {}
    for key, value in doc.items():
        items = value.items() if isinstance(value, dict) else [(key, value)]
        for k, v in items:
            if isinstance(v, dict):
                raise ConfigError(f"{key}.{k}: nested sections are not supported")
            if k in flat:
                raise ConfigError(f"{k}: given more than once")
            flat[k] = v
    return flat


def _validate(cfg: ScenarioConfig) -> None:
    def need(cond, key, msg):
        if not cond:
            raise ConfigError(f"{key}: {msg}, got {getattr(cfg, key)!r}")

    need(cfg.scenario in SCENARIOS, "scenario", f"must be one of {SCENARIOS}")
    need(cfg.g > 0, "g", "must be > 0")
    need(cfg.omega > 0, "omega", "must be > 0")
    need(cfg.omega + cfg.delta > 0, "delta", "must keep the atomic frequency positive")
    need(cfg.field in FIELD_KINDS, "field", f"must be one of {FIELD_KINDS}")
    need(cfg.n >= 0, "n", "must be >= 0")
    need(cfg.alpha >= 0, "alpha", "must be >= 0 (modulus of the coherent amplitude)")
    need(cfg.mean_n >= 0, "mean_n", "must be >= 0")
    need(cfg.atom in ATOM_KINDS, "atom", f"must be one of {ATOM_KINDS}")
    need(cfg.t_max > 0, "t_max", "must be > 0")
    need(cfg.samples >= 2, "samples", "must be >= 2")
    need(cfg.n_max is None or cfg.n_max >= 1, "n_max", "must be >= 1")
    need(cfg.n_max is None or cfg.field != "fock" or cfg.n <= cfg.n_max, "n",
         "must not exceed n_max")
    need(0 < cfg.tail_tol < 1, "tail_tol", "must lie in (0, 1)")
    need(cfg.window_stop > cfg.window_start, "window_stop", "must exceed window_start")
    need(0 < cfg.threshold < 1, "threshold", "must lie in (0, 1)")
    need(cfg.convention in CONVENTIONS, "convention", f"must be one of {CONVENTIONS}")
    need(cfg.preset is None or cfg.preset in HAROCHE_PRESETS, "preset",
         f"must be one of {tuple(HAROCHE_PRESETS)}")
    need(bool(cfg.out), "out", "must be a non-empty path")
    need(cfg.format in FORMATS, "format", f"must be one of {FORMATS}")


def build_config(values: dict) -> ScenarioConfig:
    """Fill defaults (base, then scenario, then preset) under ``values`` and validate.

    A ``None`` value counts as unset.
    """
    values = {k: v for k, v in values.items() if v is not None}
    unknown = sorted(set(values) - set(FIELDS))
    if unknown:
        raise ConfigError(f"{unknown[0]}: unknown key")
    if "scenario" not in values:
        raise ConfigError("scenario: missing required key")
    scenario = _check_type("scenario", values["scenario"])
    if scenario not in SCENARIOS:
        raise ConfigError(f"scenario: must be one of {SCENARIOS}, got {scenario!r}")
    merged = dict(SCENARIO_DEFAULTS[scenario])
    preset = values.get("preset", merged.get("preset"))
    if preset is not None:
        if preset not in HAROCHE_PRESETS:
            raise ConfigError(f"preset: must be one of {tuple(HAROCHE_PRESETS)}, got {preset!r}")
        merged.update(field="coherent", alpha=math.sqrt(HAROCHE_PRESETS[preset].mean_n))
    merged.update(values)
    typed = {k: (v if v is None else _check_type(k, v)) for k, v in merged.items()}
    cfg = ScenarioConfig(**typed)
    _validate(cfg)
    return cfg


def parse_values(text: str) -> dict:
    """Flattened key/value pairs of a TOML document, without defaults."""
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"parse error: {exc}") from None
    return _flatten(doc)


def parse_config(text: str) -> ScenarioConfig:
    """Parse and validate a TOML scenario document."""
    return build_config(parse_values(text))


def read_values(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_values(text)


def load_config(path) -> ScenarioConfig:
    return build_config(read_values(path))


def _toml_string(text: str) -> str:
    out = []
    for ch in text:
        if ch in '"\\':
            out.append("\\" + ch)
        elif ord(ch) < 0x20 or ord(ch) == 0x7F:
            out.append(f"\\u{ord(ch):04x}")
        else:
            out.append(ch)
    return '"' + "".join(out) + '"'


def _toml_value(value) -> str:
    if isinstance(value, str):
        return _toml_string(value)
    return repr(value)


def serialize(cfg: ScenarioConfig) -> str:
    """Flat TOML text that :func:`parse_config` maps back to ``cfg``."""
    lines = []
    for name in FIELDS:
        value = getattr(cfg, name)
        if value is not None:
            lines.append(f"{name} = {_toml_value(value)}")
    return "\n".join(lines) + "\n"
