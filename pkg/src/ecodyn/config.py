"""Scenario configuration: flat ``key = value`` files and the built-in presets.

Example::

    name = S1
    a1 = 4.5
    ...
    p = 0.047
    init = 50, 40, 80        # may be repeated
    t_end = 1000
    analyses = equilibria, stability, persistence
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field, replace
from pathlib import Path

from .dynamics import IntegratorOptions
from .errors import ParseError, ValidationError
from .model import PARAM_NAMES, ModelParams, PopulationState
from .presets import PRESET_INITIAL_CONDITIONS, PRESET_PARAMS

ANALYSES = ("equilibria", "stability", "global", "persistence", "simulate")
PRESET_DIR_ENV = "ECODYN_PRESET_DIR"

_INTEGRATOR_KEYS = {
    "t_end": "t_end",
    "rtol": "rel_tol",
    "atol": "abs_tol",
    "max_step": "max_step",
    "output_stride": "output_stride",
}
_SCALAR_KEYS = {"x_max", "samples"}
_KNOWN = set(PARAM_NAMES) | set(_INTEGRATOR_KEYS) | _SCALAR_KEYS | {"name", "init", "analyses", "gamma"}


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    params: ModelParams
    initial_conditions: tuple[PopulationState, ...] = ()
    integrator: IntegratorOptions | None = None
    analyses: frozenset[str] = frozenset(ANALYSES[:4])
    gammas: tuple[float, float, float] = (1.0, 1.0, 1.0)
    x_max: float | None = None
    n_samples: int = 1000

    def __post_init__(self):
        if not self.name:
            raise ValidationError("scenario name must be nonempty")
        unknown = set(self.analyses) - set(ANALYSES)
        if unknown:
            raise ValidationError(f"unknown analyses: {sorted(unknown)}")
        if "simulate" in self.analyses and not self.initial_conditions:
            raise ValidationError("simulate requires at least one initial condition")
        if any(min(ic) < 0 for ic in self.initial_conditions):
            raise ValidationError("initial conditions must be nonnegative")
        if not all(g > 0 for g in self.gammas):
            raise ValidationError("gamma weights must be positive")
        if self.n_samples < 1:
            raise ValidationError("samples must be >= 1")
        if self.x_max is not None and not self.x_max > 0:
            raise ValidationError("x_max must be > 0")


def _floats(text, line, key, n=None):
    parts = [s.strip() for s in text.split(",")]
    try:
        vals = [float(s) for s in parts]
    except ValueError:
        raise ParseError(f"expected number(s), got {text!r}", line, key) from None
    if n is not None and len(vals) != n:
        raise ParseError(f"expected {n} comma-separated numbers, got {len(vals)}", line, key)
    if not all(math.isfinite(v) for v in vals):
        raise ParseError(f"non-finite value in {text!r}", line, key)
    return vals


def parse_config(text: str, default_name: str = "scenario") -> ScenarioConfig:
    """Parse configuration text; unknown or duplicated keys are errors."""
    seen: dict[str, tuple[str, int]] = {}
    inits: list[PopulationState] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"expected 'key = value', got {raw.strip()!r}", lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _KNOWN:
            raise ParseError("unknown key", lineno, key)
        if not value:
            raise ParseError("missing value", lineno, key)
        if key == "init":
            vals = _floats(value, lineno, key, 3)
            if min(vals) < 0:
                raise ValidationError(f"line {lineno}: initial condition must be nonnegative")
            inits.append(PopulationState(*vals))
            continue
        if key in seen:
            raise ParseError(f"duplicate key (first on line {seen[key][1]})", lineno, key)
        seen[key] = (value, lineno)

    def num(key):
        value, lineno = seen[key]
        return _floats(value, lineno, key, 1)[0]

    missing = [k for k in PARAM_NAMES if k not in seen]
    if missing:
        raise ValidationError(f"missing model parameters: {', '.join(missing)}")
    params = ModelParams(**{k: num(k) for k in PARAM_NAMES})

    integrator = None
    opts = {attr: num(key) for key, attr in _INTEGRATOR_KEYS.items() if key in seen}
    if opts:
        try:
            integrator = IntegratorOptions(**opts)
        except ValueError as exc:
            raise ValidationError(str(exc)) from None

    kwargs = {}
    if "analyses" in seen:
        value, lineno = seen["analyses"]
        names = [s.strip() for s in value.split(",") if s.strip()]
        bad = [s for s in names if s not in ANALYSES]
        if bad:
            raise ParseError(f"unknown analyses {bad}", lineno, "analyses")
        kwargs["analyses"] = frozenset(names)
    if "gamma" in seen:
        value, lineno = seen["gamma"]
        kwargs["gammas"] = tuple(_floats(value, lineno, "gamma", 3))
    if "x_max" in seen:
        kwargs["x_max"] = num("x_max")
    if "samples" in seen:
        s = num("samples")
        if s != int(s):
            raise ParseError("samples must be an integer", seen["samples"][1], "samples")
        kwargs["n_samples"] = int(s)
    name = seen["name"][0] if "name" in seen else default_name
    return ScenarioConfig(name, params, tuple(inits), integrator, **kwargs)


def load_config(path) -> ScenarioConfig:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    return parse_config(text, default_name=path.stem)


def builtin_preset(name: str) -> ScenarioConfig:
    if name not in PRESET_PARAMS:
        raise ValidationError(f"unknown preset {name!r}; choose from {sorted(PRESET_PARAMS)}")
    return ScenarioConfig(
        name,
        PRESET_PARAMS[name],
        tuple(PRESET_INITIAL_CONDITIONS[name]),
        analyses=frozenset(ANALYSES),
    )


def load_preset(name: str) -> ScenarioConfig:
    """Resolve ``name`` in ``$ECODYN_PRESET_DIR`` (``<name>.cfg``) first, then built-ins."""
    user_dir = os.environ.get(PRESET_DIR_ENV)
    if user_dir:
        candidate = Path(user_dir) / f"{name}.cfg"
        if candidate.is_file():
            return load_config(candidate)
    return builtin_preset(name)


def format_config(cfg: ScenarioConfig) -> str:
    """Serialize a scenario back to the ``key = value`` format."""
    lines = [f"name = {cfg.name}"]
    lines += [f"{k} = {getattr(cfg.params, k)!r}" for k in PARAM_NAMES]
    lines += [f"init = {ic.x!r}, {ic.y!r}, {ic.z!r}" for ic in cfg.initial_conditions]
    if cfg.integrator is not None:
        for key, attr in _INTEGRATOR_KEYS.items():
            lines.append(f"{key} = {getattr(cfg.integrator, attr)!r}")
    lines.append("analyses = " + ", ".join(a for a in ANALYSES if a in cfg.analyses))
    lines.append("gamma = " + ", ".join(repr(g) for g in cfg.gammas))
    if cfg.x_max is not None:
        lines.append(f"x_max = {cfg.x_max!r}")
    lines.append(f"samples = {cfg.n_samples}")
    return "\n".join(lines) + "\n"


def with_overrides(cfg: ScenarioConfig, **changes) -> ScenarioConfig:
    return replace(cfg, **{k: v for k, v in changes.items() if v is not None})
