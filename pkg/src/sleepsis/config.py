"""
Experiment configuration: a small ``key = value`` format with ``[section]``
headers and ``#`` comments.

Example::

    command = threshold

    [graph]
    n = 1000
    m = 2
    seed = 0

    [model]
    gamma = 0.5
    u = 0.3
    v = 0.7
"""
import os
from dataclasses import dataclass, fields

from .exceptions import DegenerateSchedulingError, ValidationError
from .params import ModelParams

COMMANDS = ("generate-graph", "run-mmc", "run-mc", "temporal", "sweep-beta", "sweep-gamma",
            "sweep-ratio", "threshold")


class ConfigError(ValidationError):
    pass


def _grid(start, stop, step):
    count = int(round((stop - start) / step))
    return tuple(round(start + i * step, 10) for i in range(count + 1))


@dataclass(frozen=True)
class ExperimentSpec:
    command: str
    n: int = 1000
    m: int = 2
    graph_seed: int = 0
    edges: str = ""
    beta: float = 0.5
    gamma: float = 0.3
    u: float = 0.3
    v: float = 0.7
    steps: int = 1000
    seeds: int = 10
    runs: int = 50
    sim_seed: int = 0
    init_active: str = "stationary"
    max_steps: int = 10_000
    settle_tol: float = 1e-9
    betas: tuple = ()
    gammas: tuple = _grid(0.1, 0.9, 0.1)
    schedules: tuple = ((0.3, 0.7), (0.5, 0.5), (0.7, 0.3))
    u_values: tuple = _grid(0.2, 0.7, 0.1)
    v_values: tuple = _grid(0.2, 0.7, 0.1)
    detection_eps: float = 0.005
    tail_fraction: float = 0.25
    out: str = "."
    jobs: int = 1

    @property
    def params(self):
        return ModelParams(self.beta, self.gamma, self.u, self.v)


# section -> key -> (field, kind)
SCHEMA = {
    "": {"command": ("command", "command")},
    "graph": {"n": ("n", "pos_int"), "m": ("m", "pos_int"), "seed": ("graph_seed", "nonneg_int"),
              "edges": ("edges", "path")},
    "model": {"beta": ("beta", "prob"), "gamma": ("gamma", "prob"), "u": ("u", "prob"), "v": ("v", "prob")},
    "run": {"steps": ("steps", "nonneg_int"), "seeds": ("seeds", "nonneg_int"), "runs": ("runs", "pos_int"),
            "sim_seed": ("sim_seed", "nonneg_int"), "init_active": ("init_active", "init_active"),
            "max_steps": ("max_steps", "nonneg_int"), "settle_tol": ("settle_tol", "nonneg_float")},
    "sweep": {"betas": ("betas", "prob_list"), "gammas": ("gammas", "prob_list"),
              "schedules": ("schedules", "pair_list"), "u_values": ("u_values", "prob_list"),
              "v_values": ("v_values", "prob_list"), "detection_eps": ("detection_eps", "pos_float"),
              "tail_fraction": ("tail_fraction", "unit_float")},
    "output": {"out": ("out", "str"), "jobs": ("jobs", "jobs")},
}
FIELD_KIND = {fld: kind for sec in SCHEMA.values() for fld, kind in sec.values()}
FIELD_LOCATION = {fld: (sec, key) for sec, keys in SCHEMA.items() for key, (fld, _) in keys.items()}


def _prob(key, x):
    x = float(x)
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"{key} must lie in [0, 1], got {x}")
    return x


def convert(key, kind, raw):
    """Convert a raw string to the typed field value; raises ValueError."""
    raw = raw.strip()
    if kind == "command":
        if raw not in COMMANDS:
            raise ValueError(f"unknown command {raw!r}; expected one of {', '.join(COMMANDS)}")
        return raw
    if kind in ("pos_int", "nonneg_int", "jobs"):
        try:
            x = int(raw)
        except ValueError:
            raise ValueError(f"{key} must be an integer, got {raw!r}") from None
        if kind == "pos_int" and x < 1 or kind == "nonneg_int" and x < 0 or kind == "jobs" and x == 0:
            raise ValueError(f"{key} out of range: {x}")
        return x
    if kind in ("prob", "pos_float", "nonneg_float", "unit_float"):
        try:
            x = float(raw)
        except ValueError:
            raise ValueError(f"{key} must be a number, got {raw!r}") from None
        if kind == "prob":
            return _prob(key, x)
        if kind == "pos_float" and not x > 0 or kind == "nonneg_float" and not x >= 0:
            raise ValueError(f"{key} out of range: {x}")
        if kind == "unit_float" and not 0 < x <= 1:
            raise ValueError(f"{key} must lie in (0, 1], got {x}")
        return x
    if kind == "prob_list":
        try:
            return tuple(_prob(key, float(p)) for p in raw.split(",") if p.strip())
        except ValueError as exc:
            raise ValueError(f"{key}: {exc}") from None
    if kind == "pair_list":
        pairs = []
        for item in raw.split(","):
            if not item.strip():
                continue
            try:
                a, b = item.split(":")
                pairs.append((_prob(key, float(a)), _prob(key, float(b))))
            except ValueError:
                raise ValueError(f"{key}: expected 'u:v' pairs, got {item.strip()!r}") from None
        return tuple(pairs)
    if kind == "init_active":
        if raw not in ("stationary", "all_active"):
            raise ValueError(f"{key} must be 'stationary' or 'all_active', got {raw!r}")
        return raw
    if kind == "path":
        if raw and not os.path.isfile(raw):
            raise ValueError(f"{key}: file not found: {raw}")
        return raw
    return raw


def parse_config(text, overrides=None, source="<config>"):
    """Parse a config document into an :class:`ExperimentSpec`.

    ``overrides`` maps field names to already-typed values (e.g. CLI flags)
    and wins over the document. Errors name the key and line number.
    """
    values, lines = {}, {}
    section = ""
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            if section not in SCHEMA:
                raise ConfigError(f"{source}:{lineno}: unknown section [{section}]")
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {line!r}")
        key, raw_value = (s.strip() for s in line.split("=", 1))
        if key not in SCHEMA[section]:
            where = f"[{section}]" if section else "top level"
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r} in {where}")
        fld, kind = SCHEMA[section][key]
        try:
            values[fld] = convert(key, kind, raw_value)
        except ValueError as exc:
            raise ConfigError(f"{source}:{lineno}: {exc}") from None
        lines[fld] = lineno
    for fld, value in (overrides or {}).items():
        if value is None:
            continue
        if fld not in FIELD_KIND:
            raise ConfigError(f"unknown setting {fld!r}")
        values[fld] = value
        lines.pop(fld, None)
    if "command" not in values:
        raise ConfigError(f"{source}: missing required key 'command'")
    spec = ExperimentSpec(**values)
    try:
        spec.params
    except DegenerateSchedulingError as exc:
        where = ", ".join(f"line {lines[k]}" for k in ("u", "v") if k in lines)
        raise DegenerateSchedulingError(f"{source}: u, v: {exc}" + (f" ({where})" if where else "")) from None
    except ValidationError as exc:
        raise ConfigError(f"{source}: {exc}") from None
    return spec


def _format(kind, value):
    if kind in ("prob", "pos_float", "nonneg_float", "unit_float"):
        return repr(float(value))
    if kind == "prob_list":
        return ", ".join(repr(float(x)) for x in value)
    if kind == "pair_list":
        return ", ".join(f"{float(a)!r}:{float(b)!r}" for a, b in value)
    return str(value)


def to_config_text(spec):
    """Render ``spec`` as a config document that parses back to an equal spec."""
    out = []
    for sec, keys in SCHEMA.items():
        if sec:
            out.append(f"\n[{sec}]")
        for key, (fld, kind) in keys.items():
            value = getattr(spec, fld)
            if kind == "path" and not value:
                continue
            out.append(f"{key} = {_format(kind, value)}")
    return "\n".join(out) + "\n"


def spec_fields():
    return [f.name for f in fields(ExperimentSpec)]
