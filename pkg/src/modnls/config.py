"""Line-oriented config parsing and per-driver validation.

Grammar: ``[section]`` headers, ``key = value`` assignments, ``#``
comments.  Numbers accept plain float literals plus the form ``e^-3``
for exp(-3), which keeps the concentration sweeps exact.  Every key is
validated against the subcommand's schema before any computation starts;
unknown keys are errors.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .evolution import EvolutionError
from .experiments import ExperimentError, check_admissible_pair
from .scaling import ScalingError, compute_scaling
from .singular import SingularProbeError
from .spectral import SpectralError, make_grid
from .symbols import (
    BOUNDED,
    HOMOGENEOUS,
    Symbol,
    SymbolError,
    parse_number,
    parse_symbol_spec,
)

__all__ = ["ConfigError", "RunConfig", "parse_config", "render_config", "SUBCOMMANDS"]

SUBCOMMANDS = ("simulate", "inflate", "ode-approx", "strichartz", "singular")


class ConfigError(ValueError):
    """Parse failure or schema violation."""


@dataclass
class RunConfig:
    """A fully validated driver configuration."""

    subcommand: str
    params: dict
    outdir: str = "out"
    seed: int = 0


@dataclass(frozen=True)
class _Key:
    section: str
    name: str
    kind: str  # int | float | float_list | symbol | str
    required: bool = False
    default: object = None


def _common_keys():
    return (
        _Key("output", "dir", "str", default="out"),
        _Key("output", "seed", "int", default=0),
    )


_SCHEMAS: dict[str, tuple[_Key, ...]] = {
    "simulate": (
        _Key("grid", "d", "int", required=True),
        _Key("grid", "n", "int", required=True),
        _Key("grid", "L", "float", required=True),
        _Key("equation", "symbol", "symbol", required=True),
        _Key("equation", "lambda", "float", required=True),
        _Key("equation", "sigma", "float", required=True),
        _Key("equation", "eps", "float", default=1.0),
        _Key("simulate", "dt", "float", required=True),
        _Key("simulate", "T", "float", required=True),
        _Key("simulate", "snapshot_every", "int", default=1),
        _Key("simulate", "dealias", "int", default=0),
        _Key("simulate", "initial", "str", default="gaussian(amplitude=1,width=1)"),
        *_common_keys(),
    ),
    "inflate": (
        _Key("equation", "symbol", "symbol", required=True),
        _Key("equation", "lambda", "float", default=1.0),
        _Key("equation", "sigma", "float", required=True),
        _Key("inflate", "d", "int", required=True),
        _Key("inflate", "s", "float", required=True),
        _Key("inflate", "theta", "float", default=0.05),
        _Key("inflate", "delta", "float", default=0.1),
        _Key("inflate", "omega", "float", default=None),
        _Key("inflate", "h_list", "float_list", required=True),
        _Key("inflate", "grid_n", "int", default=256),
        _Key("inflate", "grid_L", "float", default=8.0),
        _Key("inflate", "rotation_budget", "float", default=0.02),
        _Key("inflate", "min_ratio_growth", "float", default=3.0),
        *_common_keys(),
    ),
    "ode-approx": (
        _Key("equation", "symbol", "symbol", required=True),
        _Key("equation", "lambda", "float", default=1.0),
        _Key("equation", "sigma", "float", required=True),
        _Key("ode-approx", "d", "int", required=True),
        _Key("ode-approx", "s", "float", required=True),
        _Key("ode-approx", "r", "int", required=True),
        _Key("ode-approx", "theta", "float", default=0.05),
        _Key("ode-approx", "delta", "float", default=0.1),
        _Key("ode-approx", "omega", "float", default=None),
        _Key("ode-approx", "eps_list", "float_list", required=True),
        _Key("ode-approx", "grid_n", "int", default=256),
        _Key("ode-approx", "grid_L", "float", default=8.0),
        _Key("ode-approx", "rotation_budget", "float", default=0.02),
        *_common_keys(),
    ),
    "strichartz": (
        _Key("equation", "symbol", "symbol", required=True),
        _Key("strichartz", "d", "int", default=1),
        _Key("strichartz", "p", "float", required=True),
        _Key("strichartz", "q", "float", required=True),
        _Key("strichartz", "N_list", "float_list", required=True),
        _Key("strichartz", "k_grid", "float_list", default=(0.0, 0.25, 0.5)),
        _Key("strichartz", "t_end", "float", default=1.0),
        _Key("strichartz", "box_L", "float", default=4.0),
        _Key("strichartz", "n_ceiling", "int", default=16384),
        _Key("strichartz", "contrast", "int", default=1),
        *_common_keys(),
    ),
    "singular": (
        _Key("singular", "sigma", "float", required=True),
        _Key("singular", "lambda", "float", default=1.0),
        _Key("singular", "t", "float", required=True),
        _Key("singular", "rho_list", "float_list", required=True),
        _Key("singular", "quad_tol", "float", default=1e-9),
        _Key("singular", "amplitude", "float", default=1.0),
        *_common_keys(),
    ),
}

_SECTION_RE = re.compile(r"^\[(?P<name>[A-Za-z0-9_-]+)\]$")
_INITIAL_RE = re.compile(r"^gaussian\((?P<params>.*)\)$|^gaussian$")


def parse_config_text(text: str) -> dict:
    """Parse the raw grammar into {section: {key: (value, line_no)}}."""
    sections: dict[str, dict[str, tuple[str, int]]] = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        match = _SECTION_RE.match(line)
        if match:
            current = match.group("name")
            sections.setdefault(current, {})
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value' or '[section]', got {raw!r}")
        if current is None:
            raise ConfigError(f"line {lineno}: assignment before any [section] header")
        key, _, value = line.partition("=")
        key = key.strip()
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        if key in sections[current]:
            raise ConfigError(f"line {lineno}: duplicate key {key!r} in section [{current}]")
        sections[current][key] = (value.strip(), lineno)
    return sections


def _convert(key: _Key, raw: str, lineno: int):
    try:
        if key.kind == "int":
            value = parse_number(raw)
            if value != int(value):
                raise ConfigError(f"line {lineno}: {key.name} must be an integer, got {raw!r}")
            return int(value)
        if key.kind == "float":
            return parse_number(raw)
        if key.kind == "float_list":
            parts = [p for p in raw.split(",") if p.strip()]
            if not parts:
                raise ConfigError(f"line {lineno}: {key.name} needs at least one value")
            return tuple(parse_number(p) for p in parts)
        if key.kind == "symbol":
            return parse_symbol_spec(raw)
        return raw
    except SymbolError as exc:
        raise ConfigError(f"line {lineno}: {key.name}: {exc}") from exc


def parse_initial_spec(text: str) -> tuple[float, float]:
    """Parse ``gaussian(amplitude=...,width=...)`` into (amplitude, width)."""
    match = _INITIAL_RE.match(text.strip())
    if not match:
        raise ConfigError(f"cannot parse initial data spec {text!r} (expected gaussian(...))")
    amplitude, width = 1.0, 1.0
    inner = match.group("params")
    if inner:
        for part in inner.split(","):
            if "=" not in part:
                raise ConfigError(f"initial data parameter {part.strip()!r} is not key=value")
            k, _, v = part.partition("=")
            k = k.strip()
            if k == "amplitude":
                amplitude = parse_number(v)
            elif k == "width":
                width = parse_number(v)
            else:
                raise ConfigError(f"unknown initial data parameter {k!r}")
    if not width > 0:
        raise ConfigError(f"initial data width must be positive, got {width}")
    return amplitude, width


def _plan_from_params(params: dict, symbol: Symbol):
    if symbol.kind == HOMOGENEOUS:
        if params.get("omega") is None:
            raise ConfigError(
                f"symbol {symbol.spec_string()} is homogeneous: omega > 0 is required"
            )
        return compute_scaling(
            params["d"], params["sigma"], params["s"], HOMOGENEOUS,
            m=symbol.degree, omega=params["omega"],
            theta=params["theta"], delta=params["delta"],
        )
    if params.get("omega") is not None:
        raise ConfigError("omega applies to homogeneous symbols only")
    return compute_scaling(
        params["d"], params["sigma"], params["s"], BOUNDED,
        theta=params["theta"], delta=params["delta"],
    )


def _validate_simulate(params: dict) -> None:
    make_grid(params["d"], params["n"], params["L"])
    if not params["sigma"] > 0:
        raise ConfigError(f"sigma must be positive, got {params['sigma']}")
    if not params["dt"] > 0:
        raise ConfigError(f"dt must be positive, got {params['dt']}")
    if not params["T"] >= 0:
        raise ConfigError(f"T must be >= 0, got {params['T']}")
    if not 0 < params["eps"] <= 1:
        raise ConfigError(f"eps must lie in (0, 1], got {params['eps']}")
    if params["symbol"].dims is not None and params["symbol"].dims != params["d"]:
        raise ConfigError(
            f"symbol {params['symbol'].spec_string()} is restricted to "
            f"d = {params['symbol'].dims}"
        )
    parse_initial_spec(params["initial"])


def _validate_sweep_common(params: dict) -> None:
    plan = _plan_from_params(params, params["symbol"])
    make_grid(params["d"], params["grid_n"], params["grid_L"])
    params["_plan"] = plan


def _validate_inflate(params: dict) -> None:
    _validate_sweep_common(params)
    hs = params["h_list"]
    if any(b >= a for a, b in zip(hs, hs[1:])):
        raise ConfigError(f"h_list must be strictly decreasing, got {list(hs)}")
    for h in hs:
        params["_plan"].validate_h(h)


def _validate_ode_approx(params: dict) -> None:
    _validate_sweep_common(params)
    eps = params["eps_list"]
    if any(b >= a for a, b in zip(eps, eps[1:])):
        raise ConfigError(f"eps_list must be strictly decreasing, got {list(eps)}")
    for e in eps:
        if not 0 < e < 1:
            raise ConfigError(f"eps values must lie in (0, 1), got {e}")
        params["_plan"].validate_h(params["_plan"].h_for_eps(e))
    r, d, sigma = params["r"], params["d"], params["sigma"]
    if not r > d / 2:
        raise ConfigError(f"regularity r must be an integer above d/2 = {d / 2}, got {r}")
    if abs(sigma - round(sigma)) > 1e-12 and r > 2 * sigma:
        raise ConfigError(f"for non-integer sigma, r <= 2*sigma = {2 * sigma} is required")


def _validate_strichartz(params: dict) -> None:
    check_admissible_pair(params["p"], params["q"], params["d"])
    ns = params["N_list"]
    if len(ns) < 2 or any(b <= a for a, b in zip(ns, ns[1:])):
        raise ConfigError(f"N_list must be increasing with >= 2 entries, got {list(ns)}")
    if not params["t_end"] > 0:
        raise ConfigError(f"t_end must be positive, got {params['t_end']}")
    if params["symbol"].dims is not None and params["symbol"].dims != params["d"]:
        raise ConfigError(
            f"symbol {params['symbol'].spec_string()} is restricted to d = {params['symbol'].dims}"
        )


def _validate_singular(params: dict) -> None:
    if not params["sigma"] > 0:
        raise ConfigError(f"sigma must be positive, got {params['sigma']}")
    if not params["t"] >= 0:
        raise ConfigError(f"t must be >= 0, got {params['t']}")
    rhos = params["rho_list"]
    if len(rhos) < 2 or any(b >= a for a, b in zip(rhos, rhos[1:])):
        raise ConfigError(f"rho_list must be strictly decreasing with >= 2 entries, got {list(rhos)}")
    if rhos[0] >= 1 or rhos[-1] <= 0:
        raise ConfigError("rho values must lie in (0, 1)")
    if not params["quad_tol"] > 0:
        raise ConfigError(f"quad_tol must be positive, got {params['quad_tol']}")


_VALIDATORS = {
    "simulate": _validate_simulate,
    "inflate": _validate_inflate,
    "ode-approx": _validate_ode_approx,
    "strichartz": _validate_strichartz,
    "singular": _validate_singular,
}


def parse_config(subcommand: str, text: str) -> RunConfig:
    """Parse and fully validate a config for one subcommand."""
    if subcommand not in _SCHEMAS:
        raise ConfigError(f"unknown subcommand {subcommand!r}; choose from {SUBCOMMANDS}")
    sections = parse_config_text(text)
    schema = _SCHEMAS[subcommand]
    known = {(k.section, k.name) for k in schema}

    for sec, keys in sections.items():
        for key, (_, lineno) in keys.items():
            if (sec, key) not in known:
                raise ConfigError(f"line {lineno}: unknown key {key!r} in section [{sec}]")

    params: dict = {}
    missing = []
    for key in schema:
        entry = sections.get(key.section, {}).get(key.name)
        if entry is None:
            if key.required:
                missing.append(f"[{key.section}] {key.name}")
            else:
                params[key.name] = key.default
        else:
            params[key.name] = _convert(key, entry[0], entry[1])
    if missing:
        raise ConfigError(f"missing required keys for {subcommand}: {', '.join(missing)}")

    try:
        _VALIDATORS[subcommand](params)
    except (ScalingError, SpectralError, SymbolError, ExperimentError,
            SingularProbeError, EvolutionError) as exc:
        raise ConfigError(str(exc)) from exc

    params.pop("_plan", None)
    outdir = params.pop("dir")
    seed = params.pop("seed")
    return RunConfig(subcommand=subcommand, params=params, outdir=outdir, seed=seed)


def _render_value(key: _Key, value) -> str:
    if key.kind == "symbol":
        return value.spec_string()
    if key.kind == "float_list":
        return ", ".join(format(float(v), ".17g") for v in value)
    if key.kind == "int":
        return str(int(value))
    if key.kind == "float":
        return format(float(value), ".17g")
    return str(value)


def render_config(cfg: RunConfig) -> str:
    """Serialize a validated config with all defaults filled (round-trippable)."""
    schema = _SCHEMAS[cfg.subcommand]
    sections: dict[str, list[str]] = {}
    values = dict(cfg.params)
    values["dir"] = cfg.outdir
    values["seed"] = cfg.seed
    for key in schema:
        value = values.get(key.name)
        if value is None:
            continue
        sections.setdefault(key.section, []).append(f"{key.name} = {_render_value(key, value)}")
    blocks = [f"[{sec}]\n" + "\n".join(lines) for sec, lines in sections.items()]
    return "\n\n".join(blocks) + "\n"
