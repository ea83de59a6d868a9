"""Strict JSON run configuration: unknown keys rejected, defaults made explicit.

The resolved configuration (defaults filled in) is embedded in every output
JSON so a report is reproducible from its own metadata.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

from .fields import (
    FieldError,
    PhysicalConstants,
    make_mass_profile,
    make_potential,
    make_vector_potential,
)
from .grid import GridError, make_grid, make_grid_1d
from .operators import ORDERING_PRESETS, OrderingError, make_ordering

__all__ = ["ConfigError", "RunConfig", "load_config", "parse_config"]

BUILDERS = ("von_roos", "corrected", "expanded", "dutra_oliveira")

_DEFAULTS = {
    "constants": {"hbar": 1.0, "charge": 1.0},
    "potential": {"kind": "zero", "params": {}},
    "solver": {"k": 5, "method": "auto", "tol": 1e-9, "seed": 7},
}


class ConfigError(ValueError):
    """Configuration rejected; message names the offending key or constraint."""


def _require_keys(section: dict, path: str, required: tuple, optional: tuple) -> None:
    if not isinstance(section, dict):
        raise ConfigError(f"{path}: expected an object, got {type(section).__name__}")
    unknown = set(section) - set(required) - set(optional)
    if unknown:
        raise ConfigError(f"{path}: unknown keys {sorted(unknown)}")
    missing = set(required) - set(section)
    if missing:
        raise ConfigError(f"{path}: missing required keys {sorted(missing)}")


def _number(section: dict, path: str, key: str, default=None):
    val = section.get(key, default)
    if not isinstance(val, (int, float)) or isinstance(val, bool):
        raise ConfigError(f"{path}.{key}: expected a number, got {val!r}")
    return float(val)


def _integer(section: dict, path: str, key: str, default=None):
    val = section.get(key, default)
    if not isinstance(val, int) or isinstance(val, bool):
        raise ConfigError(f"{path}.{key}: expected an integer, got {val!r}")
    return val


@dataclass
class RunConfig:
    """Validated configuration plus lazily constructed domain objects."""

    raw: dict = field(repr=False)
    resolved: dict

    def constants(self) -> PhysicalConstants:
        c = self.resolved["constants"]
        return PhysicalConstants(hbar=c["hbar"], charge=c["charge"])

    def grid(self):
        g = self.resolved["grid"]
        return make_grid(g["nx"], g["ny"], g["bounds"])

    def coarse_grid(self):
        """Halved resolution per axis, used for discretization-error estimates."""
        g = self.resolved["grid"]
        return make_grid(max(g["nx"] // 2, 8), max(g["ny"] // 2, 8), g["bounds"])

    def mass(self):
        m = self.resolved["mass"]
        return make_mass_profile(m["kind"], **m["params"])

    def potential(self):
        p = self.resolved["potential"]
        if p["kind"] == "zero":
            return None
        return make_potential(p["kind"], **p["params"])

    def gauge(self):
        g = self.resolved.get("gauge")
        if g is None:
            return None
        return make_vector_potential(g["kind"], g["B"])

    def ordering(self):
        o = self.resolved["ordering"]
        if isinstance(o, str):
            return ORDERING_PRESETS[o]
        return make_ordering(o["alpha"], o["beta"], o["gamma"])

    def solver(self) -> dict:
        return dict(self.resolved["solver"])


def _parse_field_spec(section, path: str) -> dict:
    _require_keys(section, path, ("kind",), ("params",))
    kind = section["kind"]
    if not isinstance(kind, str):
        raise ConfigError(f"{path}.kind: expected a string")
    params = section.get("params", {})
    if not isinstance(params, dict):
        raise ConfigError(f"{path}.params: expected an object")
    for name, val in params.items():
        if not isinstance(val, (int, float)) or isinstance(val, bool):
            raise ConfigError(f"{path}.params.{name}: expected a number, got {val!r}")
    return {"kind": kind, "params": {k: float(v) for k, v in params.items()}}


def _parse_ordering(spec, path: str):
    if isinstance(spec, str):
        if spec not in ORDERING_PRESETS:
            raise ConfigError(
                f"{path}: unknown ordering preset {spec!r}; "
                f"known presets: {sorted(ORDERING_PRESETS)}"
            )
        return spec
    _require_keys(spec, path, ("alpha", "beta", "gamma"), ())
    triple = {k: _number(spec, path, k) for k in ("alpha", "beta", "gamma")}
    try:
        make_ordering(**triple)
    except OrderingError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    return triple


def parse_config(raw: dict, command: str) -> RunConfig:
    """Validate the configuration for one CLI command; fill defaults."""
    if not isinstance(raw, dict):
        raise ConfigError("top level: expected a JSON object")

    top_known = {
        "spectrum": ("constants", "grid", "mass", "potential", "gauge", "ordering",
                     "solver", "spectrum"),
        "compare": ("constants", "grid", "mass", "potential", "gauge", "ordering",
                    "solver", "compare"),
        "classical": ("constants", "mass", "potential", "gauge", "classical"),
        "evolve": ("constants", "mass", "potential", "evolve"),
    }
    if command not in top_known:
        raise ConfigError(f"unknown command {command!r}")
    allowed = top_known[command]
    unknown = set(raw) - set(allowed)
    if unknown:
        raise ConfigError(f"top level: unknown keys {sorted(unknown)} for command {command!r}")

    resolved: dict[str, Any] = {}

    c = raw.get("constants", {})
    _require_keys(c, "constants", (), ("hbar", "charge"))
    resolved["constants"] = {
        "hbar": _number(c, "constants", "hbar", _DEFAULTS["constants"]["hbar"]),
        "charge": _number(c, "constants", "charge", _DEFAULTS["constants"]["charge"]),
    }
    if resolved["constants"]["hbar"] <= 0:
        raise ConfigError("constants.hbar: must be positive")

    if "mass" not in raw:
        raise ConfigError("top level: missing required key 'mass'")
    resolved["mass"] = _parse_field_spec(raw["mass"], "mass")

    resolved["potential"] = (
        _parse_field_spec(raw["potential"], "potential")
        if "potential" in raw
        else dict(_DEFAULTS["potential"])
    )

    if "gauge" in raw:
        g = raw["gauge"]
        _require_keys(g, "gauge", ("kind", "B"), ())
        if not isinstance(g["kind"], str):
            raise ConfigError("gauge.kind: expected a string")
        resolved["gauge"] = {"kind": g["kind"], "B": _number(g, "gauge", "B")}
    else:
        resolved["gauge"] = None

    if command in ("spectrum", "compare"):
        if "grid" not in raw:
            raise ConfigError("top level: missing required key 'grid'")
        g = raw["grid"]
        _require_keys(g, "grid", ("nx", "ny", "bounds"), ())
        nx = _integer(g, "grid", "nx")
        ny = _integer(g, "grid", "ny")
        bounds = g["bounds"]
        if (not isinstance(bounds, list) or len(bounds) != 4
                or any(isinstance(b, bool) or not isinstance(b, (int, float)) for b in bounds)):
            raise ConfigError("grid.bounds: expected [xmin, xmax, ymin, ymax]")
        resolved["grid"] = {"nx": nx, "ny": ny, "bounds": [float(b) for b in bounds]}

        resolved["ordering"] = _parse_ordering(raw.get("ordering", "zhu-kroemer"), "ordering")

        s = raw.get("solver", {})
        _require_keys(s, "solver", (), ("k", "method", "tol", "seed"))
        method = s.get("method", _DEFAULTS["solver"]["method"])
        if method not in ("auto", "dense", "lanczos"):
            raise ConfigError(f"solver.method: expected auto|dense|lanczos, got {method!r}")
        resolved["solver"] = {
            "k": _integer(s, "solver", "k", _DEFAULTS["solver"]["k"]),
            "method": method,
            "tol": _number(s, "solver", "tol", _DEFAULTS["solver"]["tol"]),
            "seed": _integer(s, "solver", "seed", _DEFAULTS["solver"]["seed"]),
        }
        if resolved["solver"]["k"] < 1:
            raise ConfigError("solver.k: must be at least 1")
        if resolved["solver"]["tol"] <= 0:
            raise ConfigError("solver.tol: must be positive")

    if command == "spectrum":
        sp_block = raw.get("spectrum", {})
        _require_keys(sp_block, "spectrum", ("builder",), ("dump_operator",))
        builder = sp_block["builder"]
        if builder not in BUILDERS:
            raise ConfigError(f"spectrum.builder: expected one of {BUILDERS}, got {builder!r}")
        dump = sp_block.get("dump_operator", False)
        if not isinstance(dump, bool):
            raise ConfigError("spectrum.dump_operator: expected a boolean")
        resolved["spectrum"] = {"builder": builder, "dump_operator": dump}

    if command == "compare":
        cmp_block = raw.get("compare")
        if cmp_block is None:
            raise ConfigError("top level: missing required key 'compare'")
        _require_keys(cmp_block, "compare", (), ("builders", "orderings"))
        builders = cmp_block.get("builders")
        orderings = cmp_block.get("orderings")
        if (builders is None) == (orderings is None):
            raise ConfigError("compare: give exactly one of 'builders' or 'orderings'")
        if builders is not None:
            if (not isinstance(builders, list) or len(builders) != 2
                    or any(b not in BUILDERS for b in builders)):
                raise ConfigError(f"compare.builders: expected two of {BUILDERS}")
            resolved["compare"] = {"builders": list(builders)}
        else:
            if not isinstance(orderings, list) or len(orderings) != 2:
                raise ConfigError("compare.orderings: expected a list of two orderings")
            resolved["compare"] = {
                "orderings": [_parse_ordering(o, f"compare.orderings[{i}]")
                              for i, o in enumerate(orderings)]
            }

    if command == "classical":
        blk = raw.get("classical")
        if blk is None:
            raise ConfigError("top level: missing required key 'classical'")
        _require_keys(blk, "classical", ("state0", "t_end", "dt"), ())
        s0 = blk["state0"]
        if (not isinstance(s0, list) or len(s0) != 4
                or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in s0)):
            raise ConfigError("classical.state0: expected [x, y, px, py]")
        t_end = _number(blk, "classical", "t_end")
        dt = _number(blk, "classical", "dt")
        if dt <= 0:
            raise ConfigError("classical.dt: must be positive")
        if t_end <= 0:
            raise ConfigError("classical.t_end: must be positive")
        resolved["classical"] = {"state0": [float(v) for v in s0], "t_end": t_end, "dt": dt}

    if command == "evolve":
        blk = raw.get("evolve")
        if blk is None:
            raise ConfigError("top level: missing required key 'evolve'")
        _require_keys(blk, "evolve", ("n", "bounds", "packet", "dt", "steps"), ("record_every",))
        n = _integer(blk, "evolve", "n")
        bounds = blk["bounds"]
        if (not isinstance(bounds, list) or len(bounds) != 2
                or any(isinstance(b, bool) or not isinstance(b, (int, float)) for b in bounds)):
            raise ConfigError("evolve.bounds: expected [xmin, xmax]")
        pk = blk["packet"]
        _require_keys(pk, "evolve.packet", ("x0", "k0"), ("sigma",))
        packet = {
            "x0": _number(pk, "evolve.packet", "x0"),
            "k0": _number(pk, "evolve.packet", "k0"),
            "sigma": _number(pk, "evolve.packet", "sigma", 1.0),
        }
        dt = _number(blk, "evolve", "dt")
        steps = _integer(blk, "evolve", "steps")
        if dt <= 0:
            raise ConfigError("evolve.dt: must be positive")
        if steps < 1:
            raise ConfigError("evolve.steps: must be at least 1")
        record_every = _integer(blk, "evolve", "record_every", 1)
        if record_every < 1:
            raise ConfigError("evolve.record_every: must be at least 1")
        resolved["evolve"] = {
            "n": n,
            "bounds": [float(b) for b in bounds],
            "packet": packet,
            "dt": dt,
            "steps": steps,
            "record_every": record_every,
        }

    cfg = RunConfig(raw=raw, resolved=resolved)
    _probe_construction(cfg, command)
    return cfg


def _probe_construction(cfg: RunConfig, command: str) -> None:
    """Construct every configured object once so bad parameters fail up front."""
    try:
        cfg.constants()
        cfg.mass()
        cfg.potential()
        cfg.gauge()
        if command in ("spectrum", "compare"):
            cfg.grid()
            cfg.ordering()
            if command == "compare" and "orderings" in cfg.resolved["compare"]:
                for o in cfg.resolved["compare"]["orderings"]:
                    if isinstance(o, str):
                        ORDERING_PRESETS[o]
                    else:
                        make_ordering(o["alpha"], o["beta"], o["gamma"])
        if command == "evolve":
            e = cfg.resolved["evolve"]
            make_grid_1d(e["n"], e["bounds"])
    except (FieldError, GridError, OrderingError) as exc:
        raise ConfigError(str(exc)) from None


def load_config(path: str, command: str) -> RunConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    return parse_config(raw, command)
