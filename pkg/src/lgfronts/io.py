"""Config files and plain-text result files.

Configs are YAML, either a flat mapping of model and grid keys for
quick runs or a nested form with model / init / disc / criteria /
output sections.  Unknown keys are rejected with their dotted path;
nothing is silently ignored.

Result files are line-oriented text: a block of "# key = value"
metadata echoing every resolved setting, a "# columns:" header, then
one row per record.  Floats are written with repr (metadata) or %.17g
(data), so files round-trip exactly and rewriting an identical result
produces identical bytes.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import yaml

from .errors import ConfigSyntaxError, UnknownKey
from .model import (
    HOLLING_TANNER,
    LESLIE_GOWER,
    ConstantProfile,
    CosineProfile,
    ModelParams,
    Profile,
    ReactionKernel,
    TableProfile,
    ValidatedModel,
    validate_params,
)
from .solver import (
    SERIES_COLUMNS,
    Discretization,
    SeriesRecord,
    SimResult,
    SimState,
    resolve_disc,
)

_SECTIONS = ("model", "init", "disc", "criteria", "output")
_MODEL_KEYS = ("a", "b", "d", "mu", "beta", "h0", "kernel", "m")
_DISC_KEYS = ("L", "Nx", "Ny", "dt", "t_end", "cfl_safety", "u_floor",
              "front_margin", "core_window")
_CRIT_KEYS = ("tol_span", "eps_v", "eps_speed")
_OUTPUT_KEYS = ("series", "snapshot")
_FLAT_KEYS = _MODEL_KEYS + _DISC_KEYS + ("record_every",)


@dataclass(frozen=True)
class RunConfig:
    """Everything a run needs, as parsed (optional fields unresolved)."""

    params: ModelParams
    u0: Profile
    v0: Profile
    disc: Discretization
    record_every: float = 0.5
    tol_span: float = 0.02
    eps_v: float | None = None
    eps_speed: float | None = None
    series_out: str | None = None
    snapshot_out: str | None = None

    def validated(self) -> ValidatedModel:
        return validate_params(self.params, self.u0, self.v0)


def _require_number(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValueError(f"{path} must be a number, got {value!r}")
    return float(value)


def _optional_number(value, path: str) -> float | None:
    return None if value is None else _require_number(value, path)


def _require_int(value, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValueError(f"{path} must be an integer, got {value!r}")
    return value


def _check_keys(section: dict, allowed: tuple[str, ...], prefix: str) -> None:
    for key in section:
        if key not in allowed:
            dotted = f"{prefix}.{key}" if prefix else str(key)
            raise UnknownKey(f"unknown config key {dotted!r}; "
                             f"allowed here: {', '.join(allowed)}")


def _profile_from_spec(spec, path: str, default_kind: str) -> Profile:
    if isinstance(spec, (int, float)) and not isinstance(spec, bool):
        value = float(spec)
        return ConstantProfile(value) if default_kind == "constant" \
            else CosineProfile(value)
    if not isinstance(spec, dict):
        raise ValueError(f"{path} must be a number or a mapping with a 'kind'")
    _check_keys(spec, ("kind", "value", "amplitude", "x", "values"), path)
    kind = spec.get("kind")
    if kind == "constant":
        return ConstantProfile(_require_number(spec.get("value", 1.0), f"{path}.value"))
    if kind == "cosine":
        return CosineProfile(_require_number(spec.get("amplitude", 1.0), f"{path}.amplitude"))
    if kind == "table":
        xs = spec.get("x")
        vals = spec.get("values")
        if not isinstance(xs, list) or not isinstance(vals, list):
            raise ValueError(f"{path} table needs 'x' and 'values' lists")
        return TableProfile(
            x=tuple(_require_number(v, f"{path}.x[{i}]") for i, v in enumerate(xs)),
            values=tuple(_require_number(v, f"{path}.values[{i}]") for i, v in enumerate(vals)))
    raise ValueError(f"{path}.kind must be constant, cosine or table, got {kind!r}")


def _profile_to_spec(profile: Profile) -> dict:
    if isinstance(profile, ConstantProfile):
        return {"kind": "constant", "value": profile.value}
    if isinstance(profile, CosineProfile):
        return {"kind": "cosine", "amplitude": profile.amplitude}
    if isinstance(profile, TableProfile):
        return {"kind": "table", "x": list(profile.x), "values": list(profile.values)}
    raise TypeError(f"unknown profile type {type(profile).__name__}")


def _model_from_section(sec: dict, prefix: str) -> ModelParams:
    _check_keys(sec, _MODEL_KEYS, prefix)
    missing = [k for k in ("a", "b", "d", "mu", "beta", "h0") if k not in sec]
    if missing:
        where = prefix or "config"
        raise ValueError(f"{where} is missing required keys: {', '.join(missing)}")
    variant = sec.get("kernel", LESLIE_GOWER)
    if variant not in (LESLIE_GOWER, HOLLING_TANNER):
        raise ValueError(f"kernel must be {LESLIE_GOWER!r} or {HOLLING_TANNER!r}, "
                         f"got {variant!r}")
    dotted = (prefix + ".") if prefix else ""
    m = _optional_number(sec.get("m"), dotted + "m")
    if variant == HOLLING_TANNER and m is None:
        raise ValueError("the saturating kernel needs a positive m")
    kernel = ReactionKernel(variant=variant, m=m)
    return ModelParams(
        a=_require_number(sec["a"], dotted + "a"),
        b=_require_number(sec["b"], dotted + "b"),
        d=_require_number(sec["d"], dotted + "d"),
        mu=_require_number(sec["mu"], dotted + "mu"),
        beta=_require_number(sec["beta"], dotted + "beta"),
        h0=_require_number(sec["h0"], dotted + "h0"),
        kernel=kernel)


def _disc_from_section(sec: dict, prefix: str) -> Discretization:
    _check_keys(sec, _DISC_KEYS, prefix)
    dotted = (prefix + ".") if prefix else ""
    kw = {}
    if "L" in sec:
        kw["L"] = _require_number(sec["L"], dotted + "L")
    if "Nx" in sec and sec["Nx"] is not None:
        kw["Nx"] = _require_int(sec["Nx"], dotted + "Nx")
    if "Ny" in sec:
        kw["Ny"] = _require_int(sec["Ny"], dotted + "Ny")
    if "dt" in sec:
        kw["dt"] = _optional_number(sec["dt"], dotted + "dt")
    if "t_end" in sec:
        kw["t_end"] = _require_number(sec["t_end"], dotted + "t_end")
    if "cfl_safety" in sec:
        kw["cfl_safety"] = _require_number(sec["cfl_safety"], dotted + "cfl_safety")
    if "u_floor" in sec:
        kw["u_floor"] = _optional_number(sec["u_floor"], dotted + "u_floor")
    if "front_margin" in sec:
        kw["front_margin"] = _require_number(sec["front_margin"], dotted + "front_margin")
    if "core_window" in sec:
        kw["core_window"] = _require_number(sec["core_window"], dotted + "core_window")
    return Discretization(**kw)


def parse_config(text: str) -> RunConfig:
    """Parse YAML config text; see the module docstring for the forms."""
    try:
        raw = yaml.safe_load(text)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark
        line = mark.line + 1 if mark is not None else None
        col = mark.column + 1 if mark is not None else None
        raise ConfigSyntaxError(f"invalid YAML: {exc.problem or exc}",
                                line=line, column=col) from exc
    except yaml.YAMLError as exc:
        raise ConfigSyntaxError(f"invalid YAML: {exc}") from exc
    if raw is None:
        raise ValueError("config is empty")
    if not isinstance(raw, dict):
        raise ValueError("config root must be a mapping")

    nested = any(key in raw for key in _SECTIONS)
    if nested:
        _check_keys(raw, _SECTIONS + ("record_every",), "")
        model_sec = raw.get("model")
        if not isinstance(model_sec, dict):
            raise ValueError("nested config needs a 'model' section")
        params = _model_from_section(model_sec, "model")
        init_sec = raw.get("init", {})
        if not isinstance(init_sec, dict):
            raise ValueError("'init' must be a mapping")
        _check_keys(init_sec, ("u0", "v0"), "init")
        u0 = _profile_from_spec(init_sec["u0"], "init.u0", "constant") \
            if "u0" in init_sec else ConstantProfile(1.0)
        v0 = _profile_from_spec(init_sec["v0"], "init.v0", "cosine") \
            if "v0" in init_sec else CosineProfile(1.0)
        disc_sec = raw.get("disc", {})
        if not isinstance(disc_sec, dict):
            raise ValueError("'disc' must be a mapping")
        disc = _disc_from_section(disc_sec, "disc")
        crit_sec = raw.get("criteria", {})
        if not isinstance(crit_sec, dict):
            raise ValueError("'criteria' must be a mapping")
        _check_keys(crit_sec, _CRIT_KEYS, "criteria")
        out_sec = raw.get("output", {})
        if not isinstance(out_sec, dict):
            raise ValueError("'output' must be a mapping")
        _check_keys(out_sec, _OUTPUT_KEYS, "output")
        record_every = _require_number(raw.get("record_every", 0.5), "record_every")
        return RunConfig(
            params=params, u0=u0, v0=v0, disc=disc,
            record_every=record_every,
            tol_span=_require_number(crit_sec.get("tol_span", 0.02), "criteria.tol_span"),
            eps_v=_optional_number(crit_sec.get("eps_v"), "criteria.eps_v"),
            eps_speed=_optional_number(crit_sec.get("eps_speed"), "criteria.eps_speed"),
            series_out=out_sec.get("series"),
            snapshot_out=out_sec.get("snapshot"))

    _check_keys(raw, _FLAT_KEYS, "")
    model_sec = {k: raw[k] for k in _MODEL_KEYS if k in raw}
    params = _model_from_section(model_sec, "")
    disc_sec = {k: raw[k] for k in _DISC_KEYS if k in raw}
    disc = _disc_from_section(disc_sec, "")
    record_every = _require_number(raw.get("record_every", 0.5), "record_every")
    return RunConfig(params=params, u0=ConstantProfile(1.0),
                     v0=CosineProfile(1.0), disc=disc,
                     record_every=record_every)


def load_config(path) -> RunConfig:
    return parse_config(Path(path).read_text())


def serialize_config(cfg: RunConfig) -> str:
    """Canonical nested YAML; parse_config(serialize_config(c)) == c."""
    p = cfg.params
    model = {"a": p.a, "b": p.b, "d": p.d, "mu": p.mu,
             "beta": p.beta, "h0": p.h0, "kernel": p.kernel.variant}
    if p.kernel.m is not None:
        model["m"] = p.kernel.m
    disc = {f.name: getattr(cfg.disc, f.name)
            for f in dataclasses.fields(cfg.disc)}
    data = {
        "model": model,
        "init": {"u0": _profile_to_spec(cfg.u0), "v0": _profile_to_spec(cfg.v0)},
        "disc": disc,
        "criteria": {"tol_span": cfg.tol_span, "eps_v": cfg.eps_v,
                     "eps_speed": cfg.eps_speed},
        "output": {"series": cfg.series_out, "snapshot": cfg.snapshot_out},
        "record_every": cfg.record_every,
    }
    return yaml.safe_dump(data, sort_keys=False, default_flow_style=False)


# ----------------------------------------------------------------------
# result files


def _fmt_meta(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _parse_meta(value: str):
    if value == "true":
        return True
    if value == "false":
        return False
    try:
        return int(value)
    except ValueError:
        pass
    try:
        return float(value)
    except ValueError:
        return value


def _profile_meta(profile: Profile) -> str:
    if isinstance(profile, ConstantProfile):
        return f"constant value={profile.value!r}"
    if isinstance(profile, CosineProfile):
        return f"cosine amplitude={profile.amplitude!r}"
    return f"table points={len(profile.x)}"


def _common_meta(vm: ValidatedModel, disc: Discretization) -> dict:
    p = vm.params
    c = vm.constants
    meta = {
        "a": p.a, "b": p.b, "d": p.d, "mu": p.mu, "beta": p.beta, "h0": p.h0,
        "kernel": p.kernel.variant,
    }
    if p.kernel.m is not None:
        meta["m"] = p.kernel.m
    meta.update({
        "u0": _profile_meta(vm.init.u0),
        "v0": _profile_meta(vm.init.v0),
        "gstar": vm.init.gstar, "hstar": vm.init.hstar,
        "L": disc.L, "Nx": disc.Nx, "Ny": disc.Ny, "dt": disc.dt,
        "t_end": disc.t_end, "cfl_safety": disc.cfl_safety,
        "u_floor": disc.u_floor, "front_margin": disc.front_margin,
        "core_window": disc.core_window,
        "span_crit": c.span_crit, "h0_crit": c.h0_crit, "lambda1": c.lambda1,
        "A": c.A, "B": c.B, "ustar": c.coexistence[0], "vstar": c.coexistence[1],
        "theory_valid": p.b < 1.0,
    })
    return meta


def _write_blocks(path, meta: dict, columns: tuple[str, ...],
                  rows) -> None:
    lines = [f"# {key} = {_fmt_meta(value)}" for key, value in meta.items()]
    lines.append("# columns: " + " ".join(columns))
    lines.extend(rows)
    Path(path).write_text("\n".join(lines) + "\n")


def write_series(path, result: SimResult, vm: ValidatedModel,
                 disc: Discretization, record_every: float,
                 verdict: str | None = None) -> None:
    """Write the per-record time series with a full metadata echo."""
    disc = resolve_disc(disc, vm.params.a)
    h = result.health
    meta = {"format": "lgfronts-series/1"}
    meta.update(_common_meta(vm, disc))
    meta.update({
        "record_every": record_every,
        "backend": h.backend,
        "stencil_coeff": h.stencil_coeff,
        "dt_requested": h.dt_requested,
        "dt_used": h.dt_used,
        "steps": h.steps,
        "stop_reason": h.stop_reason,
        "floor_hits": h.floor_hits,
        "wrong_sign_speed_steps": h.wrong_sign_speed_steps,
        "max_u_excess": h.max_u_excess,
        "max_v_excess": h.max_v_excess,
        "min_u_core_overall": h.min_u_core_overall,
        "stefan_max_imbalance": h.stefan_max_imbalance,
        "n_records": len(result.series),
    })
    if verdict is not None:
        meta["verdict"] = verdict
    rows = []
    for rec in result.series:
        vals = [getattr(rec, name) for name in SERIES_COLUMNS[:-1]]
        rows.append(" ".join("%.17g" % v for v in vals) + f" {rec.floor_hits:d}")
    _write_blocks(path, meta, SERIES_COLUMNS, rows)


def read_series(path):
    """Read a series file back; returns (meta, records).

    Records are SeriesRecord instances; metadata values are parsed to
    bool, int or float where they look like one.
    """
    meta: dict = {}
    records: list[SeriesRecord] = []
    columns: tuple[str, ...] | None = None
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        if line.startswith("# columns:"):
            columns = tuple(line[len("# columns:"):].split())
            if columns != SERIES_COLUMNS:
                raise ValueError(
                    f"line {lineno}: unexpected columns {columns!r}")
            continue
        if line.startswith("#"):
            key, sep, value = line[1:].partition(" = ")
            if not sep:
                raise ValueError(f"line {lineno}: malformed metadata line")
            meta[key.strip()] = _parse_meta(value.strip())
            continue
        if columns is None:
            raise ValueError(f"line {lineno}: data before the columns header")
        parts = line.split()
        if len(parts) != len(SERIES_COLUMNS):
            raise ValueError(f"line {lineno}: expected {len(SERIES_COLUMNS)} "
                             f"values, got {len(parts)}")
        records.append(SeriesRecord(
            *(float(v) for v in parts[:-1]), floor_hits=int(parts[-1])))
    if columns is None:
        raise ValueError("no columns header in series file")
    return meta, records


SNAPSHOT_COLUMNS = ("x", "u", "v")


def write_snapshot(path, state: SimState, vm: ValidatedModel,
                   disc: Discretization, verdict: str | None = None) -> None:
    """Write the final profiles on the prey grid; v is interpolated
    from the predator grid and zero outside the front interval."""
    disc = resolve_disc(disc, vm.params.a)
    x = np.linspace(-disc.L, disc.L, disc.Nx + 1)
    y = np.linspace(-1.0, 1.0, disc.Ny + 1)
    f = state.front
    v = np.zeros_like(x)
    inside = (x > f.g) & (x < f.h)
    yq = (2.0 * x[inside] - f.g - f.h) / f.span
    v[inside] = np.interp(yq, y, state.z)
    meta = {"format": "lgfronts-snapshot/1"}
    meta.update(_common_meta(vm, disc))
    meta.update({"t": state.t, "g": f.g, "h": f.h,
                 "gdot": f.gdot, "hdot": f.hdot, "span": f.span,
                 "n_points": x.size})
    if verdict is not None:
        meta["verdict"] = verdict
    rows = ["%.17g %.17g %.17g" % (xi, ui, vi)
            for xi, ui, vi in zip(x, state.u, v)]
    _write_blocks(path, meta, SNAPSHOT_COLUMNS, rows)


def read_snapshot(path):
    """Read a snapshot file back; returns (meta, x, u, v) arrays."""
    meta: dict = {}
    xs: list[float] = []
    us: list[float] = []
    vs: list[float] = []
    saw_columns = False
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        if line.startswith("# columns:"):
            columns = tuple(line[len("# columns:"):].split())
            if columns != SNAPSHOT_COLUMNS:
                raise ValueError(f"line {lineno}: unexpected columns {columns!r}")
            saw_columns = True
            continue
        if line.startswith("#"):
            key, sep, value = line[1:].partition(" = ")
            if not sep:
                raise ValueError(f"line {lineno}: malformed metadata line")
            meta[key.strip()] = _parse_meta(value.strip())
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ValueError(f"line {lineno}: expected 3 values, got {len(parts)}")
        xs.append(float(parts[0]))
        us.append(float(parts[1]))
        vs.append(float(parts[2]))
    if not saw_columns:
        raise ValueError("no columns header in snapshot file")
    return meta, np.array(xs), np.array(us), np.array(vs)
