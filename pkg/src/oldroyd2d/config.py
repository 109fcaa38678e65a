"""Line-oriented experiment configuration.

Format: `key = value` lines grouped under `[section]` headers. Blank lines
and lines starting with `#` are ignored; a trailing `# comment` after a
value is stripped. Unknown sections or keys, duplicate keys, type
mismatches, and constraint violations are reported with their line number;
all errors in a file are collected before parsing fails.

Sections and keys (defaults in parentheses):

    [grid]        n (128), length (2*pi)
    [model]       nu (0), mu (1), k (1), alpha (1), beta (0), b (0),
                  q_enabled (true), variant (full)
    [stepping]    scheme (ifrk4), cfl (0.5), dt_min (1e-8), dt_max (0.05),
                  t_end (1)
    [initial]     kind (taylor_green), amplitude (1), band_lo (1),
                  band_hi (8), seed, delta, snapshot
    [initial_tau] kind (zero), amplitude (1), band_lo (1), band_hi (8), seed
    [output]      dir (out), observe_every (0.1), snapshot_times ()
    [diagnostics] eps (0.5), hs (3), n_functional_m (10)
"""

from __future__ import annotations

import os
from dataclasses import dataclass, replace
from pathlib import Path

from .diagnostics import DiagnosticsOptions
from .errors import ConfigError
from .grid import Grid
from .initial_data import InitialSpec, TauInitialSpec
from .model import ModelParams
from .stepping import StepConfig

OUTPUT_ROOT_ENV = "OLDROYD2D_OUT"


@dataclass(frozen=True)
class OutputSpec:
    directory: str = "out"
    observe_every: float = 0.1
    snapshot_times: tuple = ()

    def resolved_dir(self) -> Path:
        root = os.environ.get(OUTPUT_ROOT_ENV)
        path = Path(self.directory)
        if root and not path.is_absolute():
            return Path(root) / path
        return path


@dataclass(frozen=True)
class ExperimentConfig:
    grid: Grid
    params: ModelParams
    step: StepConfig
    initial: InitialSpec
    tau_initial: TauInitialSpec
    output: OutputSpec
    diag: DiagnosticsOptions


def _parse_bool(raw: str) -> bool:
    low = raw.lower()
    if low in ("true", "yes", "on", "1"):
        return True
    if low in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"expected a boolean, got {raw!r}")


def _parse_float_list(raw: str) -> tuple:
    if not raw.strip():
        return ()
    return tuple(float(part) for part in raw.split(","))


_SCHEMA = {
    "grid": {"n": int, "length": float},
    "model": {
        "nu": float, "mu": float, "k": float, "alpha": float, "beta": float,
        "b": float, "q_enabled": _parse_bool, "variant": str,
    },
    "stepping": {
        "scheme": str, "cfl": float, "dt_min": float, "dt_max": float, "t_end": float,
    },
    "initial": {
        "kind": str, "amplitude": float, "band_lo": int, "band_hi": int,
        "seed": int, "delta": float, "snapshot": str,
    },
    "initial_tau": {
        "kind": str, "amplitude": float, "band_lo": int, "band_hi": int, "seed": int,
    },
    "output": {
        "dir": str, "observe_every": float, "snapshot_times": _parse_float_list,
    },
    "diagnostics": {"eps": float, "hs": _parse_float_list, "n_functional_m": float},
}


def _scan(text: str):
    """First pass: {section: {key: (value, lineno)}} plus syntax errors."""
    sections: dict[str, dict] = {}
    errors: list[str] = []
    current = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if stripped.startswith("[") and stripped.endswith("]"):
            name = stripped[1:-1].strip()
            if name not in _SCHEMA:
                errors.append(f"line {lineno}: unknown section [{name}]")
                current = None
            else:
                current = sections.setdefault(name, {})
            continue
        if "=" not in stripped:
            errors.append(f"line {lineno}: expected 'key = value', got {stripped!r}")
            continue
        if current is None:
            errors.append(f"line {lineno}: key outside of a known section")
            continue
        key, raw = (part.strip() for part in stripped.split("=", 1))
        section_name = next(n for n, d in sections.items() if d is current)
        if key not in _SCHEMA[section_name]:
            errors.append(f"line {lineno}: unknown key {key!r} in [{section_name}]")
            continue
        if key in current:
            errors.append(
                f"line {lineno}: duplicate key {key!r} in [{section_name}] "
                f"(first set on line {current[key][1]})"
            )
            continue
        current[key] = (raw, lineno)
    return sections, errors


def _convert(sections, errors) -> dict[str, dict]:
    """Second pass: typed values, remembering line numbers per key."""
    out: dict[str, dict] = {}
    lines: dict[tuple[str, str], int] = {}
    for section, entries in sections.items():
        values = {}
        for key, (raw, lineno) in entries.items():
            conv = _SCHEMA[section][key]
            try:
                values[key] = conv(raw)
            except ValueError as exc:
                errors.append(f"line {lineno}: bad value for {key!r}: {exc}")
                continue
            lines[(section, key)] = lineno
        out[section] = values
    out["__lines__"] = lines
    return out


def _build(cls, section: str, values: dict, rename: dict, lines, errors):
    kwargs = {rename.get(k, k): v for k, v in values.items()}
    try:
        return cls(**kwargs)
    except ConfigError as exc:
        # attribute the constraint violation to the section's first listed line
        linenos = sorted(l for (sec, _), l in lines.items() if sec == section)
        where = f"line {linenos[0]}" if linenos else f"section [{section}]"
        errors.append(f"{where}: {exc.messages[0]}")
        return None


def parse_config(text: str) -> ExperimentConfig:
    sections, errors = _scan(text)
    values = _convert(sections, errors)
    lines = values.pop("__lines__")

    def line_of(section, key, default=None):
        return lines.get((section, key), default)

    grid_vals = {"n": 128, **values.get("grid", {})}
    grid = _build(Grid, "grid", grid_vals, {}, lines, errors)
    params = _build(ModelParams, "model", values.get("model", {}), {"k": "K"}, lines, errors)
    step = _build(StepConfig, "stepping", values.get("stepping", {}), {}, lines, errors)
    initial = _build(InitialSpec, "initial", values.get("initial", {}), {}, lines, errors)
    tau_initial = _build(
        TauInitialSpec, "initial_tau", values.get("initial_tau", {}), {}, lines, errors
    )
    output_vals = values.get("output", {})
    output = OutputSpec(
        directory=output_vals.get("dir", "out"),
        observe_every=output_vals.get("observe_every", 0.1),
        snapshot_times=tuple(output_vals.get("snapshot_times", ())),
    )
    if output.observe_every <= 0:
        errors.append(
            f"line {line_of('output', 'observe_every', '?')}: observe_every must be > 0"
        )
    diag_vals = values.get("diagnostics", {})
    diag = DiagnosticsOptions(
        eps=diag_vals.get("eps", 0.5),
        hs=tuple(diag_vals.get("hs", (3.0,))),
        n_functional_m=diag_vals.get("n_functional_m", 10.0),
    )
    if not (0.0 < diag.eps < 1.0):
        errors.append(f"line {line_of('diagnostics', 'eps', '?')}: eps must lie in (0, 1)")

    def band_needed(spec):
        if spec.kind == "random_band_limited":
            return spec.band_hi
        if spec.kind == "single_mode":
            return spec.band_lo
        return None

    if not errors and initial is not None and grid is not None:
        need = band_needed(initial)
        if need is not None and need > grid.dealias_cutoff:
            errors.append(
                f"line {line_of('initial', 'band_hi', '?')}: initial band exceeds "
                f"dealias cutoff {grid.dealias_cutoff} at n={grid.n}"
            )
        if tau_initial is not None:
            need = band_needed(tau_initial)
            if need is not None and need > grid.dealias_cutoff:
                errors.append(
                    f"line {line_of('initial_tau', 'band_hi', '?')}: tau band exceeds "
                    f"dealias cutoff {grid.dealias_cutoff} at n={grid.n}"
                )

    if errors:
        raise ConfigError(errors)
    return ExperimentConfig(
        grid=grid, params=params, step=step, initial=initial,
        tau_initial=tau_initial, output=output, diag=diag,
    )


def load_config(path) -> ExperimentConfig:
    return parse_config(Path(path).read_text(encoding="utf-8"))


_OVERRIDE_SECTIONS = {
    "grid": "grid",
    "model": "params",
    "stepping": "step",
    "initial": "initial",
    "initial_tau": "tau_initial",
    "output": "output",
    "diagnostics": "diag",
}


def with_override(config: ExperimentConfig, name: str, value) -> ExperimentConfig:
    """Return a copy of the config with `section.key` replaced.

    Used by parameter sweeps; `value` is converted with the schema type.
    """
    if "." not in name:
        raise ConfigError(f"override {name!r} must look like section.key")
    section, key = name.split(".", 1)
    if section not in _OVERRIDE_SECTIONS or key not in _SCHEMA.get(section, {}):
        raise ConfigError(f"unknown override target {name!r}")
    conv = _SCHEMA[section][key]
    typed = conv(value) if isinstance(value, str) else value
    attr = _OVERRIDE_SECTIONS[section]
    field_name = {"k": "K"}.get(key, key) if section == "model" else key
    if section == "output" and key == "dir":
        field_name = "directory"
    target = getattr(config, attr)
    return replace(config, **{attr: replace(target, **{field_name: typed})})
