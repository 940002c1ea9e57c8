"""Run configuration shared by the CLI and the verification suites.

A config file is a flat JSON object whose keys are the field names of
:class:`RunConfig`; unknown keys are rejected. Command-line flags override
file values.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    series_tol: float = 1e-15
    quad_tol: float = 1e-12
    cf_tol: float = 1e-12
    r_max: float = 0.9
    N_trunc: int = 200
    t_max: float = 40.0
    dt: float = 1e-3
    bd_method: str = "expm"
    output_format: str = "json"

    def __post_init__(self):
        for name in ("series_tol", "quad_tol", "cf_tol", "t_max", "dt"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be > 0")
        if not (0.0 < self.r_max < 1.0):
            raise ConfigError("r_max must lie in (0, 1)")
        if self.N_trunc < 50:
            raise ConfigError("N_trunc must be >= 50")
        if self.bd_method not in ("expm", "rk4"):
            raise ConfigError("bd_method must be 'expm' or 'rk4'")
        if self.output_format not in ("json", "csv"):
            raise ConfigError("output_format must be 'json' or 'csv'")

    def as_dict(self) -> dict:
        return asdict(self)

    def override(self, **kw) -> "RunConfig":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


def load_config(path: str | Path | None) -> RunConfig:
    if path is None:
        return RunConfig()
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a JSON object")
    known = {f.name: f.type for f in fields(RunConfig)}
    unknown = sorted(set(data) - set(known))
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    return RunConfig(**data)
