"""Experiment configuration and the flat ``key = value`` config file format.

Grammar, one entry per line::

    # comment (also allowed after a value)
    key = value
    list_key = 1, 2, 3

Blank lines are ignored, keys are case-insensitive and may use ``-`` or
``_``.  Recognised keys: ensemble, field, radii, probs, lambda, n_grid,
p_max, trials, seed, output_dir, workers.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Mapping

from ..ensembles import EnsembleSpec

__all__ = ["ConfigError", "ExperimentConfig", "parse_config_text", "load_config", "build_config"]

P_MAX_SIMULATION = 8


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    ensemble: EnsembleSpec
    lam: float = 1.0
    n_grid: tuple[int, ...] = (128, 256, 512)
    p_max: int = 5
    trials: int = 200
    seed: int = 0
    output_dir: Path | None = None
    workers: int = 1

    def __post_init__(self) -> None:
        if not self.lam > 0:
            raise ConfigError(f"lambda must be positive, got {self.lam}")
        if not self.n_grid:
            raise ConfigError("n_grid must be nonempty")
        if any(n < 1 for n in self.n_grid) or list(self.n_grid) != sorted(set(self.n_grid)):
            raise ConfigError(f"n_grid must be strictly ascending positive integers, got {self.n_grid}")
        if not 1 <= self.p_max <= P_MAX_SIMULATION:
            raise ConfigError(f"p_max must lie in [1, {P_MAX_SIMULATION}], got {self.p_max}")
        if self.trials < 2:
            raise ConfigError("trials must be at least 2")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")
        for n in self.n_grid:
            if self.N_for(n) < self.p_max:
                raise ConfigError(f"N = round({n}/{self.lam}) = {self.N_for(n)} is below p_max = {self.p_max}")

    def N_for(self, n: int) -> int:
        return int(round(n / self.lam))

    def to_dict(self) -> dict[str, Any]:
        return {
            "ensemble": self.ensemble.to_dict(),
            "lambda": self.lam,
            "n_grid": list(self.n_grid),
            "p_max": self.p_max,
            "trials": self.trials,
            "seed": self.seed,
            "output_dir": str(self.output_dir) if self.output_dir is not None else None,
            "workers": self.workers,
        }

    def with_overrides(self, **kw) -> "ExperimentConfig":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


def _norm_key(key: str) -> str:
    return key.strip().lower().replace("-", "_")


def parse_config_text(text: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        key = _norm_key(key)
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        out[key] = value.strip()
    return out


def load_config(path: str | Path) -> dict[str, str]:
    try:
        return parse_config_text(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc


def _floats(value: str) -> tuple[float, ...]:
    return tuple(float(x) for x in value.replace(",", " ").split())


def _ints(value: str) -> tuple[int, ...]:
    return tuple(int(x) for x in value.replace(",", " ").split())


_KNOWN = {"ensemble", "field", "radii", "probs", "lambda", "n_grid", "p_max", "trials", "seed", "output_dir", "workers"}


def build_config(values: Mapping[str, Any]) -> ExperimentConfig:
    """Build a config from string (file) or already-typed (CLI) values.

    ``None`` values are treated as absent so that CLI defaults do not mask
    config-file entries.
    """
    values = {_norm_key(k): v for k, v in values.items() if v is not None}
    unknown = set(values) - _KNOWN
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")

    def get(key, conv, default):
        if key not in values:
            return default
        v = values[key]
        try:
            return conv(v) if isinstance(v, str) else v
        except ValueError as exc:
            raise ConfigError(f"bad value for {key}: {v!r}") from exc

    try:
        spec = EnsembleSpec(
            kind=get("ensemble", str, "UnitSphere"),
            field=get("field", str, "complex"),
            radii=get("radii", _floats, ()),
            probs=get("probs", _floats, ()),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    out = get("output_dir", Path, None)
    return ExperimentConfig(
        ensemble=spec,
        lam=float(get("lambda", float, 1.0)),
        n_grid=tuple(get("n_grid", _ints, (128, 256, 512))),
        p_max=int(get("p_max", int, 5)),
        trials=int(get("trials", int, 200)),
        seed=int(get("seed", int, 0)),
        output_dir=Path(out) if out is not None else None,
        workers=int(get("workers", int, 1)),
    )
