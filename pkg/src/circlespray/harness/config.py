"""
Flat ``key = value`` scenario configuration with dotted keys.

Example::

    grid.n = 128
    operator.kind = helmholtz        # helmholtz | sobolev | custom
    operator.params =                # sobolev: s ; custom: a(0), ..., a(n/2)
    operator.symbol_file =           # custom only, CSV with k,a rows
    ic.mean = 0
    ic.modes = 1:1:0, 2:0:0.3        # k:cos_amp:sin_amp, comma separated
    time.dt = 1e-3
    time.t_final = 1
    time.record_every = 10
    mode = both                      # eulerian | lagrangian | both
    output.dir = out
    seed = 0

Blank lines and ``#`` comments are ignored.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Mapping

from ..inertia import InertiaOperator, load_symbol_csv, make_inertia
from ..spectral import PeriodicField, make_field_from_modes

MODES = ("eulerian", "lagrangian", "both")

DEFAULTS: dict[str, str] = {
    "grid.n": "128",
    "operator.kind": "helmholtz",
    "operator.params": "",
    "operator.symbol_file": "",
    "ic.mean": "0",
    "ic.modes": "1:1:0",
    "time.dt": "1e-3",
    "time.t_final": "1",
    "time.record_every": "1",
    "mode": "eulerian",
    "output.dir": "out",
    "seed": "0",
}


class ConfigError(ValueError):
    def __init__(self, key: str, message: str):
        self.key = key
        super().__init__(f"{key}: {message}")


@dataclass(frozen=True)
class ScenarioConfig:
    n: int = 128
    operator_kind: str = "helmholtz"
    operator_params: tuple[float, ...] = ()
    symbol_file: str = ""
    ic_mean: float = 0.0
    ic_modes: tuple[tuple[int, float, float], ...] = ((1, 1.0, 0.0),)
    dt: float = 1e-3
    t_final: float = 1.0
    record_every: int = 1
    mode: str = "eulerian"
    output_dir: str = "out"
    seed: int = 0
    raw: Mapping[str, str] = field(default_factory=dict, compare=False, repr=False)

    def inertia(self) -> InertiaOperator:
        if self.symbol_file:
            return load_symbol_csv(self.symbol_file, self.n)
        return make_inertia(self.n, self.operator_kind, self.operator_params)

    def initial_velocity(self) -> PeriodicField:
        modes = [(0, self.ic_mean, 0.0), *self.ic_modes]
        return make_field_from_modes(self.n, modes)

    def echo(self) -> dict:
        d = asdict(self)
        d.pop("raw")
        d["operator_params"] = list(self.operator_params)
        d["ic_modes"] = [list(m) for m in self.ic_modes]
        return d


def parse_text(text: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}", f"expected 'key = value', got {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key] = value
    return out


def parse_overrides(items: list[str] | None) -> dict[str, str]:
    out = {}
    for item in items or []:
        if "=" not in item:
            raise ConfigError("--set", f"expected key=value, got {item!r}")
        key, value = (s.strip() for s in item.split("=", 1))
        out[key] = value
    return out


def _number(raw: Mapping[str, str], key: str, kind=float):
    try:
        return kind(raw[key])
    except ValueError:
        raise ConfigError(key, f"cannot parse {raw[key]!r} as {kind.__name__}") from None


def _modes(text: str) -> tuple[tuple[int, float, float], ...]:
    modes = []
    for part in filter(None, (p.strip() for p in text.split(","))):
        bits = part.split(":")
        if len(bits) != 3:
            raise ConfigError("ic.modes", f"expected k:cos:sin, got {part!r}")
        try:
            modes.append((int(bits[0]), float(bits[1]), float(bits[2])))
        except ValueError:
            raise ConfigError("ic.modes", f"cannot parse {part!r}") from None
    return tuple(modes)


def build_config(raw: Mapping[str, str]) -> ScenarioConfig:
    unknown = sorted(set(raw) - set(DEFAULTS))
    if unknown:
        raise ConfigError(unknown[0], "unknown key")
    merged = {**DEFAULTS, **raw}

    n = _number(merged, "grid.n", int)
    if n < 4 or n & (n - 1):
        raise ConfigError("grid.n", f"must be a power of two >= 4, got {n}")
    dt = _number(merged, "time.dt")
    if not dt > 0:
        raise ConfigError("time.dt", f"must be positive, got {dt}")
    t_final = _number(merged, "time.t_final")
    if not t_final > 0:
        raise ConfigError("time.t_final", f"must be positive, got {t_final}")
    steps = round(t_final / dt)
    if abs(steps * dt - t_final) > 1e-9 * t_final:
        raise ConfigError("time.dt", f"{dt} does not divide time.t_final = {t_final}")
    record_every = _number(merged, "time.record_every", int)
    if record_every < 1:
        raise ConfigError("time.record_every", f"must be >= 1, got {record_every}")
    mode = merged["mode"]
    if mode not in MODES:
        raise ConfigError("mode", f"must be one of {MODES}, got {mode!r}")
    try:
        params = tuple(float(p) for p in merged["operator.params"].split(",") if p.strip())
    except ValueError:
        raise ConfigError("operator.params", f"cannot parse {merged['operator.params']!r}") from None
    modes = _modes(merged["ic.modes"])
    for k, _, _ in modes:
        if not 0 <= k <= n // 2:
            raise ConfigError("ic.modes", f"wavenumber {k} outside 0..{n // 2}")

    cfg = ScenarioConfig(
        n=n,
        operator_kind=merged["operator.kind"],
        operator_params=params,
        symbol_file=merged["operator.symbol_file"],
        ic_mean=_number(merged, "ic.mean"),
        ic_modes=modes,
        dt=dt,
        t_final=t_final,
        record_every=record_every,
        mode=mode,
        output_dir=merged["output.dir"],
        seed=_number(merged, "seed", int),
        raw=dict(merged),
    )
    try:
        cfg.inertia()
    except (ValueError, OSError, KeyError) as exc:
        key = "operator.symbol_file" if cfg.symbol_file else "operator.kind"
        raise ConfigError(key, str(exc)) from None
    return cfg


def load_config(path: str | Path | None, overrides: list[str] | None = None) -> ScenarioConfig:
    raw: dict[str, str] = {}
    if path is not None:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError("--config", f"cannot read {path}: {exc.strerror}") from None
        raw.update(parse_text(text))
    raw.update(parse_overrides(overrides))
    return build_config(raw)
