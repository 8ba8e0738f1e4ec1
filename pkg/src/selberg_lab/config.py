"""Experiment configuration: a flat ``key = value`` text file (``#`` starts a
comment) whose keys mirror the command-line flags.  Command-line values win
over file values."""

from __future__ import annotations

import math
import os
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from .lfunc_registry import BUILTIN_KINDS, DescriptorError, LFunctionDescriptor, make_builtin

KIND_ALIASES = {"zeta": "riemann_zeta", "delta": "ramanujan_delta", "ec": "elliptic_curve", "table": "external_table"}


class ConfigError(ValueError):
    """Invalid configuration; ``field`` names the offending key."""

    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


@dataclass
class ExperimentConfig:
    kind: str = "riemann_zeta"
    name: str | None = None
    a_invariants: tuple[int, ...] | None = None
    conductor: float | None = None
    path: str | None = None
    degree: float | None = None
    root_number: float = 1.0
    pole_order: int = 0
    bad_primes: tuple[int, ...] = ()
    X: float = 1.0e6
    grid: str = ""  # "r:lo:hi:count" (log(X/h) or log(1/delta) evenly spaced) or comma list
    grid_kind: str = "tilde"  # tilde | delta
    N: int | None = None  # coefficient table length, default ceil(2X)
    P: int = 100_000
    L: int = 8
    eps: float = 1e-2
    T: float | None = None
    Z: float | None = None
    k: int = 2
    zeros: tuple[str, ...] = ()
    reflect: bool = True
    samples: int = 50
    out: str = "out"
    seed: int = 0
    extra: dict = field(default_factory=dict)

    def validate(self) -> "ExperimentConfig":
        self.kind = KIND_ALIASES.get(self.kind, self.kind)
        if self.kind not in BUILTIN_KINDS:
            raise ConfigError("kind", f"unknown kind {self.kind!r}; expected one of {BUILTIN_KINDS}")
        for key in ("X", "P", "L", "eps", "N", "T", "Z", "samples"):
            v = getattr(self, key)
            if v is not None and not (v > 0 and math.isfinite(v)):
                raise ConfigError(key, f"must be positive, got {v}")
        if self.X <= 1:
            raise ConfigError("X", f"must exceed 1, got {self.X}")
        if self.grid_kind not in ("tilde", "delta"):
            raise ConfigError("grid_kind", f"expected tilde or delta, got {self.grid_kind!r}")
        if self.k < 0:
            raise ConfigError("k", "must be nonnegative")
        self.grid_values()
        out = Path(self.out)
        try:
            out.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise ConfigError("out", f"cannot create {out}: {exc}") from None
        if not os.access(out, os.W_OK):
            raise ConfigError("out", f"{out} is not writable")
        return self

    def descriptor(self) -> LFunctionDescriptor:
        params = {"name": self.name}
        if self.kind == "elliptic_curve":
            params.update(a_invariants=self.a_invariants, conductor=self.conductor, root_number=self.root_number)
        elif self.kind == "external_table":
            params.update(
                path=self.path,
                degree=self.degree,
                conductor=self.conductor,
                root_number=self.root_number,
                pole_order=self.pole_order,
                bad_primes=self.bad_primes,
            )
        try:
            return make_builtin(self.kind, **params)
        except DescriptorError as exc:
            raise ConfigError("kind", str(exc)) from None

    def grid_values(self) -> np.ndarray:
        """Ascending h (or delta) values described by ``grid``."""
        text = self.grid.strip()
        if not text:
            return np.zeros(0)
        if text.startswith("r:"):
            try:
                lo, hi, count = text[2:].split(":")
                lo, hi, count = float(lo), float(hi), int(count)
            except ValueError:
                raise ConfigError("grid", f"expected r:lo:hi:count, got {text!r}") from None
            if count < 0 or (count > 1 and not lo < hi):
                raise ConfigError("grid", f"bad range in {text!r}")
            r = np.linspace(hi, lo, count)
            vals = self.X * np.exp(-r) if self.grid_kind == "tilde" else np.exp(-r)
        else:
            try:
                vals = np.array(sorted(float(v) for v in text.split(",") if v.strip()))
            except ValueError:
                raise ConfigError("grid", f"not a comma-separated list of numbers: {text!r}") from None
        if vals.size and (np.any(vals <= 0) or np.any(np.diff(vals) <= 0)):
            raise ConfigError("grid", "values must be positive and distinct")
        if self.grid_kind == "delta" and vals.size and vals.max() >= 1:
            raise ConfigError("grid", "delta values must lie in (0, 1)")
        if self.grid_kind == "tilde" and vals.size and (vals.min() <= 1 or vals.max() >= self.X):
            raise ConfigError("grid", "h values must lie in (1, X)")
        return vals

    def table_length(self) -> int:
        if self.N is not None:
            return int(self.N)
        top = 2.0 * self.X if self.grid_kind == "tilde" else self.X * (1.0 + max(self.grid_values(), default=0.0))
        return int(math.ceil(top)) + 1

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("extra")
        d.update(self.extra)
        return d


def _coerce(name: str, raw: str):
    types = {f.name: f.type for f in fields(ExperimentConfig)}
    t = types[name]
    raw = raw.strip()
    try:
        if name in ("a_invariants", "bad_primes"):
            return tuple(int(v) for v in raw.replace("[", "").replace("]", "").split(",") if v.strip())
        if name == "zeros":
            return tuple(v.strip() for v in raw.split(",") if v.strip())
        if name == "reflect":
            if raw.lower() not in ("1", "0", "true", "false", "yes", "no"):
                raise ValueError(raw)
            return raw.lower() in ("1", "true", "yes")
        if raw.lower() in ("", "none") and "None" in t:
            return None
        if t.startswith("int"):
            return int(float(raw)) if float(raw).is_integer() else int(raw)
        if t.startswith("float"):
            return float(raw)
    except ValueError:
        raise ConfigError(name, f"cannot parse {raw!r}") from None
    return raw


def parse_text(text: str) -> dict:
    out = {}
    known = {f.name for f in fields(ExperimentConfig)} - {"extra"}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}", f"expected key = value, got {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in known:
            raise ConfigError(key, "unknown configuration key")
        out[key] = _coerce(key, value)
    return out


def load_config(path=None, overrides: dict | None = None) -> ExperimentConfig:
    values = {}
    if path is not None:
        try:
            values.update(parse_text(Path(path).read_text()))
        except OSError as exc:
            raise ConfigError("config", f"cannot read {path}: {exc}") from None
    for key, raw in (overrides or {}).items():
        if raw is None:
            continue
        values[key] = _coerce(key, raw) if isinstance(raw, str) else raw
    return ExperimentConfig(**values).validate()
