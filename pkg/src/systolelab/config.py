"""Run configuration: tolerances, search box, seed and catalog path.

The file format is flat ``key = value`` lines with ``#`` comments.  Box
bounds are given as comma-separated six-vectors.  Random streams are Philox
counter-based generators keyed by ``SeedSequence([seed, crc32(name)])``, so a
named stream is the same on every platform and independent of how many other
streams were drawn first.
"""
from __future__ import annotations

import hashlib
import json
import zlib
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from .optimize import DEFAULT_BOX, SearchBox


def rng_for(seed: int, name: str) -> np.random.Generator:
    """Named random stream derived from ``seed``."""
    ss = np.random.SeedSequence([int(seed), zlib.crc32(name.encode())])
    return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True)
class Config:
    systole_rel: float = 1e-7
    lp_margin: float = 1e-9
    grad_tol: float = 1e-7
    fd_step: float = 1e-5
    box_lo: tuple = DEFAULT_BOX.lo
    box_hi: tuple = DEFAULT_BOX.hi
    bers_bound: float = 6.0
    seed: int = 0
    catalog: str | None = None
    extra: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        for k in ("systole_rel", "lp_margin", "grad_tol", "fd_step", "bers_bound"):
            v = float(getattr(self, k))
            if not v > 0.0:
                raise ValueError(f"{k} must be positive, got {v}")
            object.__setattr__(self, k, v)
        object.__setattr__(self, "box_lo", tuple(float(v) for v in self.box_lo))
        object.__setattr__(self, "box_hi", tuple(float(v) for v in self.box_hi))
        object.__setattr__(self, "seed", int(self.seed))
        self.box  # validates ordering

    @property
    def box(self) -> SearchBox:
        return SearchBox(self.box_lo, self.box_hi)

    def rng(self, name: str) -> np.random.Generator:
        return rng_for(self.seed, name)

    def with_overrides(self, **kw) -> Config:
        return replace(self, **{k: v for k, v in kw.items() if v is not None})

    def to_json(self) -> dict:
        d = asdict(self)
        d.pop("extra")
        d["box_lo"], d["box_hi"] = list(self.box_lo), list(self.box_hi)
        return d

    def digest(self) -> str:
        blob = json.dumps(self.to_json(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


_FLOATS = {"systole_rel", "lp_margin", "grad_tol", "fd_step", "bers_bound"}


def parse_config(text: str) -> Config:
    values: dict = {}
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {n}: expected 'key = value', got {raw!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        if key in _FLOATS:
            values[key] = float(val)
        elif key == "seed":
            values[key] = int(val)
        elif key in ("box_lo", "box_hi"):
            vec = tuple(float(v) for v in val.split(","))
            if len(vec) != 6:
                raise ValueError(f"config line {n}: {key} needs six values")
            values[key] = vec
        elif key == "catalog":
            values[key] = val
        else:
            raise ValueError(f"config line {n}: unknown key {key!r}")
    return Config(**values)


def load_config(path: str | Path | None) -> Config:
    if path is None:
        return Config()
    p = Path(path)
    cfg = parse_config(p.read_text())
    if cfg.catalog and not Path(cfg.catalog).is_absolute():
        cfg = replace(cfg, catalog=str(p.parent / cfg.catalog))
    return cfg
