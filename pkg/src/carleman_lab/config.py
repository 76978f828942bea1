"""Experiment configuration: JSON files validated against the shipped schema."""

from __future__ import annotations

import copy
import json
import os
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from .errors import ConfigInvalid
from .riemannian import PRESETS, make_preset

# per-block defaults shared by every subcommand
DEFAULTS = {
    "metric": {"preset": "euclidean", "params": {}},
    "potential": {"preset": "constant", "value": 0.0, "eta": 0.0},
    "weight": {"gamma": {"start": 3.0, "factor": 2.0, "count": 1},
               "s": {"start": 5.0, "factor": 2.0, "count": 6}, "delta_min": 1e-3, "n_t": 64},
    "solver": {"tol": 1e-12, "parabolic_tol": 1e-10, "R_inf": None, "truncation_tol": 1e-8, "T": 1.0,
               "n_t": 128},
    "admissible": {"alpha": 1.0, "beta": 2.0, "fourier_degree": 4, "time_degree": 2, "u0_profile": "harmonic",
                   "seed": 7},
    "study": {"count": 100, "eps": None, "refine": True},
    "carleman": {"bank": None, "refine": True, "slack": 1.2},
    "solve": {"problem": "elliptic", "data": {"c0": 1.0}, "g0": [1.0]},
    "output": {"dir": "carleman_lab_out", "prefix": "", "figures": True},
}

# geometry defaults depend on the experiment
GEOMETRY_DEFAULTS = {
    "verify-carleman": {"kind": "annulus", "r_inner": 1.0, "r_outer": 2.0, "n_r": 4096, "n_theta": 64,
                        "upsilon": "inner"},
    "verify-parabolic": {"kind": "annulus", "r_inner": 0.5, "r_outer": 1.0, "n_r": 128, "n_theta": 32,
                         "upsilon": "outer"},
    "solve": {"kind": "disk", "r_outer": 1.0, "r_gamma": 0.5, "n_r": 64, "n_theta": 128},
    "stability": {"kind": "disk", "r_outer": 1.0, "r_gamma": 0.5, "n_r": 64, "n_theta": 128},
    "parabolic-stability": {"kind": "disk", "r_outer": 1.0, "r_gamma": 0.5, "n_r": 32, "n_theta": 64},
    "oracle-check": {},
}


def load_schema() -> dict:
    text = resources.files("carleman_lab").joinpath("data/config.schema.json").read_text(encoding="utf-8")
    return json.loads(text)


def geometric_sequence(spec: dict) -> np.ndarray:
    """``start * factor**k`` for ``k < count``."""
    return spec["start"] * spec.get("factor", 2.0) ** np.arange(spec.get("count", 1))


@dataclass
class ExperimentConfig:
    raw: dict
    subcommand: str
    path: Path | None = None
    blocks: dict = field(default_factory=dict)

    def __getitem__(self, name: str) -> dict:
        return self.blocks[name]

    @property
    def output_dir(self) -> Path:
        return Path(self.blocks["output"]["dir"])

    def out(self, stem: str, ext: str) -> Path:
        return self.output_dir / f"{self.blocks['output']['prefix']}{stem}.{ext}"

    @property
    def threads(self) -> int | None:
        return self.raw.get("threads")

    def metric_preset(self):
        m = self.blocks["metric"]
        return make_preset(m["preset"], **m["params"])

    def echo(self) -> dict:
        """Resolved configuration, written next to every result."""
        return {"subcommand": self.subcommand, **copy.deepcopy(self.blocks)}


def _merge(default: dict, given: dict) -> dict:
    out = copy.deepcopy(default)
    for k, v in given.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict) and k != "params":
            out[k] = _merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def parse_config(raw: dict, subcommand: str, path: Path | None = None) -> ExperimentConfig:
    try:
        jsonschema.validate(raw, load_schema())
    except jsonschema.ValidationError as err:
        where = "/".join(str(p) for p in err.absolute_path) or "<root>"
        raise ConfigInvalid(f"{where}: {err.message}") from None
    blocks = {name: _merge(d, raw.get(name, {})) for name, d in DEFAULTS.items()}
    blocks["geometry"] = _merge(GEOMETRY_DEFAULTS.get(subcommand, {}), raw.get("geometry", {}))
    cfg = ExperimentConfig(raw, subcommand, path, blocks)
    _check(cfg)
    return cfg


def load_config(path, subcommand: str) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as err:
        raise ConfigInvalid(f"cannot read config {str(path)!r}: {err.strerror}") from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as err:
        raise ConfigInvalid(f"{path}: invalid JSON ({err.msg} at line {err.lineno})") from None
    if not isinstance(raw, dict):
        raise ConfigInvalid("the config must be a JSON object")
    return parse_config(raw, subcommand, path)


def _check(cfg: ExperimentConfig):
    m = cfg["metric"]
    if m["preset"] not in PRESETS:
        raise ConfigInvalid(f"unknown metric preset {m['preset']!r}")
    try:
        make_preset(m["preset"], **m["params"])
    except (TypeError, ValueError) as err:
        raise ConfigInvalid(f"metric params: {err}") from None
    pot = cfg["potential"]
    if pot["eta"] > pot["value"]:
        raise ConfigInvalid("potential: eta must not exceed the constant value")
    for name in ("gamma", "s"):
        if geometric_sequence(cfg["weight"][name]).size == 0:
            raise ConfigInvalid(f"weight/{name}: empty sweep grid")
    eps = cfg["study"]["eps"]
    if eps is not None and not eps < cfg["solver"]["T"] / 2:
        raise ConfigInvalid("study/eps must be smaller than T/2")
    out = cfg.output_dir
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as err:
        raise ConfigInvalid(f"output/dir {str(out)!r} is not writable: {err.strerror}") from None
    if not os.access(out, os.W_OK):
        raise ConfigInvalid(f"output/dir {str(out)!r} is not writable")
