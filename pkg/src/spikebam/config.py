"""Experiment configuration: a flat ``key = value`` text file.

Keys (defaults in brackets)::

    # kernels
    tau_s [2.0]  eps_amp [0.033]  tau_r [5.0]  eta_amp [5.0]
    tau_ca [10.0]  rho_amp [0.6]  support [90]
    # STDP windows
    a_plus [0.1]  tau_plus [20.0]  a_minus [0.12]  tau_minus [20.0]
    # thresholds
    theta [1.0]  theta_ca [1.0]  bp_delay [2]  ca_window [5]  abs_refractory [2]
    theta_inh [0.01]
    # initial weights
    w_lo [0.2]  w_hi [0.6]  inh_lo [-0.4]  inh_hi [-0.1]  fixed_weight [1.0]
    # experiment
    seeds [1,2,3,4,5]         comma separated list
    conditions [no_topdown,topdown]
    patterns [builtin]        path to a glyph file, or "builtin"
    out_dir [results]
    replay_log [true]
    no_topdown_mode [disable_caap]    disable_caap | remove_feedback
    inhibitory_stdp [magnitude]       magnitude | signed
    workers [1]

Blank lines and ``#`` comments are ignored.  Randomness: network weights
use ``numpy.random.Generator(PCG64(seed))``; recall-phase orders use
``numpy.random.default_rng([seed, 1])`` (PCG64 seeded through SeedSequence).
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Tuple

from .kernels import KernelParams, StdpWindowParams
from .network import NO_TOPDOWN_MODES, NetworkParams
from .neuron import NeuronThresholds
from .plasticity import INHIBITORY_MODES

CONDITIONS = ("no_topdown", "topdown")

# Experiment defaults differ from the component defaults in three values.
# With a unit PSP peak and 5 ms PSPs the full network fires near saturation
# and stops discriminating; these keep the associative layer mid-band.
EXPERIMENT_KERNEL = KernelParams(tau_s=2.0, eps_amp=0.033)
EXPERIMENT_THRESHOLDS = NeuronThresholds(theta_inh=0.01)


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    kernel: KernelParams = EXPERIMENT_KERNEL
    window: StdpWindowParams = field(default_factory=StdpWindowParams)
    thresholds: NeuronThresholds = EXPERIMENT_THRESHOLDS
    network: NetworkParams = field(default_factory=NetworkParams)
    seeds: Tuple[int, ...] = (1, 2, 3, 4, 5)
    conditions: Tuple[str, ...] = CONDITIONS
    patterns: str = "builtin"
    out_dir: str = "results"
    replay_log: bool = True
    no_topdown_mode: str = "disable_caap"
    inhibitory_stdp: str = "magnitude"
    workers: int = 1

    def __post_init__(self) -> None:
        if not self.seeds:
            raise ConfigError("seeds: at least one seed is required")
        bad = [c for c in self.conditions if c not in CONDITIONS]
        if bad or not self.conditions:
            raise ConfigError(f"conditions: expected a subset of {CONDITIONS}, got {self.conditions}")
        if self.no_topdown_mode not in NO_TOPDOWN_MODES:
            raise ConfigError(f"no_topdown_mode: expected one of {NO_TOPDOWN_MODES}, got {self.no_topdown_mode!r}")
        if self.inhibitory_stdp not in INHIBITORY_MODES:
            raise ConfigError(f"inhibitory_stdp: expected one of {INHIBITORY_MODES}, got {self.inhibitory_stdp!r}")
        if self.workers < 1:
            raise ConfigError(f"workers: must be >= 1, got {self.workers}")

    @property
    def use_builtin(self) -> bool:
        return self.patterns == "builtin"

    def to_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {}
        for group in ("kernel", "window", "thresholds", "network"):
            out.update(dataclasses.asdict(getattr(self, group)))
        for f in dataclasses.fields(self):
            if f.name not in ("kernel", "window", "thresholds", "network"):
                value = getattr(self, f.name)
                out[f.name] = list(value) if isinstance(value, tuple) else value
        return out

    def science_dict(self) -> Dict[str, Any]:
        """Everything that influences simulation results (no paths, no worker count)."""
        d = self.to_dict()
        for key in ("out_dir", "replay_log", "workers"):
            d.pop(key)
        return d

    def hash(self) -> str:
        blob = json.dumps(self.science_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def to_text(self) -> str:
        lines = []
        for key, value in self.to_dict().items():
            if isinstance(value, list):
                value = ",".join(str(v) for v in value)
            elif isinstance(value, bool):
                value = str(value).lower()
            lines.append(f"{key} = {value}")
        return "\n".join(lines) + "\n"


_GROUPS = {
    "kernel": KernelParams,
    "window": StdpWindowParams,
    "thresholds": NeuronThresholds,
    "network": NetworkParams,
}
_KEY_GROUP = {f.name: g for g, cls in _GROUPS.items() for f in dataclasses.fields(cls)}
_TOP_KEYS = {f.name: f for f in dataclasses.fields(ExperimentConfig) if f.name not in _GROUPS}


def _coerce(key: str, raw: Any, default: Any) -> Any:
    if not isinstance(raw, str):
        return raw
    raw = raw.strip()
    try:
        if isinstance(default, bool):
            if raw.lower() not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError(raw)
            return raw.lower() in ("true", "1", "yes")
        if isinstance(default, int):
            return int(raw)
        if isinstance(default, float):
            return float(raw)
        if isinstance(default, tuple):
            items = [x.strip() for x in raw.split(",") if x.strip()]
            return tuple(int(x) for x in items) if key == "seeds" else tuple(items)
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {raw!r}") from None
    return raw


def parse_text(text: str) -> Dict[str, str]:
    values: Dict[str, str] = {}
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {n}: expected 'key = value', got {line!r}")
        key, value = (x.strip() for x in line.split("=", 1))
        if key not in _KEY_GROUP and key not in _TOP_KEYS:
            raise ConfigError(f"line {n}: unknown key {key!r}")
        values[key] = value
    return values


def build_config(values: Dict[str, Any] | None = None, base: ExperimentConfig | None = None) -> ExperimentConfig:
    """Overlay ``values`` (strings or typed) onto ``base`` and validate every group."""
    base = base or ExperimentConfig()
    values = dict(values or {})
    groups: Dict[str, Dict[str, Any]] = {g: {} for g in _GROUPS}
    top: Dict[str, Any] = {}
    for key, raw in values.items():
        if key in _KEY_GROUP:
            g = _KEY_GROUP[key]
            groups[g][key] = _coerce(key, raw, getattr(getattr(base, g), key))
        elif key in _TOP_KEYS:
            top[key] = _coerce(key, raw, getattr(base, key))
        else:
            raise ConfigError(f"unknown key {key!r}")
    try:
        for g, cls in _GROUPS.items():
            if groups[g]:
                top[g] = dataclasses.replace(getattr(base, g), **groups[g])
        return dataclasses.replace(base, **top)
    except ConfigError:
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from None


def load_config(path: str | Path) -> ExperimentConfig:
    return build_config(parse_text(Path(path).read_text()))
