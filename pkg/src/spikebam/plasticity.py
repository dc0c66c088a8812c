"""Multiplicative nearest-spike STDP.

A synapse is updated at every pre- and postsynaptic emission using the
most recent spike on the opposite side.  Potentiation moves the weight
magnitude ``m`` toward 1 by ``(1 - m) * omega_plus(dt)``; depression moves
it toward 0 by ``m * omega_minus(dt)``.  Simultaneous pre/post spikes
(``dt == 0``) leave the weight untouched.

Inhibitory synapses carry negative weights.  Two conventions are supported:

``"magnitude"``
    the rule acts on ``|w|``, so potentiation deepens inhibition;
``"signed"``
    the rule acts on ``w`` itself inside ``[-1, 0]``, so potentiation
    moves the weight toward 0 and depression toward -1.

The compiled engine loop repeats these exact floating point operations on
its flat synapse table.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .kernels import StdpWindowParams, omega_minus, omega_plus


class SynapseKind(str, Enum):
    EXCITATORY = "excitatory"
    INHIBITORY = "inhibitory"
    FIXED = "fixed"


class Site(str, Enum):
    BASAL = "basal"
    DISTAL = "distal"
    INTERNEURON = "interneuron"


INHIBITORY_MODES = ("magnitude", "signed")


@dataclass(frozen=True)
class Synapse:
    pre_id: int
    post_id: int
    weight: float
    kind: SynapseKind
    target_site: Site
    last_pre: Optional[int] = None
    last_post: Optional[int] = None

    def __post_init__(self) -> None:
        if self.kind is SynapseKind.EXCITATORY and not 0.0 <= self.weight <= 1.0:
            raise ValueError(f"excitatory weight out of [0, 1]: {self.weight!r}")
        if self.kind is SynapseKind.INHIBITORY and not -1.0 <= self.weight <= 0.0:
            raise ValueError(f"inhibitory weight out of [-1, 0]: {self.weight!r}")


def _clip01(x: float) -> float:
    return min(max(x, 0.0), 1.0)


def _potentiate(weight: float, kind: SynapseKind, gain: float, mode: str) -> float:
    if kind is SynapseKind.INHIBITORY and mode == "signed":
        # bounds are -1 (floor) and 0 (ceiling); potentiation heads to 0
        m = -weight
        return -_clip01(m - m * gain)
    m = abs(weight)
    m = _clip01(m + (1.0 - m) * gain)
    return -m if kind is SynapseKind.INHIBITORY else m


def _depress(weight: float, kind: SynapseKind, gain: float, mode: str) -> float:
    # gain <= 0
    if kind is SynapseKind.INHIBITORY and mode == "signed":
        m = -weight
        return -_clip01(m - (1.0 - m) * gain)
    m = abs(weight)
    m = _clip01(m + m * gain)
    return -m if kind is SynapseKind.INHIBITORY else m


def on_pre_spike(
    s: Synapse, t_pre: int, w: StdpWindowParams, inhibitory_mode: str = "magnitude"
) -> Synapse:
    """Depression branch, triggered by a presynaptic emission at ``t_pre``."""
    if s.last_pre is not None and t_pre < s.last_pre:
        raise ValueError(f"pre spike at {t_pre} precedes recorded pre spike {s.last_pre}")
    weight = s.weight
    if s.kind is not SynapseKind.FIXED and s.last_post is not None:
        dt = s.last_post - t_pre
        if dt < 0:
            weight = _depress(weight, s.kind, omega_minus(dt, w), inhibitory_mode)
    return Synapse(s.pre_id, s.post_id, weight, s.kind, s.target_site, t_pre, s.last_post)


def on_post_spike(
    s: Synapse, t_post: int, w: StdpWindowParams, inhibitory_mode: str = "magnitude"
) -> Synapse:
    """Potentiation branch, triggered by a postsynaptic emission at ``t_post``."""
    if s.last_post is not None and t_post < s.last_post:
        raise ValueError(f"post spike at {t_post} precedes recorded post spike {s.last_post}")
    weight = s.weight
    if s.kind is not SynapseKind.FIXED and s.last_pre is not None:
        dt = t_post - s.last_pre
        if dt > 0:
            weight = _potentiate(weight, s.kind, omega_plus(dt, w), inhibitory_mode)
    return Synapse(s.pre_id, s.post_id, weight, s.kind, s.target_site, s.last_pre, t_post)


# sentinel for 'never spiked' in integer spike-time arrays
NO_SPIKE = np.iinfo(np.int64).min // 2
