"""Single-neuron dynamics: layer-V pyramidal cells and interneurons.

These are the reference (object level) definitions.  Potentials are summed
directly from the recorded event history; the engine reproduces them with
ring buffers over whole populations.

Summation convention, shared with the engine so that both produce the same
floating point numbers: input events arriving at the same ms are first
added together in arrival order, then each arrival time contributes
``kernel(t - arrival) * total_weight`` to a running sum taken in
chronological order.  The somatic potential is ``(eta_sum + eps_sum) + rho_sum``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import List, Tuple

from .kernels import KernelParams, eps, eta, rho


class SpikeOutcome(str, Enum):
    NONE = "none"
    SPIKE = "spike"
    NA = "na_spike"
    NA_CA = "na_spike+ca_spike"
    CA = "ca_spike"


@dataclass(frozen=True)
class NeuronThresholds:
    theta: float = 1.0
    theta_ca: float = 1.0
    bp_delay: int = 2
    ca_window: int = 5
    abs_refractory: int = 2
    # interneuron firing threshold; None means "same as theta"
    theta_inh: float | None = None

    def __post_init__(self) -> None:
        if self.theta_inh is None:
            object.__setattr__(self, "theta_inh", self.theta)
        for name in ("theta", "theta_ca", "theta_inh"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)!r}")
        for name in ("bp_delay", "ca_window", "abs_refractory"):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise ValueError(f"{name} must be an integer >= 1, got {value!r}")


Event = Tuple[int, float]


@dataclass
class PyramidalState:
    somatic_spikes: List[int] = field(default_factory=list)
    ca_spikes: List[int] = field(default_factory=list)
    basal_inputs: List[Event] = field(default_factory=list)
    distal_inputs: List[Event] = field(default_factory=list)
    topdown_enabled: bool = True
    # somatic spikes whose backpropagated copy already produced a CaAP
    consumed_bap: set = field(default_factory=set)
    last_t: int | None = None


@dataclass
class InterneuronState:
    spikes: List[int] = field(default_factory=list)
    inputs: List[Event] = field(default_factory=list)
    last_t: int | None = None


def _spike_sum(kernel, times: List[int], t: int, p: KernelParams) -> float:
    total = 0.0
    for tf in times:
        total += kernel(t - tf, p)
    return total


def _event_sum(events: List[Event], t: int, p: KernelParams) -> float:
    total = 0.0
    i = 0
    n = len(events)
    while i < n:
        arrival, weight = events[i]
        i += 1
        while i < n and events[i][0] == arrival:
            weight = weight + events[i][1]
            i += 1
        total += eps(t - arrival, p) * weight
    return total


def somatic_potential(state: PyramidalState, t: int, p: KernelParams) -> float:
    """Somatic potential: own afterhyperpolarisations, basal PSPs and CaAP responses."""
    u = _spike_sum(eta, state.somatic_spikes, t, p) + _event_sum(state.basal_inputs, t, p)
    if state.topdown_enabled:
        u = u + _spike_sum(rho, state.ca_spikes, t, p)
    return u


def distal_potential(state: PyramidalState, t: int, p: KernelParams) -> float:
    return _event_sum(state.distal_inputs, t, p)


def interneuron_potential(state: InterneuronState, t: int, p: KernelParams) -> float:
    return _spike_sum(eta, state.spikes, t, p) + _event_sum(state.inputs, t, p)


def _check_order(state, t: int) -> None:
    if state.last_t is not None and t <= state.last_t:
        raise RuntimeError(f"neuron stepped out of order: t={t} after t={state.last_t}")
    state.last_t = t


def step_pyramidal(
    state: PyramidalState,
    t: int,
    thresholds: NeuronThresholds,
    p: KernelParams,
    forced: bool = False,
) -> SpikeOutcome:
    """Advance a pyramidal neuron to time ``t``.

    A somatic spike (NaAP) is emitted when the somatic potential reaches
    ``theta`` outside the absolute refractory period, or unconditionally
    when ``forced`` (sensory injection).  With top-down modulation enabled, a
    CaAP is emitted when the distal potential reaches ``theta_ca`` while the
    backpropagated copy of an earlier NaAP is inside its coincidence window;
    each NaAP can trigger at most one CaAP.
    """
    _check_order(state, t)
    fired = forced
    if not fired and somatic_potential(state, t, p) >= thresholds.theta:
        last = state.somatic_spikes[-1] if state.somatic_spikes else None
        fired = last is None or t - last >= thresholds.abs_refractory

    ca = False
    if state.topdown_enabled:
        candidates = [
            tf
            for tf in state.somatic_spikes
            if 0 <= t - (tf + thresholds.bp_delay) < thresholds.ca_window
            and tf not in state.consumed_bap
        ]
        if candidates and distal_potential(state, t, p) >= thresholds.theta_ca:
            state.consumed_bap.add(min(candidates))
            state.ca_spikes.append(t)
            ca = True

    if fired:
        state.somatic_spikes.append(t)
    if fired and ca:
        return SpikeOutcome.NA_CA
    if fired:
        return SpikeOutcome.NA
    if ca:
        return SpikeOutcome.CA
    return SpikeOutcome.NONE


def step_interneuron(
    state: InterneuronState, t: int, thresholds: NeuronThresholds, p: KernelParams
) -> SpikeOutcome:
    _check_order(state, t)
    if interneuron_potential(state, t, p) >= thresholds.theta_inh:
        last = state.spikes[-1] if state.spikes else None
        if last is None or t - last >= thresholds.abs_refractory:
            state.spikes.append(t)
            return SpikeOutcome.SPIKE
    return SpikeOutcome.NONE


def prune(state, t: int, p: KernelParams) -> None:
    """Drop history older than the kernel support; potentials are unaffected."""
    horizon = t - int(p.support)
    if isinstance(state, PyramidalState):
        state.somatic_spikes[:] = [s for s in state.somatic_spikes if s >= horizon]
        state.ca_spikes[:] = [s for s in state.ca_spikes if s >= horizon]
        state.basal_inputs[:] = [e for e in state.basal_inputs if e[0] >= horizon]
        state.distal_inputs[:] = [e for e in state.distal_inputs if e[0] >= horizon]
        state.consumed_bap = {s for s in state.consumed_bap if s >= horizon}
    else:
        state.spikes[:] = [s for s in state.spikes if s >= horizon]
        state.inputs[:] = [e for e in state.inputs if e[0] >= horizon]
