"""Brute-force reference simulator and the microcircuits it is checked on.

:class:`ReferenceSimulator` keeps every neuron as an object from
:mod:`spikebam.neuron`, re-evaluates the potentials from the event history
inside the kernel support at every ms, and updates each
:class:`~spikebam.plasticity.Synapse` record with the scalar STDP functions.  It shares no state or code path with
:class:`spikebam.engine.Simulator` beyond the kernel definitions, and is far
too slow for anything but a handful of neurons.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .kernels import KernelParams, StdpWindowParams
from .network import Topology
from .neuron import (
    InterneuronState,
    NeuronThresholds,
    PyramidalState,
    SpikeOutcome,
    distal_potential,
    interneuron_potential,
    prune,
    somatic_potential,
    step_interneuron,
    step_pyramidal,
)
from .plasticity import Site, Synapse, SynapseKind, on_post_spike, on_pre_spike


class ReferenceSimulator:
    def __init__(
        self,
        topology: Topology,
        kernel: KernelParams,
        window: StdpWindowParams,
        thresholds: NeuronThresholds,
        inhibitory_mode: str = "magnitude",
    ) -> None:
        self.kernel, self.window, self.th = kernel, window, thresholds
        self.mode = inhibitory_mode
        self.is_pyr = [bool(x) for x in topology.is_pyramidal]
        self.states = [
            PyramidalState(topdown_enabled=topology.topdown_enabled) if pyr else InterneuronState()
            for pyr in self.is_pyr
        ]
        self.synapses: List[Synapse] = list(topology.synapses())
        self.outgoing: Dict[int, List[int]] = {}
        self.incoming: Dict[int, List[int]] = {}
        for k, s in enumerate(self.synapses):
            self.outgoing.setdefault(s.pre_id, []).append(k)
            self.incoming.setdefault(s.post_id, []).append(k)
        self.prev_fired: List[int] = []
        self.t = -1
        self.potentials: List[List[float]] = []
        self.distal: List[List[float]] = []

    def step(self, forced: Sequence[int] = ()) -> Dict[str, List[int]]:
        t = self.t + 1
        self.t = t
        forced = set(int(x) for x in forced)

        for pre in sorted(self.prev_fired):
            for k in self.outgoing.get(pre, ()):
                s = self.synapses[k]
                target = self.states[s.post_id]
                if isinstance(target, InterneuronState):
                    target.inputs.append((t, s.weight))
                elif s.target_site is Site.DISTAL:
                    target.distal_inputs.append((t, s.weight))
                else:
                    target.basal_inputs.append((t, s.weight))

        u_row, d_row = [], []
        for st in self.states:
            if isinstance(st, PyramidalState):
                u_row.append(somatic_potential(st, t, self.kernel))
                d_row.append(distal_potential(st, t, self.kernel))
            else:
                u_row.append(interneuron_potential(st, t, self.kernel))
                d_row.append(0.0)
        self.potentials.append(u_row)
        self.distal.append(d_row)

        fired, ca = [], []
        for i, st in enumerate(self.states):
            if isinstance(st, InterneuronState):
                if step_interneuron(st, t, self.th, self.kernel) is SpikeOutcome.SPIKE:
                    fired.append(i)
        for i, st in enumerate(self.states):
            if isinstance(st, PyramidalState):
                out = step_pyramidal(st, t, self.th, self.kernel, forced=i in forced)
                if out in (SpikeOutcome.NA, SpikeOutcome.NA_CA):
                    fired.append(i)
                if out in (SpikeOutcome.CA, SpikeOutcome.NA_CA):
                    ca.append(i)
        fired.sort()

        for i in fired:
            for k in self.outgoing.get(i, ()):
                self.synapses[k] = on_pre_spike(self.synapses[k], t, self.window, self.mode)
        for i in fired:
            for k in self.incoming.get(i, ()):
                self.synapses[k] = on_post_spike(self.synapses[k], t, self.window, self.mode)

        # terms older than the support are exact zeros at the head of each sum
        for st in self.states:
            prune(st, t, self.kernel)
        self.prev_fired = fired
        return {"fired": fired, "ca": ca}

    def weights(self) -> np.ndarray:
        return np.array([s.weight for s in self.synapses])


# -- microcircuits ----------------------------------------------------------


@dataclass
class Microcircuit:
    name: str
    topology: Topology
    forced: Dict[int, List[int]]  # time -> neuron ids


def _random_drive(rng: np.random.Generator, ids: Sequence[int], n_steps: int, rate: float) -> Dict[int, List[int]]:
    drive: Dict[int, List[int]] = {}
    for i in ids:
        for t in np.flatnonzero(rng.random(n_steps) < rate):
            drive.setdefault(int(t), []).append(int(i))
    return {t: sorted(v) for t, v in drive.items()}


def _syn(pre, post, w, kind, site) -> Synapse:
    return Synapse(pre_id=pre, post_id=post, weight=w, kind=kind, target_site=site)


def microcircuits(n_steps: int = 1000, seed: int = 7) -> List[Microcircuit]:
    """The three reference circuits: lone neuron, pre->post pair, CaAP triad.

    The triad is two forced drivers (0, 2) onto pyramidal 1, whose output and
    driver 2 feed back onto the distal tuft of driver 0; interneuron 3 relays
    pyramidal 1 and inhibits neuron 0.
    """
    rng = np.random.default_rng(seed)
    E, I, F = SynapseKind.EXCITATORY, SynapseKind.INHIBITORY, SynapseKind.FIXED
    B, D, N = Site.BASAL, Site.DISTAL, Site.INTERNEURON

    single = Topology.from_synapses([True], [])
    pair = Topology.from_synapses([True, True], [_syn(0, 1, 0.9, E, B)])
    triad = Topology.from_synapses(
        [True, True, True, False],
        [
            _syn(0, 1, 0.8, E, B),
            _syn(2, 1, 0.6, E, B),
            _syn(1, 0, 0.9, E, D),
            _syn(2, 0, 0.5, E, D),
            _syn(1, 3, 1.0, F, N),
            _syn(3, 0, -0.3, I, B),
        ],
        layer_names=["perceptive_1", "associative", "perceptive_1", "associative"],
    )
    return [
        Microcircuit("single", single, _random_drive(rng, [0], n_steps, 0.05)),
        Microcircuit("pair", pair, _random_drive(rng, [0], n_steps, 0.3)),
        Microcircuit("triad", triad, _random_drive(rng, [0, 2], n_steps, 0.12)),
    ]


@dataclass
class OracleComparison:
    name: str
    steps: int
    spikes_equal: bool
    ca_equal: bool
    potentials_equal: bool
    weights_equal: bool
    n_spikes: int
    n_ca: int

    @property
    def ok(self) -> bool:
        return self.spikes_equal and self.ca_equal and self.potentials_equal and self.weights_equal

    def describe(self) -> str:
        flags = (
            f"spikes={'=' if self.spikes_equal else '!='} ca={'=' if self.ca_equal else '!='} "
            f"potentials={'=' if self.potentials_equal else '!='} weights={'=' if self.weights_equal else '!='}"
        )
        return f"{self.steps} ms, {self.n_spikes} spikes, {self.n_ca} CaAPs; {flags}"


def circuit_params() -> Tuple[KernelParams, StdpWindowParams, NeuronThresholds]:
    """Parameters for the microcircuits: unit-scale PSPs so a single strong synapse
    can fire its target and the triad emits CaAPs."""
    kernel = KernelParams(tau_s=5.0, eps_amp=1.0, tau_r=5.0, eta_amp=5.0, tau_ca=10.0, rho_amp=0.6, support=90)
    window = StdpWindowParams(a_plus=0.1, tau_plus=20.0, a_minus=0.12, tau_minus=20.0)
    thresholds = NeuronThresholds(theta=1.0, theta_ca=1.0, bp_delay=2, ca_window=5, abs_refractory=2)
    return kernel, window, thresholds


def compare(
    circuit: Microcircuit,
    kernel: KernelParams,
    window: StdpWindowParams,
    thresholds: NeuronThresholds,
    n_steps: int = 1000,
    inhibitory_mode: str = "magnitude",
) -> OracleComparison:
    """Run engine and reference side by side and compare them exactly."""
    from .engine import Simulator

    ref = ReferenceSimulator(circuit.topology, kernel, window, thresholds, inhibitory_mode)
    sim = Simulator(circuit.topology.copy(), kernel, window, thresholds, inhibitory_mode, record_potentials=True)
    spikes_eq = ca_eq = True
    n_spikes = n_ca = 0
    for t in range(n_steps):
        forced = circuit.forced.get(t, [])
        a = ref.step(forced)
        b = sim.step(forced)
        spikes_eq &= a["fired"] == b["fired"].tolist()
        ca_eq &= sorted(a["ca"]) == sorted(b["ca"].tolist())
        n_spikes += len(a["fired"])
        n_ca += len(a["ca"])
    ref_u = np.array(ref.potentials)
    sim_u = np.array(sim.potential_trace)
    ref_d = np.array(ref.distal)
    sim_d = np.array(sim.distal_trace)
    pyr = np.asarray(circuit.topology.is_pyramidal, dtype=bool)
    potentials_eq = bool(np.array_equal(ref_u, sim_u) and np.array_equal(ref_d[:, pyr], sim_d[:, pyr]))
    weights_eq = bool(np.array_equal(ref.weights(), sim.current_weights()))
    return OracleComparison(circuit.name, n_steps, spikes_eq, ca_eq, potentials_eq, weights_eq, n_spikes, n_ca)
