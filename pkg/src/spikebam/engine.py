"""Vectorised 1 ms discrete-time simulation of a :class:`~spikebam.network.Topology`.

Per step ``t``:

1. spikes emitted at ``t - 1`` arrive at their targets (unit synaptic delay);
2. scheduled sensory spikes are injected;
3. interneurons and pyramidal cells are updated from potentials read out of
   ring buffers (NaAP, then CaAP);
4. STDP: depression for every presynaptic emission, then potentiation for
   every postsynaptic emission;
5. spikes are recorded and their own-kernel (eta, rho) responses scheduled.

Kernel responses are accumulated into ring buffers of length
``support + 1``: an event at time ``a`` adds ``kernel[s] * weight`` to the
slot of time ``a + s`` for ``s = 1..support``.  Each slot therefore holds a
chronological running sum, the same arithmetic the object-level neuron
functions perform, which makes the engine exactly reproducible by
:mod:`spikebam.oracle`.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Sequence

import numpy as np

from . import network as net
from .config import ExperimentConfig
from .kernels import KernelParams, StdpWindowParams, eps, eta, kernel_table, rho
from .neuron import NeuronThresholds
from . import _core
from .plasticity import NO_SPIKE
from .stimulus import (
    PRESENTATION_MS,
    PresentationEntry,
    StimulusSet,
    encode_presentation,
    load_patterns,
    protocol_schedule,
)

log = logging.getLogger(__name__)

EVENT_NA, EVENT_CA, EVENT_INH = 0, 1, 2
EVENT_NAMES = ("na", "ca", "inh")

_DISTAL = net.SITE_CODES[net.Site.DISTAL]
_INH = net.KIND_CODES[net.SynapseKind.INHIBITORY]
_FIXED = net.KIND_CODES[net.SynapseKind.FIXED]


class Simulator:
    """Holds the dynamic state of one network and advances it step by step."""

    def __init__(
        self,
        topology: net.Topology,
        kernel: KernelParams,
        window: StdpWindowParams,
        thresholds: NeuronThresholds,
        inhibitory_mode: str = "magnitude",
        record_potentials: bool = False,
    ) -> None:
        self.topology = topology
        self.kernel = kernel
        self.window = window
        self.th = thresholds
        self.inhibitory_mode = inhibitory_mode
        self.topdown = bool(topology.topdown_enabled)
        n = topology.n_neurons
        self.n = n

        pre = topology.pre.astype(np.int64)
        post = topology.post.astype(np.int64)
        self.distal = topology.site == _DISTAL
        key = (pre * n + post) * 2 + self.distal
        if np.unique(key).size != key.size:
            raise ValueError("duplicate synapse between the same pair on the same site")
        self.pre, self.post = pre, post
        self.w = topology.weight.astype(np.float64).copy()
        self.plastic = topology.kind != _FIXED
        self.inh = topology.kind == _INH
        self.out_ptr, self.out_idx = _core.csr(pre, n)
        self.in_ptr, self.in_idx = _core.csr(post, n)

        self.is_pyr = topology.is_pyramidal.astype(bool)
        L = int(kernel.support) + 1
        self.L = L
        self.eps_tab = kernel_table(eps, kernel)[1:]
        self.eta_tab = kernel_table(eta, kernel)[1:]
        self.rho_tab = kernel_table(rho, kernel)[1:]
        self.eta_buf = np.zeros((L, n))
        self.soma_buf = np.zeros((L, n))
        self.distal_buf = np.zeros((L, n))
        self.rho_buf = np.zeros((L, n))
        self.bap_pending = np.zeros((thresholds.bp_delay + thresholds.ca_window, n), dtype=bool)
        self.last_spike = np.full(n, NO_SPIKE, dtype=np.int64)

        self.prev_fired = np.zeros(0, dtype=np.int64)
        self._u = np.zeros(n)
        self._d = np.zeros(n)
        self._fired = np.zeros(n, dtype=np.int64)
        self._ca = np.zeros(n, dtype=np.int64)
        self._drive_s = np.zeros(n)
        self._drive_d = np.zeros(n)
        self._touched = np.zeros(n, dtype=bool)
        self.t = -1
        self.record_potentials = record_potentials
        self.potential_trace: List[np.ndarray] = []
        self.distal_trace: List[np.ndarray] = []

    def current_weights(self) -> np.ndarray:
        """Synapse weights in the topology's synapse order."""
        return self.w.copy()

    def sync_topology(self) -> None:
        self.topology.weight = self.current_weights()

    def step(self, forced: np.ndarray | Sequence[int] = ()) -> Dict[str, np.ndarray]:
        """Advance one ms.  ``forced`` lists pyramidal ids receiving a sensory spike."""
        t = self.t + 1
        self.t = t
        forced = np.asarray(forced, dtype=np.int64)
        if forced.size and not self.is_pyr[forced].all():
            raise ValueError("sensory spikes can only be forced on pyramidal neurons")
        th, win = self.th, self.window
        n_fired, n_ca = _core.step(
            t, forced, self.prev_fired,
            self.pre, self.post, self.w, self.distal, self.plastic, self.inh,
            self.out_ptr, self.out_idx, self.in_ptr, self.in_idx,
            self.eps_tab, self.eta_tab, self.rho_tab,
            self.eta_buf, self.soma_buf, self.distal_buf, self.rho_buf,
            self.is_pyr, self.last_spike, self.bap_pending,
            th.theta, th.theta_inh, th.theta_ca, th.bp_delay, th.ca_window, th.abs_refractory, self.topdown,
            win.a_plus, win.tau_plus, win.a_minus, win.tau_minus, self.inhibitory_mode == "signed",
            self._u, self._d, self._fired, self._ca, self._drive_s, self._drive_d, self._touched,
        )
        fired = self._fired[:n_fired].copy()
        ca = self._ca[:n_ca].copy()
        if self.record_potentials:
            self.potential_trace.append(self._u.copy())
            self.distal_trace.append(self._d.copy())
        self.prev_fired = fired
        return {"fired": fired, "ca": ca}


@dataclass
class RunRecord:
    """Everything one simulated protocol produces.

    ``outputs[p - 1, l - 1]`` is the 100x100 associative output matrix of
    stimulus ``l`` at presentation step ``p``; ``learned[l - 1]`` is the
    template recorded at the end of the learning phase.
    """

    seed: int
    condition: str
    config_hash: str
    outputs: np.ndarray
    schedule: List[PresentationEntry]
    raster: np.ndarray
    weights: Dict[str, np.ndarray] = field(default_factory=dict)
    config: Dict[str, object] = field(default_factory=dict)

    @property
    def learned(self) -> np.ndarray:
        return self.outputs[9]

    @property
    def n_steps(self) -> int:
        return len(self.schedule) * PRESENTATION_MS


RASTER_DTYPE = np.dtype([("t", np.int64), ("neuron", np.int64), ("event", np.int8)])


def run(
    topology: net.Topology,
    stimuli: StimulusSet,
    schedule: Sequence[PresentationEntry],
    config: ExperimentConfig,
    condition: str | None = None,
) -> RunRecord:
    """Simulate the whole protocol on ``topology`` (weights are updated in place)."""
    sim = Simulator(topology, config.kernel, config.window, config.thresholds, config.inhibitory_stdp)
    p1 = topology.layers["perceptive_1"].pyramidal
    p2 = topology.layers["perceptive_2"].pyramidal
    assoc = topology.layers["associative"].pyramidal
    assoc_pos = np.full(topology.n_neurons, -1)
    assoc_pos[assoc] = np.arange(assoc.size)

    n_seq = max(e.p for e in schedule)
    n_stim = len(stimuli)
    outputs = np.zeros((n_seq, n_stim, assoc.size, PRESENTATION_MS), dtype=np.uint8)
    weights = {"initial": net.snapshot_weights(topology)}
    chunks: List[np.ndarray] = []
    order = sorted(schedule, key=lambda e: e.t0)
    end_of_phase1 = max(e.t0 for e in order if e.phase == 1) + PRESENTATION_MS if any(e.phase == 1 for e in order) else None

    t = 0
    for entry in order:
        if entry.t0 != t:
            raise RuntimeError(f"schedule gap or overlap at t={t} (next t0={entry.t0})")
        events = encode_presentation(stimuli.pairs[entry.l - 1], entry.t0)
        by_time: Dict[int, List[int]] = {}
        for ev in events:
            layer_ids = p1 if ev["layer"] == 1 else p2
            by_time.setdefault(int(ev["t"]), []).append(int(layer_ids[ev["neuron"]]))
        out = outputs[entry.p - 1, entry.l - 1]
        for tau in range(PRESENTATION_MS):
            res = sim.step(by_time.get(t, ()))
            fired, ca = res["fired"], res["ca"]
            if fired.size or ca.size:
                ev = np.empty(fired.size + ca.size, dtype=RASTER_DTYPE)
                ev["t"] = t
                ev["neuron"][: fired.size] = fired
                ev["event"][: fired.size] = np.where(sim.is_pyr[fired], EVENT_NA, EVENT_INH)
                ev["neuron"][fired.size:] = ca
                ev["event"][fired.size:] = EVENT_CA
                chunks.append(ev)
                pos = assoc_pos[fired]
                out[pos[pos >= 0], tau] = 1
            t += 1
        if end_of_phase1 is not None and t == end_of_phase1:
            sim.sync_topology()
            weights["phase1"] = net.snapshot_weights(topology)
    sim.sync_topology()
    weights["phase2"] = net.snapshot_weights(topology)
    raster = np.concatenate(chunks) if chunks else np.zeros(0, dtype=RASTER_DTYPE)
    return RunRecord(
        seed=int(topology.seed) if topology.seed is not None else -1,
        condition=condition or ("topdown" if topology.topdown_enabled else "no_topdown"),
        config_hash=config.hash(),
        outputs=outputs,
        schedule=list(schedule),
        raster=raster,
        weights=weights,
        config=config.to_dict(),
    )


def simulate(config: ExperimentConfig, seed: int, condition: str) -> RunRecord:
    """Build the network for ``(seed, condition)`` and run the full protocol."""
    stimuli = load_patterns(None if config.use_builtin else config.patterns)
    topdown = condition == "topdown"
    topology = net.build(seed, topdown, config.network, config.no_topdown_mode)
    schedule = protocol_schedule(stimuli, seed)
    log.info("simulating seed=%d condition=%s", seed, condition)
    return run(topology, stimuli, schedule, config, condition)


def _simulate_args(args):
    return simulate(*args)


def run_experiment(config: ExperimentConfig) -> List[RunRecord]:
    """All seeds x conditions; conditions with the same seed share initial weights."""
    jobs = [(config, seed, cond) for seed in config.seeds for cond in config.conditions]
    if config.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            return list(pool.map(_simulate_args, jobs))
    return [simulate(*job) for job in jobs]


def firing_rate_hz(record: RunRecord) -> float:
    """Mean associative firing rate during presentations, per neuron."""
    spikes = record.outputs.sum(dtype=np.int64)
    seconds = record.outputs.shape[0] * record.outputs.shape[1] * PRESENTATION_MS / 1000.0
    return float(spikes) / (record.outputs.shape[2] * seconds)
