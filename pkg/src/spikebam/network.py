"""Three-layer architecture: two perceptive layers feeding one associative layer.

Every layer holds 100 pyramidal neurons and 100 interneurons.  Connectivity:

* perceptive pyramidal -> every associative pyramidal, basal site (plastic)
* associative pyramidal -> every perceptive pyramidal of both layers,
  distal site (plastic)
* pyramidal -> its own interneuron, weight 1.0 (fixed)
* interneuron -> every other pyramidal of its layer (plastic, inhibitory)

Neuron ids are global: layer ``k`` (0 = perceptive_1, 1 = perceptive_2,
2 = associative) occupies ids ``200*k .. 200*k + 199``, pyramidal cells
first, then their interneurons in the same order.

Initial weights come from one ``numpy.random.Generator(PCG64(seed))`` stream
consumed in this order: feedforward from perceptive_1, feedforward from
perceptive_2, feedback, inhibitory (layer by layer, interneuron by
interneuron, targets in increasing id).
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterator, List, Sequence

import numpy as np

from .plasticity import Site, Synapse, SynapseKind

LAYER_NAMES = ("perceptive_1", "perceptive_2", "associative")
LAYER_SIZE = 100
NO_TOPDOWN_MODES = ("disable_caap", "remove_feedback")

KIND_CODES = {SynapseKind.EXCITATORY: 0, SynapseKind.INHIBITORY: 1, SynapseKind.FIXED: 2}
SITE_CODES = {Site.BASAL: 0, Site.DISTAL: 1, Site.INTERNEURON: 2}
KINDS = {v: k for k, v in KIND_CODES.items()}
SITES = {v: k for k, v in SITE_CODES.items()}


@dataclass(frozen=True)
class NetworkParams:
    w_lo: float = 0.2
    w_hi: float = 0.6
    inh_lo: float = -0.4
    inh_hi: float = -0.1
    fixed_weight: float = 1.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.w_lo <= self.w_hi <= 1.0:
            raise ValueError(
                f"excitatory init range must satisfy 0 <= w_lo <= w_hi <= 1, "
                f"got [{self.w_lo}, {self.w_hi}]"
            )
        if not -1.0 <= self.inh_lo <= self.inh_hi <= 0.0:
            raise ValueError(
                f"inhibitory init range must satisfy -1 <= inh_lo <= inh_hi <= 0, "
                f"got [{self.inh_lo}, {self.inh_hi}]"
            )
        if not 0.0 <= self.fixed_weight <= 1.0:
            raise ValueError(f"fixed_weight must lie in [0, 1], got {self.fixed_weight}")


@dataclass(frozen=True)
class Layer:
    name: str
    pyramidal: np.ndarray
    interneurons: np.ndarray


@dataclass
class Topology:
    """Neuron census plus a columnar synapse table.

    ``pre``, ``post``, ``weight``, ``kind`` and ``site`` are parallel arrays,
    one entry per synapse.  ``kind``/``site`` hold the integer codes of
    :data:`KIND_CODES` / :data:`SITE_CODES`.
    """

    n_neurons: int
    is_pyramidal: np.ndarray
    layer_of: np.ndarray
    layers: Dict[str, Layer]
    pre: np.ndarray
    post: np.ndarray
    weight: np.ndarray
    kind: np.ndarray
    site: np.ndarray
    seed: int | None = None
    topdown_enabled: bool = True

    @property
    def n_synapses(self) -> int:
        return int(self.pre.size)

    def synapses(self) -> Iterator[Synapse]:
        for i in range(self.n_synapses):
            yield Synapse(
                pre_id=int(self.pre[i]),
                post_id=int(self.post[i]),
                weight=float(self.weight[i]),
                kind=KINDS[int(self.kind[i])],
                target_site=SITES[int(self.site[i])],
            )

    def copy(self) -> "Topology":
        return Topology(
            n_neurons=self.n_neurons,
            is_pyramidal=self.is_pyramidal.copy(),
            layer_of=self.layer_of.copy(),
            layers=dict(self.layers),
            pre=self.pre.copy(),
            post=self.post.copy(),
            weight=self.weight.copy(),
            kind=self.kind.copy(),
            site=self.site.copy(),
            seed=self.seed,
            topdown_enabled=self.topdown_enabled,
        )

    @classmethod
    def from_synapses(
        cls,
        is_pyramidal: Sequence[bool],
        synapses: Sequence[Synapse],
        topdown_enabled: bool = True,
        layer_names: Sequence[str] | None = None,
    ) -> "Topology":
        """Hand-built circuit, mainly for microcircuit tests.

        ``layer_names`` gives one layer label per neuron (default: all
        ``"associative"``).
        """
        is_pyr = np.asarray(is_pyramidal, dtype=bool)
        n = is_pyr.size
        names = list(layer_names) if layer_names is not None else ["associative"] * n
        uniq = list(dict.fromkeys(names))
        layer_of = np.array([uniq.index(x) for x in names], dtype=np.int64)
        layers = {}
        for k, name in enumerate(uniq):
            ids = np.flatnonzero(layer_of == k)
            layers[name] = Layer(name, ids[is_pyr[ids]], ids[~is_pyr[ids]])
        return cls(
            n_neurons=n,
            is_pyramidal=is_pyr,
            layer_of=layer_of,
            layers=layers,
            pre=np.array([s.pre_id for s in synapses], dtype=np.int64),
            post=np.array([s.post_id for s in synapses], dtype=np.int64),
            weight=np.array([s.weight for s in synapses], dtype=np.float64),
            kind=np.array([KIND_CODES[s.kind] for s in synapses], dtype=np.int8),
            site=np.array([SITE_CODES[s.target_site] for s in synapses], dtype=np.int8),
            topdown_enabled=topdown_enabled,
        )


def pyramidal_id(layer: int, j: int) -> int:
    return 2 * LAYER_SIZE * layer + j


def interneuron_id(layer: int, j: int) -> int:
    return 2 * LAYER_SIZE * layer + LAYER_SIZE + j


def build(
    seed: int,
    topdown_enabled: bool = True,
    params: NetworkParams | None = None,
    no_topdown_mode: str = "disable_caap",
) -> Topology:
    """Build the full network with seeded random initial weights.

    With ``topdown_enabled=False`` and ``no_topdown_mode="remove_feedback"``
    the feedback synapses are left out; the random stream is consumed
    identically either way so paired conditions share all other weights.
    """
    params = params or NetworkParams()
    if no_topdown_mode not in NO_TOPDOWN_MODES:
        raise ValueError(f"no_topdown_mode must be one of {NO_TOPDOWN_MODES}, got {no_topdown_mode!r}")
    rng = np.random.Generator(np.random.PCG64(seed))
    n = LAYER_SIZE
    pyr = np.arange(n)

    pres: List[np.ndarray] = []
    posts: List[np.ndarray] = []
    weights: List[np.ndarray] = []
    kinds: List[np.ndarray] = []
    sites: List[np.ndarray] = []

    def add(pre, post, w, kind, site):
        pres.append(np.asarray(pre, dtype=np.int64).ravel())
        posts.append(np.asarray(post, dtype=np.int64).ravel())
        weights.append(np.asarray(w, dtype=np.float64).ravel())
        kinds.append(np.full(pres[-1].size, KIND_CODES[kind], dtype=np.int8))
        sites.append(np.full(pres[-1].size, SITE_CODES[site], dtype=np.int8))

    assoc = pyramidal_id(2, pyr)
    for layer in (0, 1):
        w = rng.uniform(params.w_lo, params.w_hi, size=(n, n))
        pre, post = np.meshgrid(pyramidal_id(layer, pyr), assoc, indexing="ij")
        add(pre, post, w, SynapseKind.EXCITATORY, Site.BASAL)

    w = rng.uniform(params.w_lo, params.w_hi, size=(n, 2 * n))
    targets = np.concatenate([pyramidal_id(0, pyr), pyramidal_id(1, pyr)])
    if topdown_enabled or no_topdown_mode == "disable_caap":
        pre, post = np.meshgrid(assoc, targets, indexing="ij")
        add(pre, post, w, SynapseKind.EXCITATORY, Site.DISTAL)

    for layer in range(3):
        add(
            pyramidal_id(layer, pyr),
            interneuron_id(layer, pyr),
            np.full(n, params.fixed_weight),
            SynapseKind.FIXED,
            Site.INTERNEURON,
        )
    for layer in range(3):
        w = rng.uniform(params.inh_lo, params.inh_hi, size=(n, n - 1))
        pre = np.repeat(interneuron_id(layer, pyr), n - 1)
        post = np.array([pyramidal_id(layer, j) for i in range(n) for j in range(n) if j != i])
        add(pre, post, w, SynapseKind.INHIBITORY, Site.BASAL)

    is_pyr = np.zeros(3 * 2 * n, dtype=bool)
    layer_of = np.repeat(np.arange(3), 2 * n)
    layers = {}
    for k, name in enumerate(LAYER_NAMES):
        is_pyr[pyramidal_id(k, pyr)] = True
        layers[name] = Layer(name, pyramidal_id(k, pyr), interneuron_id(k, pyr))
    return Topology(
        n_neurons=6 * n,
        is_pyramidal=is_pyr,
        layer_of=layer_of,
        layers=layers,
        pre=np.concatenate(pres),
        post=np.concatenate(posts),
        weight=np.concatenate(weights),
        kind=np.concatenate(kinds),
        site=np.concatenate(sites),
        seed=seed,
        topdown_enabled=topdown_enabled,
    )


WEIGHT_DTYPE = np.dtype(
    [("pre_id", np.int64), ("post_id", np.int64), ("site", "U11"), ("kind", "U10"), ("weight", np.float64)]
)


def snapshot_weights(topology: Topology) -> np.ndarray:
    """Labelled copy of every synapse weight (structured array, one row per synapse)."""
    out = np.empty(topology.n_synapses, dtype=WEIGHT_DTYPE)
    out["pre_id"] = topology.pre
    out["post_id"] = topology.post
    out["site"] = [SITES[int(c)].value for c in topology.site]
    out["kind"] = [KINDS[int(c)].value for c in topology.kind]
    out["weight"] = topology.weight
    return out


def write_weights(path: Path, snapshot: np.ndarray, header: Sequence[str] = ()) -> None:
    """Flat text table ``pre_id post_id site kind weight``; ``#`` lines are header."""
    with open(path, "w") as fh:
        for line in header:
            fh.write(f"# {line}\n")
        fh.write("# pre_id post_id site kind weight\n")
        for row in snapshot:
            fh.write(f"{row['pre_id']} {row['post_id']} {row['site']} {row['kind']} {float(row['weight'])!r}\n")


def read_weights(path: Path) -> np.ndarray:
    rows = []
    with open(path) as fh:
        for line in fh:
            if line.startswith("#") or not line.strip():
                continue
            pre, post, site, kind, w = line.split()
            rows.append((int(pre), int(post), site, kind, float(w)))
    return np.array(rows, dtype=WEIGHT_DTYPE)
