import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spikebam import network as net
from spikebam.network import KIND_CODES, SITE_CODES, NetworkParams, build
from spikebam.plasticity import Site, SynapseKind

EXC, INH, FIX = (KIND_CODES[k] for k in (SynapseKind.EXCITATORY, SynapseKind.INHIBITORY, SynapseKind.FIXED))
BASAL, DISTAL, INTER = (SITE_CODES[s] for s in (Site.BASAL, Site.DISTAL, Site.INTERNEURON))


@pytest.fixture(scope="module")
def topo():
    return build(3)


def layer_index(ids):
    return ids // (2 * net.LAYER_SIZE)


def test_census(topo):
    assert topo.n_neurons == 600
    assert topo.n_synapses == 70_000
    for name in net.LAYER_NAMES:
        assert topo.layers[name].pyramidal.size == 100
        assert topo.layers[name].interneurons.size == 100
    ff = (topo.site == BASAL) & (topo.kind == EXC)
    assert ff.sum() == 20_000
    assert (topo.site == DISTAL).sum() == 20_000
    assert (topo.kind == FIX).sum() == 300
    assert (topo.kind == INH).sum() == 29_700


def test_feedforward_targets_associative_basal(topo):
    ff = (topo.kind == EXC) & (topo.site == BASAL)
    assert set(layer_index(topo.pre[ff])) == {0, 1}
    assert set(layer_index(topo.post[ff])) == {2}
    assert topo.is_pyramidal[topo.pre[ff]].all() and topo.is_pyramidal[topo.post[ff]].all()
    pairs = set(zip(topo.pre[ff].tolist(), topo.post[ff].tolist()))
    assert len(pairs) == 20_000


def test_feedback_targets_perceptive_distal_only(topo):
    fb = topo.site == DISTAL
    assert set(layer_index(topo.pre[fb])) == {2}
    assert set(layer_index(topo.post[fb])) == {0, 1}
    assert topo.is_pyramidal[topo.post[fb]].all()
    assert (topo.kind[fb] == EXC).all()


def test_lateral_inhibition_and_relay(topo):
    inh = topo.kind == INH
    assert (~topo.is_pyramidal[topo.pre[inh]]).all()
    assert (layer_index(topo.pre[inh]) == layer_index(topo.post[inh])).all()
    # an interneuron never inhibits its own pyramidal cell
    assert ((topo.pre[inh] - net.LAYER_SIZE) != topo.post[inh]).all()
    fix = topo.kind == FIX
    assert (topo.post[fix] == topo.pre[fix] + net.LAYER_SIZE).all()
    assert (topo.weight[fix] == 1.0).all()


def test_no_other_connections(topo):
    ff = (topo.kind == EXC) & (topo.site == BASAL)
    fb = topo.site == DISTAL
    assert not (layer_index(topo.pre[ff]) == layer_index(topo.post[ff])).any()
    assert not (layer_index(topo.pre[fb]) == layer_index(topo.post[fb])).any()
    covered = ff | fb | (topo.kind == FIX) | (topo.kind == INH)
    assert covered.all()


def test_initial_weight_ranges(topo):
    exc = topo.kind == EXC
    assert topo.weight[exc].min() >= 0.2 and topo.weight[exc].max() <= 0.6
    inh = topo.kind == INH
    assert topo.weight[inh].min() >= -0.4 and topo.weight[inh].max() <= -0.1


@settings(max_examples=10, deadline=None)
@given(seed=st.integers(0, 2**31 - 1))
def test_build_is_pure(seed):
    a, b = build(seed), build(seed)
    for f in ("pre", "post", "weight", "kind", "site"):
        assert np.array_equal(getattr(a, f), getattr(b, f))
    assert a.n_synapses == 70_000


def test_conditions_share_initial_weights():
    a, b = build(5, True), build(5, False)
    assert np.array_equal(a.weight, b.weight)
    assert not b.topdown_enabled


def test_remove_feedback_drops_only_feedback():
    full = build(5, False)
    cut = build(5, False, no_topdown_mode="remove_feedback")
    assert cut.n_synapses == 50_000
    keep = full.site != DISTAL
    assert np.array_equal(full.weight[keep], cut.weight)
    # the flag does nothing when top-down is on
    assert build(5, True, no_topdown_mode="remove_feedback").n_synapses == 70_000


def test_different_seeds_differ():
    assert not np.array_equal(build(1).weight, build(2).weight)


@pytest.mark.parametrize(
    "kw",
    [dict(w_lo=0.7, w_hi=0.6), dict(w_lo=-0.1), dict(w_hi=1.1), dict(inh_lo=-1.5), dict(inh_hi=0.1), dict(fixed_weight=2.0)],
)
def test_invalid_ranges_rejected(kw):
    with pytest.raises(ValueError):
        NetworkParams(**kw)


def test_bad_no_topdown_mode():
    with pytest.raises(ValueError):
        build(1, False, no_topdown_mode="nope")


def test_weight_snapshot_roundtrip(tmp_path, topo):
    snap = net.snapshot_weights(topo)
    assert snap.size == 70_000
    assert set(snap["kind"][snap["weight"] == 1.0]) >= {"fixed"}
    path = tmp_path / "w.txt"
    net.write_weights(path, snap, ["seed=3"])
    assert path.read_text().startswith("# seed=3\n# pre_id post_id site kind weight\n")
    back = net.read_weights(path)
    assert np.array_equal(back, snap)
