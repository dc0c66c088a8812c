import pytest
from hypothesis import given, strategies as st

from spikebam.kernels import StdpWindowParams
from spikebam.plasticity import Site, Synapse, SynapseKind, on_post_spike, on_pre_spike

W = StdpWindowParams(a_plus=0.1, tau_plus=20.0, a_minus=0.12, tau_minus=20.0)
E, I, F = SynapseKind.EXCITATORY, SynapseKind.INHIBITORY, SynapseKind.FIXED


def syn(w, kind=E, **kw):
    return Synapse(0, 1, w, kind, Site.BASAL, **kw)


def test_depression_examples():
    assert on_pre_spike(syn(0.0, last_post=100), 105, W).weight == 0.0
    s = on_pre_spike(syn(0.5, last_post=100), 110, W)
    assert s.weight == pytest.approx(0.5 - 0.5 * 0.12 * 0.5)
    assert s.weight == pytest.approx(0.47)
    assert s.last_pre == 110


def test_potentiation_examples():
    assert on_post_spike(syn(1.0, last_pre=100), 105, W).weight == 1.0
    s = on_post_spike(syn(0.5, last_pre=100), 110, W)
    assert s.weight == pytest.approx(0.525)
    assert s.last_post == 110
    assert on_post_spike(syn(0.5, last_pre=100), 125, W).weight == 0.5


def test_fixed_synapses_never_change():
    s = syn(1.0, F, last_pre=100, last_post=99)
    assert on_post_spike(s, 105, W).weight == 1.0
    assert on_pre_spike(s, 101, W).weight == 1.0


def test_no_history_is_a_noop():
    assert on_pre_spike(syn(0.4), 10, W).weight == 0.4
    assert on_post_spike(syn(0.4), 10, W).weight == 0.4


def test_simultaneous_spikes_do_not_update():
    assert on_pre_spike(syn(0.4, last_post=10), 10, W).weight == 0.4
    assert on_post_spike(syn(0.4, last_pre=10), 10, W).weight == 0.4


def test_nearest_spike_pairing():
    s = syn(0.5)
    s = on_pre_spike(s, 0, W)
    s = on_pre_spike(s, 8, W)
    s = on_post_spike(s, 10, W)
    # the update must use the pre spike at 8 (dt=2), not the one at 0
    assert s.weight == 0.5 + 0.5 * (0.1 * (1 - 2 / 20))


def test_inhibitory_magnitude_mode_deepens_inhibition():
    s = on_post_spike(syn(-0.5, I, last_pre=0), 10, W, "magnitude")
    assert s.weight == pytest.approx(-0.525)
    s = on_pre_spike(syn(-0.5, I, last_post=0), 10, W, "magnitude")
    assert s.weight == pytest.approx(-0.47)


def test_inhibitory_signed_mode_moves_toward_zero_on_potentiation():
    s = on_post_spike(syn(-0.5, I, last_pre=0), 10, W, "signed")
    assert s.weight == pytest.approx(-0.475)
    s = on_pre_spike(syn(-0.5, I, last_post=0), 10, W, "signed")
    assert s.weight == pytest.approx(-0.53)


def test_out_of_order_spikes_rejected():
    with pytest.raises(ValueError):
        on_pre_spike(syn(0.5, last_pre=10), 5, W)
    with pytest.raises(ValueError):
        on_post_spike(syn(0.5, last_post=10), 5, W)


@pytest.mark.parametrize("w,kind", [(1.2, E), (-0.1, E), (0.1, I), (-1.5, I)])
def test_construction_bounds(w, kind):
    with pytest.raises(ValueError):
        syn(w, kind)


weights = st.floats(0, 1)
gaps = st.integers(1, 30)


@given(w=weights, gs=st.lists(gaps, min_size=1, max_size=40))
def test_potentiation_only_is_monotone(w, gs):
    s = syn(w)
    t = 0
    for g in gs:
        s = on_pre_spike(s, t, W)
        t += g
        before = s.weight
        s = on_post_spike(s, t, W)
        assert before <= s.weight <= 1.0
        t += 100  # keep the next pre spike out of the depression window


@given(w=weights, gs=st.lists(gaps, min_size=1, max_size=40))
def test_depression_only_is_monotone(w, gs):
    s = syn(w)
    t = 0
    for g in gs:
        s = on_post_spike(s, t, W)
        t += g
        before = s.weight
        s = on_pre_spike(s, t, W)
        assert 0.0 <= s.weight <= before
        t += 100


@given(
    w=weights,
    kind=st.sampled_from([E, I]),
    mode=st.sampled_from(["magnitude", "signed"]),
    events=st.lists(st.tuples(st.booleans(), st.integers(0, 25)), max_size=200),
)
def test_bounds_hold_for_any_sequence(w, kind, mode, events):
    s = syn(-w if kind is I else w, kind)
    t = 0
    lo, hi = (-1.0, 0.0) if kind is I else (0.0, 1.0)
    for is_pre, gap in events:
        t += gap
        s = on_pre_spike(s, t, W, mode) if is_pre else on_post_spike(s, t, W, mode)
        assert lo <= s.weight <= hi
