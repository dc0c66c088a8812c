import math

import pytest
from hypothesis import given, strategies as st

from spikebam.kernels import KernelParams, eps, eta, rho
from spikebam.neuron import (
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

P = KernelParams(tau_s=5.0, eps_amp=1.0, tau_r=5.0, eta_amp=5.0, tau_ca=10.0, rho_amp=0.6, support=90)
TH = NeuronThresholds(theta=1.0, theta_ca=1.0, bp_delay=2, ca_window=5, abs_refractory=2)


def test_resting_potential_is_zero():
    st_ = PyramidalState()
    assert somatic_potential(st_, 10, P) == 0.0
    assert distal_potential(st_, 10, P) == 0.0


def test_single_basal_event():
    s = PyramidalState(basal_inputs=[(3, 0.5)])
    assert somatic_potential(s, 3 + 5, P) == pytest.approx(0.5 * P.eps_amp)


def test_own_spike_hyperpolarises():
    s = PyramidalState(somatic_spikes=[7])
    assert somatic_potential(s, 12, P) == pytest.approx(-5 * math.exp(-1))


def test_distal_potential_examples():
    assert distal_potential(PyramidalState(distal_inputs=[(0, 1.0)]), 5, P) == pytest.approx(1.0)
    s = PyramidalState(distal_inputs=[(0, 0.6), (0, 0.6)])
    assert distal_potential(s, 5, P) == pytest.approx(1.2)


def test_distal_inputs_do_not_reach_the_soma():
    s = PyramidalState(distal_inputs=[(0, 1.0)])
    assert somatic_potential(s, 5, P) == 0.0


def test_rho_only_with_topdown():
    on = PyramidalState(ca_spikes=[0], topdown_enabled=True)
    off = PyramidalState(ca_spikes=[0], topdown_enabled=False)
    assert somatic_potential(on, 10, P) == pytest.approx(rho(10, P))
    assert somatic_potential(off, 10, P) == 0.0


def test_subthreshold_gives_none():
    s = PyramidalState(basal_inputs=[(0, 0.5)])
    assert all(step_pyramidal(s, t, TH, P) is SpikeOutcome.NONE for t in range(1, 30))


def test_threshold_crossing_fires():
    s = PyramidalState(basal_inputs=[(0, 1.0)])
    outs = [step_pyramidal(s, t, TH, P) for t in range(1, 8)]
    assert outs[4] is SpikeOutcome.NA  # t = 5 = tau_s, potential exactly 1.0
    assert s.somatic_spikes == [5]


def test_distal_crossing_without_bap_gives_no_caap():
    s = PyramidalState(distal_inputs=[(0, 1.5)])
    assert all(step_pyramidal(s, t, TH, P) is SpikeOutcome.NONE for t in range(1, 20))
    assert s.ca_spikes == []


def test_caap_at_bap_arrival():
    # forced NaAP at t1=10; distal drive already above threshold at t1 + bp_delay
    s = PyramidalState(distal_inputs=[(8, 1.2)])
    out = {}
    for t in range(0, 20):
        out[t] = step_pyramidal(s, t, TH, P, forced=(t == 10))
    assert out[10] is SpikeOutcome.NA
    assert out[12] is SpikeOutcome.CA
    assert s.ca_spikes == [12]


def test_one_caap_per_backpropagated_spike():
    s = PyramidalState(distal_inputs=[(0, 3.0)])
    for t in range(0, 30):
        step_pyramidal(s, t, TH, P, forced=(t == 5))
    assert s.ca_spikes == [7]


def test_caap_window_closes():
    # distal drive rises only after the window [t1+2, t1+7) has passed
    s = PyramidalState(distal_inputs=[(14, 1.5)])
    for t in range(0, 40):
        step_pyramidal(s, t, TH, P, forced=(t == 5))
    assert s.ca_spikes == []


def test_no_caap_without_topdown():
    s = PyramidalState(distal_inputs=[(8, 1.2)], topdown_enabled=False)
    for t in range(0, 20):
        step_pyramidal(s, t, TH, P, forced=(t == 10))
    assert s.ca_spikes == []


def test_forced_spike_bypasses_refractoriness():
    s = PyramidalState()
    for t in range(3):
        assert step_pyramidal(s, t, TH, P, forced=True) is SpikeOutcome.NA
    assert s.somatic_spikes == [0, 1, 2]


def test_out_of_order_step_rejected():
    s = PyramidalState()
    step_pyramidal(s, 5, TH, P)
    with pytest.raises(RuntimeError):
        step_pyramidal(s, 5, TH, P)
    i = InterneuronState()
    step_interneuron(i, 3, TH, P)
    with pytest.raises(RuntimeError):
        step_interneuron(i, 2, TH, P)


def test_interneuron_examples():
    i = InterneuronState()
    assert all(step_interneuron(i, t, TH, P) is SpikeOutcome.NONE for t in range(10))
    i = InterneuronState(inputs=[(0, 1.0)])
    fired = [t for t in range(1, 20) if step_interneuron(i, t, TH, P) is SpikeOutcome.SPIKE]
    assert fired[0] == 5
    i = InterneuronState(inputs=[(0, 0.3)])
    assert all(step_interneuron(i, t, TH, P) is SpikeOutcome.NONE for t in range(1, 40))


def test_interneuron_threshold_defaults_to_theta():
    assert NeuronThresholds(theta=0.7).theta_inh == 0.7
    assert NeuronThresholds(theta=0.7, theta_inh=0.2).theta_inh == 0.2


@pytest.mark.parametrize(
    "kwargs", [dict(theta=0), dict(theta_ca=-1), dict(bp_delay=0), dict(ca_window=1.5), dict(abs_refractory=0)]
)
def test_threshold_validation(kwargs):
    with pytest.raises(ValueError):
        NeuronThresholds(**kwargs)


def test_prune_keeps_potentials():
    s = PyramidalState(somatic_spikes=[0, 50, 120], basal_inputs=[(1, 0.5), (100, 0.3)], distal_inputs=[(2, 0.1)])
    t = 130
    before = somatic_potential(s, t, P), distal_potential(s, t, P)
    prune(s, t, P)
    assert s.somatic_spikes == [50, 120]
    assert (somatic_potential(s, t, P), distal_potential(s, t, P)) == before
    i = InterneuronState(spikes=[1, 100], inputs=[(2, 1.0), (99, 1.0)])
    v = interneuron_potential(i, t, P)
    prune(i, t, P)
    assert i.spikes == [100] and interneuron_potential(i, t, P) == v


events = st.lists(st.tuples(st.integers(0, 60), st.floats(-1, 1)), max_size=30)


@given(basal=events, spikes=st.lists(st.integers(0, 60), unique=True, max_size=8), t=st.integers(0, 80))
def test_somatic_potential_matches_direct_sum(basal, spikes, t):
    basal = sorted(basal, key=lambda e: e[0])
    s = PyramidalState(somatic_spikes=sorted(spikes), basal_inputs=basal)
    direct = sum(eta(t - f, P) for f in spikes) + sum(w * eps(t - a, P) for a, w in basal)
    assert somatic_potential(s, t, P) == pytest.approx(direct, abs=1e-9)


@given(drive=st.lists(st.booleans(), min_size=1, max_size=120), w=st.floats(0, 3))
def test_refractoriness_and_caap_uniqueness(drive, w):
    s = PyramidalState(basal_inputs=[(t, w) for t, d in enumerate(drive) if d],
                       distal_inputs=[(t, w) for t, d in enumerate(drive) if d])
    for t in range(len(drive) + 10):
        step_pyramidal(s, t, TH, P)
    gaps = [b - a for a, b in zip(s.somatic_spikes, s.somatic_spikes[1:])]
    assert all(g >= TH.abs_refractory for g in gaps)
    assert len(s.ca_spikes) <= len(s.somatic_spikes)
