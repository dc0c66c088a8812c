"""Compiled inner loop of the simulator (one 1 ms step).

Operates on a flat synapse table with CSR indices by presynaptic and by
postsynaptic neuron.  The arithmetic mirrors the object-level functions in
:mod:`spikebam.neuron` and :mod:`spikebam.plasticity` operation for
operation; no fastmath.
"""

from __future__ import annotations

import numba as nb
import numpy as np


@nb.njit(cache=True)
def _clip01(x):
    return min(max(x, 0.0), 1.0)


@nb.njit(cache=True)
def _schedule(buf, tab, t, j, amount):
    L = buf.shape[0]
    for s in range(1, L):
        buf[(t + s) % L, j] += tab[s - 1] * amount


@nb.njit(cache=True)
def step(
    t,
    forced,
    prev,
    # synapse table
    pre,
    post,
    w,
    distal,
    plastic,
    inh,
    out_ptr,
    out_idx,
    in_ptr,
    in_idx,
    # kernels and ring buffers
    eps_tab,
    eta_tab,
    rho_tab,
    eta_buf,
    soma_buf,
    distal_buf,
    rho_buf,
    # neuron state
    is_pyr,
    last_spike,
    bap_pending,
    # parameters
    theta,
    theta_inh,
    theta_ca,
    bp_delay,
    ca_window,
    abs_refractory,
    topdown,
    a_plus,
    tau_plus,
    a_minus,
    tau_minus,
    signed_inh,
    # outputs and scratch
    u_out,
    d_out,
    fired_out,
    ca_out,
    drive_soma,
    drive_distal,
    touched,
):
    n = is_pyr.shape[0]
    L = eta_buf.shape[0]
    H = bap_pending.shape[0]
    slot = t % L

    # 1. delivery (arrival time t), summed per target in presynaptic order
    n_touched = 0
    for a in range(prev.shape[0]):
        i = prev[a]
        for q in range(out_ptr[i], out_ptr[i + 1]):
            k = out_idx[q]
            j = post[k]
            if not touched[j]:
                touched[j] = True
                fired_out[n_touched] = j
                n_touched += 1
            if distal[k]:
                drive_distal[j] += w[k]
            else:
                drive_soma[j] += w[k]
    for a in range(n_touched):
        j = fired_out[a]
        if drive_soma[j] != 0.0:
            _schedule(soma_buf, eps_tab, t, j, drive_soma[j])
        if drive_distal[j] != 0.0:
            _schedule(distal_buf, eps_tab, t, j, drive_distal[j])
        drive_soma[j] = 0.0
        drive_distal[j] = 0.0
        touched[j] = False

    # 2./3. potentials and spike decisions
    is_forced = touched  # reuse scratch (all False here)
    for a in range(forced.shape[0]):
        is_forced[forced[a]] = True
    n_fired = 0
    n_ca = 0
    for j in range(n):
        u = (eta_buf[slot, j] + soma_buf[slot, j]) + rho_buf[slot, j]
        d = distal_buf[slot, j]
        u_out[j] = u
        d_out[j] = d
        eta_buf[slot, j] = 0.0
        soma_buf[slot, j] = 0.0
        distal_buf[slot, j] = 0.0
        rho_buf[slot, j] = 0.0
        th = theta if is_pyr[j] else theta_inh
        fire = is_forced[j] or (u >= th and t - last_spike[j] >= abs_refractory)
        if is_pyr[j] and topdown and d >= theta_ca:
            # oldest unconsumed backpropagated NaAP within the window
            for back in range(ca_window - 1, -1, -1):
                r = (t - bp_delay - back) % H
                if bap_pending[r, j]:
                    bap_pending[r, j] = False
                    ca_out[n_ca] = j
                    n_ca += 1
                    break
        bap_pending[t % H, j] = fire and is_pyr[j]
        if fire:
            fired_out[n_fired] = j
            n_fired += 1
    for a in range(forced.shape[0]):
        is_forced[forced[a]] = False

    # 4. STDP: depression on every outgoing synapse of each emitter ...
    for a in range(n_fired):
        i = fired_out[a]
        for q in range(out_ptr[i], out_ptr[i + 1]):
            k = out_idx[q]
            if not plastic[k]:
                continue
            dt = last_spike[post[k]] - t
            if dt < 0 and dt >= -tau_minus:
                gain = -a_minus * (1.0 + dt / tau_minus)
                if inh[k] and signed_inh:
                    m = -w[k]
                    w[k] = -_clip01(m - (1.0 - m) * gain)
                else:
                    m = abs(w[k])
                    m = _clip01(m + m * gain)
                    w[k] = -m if inh[k] else m
    for a in range(n_fired):
        last_spike[fired_out[a]] = t
    # ... then potentiation on every incoming synapse
    for a in range(n_fired):
        j = fired_out[a]
        for q in range(in_ptr[j], in_ptr[j + 1]):
            k = in_idx[q]
            if not plastic[k]:
                continue
            dt = t - last_spike[pre[k]]
            if dt > 0 and dt <= tau_plus:
                gain = a_plus * (1.0 - dt / tau_plus)
                if inh[k] and signed_inh:
                    m = -w[k]
                    w[k] = -_clip01(m - m * gain)
                else:
                    m = abs(w[k])
                    m = _clip01(m + (1.0 - m) * gain)
                    w[k] = -m if inh[k] else m

    # 5. own-kernel responses
    for a in range(n_fired):
        _schedule(eta_buf, eta_tab, t, fired_out[a], 1.0)
    for a in range(n_ca):
        _schedule(rho_buf, rho_tab, t, ca_out[a], 1.0)
    return n_fired, n_ca


def csr(keys: np.ndarray, n: int):
    """Stable CSR index of synapses grouped by ``keys`` (neuron ids)."""
    order = np.argsort(keys, kind="stable")
    ptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(keys, minlength=n), out=ptr[1:])
    return ptr, order.astype(np.int64)
