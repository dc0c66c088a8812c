"""
A CaAP microcircuit, checked against brute force
================================================

Two forced drivers excite a pyramidal cell whose output, together with one
driver, feeds back onto the distal tuft of the first driver.  When that
feedback coincides with a backpropagated spike, the driver emits a CaAP.
The compiled engine and the brute-force reference must agree exactly.
"""

import numpy as np

from spikebam.engine import Simulator
from spikebam.oracle import circuit_params, compare, microcircuits

kernel, window, thresholds = circuit_params()
triad = microcircuits(1000)[2]

# Step the engine by hand for the first 200 ms and collect events.
sim = Simulator(triad.topology.copy(), kernel, window, thresholds, record_potentials=True)
spikes, caaps = [], []
for t in range(200):
    out = sim.step(triad.forced.get(t, []))
    spikes += [(t, int(i)) for i in out["fired"]]
    caaps += [(t, int(i)) for i in out["ca"]]
print("first spikes:", spikes[:10])
print("first CaAPs: ", caaps[:5])

# Neuron 0's somatic potential around its first CaAP: the rho response
# adds a slow depolarising hump.
if caaps:
    t_ca = caaps[0][0]
    u = np.array(sim.potential_trace)[:, 0]
    print("u0 around first CaAP:", np.round(u[t_ca - 2: t_ca + 12], 3))

# Engine vs reference over 1000 ms on all three circuits.
for circuit in microcircuits(1000):
    res = compare(circuit, kernel, window, thresholds, 1000)
    print(f"{circuit.name:>6}: {res.describe()}  ok={res.ok}")
