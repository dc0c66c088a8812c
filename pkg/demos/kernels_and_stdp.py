"""
Response kernels and the STDP rule
==================================

The three kernels that make up a neuron's potential, sampled on the 1 ms
grid, followed by a few hand-checkable STDP updates.
"""

from spikebam.kernels import KernelParams, StdpWindowParams, eps, eta, kernel_table, rho
from spikebam.plasticity import Site, Synapse, SynapseKind, on_post_spike, on_pre_spike

# Component defaults: unit PSP peak at 5 ms, strong hyperpolarisation,
# a slower and weaker CaAP response.
p = KernelParams()
print(p)

# The PSP peaks at tau_s and is 2/e of its peak one time constant later.
print("eps(tau_s) =", eps(p.tau_s, p), " eps(2 tau_s) =", round(eps(2 * p.tau_s, p), 4))

# Every kernel is causal and truncated at ``support``.
for name, k in (("eps", eps), ("eta", eta), ("rho", rho)):
    tab = kernel_table(k, p)
    print(f"{name}: k(0)={tab[0]}  k(support)={tab[-1]:.2e}  min={tab.min():.3f}  max={tab.max():.3f}")

# The ASCII profile of the first 40 ms of each kernel.
for name, k, scale in (("eps", eps, 1.0), ("eta", eta, 5.0), ("rho", rho, 0.6)):
    row = "".join(" .:-=+*#%@"[min(9, int(abs(k(s, p)) / scale * 9.99))] for s in range(40))
    print(f"{name} |{row}|")

# STDP: a post spike 10 ms after the pre spike strengthens a 0.5 synapse to
# 0.525; a pre spike 10 ms after the post spike weakens it to 0.47.
w = StdpWindowParams()
s = Synapse(0, 1, 0.5, SynapseKind.EXCITATORY, Site.BASAL, last_pre=0)
print("potentiation:", on_post_spike(s, 10, w).weight)
s = Synapse(0, 1, 0.5, SynapseKind.EXCITATORY, Site.BASAL, last_post=0)
print("depression:  ", on_pre_spike(s, 10, w).weight)

# The multiplicative form makes 1 and 0 fixed points.
s = Synapse(0, 1, 1.0, SynapseKind.EXCITATORY, Site.BASAL, last_pre=0)
print("saturated stays at", on_post_spike(s, 3, w).weight)

# Inhibitory synapses: the default convention acts on |w|, so pairing
# deepens inhibition; the signed convention moves w toward 0 instead.
s = Synapse(0, 1, -0.5, SynapseKind.INHIBITORY, Site.BASAL, last_pre=0)
print("inhibitory magnitude:", on_post_spike(s, 10, w, "magnitude").weight)
print("inhibitory signed:   ", on_post_spike(s, 10, w, "signed").weight)
