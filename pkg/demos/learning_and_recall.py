"""
Learning and recall for one network
===================================

One seed, both conditions.  During learning the ten character pairs are
shown in a fixed order; the output after the tenth pass becomes each
stimulus's template.  During recall the order is shuffled and every output
is correlated with every template.  Takes a few seconds per condition.
"""

import numpy as np

from spikebam.analysis import CorrelationReport
from spikebam.config import build_config
from spikebam.engine import firing_rate_hz, simulate
from spikebam.stimulus import builtin_patterns

config = build_config({"seeds": "1"})
print("config hash", config.hash())

# The glyphs of the first pair, as the perceptive layers see them.
a, b = builtin_patterns().pairs[0]
for ra, rb in zip(a.pixels, b.pixels):
    print("".join("#" if v else "." for v in ra), "  ", "".join("#" if v else "." for v in rb))

records = [simulate(config, 1, cond) for cond in ("no_topdown", "topdown")]
for r in records:
    n_ca = int((r.raster["event"] == 1).sum())
    print(f"{r.condition}: associative rate {firing_rate_hz(r):.1f} Hz, {n_ca} CaAPs")

# Output raster of the first associative neurons for stimulus 1 after learning.
k1 = records[0].learned[0]
for j in np.flatnonzero(k1.any(axis=1))[:8]:
    print(f"neuron {j:3d} ", "".join("|" if v else " " for v in k1[j]))

print(CorrelationReport.from_records(records).summary())
