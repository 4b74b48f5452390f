"""
The H-potential
===============

The Gauss-map equation of a CMC surface is well posed only where the
H-potential has no zero. Evaluate it, find zeros and compare the closed
classification with a direct search.
"""
import numpy as np

from cmclab.h_potential import HPotential, classify_nonvanishing, has_zero, potential
from cmclab.metric_lie_group import derive_constants

round_s3 = derive_constants({"c": [2, 2, 2]})
hp = HPotential(round_s3, 1.0)
q = np.array([0.0, 0.5 + 0.5j, 2.0, np.inf])
print("R on the round sphere, H=1:", np.round(potential(hp, q), 6))

# in Sol_3 the potential vanishes somewhere when H = 0
sol = derive_constants({"c": [1, -1, 0]})
for H in (0.0, 0.5):
    found, w = has_zero(HPotential(sol, H))
    print(f"Sol_3 H={H}: zero found={found} at {w}, classification says nonvanishing={classify_nonvanishing(sol, H)}")

# non-unimodular groups: the admissible range of H depends on (a, b)
for a, b in ((0.0, 0.0), (0.5, 0.8), (2.0, 0.3)):
    group = derive_constants({"a": a, "b": b})
    ok = [H for H in np.linspace(-3, 3, 13) if classify_nonvanishing(group, H)]
    print(f"(a, b)=({a}, {b}): nonvanishing for H in {np.round(ok, 2).tolist()}")
