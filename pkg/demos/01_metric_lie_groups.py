"""
Metric Lie groups
=================

Build a few three-dimensional metric Lie groups from their structure
constants, look at their curvature and check the group law.
"""
import numpy as np

from cmclab.metric_lie_group import classify, derive_constants

# a unimodular group is given by three structure constants, in any order;
# they are sorted into a canonical order on construction
for c in ([2, 2, 2], [1, 2, 2], [3, 2, 1], [1, 1, -1], [1, -1, 0], [1, 0, 0]):
    group = derive_constants({"c": c})
    kind, dim = classify(group)
    print(f"c={c} -> canonical {group.c}, {kind}, isometry dimension {dim}")
    print("   Ricci eigenvalues", np.round(group.ricci_eigenvalues, 4))

# a non-unimodular group is given by (a, b)
h3 = derive_constants({"a": 0.0, "b": 0.0})
print("hyperbolic space:", classify(h3), "Ricci", h3.ricci_eigenvalues)

# the Levi-Civita connection of the orthonormal frame: Gamma[i, j] = nabla_{E_i} E_j
group = derive_constants({"c": [3, 2, 1]})
Gamma = group.connection
E = np.eye(3)
torsion = max(np.abs(Gamma[i, j] - Gamma[j, i] - group.bracket(E[i], E[j])).max() for i in range(3) for j in range(3))
print("torsion defect", torsion)

# left translations, inverses and the exponential map
rng = np.random.default_rng(0)
p, q = group.exp(rng.normal(size=(2, 3)))
print("p p^-1 =", np.round(group.multiply(p, group.inverse(p)), 12))
print("log(exp(v)) - v =", np.abs(group.log(group.exp(np.array([0.3, -0.2, 0.1]))) - [0.3, -0.2, 0.1]).max())
