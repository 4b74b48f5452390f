"""
Symmetries and embeddedness
===========================

A CMC sphere is invariant under the isometries fixing its centre of
symmetry. The minimal sphere in SU(2) contains three geodesics, and the
spheres are embedded.
"""
import numpy as np

from cmclab.metric_lie_group import derive_constants
from cmclab.sphere_solver import continue_family
from cmclab.symmetry_geometry import (
    center_of_symmetry,
    embeddedness_check,
    isotropy_isometries,
    minimal_sphere_structure,
    spindle_torus,
    symmetry_residual,
)

group = derive_constants({"c": [3, 2, 1]})
family = continue_family(group, 30.0, 0.0, level=3, stops=[1.0])
for H, field, imm in family[-3:]:
    center, t = center_of_symmetry(group, family, H)
    res = symmetry_residual(imm, isotropy_isometries(group, center))
    print(f"H={H:5.2f} centre parameter {t:.4f}, symmetry residual {res:.1e} (5h^2 = {5 * imm.mesh.mean_edge ** 2:.1e})")

minimal = family[-1][2]
ms = minimal_sphere_structure(group, minimal)
print("order-four points located within", f"{max(ms.point_errors.values()):.1e}")
print("geodesics leave the sphere by at most", np.round(ms.containment, 5))
print("psi1 psi2 psi3 + identity on test points:", ms.composition_residual)
print("minimal sphere embedded:", embeddedness_check(minimal)[0])
V, F = spindle_torus()
print("spindle torus embedded:", embeddedness_check(vertices=V, triangles=F)[0])
