"""
Continuing a family of CMC spheres
==================================

Start from a tiny sphere at large H, where the solution is close to a
Euclidean one, and continue down to the minimal sphere in a Berger sphere.
"""
from cmclab.metric_lie_group import derive_constants
from cmclab.spectral_analysis import gauss_degree
from cmclab.sphere_solver import continue_family, refine

group = derive_constants({"c": [2, 2, 1]})
family = continue_family(group, 20.0, 0.0, level=3, stops=[2.0, 1.0, 0.5])
for H, field, imm in family:
    deg, jmin = gauss_degree(field)
    print(
        f"H={H:6.2f}  Newton its {field.newton.iterations}, residual {field.newton.residual:.1e}, "
        f"area {imm.area():8.4f}, closure {imm.closure_residual:.1e}, degree {deg}"
    )

# refine the minimal sphere by one mesh level
fine = refine(group, family[-1][1], 1)
print("refined to level", fine.mesh.level, "PDE residual", f"{fine.newton.pde_residual:.1e}")
