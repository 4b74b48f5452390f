"""
The discrete Gauss-map equation
===============================

The identity map of the sphere is the Gauss map of geodesic spheres in
round S^3. Its discrete residual vanishes; a Moebius transformation of it
is also a solution, and its residual shrinks at second order.
"""
import numpy as np

from cmclab.gauss_pde import GaussField, integrate_invariant_ode, pde_residual
from cmclab.mesh import build_mesh, stereographic
from cmclab.metric_lie_group import derive_constants

group = derive_constants({"c": [2, 2, 2]})
for level in (3, 4, 5):
    mesh = build_mesh(level)
    ident = GaussField.identity(mesh, 1.0)
    z = stereographic(mesh.vertices)[0]
    with np.errstate(all="ignore"):
        g = np.where(np.isfinite(z), (2 * z + 0.5 + 0.25j) / (-0.3j * z + 1), 2j / 0.3)
    moved = GaussField.from_g(mesh, g, 1.0)
    print(
        f"level {level}: {mesh.n_vertices} vertices, mean edge {mesh.mean_edge:.4f}, "
        f"identity residual {np.abs(pde_residual(group, 1.0, ident)).max():.1e}, "
        f"Moebius residual {np.abs(pde_residual(group, 1.0, moved)).max():.2e}"
    )

# along a curve y -> g(x0, y) the equation becomes an ODE in the Gauss sphere
curve = integrate_invariant_ode(derive_constants({"c": [2, 2, 1]}), 0.5, 0.2 + 0.1j, 1.0, (0.0, 3.0))
print("invariant curve end point", curve.g[-1], "after", len(curve.t), "steps")
