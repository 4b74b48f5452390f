"""
Stability and uniqueness certificates
=====================================

Each sphere of the family has Jacobi index one and nullity three, the
kernel being spanned by right-invariant Killing fields. The Q_H
differential vanishes exactly on spheres congruent to the reference.
"""
import numpy as np

from cmclab.frame_integrator import reconstruct
from cmclab.metric_lie_group import derive_constants
from cmclab.spectral_analysis import jacobi_report, mobius_recompose, perturbed_field, qh_certificate
from cmclab.sphere_solver import solve_sphere

group = derive_constants({"c": [2, 2, 1]})
field = solve_sphere(group, 1.0, level=4)
rep = jacobi_report(group, reconstruct(group, field))
print("lowest eigenvalues of -L", np.round(rep.eigenvalues, 4))
print(f"index {rep.index}, nullity {rep.nullity} at tolerance {rep.tol:.2e}")
print("Killing fields in the kernel", np.round(rep.kernel_projection, 5))

print("Q_H of the reference", qh_certificate(group, 1.0, field, field).sup_norm)
print("Q_H after a Moebius reparametrization", qh_certificate(group, 1.0, field, mobius_recompose(field)).sup_norm)
print("Q_H of a 1% perturbation", qh_certificate(group, 1.0, field, perturbed_field(field, 0.01)).sup_norm)
