"""Constant mean curvature spheres in three-dimensional metric Lie groups.

Submodules:

- ``metric_lie_group``: groups, frames, connection and curvature
- ``h_potential``: the H-potential and its zero classification
- ``mesh``: icosphere meshes, stereographic charts and MLS stencils
- ``gauss_pde``: the discrete Gauss-map equation
- ``frame_integrator``: reconstruction of the immersion from a Gauss map
- ``sphere_solver``: Newton iteration and continuation in H
- ``spectral_analysis``: Jacobi operator, degree and Q_H certificates
- ``symmetry_geometry``: rotations, centres, symmetry residuals, embeddedness
- ``cli``: configuration, pipeline and artifact emission

Numerical modules are not imported here so that the CLI can configure
thread counts before numpy loads.
"""

__version__ = "0.1.0"
