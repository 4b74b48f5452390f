import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cmclab.errors import PotentialZeroOnRange
from cmclab.gauss_pde import GaussField, integrate_invariant_ode, pde_residual, scaled_residual
from cmclab.h_potential import HPotential
from cmclab.mesh import W_CHART, build_mesh, inverse_stereographic, stereographic
from cmclab.metric_lie_group import NonUnimodularGroup, UnimodularGroup

from oracles import potential_unimodular

ROUND = UnimodularGroup(2, 2, 2)
MOBIUS = (2.0, 0.5 + 0.25j, -0.3j, 1.0)


def rotation(axis, angle):
    K = np.array([[0, -axis[2], axis[1]], [axis[2], 0, -axis[0]], [-axis[1], axis[0], 0]], dtype=float)
    return np.eye(3) + np.sin(angle) * K + (1 - np.cos(angle)) * K @ K


def mobius_values(mesh, coeffs=MOBIUS, rot=None):
    """Riemann-sphere values of ``M(z)`` per vertex, after rotating the domain by ``rot``."""
    a, b, c, d = coeffs
    z = mesh.z if rot is None else stereographic(mesh.vertices @ rot.T)[0]
    with np.errstate(all="ignore"):
        return np.where(np.isfinite(z), (a * z + b) / (c * z + d), a / c)


# ---------------------------------------------------------------------------
# mesh
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("level", [0, 1, 2, 3, 4])
def test_icosphere_counts(level):
    mesh = build_mesh(level)
    assert mesh.n_vertices == 10 * 4**level + 2
    assert len(mesh.triangles) == 20 * 4**level
    assert mesh.euler_characteristic() == 2
    assert np.allclose(np.linalg.norm(mesh.vertices, axis=1), 1)


def test_icosphere_is_outward_oriented():
    mesh = build_mesh(2)
    V, F = mesh.vertices, mesh.triangles
    n = np.cross(V[F[:, 1]] - V[F[:, 0]], V[F[:, 2]] - V[F[:, 0]])
    assert np.all(np.einsum("ij,ij->i", n, V[F].mean(axis=1)) > 0)


def test_charts_agree_on_overlap_band():
    mesh = build_mesh(3)
    band = mesh.in_band()
    assert band.any()
    assert np.allclose(mesh.z[band] * mesh.w[band], 1, atol=1e-14)
    assert np.all(np.abs(mesh.coord) <= 1 + 1e-12)
    assert np.allclose(inverse_stereographic(mesh.z), mesh.vertices, atol=1e-12)


@pytest.mark.parametrize("degree", [2, 3])
def test_stencils_reproduce_polynomials(degree):
    mesh = build_mesh(3)
    S = mesh.stencils(degree)
    x = mesh.coord[:, None] + S.offsets
    cases = [
        (x, 1.0, 0.0, 0.0),
        (x**2, 2 * mesh.coord, 0.0, 0.0),
        (np.conj(x), 0.0, 1.0, 0.0),
        (x * np.conj(x), np.conj(mesh.coord), mesh.coord, 1.0),
    ]
    for F, dz, dzb, dzzb in cases:
        assert np.allclose(S.apply(S.dz, F), dz, atol=1e-10)
        assert np.allclose(S.apply(S.dzb, F), dzb, atol=1e-10)
        assert np.allclose(S.apply(S.dzzb, F), dzzb, atol=1e-9)


# ---------------------------------------------------------------------------
# fields
# ---------------------------------------------------------------------------


def test_field_round_trip_through_riemann_sphere():
    mesh = build_mesh(2)
    g = mobius_values(mesh)
    field = GaussField.from_g(mesh, g)
    assert np.all(np.abs(field.values) <= 1)
    assert np.allclose(field.g(), g)
    assert np.allclose(field.unit_vectors(), inverse_stereographic(g), atol=1e-12)


def test_identity_field_uses_mesh_charts():
    mesh = build_mesh(2)
    field = GaussField.identity(mesh)
    g = field.g()
    finite = np.isfinite(mesh.z)
    assert np.allclose(g[finite], mesh.z[finite])
    assert np.array_equal(field.tchart == 1, mesh.chart == W_CHART)
    assert np.allclose(field.unit_vectors(), mesh.vertices, atol=1e-12)


def test_reassign_charts():
    mesh = build_mesh(1)
    field = GaussField(mesh, np.full(mesh.n_vertices, 2.0 + 0j), np.zeros(mesh.n_vertices))
    assert field.reassign_charts() == mesh.n_vertices
    assert np.allclose(field.g(), 2.0)
    assert np.all(field.tchart == 1)


def prolongation_error(level):
    coarse, fine = build_mesh(level), build_mesh(level + 1)
    field = GaussField.from_g(coarse, mobius_values(coarse))
    fine_field = field.prolong(fine)
    assert np.allclose(fine_field.g()[: coarse.n_vertices], field.g())
    return np.abs(fine_field.unit_vectors() - inverse_stereographic(mobius_values(fine))).max()


def test_prolong_keeps_coarse_values_and_converges():
    e3, e4 = prolongation_error(3), prolongation_error(4)
    assert e3 < 1e-2
    assert e3 / e4 > 4


# ---------------------------------------------------------------------------
# residual
# ---------------------------------------------------------------------------


def test_residual_matches_independent_assembly():
    mesh = build_mesh(3)
    group = UnimodularGroup(3, 2, 1)
    H = 0.7
    field = GaussField.from_g(mesh, 0.8 * mobius_values(mesh))
    E = pde_residual(group, H, field)
    y, yz, yzb, yzzb = field.derivatives()
    q = field.values
    keep = field.tchart == 0
    h = 1e-5

    def R(x):
        return potential_unimodular(group.c, H, x)

    Rx = (R(q + h) - R(q - h)) / (2 * h)
    Ry = (R(q + 1j * h) - R(q - 1j * h)) / (2 * h)
    Rq, Rqb = 0.5 * (Rx - 1j * Ry), 0.5 * (Rx + 1j * Ry)
    K1 = Rq / R(q)
    K2 = Rqb / R(q) - np.conj(Rq) / np.conj(R(q))
    expected = yzzb - K1 * yz * yzb - K2 * np.abs(yz) ** 2
    assert np.allclose(E[keep], expected[keep], atol=1e-7)


@pytest.mark.parametrize("H", [0.0, 1.0, 4.0])
def test_identity_solves_round_equation(H):
    field = GaussField.identity(build_mesh(3))
    assert np.max(np.abs(pde_residual(ROUND, H, field))) < 1e-12


def test_residual_converges_at_second_order():
    # M(z) solves the round equation exactly; the discrete residual is truncation error
    r = []
    for level in (4, 5):
        field = GaussField.from_g(build_mesh(level), mobius_values(build_mesh(level)), 0.0)
        r.append(scaled_residual(field, pde_residual(ROUND, 0.0, field)).max())
    assert 3.2 <= r[0] / r[1] <= 4.8


def test_residual_detects_non_solutions():
    mesh = build_mesh(3)
    z = np.where(np.isfinite(mesh.z), mesh.z, 1e300)
    with np.errstate(all="ignore"):
        g = np.where(np.isfinite(mesh.z), z + 0.3 * np.conj(z) ** 2 / (1 + np.abs(z) ** 2), np.inf)
    field = GaussField.from_g(mesh, g)
    E = pde_residual(UnimodularGroup(2, 2, 1), 1.0, field)
    assert scaled_residual(field, E).max() > 1e-2


@pytest.mark.parametrize(
    "rot",
    [rotation((1, 0, 0), np.pi), rotation((0.6, 0.8, 0), 0.9), rotation((0, 0, 1), 0.4)],
    ids=["swap-poles", "tilt", "spin"],
)
def test_residual_is_conformally_invariant(rot):
    mesh = build_mesh(4)
    base = GaussField.from_g(mesh, mobius_values(mesh), 1.0)
    moved = GaussField.from_g(mesh, mobius_values(mesh, rot=rot), 1.0)
    r0 = scaled_residual(base, pde_residual(ROUND, 1.0, base)).max()
    r1 = scaled_residual(moved, pde_residual(ROUND, 1.0, moved)).max()
    assert 0.5 <= r1 / r0 <= 2.0


def test_residual_rejects_potential_zero():
    mesh = build_mesh(2)
    field = GaussField.from_g(mesh, np.zeros(mesh.n_vertices))
    with pytest.raises(PotentialZeroOnRange):
        pde_residual(NonUnimodularGroup(0.0, 0.0), 1.0, field)


# ---------------------------------------------------------------------------
# invariant reduction
# ---------------------------------------------------------------------------

BERGER = UnimodularGroup(2, 2, 1)


def endpoint(g0, gy0, T, **kw):
    c = integrate_invariant_ode(BERGER, 0.5, g0, gy0, (0.0, T), **kw)
    return c.g[-1], c.gy[-1]


def test_ode_scaling_invariance():
    c1 = integrate_invariant_ode(BERGER, 0.5, 0.2, 0.6, (0.0, 1.0))
    c2 = integrate_invariant_ode(BERGER, 0.5, 0.2, 1.2, (0.0, 0.5))
    assert abs(c1.g[-1] - c2.g[-1]) < 1e-9
    assert abs(c1.gy[-1] - 0.5 * c2.gy[-1]) < 1e-9


def test_ode_reversibility():
    c = integrate_invariant_ode(BERGER, 0.5, 0.2 + 0.1j, 0.6 - 0.3j, (0.0, 1.5))
    back = integrate_invariant_ode(BERGER, 0.5, c.g[-1], -c.gy[-1], (0.0, 1.5))
    assert abs(back.g[-1] - (0.2 + 0.1j)) < 1e-8
    assert abs(-back.gy[-1] - (0.6 - 0.3j)) < 1e-8


def test_ode_step_halving():
    a = endpoint(0.2, 0.6, 1.0, step=0.05, rtol=1e-10)
    b = endpoint(0.2, 0.6, 1.0, step=0.025, rtol=1e-10)
    assert abs(a[0] - b[0]) < 1e-9


def test_ode_switches_chart_through_large_values():
    c = integrate_invariant_ode(BERGER, 0.5, 0.5, 2.0, (0.0, 2.0))
    assert np.nanmax(np.abs(c.g)) > 1.25
    a = endpoint(0.5, 2.0, 2.0)
    b = endpoint(0.5, 2.0, 2.0, rtol=1e-12, atol=1e-14)
    assert abs(1 / a[0] - 1 / b[0]) < 1e-7


def test_ode_curve_satisfies_pde_with_y_dependence():
    # g(x, y) = c(y) has g_z = -i c'/2, g_zbar = i c'/2, g_zzbar = c''/4
    hp = HPotential(BERGER, 0.5)
    T, d = 0.8, 1e-2
    vals = [endpoint(0.2 + 0.1j, 0.5 + 0.2j, T + k * d, rtol=1e-13, atol=1e-15) for k in (-2, -1, 0, 1, 2)]
    g = np.array([v[0] for v in vals])
    gyy = (-g[0] + 16 * g[1] - 30 * g[2] + 16 * g[3] - g[4]) / (12 * d * d)
    gy = vals[2][1]
    R, Rq, Rqb = hp.evaluate(g[2])
    K1 = Rq / R
    K2 = Rqb / R - np.conj(Rq) / np.conj(R)
    gz, gzb = -0.5j * gy, 0.5j * gy
    assert abs(gyy / 4 - K1 * gz * gzb - K2 * abs(gz) ** 2) < 1e-7


def test_ode_rejects_zero_derivative():
    with pytest.raises(ValueError):
        integrate_invariant_ode(BERGER, 0.5, 0.1, 0.0, (0.0, 1.0))


@settings(max_examples=20, deadline=None)
@given(
    st.floats(min_value=-0.8, max_value=0.8),
    st.floats(min_value=-0.8, max_value=0.8),
    st.floats(min_value=0.2, max_value=2.0),
)
def test_ode_trace_independent_of_speed(x, y, s):
    g0 = complex(x, y)
    c1 = integrate_invariant_ode(BERGER, 0.5, g0, 0.4, (0.0, 0.5))
    c2 = integrate_invariant_ode(BERGER, 0.5, g0, 0.4 * s, (0.0, 0.5 / s))
    assert abs(c1.g[-1] - c2.g[-1]) < 1e-8
