"""From a Gauss field to an immersed sphere.

A solution ``g`` determines ``f^-1 f_z = sum A_i E_i`` with

    A1 = g_z (conj(g)^2 - 1) / R,  A2 = i g_z (conj(g)^2 + 1) / R,
    A3 = 2 conj(g) g_z / R,        lambda = 4 (1+|g|^2)^2 |g_z|^2 / |R|^2,

and in the inverted target chart ``h = 1/g``

    A1 = h_z (conj(h)^2 - 1) / R~, A2 = -i h_z (conj(h)^2 + 1) / R~,
    A3 = -2 conj(h) h_z / R~.

The immersion is recovered by integrating ``f^-1 df = 2 Re(A dz)`` along a
breadth-first spanning tree of mesh edges.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.linalg import expm
from scipy.sparse.csgraph import breadth_first_order

from .errors import ClosureFailure
from .gauss_pde import _chart_potential, domain_weight
from .h_potential import H_CHART, HPotential
from .mesh import Z_CHART
from .metric_lie_group import derive_constants

CLOSURE_THRESHOLD = 1e-2


@dataclass
class FrameCoefficients:
    A: np.ndarray  # (V, 3) complex, in each vertex's domain chart
    eta: np.ndarray
    lam: np.ndarray


def normal_components(field):
    """Left-translated unit normal ``n`` in the frame at ``e`` and its z-derivatives."""
    y, yz, yzb, _ = field.derivatives()
    yb = np.conj(y)
    d = 1 + y * yb
    n = np.stack([(y + yb) / d, -1j * (y - yb) / d, (1 - y * yb) / d], axis=-1).real
    # Wirtinger derivatives of n with respect to y and conj(y)
    ny = np.stack([(1 - yb * yb) / d**2, -1j * (1 + yb * yb) / d**2, -2 * yb / d**2], axis=-1)
    nyb = np.conj(ny)
    flip = np.where(field.tchart == H_CHART, -1.0, 1.0)
    sign = np.stack([np.ones_like(flip), flip, flip], axis=-1)
    n = n * sign
    nz = (ny * yz[:, None] + nyb * np.conj(yzb)[:, None]) * sign
    nzb = (ny * yzb[:, None] + nyb * np.conj(yz)[:, None]) * sign
    return n, nz, nzb


def frame_coefficients(group, H, field):
    hp = HPotential(derive_constants(group), H)
    y, yz, _, _ = field.derivatives()
    R = _chart_potential(hp, field, 0)
    if np.any(np.abs(R) <= 1e-10):
        from .errors import PotentialZeroOnRange

        raise PotentialZeroOnRange("H-potential vanishes on the range of the field")
    yb = np.conj(y)
    s = np.where(field.tchart == H_CHART, -1.0, 1.0)
    A = np.stack([yz * (yb * yb - 1), s * 1j * yz * (yb * yb + 1), s * 2 * yb * yz], axis=-1) / R[:, None]
    eta = 4 * yb * yz / R
    lam = 4 * (1 + np.abs(y) ** 2) ** 2 * np.abs(yz) ** 2 / np.abs(R) ** 2
    return FrameCoefficients(A, eta, lam)


def _edge_coefficients(mesh, A, a, b):
    """``A`` at both ends of edges ``a -> b`` expressed in the domain chart of ``a``."""
    Aa = A[a]
    Ab = A[b].copy()
    diff = mesh.chart[a] != mesh.chart[b]
    if np.any(diff):
        # A_z = -w^2 A_w ; A_w = -z^2 A_z : the factor is -(coord of b in its own chart)^2
        Ab[diff] = -(mesh.coord[b[diff]] ** 2)[:, None] * Ab[diff]
    za = mesh.coord[a]
    zb = np.where(mesh.chart[a] == Z_CHART, mesh.z[b], mesh.w[b])
    return Aa, Ab, zb - za


def vertex_derivatives(mesh, A, degree=3):
    """``A_z`` and ``A_zbar`` per vertex in its own domain chart (MLS fits)."""
    S = mesh.stencils(degree)
    nbr = S.nbr
    diff = mesh.chart[nbr] != mesh.chart[:, None]
    An = A[nbr] * np.where(diff, -(mesh.coord[nbr] ** 2), 1.0)[..., None]
    return np.einsum("vk,vki->vi", S.dz, An), np.einsum("vk,vki->vi", S.dzb, An)


_G1 = 0.5 - np.sqrt(3) / 6
_G2 = 0.5 + np.sqrt(3) / 6


def _hermite(Aa, Ab, da, db, s):
    h00 = 2 * s**3 - 3 * s**2 + 1
    h10 = s**3 - 2 * s**2 + s
    h01 = -2 * s**3 + 3 * s**2
    h11 = s**3 - s**2
    return h00 * Aa + h10 * da + h01 * Ab + h11 * db


def edge_increments(group, mesh, A, a, b, rule="magnus2", dA=None):
    """Lie algebra increments ``Omega`` with ``f(b) = f(a) exp(Omega)``.

    ``magnus2``: trapezoid values plus the commutator ``[xi_a, xi_b] / 12``
    (second order globally). ``magnus4``: cubic Hermite interpolation of
    ``A`` along the chart segment, sampled at the two Gauss points, with the
    commutator ``sqrt(3)/12 [xi_1, xi_2]`` (fourth order). ``dA`` is the pair
    ``(A_z, A_zbar)`` needed by ``magnus4``.
    """
    Aa, Ab, dz = _edge_coefficients(mesh, A, a, b)
    if rule == "magnus2":
        xa = 2 * (Aa * dz[:, None]).real
        xb = 2 * (Ab * dz[:, None]).real
        return 0.5 * (xa + xb) + group.bracket(xa, xb) / 12.0
    if rule != "magnus4":
        raise ValueError(f"unknown edge rule {rule!r}")
    if dA is None:
        dA = vertex_derivatives(mesh, A)
    Az, Azb = dA
    Azb_b = Az[b].copy()
    Azbb_b = Azb[b].copy()
    diff = mesh.chart[a] != mesh.chart[b]
    if np.any(diff):
        # F(z) = -w^2 A(w), w = 1/z: F_z = 2 w^3 A + w^4 A_w, F_zbar = |w|^4 A_wbar
        w = mesh.coord[b[diff]][:, None]
        Azb_b[diff] = 2 * w**3 * A[b[diff]] + w**4 * Az[b[diff]]
        Azbb_b[diff] = np.abs(w) ** 4 * Azb[b[diff]]
    dzc = np.conj(dz)[:, None]
    da = Az[a] * dz[:, None] + Azb[a] * dzc
    db = Azb_b * dz[:, None] + Azbb_b * dzc
    x1 = 2 * (_hermite(Aa, Ab, da, db, _G1) * dz[:, None]).real
    x2 = 2 * (_hermite(Aa, Ab, da, db, _G2) * dz[:, None]).real
    return 0.5 * (x1 + x2) + np.sqrt(3) / 12 * group.bracket(x1, x2)


def integrability_residual(group, H, coeffs, field, degree=2):
    """Per-vertex size of ``(A_k)_zbar - [lambda H N_k / 2 - sum conj(A_i) A_j G_ijk]``.

    For unimodular groups this is the componentwise form
    ``(A_1)_zbar = A_2 conj(A_3)(mu_3 - iH) - A_3 conj(A_2)(mu_2 - iH)`` (cyclic).
    ``(A_k)_zbar`` uses quadratic MLS fits, which are second order for first
    derivatives.
    """
    group = derive_constants(group)
    mesh = field.mesh
    A = coeffs.A
    _, Azb = vertex_derivatives(mesh, A, degree)
    n, _, _ = normal_components(field)
    G = group.connection
    rhs = 0.5 * coeffs.lam[:, None] * H * n - np.einsum("vi,vj,ijk->vk", np.conj(A), A, G)
    return np.linalg.norm(Azb - rhs, axis=1) * domain_weight(mesh)


class ImmersedSphere:
    """Reconstructed immersion with per-vertex geometric data."""

    def __init__(self, group, field, coeffs, positions, closure, tree, base_vertex):
        self.group = group
        self.field = field
        self.mesh = field.mesh
        self.H = field.H
        self.coeffs = coeffs
        self.positions = positions
        self.closure_residual = closure
        self.tree = tree
        self.base_vertex = base_vertex

    @property
    def lam(self):
        return self.coeffs.lam

    @cached_property
    def normals_e(self):
        return normal_components(self.field)[0]

    @cached_property
    def normals(self):
        return self.group.push_left(self.positions, self.normals_e)

    def embedded_points(self):
        return self.group.embed(self.positions)

    def translated(self, a):
        """Left translate every vertex by ``a``."""
        pos = self.group.multiply(np.broadcast_to(a, self.positions.shape), self.positions)
        return ImmersedSphere(self.group, self.field, self.coeffs, pos, self.closure_residual, self.tree, self.base_vertex)

    @cached_property
    def forms(self):
        return fundamental_forms(self.group, self)

    def area(self):
        return float(np.sum(self.lam / _round_density(self.mesh) * vertex_areas(self.mesh)))

    def heron_area(self):
        m = self.mesh
        F = m.triangles
        P = self.positions
        d = lambda i, j: self.group.distance_local(P[F[:, i]], P[F[:, j]])  # noqa: E731
        a, b, c = d(0, 1), d(1, 2), d(2, 0)
        s = 0.5 * (a + b + c)
        return float(np.sum(np.sqrt(np.maximum(s * (s - a) * (s - b) * (s - c), 0))))

    def symmetry_center(self):
        """Midpoint of the one-parameter arc from ``f(north)`` to ``f(south)``."""
        g = self.group
        m = self.mesh
        pn = self.positions[m.north]
        ps = self.positions[m.south]
        X = group_log(g, g.multiply(g.inverse(pn), ps))
        return g.multiply(pn, g.exp(0.5 * X))

    def enclosed_volume(self, center=None):
        """Volume bounded by the sphere via a divergence identity in exponential coordinates."""
        return enclosed_volume(self, center)


def _round_density(mesh):
    return 4 / (1 + np.abs(mesh.coord) ** 2) ** 2


def vertex_areas(mesh):
    """One third of the spherical areas of incident triangles (sums to 4 pi)."""
    V = mesh.vertices
    F = mesh.triangles
    a, b, c = V[F[:, 0]], V[F[:, 1]], V[F[:, 2]]
    num = np.einsum("ij,ij->i", a, np.cross(b, c))
    den = 1 + np.einsum("ij,ij->i", a, b) + np.einsum("ij,ij->i", b, c) + np.einsum("ij,ij->i", c, a)
    om = 2 * np.arctan2(num, den)
    out = np.zeros(len(V))
    for k in range(3):
        np.add.at(out, F[:, k], om / 3)
    return out


def integrate_immersion(
    group, coeffs, field, base_vertex=None, base_point=None, threshold=CLOSURE_THRESHOLD, root=None, rule="magnus2"
):
    """Integrate ``f^-1 df`` over a BFS spanning tree; report closure on the other edges.

    ``root`` selects the BFS root (defaults to ``base_vertex``); positions are
    afterwards left translated so that ``f(base_vertex) = base_point``.
    ``rule`` is the edge rule of :func:`edge_increments`.
    """
    group = derive_constants(group)
    mesh = field.mesh
    if base_vertex is None:
        base_vertex = mesh.north
    if base_point is None:
        base_point = group.identity()
    root = base_vertex if root is None else root
    dA = vertex_derivatives(mesh, coeffs.A) if rule == "magnus4" else None
    order, pred = breadth_first_order(mesh.adjacency, root, directed=False, return_predecessors=True)
    n = mesh.n_vertices
    depth = np.zeros(n, dtype=np.int64)
    for v in order[1:]:
        depth[v] = depth[pred[v]] + 1
    pos = np.zeros((n, group.ambient_dim))
    pos[root] = group.identity()
    for d in range(1, depth.max() + 1):
        vs = np.flatnonzero(depth == d)
        ps = pred[vs]
        om = edge_increments(group, mesh, coeffs.A, ps, vs, rule, dA)
        pos[vs] = group.multiply(pos[ps], group.exp(om))
    # closure on non-tree edges
    e = mesh.edges
    tree = np.zeros(len(e), dtype=bool)
    child = np.arange(n)
    has = pred >= 0
    tree_pairs = {(min(a, b), max(a, b)) for a, b in zip(pred[has], child[has])}
    tree = np.array([(int(a), int(b)) in tree_pairs for a, b in e])
    a, b = e[~tree, 0], e[~tree, 1]
    om = edge_increments(group, mesh, coeffs.A, a, b, rule, dA)
    pred_b = group.multiply(pos[a], group.exp(om))
    mism = group.distance_local(pos[b], pred_b)
    closure = float(mism.max()) if len(mism) else 0.0
    if closure > 10 * threshold:
        raise ClosureFailure(f"closure residual {closure:.3e} exceeds 10x threshold {threshold:g}")
    # normalize f(base_vertex) = base_point
    shift = group.multiply(base_point, group.inverse(pos[base_vertex]))
    pos = group.multiply(np.broadcast_to(shift, pos.shape), pos)
    return ImmersedSphere(group, field, coeffs, pos, closure, (order, pred), base_vertex)


def reconstruct(group, field, threshold=CLOSURE_THRESHOLD, rule="magnus2"):
    group = derive_constants(group)
    coeffs = frame_coefficients(group, field.H, field)
    return integrate_immersion(group, coeffs, field, threshold=threshold, rule=rule)


@dataclass
class FundamentalForms:
    first: np.ndarray  # (V, 2, 2) in chart coordinates
    second: np.ndarray  # (V, 2, 2)
    mean_curvature: np.ndarray
    sigma2: np.ndarray  # |sigma|^2
    hopf: np.ndarray  # p = sigma(d/dz, d/dz)


def fundamental_forms(group, immersion):
    """First/second fundamental forms from covariant derivatives of the normal."""
    group = derive_constants(group)
    field = immersion.field
    A = immersion.coeffs.A
    lam = immersion.coeffs.lam
    n, nz, nzb = normal_components(field)
    G = group.connection
    # nabla_{f_z} N = sum_k [(n_k)_z + sum_ij A_j n_i G_jik] E_k
    DzN = nz + np.einsum("vj,vi,jik->vk", A, n, G)
    DzbN = nzb + np.einsum("vj,vi,jik->vk", np.conj(A), n, G)
    p = -np.einsum("vk,vk->v", DzN, A)
    Hloc = (-2 * np.einsum("vk,vk->v", DzbN, A) / lam).real
    I = np.zeros((len(lam), 2, 2))
    I[:, 0, 0] = I[:, 1, 1] = lam
    II = np.empty_like(I)
    II[:, 0, 0] = 2 * p.real + Hloc * lam
    II[:, 1, 1] = -2 * p.real + Hloc * lam
    II[:, 0, 1] = II[:, 1, 0] = -2 * p.imag
    sigma2 = 2 * Hloc**2 + 8 * np.abs(p) ** 2 / lam**2
    return FundamentalForms(I, II, Hloc, sigma2, p)


# ----------------------------------------------------------------------------
# enclosed volume
# ----------------------------------------------------------------------------

_GL_X, _GL_W = np.polynomial.legendre.leggauss(10)
_GL_X = 0.5 * (_GL_X + 1)
_GL_W = 0.5 * _GL_W


def haar_density(group, X):
    """``det((1 - exp(-ad X)) / ad X)``: left Haar density in exponential coordinates."""
    C = group.structure
    M = np.einsum("...i,ijk->...kj", X, C)
    ev = np.linalg.eigvals(M)
    with np.errstate(invalid="ignore", divide="ignore"):
        f = np.where(np.abs(ev) < 1e-8, 1 - ev / 2 + ev**2 / 6, -np.expm1(-ev) / ev)
    return np.prod(f, axis=-1).real


def enclosed_volume(immersion, center=None):
    group = immersion.group
    if center is None:
        center = immersion.symmetry_center()
    rel = group.multiply(np.broadcast_to(group.inverse(center), immersion.positions.shape), immersion.positions)
    X = group_log(group, rel)
    # W(X) = X * int_0^1 t^2 rho(t X) dt has divergence rho
    S = np.zeros(len(X))
    for t, w in zip(_GL_X, _GL_W):
        S += w * t**2 * haar_density(group, t * X)
    W = S[:, None] * X
    F = immersion.mesh.triangles
    a, b, c = X[F[:, 0]], X[F[:, 1]], X[F[:, 2]]
    nrm = 0.5 * np.cross(b - a, c - a)
    Wm = (W[F[:, 0]] + W[F[:, 1]] + W[F[:, 2]]) / 3
    return float(abs(np.sum(np.einsum("ij,ij->i", Wm, nrm))))


def group_log(group, p):
    """Exponential coordinates of ``p`` in the frame ``E1, E2, E3``."""
    if group.kind == "semidirect":
        return _semidirect_log(group, p)
    return group.log(p)


def _semidirect_log(group, p):
    """Closed-form inverse of the semidirect exponential.

    ``exp(v)`` has ``z = v3`` and ``(x, y) = phi(v3 A) v_xy`` with
    ``phi(M) = int_0^1 exp(s M) ds``, the top-right block of
    ``expm([[M, I], [0, 0]])``.
    """
    p = np.asarray(p, dtype=float)
    z = p[..., 2]
    B = np.zeros(p.shape[:-1] + (4, 4))
    B[..., :2, :2] = z[..., None, None] * group.A
    B[..., :2, 2:] = np.eye(2)
    phi = expm(B.reshape(-1, 4, 4)).reshape(B.shape)[..., :2, 2:]
    xy = np.linalg.solve(phi, p[..., :2, None])[..., 0]
    return np.concatenate([xy, z[..., None]], axis=-1)
