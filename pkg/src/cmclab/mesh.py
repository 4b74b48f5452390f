"""Icosahedral sphere meshes with two stereographic charts.

Vertex ``v`` uses the chart ``z = (X + iY)/(1 + Z)`` when ``Z >= 0`` and
``w = 1/z = (X - iY)/(1 - Z)`` otherwise. Both charts are orientation
preserving for the outward normal, and ``g(z) = z`` is the identity map of
the sphere in the Gauss-map convention used throughout the package.
"""
from __future__ import annotations

from functools import cached_property

import numpy as np
import scipy.sparse as sp

Z_CHART = 0
W_CHART = 1


def icosahedron():
    """Unit icosahedron with vertex 0 at the north pole and vertex 11 at the south.

    The rings are rotated so that level >= 1 subdivisions have a vertex at
    ``(1, 0, 0)``.
    """
    zr = 1 / np.sqrt(5)
    rr = 2 / np.sqrt(5)
    up = np.deg2rad(-18 + 72 * np.arange(5))
    lo = np.deg2rad(18 + 72 * np.arange(5))
    V = np.zeros((12, 3))
    V[0] = (0, 0, 1)
    V[1:6] = np.stack([rr * np.cos(up), rr * np.sin(up), np.full(5, zr)], axis=1)
    V[6:11] = np.stack([rr * np.cos(lo), rr * np.sin(lo), np.full(5, -zr)], axis=1)
    V[11] = (0, 0, -1)
    F = []
    for k in range(5):
        u0, u1 = 1 + k, 1 + (k + 1) % 5
        l0, l1 = 6 + k, 6 + (k + 1) % 5
        F.append((0, u0, u1))
        F.append((u0, l0, u1))
        F.append((u1, l0, l1))
        F.append((11, l1, l0))
    F = np.array(F)
    return V, _orient_outward(V, F)


def _orient_outward(V, F):
    n = np.cross(V[F[:, 1]] - V[F[:, 0]], V[F[:, 2]] - V[F[:, 0]])
    flip = np.einsum("ij,ij->i", n, V[F].mean(axis=1)) < 0
    F = F.copy()
    F[flip] = F[flip][:, [0, 2, 1]]
    return F


def subdivide(V, F):
    """One 4-to-1 midpoint subdivision, projected to the sphere.

    Existing vertices keep their indices; edge midpoints are appended.
    Returns ``(V, F, parents)`` with ``parents[k]`` the two endpoints of the
    edge that produced new vertex ``len(V_old) + k``.
    """
    nv = len(V)
    e = np.concatenate([F[:, [0, 1]], F[:, [1, 2]], F[:, [2, 0]]])
    e.sort(axis=1)
    edges, inv = np.unique(e, axis=0, return_inverse=True)
    inv = inv.ravel()
    mid = V[edges[:, 0]] + V[edges[:, 1]]
    mid /= np.linalg.norm(mid, axis=1, keepdims=True)
    nf = len(F)
    m01 = nv + inv[:nf]
    m12 = nv + inv[nf : 2 * nf]
    m20 = nv + inv[2 * nf :]
    a, b, c = F[:, 0], F[:, 1], F[:, 2]
    F2 = np.concatenate(
        [
            np.stack([a, m01, m20], 1),
            np.stack([m01, b, m12], 1),
            np.stack([m20, m12, c], 1),
            np.stack([m01, m12, m20], 1),
        ]
    )
    return np.vstack([V, mid]), F2, edges


def stereographic(X):
    """Both chart coordinates ``(z, w)`` of unit vectors; ``inf`` at the poles."""
    X = np.asarray(X, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        z = (X[..., 0] + 1j * X[..., 1]) / (1 + X[..., 2])
        w = (X[..., 0] - 1j * X[..., 1]) / (1 - X[..., 2])
    z = np.where(X[..., 2] <= -1 + 1e-15, np.inf + 0j, z)
    w = np.where(X[..., 2] >= 1 - 1e-15, np.inf + 0j, w)
    return z, w


def inverse_stereographic(z):
    """Unit vectors from ``z``-chart values (``inf`` maps to the south pole)."""
    z = np.asarray(z, dtype=complex)
    r2 = np.abs(z) ** 2
    with np.errstate(invalid="ignore"):
        X = np.stack([2 * z.real, 2 * z.imag, 1 - r2], axis=-1) / (1 + r2)[..., None]
    inf = ~np.isfinite(z)
    X[inf] = (0.0, 0.0, -1.0)
    return X


class SphereMesh:
    """Subdivided icosahedron with chart bookkeeping and MLS derivative stencils."""

    def __init__(self, vertices, triangles, level, parents=None):
        self.vertices = np.asarray(vertices, dtype=float)
        self.triangles = np.asarray(triangles, dtype=np.int64)
        self.level = level
        self.parents = parents
        self.z, self.w = stereographic(self.vertices)
        self.chart = np.where(self.vertices[:, 2] >= 0, Z_CHART, W_CHART)
        self.coord = np.where(self.chart == Z_CHART, self.z, self.w)
        self.north = int(np.argmax(self.vertices[:, 2]))
        self.south = int(np.argmin(self.vertices[:, 2]))
        # vertex at (1, 0, 0): z = 1, used to fix the rotation gauge
        self.ref = int(np.argmax(self.vertices[:, 0]))

    @property
    def n_vertices(self):
        return len(self.vertices)

    def coords_in_chart(self, chart):
        return self.z if chart == Z_CHART else self.w

    def in_band(self, lo=0.8, hi=1.25):
        """Vertices that carry both charts (overlap band ``lo <= |z| <= hi``)."""
        a = np.abs(self.z)
        return (a >= lo) & (a <= hi)

    @cached_property
    def edges(self):
        F = self.triangles
        e = np.concatenate([F[:, [0, 1]], F[:, [1, 2]], F[:, [2, 0]]])
        e.sort(axis=1)
        return np.unique(e, axis=0)

    @cached_property
    def adjacency(self):
        n = self.n_vertices
        e = self.edges
        A = sp.coo_matrix((np.ones(2 * len(e)), (np.r_[e[:, 0], e[:, 1]], np.r_[e[:, 1], e[:, 0]])), shape=(n, n))
        return A.tocsr()

    def euler_characteristic(self):
        return self.n_vertices - len(self.edges) + len(self.triangles)

    @cached_property
    def rings(self):
        """Padded 2-ring neighbourhoods; column 0 is the vertex itself."""
        A = self.adjacency
        A2 = (A + A @ A).tocsr()
        A2.setdiag(0)
        A2.eliminate_zeros()
        counts = np.diff(A2.indptr)
        K = counts.max() + 1
        n = self.n_vertices
        nbr = np.repeat(np.arange(n)[:, None], K, axis=1)
        mask = np.zeros((n, K), dtype=bool)
        mask[:, 0] = True
        for v in range(n):
            js = A2.indices[A2.indptr[v] : A2.indptr[v + 1]]
            nbr[v, 1 : 1 + len(js)] = js
            mask[v, 1 : 1 + len(js)] = True
        return nbr, mask

    @cached_property
    def mean_edge(self):
        e = self.edges
        return float(np.mean(np.linalg.norm(self.vertices[e[:, 0]] - self.vertices[e[:, 1]], axis=1)))

    def stencils(self, degree=2):
        """Cached MLS derivative stencils of the given polynomial degree."""
        cache = self.__dict__.setdefault("_stencils", {})
        if degree not in cache:
            cache[degree] = MLSStencils(self, degree)
        return cache[degree]


def build_mesh(level):
    if level < 0:
        raise ValueError("mesh level must be >= 0")
    V, F = icosahedron()
    parents = None
    for _ in range(level):
        V, F, parents = subdivide(V, F)
    return SphereMesh(V, F, level, parents)


def _monomials(dx, dy, degree):
    cols = []
    for total in range(1, degree + 1):
        for py in range(total + 1):
            cols.append(dx ** (total - py) * dy**py)
    return np.stack(cols, axis=-1)


class MLSStencils:
    """Moving least-squares derivative weights on 2-ring neighbourhoods.

    For vertex ``v`` the fit is done in ``v``'s own chart on ``f_j - f_v``,
    so the fitted polynomial interpolates the centre value. Weights are
    stored padded: ``dz[v, k]`` multiplies ``f[nbr[v, k]]``.
    """

    def __init__(self, mesh, degree=2):
        self.mesh = mesh
        self.degree = degree
        nbr, mask = mesh.rings
        self.nbr = nbr
        self.mask = mask
        n, K = nbr.shape
        zc = np.where(mesh.chart[:, None] == Z_CHART, mesh.z[nbr], mesh.w[nbr])
        d = zc - mesh.coord[:, None]
        d = np.where(mask, d, 0)
        self.offsets = d
        dx, dy = d.real, d.imag
        M = _monomials(dx, dy, degree)  # (n, K, m)
        r2 = np.abs(d) ** 2
        h2 = np.sum(np.where(mask, r2, 0), axis=1) / np.maximum(mask.sum(axis=1) - 1, 1)
        W = np.where(mask, 1.0 / (r2 / h2[:, None] + 0.05), 0.0)
        W[:, 0] = 0.0
        MtW = np.transpose(M * W[..., None], (0, 2, 1))
        G = MtW @ M
        P = np.linalg.solve(G, MtW)  # (n, m, K): coefficient functionals
        P = P - 0.0
        # derivative functionals act on f_j - f_v
        fx, fy = P[:, 0], P[:, 1]
        fxx, fxy, fyy = 2 * P[:, 2], P[:, 3], 2 * P[:, 4]

        def centred(w):
            w = np.where(mask, w, 0)
            w = w.astype(complex)
            w[:, 0] = -w[:, 1:].sum(axis=1)
            return w

        self.coeffs = P
        self.dz = centred(0.5 * (fx - 1j * fy))
        self.dzb = centred(0.5 * (fx + 1j * fy))
        self.dzzb = centred(0.25 * (fxx + fyy))
        self.dzz = centred(0.25 * (fxx - fyy - 2j * fxy))
        self.dzbzb = centred(0.25 * (fxx - fyy + 2j * fxy))

    def apply(self, weights, F):
        """Apply padded weights to per-vertex values already gathered as ``F[v, k]``."""
        return np.sum(weights * F, axis=1)

    def matrix(self, weights):
        n, K = self.nbr.shape
        rows = np.repeat(np.arange(n), K)
        return sp.csr_matrix((weights.ravel(), (rows, self.nbr.ravel())), shape=(n, n))

    def evaluate_fit(self, v, F, offset):
        """Evaluate the local fit of gathered values ``F`` (shape (K,)) at ``offset``."""
        d = np.atleast_1d(offset)
        M = _monomials(d.real, d.imag, self.degree)
        c = self.coeffs[v] @ (F - F[0])
        return F[0] + M @ c
