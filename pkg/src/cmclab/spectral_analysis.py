"""Jacobi operator spectra, right-invariant Jacobi fields, Gauss-map degree
and the Q_H certificate of congruence to a reference sphere."""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field as dc_field

import numpy as np
import scipy.sparse as sp
from scipy.interpolate import CloughTocher2DInterpolator, NearestNDInterpolator
from scipy.sparse.linalg import ArpackError, eigsh

from .errors import DegenerateTriangle, EigenFailure, ExtrapolationWarning
from .frame_integrator import _round_density
from .gauss_pde import _chart_potential
from .h_potential import H_CHART, Q_CHART, HPotential
from .metric_lie_group import derive_constants


# ----------------------------------------------------------------------------
# Gauss-map degree
# ----------------------------------------------------------------------------

def gauss_degree(field):
    """Degree of the Gauss map and its minimum pointwise Jacobian.

    The degree sums signed solid angles of the image triangles; the Jacobian
    is ``|g_z|^2 - |g_zbar|^2`` measured in round metrics on both spheres.
    """
    X = field.unit_vectors()
    a, b, c = (X[field.mesh.triangles[:, k]] for k in range(3))
    num = np.einsum("ij,ij->i", a, np.cross(b, c))
    den = 1 + np.einsum("ij,ij->i", a, b) + np.einsum("ij,ij->i", b, c) + np.einsum("ij,ij->i", c, a)
    omega = 2 * np.arctan2(num, den)
    degree = int(np.rint(omega.sum() / (4 * np.pi)))
    y, yz, yzb, _ = field.derivatives()
    jac = (np.abs(yz) ** 2 - np.abs(yzb) ** 2) * (1 + np.abs(field.mesh.coord) ** 2) ** 2 / (1 + np.abs(y) ** 2) ** 2
    return degree, float(jac.min())


# ----------------------------------------------------------------------------
# Jacobi operator
# ----------------------------------------------------------------------------

@dataclass
class JacobiOperator:
    stiffness: sp.csr_matrix  # cotangent Dirichlet form
    mass: np.ndarray  # lumped vertex areas of the induced metric
    potential: np.ndarray  # |sigma|^2 + Ric(N)
    h: float  # mean induced edge length

    def apply(self, u):
        """``L u = Delta u + P u`` with ``Delta = -M^-1 K``."""
        return -(self.stiffness @ u) / self.mass + self.potential * u

    def matrix(self):
        """Symmetric matrix of ``-L`` in the mass-weighted form ``K - M P``."""
        return (self.stiffness - sp.diags(self.mass * self.potential)).tocsc()

    def potential_scale(self):
        return max(float(np.max(np.abs(self.potential))), 4 * np.pi / float(self.mass.sum()))

    def default_tol(self):
        return 5 * self.h**2 * self.potential_scale()


def cotan_operator(vertices, triangles, edge_scale=None, max_aspect=1e6):
    """Cotangent stiffness and lumped mass from (optionally rescaled) edge lengths."""
    F = triangles
    P = vertices
    L = np.empty((len(F), 3))
    for k in range(3):
        i, j = F[:, (k + 1) % 3], F[:, (k + 2) % 3]
        L[:, k] = np.linalg.norm(P[i] - P[j], axis=1)
        if edge_scale is not None:
            L[:, k] *= 0.5 * (edge_scale[i] + edge_scale[j])
    a, b, c = L[:, 0], L[:, 1], L[:, 2]
    s = 0.5 * (a + b + c)
    area = np.sqrt(np.maximum(s * (s - a) * (s - b) * (s - c), 0))
    aspect = L.max(axis=1) ** 2 / np.maximum(area, 1e-300)
    if np.any(aspect > max_aspect) or np.any(area <= 0):
        raise DegenerateTriangle(f"induced triangle aspect ratio {aspect.max():.3e} exceeds {max_aspect:g}")
    n = len(P)
    rows, cols, vals = [], [], []
    for k in range(3):
        # angle opposite edge k
        lk = L[:, k]
        l1, l2 = L[:, (k + 1) % 3], L[:, (k + 2) % 3]
        cot = (l1**2 + l2**2 - lk**2) / (4 * area)
        i, j = F[:, (k + 1) % 3], F[:, (k + 2) % 3]
        w = 0.5 * cot
        rows += [i, j, i, j]
        cols += [j, i, i, j]
        vals += [-w, -w, w, w]
    K = sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n))
    M = np.zeros(n)
    for k in range(3):
        np.add.at(M, F[:, k], area / 3)
    return K, M, L


def jacobi_operator(group, immersion):
    """Discrete ``L = Delta + |sigma|^2 + Ric(N)`` on the induced metric."""
    group = derive_constants(group)
    mesh = immersion.mesh
    ef = np.sqrt(immersion.lam / _round_density(mesh))
    K, M, L = cotan_operator(mesh.vertices, mesh.triangles, ef)
    P = immersion.forms.sigma2 + group.ricci_quadratic(immersion.normals_e)
    return JacobiOperator(K, M, P, float(L.mean()))


@dataclass
class JacobiReport:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    index: int
    nullity: int
    tol: float
    kernel_residuals: np.ndarray = dc_field(default_factory=lambda: np.zeros(0))
    gram_condition: float = float("nan")
    kernel_projection: np.ndarray = dc_field(default_factory=lambda: np.zeros(0))

    def to_dict(self):
        return {
            "eigenvalues": [float(x) for x in self.eigenvalues],
            "index": self.index,
            "nullity": self.nullity,
            "tol": self.tol,
            "tol_formula": "5 * h^2 * max(max|P|, 4 pi / area)",
            "kernel_residuals": [float(x) for x in self.kernel_residuals],
            "gram_condition": self.gram_condition,
            "kernel_projection": [float(x) for x in self.kernel_projection],
        }


def spectrum(op, k=8):
    """Lowest ``k`` eigenvalues of ``-L`` (generalized problem ``K - MP = mu M``)."""
    A = op.matrix()
    Mm = sp.diags(op.mass).tocsc()
    shift = -1.5 * op.potential_scale() - 1.0
    # fixed start vector: ARPACK otherwise draws a random one
    v0 = np.ones(A.shape[0])
    try:
        vals, vecs = eigsh(A, k=k, M=Mm, sigma=shift, which="LM", tol=1e-12, v0=v0)
    except (ArpackError, RuntimeError) as exc:
        raise EigenFailure(f"eigen-solve failed: {exc}") from exc
    order = np.argsort(vals)
    return vals[order], vecs[:, order]


def index_nullity(op_or_eigs, tol=None, k=8):
    """Count negative and near-zero eigenvalues of ``-L``."""
    if isinstance(op_or_eigs, JacobiOperator):
        vals, vecs = spectrum(op_or_eigs, k)
        tol = op_or_eigs.default_tol() if tol is None else tol
    else:
        vals, vecs = np.asarray(op_or_eigs, dtype=float), None
        if tol is None:
            raise ValueError("tol is required when passing raw eigenvalues")
    index = int(np.sum(vals < -tol))
    nullity = int(np.sum(np.abs(vals) <= tol))
    return JacobiReport(vals, vecs, index, nullity, tol)


def right_invariant_jacobi(group, immersion, op=None):
    """Functions ``u_i = <F_i, N>``, their Rayleigh quotients ``|<u, -L u>| / <u, u>``
    and their mass-weighted Gram matrix.

    The Rayleigh quotient converges at second order on irregular meshes,
    unlike the pointwise cotangent Laplacian.
    """
    group = derive_constants(group)
    if op is None:
        op = jacobi_operator(group, immersion)
    n = immersion.normals_e
    U = np.empty((len(n), 3))
    for i in range(3):
        e = np.zeros(3)
        e[i] = 1
        adj = group.adjoint_inverse(immersion.positions, np.broadcast_to(e, n.shape))
        U[:, i] = np.sum(adj * n, axis=1)
    M = op.mass
    A = op.matrix()
    res = np.array([abs(U[:, i] @ (A @ U[:, i])) / np.sum(M * U[:, i] ** 2) for i in range(3)])
    gram = U.T @ (M[:, None] * U)
    return U, res, gram


def jacobi_report(group, immersion, k=8, tol=None):
    op = jacobi_operator(group, immersion)
    rep = index_nullity(op, tol, k)
    U, res, gram = right_invariant_jacobi(group, immersion, op)
    rep.kernel_residuals = res
    rep.gram_condition = float(np.linalg.cond(gram))
    kern = rep.eigenvectors[:, np.abs(rep.eigenvalues) <= rep.tol]
    M = op.mass
    proj = []
    for i in range(3):
        u = U[:, i]
        c = kern.T @ (M * u)
        proj.append(float(np.sqrt(np.sum(c**2) / np.sum(M * u * u))))
    rep.kernel_projection = np.array(proj)
    return rep


# ----------------------------------------------------------------------------
# Q_H certificate
# ----------------------------------------------------------------------------

def _l_values(hp, field):
    """``L = -conj(y_zbar) / (R y_z)`` in each vertex's target chart."""
    y, yz, yzb, _ = field.derivatives()
    R = _chart_potential(hp, field, 0)
    return -np.conj(yzb) / (R * yz)


class LTable:
    """The function ``L`` on the Gauss sphere, tabulated from a reference sphere.

    One Clough-Tocher interpolant per target chart (``q`` and ``h = 1/q``),
    each built from every reference vertex whose Gauss value lies within
    ``|.| <= 1.6`` in that chart. ``L~(h) = L(1/h) / h^4`` links the charts.
    """

    def __init__(self, group, H, reference, radius=1.6):
        self.hp = HPotential(derive_constants(group), H)
        Lv = _l_values(self.hp, reference)
        y = reference.values
        t = reference.tchart
        self.interp = []
        self.nearest = []
        for chart in (Q_CHART, H_CHART):
            same = t == chart
            with np.errstate(divide="ignore", invalid="ignore"):
                pts = np.where(same, y, 1 / y)
                # other-chart values converted: L_chart(x) = L_other(1/x) / x^4
                vals = np.where(same, Lv, Lv * y**4)
            keep = np.isfinite(pts) & (np.abs(pts) <= radius)
            P = np.stack([pts[keep].real, pts[keep].imag], axis=1)
            self.interp.append(CloughTocher2DInterpolator(P, vals[keep]))
            self.nearest.append(NearestNDInterpolator(P, vals[keep]))

    def __call__(self, x, chart):
        x = np.asarray(x, dtype=complex)
        out = np.empty(x.shape, dtype=complex)
        for c in (Q_CHART, H_CHART):
            sel = chart == c
            if not np.any(sel):
                continue
            pts = np.stack([x[sel].real, x[sel].imag], axis=1)
            v = self.interp[c](pts)
            bad = ~np.isfinite(v)
            if np.any(bad):
                warnings.warn(
                    f"{int(bad.sum())} Gauss values fall outside the tabulated coverage; using nearest values",
                    ExtrapolationWarning,
                    stacklevel=2,
                )
                v[bad] = self.nearest[c](pts[bad])
            out[sel] = v
        return out


@dataclass
class QHField:
    values: np.ndarray
    scaled: np.ndarray
    sup_norm: float
    table: LTable

    def to_dict(self):
        return {"sup_norm": self.sup_norm, "norm": "max |R| |Q_H| / |g_z|^2"}


def qh_from_derivatives(table, y, tchart, yz, yzb):
    """``Q_H = L(y) y_z^2 + y_z conj(y_zbar) / R`` and its scale-free size.

    The size ``|R| |Q_H| / |y_z|^2 = |R L(y) + conj(y_zbar) / y_z|`` is unchanged
    by conformal reparametrization of the domain and by the chart switch
    ``y -> 1/y``, so it compares candidates on any mesh or parametrization.
    """
    hp = table.hp
    Rq = hp.evaluate(y, Q_CHART, 0)
    Rh = hp.evaluate(y, H_CHART, 0)
    R = np.where(tchart == Q_CHART, Rq, Rh)
    L = table(y, tchart)
    Q = L * yz**2 + yz * np.conj(yzb) / R
    return Q, np.abs(R) * np.abs(Q) / np.abs(yz) ** 2


def qh_certificate(group, H, reference, candidate, table=None):
    """Evaluate the Q_H differential of ``candidate`` against ``reference``.

    ``candidate`` is any object with ``derivatives()`` returning
    ``(y, y_z, y_zbar, ...)`` and a per-vertex ``tchart``.
    """
    if table is None:
        table = LTable(group, H, reference)
    y, yz, yzb = candidate.derivatives()[:3]
    Q, scaled = qh_from_derivatives(table, y, candidate.tchart, yz, yzb)
    return QHField(Q, scaled, float(np.max(scaled)), table)


@dataclass
class TransportedField:
    """A Gauss map composed with a domain Moebius map, with chain-rule derivatives."""

    points: np.ndarray  # pulled-back domain coordinates (per-vertex chart)
    values: np.ndarray
    tchart: np.ndarray
    yz: np.ndarray
    yzb: np.ndarray

    def derivatives(self):
        return self.values, self.yz, self.yzb


def mobius_recompose(field, a=2.0, b=0.5 + 0.25j, c=-0.3j, d=1.0):
    """``g o m`` for ``m(u) = (a u + b) / (c u + d)`` acting in each vertex's domain chart.

    The candidate lives at the points ``m^-1(zeta_v)`` and carries the exact
    derivatives ``g_z m'`` and ``g_zbar conj(m')``.
    """
    det = a * d - b * c
    if abs(det) < 1e-12:
        raise ValueError("degenerate Moebius map")
    zeta = field.mesh.coord
    u = (d * zeta - b) / (-c * zeta + a)
    mp = det / (c * u + d) ** 2
    y, yz, yzb, _ = field.derivatives()
    return TransportedField(u, y.copy(), field.tchart.copy(), yz * mp, yzb * np.conj(mp))


def perturbed_field(field, eps=0.01, degree=4):
    """Non-conformal perturbation ``g exp(eps (1+i) Y)`` of a Gauss map.

    ``Y = Re((x1 + i x2)^degree)`` on the unit domain sphere. The exponential
    form keeps the perturbation consistent across target charts.
    """
    X = field.mesh.vertices
    Y = ((X[:, 0] + 1j * X[:, 1]) ** degree).real
    s = np.where(field.tchart == Q_CHART, 1.0, -1.0)
    out = field.copy()
    out.values = field.values * np.exp(s * eps * (1 + 1j) * Y)
    return out
