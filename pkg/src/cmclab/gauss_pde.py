"""The elliptic PDE satisfied by the left-invariant Gauss map of an H-surface.

In a conformal coordinate ``z`` the Gauss map ``g`` solves

    g_zzbar = K1(g) g_z g_zbar + K2(g) |g_z|^2,
    K1 = R_q / R,   K2 = R_qbar / R - conj(R_q) / conj(R),

with ``R`` the H-potential. The equation keeps this form under holomorphic
changes of ``z`` and, with ``R`` replaced by the chart potential
``R~(h) = |h|^4 R(1/h)``, under the inversion ``h = 1/g``. Every vertex
therefore works in its own domain chart and in a target chart chosen so
that the stored value has modulus at most 1.25.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.integrate import solve_ivp

from .errors import PotentialZeroOnRange, StepFailure
from .h_potential import H_CHART, Q_CHART, HPotential
from .mesh import W_CHART, Z_CHART, SphereMesh, build_mesh  # noqa: F401

BAND_HI = 1.25


class GaussField:
    """Discrete map from a sphere mesh into the Riemann sphere.

    ``values[v]`` is ``g(v)`` when ``tchart[v] == 0`` and ``1/g(v)`` when
    ``tchart[v] == 1``; derivatives are taken in the domain chart of ``v``.
    """

    def __init__(self, mesh, values, tchart, H=None, degree=3):
        self.mesh = mesh
        self.values = np.asarray(values, dtype=complex).copy()
        self.tchart = np.asarray(tchart, dtype=np.int64).copy()
        self.H = H
        self.degree = degree

    @classmethod
    def from_g(cls, mesh, g, H=None, degree=3):
        """Build from Riemann-sphere values (``inf`` allowed)."""
        g = np.asarray(g, dtype=complex)
        with np.errstate(divide="ignore", invalid="ignore"):
            far = ~np.isfinite(g) | (np.abs(g) > 1)
            vals = np.where(far, np.where(np.isfinite(g), 1 / np.where(far, g, 1), 0), g)
        return cls(mesh, vals, far.astype(np.int64), H, degree)

    @classmethod
    def identity(cls, mesh, H=None, degree=3):
        """``g(z) = z``: in each vertex's own charts the value is its coordinate."""
        return cls(mesh, mesh.coord, mesh.chart, H, degree)

    def copy(self):
        return GaussField(self.mesh, self.values, self.tchart, self.H, self.degree)

    @property
    def stencils(self):
        return self.mesh.stencils(self.degree)

    def g(self):
        """Values on the Riemann sphere; ``inf`` where ``1/g = 0``."""
        with np.errstate(divide="ignore", invalid="ignore"):
            inv = np.where(self.values == 0, np.inf + 0j, 1 / np.where(self.values == 0, 1, self.values))
        return np.where(self.tchart == Q_CHART, self.values, inv)

    def unit_vectors(self):
        """Points of the unit sphere with stereographic value ``g``."""
        y = self.values
        r2 = np.abs(y) ** 2
        X = np.stack([2 * y.real, 2 * y.imag, 1 - r2], axis=-1) / (1 + r2)[:, None]
        # 1/g = conj-reflected: (x1, x2, x3) -> (x1, -x2, -x3)
        flip = self.tchart == H_CHART
        X[flip] = X[flip] * np.array([1.0, -1.0, -1.0])
        return X

    def reassign_charts(self, hi=BAND_HI):
        """Switch target chart where the stored value left the band; returns count."""
        out = np.abs(self.values) > hi
        if np.any(out):
            self.values[out] = 1 / self.values[out]
            self.tchart[out] = 1 - self.tchart[out]
        return int(out.sum())

    def gathered(self):
        """Neighbour values in each vertex's target chart, and inversion flags."""
        S = self.stencils
        Y = self.values[S.nbr]
        inv = self.tchart[S.nbr] != self.tchart[:, None]
        with np.errstate(divide="ignore", invalid="ignore"):
            Y = np.where(inv, 1 / np.where(Y == 0, 1e-300, Y), Y)
        return Y, inv

    def derivatives(self):
        """``(y, y_z, y_zbar, y_zzbar)`` per vertex in its own charts."""
        S = self.stencils
        Y, _ = self.gathered()
        return (
            self.values,
            S.apply(S.dz, Y),
            S.apply(S.dzb, Y),
            S.apply(S.dzzb, Y),
        )

    def prolong(self, fine_mesh):
        """Transfer to the next subdivision level by local MLS evaluation."""
        coarse = self.mesh
        if fine_mesh.parents is None or len(fine_mesh.parents) + coarse.n_vertices != fine_mesh.n_vertices:
            raise ValueError("fine mesh is not the subdivision of this field's mesh")
        S = self.stencils
        Y, _ = self.gathered()
        n0 = coarse.n_vertices
        g = np.empty(fine_mesh.n_vertices, dtype=complex)
        g[:n0] = self.g()
        for k, (p, q) in enumerate(fine_mesh.parents):
            est = []
            for v in (p, q):
                x = fine_mesh.z[n0 + k] if coarse.chart[v] == Z_CHART else fine_mesh.w[n0 + k]
                y = S.evaluate_fit(v, Y[v], x - coarse.coord[v])[0]
                est.append(y if self.tchart[v] == Q_CHART else (1 / y if y != 0 else np.inf))
            if np.all(np.isfinite(est)) and abs(est[0]) <= 1 and abs(est[1]) <= 1:
                g[n0 + k] = 0.5 * (est[0] + est[1])
            else:
                # average in the inverted chart where |g| is large
                inv = [0 if not np.isfinite(e) else 1 / e for e in est]
                m = 0.5 * (inv[0] + inv[1])
                g[n0 + k] = np.inf if m == 0 else 1 / m
        # fine vertices keep the chart convention of their own coordinates
        out = GaussField.from_g(fine_mesh, g, self.H, self.degree)
        return out


def _chart_potential(hp, field, order):
    """Evaluate the target-chart potential at every vertex value."""
    y = field.values
    t = field.tchart
    q = hp.evaluate(y, Q_CHART, order)
    h = hp.evaluate(y, H_CHART, order)
    if order == 0:
        return np.where(t == Q_CHART, q, h)
    return tuple(np.where(t == Q_CHART, a, b) for a, b in zip(q, h))


def _coefficients(hp, field, tol=1e-10):
    R, Rq, Rqb = _chart_potential(hp, field, 1)
    bad = np.abs(R) <= tol
    if np.any(bad):
        v = int(np.flatnonzero(bad)[0])
        raise PotentialZeroOnRange(
            f"H-potential vanishes at vertex {v} (g = {field.g()[v]}, H = {hp.H})"
        )
    K1 = Rq / R
    K2 = Rqb / R - np.conj(Rq) / np.conj(R)
    return K1, K2


def pde_residual(group, H, field):
    """Per-vertex complex residual of the Gauss-map PDE in each vertex's charts."""
    hp = group if isinstance(group, HPotential) else HPotential(group, H)
    y, yz, yzb, yzzb = field.derivatives()
    K1, K2 = _coefficients(hp, field)
    return yzzb - K1 * yz * yzb - K2 * yz * np.conj(yz)


def domain_weight(mesh):
    """``(1+|zeta|^2)^2 / 4``: inverse of the round metric density in each chart."""
    return (1 + np.abs(mesh.coord) ** 2) ** 2 / 4


def scaled_residual(field, E):
    """Chart-independent size of the residual ``E`` (round metrics on both spheres)."""
    return 2 * np.abs(E) / (1 + np.abs(field.values) ** 2) * domain_weight(field.mesh)


def residual_and_jacobian(hp, field):
    """Row-scaled residual and its real sparse Jacobian in ``(Re y, Im y)`` per vertex.

    Rows are multiplied by ``domain_weight`` so that both domain charts are
    weighted alike. Returns ``(F, J)`` with ``F`` complex of length ``V`` and
    ``J`` a ``2V x 2V`` CSR matrix (row ``2v`` is ``Re F_v``).
    """
    mesh = field.mesh
    S = field.stencils
    Y, inv = field.gathered()
    a, b, c = S.dz, S.dzb, S.dzzb
    yz = np.sum(a * Y, axis=1)
    yzb = np.sum(b * Y, axis=1)
    yzzb = np.sum(c * Y, axis=1)
    R, Rq, Rqb, Rqq, Rqqb, Rqbqb = _chart_potential(hp, field, 2)
    bad = np.abs(R) <= 1e-10
    if np.any(bad):
        v = int(np.flatnonzero(bad)[0])
        raise PotentialZeroOnRange(f"H-potential vanishes at vertex {v} (g = {field.g()[v]}, H = {hp.H})")
    Rc = np.conj(R)
    K1 = Rq / R
    K2 = Rqb / R - np.conj(Rq) / Rc
    K1y = Rqq / R - (Rq / R) ** 2
    K1yb = Rqqb / R - Rq * Rqb / R**2
    K2y = Rqqb / R - Rqb * Rq / R**2 - (np.conj(Rqqb) / Rc - np.conj(Rq) * np.conj(Rqb) / Rc**2)
    K2yb = Rqbqb / R - (Rqb / R) ** 2 - (np.conj(Rqq) / Rc - (np.conj(Rq) / Rc) ** 2)
    w = domain_weight(mesh)
    F = (yzzb - K1 * yz * yzb - K2 * yz * np.conj(yz)) * w

    FY = c - K1[:, None] * (a * yzb[:, None] + b * yz[:, None]) - (K2 * np.conj(yz))[:, None] * a
    FYb = -(K2 * yz)[:, None] * np.conj(a)
    mod2 = np.abs(yz) ** 2
    FY[:, 0] += -K1y * yz * yzb - K2y * mod2
    FYb[:, 0] += -K1yb * yz * yzb - K2yb * mod2
    # chain rule through neighbours stored in the other target chart
    yj = field.values[S.nbr]
    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.where(inv, -1 / np.where(yj == 0, 1e-300, yj) ** 2, 1.0)
    FY = FY * s * w[:, None]
    FYb = FYb * np.conj(s) * w[:, None]
    FY = np.where(S.mask, FY, 0)
    FYb = np.where(S.mask, FYb, 0)
    J = _realify(FY, FYb, S.nbr, mesh.n_vertices)
    return F, J


def _realify(FY, FYb, nbr, n):
    P = FY + FYb
    M = FY - FYb
    rows = np.repeat(np.arange(n), nbr.shape[1])
    cols = nbr.ravel()
    r = np.concatenate([2 * rows, 2 * rows, 2 * rows + 1, 2 * rows + 1])
    cc = np.concatenate([2 * cols, 2 * cols + 1, 2 * cols, 2 * cols + 1])
    vals = np.concatenate([P.real.ravel(), -M.imag.ravel(), P.imag.ravel(), M.real.ravel()])
    return sp.csr_matrix((vals, (r, cc)), shape=(2 * n, 2 * n))


def mobius_fields(field):
    """Variations ``y_z X + y_zbar conj(X)`` for the six real Moebius generators.

    Returns a complex ``(V, 6)`` array in each vertex's target chart.
    """
    mesh = field.mesh
    _, yz, yzb, _ = field.derivatives()
    x = mesh.coord
    zc = mesh.chart == Z_CHART
    gens = []
    for k in range(3):
        # X = z^k d/dz written in the vertex's chart (w-chart: -w^(2-k))
        X = np.where(zc, x**k, -(x ** (2 - k)))
        gens.append(X)
        gens.append(1j * X)
    B = np.stack([yz * X + yzb * np.conj(X) for X in gens], axis=1)
    return B


# ----------------------------------------------------------------------------
# invariant (one-variable) reduction
# ----------------------------------------------------------------------------

@dataclass
class InvariantCurve:
    t: np.ndarray
    g: np.ndarray
    gy: np.ndarray


def integrate_invariant_ode(group, H, g0, gy0, y_span, step=np.inf, rtol=1e-10, atol=1e-12):
    """Integrate ``g_yy = K1(g) g_y^2 + K2(g) |g_y|^2`` with chart switching.

    The state is carried in the ``q`` chart while ``|g| <= 1`` and in
    ``h = 1/g`` otherwise (where the same equation holds with ``R~``).
    Returns samples at every accepted step.
    """
    hp = group if isinstance(group, HPotential) else HPotential(group, H)
    g0 = complex(g0)
    gy0 = complex(gy0)
    if gy0 == 0:
        raise ValueError("initial derivative must be non-zero")
    t0, t1 = float(y_span[0]), float(y_span[1])
    if abs(g0) <= 1:
        chart, x, xp = Q_CHART, g0, gy0
    else:
        chart, x, xp = H_CHART, 1 / g0, -gy0 / g0**2

    def rhs_factory(ch):
        def rhs(_t, s):
            x = s[0] + 1j * s[1]
            xp = s[2] + 1j * s[3]
            R, Rq, Rqb = hp.evaluate(x, ch, 1)
            if abs(R) <= 1e-12:
                raise PotentialZeroOnRange(f"H-potential vanishes along the curve at chart-{ch} value {x}")
            K1 = Rq / R
            K2 = Rqb / R - np.conj(Rq) / np.conj(R)
            xpp = K1 * xp * xp + K2 * xp * np.conj(xp)
            return [xp.real, xp.imag, xpp.real, xpp.imag]

        return rhs

    def leave(_t, s):
        return s[0] ** 2 + s[1] ** 2 - BAND_HI**2

    leave.terminal = True
    leave.direction = 1

    ts, gs, gys = [], [], []
    t = t0
    direction = 1.0 if t1 >= t0 else -1.0
    guard = 0
    while direction * (t1 - t) > 0:
        guard += 1
        if guard > 10000:
            raise StepFailure("too many chart switches")
        sol = solve_ivp(
            rhs_factory(chart),
            (t, t1),
            [x.real, x.imag, xp.real, xp.imag],
            method="RK45",
            rtol=rtol,
            atol=atol,
            max_step=step,
            events=leave,
        )
        if sol.status == -1:
            raise StepFailure(sol.message)
        X = sol.y[0] + 1j * sol.y[1]
        XP = sol.y[2] + 1j * sol.y[3]
        if chart == Q_CHART:
            G, GY = X, XP
        else:
            G, GY = 1 / X, -XP / X**2
        start = 1 if ts else 0
        ts.extend(sol.t[start:])
        gs.extend(G[start:])
        gys.extend(GY[start:])
        t = sol.t[-1]
        if sol.status == 1:
            x, xp = 1 / X[-1], -XP[-1] / X[-1] ** 2
            chart = 1 - chart
        else:
            break
    return InvariantCurve(np.array(ts), np.array(gs), np.array(gys))
