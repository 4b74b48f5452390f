"""Order-two rotations, symmetry residuals, centres of symmetry, the geodesic
structure of minimal spheres in SU(2) and a triangle self-intersection test."""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np
from scipy.spatial import cKDTree
from scipy.spatial.distance import pdist

from .errors import InvalidAxis, NormalizationMissing, StructureResidualTooLarge
from .mesh import _monomials
from .metric_lie_group import NonUnimodularGroup, derive_constants, qconj, qmul, qnormalize

_AXES = {"gamma1": 0, "gamma2": 1, "gamma3": 2, "e1": 0, "e2": 1, "e3": 2, "z": 2}

# conjugating elements realizing the rotations by pi about Gamma_i
_SU2_UNITS = np.eye(4)[1:]
_SL2_CONJ = [
    np.array([[1.0, 0.0], [0.0, -1.0]]),
    np.array([[0.0, 1.0], [1.0, 0.0]]),
    np.array([[0.0, 1.0], [-1.0, 0.0]]),
]


# ----------------------------------------------------------------------------
# isometries
# ----------------------------------------------------------------------------

@dataclass
class Isometry:
    """``l_a o sigma o l_a^-1`` for an automorphism ``sigma`` with ``d sigma_e = D``."""

    group: object
    kind: str
    axis: str
    base: np.ndarray
    D: np.ndarray
    sigma: object = dc_field(repr=False)

    def __call__(self, p):
        g = self.group
        p = np.asarray(p, dtype=float)
        a = np.broadcast_to(self.base, p.shape)
        return g.multiply(a, self.sigma(g.multiply(g.inverse(a), p)))

    def differential(self, p, X):
        """Push forward of ambient tangent vectors ``X`` at ``p``."""
        g = self.group
        v = g.pull_left(p, X)
        return g.push_left(self(p), v @ self.D.T)

    def conjugated(self, a):
        """The same rotation about the translated axis ``a * axis``."""
        base = self.group.multiply(a, self.base)
        return Isometry(self.group, self.kind, self.axis, base, self.D, self.sigma)


IsometryZ2 = Isometry


def _automorphism(group, i):
    """Automorphism with differential ``diag(+-1)`` fixing ``Gamma_{i+1}``."""
    D = -np.eye(3)
    D[i, i] = 1.0
    kind = group.kind
    if kind == "su2":
        u = _SU2_UNITS[i]

        def sigma(p):
            uu = np.broadcast_to(u, p.shape)
            return qnormalize(qmul(qmul(uu, p), qconj(uu)))

    elif kind == "sl2":
        P = _SL2_CONJ[i]
        Pinv = np.linalg.inv(P)

        def sigma(p):
            M = p.reshape(p.shape[:-1] + (2, 2))
            return (P @ M @ Pinv).reshape(p.shape)

    else:
        if isinstance(group, NonUnimodularGroup) and i != 2:
            raise InvalidAxis("non-unimodular groups only admit the rotation about the z-axis")
        S = np.diag(D)

        def sigma(p):
            return p * S

    return D, sigma


def pi_rotation(group, axis_spec):
    """Rotation by ``pi`` about ``Gamma_i`` or about a left coset ``a * Gamma_i``.

    ``axis_spec`` is ``"Gamma1"``, ``"Gamma2"``, ``"Gamma3"`` (``"z"`` for
    the non-unimodular axis) or a pair ``(name, a)``.
    """
    group = derive_constants(group)
    base = group.identity()
    name = axis_spec
    if isinstance(axis_spec, (tuple, list)):
        name, base = axis_spec
        base = np.asarray(base, dtype=float)
    key = str(name).lower().replace("_", "").replace("γ", "gamma")
    if key not in _AXES:
        raise InvalidAxis(f"unknown axis {name!r}; use Gamma1, Gamma2, Gamma3 or z")
    if key == "z" and not isinstance(group, NonUnimodularGroup):
        key = "gamma3"
    i = _AXES[key]
    D, sigma = _automorphism(group, i)
    return Isometry(group, f"phi{i + 1}", f"Gamma{i + 1}", base, D, sigma)


def e3_rotation(group, theta, base=None):
    """Rotation by ``theta`` about ``base * Gamma3`` (needs ``c1 = c2``)."""
    group = derive_constants(group)
    kind = group.kind
    ok = False
    if isinstance(group, NonUnimodularGroup):
        ok = group.a == 0
    elif abs(group.c[0] - group.c[1]) <= 1e-12 * max(1.0, abs(group.c[0])):
        ok = kind in ("su2", "sl2", "semidirect")
    if not ok:
        raise InvalidAxis("rotations about Gamma3 are isometries only when E1 and E2 are interchangeable")
    c, s = np.cos(theta), np.sin(theta)
    D = np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
    if kind == "su2":
        u = np.array([np.cos(theta / 2), 0.0, 0.0, np.sin(theta / 2)])

        def sigma(p):
            uu = np.broadcast_to(u, p.shape)
            return qnormalize(qmul(qmul(uu, p), qconj(uu)))

    elif kind == "sl2":
        # E3 is a multiple of the rotation generator; conjugate by R(-theta/2)
        P = np.array([[np.cos(theta / 2), -np.sin(theta / 2)], [np.sin(theta / 2), np.cos(theta / 2)]])
        Pinv = P.T

        def sigma(p):
            M = p.reshape(p.shape[:-1] + (2, 2))
            return (P @ M @ Pinv).reshape(p.shape)

        # fix the orientation of the induced rotation numerically
        Dn = np.array([sigma_coords(group, sigma, k) for k in range(3)]).T
        D = Dn
    else:
        R = np.array([[c, -s], [s, c]])

        def sigma(p):
            out = np.array(p, dtype=float)
            out[..., :2] = p[..., :2] @ R.T
            return out

    if base is None:
        base = group.identity()
    return Isometry(group, "rotation", "Gamma3", np.asarray(base, dtype=float), D, sigma)


def sigma_coords(group, sigma, k, eps=1e-6):
    """E-coordinates of ``d sigma_e(E_k)`` by central differences."""
    e = np.zeros(3)
    e[k] = eps
    plus = sigma(group.exp(e))
    minus = sigma(group.exp(-e))
    return group.local_coords(group.multiply(group.inverse(minus), plus)) / (2 * eps)


def antipodal(group):
    """Left translation by ``-I`` on SU(2)."""
    group = derive_constants(group)
    if group.kind != "su2":
        raise InvalidAxis("l_{-I} is defined for SU(2) realizations")
    return Isometry(group, "l_-I", "center", group.identity(), np.eye(3), lambda p: -p)


def isometry_defect(iso, points, eps=1e-6):
    """Max ``|<dphi u, dphi v> - <u, v>|`` over random tangent frames, by central differences."""
    g = iso.group
    p = np.asarray(points, dtype=float)
    cols = []
    for k in range(3):
        v = np.zeros(p.shape[:-1] + (3,))
        v[..., k] = eps
        a = iso(g.multiply(p, g.exp(v)))
        b = iso(g.multiply(p, g.exp(-v)))
        cols.append(g.local_coords(g.multiply(g.inverse(b), a)) / (2 * eps))
    # columns are E-coordinates (at the image) of d phi(E_k)
    Jm = np.stack(cols, axis=-1)
    G = np.einsum("...ik,...il->...kl", Jm, Jm)
    return float(np.max(np.abs(G - np.eye(3))))


# ----------------------------------------------------------------------------
# smooth surface distance
# ----------------------------------------------------------------------------

class SmoothSurface:
    """Local cubic MLS patches of an immersed mesh, queried by closest point.

    Each vertex carries the ambient fit ``X(v + d) = X_v + sum_k c_k m_k(d)``
    over its 2-ring, so distances do not see the chordal sag of the triangles.
    """

    def __init__(self, immersion, degree=3):
        self.immersion = immersion
        self.mesh = immersion.mesh
        self.points = immersion.group.embed(immersion.positions)
        S = self.mesh.stencils(degree)
        self.degree = degree
        self.stencils = S
        Xn = self.points[S.nbr] - self.points[:, None, :]
        Xn = np.where(S.mask[..., None], Xn, 0.0)
        self.coef = np.einsum("vmk,vkd->vmd", S.coeffs, Xn)  # (V, m, d)
        self.tree = cKDTree(self.points)

    def _patch(self, v, d):
        M = _monomials(d.real, d.imag, self.degree)  # (N, m)
        return self.points[v] + np.einsum("nm,nmd->nd", M, self.coef[v])

    def _jac(self, v, d, h=1e-7):
        return (
            (self._patch(v, d + h) - self._patch(v, d - h)) / (2 * h),
            (self._patch(v, d + 1j * h) - self._patch(v, d - 1j * h)) / (2 * h),
        )

    def distance(self, Y, k=3, iters=8):
        """Distance from each query point to the union of nearby patches."""
        Y = np.asarray(Y, dtype=float)
        _, idx = self.tree.query(Y, k=k)
        idx = np.asarray(idx).reshape(len(Y), -1)
        best = np.full(len(Y), np.inf)
        for col in range(idx.shape[1]):
            v = idx[:, col]
            d = np.zeros(len(Y), dtype=complex)
            for _ in range(iters):
                r = self._patch(v, d) - Y
                Jx, Jy = self._jac(v, d)
                a11 = np.sum(Jx * Jx, 1)
                a12 = np.sum(Jx * Jy, 1)
                a22 = np.sum(Jy * Jy, 1)
                b1 = -np.sum(Jx * r, 1)
                b2 = -np.sum(Jy * r, 1)
                det = a11 * a22 - a12**2
                dx = (a22 * b1 - a12 * b2) / det
                dy = (a11 * b2 - a12 * b1) / det
                d = d + dx + 1j * dy
            dist = np.linalg.norm(self._patch(v, d) - Y, axis=1)
            # keep the projection inside the fitted neighbourhood
            radius = np.max(np.abs(self.stencils.offsets[v]), axis=1)
            dist = np.where(np.abs(d) <= 1.5 * radius, dist, np.inf)
            best = np.minimum(best, dist)
        fallback = ~np.isfinite(best)
        if np.any(fallback):
            best[fallback] = self.tree.query(Y[fallback])[0]
        return best


def chordal_diameter(points, max_points=3000):
    P = np.asarray(points, dtype=float)
    if len(P) > max_points:
        P = P[np.linspace(0, len(P) - 1, max_points).astype(int)]
    return float(pdist(P).max())


def symmetry_residual(immersion, isometries, surface=None):
    """Max one-sided distance of isometric images of the vertices to the surface, over the diameter."""
    if surface is None:
        surface = SmoothSurface(immersion)
    g = immersion.group
    diam = chordal_diameter(surface.points)
    worst = 0.0
    for iso in isometries:
        Y = g.embed(iso(immersion.positions))
        worst = max(worst, float(surface.distance(Y).max()))
    return worst / diam


# ----------------------------------------------------------------------------
# centre of symmetry
# ----------------------------------------------------------------------------

def _gamma3_parameter(group, p):
    """Angle-like parameter of ``p`` on ``Gamma3`` and its distance from the axis."""
    kind = group.kind
    if kind == "su2":
        a3 = group.alpha[2]
        return np.arctan2(p[3], p[0]) / a3, float(np.hypot(p[1], p[2]))
    if kind == "sl2":
        X = group.local_coords(p)
        M = p.reshape(2, 2)
        # rotation angle of the unitary polar factor
        th = np.arctan2(M[1, 0] - M[0, 1], M[0, 0] + M[1, 1])
        return 2 * th / group.alpha[2], float(np.hypot(X[0], X[1]))
    return float(p[2]), float(np.hypot(p[0], p[1]))


def _gamma3_point(group, t):
    return group.exp(np.array([0.0, 0.0, t]))


def _check_normalized(imm, tol=1e-9):
    g = imm.group
    m = imm.mesh
    f = imm.field
    if f.tchart[m.north] != 0 or abs(f.values[m.north]) > tol or f.tchart[m.south] != 1 or abs(f.values[m.south]) > tol:
        raise NormalizationMissing("Gauss map is not pinned to E3 at the north vertex and -E3 at the south vertex")
    if np.linalg.norm(imm.positions[m.north] - g.identity()) > tol:
        raise NormalizationMissing("immersion does not map the E3-normal vertex to the identity")


def family_parameters(group, family):
    """``(H, t, off_axis)`` along a family, with ``t`` continued without jumps."""
    group = derive_constants(group)
    Hs, ts, offs = [], [], []
    for H, _field, imm in family:
        if imm is None:
            raise NormalizationMissing("family entries need reconstructed immersions")
        _check_normalized(imm)
        t, off = _gamma3_parameter(group, imm.positions[imm.mesh.south])
        Hs.append(float(H))
        ts.append(float(t))
        offs.append(off)
    ts = np.array(ts)
    if group.kind in ("su2", "sl2"):
        period = 2 * np.pi / (group.alpha[2] if group.kind == "su2" else group.alpha[2] / 2)
        ts = np.unwrap(ts, period=period)
        # start the family on the short arc (small spheres near the identity)
        ts -= period * np.round(ts[0] / period)
    return np.array(Hs), ts, np.array(offs)


def center_of_symmetry(group, family, H):
    """The midpoint ``Gamma3(t(H)/2)`` of the arc from ``e`` to ``f_H(q*_H)``.

    ``family`` is a list of ``(H, field, immersion)`` in continuation order;
    ``t`` is continued along it, so the centre moves continuously through
    ``H = 0``. Values between recorded ``H`` are linearly interpolated.
    """
    group = derive_constants(group)
    Hs, ts, _ = family_parameters(group, family)
    if not (min(Hs) - 1e-12 <= H <= max(Hs) + 1e-12):
        raise ValueError(f"H={H} outside the family range [{min(Hs)}, {max(Hs)}]")
    order = np.argsort(Hs)
    t = float(np.interp(H, Hs[order], ts[order]))
    return _gamma3_point(group, 0.5 * t), t


def refined_center(group, immersion, t_hint):
    """Centre from one normalized immersion, on the branch of ``t`` nearest ``t_hint``.

    ``t_hint`` usually comes from :func:`center_of_symmetry` on a coarser family.
    """
    group = derive_constants(group)
    _check_normalized(immersion)
    t, _ = _gamma3_parameter(group, immersion.positions[immersion.mesh.south])
    if group.kind in ("su2", "sl2"):
        period = 2 * np.pi / (group.alpha[2] if group.kind == "su2" else group.alpha[2] / 2)
        t += period * np.round((t_hint - t) / period)
    return _gamma3_point(group, 0.5 * t), float(t)


def isotropy_isometries(group, center, n_rotations=16, rng=None):
    """Sampled isometries fixing ``center`` that preserve every sphere of the family."""
    group = derive_constants(group)
    out = []
    if isinstance(group, NonUnimodularGroup):
        out.append(pi_rotation(group, ("z", center)))
        if group.a == 0:
            out += [e3_rotation(group, th, center) for th in 2 * np.pi * np.arange(1, n_rotations) / n_rotations]
        return out
    for name in ("Gamma1", "Gamma2", "Gamma3"):
        out.append(pi_rotation(group, (name, center)))
    c1, c2, _ = group.c
    if abs(c1 - c2) <= 1e-12 * max(1.0, abs(c1)):
        out += [e3_rotation(group, th, center) for th in 2 * np.pi * np.arange(1, n_rotations) / n_rotations]
    return out


def rotation_samples(group, center, n=16):
    """``n`` rotations about the ``E3`` axis through ``center`` (angles ``2 pi k / n``, ``k >= 1``)."""
    return [e3_rotation(group, 2 * np.pi * k / (n + 1), center) for k in range(1, n + 1)]


# ----------------------------------------------------------------------------
# minimal spheres in SU(2)
# ----------------------------------------------------------------------------

@dataclass
class MinimalSphereStructure:
    points: dict  # "P1", "P1*", ... located on the sphere (centre moved to I)
    oracle: dict  # exp((pi/2) e_i) and their antipodes
    point_errors: dict
    geodesics: list  # sampled alpha_i as (N, 4) arrays
    containment: np.ndarray  # max distance of each alpha_i to the sphere
    rotations: list  # psi_1, psi_2, psi_3
    composition_residual: float
    antipodal_residual: float

    def to_dict(self):
        return {
            "points": {k: [float(x) for x in v] for k, v in self.points.items()},
            "point_errors": {k: float(v) for k, v in self.point_errors.items()},
            "containment": [float(x) for x in self.containment],
            "composition_residual": self.composition_residual,
            "antipodal_residual": self.antipodal_residual,
        }


def locate_gauss_value(immersion, target):
    """Point of the surface whose left-invariant normal equals the unit vector ``target``.

    The Gauss map is a diffeomorphism, so the target lies in exactly one
    image triangle; positions are interpolated barycentrically there.
    """
    g = immersion.group
    F = immersion.mesh.triangles
    N = immersion.normals_e
    target = np.asarray(target, dtype=float)
    a, b, c = N[F[:, 0]], N[F[:, 1]], N[F[:, 2]]
    near = np.flatnonzero(np.einsum("ij,j->i", a + b + c, target) > 0)
    T = np.stack([a[near], b[near], c[near]], axis=-1)  # (n, 3, 3)
    lam = np.linalg.solve(T, np.broadcast_to(target, (len(near), 3))[..., None])[..., 0]
    inside = np.all(lam >= -1e-12, axis=1)
    if not np.any(inside):
        raise StructureResidualTooLarge(f"Gauss value {target} not found in the image")
    k = np.flatnonzero(inside)[0]
    w = lam[k] / lam[k].sum()
    tri = F[near[k]]
    P = g.embed(immersion.positions[tri])
    return g.normalize(w @ P)


def minimal_sphere_structure(group, S0, tol_points=1e-2, tol_composition=1e-10, tol_geodesic=None, samples=64):
    """Geodesics, order-four points and rotations of the minimal sphere in SU(2).

    ``S0`` is the solved ``H = 0`` sphere with ``f(north) = e``; it is
    translated so that its centre is ``I``.
    """
    group = derive_constants(group)
    if group.kind != "su2":
        raise InvalidAxis("the minimal-sphere structure is defined for SU(2) groups")
    _check_normalized(S0)
    t, _ = _gamma3_parameter(group, S0.positions[S0.mesh.south])
    center = _gamma3_point(group, 0.5 * t)
    S = S0.translated(group.inverse(center))
    # unit normals +-E_i located by Gauss-value interpolation
    located, oracle, errors = {}, {}, {}
    for i in range(3):
        e = np.zeros(3)
        e[i] = 1.0
        p_plus = locate_gauss_value(S, e)
        p_minus = locate_gauss_value(S, -e)
        q = _SU2_UNITS[i]
        # name the point closer to +q as P_i
        if np.linalg.norm(p_plus - q) > np.linalg.norm(p_minus - q):
            p_plus, p_minus = p_minus, p_plus
        located[f"P{i + 1}"] = p_plus
        located[f"P{i + 1}*"] = p_minus
        oracle[f"P{i + 1}"] = q
        oracle[f"P{i + 1}*"] = -q
        errors[f"P{i + 1}"] = float(np.linalg.norm(p_plus - q))
        errors[f"P{i + 1}*"] = float(np.linalg.norm(p_minus + q))
    if max(errors.values()) > tol_points:
        raise StructureResidualTooLarge(f"located points miss exp((pi/2) e_i) by {max(errors.values()):.3e}")
    # alpha_1 = P2 Gamma1, alpha_2 = P3 Gamma2, alpha_3 = P1 Gamma3
    Pexact = [oracle["P1"], oracle["P2"], oracle["P3"]]
    bases = [Pexact[1], Pexact[2], Pexact[0]]
    surface = SmoothSurface(S)
    geodesics, containment = [], []
    for i in range(3):
        per = np.pi / group.alpha[i]
        ts = np.linspace(0, 2 * per, samples, endpoint=False)
        v = np.zeros((samples, 3))
        v[:, i] = ts
        curve = qmul(np.broadcast_to(bases[i], (samples, 4)), group.exp(v))
        geodesics.append(curve)
        containment.append(float(surface.distance(curve).max()))
    containment = np.array(containment)
    if tol_geodesic is not None and containment.max() > tol_geodesic:
        raise StructureResidualTooLarge(f"geodesics leave the sphere by {containment.max():.3e}")
    psi = [pi_rotation(group, (f"Gamma{i + 1}", bases[i])) for i in range(3)]
    test = np.stack([group.identity(), *Pexact])
    comp = psi[0](psi[1](psi[2](test)))
    composition = float(np.max(np.abs(comp + test)))
    if composition > tol_composition:
        raise StructureResidualTooLarge(f"psi1 psi2 psi3 differs from l_-I by {composition:.3e}")
    anti = symmetry_residual(S, [antipodal(group)], surface)
    return MinimalSphereStructure(located, oracle, errors, geodesics, containment, psi, composition, anti)


# ----------------------------------------------------------------------------
# embeddedness
# ----------------------------------------------------------------------------

def stereographic_3d(points4, pole):
    """Stereographic projection of unit quaternions from ``pole`` into R^3."""
    P = np.asarray(points4, dtype=float)
    pole = np.asarray(pole, dtype=float) / np.linalg.norm(pole)
    # orthonormal frame of the hyperplane orthogonal to the pole
    Q, _ = np.linalg.qr(np.column_stack([pole, np.eye(4)[:, :3]]))
    basis = Q[:, 1:4]
    s = P @ pole
    if np.any(1 - s < 1e-9):
        raise ValueError("a vertex coincides with the projection pole")
    return (P @ basis) / (1 - s)[:, None]


def _segment_hits(p0, p1, a, b, c, eps=1e-12):
    """Whether segments ``p0 p1`` cross triangles ``abc`` (vectorized, non-coplanar)."""
    e1 = b - a
    e2 = c - a
    d = p1 - p0
    h = np.cross(d, e2)
    det = np.einsum("ij,ij->i", e1, h)
    ok = np.abs(det) > eps * (np.linalg.norm(e1, axis=1) * np.linalg.norm(e2, axis=1) * np.linalg.norm(d, axis=1) + 1e-300)
    inv = np.where(ok, 1 / np.where(ok, det, 1), 0)
    s = p0 - a
    u = inv * np.einsum("ij,ij->i", s, h)
    q = np.cross(s, e1)
    v = inv * np.einsum("ij,ij->i", d, q)
    t = inv * np.einsum("ij,ij->i", e2, q)
    return ok & (u >= 0) & (v >= 0) & (u + v <= 1) & (t >= 0) & (t <= 1)


def triangles_intersect(V, F, pairs):
    """Boolean per candidate pair: do the two triangles intersect."""
    A = F[pairs[:, 0]]
    B = F[pairs[:, 1]]
    hit = np.zeros(len(pairs), dtype=bool)
    for X, Y in ((A, B), (B, A)):
        a, b, c = V[Y[:, 0]], V[Y[:, 1]], V[Y[:, 2]]
        for k in range(3):
            hit |= _segment_hits(V[X[:, k]], V[X[:, (k + 1) % 3]], a, b, c)
    return hit


def _ambient_3d(immersion, pole=None):
    g = immersion.group
    P = g.embed(immersion.positions)
    if g.kind == "su2":
        if pole is None:
            # antipode of the vertex mean: as far from the surface as possible
            m = P.mean(axis=0)
            pole = -m / np.linalg.norm(m) if np.linalg.norm(m) > 1e-9 else -P[0]
            d = P @ pole
            if d.max() > 0.99:
                pole = -P[np.argmax(P @ -pole)]
        return stereographic_3d(P, pole)
    if g.kind == "sl2":
        # polar decomposition R(theta) exp(S) mapped into a solid torus in R^3
        M = P.reshape(-1, 2, 2)
        th = np.arctan2(M[:, 1, 0] - M[:, 0, 1], M[:, 0, 0] + M[:, 1, 1])
        X = g.local_coords(P)
        r = 3 + np.tanh(X[:, 0])
        return np.column_stack([r * np.cos(th), r * np.sin(th), np.tanh(X[:, 1])])
    return P


def embeddedness_check(immersion=None, vertices=None, triangles=None):
    """``(embedded, first_collision)`` by pairwise triangle tests.

    SU(2) surfaces are stereographically projected to R^3 from a point far
    from them (a diffeomorphism onto the image). Triangles sharing a vertex
    are not tested against each other.
    """
    if immersion is not None:
        V = _ambient_3d(immersion)
        F = immersion.mesh.triangles
    else:
        V = np.asarray(vertices, dtype=float)
        F = np.asarray(triangles, dtype=np.int64)
    C = V[F].mean(axis=1)
    R = np.max(np.linalg.norm(V[F] - C[:, None, :], axis=2), axis=1)
    tree = cKDTree(C)
    pairs = tree.query_pairs(2 * R.max(), output_type="ndarray")
    if len(pairs) == 0:
        return True, None
    d = np.linalg.norm(C[pairs[:, 0]] - C[pairs[:, 1]], axis=1)
    pairs = pairs[d <= R[pairs[:, 0]] + R[pairs[:, 1]]]
    share = np.zeros(len(pairs), dtype=bool)
    for i in range(3):
        for j in range(3):
            share |= F[pairs[:, 0], i] == F[pairs[:, 1], j]
    pairs = pairs[~share]
    if len(pairs) == 0:
        return True, None
    hit = triangles_intersect(V, F, pairs)
    if np.any(hit):
        k = np.flatnonzero(hit)[0]
        return False, (int(pairs[k, 0]), int(pairs[k, 1]))
    return True, None


def spindle_torus(R=1.0, r=1.5, nu=48, nv=24):
    """A torus of revolution with ``r > R``; it passes through itself along the axis."""
    u = np.linspace(0, 2 * np.pi, nu, endpoint=False)
    v = np.linspace(0, 2 * np.pi, nv, endpoint=False) + 0.5 * np.pi / nv
    U, Vv = np.meshgrid(u, v, indexing="ij")
    X = np.stack([(R + r * np.cos(Vv)) * np.cos(U), (R + r * np.cos(Vv)) * np.sin(U), r * np.sin(Vv)], axis=-1).reshape(-1, 3)
    idx = np.arange(nu * nv).reshape(nu, nv)
    F = []
    for i in range(nu):
        for j in range(nv):
            a, b = idx[i, j], idx[(i + 1) % nu, j]
            c, d = idx[(i + 1) % nu, (j + 1) % nv], idx[i, (j + 1) % nv]
            F += [(a, b, c), (a, c, d)]
    return X, np.array(F)
