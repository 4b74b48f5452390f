"""Simply connected three-dimensional metric Lie groups.

Every group is described by the brackets of a left-invariant orthonormal
frame ``E1, E2, E3``; the Levi-Civita connection and the Ricci tensor are
derived from that table by the Koszul formula, so unimodular and
non-unimodular groups share one code path.

Group elements are plain numpy arrays whose last axis holds the
coordinates of the realization:

* ``SU(2)``        unit quaternions ``(w, x, y, z)``
* ``SL~(2,R)``     2x2 matrices of determinant one, flattened row-major
                   (the universal cover is only needed globally; immersions
                   of simply connected domains are computed in SL(2,R))
* semidirect       ``(x, y, z)`` coordinates of ``R^2 x_A R``

Tangent vectors at the identity are always given by their coordinates in
the frame ``E1, E2, E3``; the metric at ``e`` is Euclidean in those.
"""
from __future__ import annotations

import math
from functools import cached_property

import numpy as np
from scipy.linalg import expm

from .errors import GroupSpecError

_EPS_EQUAL = 1e-12


# ----------------------------------------------------------------------------
# quaternion helpers (last axis = (w, x, y, z))
# ----------------------------------------------------------------------------

def qmul(p, q):
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    pw, px, py, pz = np.moveaxis(p, -1, 0)
    qw, qx, qy, qz = np.moveaxis(q, -1, 0)
    return np.stack(
        [
            pw * qw - px * qx - py * qy - pz * qz,
            pw * qx + px * qw + py * qz - pz * qy,
            pw * qy - px * qz + py * qw + pz * qx,
            pw * qz + px * qy - py * qx + pz * qw,
        ],
        axis=-1,
    )


def qconj(q):
    q = np.asarray(q, dtype=float)
    return q * np.array([1.0, -1.0, -1.0, -1.0])


def qnormalize(q):
    q = np.asarray(q, dtype=float)
    return q / np.linalg.norm(q, axis=-1, keepdims=True)


def _pure(u):
    u = np.asarray(u, dtype=float)
    return np.concatenate([np.zeros(u.shape[:-1] + (1,)), u], axis=-1)


def expm2(B):
    """Closed-form exponential of (a stack of) real 2x2 matrices.

    Uses ``B = s I + N`` with ``N`` traceless, ``N^2 = delta I``; the
    hyperbolic/trigonometric branches are joined by a series for small
    ``delta`` so the result is smooth across defective matrices.
    """
    B = np.asarray(B, dtype=float)
    s = 0.5 * (B[..., 0, 0] + B[..., 1, 1])
    N = B - s[..., None, None] * np.eye(2)
    delta = N[..., 0, 0] ** 2 + N[..., 0, 1] * N[..., 1, 0]
    C, S = _cosh_sinhc(delta)
    out = C[..., None, None] * np.eye(2) + S[..., None, None] * N
    return np.exp(s)[..., None, None] * out


def _cosh_sinhc(x):
    """Return cosh(sqrt(x)) and sinh(sqrt(x))/sqrt(x) for real x of any sign."""
    x = np.asarray(x, dtype=float)
    C = np.empty_like(x)
    S = np.empty_like(x)
    small = np.abs(x) < 1e-4
    xs = x[small]
    # series to x^4 is exact to ~1e-22 here
    C[small] = 1 + xs / 2 + xs**2 / 24 + xs**3 / 720 + xs**4 / 40320
    S[small] = 1 + xs / 6 + xs**2 / 120 + xs**3 / 5040 + xs**4 / 362880
    pos = (~small) & (x > 0)
    r = np.sqrt(x[pos])
    C[pos] = np.cosh(r)
    S[pos] = np.sinh(r) / r
    neg = (~small) & (x < 0)
    r = np.sqrt(-x[neg])
    C[neg] = np.cos(r)
    S[neg] = np.sin(r) / r
    return C, S


# ----------------------------------------------------------------------------
# groups
# ----------------------------------------------------------------------------

class MetricLieGroup:
    """Common geometry for a left-invariant orthonormal frame."""

    kind = "abstract"

    @property
    def structure(self):
        """``C[i, j, k] = <[E_i, E_j], E_k>``."""
        raise NotImplementedError

    @cached_property
    def connection(self):
        """``G[i, j, k]`` with ``nabla_{E_i} E_j = sum_k G[i, j, k] E_k``."""
        C = self.structure
        # Koszul formula for a left-invariant orthonormal frame
        return 0.5 * (C - np.einsum("jki->ijk", C) + np.einsum("kij->ijk", C))

    @cached_property
    def curvature(self):
        """``Rm[i, j, k, m]``: component on E_m of R(E_i, E_j) E_k."""
        G = self.connection
        C = self.structure
        return (
            np.einsum("jkl,ilm->ijkm", G, G)
            - np.einsum("ikl,jlm->ijkm", G, G)
            - np.einsum("ijl,lkm->ijkm", C, G)
        )

    @cached_property
    def ricci(self):
        """Symmetric Ricci tensor in the frame E1, E2, E3."""
        return np.einsum("ijki->jk", self.curvature)

    def ricci_quadratic(self, n):
        n = np.asarray(n, dtype=float)
        return np.einsum("...i,ij,...j->...", n, self.ricci, n)

    def bracket(self, u, v):
        return np.einsum("ijk,...i,...j->...k", self.structure, u, v)

    @staticmethod
    def cross(u, v):
        return np.cross(u, v)

    # realization hooks ----------------------------------------------------
    ambient_dim = 3

    def identity(self):
        raise NotImplementedError

    def multiply(self, p, q):
        raise NotImplementedError

    def inverse(self, p):
        raise NotImplementedError

    def exp(self, v):
        """Group exponential of Lie algebra vectors given in E-coordinates."""
        raise NotImplementedError

    def exp_one_param(self, v, t):
        """Point ``Gamma_v(t)`` of the one-parameter subgroup through ``e``."""
        v = np.asarray(v, dtype=float)
        t = np.asarray(t, dtype=float)
        return self.exp(t[..., None] * v)

    def adjoint_inverse(self, p, v):
        """``Ad_{p^-1} v`` in E-coordinates."""
        raise NotImplementedError

    def push_left(self, p, v):
        """Ambient coordinates of ``(dl_p)_e v``."""
        raise NotImplementedError

    def local_coords(self, p):
        """First-order normal coordinates of ``p`` near ``e``."""
        raise NotImplementedError

    def embed(self, p):
        """Ambient Euclidean coordinates used for meshes and distances."""
        return np.asarray(p, dtype=float)

    def normalize(self, p):
        return np.asarray(p, dtype=float)

    def right_invariant_field(self, i, x):
        """Ambient coordinates of ``F_i(x) = (dr_x)_e E_i``."""
        e_i = np.zeros(3)
        e_i[i] = 1.0
        x = np.asarray(x, dtype=float)
        v = self.adjoint_inverse(x, np.broadcast_to(e_i, x.shape[:-1] + (3,)))
        return self.push_left(x, v)

    def inner(self, p, X, Y):
        """Left-invariant inner product of ambient tangent vectors at ``p``."""
        a = self.pull_left(p, X)
        b = self.pull_left(p, Y)
        return np.sum(a * b, axis=-1)

    def pull_left(self, p, X):
        """E-coordinates of ``(dl_{p^-1})_p X`` for an ambient tangent ``X``."""
        raise NotImplementedError

    def distance_local(self, p, q):
        """Length of the normal coordinates of ``p^-1 q`` (exact to first order)."""
        return np.linalg.norm(self.local_coords(self.multiply(self.inverse(p), q)), axis=-1)


class UnimodularGroup(MetricLieGroup):
    """Unimodular group with canonical structure constants ``(c1, c2, c3)``.

    Input constants are permuted into a canonical ordering (positive first,
    then the negative one, zeros last; for two equal positive constants
    the distinct one goes to ``c3``). ``permutation[k]`` is the input index
    that became ``c_{k+1}``.
    """

    def __init__(self, c1, c2, c3):
        given = np.array([c1, c2, c3], dtype=float)
        if not np.all(np.isfinite(given)):
            raise GroupSpecError("structure constants must be finite")
        if np.sum(given < 0) > 1:
            raise GroupSpecError(
                "at most one structure constant c_i may be negative; got "
                f"{tuple(given.tolist())}"
            )
        perm = _canonical_order(given)
        self.given = tuple(given.tolist())
        self.permutation = perm
        self.c = tuple(float(given[k]) for k in perm)
        c1, c2, c3 = self.c
        self.mu = (0.5 * (-c1 + c2 + c3), 0.5 * (c1 - c2 + c3), 0.5 * (c1 + c2 - c3))
        m1, m2, m3 = self.mu
        self.ricci_eigenvalues = (2 * m2 * m3, 2 * m1 * m3, 2 * m1 * m2)
        self._realization = _make_unimodular_realization(self.c)
        self.kind = self._realization.kind
        self.ambient_dim = self._realization.ambient_dim

    def __repr__(self):
        return f"UnimodularGroup(c={self.c})"

    @cached_property
    def structure(self):
        c1, c2, c3 = self.c
        C = np.zeros((3, 3, 3))
        C[1, 2, 0], C[2, 1, 0] = c1, -c1
        C[2, 0, 1], C[0, 2, 1] = c2, -c2
        C[0, 1, 2], C[1, 0, 2] = c3, -c3
        return C

    @property
    def is_su2(self):
        return self.kind == "su2"

    # realization delegation
    def identity(self):
        return self._realization.identity()

    def multiply(self, p, q):
        return self._realization.multiply(p, q)

    def inverse(self, p):
        return self._realization.inverse(p)

    def exp(self, v):
        return self._realization.exp(v)

    def adjoint_inverse(self, p, v):
        return self._realization.adjoint_inverse(p, v)

    def push_left(self, p, v):
        return self._realization.push_left(p, v)

    def pull_left(self, p, X):
        return self._realization.pull_left(p, X)

    def local_coords(self, p):
        return self._realization.local_coords(p)

    def normalize(self, p):
        return self._realization.normalize(p)

    def log(self, p):
        if not hasattr(self._realization, "log"):
            raise NotImplementedError(f"no closed-form logarithm for {self.kind} realizations")
        return self._realization.log(p)

    def conjugate(self, a, p):
        """Inner automorphism ``p -> a p a^-1``."""
        return self.multiply(self.multiply(a, p), self.inverse(a))

    @property
    def alpha(self):
        return getattr(self._realization, "alpha", None)

    @property
    def A(self):
        """Matrix of the semidirect realization (``None`` for SU(2), SL(2, R))."""
        return getattr(self._realization, "A", None)


class NonUnimodularGroup(MetricLieGroup):
    """Semidirect product ``R^2 x_A R`` with ``A = A(a, b)``, trace 2."""

    kind = "semidirect"
    ambient_dim = 3

    def __init__(self, a, b):
        a = float(a)
        b = float(b)
        if not (np.isfinite(a) and np.isfinite(b)):
            raise GroupSpecError("a and b must be finite")
        if a < 0 or b < 0:
            raise GroupSpecError(f"non-unimodular parameters need a, b >= 0; got a={a}, b={b}")
        self.a = a
        self.b = b
        self.A = np.array([[1 + a, -(1 - a) * b], [(1 + a) * b, 1 - a]])
        self.D = (1 - a * a) * (1 + b * b)
        self._realization = _Semidirect(self.A)

    def __repr__(self):
        return f"NonUnimodularGroup(a={self.a}, b={self.b})"

    @cached_property
    def structure(self):
        return _semidirect_structure(self.A)

    @property
    def ricci_eigenvalues(self):
        return tuple(np.linalg.eigvalsh(self.ricci).tolist())

    def identity(self):
        return self._realization.identity()

    def multiply(self, p, q):
        return self._realization.multiply(p, q)

    def inverse(self, p):
        return self._realization.inverse(p)

    def exp(self, v):
        return self._realization.exp(v)

    def adjoint_inverse(self, p, v):
        return self._realization.adjoint_inverse(p, v)

    def push_left(self, p, v):
        return self._realization.push_left(p, v)

    def pull_left(self, p, X):
        return self._realization.pull_left(p, X)

    def local_coords(self, p):
        return self._realization.local_coords(p)

    def metric_at(self, point):
        return self._realization.metric_at(point)


def _semidirect_structure(A):
    C = np.zeros((3, 3, 3))
    # [E3, E1] = A11 E1 + A21 E2 ; [E3, E2] = A12 E1 + A22 E2
    C[2, 0, 0], C[2, 0, 1] = A[0, 0], A[1, 0]
    C[2, 1, 0], C[2, 1, 1] = A[0, 1], A[1, 1]
    C[0, 2] = -C[2, 0]
    C[1, 2] = -C[2, 1]
    return C


def _canonical_order(c):
    pos = [k for k in range(3) if c[k] > 0]
    neg = [k for k in range(3) if c[k] < 0]
    zero = [k for k in range(3) if c[k] == 0]
    if len(pos) == 3:
        vals = c
        same = [
            (i, j) for i, j in ((0, 1), (1, 2), (2, 0)) if abs(vals[i] - vals[j]) <= _EPS_EQUAL * max(1, abs(vals[i]))
        ]
        if len(same) == 1:
            i, j = same[0]
            k = 3 - i - j
            # cyclic shift bringing the distinct constant to the last slot
            return ((k + 1) % 3, (k + 2) % 3, k)
        return (0, 1, 2)
    order = tuple(pos + neg + zero)
    return order


def _make_unimodular_realization(c):
    c1, c2, c3 = c
    if c1 > 0 and c2 > 0 and c3 > 0:
        return _SU2(c)
    if c1 > 0 and c2 > 0 and c3 < 0:
        return _SL2(c)
    if c3 == 0:
        return _Semidirect(np.array([[0.0, -c1], [c2, 0.0]]))
    raise GroupSpecError(f"no realization for structure constants {c}")  # pragma: no cover


# ----------------------------------------------------------------------------
# realizations
# ----------------------------------------------------------------------------

class _SU2:
    kind = "su2"
    ambient_dim = 4

    def __init__(self, c):
        c1, c2, c3 = c
        # E_i = alpha_i * (i, j, k) gives [E2, E3] = c1 E1 etc.
        self.alpha = np.array([math.sqrt(c2 * c3), math.sqrt(c1 * c3), math.sqrt(c1 * c2)]) / 2

    def identity(self):
        return np.array([1.0, 0.0, 0.0, 0.0])

    def normalize(self, p):
        return qnormalize(p)

    def multiply(self, p, q):
        return qnormalize(qmul(p, q))

    def inverse(self, p):
        return qconj(p)

    def exp(self, v):
        u = np.asarray(v, dtype=float) * self.alpha
        th = np.linalg.norm(u, axis=-1)
        sinc = np.where(th > 1e-8, np.sin(th) / np.where(th > 1e-8, th, 1.0), 1 - th**2 / 6)
        return np.concatenate([np.cos(th)[..., None], sinc[..., None] * u], axis=-1)

    def log(self, p):
        p = np.asarray(p, dtype=float)
        im = p[..., 1:]
        s = np.linalg.norm(im, axis=-1)
        th = np.arctan2(s, p[..., 0])
        fac = np.where(s > 1e-12, th / np.where(s > 1e-12, s, 1.0), 1.0)
        return fac[..., None] * im / self.alpha

    def local_coords(self, p):
        return self.log(p)

    def adjoint_inverse(self, p, v):
        u = _pure(np.asarray(v, dtype=float) * self.alpha)
        w = qmul(qmul(qconj(p), u), p)
        return w[..., 1:] / self.alpha

    def push_left(self, p, v):
        return qmul(p, _pure(np.asarray(v, dtype=float) * self.alpha))

    def pull_left(self, p, X):
        w = qmul(qconj(p), X)
        return w[..., 1:] / self.alpha


class _SL2:
    kind = "sl2"
    ambient_dim = 4

    def __init__(self, c):
        c1, c2, c3 = c
        n3 = -c3
        self.alpha = np.array([math.sqrt(c2 * n3), math.sqrt(c1 * n3), math.sqrt(c1 * c2)])
        a = np.array([[0.5, 0.0], [0.0, -0.5]])
        b = np.array([[0.0, 0.5], [0.5, 0.0]])
        cc = np.array([[0.0, 0.5], [-0.5, 0.0]])
        # E1 = alpha1 a, E2 = alpha2 b, E3 = -alpha3 c realizes (+, +, -)
        self.basis = np.stack([self.alpha[0] * a, self.alpha[1] * b, -self.alpha[2] * cc])
        self._dual = np.linalg.pinv(self.basis.reshape(3, 4))

    def identity(self):
        return np.eye(2).ravel()

    def _m(self, p):
        p = np.asarray(p, dtype=float)
        return p.reshape(p.shape[:-1] + (2, 2))

    def normalize(self, p):
        M = self._m(p)
        d = np.linalg.det(M)
        return (M / np.sqrt(d)[..., None, None]).reshape(M.shape[:-2] + (4,))

    def multiply(self, p, q):
        return self.normalize((self._m(p) @ self._m(q)).reshape(np.broadcast_shapes(np.shape(p), np.shape(q))))

    def inverse(self, p):
        M = self._m(p)
        inv = np.stack(
            [
                np.stack([M[..., 1, 1], -M[..., 0, 1]], axis=-1),
                np.stack([-M[..., 1, 0], M[..., 0, 0]], axis=-1),
            ],
            axis=-2,
        )
        return inv.reshape(M.shape[:-2] + (4,))

    def _alg(self, v):
        return np.einsum("...i,ijk->...jk", np.asarray(v, dtype=float), self.basis)

    def _coords(self, X):
        X = np.asarray(X, dtype=float)
        return X.reshape(X.shape[:-2] + (4,)) @ self._dual

    def exp(self, v):
        X = self._alg(v)
        delta = -np.linalg.det(X)
        C, S = _cosh_sinhc(delta)
        M = C[..., None, None] * np.eye(2) + S[..., None, None] * X
        return M.reshape(M.shape[:-2] + (4,))

    def log(self, p):
        """Inverse of ``exp`` on elements with ``trace > -2``."""
        M = self._m(p)
        Minv = self._m(self.inverse(p))
        C = 0.5 * (M[..., 0, 0] + M[..., 1, 1])
        if np.any(C <= -1):
            raise ValueError("element has no real logarithm in SL(2, R)")
        s = np.where(C >= 1, np.arccosh(np.maximum(C, 1.0)), np.arccos(np.clip(C, -1.0, 1.0)))
        sh = np.where(C >= 1, np.sinh(s), np.sin(s))
        fac = np.where(s > 1e-8, s / np.where(s > 1e-8, sh, 1.0), 1.0)
        return self._coords(fac[..., None, None] * 0.5 * (M - Minv))

    def local_coords(self, p):
        M = self._m(p)
        # (M - M^-1)/2 is the traceless part, exact to second order near e
        Minv = self._m(self.inverse(p))
        return self._coords(0.5 * (M - Minv))

    def adjoint_inverse(self, p, v):
        M = self._m(p)
        Minv = self._m(self.inverse(p))
        return self._coords(Minv @ self._alg(v) @ M)

    def push_left(self, p, v):
        M = self._m(p)
        X = M @ self._alg(v)
        return X.reshape(X.shape[:-2] + (4,))

    def pull_left(self, p, X):
        Minv = self._m(self.inverse(p))
        return self._coords(Minv @ self._m(X))


class _Semidirect:
    kind = "semidirect"
    ambient_dim = 3

    def __init__(self, A):
        self.A = np.asarray(A, dtype=float)

    def identity(self):
        return np.zeros(3)

    def etA(self, z):
        z = np.asarray(z, dtype=float)
        return expm2(z[..., None, None] * self.A)

    def multiply(self, p, q):
        p = np.asarray(p, dtype=float)
        q = np.asarray(q, dtype=float)
        xy = p[..., :2] + np.einsum("...ij,...j->...i", self.etA(p[..., 2]), q[..., :2])
        return np.concatenate([xy, (p[..., 2] + q[..., 2])[..., None]], axis=-1)

    def inverse(self, p):
        p = np.asarray(p, dtype=float)
        xy = -np.einsum("...ij,...j->...i", self.etA(-p[..., 2]), p[..., :2])
        return np.concatenate([xy, -p[..., 2:3]], axis=-1)

    def exp(self, v):
        v = np.asarray(v, dtype=float)
        shape = v.shape[:-1]
        M = np.zeros(shape + (3, 3))
        M[..., :2, :2] = v[..., 2, None, None] * self.A
        M[..., :2, 2] = v[..., :2]
        E = expm(M.reshape((-1, 3, 3))).reshape(shape + (3, 3))
        return np.concatenate([E[..., :2, 2], v[..., 2:3]], axis=-1)

    def local_coords(self, p):
        return np.asarray(p, dtype=float)

    def adjoint_inverse(self, p, v):
        p = np.asarray(p, dtype=float)
        v = np.asarray(v, dtype=float)
        w = v[..., :2] + v[..., 2, None] * np.einsum("ij,...j->...i", self.A, p[..., :2])
        xy = np.einsum("...ij,...j->...i", self.etA(-p[..., 2]), w)
        return np.concatenate([xy, np.broadcast_to(v[..., 2:3], xy.shape[:-1] + (1,))], axis=-1)

    def push_left(self, p, v):
        p = np.asarray(p, dtype=float)
        v = np.asarray(v, dtype=float)
        xy = np.einsum("...ij,...j->...i", self.etA(p[..., 2]), v[..., :2])
        return np.concatenate([xy, np.broadcast_to(v[..., 2:3], xy.shape[:-1] + (1,))], axis=-1)

    def pull_left(self, p, X):
        p = np.asarray(p, dtype=float)
        X = np.asarray(X, dtype=float)
        xy = np.einsum("...ij,...j->...i", self.etA(-p[..., 2]), X[..., :2])
        return np.concatenate([xy, X[..., 2:3]], axis=-1)

    def metric_at(self, point):
        """Coordinate matrix of the left-invariant metric at ``(x, y, z)``."""
        z = np.asarray(point, dtype=float)[..., 2]
        Einv = self.etA(-z)
        G = np.zeros(z.shape + (3, 3))
        G[..., :2, :2] = np.einsum("...ki,...kj->...ij", Einv, Einv)
        G[..., 2, 2] = 1.0
        return G


# ----------------------------------------------------------------------------
# module-level operations
# ----------------------------------------------------------------------------

def derive_constants(group_spec):
    """Build a group from ``{"c": [c1, c2, c3]}`` or ``{"a": a, "b": b}``.

    A bare length-3 sequence is read as structure constants and a length-2
    sequence as ``(a, b)``.
    """
    if isinstance(group_spec, MetricLieGroup):
        return group_spec
    if isinstance(group_spec, dict):
        if "c" in group_spec:
            c = list(group_spec["c"])
            if len(c) != 3:
                raise GroupSpecError("c must have three entries")
            return UnimodularGroup(*c)
        if "a" in group_spec and "b" in group_spec:
            return NonUnimodularGroup(group_spec["a"], group_spec["b"])
        raise GroupSpecError("group spec needs either c = [c1, c2, c3] or a and b")
    seq = list(group_spec)
    if len(seq) == 3:
        return UnimodularGroup(*seq)
    if len(seq) == 2:
        return NonUnimodularGroup(*seq)
    raise GroupSpecError(f"cannot interpret group spec {group_spec!r}")


def classify(group):
    """Lie group type and dimension of the isometry group."""
    if isinstance(group, NonUnimodularGroup):
        if group.a == 0:
            # A = I + bJ is conformal: constant curvature -1 for every b
            return ("non-unimodular (H^3)", 6)
        if group.a == 1:
            return ("non-unimodular", 4)
        return ("non-unimodular", 3)
    c1, c2, c3 = group.c

    def eq(x, y):
        return abs(x - y) <= _EPS_EQUAL * max(1.0, abs(x), abs(y))

    if c1 > 0 and c2 > 0 and c3 > 0:
        if eq(c1, c2) and eq(c2, c3):
            return ("SU(2)", 6)
        if eq(c1, c2) or eq(c2, c3) or eq(c1, c3):
            return ("SU(2)", 4)
        return ("SU(2)", 3)
    if c1 > 0 and c2 > 0 and c3 < 0:
        return ("SL~(2,R)", 4 if eq(c1, c2) else 3)
    if c1 > 0 and c2 > 0:
        return ("E~(2)", 6 if eq(c1, c2) else 3)
    if c1 > 0 and c2 < 0:
        return ("Sol3", 3)
    if c1 > 0:
        return ("Nil3", 4)
    return ("R3", 6)


def semidirect_metric_at(group, point):
    if not isinstance(group, NonUnimodularGroup) and getattr(group, "kind", "") != "semidirect":
        raise GroupSpecError("semidirect_metric_at needs a semidirect-product group")
    return group._realization.metric_at(point)


def right_invariant_field(group, i, x):
    """``F_i(x)``, with ``i`` in {1, 2, 3}."""
    if i not in (1, 2, 3):
        raise ValueError("field index must be 1, 2 or 3")
    return group.right_invariant_field(i - 1, x)


def ricci_quadratic(group, n):
    return group.ricci_quadratic(n)
