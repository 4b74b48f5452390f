"""Independent reference computations used by the tests.

Nothing here imports cmclab: each oracle is written from the defining
formulas so that agreement is a real cross-check.
"""
import numpy as np

# ----------------------------------------------------------------------------
# H-potential, written out term by term
# ----------------------------------------------------------------------------


def potential_nonunimodular(a, b, H, q):
    r2 = np.abs(q) ** 2
    qb = np.conj(q)
    return H * (1 + r2) ** 2 - (1 - r2**2) - a * (q**2 - qb**2) - 1j * b * (2 * r2 - a * (q**2 + qb**2))


def potential_unimodular(c, H, q):
    c1, c2, c3 = c
    m1, m2, m3 = 0.5 * (-c1 + c2 + c3), 0.5 * (c1 - c2 + c3), 0.5 * (c1 + c2 - c3)
    r2 = np.abs(q) ** 2
    return H * (1 + r2) ** 2 - 0.5j * (m2 * np.abs(1 + q**2) ** 2 + m1 * np.abs(1 - q**2) ** 2 + 4 * m3 * r2)


def _grid(n=200):
    g = np.linspace(-1.0, 1.0, n)
    return (g[:, None] + 1j * g[None, :]).ravel()


def _polish(fun, x0, iters=60, eps=1e-7):
    """Levenberg-Marquardt on ``fun(x) = 0`` for complex ``x``, vectorized over starts.

    The 2x2 real Jacobian comes from central differences; the damping
    handles zero sets that are curves (rank-one Jacobians).
    """
    x = x0.copy()
    mu = np.full(x.shape, 1e-3)
    f = fun(x)
    for _ in range(iters):
        jx = (fun(x + eps) - fun(x - eps)) / (2 * eps)
        jy = (fun(x + 1j * eps) - fun(x - 1j * eps)) / (2 * eps)
        # normal equations of the real 2x2 system
        a11 = jx.real**2 + jx.imag**2
        a12 = jx.real * jy.real + jx.imag * jy.imag
        a22 = jy.real**2 + jy.imag**2
        g1 = jx.real * f.real + jx.imag * f.imag
        g2 = jy.real * f.real + jy.imag * f.imag
        d = mu * np.maximum(np.maximum(a11, a22), 1e-300)
        det = (a11 + d) * (a22 + d) - a12**2
        ok = det > 0
        det = np.where(ok, det, 1.0)
        dx = np.where(ok, -((a22 + d) * g1 - a12 * g2) / det, 0.0)
        dy = np.where(ok, -((a11 + d) * g2 - a12 * g1) / det, 0.0)
        step = dx + 1j * dy
        step = step / np.maximum(1.0, np.abs(step) / 0.25)
        xn = x + step
        fn = fun(xn)
        better = np.abs(fn) < np.abs(f)
        x = np.where(better, xn, x)
        f = np.where(better, fn, f)
        mu = np.where(better, mu / 10, mu * 10)
    return np.abs(f)


def _charts(R):
    """``R`` and the second-chart potential ``|h|^4 R(1/h)`` as functions of a point."""

    def fq(q):
        return R(q)

    def fh(h):
        with np.errstate(divide="ignore", invalid="ignore"):
            v = np.abs(h) ** 4 * R(1 / h)
        # value at h = 0 is the limit of R(q)/|q|^4
        return np.where(h == 0, R(np.full(h.shape, 1e6 + 0j)) / 1e24, v)

    return fq, fh


def min_abs_potential(R, Hs, n=200, starts=4):
    """Brute-force ``min |R|`` over both charts for each ``H`` in ``Hs``.

    ``R(H, q)`` is the potential of one group. Since ``R`` is affine in ``H``
    the grid values are combined from ``R(0, q)`` and ``R(1, q) - R(0, q)``;
    the best grid points are then refined by Levenberg-Marquardt.
    """
    Hs = np.asarray(Hs, dtype=float)
    Q = _grid(n)
    Hq = Q[Q != 0]
    best = np.full(len(Hs), np.inf)
    for X, chart in ((Q, 0), (Hq, 1)):
        f0 = _charts(lambda q: R(0.0, q))[chart](X)
        f1 = _charts(lambda q: R(1.0, q))[chart](X) - f0
        vals = np.abs(Hs[:, None] * f1[None, :] + f0[None, :])
        best = np.minimum(best, vals.min(axis=1))
        x0 = X[np.argpartition(vals, starts, axis=1)[:, :starts]]
        x0 = np.concatenate([x0, np.zeros((len(Hs), 1), dtype=complex)], axis=1)
        HH = np.broadcast_to(Hs[:, None], x0.shape)
        fun = _charts(lambda q: R(HH, q))[chart]
        best = np.minimum(best, _polish(fun, x0).min(axis=1))
    return best


def closed_form_nonvanishing_nonunimodular(a, b, H):
    D = (1 - a * a) * (1 + b * b)
    return abs(H) > 1 if D <= 1 else abs(H) != 1


def closed_form_nonvanishing_unimodular(c, H):
    return all(x > 0 for x in c) or H != 0


# ----------------------------------------------------------------------------
# round three-sphere geometry (c = (2, 2, 2) is the unit sphere)
# ----------------------------------------------------------------------------


def geodesic_sphere_radius(H):
    """Geodesic spheres of radius r in the unit three-sphere have H = cot r."""
    return np.arctan2(1.0, H)


def geodesic_sphere_area(H):
    return 4 * np.pi * np.sin(geodesic_sphere_radius(H)) ** 2


def geodesic_ball_volume(H):
    r = geodesic_sphere_radius(H)
    return np.pi * (2 * r - np.sin(2 * r))


def round_jacobi_spectrum(H, k):
    """Lowest ``k`` eigenvalues of ``-(Delta + |sigma|^2 + 2)`` on the geodesic sphere.

    ``-Delta`` has eigenvalues ``l(l+1)/sin^2 r`` with multiplicity ``2l+1``,
    and ``|sigma|^2 = 2 cot^2 r``.
    """
    r = geodesic_sphere_radius(H)
    P = 2 / np.tan(r) ** 2 + 2
    vals = []
    l = 0
    while len(vals) < k:
        vals += [l * (l + 1) / np.sin(r) ** 2 - P] * (2 * l + 1)
        l += 1
    return np.array(vals[:k])


# ----------------------------------------------------------------------------
# quaternions
# ----------------------------------------------------------------------------


def quat_mul(p, q):
    p0, p1, p2, p3 = np.moveaxis(np.asarray(p, dtype=float), -1, 0)
    q0, q1, q2, q3 = np.moveaxis(np.asarray(q, dtype=float), -1, 0)
    return np.stack(
        [
            p0 * q0 - p1 * q1 - p2 * q2 - p3 * q3,
            p0 * q1 + p1 * q0 + p2 * q3 - p3 * q2,
            p0 * q2 - p1 * q3 + p2 * q0 + p3 * q1,
            p0 * q3 + p1 * q2 - p2 * q1 + p3 * q0,
        ],
        axis=-1,
    )


def random_unit_quaternions(rng, n):
    q = rng.normal(size=(n, 4))
    return q / np.linalg.norm(q, axis=1, keepdims=True)
