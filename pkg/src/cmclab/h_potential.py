"""The H-potential R(q) of a metric Lie group and its zero set.

``R`` is a polynomial of bidegree at most (2, 2) in ``q`` and ``conj(q)``,
stored as a 3x3 complex coefficient matrix ``C[m, n]`` of ``q^m conj(q)^n``.
Near ``q = infinity`` we use the chart ``h = 1/q`` and the potential
``R~(h) = |h|^4 R(1/h)``, whose coefficients are ``C[2 - m, 2 - n]``.
"""
from __future__ import annotations

import numpy as np

from .errors import CMCError, PotentialZeroOnRange
from .metric_lie_group import NonUnimodularGroup, UnimodularGroup, derive_constants

Q_CHART = 0
H_CHART = 1

_ZERO_TOL = 1e-10


def potential_coefficients(group, H):
    """Coefficient matrix of ``R`` in the ``q`` chart."""
    H = float(H)
    C = np.zeros((3, 3), dtype=complex)
    if isinstance(group, NonUnimodularGroup):
        a, b = group.a, group.b
        C[0, 0] = H - 1
        C[1, 1] = 2 * H - 2j * b
        C[2, 2] = H + 1
        C[2, 0] = -a + 1j * a * b
        C[0, 2] = a + 1j * a * b
        return C
    m1, m2, m3 = group.mu
    C[0, 0] = H - 0.5j * (m1 + m2)
    C[2, 2] = H - 0.5j * (m1 + m2)
    C[1, 1] = 2 * H - 2j * m3
    C[2, 0] = -0.5j * (m2 - m1)
    C[0, 2] = -0.5j * (m2 - m1)
    return C


def eval_poly(C, x, order=1):
    """Evaluate ``sum C[..., m, n] x^m conj(x)^n`` and Wirtinger derivatives.

    ``C`` has shape ``(..., 3, 3)`` and broadcasts against ``x``.
    """
    C = np.asarray(C)
    x = np.asarray(x, dtype=complex)
    xb = np.conj(x)
    c = [[C[..., m, n] for n in range(3)] for m in range(3)]
    # rows of C as polynomials in xbar
    r0 = c[0][0] + xb * (c[0][1] + xb * c[0][2])
    r1 = c[1][0] + xb * (c[1][1] + xb * c[1][2])
    r2 = c[2][0] + xb * (c[2][1] + xb * c[2][2])
    R = r0 + x * (r1 + x * r2)
    if order == 0:
        return R
    d0 = c[0][1] + 2 * xb * c[0][2]
    d1 = c[1][1] + 2 * xb * c[1][2]
    d2 = c[2][1] + 2 * xb * c[2][2]
    Rx = r1 + 2 * x * r2
    Rxb = d0 + x * (d1 + x * d2)
    if order == 1:
        return R, Rx, Rxb
    Rxx = 2 * r2
    Rxxb = d1 + 2 * x * d2
    Rxbxb = 2 * (c[0][2] + x * (c[1][2] + x * c[2][2]))
    return R, Rx, Rxb, Rxx, Rxxb, Rxbxb


class HPotential:
    """``R`` for a group and mean curvature ``H`` with evaluators in both charts."""

    def __init__(self, group, H):
        self.group = derive_constants(group)
        self.H = float(H)
        self.coeffs = (
            potential_coefficients(self.group, self.H),
            potential_coefficients(self.group, self.H)[::-1, ::-1].copy(),
        )

    def __repr__(self):
        return f"HPotential({self.group!r}, H={self.H})"

    def evaluate(self, x, chart=Q_CHART, order=1):
        """Value and Wirtinger derivatives of the chart potential at ``x``.

        Returns ``R`` for ``order=0``; ``(R, R_x, R_xbar)`` for ``order=1``;
        for ``order=2`` additionally ``(R_xx, R_xxbar, R_xbarxbar)``.
        """
        return eval_poly(self.coeffs[chart], x, order)

    def __call__(self, q):
        return potential(self, q)

    def check_nonzero(self, x, chart=Q_CHART, tol=_ZERO_TOL):
        R = self.evaluate(x, chart, order=0)
        bad = np.abs(R) <= tol
        if np.any(bad):
            idx = int(np.flatnonzero(np.ravel(bad))[0])
            val = complex(np.ravel(np.asarray(x, dtype=complex))[idx])
            raise PotentialZeroOnRange(
                f"H-potential vanishes (|R| <= {tol:g}) at chart-{chart} value {val} (H={self.H})"
            )
        return R


def potential(hp, q):
    """``R(q)``; ``q = inf`` (or ``None``) returns ``lim R(q)/|q|^4``."""
    if q is None or (np.isscalar(q) and np.isinf(abs(q))):
        return complex(hp.coeffs[H_CHART][0, 0])
    q = np.asarray(q, dtype=complex)
    inf = np.isinf(q)
    if not np.any(inf):
        return hp.evaluate(q, Q_CHART, order=0)
    out = np.full(q.shape, complex(hp.coeffs[H_CHART][0, 0]))
    out[~inf] = hp.evaluate(q[~inf], Q_CHART, order=0)
    return out


def potential_derivs(hp, q):
    """Wirtinger derivatives ``(R_q, R_qbar)`` at finite ``q``."""
    _, Rq, Rqb = hp.evaluate(q, Q_CHART, order=1)
    return Rq, Rqb


def classify_nonvanishing(group, H):
    """True when the H-potential has no zero on the Riemann sphere."""
    group = derive_constants(group)
    if isinstance(group, UnimodularGroup):
        if all(c > 0 for c in group.c):
            return True
        return H != 0
    if group.D <= 1:
        return abs(H) > 1
    return abs(H) != 1


def _newton_zero(C, starts, iters=60):
    """Damped Gauss-Newton on ``R = 0``.

    ``C`` has shape ``(N, 3, 3)`` and ``starts`` shape ``(S,)``; every
    potential is run from every start. Returns the best point and ``|R|``
    per potential.
    """
    C = np.asarray(C)[:, None, :, :]
    x = np.broadcast_to(np.asarray(starts, dtype=complex), (C.shape[0], len(starts))).copy()
    active = np.ones(C.shape[0], dtype=bool)
    with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
        for _ in range(iters):
            Ca = C[active]
            xa = x[active]
            R, Rx, Rxb = eval_poly(Ca, xa, 1)
            absR = np.abs(R)
            # real Jacobian of (Re R, Im R) wrt (Re x, Im x)
            S = Rx + Rxb
            Dd = Rx - Rxb
            j00, j10, j01, j11 = S.real, S.imag, -Dd.imag, Dd.real
            # regularized 2x2 normal equations in closed form
            a = j00 * j00 + j10 * j10
            c = j01 * j01 + j11 * j11
            b = j00 * j01 + j10 * j11
            eps = 1e-14 * (a + c) + 1e-300
            a = a + eps
            c = c + eps
            g0 = j00 * R.real + j10 * R.imag
            g1 = j01 * R.real + j11 * R.imag
            det = a * c - b * b
            dx = -((c * g0 - b * g1) + 1j * (a * g1 - b * g0)) / det
            dx = np.where(np.isfinite(dx), dx, 0)
            t = np.ones(xa.shape)
            improved = np.zeros(xa.shape, dtype=bool)
            for _ in range(12):
                ok = np.abs(eval_poly(Ca, xa + t * dx, 0)) < absR
                improved |= ok
                if improved.all():
                    break
                t = np.where(improved, t, 0.5 * t)
            new = np.where(improved, xa + t * dx, xa)
            moved = np.abs(new - xa).max(axis=1)
            # keep iterates inside a generous chart disc
            big = np.abs(new) > 4
            new[big] = 4 * new[big] / np.abs(new[big])
            x[active] = new
            done = (moved < 1e-13) | (np.abs(eval_poly(Ca, new, 0)).min(axis=1) < _ZERO_TOL)
            idx = np.flatnonzero(active)
            active[idx[done]] = False
            if not active.any():
                break
    R = np.abs(eval_poly(C, x, 0))
    k = np.argmin(R, axis=1)
    rows = np.arange(C.shape[0])
    return x[rows, k], R[rows, k]


def find_zeros(coeff_pairs, dense=False):
    """Zero search for a batch of potentials given as ``(C_q, C_h)`` stacks.

    Returns a list holding a witness ``q`` (complex or ``inf``) or None.
    """
    Cq, Ch = (np.asarray(c) for c in coeff_pairs)
    n = 15 if dense else 3
    g = np.linspace(-0.7, 0.7, n)
    starts = (g[:, None] + 1j * g[None, :]).ravel()
    xq, rq = _newton_zero(Cq, starts)
    xh, rh = _newton_zero(Ch, starts)
    out = []
    for k in range(len(rq)):
        if rq[k] < _ZERO_TOL:
            out.append(complex(xq[k]))
        elif rh[k] < _ZERO_TOL:
            out.append(np.inf if xh[k] == 0 else complex(1 / xh[k]))
        else:
            out.append(None)
    return out


def find_zero(hp, dense=False):
    """Search both charts for a zero of ``R``; returns ``q`` (or inf) or None."""
    return find_zeros(([hp.coeffs[0]], [hp.coeffs[1]]), dense)[0]


def has_zero(hp):
    """Decide whether ``R`` vanishes somewhere and, if so, return a witness.

    The decision comes from the classification of groups with an everywhere
    non-zero potential; a multi-start Newton search must agree with it.
    """
    return has_zero_batch([hp])[0]


def has_zero_batch(potentials):
    """``has_zero`` for many potentials with one vectorized search."""
    potentials = list(potentials)
    decided = [not classify_nonvanishing(hp.group, hp.H) for hp in potentials]
    pairs = (
        np.array([hp.coeffs[0] for hp in potentials]),
        np.array([hp.coeffs[1] for hp in potentials]),
    )
    witnesses = find_zeros(pairs)
    retry = [k for k, w in enumerate(witnesses) if w is None and decided[k]]
    if retry:
        again = find_zeros((pairs[0][retry], pairs[1][retry]), dense=True)
        for k, w in zip(retry, again):
            witnesses[k] = w
    out = []
    for hp, zero, w in zip(potentials, decided, witnesses):
        if not zero and w is not None:
            raise CMCError(f"classification says R never vanishes but R({w}) ~ 0 for {hp!r}")
        if zero and w is None:
            raise CMCError(f"classification predicts a zero of R but the search found none for {hp!r}")
        out.append((zero, w))
    return out
