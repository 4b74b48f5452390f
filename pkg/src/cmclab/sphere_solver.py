"""Newton iteration and continuation in H for CMC spheres.

The discrete Gauss-map equation inherits the six-dimensional Moebius
symmetry of the domain only approximately, so the plain Jacobian is nearly
singular. We pin ``g(north) = 0``, ``g(south) = inf`` and ``g(ref) = 1``
(six real conditions) and border the system with the six Moebius variation
fields of the current iterate, solving

    [J_free | B] [du; tau] = -F.

At convergence ``F + B tau = 0``: the PDE residual itself equals ``-B tau``,
a discretization-size multiple of an infinitesimal reparametrization.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field as dc_field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .errors import CMCError, InitFailure, NewtonDivergence, StepUnderflow
from .gauss_pde import GaussField, mobius_fields, pde_residual, residual_and_jacobian, scaled_residual
from .h_potential import HPotential
from .mesh import build_mesh
from .metric_lie_group import derive_constants

log = logging.getLogger(__name__)

NEWTON_TOL = 1e-9


@dataclass
class NewtonInfo:
    iterations: int
    residual: float
    pde_residual: float
    tau: np.ndarray
    history: list


def _realify_cols(B):
    out = np.empty((2 * B.shape[0], B.shape[1]))
    out[0::2] = B.real
    out[1::2] = B.imag
    return out


def _target_factor(field):
    return 2 / (1 + np.abs(field.values) ** 2)


def _merit(F, B, field):
    """Projected residual ``F + B tau`` with ``tau`` by least squares."""
    Fr = np.empty(2 * len(F))
    Fr[0::2] = F.real
    Fr[1::2] = F.imag
    Br = _realify_cols(B)
    tau, *_ = np.linalg.lstsq(Br, -Fr, rcond=None)
    r = Fr + Br @ tau
    rc = r[0::2] + 1j * r[1::2]
    return np.max(np.abs(rc) * _target_factor(field)), np.linalg.norm(r), tau


def _pins(mesh):
    return [mesh.north, mesh.south, mesh.ref]


def gauge_fix(field):
    """Put pinned vertices on their gauge values (identity-like initial data)."""
    m = field.mesh
    field.values[m.north], field.tchart[m.north] = 0, 0
    field.values[m.south], field.tchart[m.south] = 0, 1
    field.values[m.ref], field.tchart[m.ref] = 1, 0
    return field


def newton_solve(group, H, init, tol=NEWTON_TOL, max_iter=25):
    """Solve the bordered Gauss-map system at fixed ``H`` starting from ``init``."""
    group = derive_constants(group)
    hp = HPotential(group, H)
    field = init.copy()
    field.H = float(H)
    mesh = field.mesh
    n = mesh.n_vertices
    pins = _pins(mesh)
    pinned = np.zeros(2 * n, dtype=bool)
    for v in pins:
        pinned[2 * v] = pinned[2 * v + 1] = True
    free = np.flatnonzero(~pinned)
    field.reassign_charts()
    F, J = residual_and_jacobian(hp, field)
    B = mobius_fields(field) * _weight(field)[:, None]
    res, norm, tau = _merit(F, B, field)
    history = [res]
    it = 0
    while res >= tol:
        if it >= max_iter:
            raise NewtonDivergence(f"no convergence after {max_iter} Newton steps (H={H}, residual={res:.3e})")
        it += 1
        Br = _realify_cols(B)
        A = sp.hstack([J[:, free], sp.csr_matrix(Br)]).tocsc()
        Fr = np.empty(2 * n)
        Fr[0::2] = F.real
        Fr[1::2] = F.imag
        try:
            sol = splu(A, permc_spec="COLAMD").solve(-Fr)
        except RuntimeError as exc:
            raise NewtonDivergence(f"singular bordered Jacobian at H={H}: {exc}") from exc
        if not np.all(np.isfinite(sol)):
            raise NewtonDivergence(f"non-finite Newton step at H={H}")
        du = np.zeros(2 * n)
        du[free] = sol[: len(free)]
        step = du[0::2] + 1j * du[1::2]
        alpha = 1.0
        base = field.values.copy()
        accepted = False
        while alpha >= 1 / 64:
            trial = field.copy()
            trial.values = base + alpha * step
            try:
                # overflowing trial steps are rejected below
                with np.errstate(over="ignore", invalid="ignore"):
                    trial.reassign_charts()
                    Ft, Jt = residual_and_jacobian(hp, trial)
                    Bt = mobius_fields(trial) * _weight(trial)[:, None]
                    if not (np.all(np.isfinite(Ft)) and np.all(np.isfinite(Bt))):
                        raise NewtonDivergence("non-finite residual")
                    rt, nt, taut = _merit(Ft, Bt, trial)
            except (CMCError, np.linalg.LinAlgError):
                alpha *= 0.5
                continue
            if nt < norm * (1 - 1e-4 * alpha) or rt < tol:
                accepted = True
                break
            alpha *= 0.5
        if not accepted:
            raise NewtonDivergence(f"line search failed at H={H} (residual {res:.3e})")
        field, F, J, B, res, norm, tau = trial, Ft, Jt, Bt, rt, nt, taut
        history.append(res)
        log.debug("newton H=%g it=%d residual=%.3e alpha=%g", H, it, res, alpha)
    E = pde_residual(hp, None, field)
    field.newton = NewtonInfo(it, res, float(np.max(scaled_residual(field, E))), tau, history)
    return field


def _weight(field):
    from .gauss_pde import domain_weight

    return domain_weight(field.mesh)


def initial_sphere(group, H_start, level=3, degree=3, tol=NEWTON_TOL):
    """Newton-polish the identity map ``g(z) = z`` at a large mean curvature."""
    group = derive_constants(group)
    scale = _group_scale(group)
    if H_start < 10 * scale:
        raise InitFailure(f"H_start={H_start} is below 10 * max(1, |c_i|, a, b) = {10 * scale}")
    mesh = build_mesh(level)
    init = gauge_fix(GaussField.identity(mesh, H_start, degree))
    try:
        return newton_solve(group, H_start, init, tol=tol)
    except NewtonDivergence as exc:
        raise InitFailure(f"Newton failed from the identity map at H={H_start}: {exc}") from exc


def _group_scale(group):
    if hasattr(group, "c"):
        return max(1.0, *(abs(c) for c in group.c))
    return max(1.0, group.a, group.b)


def _in_charts_of(field, other):
    """Values of ``other`` expressed in the target charts of ``field``."""
    v = other.values.copy()
    flip = other.tchart != field.tchart
    with np.errstate(divide="ignore", invalid="ignore"):
        v[flip] = np.where(v[flip] == 0, 1e300, 1 / np.where(v[flip] == 0, 1, v[flip]))
    return v


def predict(prev, cur, H_next):
    """Secant predictor through the last two accepted solutions."""
    out = cur.copy()
    out.H = H_next
    if prev is None or prev.H == cur.H:
        return out
    pv = _in_charts_of(cur, prev)
    s = (H_next - cur.H) / (cur.H - prev.H)
    out.values = cur.values + s * (cur.values - pv)
    gauge_fix(out)
    return out


@dataclass
class ContinuationState:
    H: float
    field: GaussField
    step: float
    history: list = dc_field(default_factory=list)


def continue_family(
    group,
    H_from,
    H_to,
    start=None,
    level=3,
    step=1.0,
    max_step=2.0,
    stops=(),
    callback=None,
    reconstruct=True,
):
    """Predictor-corrector continuation in ``H`` from ``H_from`` to ``H_to``.

    ``stops`` are mean curvature values the continuation lands on exactly.
    Each accepted step is reported to ``callback(H, field, immersion)`` and
    appended to the returned list of ``(H, field, immersion)``.
    """
    group = derive_constants(group)
    cur = start if start is not None else initial_sphere(group, H_from, level)
    direction = 1.0 if H_to >= H_from else -1.0
    targets = sorted({float(s) for s in stops if direction * (s - H_from) > 0 and direction * (H_to - s) >= 0} | {float(H_to)})
    targets = targets if direction > 0 else targets[::-1]
    prev = None
    out = []
    successes = 0

    def immerse(field):
        if not reconstruct:
            return None
        from .frame_integrator import reconstruct as build_immersion

        return build_immersion(group, field)

    def accept(field, imm):
        out.append((field.H, field, imm))
        if callback is not None:
            callback(field.H, field, imm)

    accept(cur, immerse(cur))
    h = abs(step)
    for target in targets:
        while direction * (target - cur.H) > 1e-14:
            H_next = cur.H + direction * min(h, abs(target - cur.H))
            try:
                nxt = newton_solve(group, H_next, predict(prev, cur, H_next))
                _check_orientation(nxt)
                # a sphere the mesh cannot resolve fails closure: treat as a failed step
                imm = immerse(nxt)
            except CMCError as exc:
                h *= 0.5
                successes = 0
                log.info("continuation step to H=%g failed (%s); step -> %g", H_next, exc, h)
                if h < 1e-8:
                    raise StepUnderflow(
                        f"continuation step underflow near H={cur.H}",
                        {"last_H": cur.H, "attempted_H": H_next, "step": h, "reason": str(exc)},
                    ) from exc
                continue
            prev, cur = cur, nxt
            successes += 1
            if successes >= 2:
                h = min(h * 1.3, max_step)
                successes = 0
            accept(cur, imm)
    return out


def _check_orientation(field):
    from .spectral_analysis import gauss_degree

    deg, jmin = gauss_degree(field)
    if deg != 1 or jmin <= 0:
        raise NewtonDivergence(f"solution is not an orientation preserving diffeomorphism (degree {deg}, min Jacobian {jmin:.3e})")


def refine(group, field, levels=1):
    """Prolong a solution to finer meshes and Newton-polish at each level."""
    group = derive_constants(group)
    for _ in range(levels):
        fine = build_mesh(field.mesh.level + 1)
        init = gauge_fix(field.prolong(fine))
        field = newton_solve(group, field.H, init)
    return field


def richardson(coarse, fine):
    """``(4 g_fine - g_coarse) / 3`` on the coarse vertices.

    The fine mesh must be a subdivision of the coarse one, so the coarse
    vertices come first in it. Both fields share the pinned gauge, so their
    leading ``O(h^2)`` errors cancel.
    """
    n = coarse.mesh.n_vertices
    if fine.mesh.level != coarse.mesh.level + 1:
        raise ValueError("fields must live on consecutive subdivision levels")
    yf = fine.values[:n].copy()
    flip = fine.tchart[:n] != coarse.tchart
    yf[flip] = 1 / yf[flip]
    out = coarse.copy()
    out.values = (4 * yf - coarse.values) / 3
    out.reassign_charts()
    return out


def solve_sphere(group, H, level=4, coarse_level=3, H_start=None, step=1.0):
    """Solved field at ``H`` on the given level (continuation on the coarse level)."""
    group = derive_constants(group)
    if H_start is None:
        H_start = 20 * _group_scale(group)
    fam = continue_family(group, H_start, H, level=min(coarse_level, level), step=step, reconstruct=False)
    field = fam[-1][1]
    return refine(group, field, level - field.mesh.level)


def area(immersion):
    return immersion.area()


def enclosed_volume(immersion):
    return immersion.enclosed_volume()
