"""Command line: ``cmclab run|classify|certify``.

Exit codes: 0 success, 2 configuration or schema error, 3 numerical failure.
``CMCLAB_THREADS`` caps the BLAS/OpenMP thread pools; it is applied before
numpy is imported.
"""
from __future__ import annotations

import argparse
import copy
import csv
import hashlib
import io
import json
import logging
import os
import sys
from dataclasses import dataclass, field as dc_field
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .errors import CMCError, IoError, SchemaError

log = logging.getLogger("cmclab")

SCHEMA_VERSION = "1.0"
CSV_COLUMNS = ["H", "area", "volume", "max_sigma", "index", "nullity", "qh_norm", "degree", "sym_residual", "embedded", "closure"]
_THREAD_VARS = ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS", "NUMEXPR_NUM_THREADS")

# section -> key -> (types, default); None default means required
_SCHEMA = {
    "group": {"c": ((list,), "optional"), "a": ((int, float), "optional"), "b": ((int, float), "optional")},
    "mesh": {"level": ((int,), 4), "coarse_level": ((int,), 3)},
    "continuation": {
        "H_start": ((int, float), None),
        "H_targets": ((list,), None),
        "step": ((int, float), 1.0),
        "max_step": ((int, float), 2.0),
    },
    "tolerances": {
        "newton": ((int, float), 1e-9),
        "closure": ((int, float), 1e-2),
        "symmetry_factor": ((int, float), 5.0),
    },
    "certificates": {
        "jacobi": ((bool,), True),
        "qh": ((bool,), True),
        "symmetry": ((bool,), True),
        "embeddedness": ((bool,), True),
        "minimal_structure": ((bool,), True),
    },
    "output": {"directory": ((str,), "cmclab_out"), "formats": ((list,), ["off", "obj"])},
}
_REQUIRED_SECTIONS = ("group", "continuation")


@dataclass
class RunConfig:
    group: dict
    level: int
    coarse_level: int
    H_start: float
    H_targets: list
    step: float
    max_step: float
    tolerances: dict
    certificates: dict
    output_dir: Path
    formats: list
    raw: dict = dc_field(repr=False, default_factory=dict)
    source: str = ""

    @property
    def config_hash(self):
        blob = json.dumps(self.raw, sort_keys=True, separators=(",", ":")).encode()
        return hashlib.sha256(blob).hexdigest()


# ----------------------------------------------------------------------------
# configuration
# ----------------------------------------------------------------------------

def _type_name(types):
    return " or ".join("number" if t in (int, float) else t.__name__ for t in types)


def _check_type(value, types):
    if isinstance(value, bool) and bool not in types:
        return False
    return isinstance(value, types)


def validate_config(raw, source="<config>"):
    """Validate a parsed TOML mapping; returns a :class:`RunConfig` or raises SchemaError."""
    errors = []
    if not isinstance(raw, dict):
        raise SchemaError([f"{source}: top level must be a table"])
    for key in raw:
        if key not in _SCHEMA:
            errors.append(f"{source}: unknown section `{key}` (allowed: {', '.join(_SCHEMA)})")
    for sec in _REQUIRED_SECTIONS:
        if sec not in raw:
            errors.append(f"{source}: missing section [{sec}]")
    vals = {}
    for sec, spec in _SCHEMA.items():
        table = raw.get(sec, {})
        if not isinstance(table, dict):
            errors.append(f"{source}: `{sec}` must be a table")
            continue
        for key in table:
            if key not in spec:
                errors.append(f"{source}: unknown key `{sec}.{key}` (allowed: {', '.join(spec)})")
        for key, (types, default) in spec.items():
            if key in table:
                if not _check_type(table[key], types):
                    errors.append(f"{source}: `{sec}.{key}` must be {_type_name(types)}, got {type(table[key]).__name__}")
                    continue
                vals[(sec, key)] = table[key]
            elif default is None and sec in raw:
                errors.append(f"{source}: missing required key `{sec}.{key}`")
            elif default != "optional":
                vals[(sec, key)] = copy.deepcopy(default)
    g = raw.get("group", {}) if isinstance(raw.get("group", {}), dict) else {}
    group = None
    if "c" in g:
        if "a" in g or "b" in g:
            errors.append(f"{source}: `group` takes either c or (a, b), not both")
        c = g["c"]
        if not (isinstance(c, list) and len(c) == 3 and all(_check_type(x, (int, float)) for x in c)):
            errors.append(f"{source}: `group.c` must be three numbers")
        elif sum(x < 0 for x in c) > 1:
            errors.append(
                f"{source}: `group.c` = {c} has two or more negative structure constants; "
                "at most one c_i may be negative"
            )
        else:
            group = {"c": [float(x) for x in c]}
    elif "a" in g and "b" in g:
        if _check_type(g["a"], (int, float)) and _check_type(g["b"], (int, float)):
            if g["a"] < 0 or g["b"] < 0:
                errors.append(f"{source}: `group.a` and `group.b` must be non-negative")
            else:
                group = {"a": float(g["a"]), "b": float(g["b"])}
    elif "group" in raw:
        errors.append(f"{source}: `group` needs c = [c1, c2, c3] or a and b")
    targets = vals.get(("continuation", "H_targets"))
    if targets is not None:
        if not targets or not all(_check_type(x, (int, float)) for x in targets):
            errors.append(f"{source}: `continuation.H_targets` must be a non-empty list of numbers")
    level = vals.get(("mesh", "level"), 4)
    coarse = vals.get(("mesh", "coarse_level"), 3)
    if isinstance(level, int) and isinstance(coarse, int):
        if not (0 <= coarse <= level <= 7):
            errors.append(f"{source}: need 0 <= mesh.coarse_level <= mesh.level <= 7")
    for key in ("step", "max_step"):
        v = vals.get(("continuation", key))
        if v is not None and v <= 0:
            errors.append(f"{source}: `continuation.{key}` must be positive")
    fmts = vals.get(("output", "formats"), [])
    for f in fmts:
        if f not in ("off", "obj"):
            errors.append(f"{source}: unsupported mesh format {f!r} in `output.formats`")
    H_start = vals.get(("continuation", "H_start"))
    if targets and H_start is not None and all(_check_type(x, (int, float)) for x in targets):
        if any(t > H_start for t in targets):
            errors.append(f"{source}: H targets must not exceed continuation.H_start (continuation runs downward)")
    if errors:
        raise SchemaError(errors)
    return RunConfig(
        group=group,
        level=level,
        coarse_level=coarse,
        H_start=float(H_start),
        H_targets=sorted({float(t) for t in targets}, reverse=True),
        step=float(vals[("continuation", "step")]),
        max_step=float(vals[("continuation", "max_step")]),
        tolerances={k: float(vals[("tolerances", k)]) for k in _SCHEMA["tolerances"]},
        certificates={k: vals[("certificates", k)] for k in _SCHEMA["certificates"]},
        output_dir=Path(vals[("output", "directory")]),
        formats=list(fmts),
        raw=raw,
        source=source,
    )


def parse_config(path):
    """Read and validate a TOML run configuration."""
    path = Path(path)
    try:
        text = path.read_bytes()
    except OSError as exc:
        raise SchemaError([f"{path}: cannot read configuration ({exc.strerror})"]) from exc
    try:
        raw = tomllib.loads(text.decode("utf-8"))
    except (tomllib.TOMLDecodeError, UnicodeDecodeError) as exc:
        raise SchemaError([f"{path}: {exc}"]) from exc
    cfg = validate_config(raw, str(path))
    if not cfg.output_dir.is_absolute():
        cfg.output_dir = path.parent / cfg.output_dir
    return cfg


# ----------------------------------------------------------------------------
# formatting and emission
# ----------------------------------------------------------------------------

def fmt(x):
    """17 significant digits: round-trips 64-bit floats."""
    if isinstance(x, (bool,)):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    return format(float(x), ".17g")


def _json_default(o):
    import numpy as np

    if isinstance(o, np.bool_):
        return bool(o)
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, Path):
        return str(o)
    raise TypeError(f"not serializable: {type(o).__name__}")


def write_json(path, payload):
    try:
        Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True, default=_json_default) + "\n")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc.strerror}") from exc


def stereographic_from_minus_identity(P, clamp=1e6):
    """SU(2) points to R^3 by stereographic projection from ``-I``; returns points and clamp flags."""
    import numpy as np

    P = np.asarray(P, dtype=float)
    d = 1 + P[:, 0]
    flagged = d < 1 / clamp
    X = P[:, 1:] / np.maximum(d, 1 / clamp)[:, None]
    return X, flagged


def mesh_text(vertices3, triangles, fmt_name, comments=(), block4=None):
    """OFF or OBJ text; extra data goes into trailing ``#`` comment lines."""
    out = io.StringIO()
    if fmt_name == "off":
        out.write("OFF\n")
        out.write(f"{len(vertices3)} {len(triangles)} 0\n")
        for v in vertices3:
            out.write(" ".join(fmt(x) for x in v) + "\n")
        for t in triangles:
            out.write("3 " + " ".join(str(int(i)) for i in t) + "\n")
    elif fmt_name == "obj":
        for v in vertices3:
            out.write("v " + " ".join(fmt(x) for x in v) + "\n")
        for t in triangles:
            out.write("f " + " ".join(str(int(i) + 1) for i in t) + "\n")
    else:
        raise IoError(f"unknown mesh format {fmt_name!r}")
    for c in comments:
        out.write(f"# {c}\n")
    if block4 is not None:
        out.write(f"# BEGIN_4D {len(block4)}\n")
        for v in block4:
            out.write("# " + " ".join(fmt(x) for x in v) + "\n")
        out.write("# END_4D\n")
    return out.getvalue()


def emit_mesh(immersion, fmt_name, path, comments=()):
    """Write an immersed sphere as OFF or OBJ.

    SU(2) and SL(2, R) positions are 4-vectors: they are kept exactly in a
    trailing ``BEGIN_4D``/``END_4D`` comment block, and SU(2) vertices are
    projected stereographically from ``-I`` for viewers (clamped vertices
    are listed in a comment).
    """
    import numpy as np

    g = immersion.group
    P = g.embed(immersion.positions)
    comments = list(comments)
    block4 = None
    if P.shape[1] == 4:
        block4 = P
        if g.kind == "su2":
            X, flagged = stereographic_from_minus_identity(P)
            comments.append("projection: stereographic from -I")
            if np.any(flagged):
                comments.append("clamped_vertices: " + " ".join(str(int(i)) for i in np.flatnonzero(flagged)))
        else:
            X = P[:, :3]
            comments.append("projection: first three matrix entries")
    else:
        X = P
    text = mesh_text(X, immersion.mesh.triangles, fmt_name, comments, block4)
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc.strerror}") from exc
    return Path(path)


def read_mesh(path):
    """Read an OFF/OBJ file written by :func:`emit_mesh`; returns (vertices, triangles, comments)."""
    import numpy as np

    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc.strerror}") from exc
    comments = [ln[1:].strip() for ln in lines if ln.startswith("#")]
    body = [ln for ln in lines if ln.strip() and not ln.startswith("#")]
    V, F = [], []
    try:
        if body and body[0].strip() == "OFF":
            nv, nf, _ = (int(x) for x in body[1].split())
            V = [[float(x) for x in ln.split()] for ln in body[2 : 2 + nv]]
            F = [[int(x) for x in ln.split()[1:4]] for ln in body[2 + nv : 2 + nv + nf]]
        else:
            for ln in body:
                parts = ln.split()
                if parts[0] == "v":
                    V.append([float(x) for x in parts[1:4]])
                elif parts[0] == "f":
                    F.append([int(x.split("/")[0]) - 1 for x in parts[1:4]])
    except (ValueError, IndexError) as exc:
        raise IoError(f"malformed mesh file {path}: {exc}") from exc
    V = np.array(V, dtype=float)
    if "BEGIN_4D" in " ".join(comments[:]):
        start = next(i for i, c in enumerate(comments) if c.startswith("BEGIN_4D"))
        n = int(comments[start].split()[1])
        V = np.array([[float(x) for x in c.split()] for c in comments[start + 1 : start + 1 + n]])
    return V, np.array(F, dtype=np.int64), comments


def write_polylines(directory, curves, config_hash):
    """One whitespace-separated file per sampled curve; returns the file names."""
    names = []
    for i, curve in enumerate(curves, start=1):
        name = f"geodesic_alpha{i}.txt"
        lines = [f"# config_sha256={config_hash}", f"# alpha_{i}: {len(curve)} points"]
        lines += [" ".join(fmt(x) for x in p) for p in curve]
        try:
            (Path(directory) / name).write_text("\n".join(lines) + "\n")
        except OSError as exc:
            raise IoError(f"cannot write {name}: {exc.strerror}") from exc
        names.append(name)
    return names


def write_table(path, rows, config_hash):
    buf = io.StringIO()
    buf.write(f"# config_sha256={config_hash}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow([fmt(r[c]) if not isinstance(r[c], str) else r[c] for c in CSV_COLUMNS])
    try:
        Path(path).write_text(buf.getvalue())
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc.strerror}") from exc


def read_table(path):
    with open(path, newline="") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    return list(csv.DictReader(lines))


# ----------------------------------------------------------------------------
# pipeline
# ----------------------------------------------------------------------------

def reachable_limit(group, H_from, H_to):
    """First ``H`` from ``H_from`` towards ``H_to`` where the H-potential has a zero, else ``None``.

    The zero set in ``H`` is ``{0}``, ``{-1, 1}`` or ``[-1, 1]``, so checking the
    end point and these values finds the first bad one.
    """
    from .h_potential import classify_nonvanishing

    if not classify_nonvanishing(group, H_from):
        return float(H_from)
    lo, hi = min(H_from, H_to), max(H_from, H_to)
    bad = [h for h in (1.0, 0.0, -1.0, float(H_to)) if lo <= h <= hi and not classify_nonvanishing(group, h)]
    if not bad:
        return None
    return max(bad) if H_to < H_from else min(bad)


def _sphere_report(group, H, field, imm, center, reference, cfg):
    """Certificates and table row for one sphere."""
    import numpy as np

    from .spectral_analysis import gauss_degree, jacobi_report, qh_certificate
    from .symmetry_geometry import embeddedness_check, isotropy_isometries, symmetry_residual

    row = {"H": H, "closure": imm.closure_residual}
    cert = {
        "H": H,
        "level": field.mesh.level,
        "closure_residual": imm.closure_residual,
        "newton": {
            "iterations": field.newton.iterations,
            "augmented_residual": field.newton.residual,
            "pde_residual": field.newton.pde_residual,
        },
        "center": None if center is None else [float(x) for x in center],
    }
    deg, jmin = gauss_degree(field)
    row["degree"] = deg
    cert["gauss_degree"] = {"degree": deg, "min_jacobian": jmin}
    row["area"] = imm.area()
    row["volume"] = imm.enclosed_volume(center) if center is not None else float("nan")
    row["max_sigma"] = float(np.sqrt(np.max(imm.forms.sigma2)))
    row["index"] = row["nullity"] = -1
    if cfg.certificates["jacobi"]:
        rep = jacobi_report(group, imm)
        row["index"], row["nullity"] = rep.index, rep.nullity
        cert["jacobi"] = rep.to_dict()
    row["qh_norm"] = float("nan")
    if cfg.certificates["qh"] and reference is not None:
        qh = qh_certificate(group, H, reference, field)
        row["qh_norm"] = qh.sup_norm
        cert["qh"] = qh.to_dict() | {"reference_level": reference.mesh.level}
    row["sym_residual"] = float("nan")
    if cfg.certificates["symmetry"] and center is not None:
        isos = isotropy_isometries(group, center)
        res = symmetry_residual(imm, isos)
        h = field.mesh.mean_edge
        bound = cfg.tolerances["symmetry_factor"] * h * h
        row["sym_residual"] = res
        cert["symmetry"] = {"residual": res, "bound": bound, "isometries": len(isos), "passed": bool(res <= bound)}
    row["embedded"] = "n/a"
    if cfg.certificates["embeddedness"]:
        ok, hit = embeddedness_check(imm)
        row["embedded"] = "true" if ok else "false"
        cert["embedded"] = {"embedded": ok, "first_collision": hit}
    return row, cert


def _mesh_stem(H):
    return "sphere_H" + format(H, "+.6f").replace("+", "p").replace("-", "m").replace(".", "_")


def run_pipeline(cfg):
    """Derive, continue, certify and emit; returns the exit code.

    Continuation runs on ``mesh.coarse_level``; every accepted step gets a
    table row there. Steps landing on an ``H_targets`` value are refined to
    ``mesh.level``, certified against the level below and written as meshes.
    """
    from .errors import PotentialZeroOnRange
    from .frame_integrator import reconstruct
    from .metric_lie_group import classify, derive_constants
    from .sphere_solver import continue_family, initial_sphere, refine
    from .symmetry_geometry import center_of_symmetry, minimal_sphere_structure, refined_center

    group = derive_constants(cfg.group)
    lie_type, iso_dim = classify(group)
    log.info("group %r: %s, isometry dimension %d", group, lie_type, iso_dim)
    out = cfg.output_dir
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoError(f"cannot create {out}: {exc.strerror}") from exc
    chash = cfg.config_hash
    failure = None
    targets = list(cfg.H_targets)
    limit = reachable_limit(group, cfg.H_start, min(targets))
    if limit is not None:
        failure = PotentialZeroOnRange(f"the H-potential has a zero at H={limit}; continuation stops before it")
        failure.diagnostics = {"zero_at_H": limit, "unreached_targets": [t for t in targets if t <= limit]}
        targets = [t for t in targets if t > limit]
    family = []
    if targets:
        try:
            start = initial_sphere(group, cfg.H_start, cfg.coarse_level, tol=cfg.tolerances["newton"])
            continue_family(
                group,
                cfg.H_start,
                min(targets),
                start=start,
                level=cfg.coarse_level,
                step=cfg.step,
                max_step=cfg.max_step,
                stops=targets,
                callback=lambda H, f, imm: family.append((H, f, imm)),
            )
        except CMCError as exc:
            failure = exc
    rows, certs = [], []
    for H, f, imm in family:
        try:
            center, t = center_of_symmetry(group, family, H)
            is_target = any(abs(H - s) < 1e-12 for s in targets)
            reference = None
            if is_target and f.mesh.level < cfg.level:
                reference = refine(group, f, cfg.level - f.mesh.level - 1)
                f = refine(group, reference, 1)
                imm = reconstruct(group, f, cfg.tolerances["closure"])
                center, t = refined_center(group, imm, t)
            row, cert = _sphere_report(group, H, f, imm, center, reference, cfg)
            cert["recorded"] = is_target
            if is_target:
                stem = _mesh_stem(H)
                notes = [
                    f"cmclab sphere H={fmt(H)}",
                    f"config_sha256={chash}",
                    f"level={f.mesh.level}",
                    "center=" + " ".join(fmt(x) for x in group.embed(center)),
                ]
                for fm in cfg.formats:
                    emit_mesh(imm, fm, out / f"{stem}.{fm}", notes)
                cert["mesh_files"] = [f"{stem}.{fm}" for fm in cfg.formats]
                if cfg.certificates["minimal_structure"] and group.kind == "su2" and abs(H) < 1e-14:
                    try:
                        ms = minimal_sphere_structure(group, imm)
                        cert["minimal_structure"] = ms.to_dict()
                        cert["minimal_structure"]["geodesic_files"] = write_polylines(out, ms.geodesics, chash)
                    except CMCError as exc:
                        cert["minimal_structure"] = exc.to_json()
        except CMCError as exc:
            failure = exc
            break
        rows.append(row)
        certs.append(cert)
    report = {
        "schema_version": SCHEMA_VERSION,
        "config_sha256": chash,
        "group": {"spec": cfg.group, "type": lie_type, "isometry_dimension": iso_dim},
        "levels": {"continuation": cfg.coarse_level, "recorded": cfg.level},
        "spheres": certs,
        "status": "ok" if failure is None else "failed",
    }
    if failure is not None:
        err = failure.to_json()
        if getattr(failure, "diagnostics", None) and "diagnostics" not in err:
            err["diagnostics"] = failure.diagnostics
        report["error"] = err
    write_table(out / "family_table.csv", rows, chash)
    write_json(out / "certificates.json", report)
    if failure is not None:
        sys.stderr.write(json.dumps(report["error"], default=_json_default) + "\n")
        return failure.exit_code
    return 0


# ----------------------------------------------------------------------------
# commands
# ----------------------------------------------------------------------------

def cmd_classify(cfg):
    from .h_potential import classify_nonvanishing
    from .metric_lie_group import classify, derive_constants

    group = derive_constants(cfg.group)
    lie_type, dim = classify(group)
    payload = {
        "schema_version": SCHEMA_VERSION,
        "config_sha256": cfg.config_hash,
        "group": cfg.group,
        "canonical": {"c": list(group.c), "mu": list(group.mu), "permutation": list(group.permutation)}
        if hasattr(group, "c")
        else {"a": group.a, "b": group.b, "D": group.D},
        "ricci_eigenvalues": [float(x) for x in group.ricci_eigenvalues],
        "lie_type": lie_type,
        "isometry_dimension": dim,
        "potential_nonvanishing": {fmt(H): bool(classify_nonvanishing(group, H)) for H in [cfg.H_start, *cfg.H_targets]},
        "reachable_limit": reachable_limit(group, cfg.H_start, min(cfg.H_targets)),
    }
    sys.stdout.write(json.dumps(payload, indent=2, default=_json_default) + "\n")
    return 0


class MeshSurface:
    """Positions read from a mesh file on the matching icosphere level."""

    def __init__(self, group, mesh, positions):
        self.group = group
        self.mesh = mesh
        self.positions = positions


def cmd_certify(mesh_path, cfg):
    import numpy as np

    from .mesh import build_mesh
    from .metric_lie_group import derive_constants
    from .symmetry_geometry import SmoothSurface, chordal_diameter, embeddedness_check, isotropy_isometries, symmetry_residual

    group = derive_constants(cfg.group)
    V, F, comments = read_mesh(mesh_path)
    if V.shape[1] != group.ambient_dim:
        raise IoError(f"{mesh_path}: vertices have {V.shape[1]} coordinates, the group needs {group.ambient_dim}")
    level = next((int(c.split("=")[1]) for c in comments if c.startswith("level=")), None)
    result = {"schema_version": SCHEMA_VERSION, "config_sha256": cfg.config_hash, "mesh": str(mesh_path)}
    mesh = build_mesh(level) if level is not None else None
    if mesh is None or mesh.n_vertices != len(V) or not np.array_equal(mesh.triangles, F):
        raise IoError(f"{mesh_path}: not an icosphere mesh written by cmclab")
    surf = MeshSurface(group, mesh, V)
    ok, hit = embeddedness_check(surf)
    result["embedded"] = {"embedded": ok, "first_collision": hit}
    result["diameter"] = chordal_diameter(group.embed(V))
    center = None
    for c in comments:
        if c.startswith("center="):
            center = np.array([float(x) for x in c.split("=")[1].split()])
    if center is not None:
        smooth = SmoothSurface(surf)
        res = symmetry_residual(surf, isotropy_isometries(group, center), smooth)
        bound = cfg.tolerances["symmetry_factor"] * mesh.mean_edge**2
        result["symmetry"] = {"residual": res, "bound": bound, "passed": bool(res <= bound)}
    sys.stdout.write(json.dumps(result, indent=2, default=_json_default) + "\n")
    passed = ok and result.get("symmetry", {}).get("passed", True)
    return 0 if passed else 3


def _apply_threads():
    val = os.environ.get("CMCLAB_THREADS")
    if val is None:
        return
    try:
        n = int(val)
        if n < 1:
            raise ValueError
    except ValueError:
        raise SchemaError([f"CMCLAB_THREADS must be a positive integer, got {val!r}"]) from None
    for var in _THREAD_VARS:
        os.environ[var] = str(n)


def build_parser():
    p = argparse.ArgumentParser(prog="cmclab", description="CMC spheres in metric Lie groups")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="continue a sphere family and write meshes, table and certificates")
    r.add_argument("config")
    c = sub.add_parser("classify", help="print group type, invariants and potential admissibility")
    c.add_argument("config")
    k = sub.add_parser("certify", help="embeddedness and symmetry checks for a written mesh")
    k.add_argument("mesh")
    k.add_argument("config")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        _apply_threads()
        cfg = parse_config(args.config)
        if args.command == "run":
            return run_pipeline(cfg)
        if args.command == "classify":
            return cmd_classify(cfg)
        return cmd_certify(args.mesh, cfg)
    except CMCError as exc:
        sys.stderr.write(json.dumps(exc.to_json(), default=_json_default) + "\n")
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
