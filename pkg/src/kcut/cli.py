"""Command-line front end: ``kcut --config run.json``.

Exit codes: 0 when every point passes, 1 on a verification failure or a
numerical error, 2 on configuration and output errors.
"""

import argparse
from concurrent.futures import ThreadPoolExecutor
import json
import os
import sys
import time

import numpy as np

from . import circle, closed_forms, toric
from .errors import (ConfigError, DimensionError, InvalidLevel, InvalidParameter, KcutError,
                     Misconfigured, OutputError, TooLarge, Unsupported)
from .hermitian import positivity_check
from .potentials import make_potential
from .radial import check_symplectic, invert_moment, make_radial, moment_profile
from .report import GridSpec, RunConfig, RunReport, emit, parse_point, write_atomic

CONFIG_ERRORS = (ConfigError, InvalidParameter, InvalidLevel, Misconfigured, Unsupported,
                 TooLarge, DimensionError, OutputError)


# ---------------------------------------------------------------------------
# config helpers

def _require(body, key):
    if key not in body:
        raise ConfigError(f"missing config key {key!r}")
    return body[key]


def build_cut_problem(spec):
    """CutProblem from ``{"example", "n", "level"}`` or an explicit description."""
    if not isinstance(spec, dict):
        raise ConfigError("problem must be an object")
    level = spec.get("level", spec.get("lam"))
    if level is None:
        raise ConfigError("problem needs a level")
    if "example" in spec:
        name = spec["example"]
        if name not in closed_forms.EXAMPLES:
            raise ConfigError(f"unknown example {name!r}")
        return closed_forms.example_problem(name, int(_require(spec, "n")), float(level))
    potential = make_potential(_require(spec, "potential"))
    radial = make_radial(spec.get("radial", {"kind": "quadratic"}))
    kappa = spec.get("einstein_kappa")
    c = spec.get("structure_c")
    return circle.CutProblem(potential, tuple(_require(spec, "weights")), float(level), radial,
                             None if kappa is None else float(kappa),
                             None if c is None else float(c), spec.get("name"))


def _grid(cfg, n):
    return GridSpec.from_dict(cfg.body.get("grid", {}), n)


def _point_columns(prefix, n):
    return [f"{prefix}{j}_{part}" for j in range(n) for part in ("re", "im")]


def _point_fields(prefix, z):
    out = {}
    for j, v in enumerate(z):
        out[f"{prefix}{j}_re"] = float(np.real(v))
        out[f"{prefix}{j}_im"] = float(np.imag(v))
    return out


def _form_columns(n):
    return [f"omega_{j}{k}_{part}" for j in range(n) for k in range(j, n)
            for part in ("re", "im")]


def _form_fields(A):
    A = np.asarray(A)
    n = A.shape[0]
    out = {}
    for j in range(n):
        for k in range(j, n):
            out[f"omega_{j}{k}_re"] = float(A[j, k].real)
            out[f"omega_{j}{k}_im"] = float(A[j, k].imag)
    return out


def _map(cfg, func, items):
    if cfg.workers <= 1 or len(items) <= 1:
        return [func(x) for x in items]
    with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
        return list(pool.map(func, items))


# ---------------------------------------------------------------------------
# pipelines

def run_radial_check(cfg):
    body = cfg.body
    spec = body.get("radial")
    if spec is None:
        spec = {k: body[k] for k in ("kind", "kappa", "scale", "coeffs", "t_max") if k in body}
    if "kind" not in spec:
        raise ConfigError("radial-check needs a radial kind")
    pot = make_radial(spec)
    mp = moment_profile(pot)
    g = body.get("t_grid", {})
    if isinstance(g, (list, tuple)):
        g = {"start": g[0], "stop": g[1]}
    start, stop = float(g.get("start", 0.0)), float(g.get("stop", 10.0))
    samples = int(g.get("samples", 101))
    if not (0 <= start < stop) or not 2 <= samples <= 100000:
        raise ConfigError("t_grid needs 0 <= start < stop and at least 2 samples")
    ts = np.linspace(start, stop, samples)
    verdict = check_symplectic(pot, ts)

    def record(t):
        H = float(mp.H(t))
        rec = {"t": float(t), "F": float(pot.F(t)), "H": H, "H1": float(mp.H1(t))}
        back = invert_moment(mp, H) if verdict.symplectic and H < mp.cap_a else t
        rec["residual"] = abs(back - t) / max(1.0, t)
        return rec

    records = _map(cfg, record, list(ts))
    extra = {"cap_a": None if not np.isfinite(mp.cap_a) else float(mp.cap_a),
             "cap_estimated": mp.cap_estimated, "symplectic": verdict.symplectic,
             "failing_t": verdict.failing_t, "pass": verdict.symplectic}
    return ["t", "F", "H", "H1", "residual"], records, extra


def run_cut_grid(cfg):
    p = build_cut_problem(_require(cfg.body, "problem"))
    chart = circle.make_chart(p)
    pts = _grid(cfg, p.n).points()
    name = p.name if p.name in closed_forms.EXAMPLES else None

    def record(z):
        z = np.array(z)
        form = circle.reduced_form(p, chart, z)
        rec = _point_fields("zeta", z)
        rec["w2"] = chart.w_solver(z)
        rec["rho"] = float(chart.reduced_potential()(z))
        rec.update(_form_fields(form.coeffs))
        rec["min_eig"] = float(form.eigenvalues()[0])
        rec["positivity"] = positivity_check(form)
        rec["residual"] = 0.0
        if name:
            cf = closed_forms.closed_form_example(name, {"n": p.n, "lam": p.level}, z)
            if cf.omega is not None:
                rec["residual"] = circle.form_distance(form, cf.omega)
        return rec

    cols = (_point_columns("zeta", p.n) + ["w2", "rho"] + _form_columns(p.n)
            + ["min_eig", "positivity", "residual"])
    return cols, _map(cfg, record, pts), {"oracle": "closed_form" if name else "none",
                                          "singular": chart.singular}


def run_map_g(cfg):
    p = build_cut_problem(_require(cfg.body, "problem"))
    pts = _grid(cfg, p.n).points()
    pullback = bool(cfg.body.get("pullback", False))
    chart = circle.make_chart(p) if pullback else None

    def record(q):
        q = np.array(q)
        a, b, gap = circle.map_g_paths(p, q)
        rec = _point_fields("q", q)
        rec.update(_point_fields("g", a))
        rec["residual"] = gap
        if pullback:
            rec["pullback_residual"] = circle.pullback_discrepancy(p, chart, q)
        return rec

    cols = _point_columns("q", p.n) + _point_columns("g", p.n) + ["residual"]
    if pullback:
        cols.append("pullback_residual")
    return cols, _map(cfg, record, pts), {}


def run_einstein_check(cfg):
    p = build_cut_problem(_require(cfg.body, "problem"))
    chart = circle.make_chart(p)
    pts = _grid(cfg, p.n).points()
    identity = p.name == "euclidean_blowup"

    def record(z):
        z = np.array(z)
        rec = _point_fields("zeta", z)
        rec["residual"] = circle.einstein_residual(p, chart, z)
        if identity:
            rec["ricci_identity_residual"] = closed_forms.blowup_ricci_residual(p, chart, z)
        return rec

    cols = _point_columns("zeta", p.n) + ["residual"]
    if identity:
        cols.append("ricci_identity_residual")
    return cols, _map(cfg, record, pts), {"kappa": p.einstein_kappa,
                                          "structure_c": p.structure_c}


def run_veff(cfg):
    p = build_cut_problem(_require(cfg.body, "problem"))
    chart = circle.make_chart(p)
    pts = _grid(cfg, p.n).points()
    name = p.name if p.name in ("euclidean_cut", "euclidean_blowup") else None

    def record(z):
        z = np.array(z)
        rec = _point_fields("zeta", z)
        v = circle.v_eff(p, chart, z)
        rec["v_eff"] = v
        rec["residual"] = 0.0
        if name:
            cf = closed_forms.closed_form_example(name, {"n": p.n, "lam": p.level}, z)
            rec["closed_form"] = cf.v_eff
            rec["residual"] = abs(v - cf.v_eff)
        return rec

    cols = _point_columns("zeta", p.n) + ["v_eff"] + (["closed_form"] if name else []) \
        + ["residual"]
    return cols, _map(cfg, record, pts), {}


def _load_polytope(cfg):
    body = cfg.body
    if "polytope" in body:
        return toric.load_polyhedral(body["polytope"])
    path = _require(body, "file")
    if not os.path.isabs(path):
        path = os.path.join(cfg.base_dir, path)
    try:
        return toric.load_polyhedral(path)
    except OSError as exc:
        raise ConfigError(f"cannot read polytope {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"polytope {path} is not valid JSON: {exc}") from None


def run_polytope(cfg):
    delta = _load_polytope(cfg)
    action = cfg.body.get("action", "faces")
    if action == "faces":
        records = toric.stratification(delta)
        return ["face", "dim", "isotropy_rank", "witness"], records, {"faces": len(records)}
    if action == "face_of":
        records = []
        for eta in _require(cfg.body, "points"):
            face = toric.face_of(delta, eta)
            records.append({"point": [float(x) for x in eta], "face": list(face.active),
                            "dim": face.dim,
                            "isotropy_rank": toric.isotropy(delta, face).rank})
        return ["point", "face", "dim", "isotropy_rank"], records, {}
    raise ConfigError(f"unknown polytope action {action!r}")


def build_torus_problem(spec):
    if not isinstance(spec, dict):
        raise ConfigError("torus problem must be an object")
    potential = make_potential(_require(spec, "potential"))
    radials = [make_radial(r) for r in _require(spec, "radials")]
    delta = toric.load_polyhedral(spec["polytope"]) if "polytope" in spec else None
    return toric.TorusCutProblem(potential, _require(spec, "weights"), radials,
                                 _require(spec, "levels"), delta)


def run_stability(cfg):
    p = build_torus_problem(_require(cfg.body, "problem"))
    budget = int(cfg.body.get("budget", 200))
    items = []
    for entry in cfg.body.get("points", []):
        items.append((parse_point(_require(entry, "m")), parse_point(_require(entry, "x"))))
    n_random = int(cfg.body.get("random", 0))
    if n_random:
        rng = np.random.default_rng(cfg.seed)
        for _ in range(n_random):
            m = rng.normal(size=p.potential.n) + 1j * rng.normal(size=p.potential.n)
            x = rng.normal(size=p.k) + 1j * rng.normal(size=p.k)
            items.append((tuple(m), tuple(x)))
    if not items:
        raise ConfigError("stability needs points or a random sample count")

    def record(item):
        m, x = item
        if len(m) != p.potential.n or len(x) != p.k:
            raise ConfigError("point dimensions do not match the problem")
        out = toric.kempf_ness_solve(p, np.array(m), np.array(x), budget)
        rec = {"status": out.status, "iterations": out.iterations,
               "phi_residual": out.residual}
        for a, v in enumerate(out.t):
            rec[f"t{a}"] = float(v)
        # an unstable verdict is a completed classification, not a failed solve
        rec["residual"] = out.residual if out.status == "stable" else 0.0
        return rec

    records = _map(cfg, record, items)
    cols = ["status", "iterations"] + [f"t{a}" for a in range(p.k)] + ["phi_residual",
                                                                      "residual"]
    return cols, records, {"stable": sum(r["status"] == "stable" for r in records)}


PIPELINES = {
    "radial-check": run_radial_check,
    "cut-grid": run_cut_grid,
    "map-g": run_map_g,
    "einstein-check": run_einstein_check,
    "veff": run_veff,
    "polytope": run_polytope,
    "stability": run_stability,
}


def run(cfg):
    """Execute a configured pipeline; returns ``(report, exit_code)``.

    Module errors propagate to the caller; :func:`main` maps them to exit codes.
    """
    start = time.perf_counter()
    columns, records, extra = PIPELINES[cfg.command](cfg)
    report = RunReport(cfg.command, cfg.echo(), columns, records, cfg.effective_tolerance,
                       extra, time.perf_counter() - start)
    return report, 0 if report.passed else 1


def exit_code_for(exc):
    return 2 if isinstance(exc, CONFIG_ERRORS) else 1


def load_config(path, **overrides):
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from None
    return RunConfig.from_dict(data, base_dir=os.path.dirname(os.path.abspath(path)),
                               **overrides)


def build_parser():
    ap = argparse.ArgumentParser(prog="kcut", description="Numerical checks for Kähler cuts.")
    ap.add_argument("--config", required=True, help="JSON run configuration")
    ap.add_argument("--out", help="output path (default: stdout)")
    ap.add_argument("--format", choices=("json", "csv"), help="output format")
    ap.add_argument("--tolerance", type=float, help="override the pass tolerance")
    ap.add_argument("--seed", type=int, help="seed for sampled checks")
    ap.add_argument("--workers", type=int, help="worker threads (default: $KCUT_WORKERS or 1)")
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, out_path=args.out, fmt=args.format,
                          tolerance=args.tolerance, seed=args.seed, workers=args.workers)
        report, code = run(cfg)
        data = emit(report, cfg.fmt)
        if cfg.out_path:
            write_atomic(cfg.out_path, data)
        else:
            sys.stdout.buffer.write(data)
            sys.stdout.flush()
    except KcutError as exc:
        print(f"kcut: {exc}", file=sys.stderr)
        return exit_code_for(exc)
    except ValueError as exc:
        # malformed values inside an otherwise valid config
        print(f"kcut: [config-error] {exc}", file=sys.stderr)
        return 2
    verdict = "pass" if code == 0 else "FAIL"
    print(f"kcut {cfg.command}: {verdict} ({len(report.records)} points, max residual "
          f"{report.max_residual:.3e}, {report.wall_time:.2f}s)", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
