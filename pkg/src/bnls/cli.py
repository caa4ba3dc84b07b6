"""Command-line surface: thresholds, ground-state, evolve, sweep.

Exit codes are a contract for sweep orchestration:
  0 success, 2 bad config, 3 spec violations, 4 no convergence,
  5 certification failure, 6 non-finite evolution, 7 refused clobber.
"""

from __future__ import annotations

import argparse
import dataclasses
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor, as_completed
from pathlib import Path

import numpy as np

from . import __version__
from .diagnostics import evacuation_scan, spacetime_bound_fit
from .errors import (
    BnlsError,
    CertificationFailure,
    DimensionTooSmall,
    NoConvergence,
    RunTooShort,
)
from .evolution import Outcome, evolve
from .functionals import me_mg
from .ground_state import certify, solve_ground_state
from .io import (
    ConfigError,
    grid_from_config,
    load_config,
    read_snapshot,
    run_config_from_config,
    spec_from_config,
    write_manifest,
    write_series_csv,
    write_snapshot,
)
from .problem import derive_exponents, theorem_window, validate_spec
from .radial import build_plan

EXIT_OK = 0
EXIT_BAD_CONFIG = 2
EXIT_SPEC_VIOLATION = 3
EXIT_NO_CONVERGENCE = 4
EXIT_CERTIFICATION = 5
EXIT_NON_FINITE = 6
EXIT_CLOBBER = 7


def _prepare_out(out) -> Path:
    """Create the output directory, refusing to reuse a nonempty one."""
    path = Path(out)
    if path.exists() and any(path.iterdir()):
        raise FileExistsError(path)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _spec_dict(spec) -> dict:
    d = dataclasses.asdict(spec)
    d["family"] = spec.family.value
    return d


def _derived_dict(d) -> dict:
    return {"s_c": d.s_c, "crit_lower": d.crit_lower,
            "crit_upper": d.crit_upper, "D": d.D, "E": d.E, "root": d.root}


def _base_manifest(spec, K, r_max, cfg) -> dict:
    return {
        "version": __version__,
        "spec": _spec_dict(spec),
        "derived": _derived_dict(derive_exponents(spec)),
        "grid": {"dim": spec.dim, "size": K, "r_max": r_max},
        "config": cfg,
    }


# ---------------------------------------------------------------- thresholds

def cmd_thresholds(args) -> int:
    cfg = load_config(args.config)
    spec = spec_from_config(cfg)
    violations = validate_spec(spec)
    if violations:
        print("spec violations:")
        for v in violations:
            print(f"  violated: {v}")
        return EXIT_SPEC_VIOLATION
    d = derive_exponents(spec)
    expo_name = "q" if spec.q is not None else "p"
    print(f"family        {spec.family.value}")
    print(f"N             {spec.dim}")
    print(f"b             {spec.b:g}")
    print(f"{expo_name}             {spec.nonlinearity_exponent():g}")
    if spec.alpha is not None:
        print(f"alpha         {spec.alpha:g}")
    print(f"s_c           {d.s_c:.12g}")
    print(f"critical pair ({d.crit_lower:.12g}, {d.crit_upper:.12g})")
    print(f"D, E          {d.D:.12g}, {d.E:.12g}")
    rc = EXIT_OK
    if d.root is None:
        print("threshold root unavailable: DimensionTooSmall (N < 5)")
        rc = EXIT_SPEC_VIOLATION
    else:
        w = theorem_window(spec)
        print(f"root          {d.root:.12g}")
        print(f"window        ({w.lower:.12g}, {w.upper:.12g})"
              f"{'  [empty]' if w.empty else ''}")
        print(f"inside window {w.contains}")
    if args.out:
        out = _prepare_out(args.out)
        report = _base_manifest(spec, 0, 0.0, cfg)
        if d.root is not None:
            w = theorem_window(spec)
            report["window"] = {"lower": w.lower, "upper": w.upper,
                                "contains": w.contains, "empty": w.empty}
        write_manifest(out / "thresholds.json", report)
    return rc


# -------------------------------------------------------------- ground state

def _solver_opts(cfg: dict) -> dict:
    run = cfg.get("run", {})
    return {
        "tol": float(run.get("tol", 1e-10)),
        "max_iter": int(run.get("max_iter", 2000)),
        "seed_width": float(run.get("seed_width", 1.0)),
        "refine": int(run.get("refine", 2)),
    }


def cmd_ground_state(args) -> int:
    cfg = load_config(args.config)
    spec = spec_from_config(cfg)
    violations = validate_spec(spec)
    if violations:
        print("spec violations: " + "; ".join(violations))
        return EXIT_SPEC_VIOLATION
    K, r_max = grid_from_config(cfg)
    out = _prepare_out(args.out)
    plan = build_plan(spec.dim, K, r_max)
    t0 = time.time()
    try:
        gs = solve_ground_state(spec, plan, **_solver_opts(cfg))
    except NoConvergence as exc:
        print(f"no convergence: {exc}")
        return EXIT_NO_CONVERGENCE
    try:
        rep = certify(spec, plan, gs)
    except CertificationFailure as exc:
        print(f"certification failure: {exc}")
        return EXIT_CERTIFICATION
    profile_path = out / "ground_state.bnls"
    write_snapshot(profile_path, 0.0, r_max, gs.profile.values)
    manifest = _base_manifest(spec, K, r_max, cfg)
    manifest.update({
        "wall_time": time.time() - t0,
        "outcome": "Certified",
        "files": {"profile": profile_path.name,
                  "certification": "certification.json"},
        "ground_state": {
            "residual": gs.residual, "iterations": gs.iterations,
            "mass": gs.mass, "kinetic": gs.kinetic, "energy": gs.energy,
            "potential": gs.potential, "sharp_constant": gs.sharp_constant,
        },
    })
    write_manifest(out / "certification.json", dataclasses.asdict(rep))
    write_manifest(out / "manifest.json", manifest)
    print(f"certified ground state: residual {gs.residual:.3e}, "
          f"sharp-constant defect {rep.sharp_constant_defect:.3e}")
    return EXIT_OK


# -------------------------------------------------------------------- evolve

def _random_smooth_field(plan, rng, amplitude: float):
    """Seeded random smooth radial field: low-mode spectral noise."""
    n_modes = min(24, plan.size)
    coef = rng.standard_normal(n_modes) * np.exp(-np.arange(n_modes) / 6.0)
    F = np.zeros(plan.size, dtype=complex)
    F[:n_modes] = coef
    from .radial import hankel_inverse
    vals = hankel_inverse(plan, plan.spectral_field(F)).values.real
    peak = float(np.max(np.abs(vals)))
    return plan.position_field(amplitude * vals / peak if peak else vals)


def _initial_field(cfg, spec, plan, seed):
    run = cfg.get("run", {})
    kind = run.get("initial", "gaussian")
    amplitude = float(run.get("amplitude", 1.0))
    gs = None
    if kind == "gaussian":
        width = float(run.get("width", 1.0))
        u0 = plan.position_field(
            amplitude * np.exp(-(plan.nodes / width) ** 2))
    elif kind == "ground-state":
        gs_file = run.get("ground_state_file")
        if gs_file:
            _, r_max, vals = read_snapshot(gs_file)
            if vals.shape[0] != plan.size or r_max != plan.r_max:
                raise ConfigError(
                    f"ground-state file grid ({vals.shape[0]}, {r_max}) does "
                    f"not match the plan ({plan.size}, {plan.r_max})")
            u0 = plan.position_field(amplitude * vals)
        else:
            gs = solve_ground_state(spec, plan, **_solver_opts(cfg))
            u0 = plan.position_field(amplitude * gs.profile.values)
    elif kind == "random":
        rng = np.random.default_rng(seed)
        u0 = _random_smooth_field(plan, rng, amplitude)
    else:
        raise ConfigError(f"unknown initial kind {kind!r}")
    return u0, gs


def cmd_evolve(args) -> int:
    cfg = load_config(args.config)
    spec = spec_from_config(cfg)
    violations = validate_spec(spec)
    if violations:
        print("spec violations: " + "; ".join(violations))
        return EXIT_SPEC_VIOLATION
    K, r_max = grid_from_config(cfg)
    run_cfg = run_config_from_config(cfg)
    out = _prepare_out(args.out)
    plan = build_plan(spec.dim, K, r_max)
    u0, gs = _initial_field(cfg, spec, plan, args.seed)
    t0 = time.time()
    result = evolve(spec, plan, u0, run_cfg)
    wall = time.time() - t0
    series_path = out / "series.csv"
    write_series_csv(series_path, result.series)
    snap_files = []
    for i, (t, field) in enumerate(result.snapshots):
        name = f"snapshot_{i:06d}.bnls"
        write_snapshot(out / name, t, r_max, field.values)
        snap_files.append(name)
    manifest = _base_manifest(spec, K, r_max, cfg)
    manifest.update({
        "wall_time": wall,
        "outcome": result.outcome.value,
        "trigger": result.trigger,
        "trigger_time": result.trigger_time,
        "files": {"series": series_path.name, "snapshots": snap_files},
    })
    if gs is not None:
        pair = me_mg(spec, plan, u0, gs)
        manifest["thresholds"] = {"me": pair.me, "mg": pair.mg,
                                  "negative_energy": pair.negative_energy}
    diag = cfg.get("diagnostics", {})
    eps = diag.get("evacuation_eps")
    if eps is not None and run_cfg.cutoff_R:
        R = float(diag.get("evacuation_R", run_cfg.cutoff_R[0]))
        times, running_min = evacuation_scan(result.series, R, float(eps))
        manifest["evacuation"] = {"R": R, "eps": float(eps), "times": times,
                                  "final_running_min": running_min[-1]}
    if result.outcome is Outcome.COMPLETED:
        try:
            fit = spacetime_bound_fit(result.series)
            manifest["spacetime_fit"] = {"exponent": fit.exponent,
                                         "r2": fit.r2}
        except RunTooShort:
            pass
    write_manifest(out / "manifest.json", manifest)
    print(f"outcome {result.outcome.value} after t={result.series[-1].t:g} "
          f"({wall:.1f}s)")
    return EXIT_NON_FINITE if result.outcome is Outcome.NON_FINITE else EXIT_OK


# --------------------------------------------------------------------- sweep

def _sweep_point(payload):
    """Worker: one (amplitude, exponent) sweep point; returns a row dict."""
    cfg, amplitude, expo, out_dir, seed = payload
    cfg = {k: (dict(v) if isinstance(v, dict) else v) for k, v in cfg.items()}
    prob = dict(cfg["problem"])
    if prob.get("family") == "local":
        prob["q"] = expo
    else:
        prob["p"] = expo
    cfg["problem"] = prob
    run = dict(cfg.get("run", {}))
    run["initial"] = run.get("initial", "ground-state")
    run["amplitude"] = amplitude
    cfg["run"] = run
    row = {"amplitude": amplitude, "exponent": expo, "me": math.nan,
           "mg": math.nan, "outcome": "Failed", "fit_exponent": math.nan,
           "error": ""}
    try:
        spec = spec_from_config(cfg)
        violations = validate_spec(spec)
        if violations:
            row["outcome"] = "InvalidSpec"
            row["error"] = "; ".join(violations)
            return row
        K, r_max = grid_from_config(cfg)
        run_cfg = run_config_from_config(cfg)
        plan = build_plan(spec.dim, K, r_max)
        u0, gs = _initial_field(cfg, spec, plan, seed)
        result = evolve(spec, plan, u0, run_cfg)
        row["outcome"] = result.outcome.value
        if gs is not None:
            pair = me_mg(spec, plan, u0, gs)
            row["me"] = pair.me if pair.me is not None else math.nan
            row["mg"] = pair.mg
        if result.outcome is Outcome.COMPLETED:
            try:
                row["fit_exponent"] = spacetime_bound_fit(result.series).exponent
            except RunTooShort:
                pass
        point_dir = Path(out_dir)
        point_dir.mkdir(parents=True, exist_ok=True)
        write_series_csv(point_dir / "series.csv", result.series)
        manifest = _base_manifest(spec, K, r_max, cfg)
        manifest.update({"outcome": result.outcome.value,
                         "files": {"series": "series.csv"},
                         "point": {"amplitude": amplitude, "exponent": expo}})
        write_manifest(point_dir / "manifest.json", manifest)
    except BnlsError as exc:
        row["outcome"] = "Failed"
        row["error"] = str(exc)
    return row


def cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    sweep = cfg.get("sweep")
    if not sweep or "amplitudes" not in sweep or "exponents" not in sweep:
        raise ConfigError("sweep needs [sweep] with amplitudes and exponents")
    amplitudes = [float(a) for a in sweep["amplitudes"]]
    exponents = [float(x) for x in sweep["exponents"]]
    out = _prepare_out(args.out)
    points = [(a, x) for a in amplitudes for x in exponents]
    payloads = [
        (cfg, a, x, str(out / f"point_a{a:g}_e{x:g}"), args.seed)
        for a, x in points
    ]
    workers = int(os.environ.get("BNLS_WORKERS", "0")) or min(len(points),
                                                             os.cpu_count())
    rows = []
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_sweep_point, p) for p in payloads]
            for fut in as_completed(futures):
                rows.append(fut.result())
    else:
        rows = [_sweep_point(p) for p in payloads]
    rows.sort(key=lambda r: (r["amplitude"], r["exponent"]))
    agg = out / "sweep.csv"
    with open(agg, "w", encoding="utf-8") as fh:
        fh.write("amplitude,exponent,me,mg,outcome,fit_exponent,error\n")
        for r in rows:
            fh.write("%.17g,%.17g,%.17g,%.17g,%s,%.17g,%s\n" %
                     (r["amplitude"], r["exponent"], r["me"], r["mg"],
                      r["outcome"], r["fit_exponent"],
                      r["error"].replace(",", ";")))
    print(f"{len(rows)} points -> {agg}")
    if all(r["outcome"] == "InvalidSpec" for r in rows):
        return EXIT_SPEC_VIOLATION
    ok = {"Completed", "BlowupSuspected"}
    return EXIT_OK if any(r["outcome"] in ok for r in rows) else EXIT_NON_FINITE


# ---------------------------------------------------------------------- main

def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="bnls",
        description="Radial spectral toolkit for the focusing inhomogeneous "
                    "biharmonic NLS and its Choquard variant.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in (("thresholds", cmd_thresholds),
                     ("ground-state", cmd_ground_state),
                     ("evolve", cmd_evolve),
                     ("sweep", cmd_sweep)):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True)
        p.add_argument("--out", default=None,
                       required=name not in ("thresholds",))
        p.add_argument("--seed", type=int, default=None)
        p.set_defaults(fn=fn)
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_BAD_CONFIG
    except FileExistsError as exc:
        print(f"refusing to clobber existing output: {exc}", file=sys.stderr)
        return EXIT_CLOBBER
    except NoConvergence as exc:
        print(f"no convergence: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    except CertificationFailure as exc:
        print(f"certification failure: {exc}", file=sys.stderr)
        return EXIT_CERTIFICATION


if __name__ == "__main__":
    sys.exit(main())
