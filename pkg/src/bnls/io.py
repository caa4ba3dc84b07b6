"""Config parsing, series CSV, binary snapshots and run manifests.

Formats are contracts: TOML configs with sections [problem], [grid],
[run], [diagnostics], [output]; CSV series with %.17g floats (exact
round trip); snapshots as little-endian binary with magic "BNLS1",
u32 K, f64 r_max, f64 t, then K (re, im) float64 pairs.
"""

from __future__ import annotations

import json
import math
import struct
import sys
from typing import Optional

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import BnlsError
from .evolution import RunConfig
from .problem import Family, ProblemSpec

__all__ = [
    "ConfigError",
    "load_config",
    "spec_from_config",
    "grid_from_config",
    "run_config_from_config",
    "write_snapshot",
    "read_snapshot",
    "write_series_csv",
    "read_series_csv",
    "write_manifest",
    "read_manifest",
]

SNAPSHOT_MAGIC = b"BNLS1"


class ConfigError(BnlsError):
    """Config file missing, unparseable, or structurally wrong."""


def load_config(path) -> dict:
    """Parse a TOML config; raises ConfigError on any problem."""
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config {path} is not valid TOML: {exc}") from exc


def _section(cfg: dict, name: str, required=True) -> dict:
    sec = cfg.get(name)
    if sec is None:
        if required:
            raise ConfigError(f"config is missing the [{name}] section")
        return {}
    if not isinstance(sec, dict):
        raise ConfigError(f"[{name}] must be a table")
    return sec


def spec_from_config(cfg: dict) -> ProblemSpec:
    sec = _section(cfg, "problem")
    try:
        family = Family(sec["family"])
        return ProblemSpec(
            family=family,
            dim=int(sec["dim"]),
            b=float(sec["b"]),
            q=float(sec["q"]) if "q" in sec else None,
            p=float(sec["p"]) if "p" in sec else None,
            alpha=float(sec["alpha"]) if "alpha" in sec else None,
        )
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(f"bad [problem] section: {exc!r}") from exc


def grid_from_config(cfg: dict) -> tuple:
    """(K, r_max) from the [grid] section."""
    sec = _section(cfg, "grid")
    try:
        return int(sec["size"]), float(sec["r_max"])
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(f"bad [grid] section: {exc!r}") from exc


def run_config_from_config(cfg: dict) -> RunConfig:
    run = _section(cfg, "run")
    diag = _section(cfg, "diagnostics", required=False)
    try:
        return RunConfig(
            dt=float(run["dt"]),
            t_end=float(run["t_end"]),
            snapshot_every=int(run.get("snapshot_every", 0)),
            diagnostics_every=int(run.get("diagnostics_every", 10)),
            blowup_kinetic_factor=float(run.get("blowup_kinetic_factor", 1e4)),
            sup_norm_ceiling=float(run.get("sup_norm_ceiling", 1e6)),
            morawetz_R=tuple(diag.get("morawetz_R", ())),
            cutoff_R=tuple(diag.get("cutoff_R", ())),
            lr_exponents=tuple(diag.get("lr_exponents", ())),
            linear_only=bool(run.get("linear_only", False)),
        )
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(f"bad [run]/[diagnostics] section: {exc!r}") from exc


# ---------------------------------------------------------------- snapshots

def write_snapshot(path, t: float, r_max: float, values: np.ndarray) -> None:
    """Binary field snapshot: magic, u32 K, f64 r_max, f64 t, K (re, im)."""
    values = np.asarray(values, dtype=complex)
    K = values.shape[0]
    with open(path, "wb") as fh:
        fh.write(SNAPSHOT_MAGIC)
        fh.write(struct.pack("<Idd", K, r_max, t))
        inter = np.empty(2 * K, dtype="<f8")
        inter[0::2] = values.real
        inter[1::2] = values.imag
        fh.write(inter.tobytes())


def read_snapshot(path):
    """Returns (t, r_max, values) from a snapshot file."""
    with open(path, "rb") as fh:
        magic = fh.read(len(SNAPSHOT_MAGIC))
        if magic != SNAPSHOT_MAGIC:
            raise BnlsError(f"{path}: bad snapshot magic {magic!r}")
        K, r_max, t = struct.unpack("<Idd", fh.read(4 + 16))
        raw = np.frombuffer(fh.read(16 * K), dtype="<f8")
        if raw.shape[0] != 2 * K:
            raise BnlsError(f"{path}: truncated snapshot")
    return t, r_max, raw[0::2] + 1j * raw[1::2]


# ---------------------------------------------------------------- series CSV

def _series_columns(rec) -> list:
    cols = ["t", "mass", "energy", "kinetic", "potential", "constraint",
            "virial", "sup_norm", "boundary_mass"]
    cols += [f"morawetz_R{R:g}" for R in sorted(rec.morawetz)]
    cols += [f"local_mass_R{R:g}" for R in sorted(rec.local_mass)]
    cols += [f"l{r:g}_norm" for r in sorted(rec.lr_norms)]
    return cols


def _series_row(rec) -> list:
    row = [rec.t, rec.mass, rec.energy, rec.kinetic, rec.potential,
           rec.constraint, rec.virial, rec.sup_norm, rec.boundary_mass]
    row += [rec.morawetz[R] for R in sorted(rec.morawetz)]
    row += [rec.local_mass[R] for R in sorted(rec.local_mass)]
    row += [rec.lr_norms[r] for r in sorted(rec.lr_norms)]
    return row


def write_series_csv(path, series) -> None:
    """One row per diagnostics record; floats as %.17g (round-trip exact)."""
    if not series:
        raise BnlsError("cannot write an empty series")
    cols = _series_columns(series[0])
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(cols) + "\n")
        for rec in series:
            fh.write(",".join("%.17g" % v for v in _series_row(rec)) + "\n")


def read_series_csv(path):
    """Returns (column names, 2-D float array)."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    return header, data


# ---------------------------------------------------------------- manifests

def write_manifest(path, manifest: dict) -> None:
    # json would emit non-finite floats as bare NaN/Infinity literals,
    # which is not valid JSON; stringify them instead
    def clean(v):
        if isinstance(v, float) and not math.isfinite(v):
            return repr(v)
        if isinstance(v, dict):
            return {k: clean(x) for k, x in v.items()}
        if isinstance(v, (list, tuple)):
            return [clean(x) for x in v]
        return v

    with open(path, "w", encoding="utf-8") as fh:
        json.dump(clean(manifest), fh, indent=2, sort_keys=True,
                  allow_nan=False)
        fh.write("\n")


def read_manifest(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)
