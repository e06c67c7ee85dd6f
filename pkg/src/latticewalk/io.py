"""Experiment configuration and persistent result formats.

Config files are JSON with a fixed key set; unknown keys are an error, and
validation reports every problem at once rather than stopping at the first.
Results go to CSV (plot-friendly) or JSON (round-trip); both carry a stable
hash of the canonicalized config for provenance, and files are written to a
temporary name then atomically renamed.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .core import Dims
from .lattice import LatticePoint, Observable
from .measures import CurveSpec, DiagonalLawSpec, UnipotentLawSpec
from .walk import WalkConfig


class ConfigError(ValueError):
    """Carries the full list of validation errors for a config file."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


_TOP_KEYS = {"dims", "diagonal_law", "unipotent_law", "walk", "observables",
             "output"}
_DIMS_KEYS = {"k1", "k2"}
_DIAG_KEYS = {"alpha", "widths", "law"}
_UNI_KEYS = {"curve", "coefficients", "mixture", "aux"}
_AUX_KEYS = {"kind", "radius", "point"}
_WALK_KEYS = {"steps", "trials", "seed", "record_schedule"}
_OBS_KEYS = {"kind", "radius", "center", "width", "haar_mean"}
_OUT_KEYS = {"directory", "format"}


def _default_alpha(k0: int) -> list:
    """Evenly spaced decreasing means summing to zero (hence expanding for
    any block split)."""
    a = np.linspace(1.0, -1.0, k0) * (k0 - 1) / k0
    a -= a.mean()
    return [float(v) for v in a]


def _check_keys(d, allowed, where, errors) -> bool:
    if not isinstance(d, dict):
        errors.append(f"{where}: expected an object")
        return False
    for key in d:
        if key not in allowed:
            errors.append(f"{where}: unknown key {key!r}")
    return True


@dataclass(frozen=True)
class ExperimentConfig:
    raw: dict                    # normalized config with defaults filled
    dims: Dims
    diagonal_law: DiagonalLawSpec
    unipotent_law: UnipotentLawSpec
    steps: int
    trials: int
    seed: int
    record_schedule: tuple
    observables: tuple
    output_dir: str
    output_format: str

    def config_hash(self) -> str:
        return canonical_hash(self.raw)

    def walk_config(self, start: LatticePoint | None = None,
                    seed: int | None = None, trials: int | None = None,
                    steps: int | None = None) -> WalkConfig:
        steps = steps or self.steps
        sched = tuple(s for s in self.record_schedule if s <= steps) or (steps,)
        return WalkConfig(
            dims=self.dims,
            diagonal_law=self.diagonal_law,
            unipotent_law=self.unipotent_law,
            steps=steps,
            trials=trials or self.trials,
            seed=self.seed if seed is None else seed,
            start=start or LatticePoint.standard(self.dims),
            observables=self.observables,
            record_schedule=sched,
        )


def canonical_hash(obj) -> str:
    """Stable digest of a JSON-serializable object, key order independent."""
    blob = json.dumps(obj, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def normalize_config(data: dict) -> tuple[dict, list]:
    """Fill defaults and collect validation errors; returns (normalized, errors)."""
    errors: list[str] = []
    if not _check_keys(data, _TOP_KEYS, "top level", errors):
        return {}, errors

    dims_d = dict(data.get("dims", {}))
    _check_keys(dims_d, _DIMS_KEYS, "dims", errors)
    k1 = int(dims_d.get("k1", 1))
    k2 = int(dims_d.get("k2", 1))
    if k1 < 1 or k2 < 1:
        errors.append("dims: k1 and k2 must be >= 1")
        k1 = k2 = 1
    k0, k = k1 + k2, k1 * k2

    diag = dict(data.get("diagonal_law", {}))
    _check_keys(diag, _DIAG_KEYS, "diagonal_law", errors)
    alpha = [float(v) for v in diag.get("alpha", _default_alpha(k0))]
    widths_in = diag.get("widths", 0.2)
    if isinstance(widths_in, (int, float)):
        widths = [float(widths_in)] * k0
    else:
        widths = [float(v) for v in widths_in]
    law_kind = diag.get("law", "uniform_box")
    if len(alpha) != k0:
        errors.append(f"diagonal_law: alpha must have length {k0}")
    elif abs(sum(alpha)) > 1e-12:
        errors.append(
            f"diagonal_law: means must sum to zero (got {sum(alpha)!r})")
    else:
        b = np.array(alpha)
        gaps = b[:k1][:, None] - b[k1:][None, :]
        for i, j in np.argwhere(gaps <= 0):
            errors.append(
                f"diagonal_law: not asymptotically U-expanding at "
                f"(i,j)=({int(i)+1},{int(j)+k1+1}): "
                f"alpha_{int(i)+1}-alpha_{int(j)+k1+1} = {gaps[i, j]!r} <= 0")
    if len(widths) != k0:
        errors.append(f"diagonal_law: widths must have length {k0}")
    if law_kind not in ("uniform_box", "discrete_two_point"):
        errors.append(f"diagonal_law: unknown law {law_kind!r}")

    uni = dict(data.get("unipotent_law", {}))
    _check_keys(uni, _UNI_KEYS, "unipotent_law", errors)
    curve_kind = uni.get("curve", "moment")
    if curve_kind not in ("moment", "planar_demo", "constant_demo",
                          "custom_polynomial"):
        errors.append(f"unipotent_law: unknown curve {curve_kind!r}")
    coeffs = uni.get("coefficients", [])
    if curve_kind == "custom_polynomial" and len(coeffs) != k:
        errors.append(f"unipotent_law: coefficient table needs {k} rows")
    mixture = float(uni.get("mixture", 0.0))
    if not 0.0 <= mixture <= 1.0:
        errors.append("unipotent_law: mixture must lie in [0, 1]")
    aux = dict(uni.get("aux", {"kind": "none"}))
    _check_keys(aux, _AUX_KEYS, "unipotent_law.aux", errors)
    aux_kind = aux.get("kind", "none")
    if aux_kind not in ("none", "uniform_ball", "point_mass"):
        errors.append(f"unipotent_law.aux: unknown kind {aux_kind!r}")
    if mixture > 0 and aux_kind == "none":
        errors.append("unipotent_law: mixture > 0 requires an auxiliary law")

    walk = dict(data.get("walk", {}))
    _check_keys(walk, _WALK_KEYS, "walk", errors)
    steps = int(walk.get("steps", 40))
    trials = int(walk.get("trials", 1000))
    seed = int(walk.get("seed", 0))
    sched = [int(s) for s in walk.get("record_schedule", [steps])]
    if steps < 1 or trials < 1:
        errors.append("walk: steps and trials must be >= 1")
    if any(s < 1 or s > steps for s in sched):
        errors.append("walk: record_schedule must lie within 1..steps")

    obs_in = data.get("observables", [{"kind": "siegel_count", "radius": 1.5}])
    obs_out = []
    if not isinstance(obs_in, list):
        errors.append("observables: expected a list")
        obs_in = []
    for idx, o in enumerate(obs_in):
        o = dict(o) if isinstance(o, dict) else {}
        _check_keys(o, _OBS_KEYS, f"observables[{idx}]", errors)
        kind = o.get("kind", "siegel_count")
        if kind not in ("siegel_count", "shortest_bump", "shortest_log"):
            errors.append(f"observables[{idx}]: unknown kind {kind!r}")
        entry = {"kind": kind}
        if kind == "siegel_count":
            entry["radius"] = float(o.get("radius", 1.5))
            if entry["radius"] <= 0:
                errors.append(f"observables[{idx}]: radius must be > 0")
        if kind == "shortest_bump":
            entry["center"] = float(o.get("center", 1.0))
            entry["width"] = float(o.get("width", 0.5))
            if entry["width"] <= 0:
                errors.append(f"observables[{idx}]: width must be > 0")
        if "haar_mean" in o:
            entry["haar_mean"] = float(o["haar_mean"])
        obs_out.append(entry)

    out = dict(data.get("output", {}))
    _check_keys(out, _OUT_KEYS, "output", errors)
    out_dir = str(out.get("directory", "results"))
    out_fmt = str(out.get("format", "csv"))
    if out_fmt not in ("csv", "json"):
        errors.append(f"output: unknown format {out_fmt!r}")

    normalized = {
        "dims": {"k1": k1, "k2": k2},
        "diagonal_law": {"alpha": alpha, "widths": widths, "law": law_kind},
        "unipotent_law": {"curve": curve_kind, "coefficients": coeffs,
                          "mixture": mixture,
                          "aux": {"kind": aux_kind,
                                  "radius": float(aux.get("radius", 1.0)),
                                  "point": list(aux.get("point", []))}},
        "walk": {"steps": steps, "trials": trials, "seed": seed,
                 "record_schedule": sched},
        "observables": obs_out,
        "output": {"directory": out_dir, "format": out_fmt},
    }
    return normalized, errors


def build_config(data: dict) -> ExperimentConfig:
    normalized, errors = normalize_config(data)
    if errors:
        raise ConfigError(errors)
    dims = Dims(normalized["dims"]["k1"], normalized["dims"]["k2"])
    d = normalized["diagonal_law"]
    diag = DiagonalLawSpec(dims, np.array(d["alpha"]), np.array(d["widths"]),
                           law=d["law"])
    u = normalized["unipotent_law"]
    curve = CurveSpec(u["curve"], dims, tuple(map(tuple, u["coefficients"]))
                      if u["coefficients"] else ())
    aux = u["aux"]
    uni = UnipotentLawSpec(curve, mixture=u["mixture"], aux_kind=aux["kind"],
                           aux_radius=aux["radius"],
                           aux_point=tuple(aux["point"]))
    obs = []
    for o in normalized["observables"]:
        obs.append(Observable(kind=o["kind"], radius=o.get("radius", 0.0),
                              center=o.get("center", 0.0),
                              width=o.get("width", 0.0),
                              haar_mean_ref=o.get("haar_mean")))
    w = normalized["walk"]
    return ExperimentConfig(
        raw=normalized, dims=dims, diagonal_law=diag, unipotent_law=uni,
        steps=w["steps"], trials=w["trials"], seed=w["seed"],
        record_schedule=tuple(w["record_schedule"]), observables=tuple(obs),
        output_dir=normalized["output"]["directory"],
        output_format=normalized["output"]["format"])


def parse_config(path) -> ExperimentConfig:
    """Load, validate, and normalize a config file."""
    if not os.path.exists(path):
        raise ConfigError([f"config file not found: {path}"])
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as err:
            raise ConfigError([f"config is not valid JSON: {err}"])
    return build_config(data)


# ---------------------------------------------------------------------------
# result records

SCHEMAS = {
    "estimates": ("n", "observable", "mean", "stderr", "trials", "aborted"),
    "rate": ("observable", "eta_hat", "c_hat", "r2", "eta_lo", "eta_hi",
             "n_min", "n_max"),
    "tails": ("n", "prob", "lo", "hi", "trials"),
    "density": ("bin_lo", "bin_hi", "hist_mass", "analytic_mass", "density"),
}

_INT_COLUMNS = {"n", "trials", "aborted", "n_min", "n_max"}


@dataclass(frozen=True)
class ResultSet:
    """One batch of result rows of a single kind, with provenance metadata."""

    kind: str
    rows: tuple                  # tuples matching SCHEMAS[kind]
    config_hash: str = ""
    seed: int = 0
    engine_version: str = __version__

    def __post_init__(self):
        if self.kind not in SCHEMAS:
            raise ValueError(f"unknown result kind {self.kind!r}")
        cols = SCHEMAS[self.kind]
        rows = []
        for r in self.rows:
            if len(r) != len(cols):
                raise ValueError(
                    f"row {r!r} does not match schema {cols} of {self.kind!r}")
            rows.append(tuple(r))
        object.__setattr__(self, "rows", tuple(_sorted_rows(self.kind, rows)))


def _sorted_rows(kind, rows):
    cols = SCHEMAS[kind]
    if "n" in cols:
        ni = cols.index("n")
        oi = cols.index("observable") if "observable" in cols else None
        return sorted(rows, key=lambda r: (r[ni], r[oi]) if oi is not None
                      else (r[ni],))
    if "observable" in cols:
        oi = cols.index("observable")
        return sorted(rows, key=lambda r: r[oi])
    return sorted(rows)


def _fmt(value) -> str:
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def _atomic_write(path, text):
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def emit_results(results: ResultSet, fmt: str, path) -> None:
    """Write one result set; CSV has exactly one header row plus a leading
    provenance comment; rows are deterministically ordered."""
    if fmt == "csv":
        lines = [f"# kind={results.kind} config_hash={results.config_hash} "
                 f"engine_version={results.engine_version} seed={results.seed}"]
        lines.append(",".join(SCHEMAS[results.kind]))
        for row in results.rows:
            lines.append(",".join(_fmt(v) for v in row))
        _atomic_write(path, "\n".join(lines) + "\n")
    elif fmt == "json":
        payload = {
            "kind": results.kind,
            "config_hash": results.config_hash,
            "engine_version": results.engine_version,
            "seed": results.seed,
            "columns": list(SCHEMAS[results.kind]),
            "rows": [list(r) for r in results.rows],
        }
        _atomic_write(path, json.dumps(payload, indent=2) + "\n")
    else:
        raise ValueError(f"unknown format {fmt!r}")


def parse_results(path) -> ResultSet:
    """Inverse of emit_results for both formats."""
    with open(path) as fh:
        text = fh.read()
    if text.lstrip().startswith("{"):
        payload = json.loads(text)
        rows = [tuple(r) for r in payload["rows"]]
        return ResultSet(kind=payload["kind"], rows=tuple(rows),
                         config_hash=payload["config_hash"],
                         seed=payload["seed"],
                         engine_version=payload["engine_version"])
    lines = [ln for ln in text.splitlines() if ln.strip()]
    meta = {}
    if lines and lines[0].startswith("#"):
        for tok in lines.pop(0).lstrip("# ").split():
            if "=" in tok:
                key, val = tok.split("=", 1)
                meta[key] = val
    header = lines.pop(0).split(",")
    kind = meta.get("kind")
    if kind is None:
        for name, cols in SCHEMAS.items():
            if list(cols) == header:
                kind = name
                break
    if kind is None or list(SCHEMAS[kind]) != header:
        raise ValueError(f"unrecognized result schema in {path}: {header}")
    rows = []
    for ln in lines:
        parts = ln.split(",")
        row = []
        for col, val in zip(header, parts):
            if col in _INT_COLUMNS:
                row.append(int(val))
            elif col == "observable":
                row.append(val)
            else:
                row.append(float(val))
        rows.append(tuple(row))
    return ResultSet(kind=kind, rows=tuple(rows),
                     config_hash=meta.get("config_hash", ""),
                     seed=int(meta.get("seed", 0)),
                     engine_version=meta.get("engine_version", __version__))
