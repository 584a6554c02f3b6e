"""Scenario files: parsing, validation, execution and report writing.

A scenario is a YAML (or JSON) mapping::

    name: off-center
    kind: oracle            # wmicro | minimize | oracle | sweep | annulus
    seed: 0                 # optional, RENORM_MICRO_SEED overrides it
    output: results/offc    # optional prefix, relative to the scenario file
    payload: {...}          # kind-specific, see docs/formats.md

Running one writes ``<prefix>.csv`` and ``<prefix>.meta.json``.  The CSV
depends only on the scenario and the seed; wall times and timestamps go to
the meta file.
"""

from __future__ import annotations

import csv
import hashlib
import io
import itertools
import json
import math
import os
import platform
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from importlib import metadata
from pathlib import Path
from typing import Any, Callable, Optional, Sequence

import jsonschema
import numpy as np
import yaml

from . import disk_energy as de
from .core import DomainSpec, Impurity, OutsideField, PinningWeight, VortexConfig, validate_config
from .errors import ComputeError, ParseError, RenormMicroError, ScenarioError, ValidationError
from .minimize import SolverOptions, Status, minimize_numeric
from .oracle import GridOptions, annulus_comparison, oracle_run, richardson

__all__ = [
    "KINDS",
    "SEED_ENV",
    "Scenario",
    "RunResult",
    "load_scenario",
    "parse_scenario",
    "run_scenario",
    "execute",
    "format_value",
    "write_report",
    "regime_table",
]

SEED_ENV = "RENORM_MICRO_SEED"
KINDS = ("wmicro", "minimize", "oracle", "sweep", "annulus")

# ---------------------------------------------------------------------------
# schemas

_NUM = {"type": "number"}
_POS = {"type": "number", "exclusiveMinimum": 0}
_INT = {"type": "integer"}
_POINT = {"oneOf": [_NUM, {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2}]}
_POINTS = {"type": "array", "items": _POINT, "minItems": 1}
_DEGREES = {"type": "array", "items": _INT, "minItems": 1}
_CONFIG = {"type": "object", "required": ["points", "degrees"], "additionalProperties": False,
           "properties": {"points": _POINTS, "degrees": _DEGREES}}
_WEIGHT = {
    "type": "object", "required": ["kind"], "additionalProperties": False,
    "properties": {
        "kind": {"enum": ["disk", "checkerboard", "radial_stripes", "angular_sectors",
                          "polar_checkerboard", "constant"]},
        "b": _POS, "B": _POS, "cell": _POS, "ratio": _POS, "count": {"type": "integer", "minimum": 1},
        "value": _POS,
    },
}

PAYLOAD_SCHEMAS: dict[str, dict] = {
    "wmicro": {
        "type": "object", "additionalProperties": False,
        "properties": {
            "configs": {"type": "array", "items": _CONFIG, "minItems": 1},
            "points": _POINTS, "degrees": _DEGREES,
            "b": {"oneOf": [_POS, {"type": "array", "items": _POS, "minItems": 1}]},
            "tol": _POS,
        },
        "required": ["b"],
    },
    "minimize": {
        "type": "object", "additionalProperties": False, "required": ["degrees", "b"],
        "properties": {"degrees": _DEGREES, "b": _POS,
                       "n_starts": {"type": "integer", "minimum": 1},
                       "max_iters": {"type": "integer", "minimum": 1}},
    },
    "oracle": {
        "type": "object", "additionalProperties": False,
        "required": ["points", "degrees", "b", "R", "rho"],
        "properties": {"points": _POINTS, "degrees": _DEGREES, "b": _POS, "R": _POS, "rho": _POS,
                       "levels": {"type": "integer", "minimum": 1, "maximum": 5}, "h0": _POS,
                       "geometry": {"enum": ["logpolar", "cartesian"]},
                       "fine_half": _POS, "kappa": _POS, "dzeta": _POS, "h_core": _POS},
    },
    "annulus": {
        "type": "object", "additionalProperties": False, "required": ["weights"],
        "properties": {"weights": {"type": "array", "items": _WEIGHT, "minItems": 1},
                       "r": _POS, "ratios": {"type": "array", "items": _POS, "minItems": 1},
                       "h": _POS, "levels": {"type": "integer", "minimum": 0, "maximum": 3}},
    },
    "sweep": {
        "type": "object", "additionalProperties": False, "required": ["base", "vary"],
        "properties": {
            "base": {"type": "object", "required": ["kind", "payload"], "additionalProperties": False,
                     "properties": {"kind": {"enum": ["wmicro", "minimize", "oracle", "annulus"]},
                                    "payload": {"type": "object"}}},
            "vary": {"type": "object", "minProperties": 1,
                     "additionalProperties": {"type": "array", "minItems": 1}},
        },
    },
}

SCENARIO_SCHEMA = {
    "type": "object", "additionalProperties": False, "required": ["name", "kind", "payload"],
    "properties": {"name": {"type": "string", "minLength": 1}, "kind": {"enum": list(KINDS)},
                   "payload": {"type": "object"}, "output": {"type": "string", "minLength": 1},
                   "seed": {"type": "integer", "minimum": 0}},
}

# ---------------------------------------------------------------------------
# formatting


def format_value(v: Any) -> str:
    """Canonical CSV text: 17 significant digits for floats."""
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        x = float(v) + 0.0  # drop the sign of zero
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return format(x, ".17g")
    return str(v)


def _join(values: Sequence[Any]) -> str:
    return ";".join(format_value(v) for v in values)


def _points_columns(points: Sequence[complex]) -> dict[str, str]:
    return {"points_re": _join([p.real for p in points]), "points_im": _join([p.imag for p in points])}


# ---------------------------------------------------------------------------
# parsing and validation

@dataclass(frozen=True)
class Scenario:
    name: str
    kind: str
    payload: dict
    seed: int
    seed_source: str  # "env", "config" or "default"
    source: Optional[Path] = None
    output: Optional[str] = None


def _as_point(p) -> complex:
    return complex(p[0], p[1]) if isinstance(p, list) else complex(p)


def _schema_check(doc: Any, schema: dict, name: str, where: str) -> None:
    v = jsonschema.Draft7Validator(schema)
    errors = sorted(v.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        path = "/".join(str(x) for x in e.absolute_path)
        raise ValidationError(f"{where}{'/' + path if path else ''}: {e.message}", name,
                              {"path": [where] + list(e.absolute_path), "count": len(errors)})


def parse_scenario(text: str, source: Optional[Path] = None,
                   env: Optional[dict] = None) -> Scenario:
    """Parse and schema-check a scenario document (no computation)."""
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ParseError(f"not valid YAML: {exc}", "", {"source": str(source)}) from None
    if not isinstance(doc, dict):
        raise ParseError("a scenario must be a mapping", "", {"source": str(source)})
    name = str(doc.get("name", ""))
    _schema_check(doc, SCENARIO_SCHEMA, name, "scenario")
    env = os.environ if env is None else env
    if env.get(SEED_ENV, "") != "":
        try:
            seed = int(env[SEED_ENV])
        except ValueError:
            raise ValidationError(f"{SEED_ENV} must be an integer", name) from None
        if seed < 0:
            raise ValidationError(f"{SEED_ENV} must be non-negative", name)
        src = "env"
    elif "seed" in doc:
        seed, src = int(doc["seed"]), "config"
    else:
        seed, src = 0, "default"
    sc = Scenario(name=name, kind=doc["kind"], payload=doc["payload"], seed=seed, seed_source=src,
                  source=source, output=doc.get("output"))
    validate_payload(sc.kind, sc.payload, name)
    return sc


def load_scenario(path: str | os.PathLike, env: Optional[dict] = None) -> Scenario:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {p}: {exc.strerror}", "", {"source": str(p)}) from None
    return parse_scenario(text, p, env)


def _weight(entry: dict) -> PinningWeight:
    kind = entry["kind"]
    B = entry.get("B", 0.5)
    if kind == "disk":
        return PinningWeight.disk(entry.get("b", 0.5), entry.get("B"))
    if kind == "checkerboard":
        # no impurity: the annulus study only sees the outside field
        return PinningWeight(b=1.0, B=B, impurity=None, name=f"checkerboard(B={B:g})",
                             outside=OutsideField("checkerboard", B ** 2, B ** -2, entry.get("cell", 1.0)))
    if kind == "radial_stripes":
        return PinningWeight.radial_stripes(B, entry.get("ratio", 2.0))
    if kind == "angular_sectors":
        return PinningWeight.angular_sectors(B, entry.get("count", 4))
    if kind == "polar_checkerboard":
        return PinningWeight.polar_checkerboard(B, entry.get("ratio", 2.0), entry.get("count", 8))
    return PinningWeight.constant(entry.get("value", 1.0), B)


def _weight_label(entry: dict) -> str:
    return json.dumps(entry, sort_keys=True, separators=(",", ":"))


def _configs(payload: dict) -> list[VortexConfig]:
    if "configs" in payload:
        items = payload["configs"]
    else:
        items = [{"points": payload["points"], "degrees": payload["degrees"]}]
    return [VortexConfig([_as_point(p) for p in c["points"]], c["degrees"]) for c in items]


def _oracle_inputs(payload: dict) -> tuple[DomainSpec, VortexConfig, PinningWeight, float, GridOptions]:
    cfg = _configs(payload)[0]
    dom = DomainSpec(Impurity(), float(payload["R"]), float(payload["rho"]))
    w = PinningWeight.disk(float(payload["b"]))
    h0 = float(payload.get("h0", dom.rho / 8))
    opts = {k: payload[k] for k in ("geometry", "fine_half", "kappa", "dzeta", "h_core") if k in payload}
    return dom, cfg, w, h0, GridOptions(**opts)


def validate_payload(kind: str, payload: dict, name: str = "") -> None:
    """Schema plus semantic checks; raises ValidationError before any computation."""
    _schema_check(payload, PAYLOAD_SCHEMAS[kind], name, "payload")
    try:
        if kind == "wmicro":
            if ("configs" in payload) == ("points" in payload or "degrees" in payload):
                raise ValueError("give either 'configs' or 'points' with 'degrees'")
            if "points" in payload and "degrees" not in payload or "degrees" in payload and "points" not in payload:
                raise ValueError("'points' and 'degrees' go together")
            for cfg in _configs(payload):
                validate_config(cfg)
        elif kind == "minimize":
            pass
        elif kind == "oracle":
            dom, cfg, w, h0, _ = _oracle_inputs(payload)
            validate_config(cfg, dom)
            if h0 > dom.rho / 8 * (1 + 1e-12):
                raise ValueError(f"h0={h0} exceeds rho/8")
        elif kind == "annulus":
            r = payload.get("r", 1.0)
            for ratio in payload.get("ratios", [4, 16, 64]):
                if not ratio > 1:
                    raise ValueError("ratios must exceed 1")
            for entry in payload["weights"]:
                _weight(entry).check(extent=r * max(payload.get("ratios", [64])))
        elif kind == "sweep":
            base = payload["base"]
            keys = list(payload["vary"])
            unknown = [k for k in keys if k not in PAYLOAD_SCHEMAS[base["kind"]]["properties"]]
            if unknown:
                raise ValueError(f"cannot vary unknown keys {unknown}")
            for i, sub in enumerate(_sweep_cases(payload)):
                validate_payload(base["kind"], sub, f"{name}[{i}]")
    except ValidationError:
        raise
    except (RenormMicroError, ValueError, TypeError) as exc:
        raise ValidationError(str(exc), name, {"type": type(exc).__name__}) from None


def _sweep_cases(payload: dict) -> list[dict]:
    vary = payload["vary"]
    keys = list(vary)
    cases = []
    for combo in itertools.product(*(vary[k] for k in keys)):
        sub = dict(payload["base"]["payload"])
        sub.update(zip(keys, combo))
        cases.append(sub)
    return cases


# ---------------------------------------------------------------------------
# execution: each kind returns (columns, rows, timings)

Rows = list[dict[str, Any]]


def _run_wmicro(name: str, payload: dict, seed: int) -> tuple[list[str], Rows, list[float]]:
    cols = ["scenario", "config", "points_re", "points_im", "degrees", "b", "tol", "W", "k_min",
            "w_micro_closed", "w_micro_series", "abs_difference"]
    bs = payload["b"] if isinstance(payload["b"], list) else [payload["b"]]
    tol = float(payload.get("tol", 1e-12))
    rows, times = [], []
    for i, cfg in enumerate(_configs(payload)):
        for b in bs:
            t0 = time.perf_counter()
            W = de.lr_renormalized_energy(cfg)
            k = de.k_min(cfg, b, tol)
            closed = de.w_micro_closed(cfg, b)
            series = b * b * W + k
            rows.append({"scenario": name, "config": i, **_points_columns(cfg.points),
                         "degrees": _join(cfg.degrees), "b": float(b), "tol": tol, "W": W, "k_min": k,
                         "w_micro_closed": closed, "w_micro_series": series,
                         "abs_difference": abs(series - closed)})
            times.append(time.perf_counter() - t0)
    return cols, rows, times


def _run_minimize(name: str, payload: dict, seed: int) -> tuple[list[str], Rows, list[float]]:
    cols = ["scenario", "degrees", "b", "seed", "n_starts", "regime", "status", "value", "points_re",
            "points_im", "grad_norm", "bound_lo", "bound_hi", "witness", "witness_energies"]
    opts = SolverOptions(seed=seed, n_starts=int(payload.get("n_starts", 32)),
                         max_iters=int(payload.get("max_iters", 400)))
    t0 = time.perf_counter()
    res = minimize_numeric(payload["degrees"], float(payload["b"]), opts)
    row = {"scenario": name, "degrees": _join(payload["degrees"]), "b": float(payload["b"]),
           "seed": seed, "n_starts": opts.n_starts, "regime": res.regime.value if res.regime else "",
           "status": res.status.value, "value": res.value, "grad_norm": res.grad_norm,
           "points_re": "", "points_im": "", "bound_lo": None, "bound_hi": None,
           "witness": "", "witness_energies": ""}
    if res.points is not None:
        row.update(_points_columns(res.points))
    if res.bounds is not None:
        row["bound_lo"], row["bound_hi"] = res.bounds
    if res.witness_path is not None:
        row["witness"] = res.witness_path.description
        row["witness_energies"] = ";".join(f"{n}:{format_value(e)}" for n, e in res.witness_path.samples)
    return cols, [row], [time.perf_counter() - t0]


ORACLE_COLUMNS = ["scenario", "points_re", "points_im", "degrees", "b", "R", "rho", "geometry", "level",
                  "h", "n_nodes", "energy", "f_R", "core", "w_micro", "residual", "iterations",
                  "residual_extrapolated", "residual_error_estimate"]


def _run_oracle(name: str, payload: dict, seed: int) -> tuple[list[str], Rows, list[float]]:
    dom, cfg, w, h0, opts = _oracle_inputs(payload)
    levels = int(payload.get("levels", 3))
    recs = [oracle_run(dom, cfg, w, h0, k, opts) for k in range(levels)]
    extrap = richardson([r.residual for r in recs]) if levels > 1 else None
    d = cfg.d
    core = w.b ** 2 * math.pi * float(np.sum(d * d)) * abs(math.log(dom.rho))
    wm = de.w_micro_closed(cfg, w.b)
    rows = []
    for r in recs:
        rows.append({"scenario": name, **_points_columns(cfg.points), "degrees": _join(cfg.degrees),
                     "b": w.b, "R": r.R, "rho": r.rho, "geometry": opts.geometry, "level": r.level,
                     "h": r.h, "n_nodes": r.n_nodes, "energy": r.energy, "f_R": r.f_R, "core": core,
                     "w_micro": wm, "residual": r.residual, "iterations": r.iterations,
                     "residual_extrapolated": extrap.value if extrap else None,
                     "residual_error_estimate": extrap.error_estimate if extrap else None})
    return ORACLE_COLUMNS, rows, [r.wall_time for r in recs]


def _run_annulus(name: str, payload: dict, seed: int) -> tuple[list[str], Rows, list[float]]:
    cols = ["scenario", "weight", "r", "R", "ratio", "h", "level", "n_nodes", "mu", "mu_dir", "gap",
            "theta0", "pi_log_ratio"]
    r = float(payload.get("r", 1.0))
    h = float(payload.get("h", 2 * math.pi / 256 * r))
    level = int(payload.get("levels", 0))
    rows, times = [], []
    for entry in payload["weights"]:
        w = _weight(entry)
        for ratio in payload.get("ratios", [4, 16, 64]):
            t0 = time.perf_counter()
            res = annulus_comparison(w, r, r * ratio, h, level)
            rows.append({"scenario": name, "weight": _weight_label(entry), "r": r, "R": res.R,
                         "ratio": float(ratio), "h": res.h, "level": level, "n_nodes": res.n_nodes,
                         "mu": res.mu, "mu_dir": res.mu_dir, "gap": res.gap, "theta0": res.theta0,
                         "pi_log_ratio": math.pi * math.log(ratio)})
            times.append(time.perf_counter() - t0)
    return cols, rows, times


_RUNNERS: dict[str, Callable[[str, dict, int], tuple[list[str], Rows, list[float]]]] = {
    "wmicro": _run_wmicro,
    "minimize": _run_minimize,
    "oracle": _run_oracle,
    "annulus": _run_annulus,
}


def _run_case(args: tuple[str, str, dict, int]):
    kind, name, payload, seed = args
    try:
        return _RUNNERS[kind](name, payload, seed)
    except ScenarioError:
        raise
    except Exception as exc:  # wrap module errors with the scenario name
        raise ComputeError(f"{type(exc).__name__}: {exc}", name, {"type": type(exc).__name__}) from exc


def _run_sweep(name: str, payload: dict, seed: int, jobs: int) -> tuple[list[str], Rows, list[float]]:
    kind = payload["base"]["kind"]
    keys = list(payload["vary"])
    cases = _sweep_cases(payload)
    args = [(kind, f"{name}[{i}]", sub, seed) for i, sub in enumerate(cases)]
    if jobs > 1 and len(args) > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, len(args))) as pool:
            results = list(pool.map(_run_case, args))
    else:
        results = [_run_case(a) for a in args]
    cols = ["case"] + [f"vary.{k}" for k in keys] + results[0][0]
    rows, times = [], []
    for i, ((_, sub_rows, sub_times), sub) in enumerate(zip(results, cases)):
        for row in sub_rows:
            vary = {f"vary.{k}": _vary_text(sub[k]) for k in keys}
            rows.append({"case": i, **vary, **row})
        times.extend(sub_times)
    return cols, rows, times


def _vary_text(v: Any) -> str:
    if isinstance(v, (list, dict)):
        return json.dumps(v, sort_keys=True, separators=(",", ":"))
    return format_value(v)


def execute(sc: Scenario, jobs: int = 1) -> tuple[list[str], Rows, list[float]]:
    """Run a validated scenario and return (columns, rows, per-row wall times)."""
    if sc.kind == "sweep":
        try:
            return _run_sweep(sc.name, sc.payload, sc.seed, jobs)
        except ScenarioError:
            raise
        except Exception as exc:
            raise ComputeError(f"{type(exc).__name__}: {exc}", sc.name,
                               {"type": type(exc).__name__}) from exc
    return _run_case((sc.kind, sc.name, sc.payload, sc.seed))


# ---------------------------------------------------------------------------
# writing

def _atomic_write(path: Path, data: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def csv_bytes(columns: Sequence[str], rows: Rows) -> bytes:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(columns)
    for row in rows:
        wr.writerow([format_value(row.get(c)) for c in columns])
    return buf.getvalue().encode("utf-8")


def _versions() -> dict[str, str]:
    out = {"python": platform.python_version()}
    for pkg in ("renorm-micro", "numpy", "scipy", "cvxopt", "pyyaml", "jsonschema"):
        try:
            out[pkg] = metadata.version(pkg)
        except metadata.PackageNotFoundError:
            out[pkg] = "unknown"
    return out


def write_report(prefix: Path, columns: Sequence[str], rows: Rows, meta: dict) -> tuple[Path, Path]:
    """Write ``<prefix>.csv`` and ``<prefix>.meta.json`` atomically."""
    data = csv_bytes(columns, rows)
    csv_path = prefix.with_name(prefix.name + ".csv")
    meta_path = prefix.with_name(prefix.name + ".meta.json")
    _atomic_write(csv_path, data)
    meta = dict(meta, csv=csv_path.name, rows=len(rows), columns=list(columns),
                csv_sha256=hashlib.sha256(data).hexdigest())
    _atomic_write(meta_path, (json.dumps(meta, indent=2, sort_keys=True) + "\n").encode("utf-8"))
    return csv_path, meta_path


def write_error(prefix: Optional[Path], err: ScenarioError) -> Optional[Path]:
    if prefix is None:
        return None
    path = prefix.with_name(prefix.name + ".error.json")
    _atomic_write(path, (json.dumps(err.record(), indent=2, sort_keys=True) + "\n").encode("utf-8"))
    return path


@dataclass
class RunResult:
    csv_path: Path
    meta_path: Path
    columns: list[str]
    rows: Rows = field(default_factory=list)


def output_prefix(sc: Optional[Scenario], path: Path, out: Optional[str]) -> Path:
    if out:
        return Path(out)
    if sc is not None and sc.output:
        p = Path(sc.output)
        return p if p.is_absolute() else path.parent / p
    return path.with_suffix("")


def run_scenario(path: str | os.PathLike, out: Optional[str] = None, jobs: int = 1,
                 env: Optional[dict] = None) -> RunResult:
    """Parse, validate, run and write one scenario file.

    Raises ParseError, ValidationError or ComputeError; the caller decides how
    to report them.
    """
    path = Path(path)
    started = datetime.now(timezone.utc).isoformat(timespec="seconds")
    t0 = time.perf_counter()
    sc = load_scenario(path, env)
    columns, rows, times = execute(sc, jobs)
    prefix = output_prefix(sc, path, out)
    meta = {"scenario": sc.name, "kind": sc.kind, "source": str(path), "payload": sc.payload,
            "seed": sc.seed, "seed_source": sc.seed_source, "jobs": jobs, "versions": _versions(),
            "started_utc": started, "wall_time_s": time.perf_counter() - t0, "row_wall_times_s": times}
    csv_path, meta_path = write_report(prefix, columns, rows, meta)
    return RunResult(csv_path, meta_path, list(columns), rows)


# ---------------------------------------------------------------------------
# regime table

REGIME_SCHEMA = {
    "type": "object", "additionalProperties": False, "required": ["b", "degrees"],
    "properties": {"b": {"type": "array", "items": _POS, "minItems": 1},
                   "degrees": {"type": "array", "items": _DEGREES, "minItems": 1},
                   "n_starts": {"type": "integer", "minimum": 1},
                   "seed": {"type": "integer", "minimum": 0},
                   "output": {"type": "string", "minLength": 1}},
}

REGIME_COLUMNS = ["b", "degrees", "regime", "status", "value", "points_re", "points_im", "bound_lo",
                  "bound_hi", "witness", "witness_energies", "witness_decreasing"]


def regime_table(doc: dict, seed: Optional[int] = None) -> tuple[list[str], Rows]:
    """Classification of every (b, degrees) cell with its minimizer or witness summary."""
    _schema_check(doc, REGIME_SCHEMA, "regimes", "config")
    opts = SolverOptions(seed=int(doc.get("seed", 0) if seed is None else seed),
                         n_starts=int(doc.get("n_starts", 16)))
    rows = []
    for degrees in doc["degrees"]:
        for b in doc["b"]:
            try:
                res = minimize_numeric(degrees, float(b), opts)
            except Exception as exc:
                raise ComputeError(f"{type(exc).__name__}: {exc}", "regimes",
                                   {"b": b, "degrees": degrees}) from exc
            row = {"b": float(b), "degrees": _join(degrees), "regime": res.regime.value,
                   "status": res.status.value, "value": res.value, "points_re": "", "points_im": "",
                   "bound_lo": None, "bound_hi": None, "witness": "", "witness_energies": "",
                   "witness_decreasing": None}
            if res.status is Status.Converged:
                row.update(_points_columns(res.points))
            if res.bounds is not None:
                row["bound_lo"], row["bound_hi"] = res.bounds
            if res.witness_path is not None:
                e = [v for _, v in res.witness_path.samples]
                row["witness"] = res.witness_path.description
                row["witness_energies"] = ";".join(f"{n}:{format_value(v)}"
                                                   for n, v in res.witness_path.samples)
                row["witness_decreasing"] = all(a > c for a, c in zip(e, e[1:]))
            rows.append(row)
    return REGIME_COLUMNS, rows
