"""Run configuration, reports and their JSON/CSV serialization.

Floats are written in lowercase scientific notation with 15 significant
digits.  JSON values are rounded the same way, so a CSV cell and the JSON
value of the same field parse to the identical double.  Non-finite numbers
are refused.
"""

from dataclasses import dataclass, field
import csv
import io
import json
import math
import os
import tempfile

from .errors import ConfigError, NumericFailure, OutputError

SCHEMA = "kcut-report/1"
COMMANDS = ("radial-check", "cut-grid", "map-g", "einstein-check", "veff", "polytope",
            "stability")
FORMATS = ("json", "csv")
MAX_SAMPLES = 512

DEFAULT_TOLERANCE = {
    "radial-check": 1e-8,
    "cut-grid": 1e-5,
    "map-g": 1e-9,
    "einstein-check": 1e-4,
    "veff": 1e-6,
    "polytope": 0.0,
    "stability": 1e-10,
}


def fmt_float(x):
    x = float(x)
    if not math.isfinite(x):
        raise NumericFailure(f"non-finite value {x} in report", operation="emit")
    return f"{x:.14e}"


def round15(x):
    return float(fmt_float(x))


@dataclass(frozen=True)
class GridSpec:
    """Square grid in the (Re, Im) plane of one coordinate around ``center``."""

    center: tuple
    extent: float
    samples: int
    axis: int = 0

    @classmethod
    def from_dict(cls, d, n):
        if not isinstance(d, dict):
            raise ConfigError("grid must be an object")
        try:
            center = tuple(_complex(c) for c in d.get("center", [[0.0, 0.0]] * n))
            extent = float(d.get("extent", 1.0))
            samples = int(d.get("samples", 1))
            axis = int(d.get("axis", 0))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"malformed grid: {exc}") from None
        if len(center) != n:
            raise ConfigError(f"grid center needs {n} coordinates, got {len(center)}")
        if not extent > 0 or not math.isfinite(extent):
            raise ConfigError("grid extent must be positive")
        if not 1 <= samples <= MAX_SAMPLES:
            raise ConfigError(f"samples per axis must lie in [1, {MAX_SAMPLES}]")
        if not 0 <= axis < n:
            raise ConfigError(f"grid axis {axis} out of range")
        return cls(center, extent, samples, axis)

    def points(self):
        """Row-major list of complex points (imaginary part varies fastest)."""
        if self.samples == 1:
            offsets = [0.0]
        else:
            step = 2.0 * self.extent / (self.samples - 1)
            offsets = [-self.extent + i * step for i in range(self.samples)]
        out = []
        for dx in offsets:
            for dy in offsets:
                p = list(self.center)
                p[self.axis] = p[self.axis] + complex(dx, dy)
                out.append(tuple(p))
        return out


def _complex(c):
    if isinstance(c, (list, tuple)):
        if len(c) != 2:
            raise ValueError(f"complex entries are [re, im] pairs, got {c!r}")
        return complex(float(c[0]), float(c[1]))
    return complex(float(c))


def parse_point(raw):
    if not isinstance(raw, (list, tuple)):
        raise ConfigError(f"a point is a list of coordinates, got {raw!r}")
    try:
        return tuple(_complex(c) for c in raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


@dataclass
class RunConfig:
    """Validated run configuration; ``body`` keeps the command-specific keys."""

    command: str
    body: dict
    out_path: str | None = None
    fmt: str = "json"
    tolerance: float | None = None
    seed: int = 0
    workers: int = 1
    base_dir: str = "."

    @classmethod
    def from_dict(cls, data, *, base_dir=".", **overrides):
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        command = data.get("command")
        if command not in COMMANDS:
            raise ConfigError(f"unknown command {command!r}; expected one of {', '.join(COMMANDS)}")
        output = data.get("output", {}) or {}
        if not isinstance(output, dict):
            raise ConfigError("output must be an object")
        fmt = overrides.get("fmt") or output.get("format", "json")
        if fmt not in FORMATS:
            raise ConfigError(f"unknown format {fmt!r}")
        tol = overrides.get("tolerance")
        if tol is None:
            tol = data.get("tolerance")
        if tol is not None:
            try:
                tol = float(tol)
            except (TypeError, ValueError):
                raise ConfigError("tolerance must be a number") from None
            if not tol >= 0 or not math.isfinite(tol):
                raise ConfigError("tolerance must be finite and non-negative")
        seed = overrides.get("seed")
        seed = int(data.get("seed", 0)) if seed is None else int(seed)
        workers = overrides.get("workers")
        if workers is None:
            workers = int(os.environ.get("KCUT_WORKERS", data.get("workers", 1)))
        if workers < 1:
            raise ConfigError("workers must be >= 1")
        body = {k: v for k, v in data.items()
                if k not in ("command", "output", "tolerance", "seed", "workers")}
        return cls(command, body, overrides.get("out_path") or output.get("path"), fmt, tol,
                   seed, workers, base_dir)

    @property
    def effective_tolerance(self):
        return DEFAULT_TOLERANCE[self.command] if self.tolerance is None else self.tolerance

    def echo(self):
        return {"command": self.command, **self.body,
                "tolerance": self.effective_tolerance, "seed": self.seed}


@dataclass
class RunReport:
    """Per-point records plus a summary; ``passed`` iff every residual is within tolerance."""

    command: str
    config: dict
    columns: list
    records: list
    tolerance: float
    extra: dict = field(default_factory=dict)
    wall_time: float = 0.0

    @property
    def max_residual(self):
        vals = [r["residual"] for r in self.records if "residual" in r]
        return max(vals) if vals else 0.0

    @property
    def min_eigenvalue(self):
        vals = [r["min_eig"] for r in self.records if "min_eig" in r]
        return min(vals) if vals else None

    @property
    def passed(self):
        ok = all(r["residual"] <= self.tolerance for r in self.records if "residual" in r)
        return ok and self.extra.get("pass", True)

    def summary(self):
        out = {"points": len(self.records), "max_residual": self.max_residual,
               "min_eigenvalue": self.min_eigenvalue, "tolerance": self.tolerance,
               "pass": self.passed}
        out.update({k: v for k, v in self.extra.items() if k != "pass"})
        return out

    def to_dict(self):
        # wall time is left out so identical configs give identical bytes
        return {"schema": SCHEMA, "command": self.command, "config": self.config,
                "columns": list(self.columns), "records": self.records,
                "summary": self.summary()}


def _jsonable(obj):
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, int):
        return obj
    if isinstance(obj, float):
        return round15(obj)
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if hasattr(obj, "item"):
        return _jsonable(obj.item())
    raise NumericFailure(f"cannot serialize {type(obj).__name__}", operation="emit")


def _cell(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if v is None:
        return ""
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return fmt_float(v)
    if isinstance(v, (list, tuple)):
        return ";".join(_cell(x) for x in v)
    if hasattr(v, "item"):
        return _cell(v.item())
    return str(v)


def emit(report, fmt):
    """Serialize a report to bytes (``json`` or ``csv``)."""
    if fmt == "json":
        text = json.dumps(_jsonable(report.to_dict()), sort_keys=True, indent=2,
                          allow_nan=False) + "\n"
        return text.encode("utf-8")
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(report.columns)
        for rec in report.records:
            writer.writerow([_cell(rec.get(c)) for c in report.columns])
        return buf.getvalue().encode("utf-8")
    raise ConfigError(f"unknown format {fmt!r}")


def write_atomic(path, data):
    """Write bytes to ``path`` through a temporary file and a rename."""
    directory = os.path.dirname(os.path.abspath(path))
    try:
        fd, tmp = tempfile.mkstemp(prefix=".kcut-", dir=directory)
    except OSError as exc:
        raise OutputError(f"cannot write to {directory}: {exc.strerror}", operation="emit") from None
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except OSError as exc:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise OutputError(f"cannot write {path}: {exc.strerror}", operation="emit") from None
