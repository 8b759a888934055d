"""Refinement studies: per-level solves, error tables, EOCs and report files."""
from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .assembly import AssemblyConfig, assemble_system
from .errors import ConfigError, InvalidSequence, SurfStokesError
from .geometry import AnalyticSurface, make_surface
from .mesh import build_base_mesh, refine
from .mms import eval_errors, make_case
from .solver import a_condition, schur_spectrum, solve_direct, solve_minres

__all__ = [
    "StudyConfig",
    "LevelRecord",
    "ConvergenceReport",
    "run_study",
    "compute_eoc",
    "emit_report",
    "dof_overhead",
    "CSV_HEADER",
]

CSV_HEADER = ("level,h,n_u,n_p,energy_error,pressure_l2,velocity_l2,schur_min,schur_max,"
              "a_cond_ratio,iterations,wall_time_s")
EOC_FIELDS = ("energy_error", "pressure_l2", "velocity_l2")


@dataclass(frozen=True)
class StudyConfig:
    surface: str = "sphere"
    radius: float = 1.0
    major_radius: float = 2.0
    minor_radius: float = 0.5
    geom_degree: int = 2
    velocity_degree: int = 2
    levels: tuple = (1, 2, 3, 4)
    mms: str = "killing"
    penalty_exponent: float = 2.0
    penalty_normal: str = "improved"
    solver: str = "direct"
    tol: float = 1e-10
    spectra: bool = False
    out: str | None = None
    format: str = "json"

    def __post_init__(self):
        object.__setattr__(self, "levels", tuple(int(v) for v in self.levels))
        k, m = self.geom_degree, self.velocity_degree
        if m < 2:
            raise ConfigError("velocity degree must be >= 2 (Taylor-Hood)")
        if k < 1:
            raise ConfigError("geometry degree must be >= 1")
        if self.penalty_normal not in ("improved", "discrete"):
            raise ConfigError(f"unknown penalty normal {self.penalty_normal!r}")
        if self.penalty_normal == "improved" and k > m:
            raise ConfigError("the improved normal requires k <= m")
        if len(self.levels) < 2:
            raise ConfigError("a study needs at least two levels")
        if any(l < 0 for l in self.levels) or list(self.levels) != sorted(set(self.levels)):
            raise ConfigError("levels must be distinct, non-negative and increasing")
        if self.surface not in ("sphere", "torus"):
            raise ConfigError(f"unknown surface {self.surface!r}")
        if self.mms not in ("killing", "polynomial"):
            raise ConfigError(f"unknown manufactured solution {self.mms!r}")
        if self.solver not in ("direct", "minres"):
            raise ConfigError(f"unknown solver {self.solver!r}")
        if self.format not in ("json", "csv"):
            raise ConfigError(f"unknown report format {self.format!r}")
        if not self.tol > 0:
            raise ConfigError("tolerance must be positive")

    def make_surface(self) -> AnalyticSurface:
        if self.surface == "sphere":
            return make_surface("sphere", radius=self.radius)
        return make_surface("torus", major_radius=self.major_radius,
                            minor_radius=self.minor_radius)


@dataclass
class LevelRecord:
    level: int
    h: float = math.nan
    n_u: int = 0
    n_p: int = 0
    energy_error: float = math.nan
    pressure_l2: float = math.nan
    velocity_l2: float = math.nan
    schur_min: float | None = None
    schur_max: float | None = None
    a_cond_ratio: float | None = None
    iterations: int = 0
    wall_time_s: float = 0.0
    failure: str | None = None

    @property
    def ok(self) -> bool:
        return self.failure is None


@dataclass
class ConvergenceReport:
    config: StudyConfig
    levels: list = field(default_factory=list)
    eoc: dict = field(default_factory=dict)
    version: str = ""

    @property
    def failed(self) -> bool:
        return any(not rec.ok for rec in self.levels)


def compute_eoc(errors, hs) -> list:
    """Orders log(e_i / e_{i+1}) / log(h_i / h_{i+1}) of consecutive pairs."""
    e = np.asarray(errors, dtype=float)
    h = np.asarray(hs, dtype=float)
    if e.ndim != 1 or e.shape != h.shape or len(e) < 2:
        raise InvalidSequence("need two sequences of equal length >= 2")
    if np.any(~np.isfinite(e)) or np.any(e <= 0) or np.any(h <= 0):
        raise InvalidSequence("errors and mesh sizes must be positive and finite")
    if np.any(np.diff(h) >= 0):
        raise InvalidSequence("mesh sizes must be strictly decreasing")
    return (np.log(e[:-1] / e[1:]) / np.log(h[:-1] / h[1:])).tolist()


def dof_overhead(m: int) -> Fraction:
    """Unknowns of the three-component velocity approach relative to a tangential one."""
    if m < 2:
        raise ConfigError("dof_overhead needs m >= 2")
    return Fraction(2 * m + 3) / (Fraction(3, 2) * m + 2)


def _solve_level(mesh, surface, cfg: StudyConfig, rec: LevelRecord):
    t0 = time.perf_counter()
    case = make_case(cfg.mms, surface)
    assembly_cfg = AssemblyConfig(cfg.penalty_exponent, cfg.penalty_normal)
    system = assemble_system(mesh, surface, cfg.geom_degree, cfg.velocity_degree, case,
                             assembly_cfg)
    if cfg.solver == "direct":
        result = solve_direct(system)
    else:
        result = solve_minres(system, "exact", tol=cfg.tol)
    err = eval_errors(result, case, system)
    rec.h, rec.n_u, rec.n_p = err.h, err.n_u, err.n_p
    rec.energy_error, rec.pressure_l2, rec.velocity_l2 = (
        err.energy_error, err.pressure_l2, err.velocity_l2)
    rec.iterations = result.iterations
    if cfg.spectra:
        s = schur_spectrum(system)
        a = a_condition(system)
        rec.schur_min, rec.schur_max, rec.a_cond_ratio = s.min, s.max, a.ratio
    rec.wall_time_s = time.perf_counter() - t0


def run_study(cfg: StudyConfig, log=None) -> ConvergenceReport:
    """Solve on every requested level and collect errors, spectra and EOCs.

    A failing level is recorded with its error message and the sweep
    continues with the next level.
    """
    from . import __version__

    surface = cfg.make_surface()
    make_case(cfg.mms, surface)  # unsupported surface/case pairs fail before any work
    report = ConvergenceReport(cfg, version=__version__)
    mesh = build_base_mesh(surface)
    for level in cfg.levels:
        while mesh.level < level:
            mesh = refine(mesh, surface)
        rec = LevelRecord(level)
        try:
            _solve_level(mesh, surface, cfg, rec)
        except ConfigError:
            raise
        except (SurfStokesError, np.linalg.LinAlgError, ArithmeticError, MemoryError) as exc:
            rec.failure = f"{type(exc).__name__}: {exc}"
        report.levels.append(rec)
        if log is not None:
            log(rec)
    report.eoc = _eoc_table(report.levels)
    return report


def _eoc_table(levels) -> dict:
    out = {}
    for name in EOC_FIELDS:
        vals = []
        for a, b in zip(levels[:-1], levels[1:]):
            try:
                vals.append(compute_eoc([getattr(a, name), getattr(b, name)], [a.h, b.h])[0]
                            if a.ok and b.ok else None)
            except InvalidSequence:
                vals.append(None)
        out[name] = vals
    return out


def _num(x) -> str:
    if x is None or (isinstance(x, float) and not math.isfinite(x)):
        return "null"
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def _to_json(obj) -> str:
    # json.dumps writes the shortest round-trip repr; reports use a fixed
    # 17-significant-digit layout instead, so floats are formatted here.
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_to_json(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_to_json(v) for v in obj) + "]"
    if isinstance(obj, str):
        return json.dumps(obj)
    return _num(obj)


def report_dict(report: ConvergenceReport) -> dict:
    cfg = asdict(report.config)
    cfg["levels"] = list(cfg["levels"])
    return {
        "config": cfg,
        "version": report.version,
        "levels": [asdict(rec) for rec in report.levels],
        "eoc": report.eoc,
    }


def emit_report(report: ConvergenceReport, fmt: str = "json", path=None) -> str:
    """Serialize a report as JSON or CSV; write it to ``path`` when given.

    Returns the serialized text.
    """
    if not report.levels:
        raise InvalidSequence("report has no levels")
    if fmt == "json":
        text = _to_json(report_dict(report)) + "\n"
    elif fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER.split(","))
        for rec in report.levels:
            row = [getattr(rec, name) for name in CSV_HEADER.split(",")]
            writer.writerow(["" if _num(v) == "null" else _num(v) for v in row])
        text = buf.getvalue()
    else:
        raise ConfigError(f"unknown report format {fmt!r}")
    if path is not None:
        Path(path).write_text(text)
    return text
