"""Convergence studies: mesh sequence -> solve -> error reports -> CSV."""
from __future__ import annotations

import csv
import io
import math
import platform
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np
import scipy

from . import __version__
from .assembly import assemble
from .mesh import tensor_mesh
from .metrics import ERROR_COLUMNS, ErrorReport, error_report, rate_table
from .problems import ProblemSpec, get_problem
from .projection import project_2d
from .solve import SolveError, solve_linear
from .spaces import CoefficientField

CSV_COLUMNS = ("level", "M", "N", "h_max", "n_dof") + ERROR_COLUMNS
INT_COLUMNS = ("level", "M", "N", "n_dof")


class StudyError(RuntimeError):
    def __init__(self, message: str, level: int | None = None):
        super().__init__(message)
        self.level = level


class CsvFormatError(ValueError):
    def __init__(self, message: str, row: int | None = None, column: str | None = None):
        where = []
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column {column!r}")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)
        self.row = row
        self.column = column


@dataclass
class StudyConfig:
    problem: str = "ex1a"
    k: int = 3
    meshes: tuple[int, ...] = (4, 8, 16, 32)
    eps: float = 0.001
    seed: int = 42
    quad: Optional[int] = None
    line_samples: Optional[int] = None
    out: Optional[str] = None
    emit_plot: bool = False

    def __post_init__(self):
        self.meshes = tuple(int(m) for m in self.meshes)
        if not self.meshes:
            raise ValueError("at least one mesh size is required")
        if any(m < 1 for m in self.meshes):
            raise ValueError(f"mesh sizes must be positive, got {self.meshes}")
        if any(b <= a for a, b in zip(self.meshes, self.meshes[1:])):
            raise ValueError(f"mesh sizes must be strictly increasing, got {self.meshes}")
        if not 3 <= self.k <= 6:
            raise ValueError(f"k must lie in [3, 6], got {self.k}")
        if not 0 <= self.eps < 0.5:
            raise ValueError(f"eps must lie in [0, 0.5), got {self.eps}")
        get_problem(self.problem)


@dataclass
class StudyResult:
    config: StudyConfig
    reports: list[ErrorReport]
    sizes: list[tuple[int, int]]
    rates: dict = field(default_factory=dict)
    wall_times: list[float] = field(default_factory=list)
    provenance: dict = field(default_factory=dict)

    def rows(self) -> list[dict]:
        out = []
        for level, ((M, N), rep) in enumerate(zip(self.sizes, self.reports)):
            row = {"level": level, "M": M, "N": N, "h_max": rep.h_max, "n_dof": rep.n_dof}
            row.update({name: getattr(rep, name) for name in ERROR_COLUMNS})
            out.append(row)
        return out


def provenance() -> dict:
    return {"c1pg": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
            "python": platform.python_version()}


def solve_problem(problem: ProblemSpec, k: int, M: int, N: int, eps: float = 0.0,
                  seed: int = 0, quad=None):
    """One mesh level: returns ``(mesh, u_h)``."""
    mesh = tensor_mesh(M, N, problem.domain, eps, seed)
    system = assemble(mesh, problem, k, quad)
    return mesh, CoefficientField(system.trial, solve_linear(system))


def run_study(config: StudyConfig) -> StudyResult:
    problem = get_problem(config.problem)
    problem.check_conditions()
    reports, sizes, times = [], [], []
    for level, M in enumerate(config.meshes):
        t0 = time.perf_counter()
        try:
            mesh, u_h = solve_problem(problem, config.k, M, M, config.eps, config.seed,
                                      config.quad)
        except SolveError as exc:
            raise StudyError(f"level {level} (M=N={M}): {exc}", level) from exc
        u_I = project_2d(problem.exact, mesh, config.k)
        reports.append(error_report(u_h, problem.exact, mesh, u_I, config.line_samples))
        sizes.append((M, M))
        times.append(time.perf_counter() - t0)

    rates = {}
    if len(reports) >= 2:
        rates = rate_table([(r.h_max, r) for r in reports])
    result = StudyResult(config, reports, sizes, rates, times, provenance())
    if config.out:
        write_csv(result, config.out)
        if config.emit_plot:
            write_plot_script(config.out)
    return result


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def csv_text(result: StudyResult) -> str:
    buf = io.StringIO()
    cfg = asdict(result.config)
    cfg["meshes"] = ",".join(str(m) for m in result.config.meshes)
    for key, value in cfg.items():
        buf.write(f"# {key}: {value}\n")
    for key, value in result.provenance.items():
        buf.write(f"# version.{key}: {value}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in result.rows():
        writer.writerow([_fmt(row[c]) for c in CSV_COLUMNS])
    return buf.getvalue()


def write_csv(result: StudyResult, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.write_text(csv_text(result))
    return path


def read_csv(path: Union[str, Path]) -> list[dict]:
    """Parse a study CSV; comment lines starting with '#' are skipped."""
    lines = [ln for ln in Path(path).read_text().splitlines()
             if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise CsvFormatError("no header row found")
    reader = csv.reader(lines)
    header = next(reader)
    if tuple(header) != CSV_COLUMNS:
        missing = [c for c in CSV_COLUMNS if c not in header]
        extra = [c for c in header if c not in CSV_COLUMNS]
        raise CsvFormatError(f"unexpected header (missing {missing}, unexpected {extra})", row=0)
    rows = []
    for rno, raw in enumerate(reader, start=1):
        if len(raw) != len(CSV_COLUMNS):
            raise CsvFormatError(f"expected {len(CSV_COLUMNS)} fields, found {len(raw)}", row=rno)
        row = {}
        for col, text in zip(CSV_COLUMNS, raw):
            text = text.strip()
            if text == "":
                if col in ("level", "M", "N", "h_max", "n_dof"):
                    raise CsvFormatError("required value missing", row=rno, column=col)
                row[col] = None
                continue
            try:
                row[col] = int(text) if col in INT_COLUMNS else float(text)
            except ValueError:
                raise CsvFormatError(f"cannot parse {text!r}", row=rno, column=col) from None
            if col not in INT_COLUMNS and not math.isfinite(row[col]):
                raise CsvFormatError(f"non-finite value {text!r}", row=rno, column=col)
        rows.append(row)
    return rows


def rates_from_rows(rows: Sequence[dict]) -> dict:
    if len(rows) < 2:
        return {}
    return rate_table([(r["h_max"], r) for r in rows])


def format_rate_table(rows: Sequence[dict], rates: dict | None = None) -> str:
    """Plain-text table of observed orders; masked entries render as '-'."""
    if len(rows) < 2:
        return "notice: fewer than two levels, rate table is empty\n"
    rates = rates_from_rows(rows) if rates is None else rates
    pairs = [f"{a['M']}->{b['M']}" for a, b in zip(rows, rows[1:])]
    width = max(9, *(len(p) for p in pairs))
    lines = ["metric".ljust(11) + "".join(p.rjust(width) for p in pairs)]
    for name in ERROR_COLUMNS:
        cells = ["-" if v is None else f"{v:.2f}" for v in rates[name]]
        lines.append(name.ljust(11) + "".join(c.rjust(width) for c in cells))
    return "\n".join(lines) + "\n"


def write_plot_script(csv_path: Union[str, Path]) -> Path:
    """gnuplot script drawing every error column against h_max on log-log axes."""
    csv_path = Path(csv_path)
    script = csv_path.with_suffix(".gp")
    idx = {c: i + 1 for i, c in enumerate(CSV_COLUMNS)}
    plots = ", \\\n     ".join(
        f"'{csv_path.name}' using {idx['h_max']}:{idx[c]} with linespoints title '{c}'"
        for c in ERROR_COLUMNS)
    script.write_text(
        "set datafile separator ','\n"
        "set datafile commentschars '#'\n"
        "set key autotitle columnhead outside\n"
        "set logscale xy\n"
        "set xlabel 'h'\n"
        "set ylabel 'error'\n"
        f"set terminal pngcairo size 900,600\nset output '{csv_path.stem}.png'\n"
        f"plot {plots}\n")
    return script


def solve_once(problem: Union[str, ProblemSpec], k: int, M: int, N: int, eps: float = 0.001,
               seed: int = 42, probe: int = 11, quad=None) -> np.ndarray:
    """Solve once and sample on a ``probe x probe`` uniform grid.

    Returns rows ``(x, y, u_h, u, u_h - u)``; a 1-point grid samples the
    domain centre.
    """
    if isinstance(problem, str):
        problem = get_problem(problem)
    if probe < 1:
        raise ValueError("probe grid needs at least one point")
    _, u_h = solve_problem(problem, k, M, N, eps, seed, quad)
    a, b, c, d = problem.domain
    if probe == 1:
        xs, ys = np.array([(a + b) / 2]), np.array([(c + d) / 2])
    else:
        xs, ys = np.linspace(a, b, probe), np.linspace(c, d, probe)
    X, Y = (g.ravel() for g in np.meshgrid(xs, ys, indexing="ij"))
    uh = u_h(X, Y)
    u = np.broadcast_to(problem.exact.u(X, Y), X.shape)
    return np.column_stack((X, Y, uh, u, uh - u))
