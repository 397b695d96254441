"""(delta_t, U) sweeps at fixed chain and cut, one classified cell per point."""
from __future__ import annotations

import csv
import io
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

from . import analysis
from .ed import EDOptions, ed_entanglement_spectrum
from .errors import AuditMismatch, EspecError, InvalidParams
from .freefermion import DEFAULT_MAX_LEVELS, DEFAULT_XI_WINDOW, free_entanglement_spectrum
from .model import CutSpec, ModelParams, validate_params

SCHEMA_VERSION = 1
CSV_COLUMNS = ["schema_version", "delta_t", "U", "multiplicity", "signature", "ground_xi", "splitting", "engine", "error"]
ENGINES = ("auto", "free", "ed")
AUDIT_MAX_L = 10
AUDIT_TOL = 1e-9


@dataclass
class GridSpec:
    delta_t_values: list[float]
    U_values: list[float]
    L: int
    L_A: int
    engine: str = "auto"
    t: float = 1.0
    rel_tol_free: float = 1e-8
    rel_tol_ed: float = 1e-6
    max_levels: int = DEFAULT_MAX_LEVELS
    xi_window: float = DEFAULT_XI_WINDOW
    seed: int = 0
    lanczos_tol: float = 1e-10
    max_iter: int = 500
    audit: bool = False

    def __post_init__(self):
        self.delta_t_values = [float(x) for x in self.delta_t_values]
        self.U_values = [float(x) for x in self.U_values]
        self.xi_window = float(self.xi_window)
        if not self.delta_t_values or not self.U_values:
            raise InvalidParams("grid axes must be nonempty")
        if self.engine not in ENGINES:
            raise InvalidParams(f"engine must be one of {ENGINES}, got {self.engine!r}")
        if self.engine == "free" and any(u != 0 for u in self.U_values):
            raise InvalidParams("the free engine only covers U = 0")
        validate_params(ModelParams(self.L, 0.0, 0.0, self.t))
        CutSpec(self.L_A).check(self.L)

    def points(self) -> list[tuple[float, float]]:
        return [(dt, u) for dt in self.delta_t_values for u in self.U_values]

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "GridSpec":
        return cls(**d)


@dataclass
class PhaseDiagramCell:
    delta_t: float
    U: float
    engine_used: str
    signature: str | None = None
    ground_multiplicity: int | None = None
    ground_xi: float | None = None
    splitting: float | None = None
    distribution: dict = field(default_factory=dict)
    error: str | None = None
    wall_time: float = 0.0


def _engine_for(grid: GridSpec, U: float) -> str:
    if grid.engine == "auto":
        return "free" if U == 0 else "ed"
    return grid.engine


def _ed_opts(grid: GridSpec) -> EDOptions:
    return EDOptions(seed=grid.seed, tol=grid.lanczos_tol, max_iter=grid.max_iter)


def run_cell(grid: GridSpec, delta_t: float, U: float) -> PhaseDiagramCell:
    """Compute and classify one grid point; failures become data."""
    engine = _engine_for(grid, U)
    cell = PhaseDiagramCell(delta_t, U, engine)
    t0 = time.perf_counter()
    try:
        params = ModelParams(grid.L, delta_t, U, grid.t)
        cut = CutSpec(grid.L_A)
        if engine == "free":
            spec = free_entanglement_spectrum(params, cut, grid.max_levels, grid.xi_window)
            rel_tol = grid.rel_tol_free
            if grid.audit and grid.L <= AUDIT_MAX_L:
                _audit_free(grid, params, cut)
        else:
            spec = ed_entanglement_spectrum(params, cut, _ed_opts(grid))
            rel_tol = grid.rel_tol_ed
        groups, sig = analysis.analyse(spec, rel_tol)
        cell.signature = sig.tag
        cell.ground_multiplicity = sig.ground_multiplicity
        cell.ground_xi = groups[0].xi_rep
        cell.splitting = sig.splitting
        cell.distribution = {f"{u},{d}": c for (u, d), c in sig.distribution.items()}
    except EspecError as exc:
        cell.error = f"{type(exc).__name__}: {exc}"
    cell.wall_time = time.perf_counter() - t0
    return cell


def _audit_free(grid: GridSpec, params: ModelParams, cut: CutSpec):
    n_all = 4 ** cut.L_A
    exact = free_entanglement_spectrum(params, cut, n_all, math.inf)
    ed = ed_entanglement_spectrum(params, cut, _ed_opts(grid))
    diff = analysis.compare_spectra(exact, ed)
    if not diff <= AUDIT_TOL:
        raise AuditMismatch(f"free and ED spectra differ by {diff:.3e}")


def _run_point(args):
    grid, dt, u = args
    return run_cell(grid, dt, u)


def default_workers() -> int:
    env = os.environ.get("ESPEC_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def sweep(grid: GridSpec, workers: int | None = None) -> list[PhaseDiagramCell]:
    """All grid cells in grid order (delta_t outer, U inner)."""
    workers = default_workers() if workers is None else max(1, workers)
    tasks = [(grid, dt, u) for dt, u in grid.points()]
    if workers == 1 or len(tasks) == 1:
        return [_run_point(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=min(workers, len(tasks))) as pool:
        return list(pool.map(_run_point, tasks))


def _num(x) -> str:
    return "" if x is None else format(float(x), ".17g")


def diagram_to_table(cells: list[PhaseDiagramCell]) -> list[list[str]]:
    rows = [list(CSV_COLUMNS)]
    for c in cells:
        rows.append([
            str(SCHEMA_VERSION),
            _num(c.delta_t),
            _num(c.U),
            "" if c.ground_multiplicity is None else str(c.ground_multiplicity),
            c.signature or "",
            _num(c.ground_xi),
            _num(c.splitting),
            c.engine_used,
            c.error or "",
        ])
    return rows


def table_to_csv(rows: list[list[str]]) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


def _opt(s, conv):
    return conv(s) if s != "" else None


def cells_from_csv(text: str) -> list[PhaseDiagramCell]:
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames != CSV_COLUMNS:
        raise ValueError(f"unexpected CSV header {reader.fieldnames}")
    out = []
    for r in reader:
        out.append(PhaseDiagramCell(
            delta_t=float(r["delta_t"]),
            U=float(r["U"]),
            engine_used=r["engine"],
            signature=r["signature"] or None,
            ground_multiplicity=_opt(r["multiplicity"], int),
            ground_xi=_opt(r["ground_xi"], float),
            splitting=_opt(r["splitting"], float),
            error=r["error"] or None,
        ))
    return out


def multiplicity_matrix(grid: GridSpec, cells: list[PhaseDiagramCell]) -> str:
    """Gnuplot ``matrix nonuniform`` block: first row delta_t, first column U."""
    lookup = {(c.delta_t, c.U): c for c in cells}
    lines = [" ".join([str(len(grid.delta_t_values))] + [_num(x) for x in grid.delta_t_values])]
    for u in grid.U_values:
        row = [_num(u)]
        for dt in grid.delta_t_values:
            m = lookup[(dt, u)].ground_multiplicity
            row.append("NaN" if m is None else str(m))
        lines.append(" ".join(row))
    return "\n".join(lines) + "\n"
