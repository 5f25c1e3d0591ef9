"""Parameter studies: mesh refinement, shift ladders, Galerkin comparison, round-off floor.

Every study returns plain row dicts (one per index and parameter point) plus a
small summary, so the CLI can write them as CSV or JSON without knowing the
study type.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from .assembly import Potential, assemble
from .errors import EncloseError, InvalidArgumentError
from .lmg import bounds_from_tau, enclose, galerkin_values, tau_spectrum
from .mesh import make_mesh


JOBS_ENV = "SPECTRAL_ENCLOSE_JOBS"
# widths below this fraction of |lambda| sit on the round-off floor
FLOOR_REL = 1e-12
# round-off slack for monotonicity verdicts, relative to max(1, |bound|)
MONOTONE_SLACK = 1e-13


@dataclass
class RunConfig:
    potential: str | list = "harmonic"
    L: float = 6.0
    n: int | list = 400
    t_minus: float = -20.0
    t_plus: float = 20.0
    count: int = 5
    ell_hint: int | None = None
    out: str | None = None
    format: str = "csv"
    deterministic: bool = False
    jobs: int | None = None
    shifts: list | None = None
    slope_window: list | None = None
    order: float = 4.0

    @classmethod
    def from_dict(cls, d: dict) -> RunConfig:
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise InvalidArgumentError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    @classmethod
    def load(cls, path) -> RunConfig:
        with open(path) as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise InvalidArgumentError(f"config {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise InvalidArgumentError("config file must hold a flat JSON object")
        return cls.from_dict(data)

    @property
    def n_list(self) -> list[int]:
        return [int(v) for v in (self.n if isinstance(self.n, (list, tuple)) else [self.n])]

    def validate(self) -> RunConfig:
        if not self.t_minus < self.t_plus:
            raise InvalidArgumentError(f"t_minus ({self.t_minus}) must be below t_plus ({self.t_plus})")
        if self.L <= 0:
            raise InvalidArgumentError("L must be positive")
        ns = self.n_list
        if any(b <= a for a, b in zip(ns, ns[1:])):
            raise InvalidArgumentError(f"mesh sweep list must be strictly increasing: {ns}")
        if any(v < 2 for v in ns):
            raise InvalidArgumentError("every mesh size must be >= 2")
        if self.count < 0:
            raise InvalidArgumentError("count must be non-negative")
        if self.format not in ("csv", "json"):
            raise InvalidArgumentError(f"format must be csv or json, got {self.format!r}")
        if self.shifts is not None:
            s = [float(v) for v in self.shifts]
            # ladders move away from the spectrum: |t| strictly increasing
            if any(abs(b) <= abs(a) for a, b in zip(s, s[1:])):
                raise InvalidArgumentError(f"shift ladder must move strictly away from 0: {s}")
        Potential.from_spec(self.potential)
        return self

    def worker_count(self) -> int:
        if self.deterministic:
            return 1
        if self.jobs is not None:
            return max(1, int(self.jobs))
        env = os.environ.get(JOBS_ENV)
        if env:
            try:
                return max(1, int(env))
            except ValueError:
                raise InvalidArgumentError(f"{JOBS_ENV} must be an integer, got {env!r}") from None
        return 1


def _pmap(func, items, jobs: int):
    """Ordered map, optionally over a process pool."""
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [func(it) for it in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(func, items))


@dataclass
class StudyResult:
    kind: str
    rows: list[dict]
    summary: list[dict] = field(default_factory=list)
    config: dict = field(default_factory=dict)


# -- enclosure table ---------------------------------------------------------


def run_enclose(cfg: RunConfig):
    forms = assemble(cfg.potential, make_mesh(cfg.L, cfg.n_list[0]))
    return enclose(forms, cfg.t_minus, cfg.t_plus, cfg.count, cfg.ell_hint)


# -- mesh refinement ---------------------------------------------------------


@dataclass
class SlopeFit:
    index: int
    slope: float | None
    points: int
    n_min: int | None
    n_max: int | None
    flag: str


def fit_slope(ns, widths, lambdas=None, window=None, index=0, min_points=4) -> SlopeFit:
    """Least-squares convergence order from widths on meshes of size ``ns``.

    The fit is log(width) against log(h) with h proportional to 1/n, so the
    returned slope is the positive decay order (4 for cubic Hermite elements).
    Rows at or below the round-off floor are excluded.
    """
    ns = np.asarray(ns, dtype=float)
    w = np.asarray(widths, dtype=float)
    lam = np.ones_like(w) if lambdas is None else np.abs(np.asarray(lambdas, dtype=float))
    keep = np.isfinite(w) & (w > FLOOR_REL * np.maximum(lam, 1.0))
    if window is not None:
        lo, hi = window
        keep &= (ns >= lo) & (ns <= hi)
    in_window = ns if window is None else ns[(ns >= window[0]) & (ns <= window[1])]
    if keep.sum() < min_points:
        # enough rows, but they sit on the floor: refuse rather than fit noise
        flag = "flat" if np.isfinite(w).sum() >= min_points else "insufficient-points"
        return SlopeFit(index, None, int(keep.sum()),
                        int(in_window.min()) if in_window.size else None,
                        int(in_window.max()) if in_window.size else None, flag)
    x = -np.log(ns[keep])
    y = np.log(w[keep])
    slope = float(np.polyfit(x, y, 1)[0])
    return SlopeFit(index, slope, int(keep.sum()), int(ns[keep].min()), int(ns[keep].max()), "ok")


def _enclose_rows(args):
    potential, L, n, t_minus, t_plus, count, ell_hint = args
    try:
        forms = assemble(potential, make_mesh(L, n))
        rep = enclose(forms, t_minus, t_plus, count, ell_hint, strict=False)
    except EncloseError as exc:
        return [dict(n=n, h=2 * L / n, index=None, lower=None, upper=None, width=None,
                     status=exc.kind)]
    rows = []
    for r in rep.records:
        status = "crossed" if r.lower > r.upper else "ok"
        rows.append(dict(n=n, h=forms.mesh.h, index=r.index, lower=r.lower, upper=r.upper,
                         width=r.width, status=status))
    if rep.short:
        rows.append(dict(n=n, h=forms.mesh.h, index=None, lower=None, upper=None, width=None,
                         status=f"short:{rep.achieved}/{rep.requested}"))
    return rows


def _sweep_rows(cfg: RunConfig):
    jobs = [(cfg.potential, cfg.L, n, cfg.t_minus, cfg.t_plus, cfg.count, cfg.ell_hint)
            for n in cfg.n_list]
    out = []
    for rows in _pmap(_enclose_rows, jobs, cfg.worker_count()):
        out.extend(rows)
    return out


def _by_index(rows):
    table = {}
    for r in rows:
        if r["index"] is not None:
            table.setdefault(r["index"], []).append(r)
    return table


def mesh_sweep(cfg: RunConfig) -> StudyResult:
    cfg.validate()
    if len(cfg.n_list) < 4:
        raise InvalidArgumentError("mesh sweep needs at least 4 mesh sizes")
    rows = _sweep_rows(cfg)
    summary = []
    for idx, rs in sorted(_by_index(rows).items()):
        fit = fit_slope([r["n"] for r in rs], [r["width"] for r in rs],
                        [r["upper"] for r in rs], cfg.slope_window, idx)
        summary.append(asdict(fit))
    return StudyResult("mesh-sweep", rows, summary, asdict(cfg))


# -- round-off floor ---------------------------------------------------------


def detect_floor(ns, widths, order: float = 4.0):
    """First mesh size at which refinement stops paying off.

    A step from n_prev to n is a stall when the width is non-positive (crossed
    bounds) or fails to shrink by at least half the expected order, i.e.
    width(n) > width(n_prev) * (n_prev / n) ** (order / 2).
    Returns None when widths keep shrinking throughout.
    """
    for k in range(1, len(ns)):
        w, wp = widths[k], widths[k - 1]
        if w is None or not math.isfinite(w) or w <= 0:
            return ns[k]
        if wp is None or wp <= 0:
            continue
        if w > wp * (ns[k - 1] / ns[k]) ** (order / 2):
            return ns[k]
    return None


def truncation_probe(cfg: RunConfig) -> StudyResult:
    cfg.validate()
    rows = _sweep_rows(cfg)
    summary = []
    for idx, rs in sorted(_by_index(rows).items()):
        floor = detect_floor([r["n"] for r in rs], [r["width"] for r in rs], cfg.order)
        summary.append(dict(index=idx, floor_n=floor,
                            verdict="no floor detected" if floor is None else f"floor at n={floor}"))
    return StudyResult("truncation-probe", rows, summary, asdict(cfg))


# -- shift ladders -----------------------------------------------------------


def _verdicts(rows, keyfunc):
    """Mark each row 'yes'/'no' when its width did not grow versus the previous shift."""
    last = {}
    for r in rows:
        i = r["index"]
        if i is None:
            r["monotone"] = "n/a"
            continue
        prev = last.get(i)
        if prev is None:
            r["monotone"] = "n/a"
        else:
            r["monotone"] = "yes" if keyfunc(prev, r) else "no"
        last[i] = r


def shift_sweep(cfg: RunConfig) -> StudyResult:
    """Enclosures for symmetric shift pairs (-s, s) over the ladder ``cfg.shifts``."""
    cfg.validate()
    ladder = [float(s) for s in (cfg.shifts or [cfg.t_plus])]
    if any(s <= 0 for s in ladder):
        raise InvalidArgumentError("shift ladder values must be positive (t_plus = s, t_minus = -s)")
    forms = assemble(cfg.potential, make_mesh(cfg.L, cfg.n_list[0]))
    ritz = galerkin_values(forms)
    rows = []
    for s in ladder:
        base = dict(t_minus=-s, t_plus=s)
        if not s > ritz[0]:
            rows.append(dict(base, index=None, lower=None, upper=None, width=None,
                             status="inadmissible"))
            continue
        try:
            rep = enclose(forms, -s, s, cfg.count, cfg.ell_hint, strict=False)
        except EncloseError as exc:
            rows.append(dict(base, index=None, lower=None, upper=None, width=None, status=exc.kind))
            continue
        for r in rep.records:
            rows.append(dict(base, index=r.index, lower=r.lower, upper=r.upper, width=r.width,
                             status="crossed" if r.lower > r.upper else "ok"))
    def improved(p, r):
        tol = MONOTONE_SLACK * max(1.0, abs(r["upper"]))
        return (r["width"] <= p["width"] + tol and r["lower"] >= p["lower"] - tol
                and r["upper"] <= p["upper"] + tol)

    _verdicts(rows, improved)
    summary = []
    for idx, rs in sorted(_by_index(rows).items()):
        marks = [r["monotone"] for r in rs if r["monotone"] != "n/a"]
        summary.append(dict(index=idx, rows=len(rs),
                            monotone="n/a" if not marks else ("yes" if all(m == "yes" for m in marks) else "no")))
    return StudyResult("shift-sweep", rows, summary, asdict(cfg))


def galerkin_compare(cfg: RunConfig) -> StudyResult:
    """Upper bound for lambda_1 from each t_minus in the ladder against the Galerkin value."""
    cfg.validate()
    ladder = [float(s) for s in (cfg.shifts or [cfg.t_minus])]
    forms = assemble(cfg.potential, make_mesh(cfg.L, cfg.n_list[0]))
    ritz = galerkin_values(forms)
    gal = float(ritz[0])
    rows = []
    for t in ladder:
        row = dict(t_minus=t, index=1, lmg_upper=None, galerkin_upper=gal, gap=None)
        if not t < gal:
            rows.append(dict(row, status="inadmissible"))
            continue
        try:
            b = bounds_from_tau(tau_spectrum(forms, t))
        except EncloseError as exc:
            rows.append(dict(row, status=exc.kind))
            continue
        if len(b.upper_bounds) == 0:
            rows.append(dict(row, status="no-positive-tau"))
            continue
        up = float(b.upper_bounds[0])
        rows.append(dict(row, lmg_upper=up, gap=up - gal, status="ok"))
    _verdicts(rows, lambda p, r: r["gap"] is not None and p["gap"] is not None and r["gap"] < p["gap"])
    gaps = [r["gap"] for r in rows if r["gap"] is not None]
    summary = [dict(index=1, positive=all(g > 0 for g in gaps),
                    shrinking=all(b < a for a, b in zip(gaps, gaps[1:])) if len(gaps) > 1 else None)]
    return StudyResult("galerkin-compare", rows, summary, asdict(cfg))


# -- output ------------------------------------------------------------------


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17g}"
    return str(v)


def to_csv(rows: list[dict]) -> str:
    if not rows:
        return ""
    cols = []
    for r in rows:
        for k in r:
            if k not in cols:
                cols.append(k)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in rows:
        w.writerow([_fmt(r.get(c)) for c in cols])
    return buf.getvalue()


def read_csv(text: str) -> list[dict]:
    """Parse a report CSV back into dicts; numeric fields become int/float."""
    out = []
    for rec in csv.DictReader(io.StringIO(text)):
        row = {}
        for k, v in rec.items():
            if v == "":
                row[k] = None
                continue
            try:
                row[k] = int(v)
            except ValueError:
                try:
                    row[k] = float(v)
                except ValueError:
                    row[k] = v
        out.append(row)
    return out


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def to_json(payload) -> str:
    return json.dumps(_jsonable(payload), indent=2) + "\n"
