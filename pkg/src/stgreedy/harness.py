"""Experiment runner: sweeps, rate fits, CSV/JSON report emission.

Configs are flat key = value text files (documented in the README);
every mode runs a sweep and emits rows (sweep, cardinality, error,
wall_ms) plus a JSON report and a plot-ready two-column file.  Given
the same config and seed the CSV bytes are reproducible up to the
wall_ms column.
"""

import json
import time
from dataclasses import dataclass, field as dfield
from pathlib import Path

import numpy as np

from .fields import DomainSpec, FieldError, Regularity, field_from_csv, \
    make_test_field
from .mesh1d import greedy_time, uniform_time_error
from .fem import greedy_space
from .polyspace import jackson_construct, lp_error
from .smoothness import BesovParams, SmoothnessParams, besov_terms, \
    modulus_avg, modulus_sup, whitney_ratio
from .spacetime import build_fully_discrete

MODES = ("moduli", "besov", "jackson", "whitney", "greedy-time",
         "greedy-space", "greedy-st", "rates")

CSV_HEADER = "sweep,cardinality,error,wall_ms"


class ConfigError(ValueError):
    """Invalid experiment configuration (CLI exit code 2)."""


@dataclass
class ExperimentConfig:
    mode: str
    field_name: str = ""
    field_params: tuple = ()
    csv_path: str = ""
    T: float = 1.0
    n: int = 1
    r: int = 1
    r1: int = 1
    r2: int = 2
    p: float = 2.0
    q: float = 2.0
    q1: float = None
    q2: float = None
    s: float = 0.5
    s1: float = None
    s2: float = None
    kmax: int = 14
    quad_points: int = None
    quad_panels: int = None
    time_slice: float = None
    sweep_start: float = None
    sweep_stop: float = None
    sweep_points: int = 8
    data_path: str = ""
    out_dir: str = "out"
    seed: int = 0
    raw: dict = dfield(default_factory=dict)

    def domain(self):
        return DomainSpec(T=self.T, n=self.n)

    def make_field(self):
        reg = None
        if self.s1 or self.s2:
            reg = Regularity(s1=self.s1, q1=self.q1 or 1.0,
                             s2=self.s2, q2=self.q2 or 2.0)
        if self.field_name == "csv":
            if not self.csv_path:
                raise ConfigError("field.csv path required for field.name=csv")
            return field_from_csv(self.csv_path, self.domain(), regularity=reg)
        try:
            return make_test_field(self.field_name, self.field_params,
                                   self.domain(), regularity=reg)
        except FieldError as e:
            raise ConfigError(str(e)) from e

    def sweep(self):
        if self.sweep_start is None or self.sweep_stop is None:
            raise ConfigError("sweep.start and sweep.stop are required")
        if self.sweep_points < 4:
            raise ConfigError(
                f"sweep needs at least 4 points, got {self.sweep_points}")
        return np.geomspace(self.sweep_start, self.sweep_stop,
                            self.sweep_points)


_KEYMAP = {
    "mode": ("mode", str),
    "field.name": ("field_name", str),
    "field.csv": ("csv_path", str),
    "domain.t": ("T", float),
    "domain.n": ("n", int),
    "r": ("r", int), "r1": ("r1", int), "r2": ("r2", int),
    "p": ("p", float), "q": ("q", float),
    "q1": ("q1", float), "q2": ("q2", float),
    "s": ("s", float), "s1": ("s1", float), "s2": ("s2", float),
    "kmax": ("kmax", int),
    "quad.points": ("quad_points", int),
    "quad.panels": ("quad_panels", int),
    "time.slice": ("time_slice", float),
    "sweep.start": ("sweep_start", float),
    "sweep.stop": ("sweep_stop", float),
    "sweep.points": ("sweep_points", int),
    "data.path": ("data_path", str),
    "out.dir": ("out_dir", str),
    "seed": ("seed", int),
}


def parse_config(path) -> ExperimentConfig:
    """Read a flat key = value config file."""
    raw = {}
    text = Path(path).read_text()
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, val = (part.strip() for part in line.split("=", 1))
        raw[key.lower()] = val
    cfg = ExperimentConfig(mode=raw.get("mode", ""), raw=raw)
    for key, val in raw.items():
        if key == "field.params":
            cfg.field_params = tuple(float(v) for v in val.split(",") if v.strip())
            continue
        if key not in _KEYMAP:
            raise ConfigError(f"unknown config key {key!r}")
        attr, conv = _KEYMAP[key]
        try:
            setattr(cfg, attr, conv(float(val)) if conv is int else conv(val))
        except ValueError as e:
            raise ConfigError(f"bad value for {key}: {val!r}") from e
    validate_config(cfg)
    return cfg


def validate_config(cfg: ExperimentConfig):
    if cfg.mode not in MODES:
        raise ConfigError(f"unknown mode {cfg.mode!r}; known: {MODES}")
    if cfg.mode == "rates":
        if not cfg.data_path:
            raise ConfigError("rates mode requires data.path")
        return
    if not cfg.field_name:
        raise ConfigError("field.name is required")
    if cfg.n not in (1, 2):
        raise ConfigError(f"domain.n must be 1 or 2, got {cfg.n}")
    if cfg.mode in ("moduli", "besov", "jackson", "whitney") and cfg.r < 1:
        raise ConfigError("r must be >= 1")
    if cfg.mode == "whitney" and not cfg.s < cfg.r:
        raise ConfigError(f"whitney needs s < r, got s={cfg.s}, r={cfg.r}")
    if cfg.mode in ("greedy-space", "greedy-st") and cfg.r2 < 2:
        raise ConfigError("r2 must be >= 2")
    if cfg.mode == "greedy-st":
        s2 = cfg.s2 if cfg.s2 else 2.0
        q2 = cfg.q2 if cfg.q2 else 2.0
        bound = cfg.n * max(1.0 / q2 - 0.5, 0.0)
        if not s2 > bound:
            raise ConfigError(
                f"greedy-st needs s2 > n(1/q2 - 1/2)+ = {bound}, got s2={s2}")


@dataclass
class RateFit:
    """Least-squares slope on (log m, log error)."""

    points: list
    slope: float
    intercept: float
    residual: float
    window: tuple
    dropped: int = 0
    excluded_zero: int = 0

    @property
    def rate(self):
        return -self.slope


def fit_rate(points, drop_smallest=2) -> RateFit:
    """Fit error ~ c * m^slope from (cardinality, error) pairs.

    Zero-error points are excluded (with notice in the result); the
    ``drop_smallest`` smallest-m points are dropped as pre-asymptotic.
    """
    pts = sorted((float(m), float(e)) for m, e in points)
    usable = [(m, e) for m, e in pts if e > 0.0]
    excluded = len(pts) - len(usable)
    if drop_smallest and len(usable) - drop_smallest >= 3:
        usable = usable[drop_smallest:]
        dropped = drop_smallest
    else:
        dropped = 0
    if len(usable) < 3:
        raise ConfigError(f"need at least 3 usable points, got {len(usable)}")
    lm = np.log([m for m, _ in usable])
    le = np.log([e for _, e in usable])
    A = np.stack([lm, np.ones_like(lm)], axis=1)
    (slope, intercept), res, *_ = np.linalg.lstsq(A, le, rcond=None)
    resid = float(np.sqrt(res[0] / len(lm))) if len(res) else 0.0
    return RateFit(points=usable, slope=float(slope),
                   intercept=float(intercept), residual=resid,
                   window=(usable[0][0], usable[-1][0]), dropped=dropped,
                   excluded_zero=excluded)


# ---------------------------------------------------------------------------

def standard_corpus(domain=None):
    """The five-family test corpus used by the acceptance experiments."""
    domain = domain or DomainSpec()
    return [
        make_test_field("constant", [3.0], domain),
        make_test_field("poly", [2, 1], domain),
        make_test_field("time-power", [0.25], domain),
        make_test_field("space-power", [0.3, 0.5], domain),
        make_test_field("tensor-singular", [0.25], domain),
    ]


def _row(sweep, card, err, t0):
    return {"sweep": float(sweep), "cardinality": int(card),
            "error": float(err), "wall_ms": (time.perf_counter() - t0) * 1e3}


def run_experiment(cfg: ExperimentConfig):
    """Execute the configured sweep; returns (rows, extras)."""
    validate_config(cfg)
    if cfg.mode == "rates":
        return _run_rates(cfg)
    if cfg.quad_points is not None or cfg.quad_panels is not None:
        from . import quadrature
        prev = quadrature.set_defaults(cfg.quad_points, cfg.quad_panels)
        try:
            return _run_field_experiment(cfg)
        finally:
            quadrature.set_defaults(*prev)
    return _run_field_experiment(cfg)


def _run_field_experiment(cfg: ExperimentConfig):
    f = cfg.make_field()
    rows, extras = [], {}
    if cfg.mode == "moduli":
        params = SmoothnessParams(r=cfg.r, p=cfg.p)
        omegas, avgs = [], []
        for u in cfg.sweep():
            t0 = time.perf_counter()
            om = modulus_sup(f, (0.0, cfg.T), u, params)
            avgs.append(modulus_avg(f, (0.0, cfg.T), u, params))
            omegas.append(om)
            rows.append(_row(u, 0, om, t0))
        extras = {"omega": omegas, "w_avg": avgs}
    elif cfg.mode == "besov":
        bp = BesovParams(s=cfg.s, q=cfg.q, kmax=cfg.kmax)
        t0 = time.perf_counter()
        terms = besov_terms(f, (0.0, cfg.T), bp,
                            SmoothnessParams(r=bp.order, p=cfg.p))
        q = cfg.q
        partial = (np.cumsum(terms ** q) ** (1.0 / q) if not np.isinf(q)
                   else np.maximum.accumulate(terms))
        for k, val in enumerate(partial):
            rows.append(_row(k, 0, val, t0))
            t0 = time.perf_counter()
        extras = {"terms": terms.tolist(), "seminorm": float(partial[-1]),
                  "last_term": float(terms[-1])}
    elif cfg.mode == "jackson":
        h_ratios = []
        for L in cfg.sweep():
            t0 = time.perf_counter()
            interval = (0.0, L)
            poly = jackson_construct(f, interval, cfg.r, cfg.p)
            err = lp_error(f, poly, cfg.p)
            w = modulus_avg(f, interval, L / (2 * cfg.r),
                            SmoothnessParams(r=cfg.r, p=cfg.p))
            ratio = 0.0 if w == 0 and err < 1e-9 else (err / w) ** cfg.p
            h_ratios.append(ratio)
            rows.append(_row(L, 0, ratio, t0))
        extras = {"ratios": h_ratios}
    elif cfg.mode == "whitney":
        for L in cfg.sweep():
            t0 = time.perf_counter()
            ratio = whitney_ratio(f, (0.0, L), cfg.r, cfg.p, cfg.q, cfg.s)
            rows.append(_row(L, 0, ratio, t0))
    elif cfg.mode == "greedy-time":
        cache = {}
        for delta in cfg.sweep():
            t0 = time.perf_counter()
            res = greedy_time(f, cfg.r, cfg.p, delta, cache=cache)
            rows.append(_row(delta, res.partition.size, res.global_error(cfg.p), t0))
        extras = {"uniform": [
            {"m": m, "error": uniform_time_error(f, cfg.r, cfg.p, m)}
            for m in (2 ** k for k in range(0, 12))]}
    elif cfg.mode == "greedy-space":
        tstar = cfg.time_slice if cfg.time_slice is not None else cfg.T / 2
        grid_fn = (lambda pts: f.sample([tstar], pts)[0])
        for delta in cfg.sweep():
            t0 = time.perf_counter()
            mesh, fem, hist = greedy_space(grid_fn, cfg.r2, delta, n=cfg.n)
            rows.append(_row(delta, mesh.size, hist[-1][1], t0))
    elif cfg.mode == "greedy-st":
        cache = {}
        reports = []
        for eps in cfg.sweep():
            t0 = time.perf_counter()
            part, fd, rep = build_fully_discrete(f, eps, cfg.r1, cfg.r2,
                                                 time_cache=cache)
            reports.append(rep)
            rows.append(_row(eps, rep["total_cardinality"],
                             rep["global_error"], t0))
        extras = {"reports": reports}
    if len(rows) >= 5 and all(r["error"] > 0 for r in rows) and \
            cfg.mode in ("greedy-time", "greedy-space", "greedy-st"):
        fit = fit_rate([(r["cardinality"], r["error"]) for r in rows])
        extras["rate_fit"] = {"rate": fit.rate, "slope": fit.slope,
                              "intercept": fit.intercept,
                              "residual": fit.residual,
                              "window": list(fit.window)}
    return rows, extras


def _run_rates(cfg):
    data = np.loadtxt(cfg.data_path, delimiter=",", skiprows=1, ndmin=2)
    if data.shape[1] >= 3:
        pts = [(r[1], r[2]) for r in data]          # sweep,card,error layout
    else:
        pts = [(r[0], r[1]) for r in data]
    fit = fit_rate(pts)
    rows = [{"sweep": m, "cardinality": int(m), "error": e, "wall_ms": 0.0}
            for m, e in fit.points]
    extras = {"rate_fit": {"rate": fit.rate, "slope": fit.slope,
                           "intercept": fit.intercept,
                           "residual": fit.residual,
                           "window": list(fit.window),
                           "dropped": fit.dropped,
                           "excluded_zero": fit.excluded_zero}}
    return rows, extras


def emit_report(rows, extras, cfg: ExperimentConfig, out_dir=None):
    """Write CSV, JSON and a plot-ready two-column file; returns paths."""
    if not rows:
        raise ConfigError("nothing to report: empty results")
    out = Path(out_dir or cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    stem = cfg.mode
    csv_path = out / f"{stem}.csv"
    lines = [CSV_HEADER]
    for r in rows:
        lines.append(f"{r['sweep']!r},{r['cardinality']},{r['error']!r},"
                     f"{r['wall_ms']:.3f}")
    csv_path.write_text("\n".join(lines) + "\n")
    json_path = out / f"{stem}.json"
    json_path.write_text(json.dumps({
        "config": {k: v for k, v in cfg.raw.items()},
        "seed": cfg.seed,
        "rows": [{k: r[k] for k in ("sweep", "cardinality", "error")}
                 for r in rows],
        "extras": _jsonable(extras),
    }, indent=2))
    dat_path = out / f"{stem}_curve.dat"
    xcol = "cardinality" if cfg.mode.startswith("greedy") else "sweep"
    dat_path.write_text("\n".join(
        f"{r[xcol]!r} {r['error']!r}" for r in rows) + "\n")
    paths = [str(csv_path), str(json_path), str(dat_path)]
    if "uniform" in extras:        # second curve: the non-adaptive baseline
        upath = out / f"{stem}_uniform_curve.dat"
        upath.write_text("\n".join(
            f"{u['m']} {u['error']!r}" for u in extras["uniform"]) + "\n")
        paths.append(str(upath))
    return paths


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    return obj
