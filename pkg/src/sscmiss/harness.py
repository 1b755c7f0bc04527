"""Sweep orchestration: run the generate/sample/cluster/complete/evaluate
pipeline over a sampling-ratio grid, average over trials, and emit CSV/SVG.

All randomness derives from (base_seed, trial_index); two runs with the same
config produce byte-identical sweep.csv.
"""

import csv
import math
import os
from dataclasses import dataclass, field, fields

import numpy as np

from . import affinity as affin
from . import completion, metrics
from .datagen import SamplingSpec, generate_model, normalize_observed, sample

ALGORITHMS = ("ewzf", "ewzf-oo", "ewzf-oo-lasso", "tsc")
METRIC_NAMES = ("clustering_error", "completion_error", "angle_error",
                "grassmann_error")


@dataclass
class SweepConfig:
    n: int = 50
    L: int = 3
    dims: int = 3
    N_per: int = 150
    mode: str = "gaussian"
    pattern: str = "per-column-random"
    p_grid: tuple = tuple(np.round(np.arange(0.30, 0.951, 0.05), 10))
    algorithms: tuple = ("ewzf-oo",)
    trials: int = 20
    base_seed: int = 0
    alpha: float = 7.34
    tsc_q: int = 0               # 0 means the default q rule
    normalize_columns: bool = False
    # unit-normalize the zero-filled columns before the bp/correlation
    # affinities; the lasso variant keeps raw columns because its lambda
    # rule is scale-adaptive (alpha is calibrated for raw cross-products)
    normalize_observed: bool = True
    # a clustering curve counts as "zero" once its mean error drops below
    # half of one misclassified point per trial at the default sizes; exact
    # zero over many trials is statistically fragile (a single ambiguous
    # boundary point in one trial is 1/450 ~ 2.2e-3)
    zero_tol_clustering: float = 1e-3
    zero_tol_error: float = 1e-3
    out_dir: str = "out"
    svg: bool = False

    def __post_init__(self):
        grid = tuple(float(p) for p in self.p_grid)
        if not grid or any(not 0.0 < p <= 1.0 for p in grid):
            raise ValueError("p_grid values must lie in (0, 1]")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("p_grid must be strictly increasing")
        self.p_grid = grid
        self.algorithms = tuple(self.algorithms)
        for alg in self.algorithms:
            if alg not in ALGORITHMS:
                raise ValueError(f"unknown algorithm: {alg}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")


@dataclass
class SweepResult:
    rows: list                    # (p, algorithm, metric, mean, std, trials)
    records: list = field(default_factory=list)  # raw per-trial records


def _trial_seeds(base_seed, trial_index):
    state = np.random.SeedSequence([base_seed, trial_index]).generate_state(3)
    return tuple(int(s) for s in state)


def _normalize_model_columns(model):
    """Scale coefficient columns so every data column has unit norm."""
    for ell in range(model.L):
        norms = np.linalg.norm(model.bases[ell] @ model.coeffs[ell], axis=0)
        model.coeffs[ell] /= np.where(norms > 0, norms, 1.0)


def _build_affinity(config, X, algorithm):
    prep = normalize_observed(X) if config.normalize_observed else X
    if algorithm == "ewzf":
        return affin.affinity_ewzf(prep)
    if algorithm == "ewzf-oo":
        return affin.affinity_ewzf_oo(prep)
    if algorithm == "ewzf-oo-lasso":
        return affin.affinity_ewzf_oo_lasso(X, alpha=config.alpha)
    if algorithm == "tsc":
        q = config.tsc_q or affin.default_tsc_q(X.N // config.L)
        return affin.affinity_tsc(prep, q)
    raise ValueError(f"unknown algorithm: {algorithm}")


def run_trial(config, p, algorithm, trial_index):
    """One full pipeline pass. Per-stage failures leave the downstream
    metrics NaN and set a reason."""
    model_seed, mask_seed, km_seed = _trial_seeds(config.base_seed,
                                                  trial_index)
    record = {"p": p, "algorithm": algorithm, "trial": trial_index,
              "reason": ""}
    for name in METRIC_NAMES:
        record[name] = math.nan
    model = generate_model(config.n, config.L, config.dims, config.N_per,
                           mode=config.mode, seed=model_seed)
    if config.normalize_columns:
        _normalize_model_columns(model)
    X = sample(model, SamplingSpec(config.pattern, p, seed=mask_seed))
    try:
        aff = _build_affinity(config, X, algorithm)
        pred = affin.spectral_cluster(aff, config.L, seed=km_seed)
    except Exception as exc:
        record["reason"] = f"clustering: {exc}"
        return record
    record["clustering_error"] = metrics.clustering_error(pred, model.labels)
    truth = model.data()
    try:
        comp = completion.complete_by_cluster(X, pred)
        record["completion_error"] = metrics.completion_error(comp.completed,
                                                              truth)
    except Exception as exc:
        record["reason"] = f"completion: {exc}"
        return record
    try:
        est_bases = []
        for lab in range(config.L):
            cols = np.flatnonzero(pred == lab)
            if cols.size == 0:
                raise ValueError(f"predicted cluster {lab} is empty")
            est_bases.append(completion.identify_subspace(
                comp.completed[:, cols]))
        _, record["angle_error"] = metrics.match_subspaces(
            est_bases, model.bases, metric="angle")
        _, record["grassmann_error"] = metrics.match_subspaces(
            est_bases, model.bases, metric="grassmann")
    except Exception as exc:
        record["reason"] = f"subspace: {exc}"
    return record


def sweep(config):
    """All (p, algorithm, trial) combinations, aggregated as mean/std per
    metric. Per-trial failures never abort the sweep."""
    records = []
    for p in config.p_grid:
        for algorithm in config.algorithms:
            for trial in range(config.trials):
                records.append(run_trial(config, p, algorithm, trial))
    records.sort(key=lambda r: (r["p"], r["algorithm"], r["trial"]))
    rows = []
    for p in config.p_grid:
        for algorithm in config.algorithms:
            group = [r for r in records
                     if r["p"] == p and r["algorithm"] == algorithm]
            for name in METRIC_NAMES:
                vals = np.array([r[name] for r in group])
                good = vals[~np.isnan(vals)]
                mean = float(good.mean()) if good.size else math.nan
                std = float(good.std()) if good.size else math.nan
                rows.append((p, algorithm, name, mean, std, int(good.size)))
    return SweepResult(rows=rows, records=records)


def zero_threshold(result, algorithm, metric, tol):
    """Smallest grid p whose mean metric is <= tol; None if never reached."""
    for (p, alg, name, mean, _, _) in result.rows:
        if alg == algorithm and name == metric and mean <= tol:
            return p
    return None


def write_sweep_csv(path, result):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["p", "algorithm", "metric", "mean", "std", "trials"])
        for (p, alg, name, mean, std, trials) in result.rows:
            writer.writerow([f"{p:.17g}", alg, name, f"{mean:.17g}",
                             f"{std:.17g}", trials])


def read_sweep_csv(path):
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != ["p", "algorithm", "metric", "mean", "std", "trials"]:
            raise ValueError("unexpected sweep.csv header")
        for row in reader:
            rows.append((float(row[0]), row[1], row[2], float(row[3]),
                         float(row[4]), int(row[5])))
    return SweepResult(rows=rows)


_SVG_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")


def _svg_line_chart(metric, series, width=640, height=480):
    """Minimal SVG line chart: one polyline per algorithm, labeled axes."""
    ml, mr, mt, mb = 60, 20, 20, 45
    pw, ph = width - ml - mr, height - mt - mb
    xs = sorted({x for pts in series.values() for (x, _) in pts})
    ys = [y for pts in series.values() for (_, y) in pts
          if not math.isnan(y)]
    x_lo, x_hi = (min(xs), max(xs)) if xs else (0.0, 1.0)
    y_lo, y_hi = 0.0, (max(ys) if ys else 1.0) or 1.0
    if x_hi == x_lo:
        x_hi = x_lo + 1.0

    def sx(x):
        return ml + (x - x_lo) / (x_hi - x_lo) * pw

    def sy(y):
        return mt + ph - (y - y_lo) / (y_hi - y_lo) * ph

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
             f'height="{height}">',
             f'<rect width="{width}" height="{height}" fill="white"/>',
             f'<line x1="{ml}" y1="{mt + ph}" x2="{ml + pw}" y2="{mt + ph}" '
             f'stroke="black"/>',
             f'<line x1="{ml}" y1="{mt}" x2="{ml}" y2="{mt + ph}" '
             f'stroke="black"/>',
             f'<text x="{ml + pw / 2:.1f}" y="{height - 8}" '
             f'text-anchor="middle" font-size="14">sampling ratio p</text>',
             f'<text x="15" y="{mt + ph / 2:.1f}" text-anchor="middle" '
             f'font-size="14" transform="rotate(-90 15 {mt + ph / 2:.1f})">'
             f'{metric}</text>']
    for tick in np.linspace(x_lo, x_hi, 5):
        parts.append(f'<text x="{sx(tick):.1f}" y="{mt + ph + 18}" '
                     f'text-anchor="middle" font-size="11">{tick:.2f}</text>')
    for tick in np.linspace(y_lo, y_hi, 5):
        parts.append(f'<text x="{ml - 6}" y="{sy(tick) + 4:.1f}" '
                     f'text-anchor="end" font-size="11">{tick:.3g}</text>')
    for idx, (alg, pts) in enumerate(sorted(series.items())):
        color = _SVG_COLORS[idx % len(_SVG_COLORS)]
        coords = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for (x, y) in pts
                          if not math.isnan(y))
        parts.append(f'<polyline points="{coords}" fill="none" '
                     f'stroke="{color}" stroke-width="1.5"/>')
        parts.append(f'<text x="{ml + pw - 5}" y="{mt + 16 * (idx + 1)}" '
                     f'text-anchor="end" font-size="12" fill="{color}">'
                     f'{alg}</text>')
    parts.append("</svg>")
    return "\n".join(parts)


def emit(result, out_dir, svg=False):
    """Write sweep.csv (and optional per-metric SVG charts). Returns the
    list of files written."""
    os.makedirs(out_dir, exist_ok=True)
    files = []
    csv_path = os.path.join(out_dir, "sweep.csv")
    write_sweep_csv(csv_path, result)
    files.append(csv_path)
    if svg:
        by_metric = {}
        for (p, alg, name, mean, _, _) in result.rows:
            by_metric.setdefault(name, {}).setdefault(alg, []).append(
                (p, mean))
        for name, series in by_metric.items():
            path = os.path.join(out_dir, f"{name}.svg")
            with open(path, "w") as fh:
                fh.write(_svg_line_chart(name, series))
            files.append(path)
    return files


def parse_p_grid(text):
    """Parse 'a:b:step' or a comma-separated list of grid values."""
    if ":" in text:
        a, b, step = (float(t) for t in text.split(":"))
        count = int(math.floor((b - a) / step + 0.5)) + 1
        return tuple(round(a + i * step, 10) for i in range(count)
                     if a + i * step <= b + 1e-9)
    return tuple(float(t) for t in text.split(","))


def parse_config_file(path):
    """Flat key=value config file; '#' starts a comment."""
    out = {}
    valid = {f.name for f in fields(SweepConfig)}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value")
            key, value = (t.strip() for t in line.split("=", 1))
            if key not in valid:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            out[key] = value
    return out


def config_from_strings(raw):
    """Build a SweepConfig from string values (config file or CLI)."""
    kwargs = {}
    for f in fields(SweepConfig):
        if f.name not in raw:
            continue
        value = raw[f.name]
        if not isinstance(value, str):
            kwargs[f.name] = value
        elif f.name == "p_grid":
            kwargs[f.name] = parse_p_grid(value)
        elif f.name == "algorithms":
            kwargs[f.name] = tuple(t.strip() for t in value.split(","))
        elif f.name in ("normalize_columns", "normalize_observed", "svg"):
            kwargs[f.name] = value.lower() in ("1", "true", "yes")
        elif f.name in ("mode", "pattern", "out_dir"):
            kwargs[f.name] = value
        elif f.name in ("alpha", "zero_tol_clustering", "zero_tol_error"):
            kwargs[f.name] = float(value)
        else:
            kwargs[f.name] = int(value)
    return SweepConfig(**kwargs)
