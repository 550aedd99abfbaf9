"""Sweep orchestration: run (size, t_A, p_s) grids at fixed shot budgets,
locate g peaks, fit scaling exponents, and emit the versioned CSV artifacts
consumed by the figure scripts.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .decoder import PlaquetteDecoder, decode_chain_batch
from .geometry import build_brickwall, build_chain
from .observables import MomentStats, magnetization_batch, moment_stats
from .rng import float_key, stream_key
from .sampler import ProtocolParams, effective_flip_prob, sample_noisy_shots

SCHEMA_SWEEP = "nishimori-sweep-v1"
SCHEMA_GRID = "nishimori-grid-v1"
SCHEMA_SITEMAP = "nishimori-sitemap-v1"
SCHEMA_HIST = "nishimori-hist-v1"

SWEEP_COLUMNS = [
    "kind", "size", "n_sites", "t_A", "p_s", "p_sigma", "p_tilde",
    "shots", "seed", "mean_M", "mean_M_err", "mean_M2", "mean_M4",
    "f", "f_err", "g", "g_err",
]
GRID_EXTRA_COLUMNS = ["ridge_t_A_at_p_s", "ridge_p_s_at_t_A"]


@dataclass
class SweepConfig:
    kind: str = "brickwall"          # "brickwall" or "chain"
    sizes: tuple = (2, 3, 4)         # L_y values, or chain site counts
    t_A_grid: tuple = ()             # radians, inclusive
    p_s_grid: tuple = (0.0,)
    p_sigma: float = 0.0
    shots: int = 20000
    seed: int = 0
    workers: int = 1
    output: str = "sweep.csv"
    hist_output: str = None          # optional magnetization histogram CSV
    dump_shots: str = None           # optional bit-packed shot dump directory

    def __post_init__(self):
        if self.kind not in ("brickwall", "chain"):
            raise ValueError(f"unknown geometry kind {self.kind!r}")
        if not self.sizes or not self.t_A_grid or not self.p_s_grid:
            raise ValueError("size, t_A, and p_s grids must be nonempty")
        if self.shots < 100:
            raise ValueError("shots must be >= 100")
        for t in self.t_A_grid:
            if not 0.0 <= t <= math.pi / 4 + 1e-12:
                raise ValueError(f"t_A={t} outside [0, pi/4]")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


@dataclass
class GPeak:
    x: float
    height: float
    x_err: float
    height_err: float
    on_boundary: bool = False


_geom_cache: dict = {}


def _geometry(kind: str, size: int):
    key = (kind, size)
    geom = _geom_cache.get(key)
    if geom is None:
        geom = build_brickwall(size) if kind == "brickwall" else build_chain(size)
        _geom_cache[key] = geom
    return geom


def run_point(kind, size, t_A, p_s, p_sigma, shots, seed):
    """Sample, decode, and accumulate moments for one grid point.

    Pure function of its arguments; the sampler keys its random stream on
    every coordinate, so results are independent of execution order.
    """
    geom = _geometry(kind, size)
    params = ProtocolParams(t_A=t_A, p_s=p_s, p_sigma=p_sigma, shots=shots, seed=seed)
    shot = sample_noisy_shots(geom, params, np.arange(shots))
    if geom.is_2d:
        sigma_prime, _ = PlaquetteDecoder(geom).decode_batch(shot.s_prime)
    else:
        sigma_prime, _ = decode_chain_batch(geom, shot.s_prime)
    M = magnetization_batch(shot.sigma_readout, sigma_prime)
    boot = int(stream_key(seed, float_key(t_A), float_key(p_s), size)[0])
    return moment_stats(M, geom.n_sites, seed=boot), M


def _point_key(kind, size, t_A, p_s):
    return (kind, size, f"{t_A:.12g}", f"{p_s:.12g}")


def _row_of(kind, size, t_A, p_s, config, stats: MomentStats):
    return {
        "kind": kind,
        "size": size,
        "n_sites": stats.n_sites,
        "t_A": f"{t_A:.12g}",
        "p_s": f"{p_s:.12g}",
        "p_sigma": f"{config.p_sigma:.12g}",
        "p_tilde": f"{effective_flip_prob(t_A, p_s):.12g}",
        "shots": stats.shots,
        "seed": config.seed,
        "mean_M": f"{stats.mean_M:.12g}",
        "mean_M_err": f"{stats.mean_M_err:.12g}",
        "mean_M2": f"{stats.mean_M2:.12g}",
        "mean_M4": f"{stats.mean_M4:.12g}",
        "f": f"{stats.f:.12g}",
        "f_err": f"{stats.f_err:.12g}",
        "g": f"{stats.g:.12g}",
        "g_err": f"{stats.g_err:.12g}",
    }


def read_csv(path):
    """Parse a schema-versioned CSV into (schema, metadata, rows of str dicts)."""
    schema = None
    meta = {}
    rows = []
    header = None
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if "=" in body:
                    k, v = body.split("=", 1)
                    meta[k.strip()] = v.strip()
                    if k.strip() == "schema":
                        schema = v.strip()
                continue
            cells = line.split(",")
            if header is None:
                header = cells
            else:
                rows.append(dict(zip(header, cells)))
    return schema, meta, rows


def _write_csv(path, schema, meta, columns, rows):
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(f"# schema={schema}\n")
        for k, v in meta.items():
            fh.write(f"# {k}={v}\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(str(row[c]) for c in columns) + "\n")
    os.replace(tmp, path)


def _worker(args):
    kind, size, t_A, p_s, p_sigma, shots, seed = args
    stats, M = run_point(kind, size, t_A, p_s, p_sigma, shots, seed)
    return args, stats, M


def _grid_points(config: SweepConfig):
    for size in config.sizes:
        for t_A in config.t_A_grid:
            for p_s in config.p_s_grid:
                yield (config.kind, size, float(t_A), float(p_s),
                       config.p_sigma, config.shots, config.seed)


def run_sweep(config: SweepConfig, extra_columns=None, extra_of=None):
    """Run every grid point and write the sweep CSV.

    Existing rows in the output file (matched by grid-point key) are kept,
    so an interrupted sweep resumes where it stopped.  The finished file is
    byte-identical for a given (config, seed) at any worker count: rows are
    emitted in grid order and each point's random stream is keyed on its own
    coordinates.
    """
    done = {}
    if os.path.exists(config.output):
        schema, _, rows = read_csv(config.output)
        if schema == SCHEMA_SWEEP or schema == SCHEMA_GRID:
            for row in rows:
                key = (row["kind"], int(row["size"]),
                       f"{float(row['t_A']):.12g}", f"{float(row['p_s']):.12g}")
                done[key] = row
    points = list(_grid_points(config))
    pending = [
        p for p in points
        if _point_key(p[0], p[1], p[2], p[3]) not in done
    ]
    results = {}
    hists = {}
    if config.workers > 1 and len(pending) > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            for args, stats, M in pool.map(_worker, pending):
                results[_point_key(args[0], args[1], args[2], args[3])] = stats
                hists[_point_key(args[0], args[1], args[2], args[3])] = M
    else:
        for args in pending:
            _, stats, M = _worker(args)
            results[_point_key(args[0], args[1], args[2], args[3])] = stats
            hists[_point_key(args[0], args[1], args[2], args[3])] = M
    out_rows = []
    for kind, size, t_A, p_s, _, _, _ in points:
        key = _point_key(kind, size, t_A, p_s)
        if key in results:
            row = _row_of(kind, size, t_A, p_s, config, results[key])
        else:
            row = done[key]
        out_rows.append(row)
    columns = list(SWEEP_COLUMNS)
    schema = SCHEMA_SWEEP
    meta = {}
    if extra_columns:
        columns += extra_columns
        schema = SCHEMA_GRID
        meta = extra_of(out_rows)
    _write_csv(config.output, schema, meta, columns, out_rows)
    if config.hist_output and hists:
        _write_hist(config, points, hists)
    return out_rows


def _write_hist(config, points, hists):
    rows = []
    for kind, size, t_A, p_s, _, _, _ in points:
        M = hists.get(_point_key(kind, size, t_A, p_s))
        if M is None:
            continue
        vals, counts = np.unique(M, return_counts=True)
        for v, c in zip(vals, counts):
            rows.append({
                "kind": kind, "size": size, "t_A": f"{t_A:.12g}",
                "p_s": f"{p_s:.12g}", "M": int(v), "count": int(c),
            })
    _write_csv(config.hist_output, SCHEMA_HIST, {},
               ["kind", "size", "t_A", "p_s", "M", "count"], rows)


def find_g_peak(x, g, g_err, resamples: int = 500, seed: int = 0) -> GPeak:
    """Quadratic-interpolated location and height of the g maximum.

    A peak on the grid boundary cannot be interpolated; it is returned
    as-is with ``on_boundary`` set.
    """
    x = np.asarray(x, dtype=np.float64)
    g = np.asarray(g, dtype=np.float64)
    g_err = np.asarray(g_err, dtype=np.float64)
    if x.shape[0] < 5:
        raise ValueError("peak finding needs at least 5 grid points")
    order = np.argsort(x)
    x, g, g_err = x[order], g[order], g_err[order]
    k = int(np.argmax(g))
    if k == 0 or k == x.shape[0] - 1:
        return GPeak(float(x[k]), float(g[k]), 0.0, float(g_err[k]), on_boundary=True)

    def vertex(y0, y1, y2):
        x0, x1, x2 = x[k - 1], x[k], x[k + 1]
        denom = (x0 - x1) * (x0 - x2) * (x1 - x2)
        a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom
        b = (x2**2 * (y0 - y1) + x1**2 * (y2 - y0) + x0**2 * (y1 - y2)) / denom
        if a >= 0:
            return float(x1), float(y1)
        xv = -b / (2 * a)
        xv = min(max(xv, x0), x2)
        c = y1 - a * x1**2 - b * x1
        return float(xv), float(a * xv**2 + b * xv + c)

    xv, yv = vertex(g[k - 1], g[k], g[k + 1])
    rand = np.random.default_rng(np.random.SeedSequence([seed, k]))
    xs = np.empty(resamples)
    ys = np.empty(resamples)
    for r in range(resamples):
        draw = rand.normal([g[k - 1], g[k], g[k + 1]],
                           [g_err[k - 1], g_err[k], g_err[k + 1]])
        xs[r], ys[r] = vertex(*draw)
    return GPeak(xv, yv, float(xs.std(ddof=1)), float(ys.std(ddof=1)))


def find_g_peak_rows(rows, axis: str = "t_A") -> GPeak:
    """Peak of g along ``axis`` for an already-filtered set of sweep rows."""
    x = [float(r[axis]) for r in rows]
    g = [float(r["g"]) for r in rows]
    e = [float(r["g_err"]) for r in rows]
    return find_g_peak(x, g, e)


def fit_scaling(sizes, heights, height_errs=None):
    """Least-squares exponent of height ~ size^alpha; returns (alpha, stderr)."""
    sizes = np.asarray(sizes, dtype=np.float64)
    heights = np.asarray(heights, dtype=np.float64)
    if sizes.shape[0] < 3:
        raise ValueError("scaling fit needs at least 3 sizes")
    if np.any(heights <= 0):
        raise ValueError("scaling fit requires positive peak heights")
    lx = np.log(sizes)
    ly = np.log(heights)
    A = np.vstack([lx, np.ones_like(lx)]).T
    coef, res, _, _ = np.linalg.lstsq(A, ly, rcond=None)
    alpha = float(coef[0])
    dof = max(len(lx) - 2, 1)
    s2 = float(res[0]) / dof if res.size else 0.0
    cov = s2 * np.linalg.inv(A.T @ A)
    stderr = math.sqrt(max(cov[0, 0], 0.0))
    if height_errs is not None:
        # propagate measurement error on the heights through the slope
        errs = np.asarray(height_errs, dtype=np.float64) / heights
        w = np.linalg.pinv(A)[0]
        stderr = math.hypot(stderr, math.sqrt(float(np.sum((w * errs) ** 2))))
    return alpha, stderr


def phase_diagram(config: SweepConfig):
    """2D (t_A, p_s) sweep with ridge columns tracing the g maximum.

    Each row carries the interpolated ridge location along both axes; the
    file metadata reports the ridge endpoints (t_A at the smallest p_s and
    p_s at the largest t_A).
    """
    if len(config.sizes) != 1:
        raise ValueError("phase diagram runs a single size")
    if len(config.t_A_grid) < 8 or len(config.p_s_grid) < 8:
        raise ValueError("phase diagram grids need at least 8 points each")

    def ridge_meta(rows):
        t_of_ps, ps_of_t = _ridge(rows, config)
        for row in rows:
            row["ridge_t_A_at_p_s"] = f"{t_of_ps[row['p_s']]:.12g}"
            row["ridge_p_s_at_t_A"] = f"{ps_of_t[row['t_A']]:.12g}"
        ps_min = f"{min(config.p_s_grid):.12g}"
        ta_max = f"{max(config.t_A_grid):.12g}"
        return {
            "ridge_t_A_at_min_p_s": f"{t_of_ps[ps_min]:.12g}",
            "ridge_p_s_at_max_t_A": f"{ps_of_t[ta_max]:.12g}",
        }

    return run_sweep(config, extra_columns=GRID_EXTRA_COLUMNS, extra_of=ridge_meta)


def _ridge(rows, config):
    t_of_ps = {}
    for p_s in config.p_s_grid:
        key = f"{float(p_s):.12g}"
        sub = [r for r in rows if r["p_s"] == key]
        t_of_ps[key] = find_g_peak_rows(sub, axis="t_A").x
    ps_of_t = {}
    for t_A in config.t_A_grid:
        key = f"{float(t_A):.12g}"
        sub = [r for r in rows if r["t_A"] == key]
        ps_of_t[key] = find_g_peak_rows(sub, axis="p_s").x
    return t_of_ps, ps_of_t
