"""Basins of attraction of an iteration on a rectangular grid of the complex plane.

At the default 16 digits the orbits are computed in IEEE double precision with
numpy, all pixels of a block advancing together.  Complex arithmetic goes
through :class:`~nsroots.numeric.SplitComplex`, so a pixel's result does not
depend on which block it is computed in.  Higher
precisions fall back to one mpmath orbit per pixel.
"""

import colorsys
import csv
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import mpmath
import numpy as np

from .errors import EvalError, StepError
from .methods import MethodId, step, weight_pair_for
from .numeric import BASIN_PRECISION, Precision, SplitComplex
from .problems import B1, CountingOracle

NONE = -1
STATS_HEADER = ("method", "converged_fraction", "mean_iters", "root0", "root1", "root2", "root3", "black")


@dataclass(frozen=True)
class BasinConfig:
    problem: object = B1
    method: MethodId = MethodId.SLSS
    weights: object = None
    grid_width: int = 256
    grid_height: int = 256
    bounds: tuple = (-3.0, 3.0, -3.0, 3.0)
    max_iters: int = 100
    root_tol: float = 1e-3
    divergence_bound: float = 1e10
    precision: Precision = BASIN_PRECISION

    def __post_init__(self):
        if self.grid_width < 1 or self.grid_height < 1:
            raise ValueError("grid dimensions must be >= 1")
        re_min, re_max, im_min, im_max = self.bounds
        if not (re_min < re_max and im_min < im_max):
            raise ValueError(f"empty bounds {self.bounds}")
        if not self.problem.roots:
            raise ValueError(f"problem {self.problem.id} has no known roots")

    @property
    def weight_pair(self):
        if self.weights is not None:
            return self.weights
        return weight_pair_for(self.method) if self.method.weighted else None


@dataclass
class BasinImage:
    """Row-major basin classification; ``root_index`` is NONE (-1) for black pixels."""

    width: int
    height: int
    root_index: np.ndarray
    iterations: np.ndarray
    max_iters: int
    n_roots: int
    method: Optional[MethodId] = None
    meta: dict = field(default_factory=dict)

    @property
    def pixels(self):
        return list(zip(self.root_index.ravel().tolist(), self.iterations.ravel().tolist()))


def pixel_centers(cfg, rows=None):
    """Complex pixel centers; row 0 is the top (largest imaginary part)."""
    re_min, re_max, im_min, im_max = cfg.bounds
    dre = (re_max - re_min) / cfg.grid_width
    dim = (im_max - im_min) / cfg.grid_height
    cols = np.arange(cfg.grid_width)
    rows = np.arange(cfg.grid_height) if rows is None else np.asarray(rows)
    re = re_min + (cols + 0.5) * dre
    im = im_max - (rows + 0.5) * dim
    return re[None, :] + 1j * im[:, None]


def _nearest(z, roots, tol):
    # squared distances keep the test free of hypot rounding differences
    d2 = np.stack([(z.re - r.real) ** 2 + (z.im - r.imag) ** 2 for r in roots], axis=1)
    idx = np.argmin(d2, axis=1)
    hit = d2[np.arange(len(z)), idx] < tol * tol
    return idx, hit


def _orbits_fast(z0, cfg):
    """Classify a 1-D complex128 array of starting points."""
    roots = cfg.problem.root_array()
    w = cfg.weight_pair
    z = SplitComplex.from_complex(z0)
    n = len(z)
    index = np.full(n, NONE, dtype=np.int64)
    iters = np.zeros(n, dtype=np.int64)
    idx, hit = _nearest(z, roots, cfg.root_tol)
    index[hit] = idx[hit]
    active = np.flatnonzero(~hit)
    oracle = CountingOracle(cfg.problem)
    bound2 = float(cfg.divergence_bound) ** 2
    with np.errstate(all="ignore"):
        for k in range(1, cfg.max_iters + 1):
            if active.size == 0:
                break
            new = step(cfg.method, oracle, z[active], w)
            z[active] = new
            iters[active] = k
            bad = ~new.isfinite() | (new.abs2() > bound2)
            idx, hit = _nearest(new, roots, cfg.root_tol)
            hit &= ~bad
            index[active[hit]] = idx[hit]
            active = active[~(hit | bad)]
    return index, iters


def _orbit_mp(z0, cfg):
    roots = cfg.problem.root_values()
    roots = [mpmath.mpc(r) for r in roots]
    w = cfg.weight_pair
    oracle = CountingOracle(cfg.problem)
    with cfg.precision.context():
        z = mpmath.mpc(z0)
        tol = mpmath.mpf(cfg.root_tol)
        for k in range(cfg.max_iters + 1):
            if k:
                try:
                    z = step(cfg.method, oracle, z, w)
                except (StepError, EvalError, ZeroDivisionError):
                    return NONE, k
                if abs(z) > cfg.divergence_bound:
                    return NONE, k
            d = [abs(z - r) for r in roots]
            j = min(range(len(d)), key=lambda i: (d[i], i))
            if d[j] < tol:
                return j, k
    return NONE, cfg.max_iters


def _fast(cfg):
    return cfg.precision.decimal_digits <= 16


def classify_point(z0, cfg):
    """(root index or NONE, iterations) for a single starting point."""
    if _fast(cfg):
        index, iters = _orbits_fast(np.array([complex(z0)]), cfg)
        return int(index[0]), int(iters[0])
    return _orbit_mp(z0, cfg)


def _render_rows(cfg, rows):
    z0 = pixel_centers(cfg, rows)
    shape = z0.shape
    if _fast(cfg):
        index, iters = _orbits_fast(z0.ravel(), cfg)
    else:
        res = [_orbit_mp(complex(z), cfg) for z in z0.ravel()]
        index = np.array([r[0] for r in res], dtype=np.int64)
        iters = np.array([r[1] for r in res], dtype=np.int64)
    return index.reshape(shape), iters.reshape(shape)


def _render_job(args):
    cfg, rows = args
    return _render_rows(cfg, rows)


def render_basin(cfg, jobs=1):
    """Classify every pixel center of the grid.

    With ``jobs > 1`` row bands are rendered in worker processes (built-in
    problems and weight pairs, which pickle by reference); the image is
    identical to the serial one.
    """
    all_rows = np.arange(cfg.grid_height)
    if jobs > 1 and cfg.grid_height > 1:
        bands = [b for b in np.array_split(all_rows, jobs) if b.size]
        args = [(cfg, b) for b in bands]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_render_job, args))
        index = np.concatenate([p[0] for p in parts])
        iters = np.concatenate([p[1] for p in parts])
    else:
        index, iters = _render_rows(cfg, all_rows)
    return BasinImage(
        cfg.grid_width, cfg.grid_height, index, iters, cfg.max_iters, len(cfg.problem.roots), cfg.method
    )


@dataclass(frozen=True)
class BasinStats:
    converged_fraction: float
    per_root: tuple
    black: int
    mean_iters: float

    @property
    def total(self):
        return sum(self.per_root) + self.black


def basin_stats(img):
    idx = img.root_index.ravel()
    total = idx.size
    per_root = tuple(int(np.count_nonzero(idx == k)) for k in range(img.n_roots))
    black = int(np.count_nonzero(idx == NONE))
    conv = idx != NONE
    mean = float(img.iterations.ravel()[conv].mean()) if conv.any() else 0.0
    return BasinStats((total - black) / total, per_root, black, mean)


def root_palette(n_roots):
    """Fully saturated hues at 360*k/n degrees, as floats in [0, 1]."""
    return np.array([colorsys.hsv_to_rgb(k / n_roots, 1.0, 1.0) for k in range(n_roots)])


def to_rgb(img):
    """uint8 (height, width, 3) image; brightness falls with iteration count, black for NONE."""
    palette = root_palette(img.n_roots)
    shade = np.clip(1.0 - img.iterations / img.max_iters, 0.25, 1.0)
    idx = img.root_index
    rgb = palette[np.where(idx == NONE, 0, idx)] * shade[..., None]
    rgb = np.rint(rgb * 255.0).astype(np.uint8)
    rgb[idx == NONE] = 0
    return rgb


def ppm_bytes(img):
    header = f"P6\n{img.width} {img.height}\n255\n".encode("ascii")
    return header + to_rgb(img).tobytes()


def write_ppm(img, path):
    with open(path, "wb") as fh:
        fh.write(ppm_bytes(img))


def stats_row(method, stats):
    counts = list(stats.per_root) + [""] * max(0, 4 - len(stats.per_root))
    return [str(method), f"{stats.converged_fraction:.6f}", f"{stats.mean_iters:.4f}", *counts[:4], stats.black]


def write_stats_csv(entries, path):
    """``entries``: iterable of (method id, BasinStats)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(STATS_HEADER)
        for method, stats in entries:
            writer.writerow(stats_row(method, stats))
