"""Matplotlib figures written next to the PPM/CSV outputs."""

import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .basins import basin_stats, to_rgb  # noqa: E402


def _draw(ax, img, bounds, title):
    re_min, re_max, im_min, im_max = bounds
    ax.imshow(to_rgb(img), extent=(re_min, re_max, im_min, im_max), origin="upper", interpolation="nearest")
    ax.set_title(title, fontsize=10)
    ax.set_xlabel("Re z", fontsize=8)
    ax.set_ylabel("Im z", fontsize=8)
    ax.tick_params(labelsize=7)


def plot_basin(img, bounds, path, title=None):
    fig, ax = plt.subplots(figsize=(4.5, 4.5))
    stats = basin_stats(img)
    label = title or (img.method.key.upper() if img.method else "basin")
    _draw(ax, img, bounds, f"{label}  (converged {stats.converged_fraction:.3f})")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_basin_panel(images, bounds, path, ncols=3):
    """Grid of basin images, one panel per method, titled with the converged fraction."""
    n = len(images)
    ncols = min(ncols, n)
    nrows = math.ceil(n / ncols)
    fig, axes = plt.subplots(nrows, ncols, figsize=(3.4 * ncols, 3.4 * nrows), squeeze=False)
    for ax, img in zip(axes.ravel(), images):
        frac = basin_stats(img).converged_fraction
        _draw(ax, img, bounds, f"{img.method.key.upper()}  ({frac:.3f})")
    for ax in axes.ravel()[n:]:
        ax.axis("off")
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
