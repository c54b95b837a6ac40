import csv
import hashlib

import numpy as np
import pytest

from nsroots.basins import (
    NONE,
    STATS_HEADER,
    BasinConfig,
    BasinImage,
    basin_stats,
    classify_point,
    pixel_centers,
    ppm_bytes,
    render_basin,
    root_palette,
    to_rgb,
    write_ppm,
    write_stats_csv,
)
from nsroots.methods import COMPARATORS, MethodId
from nsroots.numeric import Precision

# sha256 of the default 256x256 SLSS render, frozen from repeated rendering
GOLDEN_SLSS_SHA256 = "37b00dd442caa4e1b296816d6437de98190d8a0f5f81d34d60532112aa839424"
ROSTER = (MethodId.SLSS,) + COMPARATORS


@pytest.fixture(scope="module")
def slss_default():
    return render_basin(BasinConfig())


def test_config_defaults_and_validation():
    cfg = BasinConfig()
    assert (cfg.grid_width, cfg.grid_height, cfg.bounds, cfg.max_iters, cfg.root_tol) == (
        256, 256, (-3.0, 3.0, -3.0, 3.0), 100, 1e-3)
    assert cfg.precision.decimal_digits == 16
    with pytest.raises(ValueError):
        BasinConfig(grid_width=0)
    with pytest.raises(ValueError):
        BasinConfig(bounds=(1, -1, -1, 1))


def test_classify_point_examples():
    cfg = BasinConfig()
    assert classify_point(1 + 0j, cfg) == (0, 0)
    assert classify_point(0j, cfg)[0] == NONE
    idx, iters = classify_point(2 + 0j, cfg)
    assert idx == 0 and iters > 0


def test_classify_point_high_precision_path():
    cfg = BasinConfig(precision=Precision(30))
    assert classify_point(1 + 0j, cfg) == (0, 0)
    assert classify_point(0j, cfg)[0] == NONE
    assert classify_point(2 + 0j, cfg)[0] == 0
    assert classify_point(0.3 + 1.1j, cfg)[0] == 2


def test_pixel_centers_orientation():
    cfg = BasinConfig(grid_width=4, grid_height=2, bounds=(0, 4, 0, 2))
    z = pixel_centers(cfg)
    assert z[0, 0] == 0.5 + 1.5j
    assert z[1, 3] == 3.5 + 0.5j


def test_single_pixel_on_root():
    img = render_basin(BasinConfig(grid_width=1, grid_height=1, bounds=(0.9, 1.1, -0.1, 0.1)))
    assert img.pixels == [(0, 0)]


@pytest.mark.parametrize("method", ROSTER, ids=str)
def test_pole_pixel_is_black(method):
    img = render_basin(BasinConfig(method=method, grid_width=5, grid_height=5))
    assert img.root_index[2, 2] == NONE


def test_default_render_properties(slss_default):
    img = slss_default
    assert set(np.unique(img.root_index)) == {NONE, 0, 1, 2, 3}
    assert img.iterations.max() <= img.max_iters
    stats = basin_stats(img)
    assert stats.total == 256 * 256
    assert sum(stats.per_root) + stats.black == img.width * img.height


def test_golden_and_repeatable(slss_default):
    data = ppm_bytes(slss_default)
    assert data == ppm_bytes(render_basin(BasinConfig()))
    assert hashlib.sha256(data).hexdigest() == GOLDEN_SLSS_SHA256


@pytest.mark.parametrize("jobs", [2, 3])
def test_parallel_render_identical(slss_default, jobs):
    img = render_basin(BasinConfig(), jobs=jobs)
    assert np.array_equal(img.root_index, slss_default.root_index)
    assert np.array_equal(img.iterations, slss_default.iterations)


def test_evaluation_order_independence(slss_default):
    # classifying pixels one at a time gives the block result
    cfg = BasinConfig()
    z = pixel_centers(cfg)
    rng = np.random.default_rng(7)
    for r, c in rng.integers(0, 256, size=(40, 2)):
        assert classify_point(z[r, c], cfg) == (slss_default.root_index[r, c], slss_default.iterations[r, c])


def test_point_reflection_symmetry(slss_default):
    swap = np.array([1, 0, 3, 2])
    idx = slss_default.root_index
    flipped = idx[::-1, ::-1]
    expected = np.where(flipped == NONE, NONE, swap[np.where(flipped == NONE, 0, flipped)])
    assert np.array_equal(idx, expected)
    assert np.array_equal(slss_default.iterations, slss_default.iterations[::-1, ::-1])


def test_root_containment():
    cfg = BasinConfig(grid_width=101, grid_height=101, bounds=(-1.01, 1.01, -1.01, 1.01), root_tol=0.05)
    img = render_basin(cfg)
    z = pixel_centers(cfg).ravel()
    d = np.min(np.abs(z[:, None] - cfg.problem.root_array()[None, :]), axis=1)
    near = d < cfg.root_tol
    assert near.any()
    assert np.all(img.iterations.ravel()[near] == 0)


def test_fast_and_multiprecision_paths_agree_off_diagonals():
    # the diagonals |Re z| = |Im z| are basin boundaries: rounding decides them
    fast = render_basin(BasinConfig(grid_width=12, grid_height=12))
    slow = render_basin(BasinConfig(grid_width=12, grid_height=12, precision=Precision(30)))
    z = pixel_centers(BasinConfig(grid_width=12, grid_height=12))
    off = np.abs(np.abs(z.real) - np.abs(z.imag)) > 1e-9
    assert np.array_equal(fast.root_index[off], slow.root_index[off])


def test_stats_all_black():
    img = BasinImage(3, 2, np.full((2, 3), NONE), np.full((2, 3), 100), 100, 4)
    s = basin_stats(img)
    assert s.converged_fraction == 0 and s.black == 6 and s.mean_iters == 0


def test_ppm_encoding(tmp_path):
    img = BasinImage(2, 1, np.array([[NONE, 1]]), np.array([[7, 0]]), 10, 4)
    data = ppm_bytes(img)
    assert data[:11] == b"P6\n2 1\n255\n"
    assert data[11:14] == b"\x00\x00\x00"
    # root 1 of 4: hue 90 degrees, full brightness at 0 iterations
    assert tuple(data[14:17]) == (128, 255, 0)
    path = tmp_path / "x.ppm"
    write_ppm(img, path)
    assert path.read_bytes() == data


def test_header_for_default_grid(slss_default):
    assert ppm_bytes(slss_default).startswith(b"P6\n256 256\n255\n")
    assert len(ppm_bytes(slss_default)) == 15 + 256 * 256 * 3


def test_palette_and_shading():
    pal = root_palette(4)
    assert np.allclose(pal[0], [1, 0, 0]) and np.allclose(pal[2], [0, 1, 1])
    img = BasinImage(3, 1, np.array([[0, 0, 0]]), np.array([[0, 50, 100]]), 100, 4)
    rgb = to_rgb(img)
    assert rgb[0, :, 0].tolist() == [255, 128, 64]


def test_stats_csv(tmp_path, slss_default):
    path = tmp_path / "s.csv"
    write_stats_csv([("slss", basin_stats(slss_default))], path)
    rows = list(csv.reader(path.open()))
    assert tuple(rows[0]) == STATS_HEADER
    assert rows[1][0] == "slss" and 0.9 < float(rows[1][1]) <= 1.0
    assert sum(int(v) for v in rows[1][3:]) == 256 * 256


def test_figure_written(tmp_path, slss_default):
    from nsroots.plotting import plot_basin, plot_basin_panel

    one, panel = tmp_path / "one.png", tmp_path / "panel.png"
    plot_basin(slss_default, (-3, 3, -3, 3), one)
    plot_basin_panel([slss_default, slss_default], (-3, 3, -3, 3), panel)
    for p in (one, panel):
        assert p.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_slss_basin_larger_than_tp(slss_default):
    tp = render_basin(BasinConfig(method=MethodId.TP))
    assert basin_stats(slss_default).converged_fraction > basin_stats(tp).converged_fraction
