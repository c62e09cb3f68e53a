import json

import numpy as np
import pytest

from kdecoreset import ingest, kde, ordering
from kdecoreset.cli import EXIT_DATA, EXIT_OK, EXIT_USAGE, main


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    pts = root / "pts.txt"
    assert main(["synth", "--depth", "4", "--out", str(pts)]) == EXIT_OK
    kdcs = root / "data.kdcs"
    assert (
        main(
            ["order", "--input", str(pts), "--out", str(kdcs), "--seed", "5"]
        )
        == EXIT_OK
    )
    return root, pts, kdcs


def test_order_matches_table_instance(tmp_path, capsys):
    # seven crafted points, one per Z-order cell of a wide layout
    pts = np.array(
        [
            [0.1, 0.1], [0.6, 0.1], [0.1, 0.6], [0.6, 0.6],
            [0.3, 0.3], [0.8, 0.3], [0.3, 0.8],
        ]
    )
    src = tmp_path / "seven.txt"
    ingest.save_text_points(pts, src)
    out = tmp_path / "seven.kdcs"
    code = main(
        [
            "order", "--input", str(src), "--out", str(out),
            "--mask", "0b101",
        ]
    )
    assert code == EXIT_OK
    loaded, meta = ingest.load_priority_dataset(out)
    assert meta.mask == 0b101
    # priority order must equal the golden rank order applied to the
    # Z-order-sorted points
    from kdecoreset import zorder

    normalized = ingest.PointSet(points=pts).normalized()
    zsorted = pts[zorder.zorder_sort(normalized)]
    golden = [5, 1, 3, 4, 0, 6, 2]
    assert np.array_equal(loaded.points, zsorted[golden])


def test_order_idempotent_bytes(workspace, tmp_path):
    _, pts, _ = workspace
    a = tmp_path / "a.kdcs"
    b = tmp_path / "b.kdcs"
    for out in (a, b):
        assert (
            main(
                [
                    "order", "--input", str(pts), "--out", str(out),
                    "--seed", "13",
                ]
            )
            == EXIT_OK
        )
    assert a.read_bytes() == b.read_bytes()


def test_raster_k_equals_count_reproduces_full(workspace, tmp_path):
    root, _, kdcs = workspace
    _, meta = ingest.load_priority_dataset(kdcs)
    out = tmp_path / "full"
    code = main(
        [
            "raster", "--kdcs", str(kdcs), "--k", str(meta.source_count),
            "--sigma", "0.03", "--width", "32", "--height", "32",
            "--out", str(out),
        ]
    )
    assert code == EXIT_OK
    raster = kde.load_raster(out)
    ps, _ = ingest.load_priority_dataset(kdcs)
    expect = kde.kde_raster(
        ps.normalized(), raster.grid, kde.KernelParams(0.03)
    )
    assert np.array_equal(
        raster.values, expect.values.astype(np.float32).astype(np.float64)
    )


def test_raster_eps_computes_k(workspace, tmp_path, capsys):
    _, _, kdcs = workspace
    out = tmp_path / "eps"
    code = main(
        [
            "raster", "--kdcs", str(kdcs), "--eps", "0.05", "--delta", "0.3",
            "--sigma", "0.03", "--width", "16", "--height", "16",
            "--out", str(out), "--no-png",
        ]
    )
    assert code == EXIT_OK
    printed = dict(
        line.split("=", 1) for line in capsys.readouterr().out.splitlines()
    )
    spec = ordering.CoresetSpec(eps=0.05, delta=0.3)
    assert int(printed["k"]) == ordering.coreset_size_for_eps(spec)


def test_raster_png_dimensions(workspace, tmp_path):
    from PIL import Image

    _, _, kdcs = workspace
    out = tmp_path / "img"
    assert (
        main(
            [
                "raster", "--kdcs", str(kdcs), "--k", "100",
                "--sigma", "0.03", "--width", "40", "--height", "24",
                "--out", str(out),
            ]
        )
        == EXIT_OK
    )
    with Image.open(str(out) + ".png") as img:
        assert img.size == (40, 24)


def test_raster_k_too_large_is_data_error(workspace, tmp_path):
    _, _, kdcs = workspace
    code = main(
        [
            "raster", "--kdcs", str(kdcs), "--k", "999999",
            "--sigma", "0.03", "--out", str(tmp_path / "x"),
        ]
    )
    assert code == EXIT_DATA


def test_compare_table_deterministic(workspace, tmp_path, capsys):
    _, _, kdcs = workspace
    args = [
        "compare", "--kdcs", str(kdcs), "--sizes", "100,300",
        "--trials", "1", "--sigma", "0.03", "--width", "32",
        "--height", "32", "--seed", "2",
        "--out", str(tmp_path / "table.json"),
    ]
    assert main(args) == EXIT_OK
    first = capsys.readouterr().out
    assert main(args) == EXIT_OK
    assert capsys.readouterr().out == first
    rows = json.loads((tmp_path / "table.json").read_text())
    assert [row["size"] for row in rows] == [100, 300]


def test_denoise_blank_when_everything_suppressed(workspace, tmp_path, capsys):
    _, _, kdcs = workspace
    out = tmp_path / "blank"
    code = main(
        [
            "denoise", "--kdcs", str(kdcs), "--k", "200", "--sigma", "0.03",
            "--width", "32", "--height", "32",
            "--percentage", "1.0", "--radius", "0.0",
            "--reference-max", "999.0", "--out", str(out),
        ]
    )
    assert code == EXIT_OK
    err = capsys.readouterr().err
    assert "all pixels suppressed" in err
    assert not kde.load_raster(out).values.any()


def test_denoise_radius_zero_is_threshold(workspace, tmp_path):
    _, _, kdcs = workspace
    out = tmp_path / "thr"
    assert (
        main(
            [
                "denoise", "--kdcs", str(kdcs), "--k", "300",
                "--sigma", "0.03", "--width", "32", "--height", "32",
                "--percentage", "0.5", "--radius", "0.0", "--out", str(out),
            ]
        )
        == EXIT_OK
    )
    cleaned = kde.load_raster(out)
    ps, _ = ingest.load_priority_dataset(kdcs)
    raster = kde.kde_raster(
        ps.normalized()[:300], cleaned.grid, kde.KernelParams(0.03)
    )
    threshold = 0.5 * raster.max()
    expect = np.where(raster.values >= threshold, raster.values, 0.0)
    assert np.array_equal(
        cleaned.values, expect.astype(np.float32).astype(np.float64)
    )


def test_denoise_region_suggestion_echoes_params(tmp_path, capsys):
    # planted singleton far from a dense cluster
    rng = np.random.default_rng(0)
    cluster = rng.normal([0.3, 0.3], 0.02, size=(2000, 2))
    pts = np.vstack([cluster, [[0.9, 0.9]]])
    src = tmp_path / "planted.txt"
    ingest.save_text_points(pts, src)
    kdcs = tmp_path / "planted.kdcs"
    assert main(["order", "--input", str(src), "--out", str(kdcs)]) == EXIT_OK
    out = tmp_path / "zapped"
    code = main(
        [
            "denoise", "--kdcs", str(kdcs), "--sigma", "0.02",
            "--width", "64", "--height", "64",
            "--region", "0.8,0.8,1.0,1.0", "--out", str(out),
        ]
    )
    assert code == EXIT_OK
    printed = dict(
        line.split("=", 1)
        for line in capsys.readouterr().out.splitlines()
    )
    assert 0.0 < float(printed["percentage"]) < 1.0
    cleaned = kde.load_raster(out)
    # the singleton's neighborhood is gone
    assert not cleaned.values[48:, 48:].any()


def test_denoise_cannot_suppress_exit_code(workspace, tmp_path, capsys):
    _, _, kdcs = workspace
    code = main(
        [
            "denoise", "--kdcs", str(kdcs), "--k", "300", "--sigma", "0.03",
            "--width", "32", "--height", "32",
            "--region", "0,0,1,1", "--out", str(tmp_path / "x"),
        ]
    )
    assert code == EXIT_DATA
    assert "cannot suppress" in capsys.readouterr().err


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as err:
        main(["raster", "--kdcs"])
    assert err.value.code == EXIT_USAGE


def test_unreadable_input_is_data_error(tmp_path):
    code = main(
        ["order", "--input", str(tmp_path / "missing.txt"), "--out", "x"]
    )
    assert code == EXIT_DATA


def test_config_file_defaults_flags_win(workspace, tmp_path, capsys):
    _, _, kdcs = workspace
    config = tmp_path / "defaults.cfg"
    config.write_text("sigma=0.03\nwidth=16\nheight=16\n# comment\n")
    out = tmp_path / "cfg"
    code = main(
        [
            "--config", str(config), "raster", "--kdcs", str(kdcs),
            "--k", "50", "--width", "8", "--out", str(out), "--no-png",
        ]
    )
    assert code == EXIT_OK
    raster = kde.load_raster(out)
    assert raster.grid.width == 8  # flag wins
    assert raster.grid.height == 16  # config default applies
