import json
import math

import pytest

from anglelab import PointCloud
from anglelab.cli import _HANDLERS, build_parser, main
from anglelab.ifs import deviation_of_corners

EQ_CLOUD = {
    "dimension": 2,
    "points": [[0.0, 0.0], [1.0, 0.0], [0.5, math.sqrt(3) / 2]],
}


def write_cloud(tmp_path, data, name="cloud.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


def run_json(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, json.loads(out) if out else None


def test_subcommand_inventory():
    expected = {
        "gasket",
        "certify",
        "spectrum",
        "minkdim",
        "triangle",
        "rightangle",
        "extreme",
        "rectangle",
        "content",
        "zoom",
        "rasterize",
    }
    assert set(_HANDLERS) == expected
    build_parser()


def test_gasket_depth_one_has_nine_points(capsys):
    code, data = run_json(capsys, ["gasket", "--n", "2", "--delta", "0.25", "--depth", "1"])
    assert code == 0
    assert data["dimension"] == 2
    assert len(data["points"]) == 9


def test_gasket_csv_matches_json(capsys, tmp_path):
    argv = ["gasket", "--n", "2", "--delta", "0.25", "--depth", "2"]
    code, data = run_json(capsys, argv)
    assert code == 0
    assert main(argv + ["--format", "csv", "--out", str(tmp_path / "c.csv")]) == 0
    cloud = PointCloud.from_csv((tmp_path / "c.csv").read_text())
    assert [[float(x) for x in row] for row in cloud.points] == data["points"]


def test_certify_positive_and_negative(capsys):
    code, data = run_json(
        capsys, ["certify", "--n", "3", "--delta", "0.005", "--alpha", "30", "--window", "5"]
    )
    assert code == 0
    assert data["certified"] is True
    assert data["epsilon"] == pytest.approx(22.85, abs=0.05)
    code, data = run_json(
        capsys, ["certify", "--n", "2", "--delta", "0.45", "--alpha", "30", "--window", "5"]
    )
    assert code == 1
    assert data["certified"] is False


def test_spectrum_hit_and_miss(capsys, tmp_path):
    cloud = write_cloud(tmp_path, EQ_CLOUD)
    code, data = run_json(
        capsys, ["spectrum", "--cloud", cloud, "--alpha", "60", "--window", "5"]
    )
    assert code == 0
    assert data["witness"]["metric"] == pytest.approx(60.0, abs=1e-9)
    assert data["exhaustive"] is True
    assert data["total_triples"] == 3
    assert sum(count for _, _, count in data["histogram"]) == 3
    code, data = run_json(
        capsys, ["spectrum", "--cloud", cloud, "--alpha", "30", "--window", "5"]
    )
    assert code == 1
    assert data["witness"] is None


def test_spectrum_needs_three_points(tmp_path, capsys):
    cloud = write_cloud(tmp_path, {"dimension": 2, "points": [[0, 0], [1, 0]]})
    assert main(["spectrum", "--cloud", cloud, "--alpha", "30", "--window", "5"]) == 2
    assert "invalid input" in capsys.readouterr().err


def test_minkdim_matches_library(capsys, tmp_path):
    from anglelab import minkowski_dimension_estimate

    pts = [[i / 16, j / 16] for i in range(17) for j in range(17)]
    cloud_dict = {"dimension": 2, "points": pts}
    path = write_cloud(tmp_path, cloud_dict)
    code, data = run_json(capsys, ["minkdim", "--cloud", path, "--kmin", "2", "--kmax", "4"])
    assert code == 0
    est = minkowski_dimension_estimate(PointCloud(pts), 2, 4)
    assert data["slope"] == est.slope
    assert data["scales"] == [[k, c] for k, c in est.scales]


def test_triangle_witness_and_absence(capsys, tmp_path):
    cloud = write_cloud(tmp_path, EQ_CLOUD)
    code, data = run_json(capsys, ["triangle", "--cloud", cloud, "--delta", "0.5"])
    assert code == 0
    assert data["kind"] == "triangle"
    assert data["metric"] == pytest.approx(1.0, abs=1e-12)
    # three collinear points admit no triangle: the extracted subset
    # never reaches three members
    collinear = write_cloud(
        tmp_path, {"dimension": 2, "points": [[0, 0], [1, 0], [2, 0]]}, "col.json"
    )
    code, data = run_json(capsys, ["triangle", "--cloud", collinear, "--delta", "0.5"])
    assert code == 1
    assert data["points"] is None and data["metric"] is None


def test_rightangle_reports_right_triple(capsys, tmp_path):
    cloud = write_cloud(
        tmp_path, {"dimension": 2, "points": [[0, 0], [3, 0], [0, 3]]}
    )
    code, data = run_json(capsys, ["rightangle", "--cloud", cloud, "--k", "2", "--l", "1"])
    assert code == 0
    assert data["kind"] == "right"
    assert data["metric"] == 0.0
    assert data["params"]["angle"] == 90.0
    assert data["params"]["k"] == 2 and data["params"]["l"] == 1


def test_extreme_collinear(capsys, tmp_path):
    cloud = write_cloud(
        tmp_path, {"dimension": 2, "points": [[0, 0], [1, 0], [2, 0]]}
    )
    code, data = run_json(capsys, ["extreme", "--cloud", cloud, "--target", "zero"])
    assert code == 0 and data["metric"] == 0.0
    code, data = run_json(capsys, ["extreme", "--cloud", cloud, "--target", "straight"])
    assert code == 0 and data["metric"] == 180.0
    assert data["points"][0] == [1.0, 0.0]
    assert data["params"]["target"] == "straight"


def test_rectangle_deviation_recomputes(capsys):
    code, data = run_json(
        capsys,
        ["rectangle", "--n", "2", "--delta", "0.45", "--f", "0", "--g", "1", "--depth", "6"],
    )
    assert code == 0
    assert data["kind"] == "rectangle"
    corners = [tuple(p) for p in data["points"]]
    assert len(corners) == 4
    assert data["metric"] == pytest.approx(deviation_of_corners(corners), abs=1e-12)


def test_rasterize_content_zoom_pipeline(capsys, tmp_path):
    cloud_path = str(tmp_path / "g.json")
    grid_path = str(tmp_path / "grid.json")
    assert main(["gasket", "--n", "2", "--delta", "0.25", "--depth", "3", "--out", cloud_path]) == 0
    assert main(["rasterize", "--cloud", cloud_path, "--m", "5", "--out", grid_path]) == 0
    grid = json.loads((tmp_path / "grid.json").read_text())
    assert grid["levels"] == 5 and len(grid["occupied"]) == 50
    s = str(math.log(3) / math.log(4))
    code, data = run_json(capsys, ["content", "--grid", grid_path, "--s", s])
    assert code == 0
    assert data["value"] == 1.0
    assert data["cover"] == [[0, [0, 0]]]
    code, data = run_json(capsys, ["zoom", "--grid", grid_path, "--s", s, "--delta", "0.1"])
    assert code == 0
    assert data["passes_claim"] is True
    assert data["normalized_content"] >= data["params"]["threshold"]


def test_rasterize_normalize_flag(capsys, tmp_path):
    scaled = write_cloud(
        tmp_path, {"dimension": 2, "points": [[0.0, 0.0], [3.0, 0.0], [0.0, 3.0]]}
    )
    assert main(["rasterize", "--cloud", scaled, "--m", "2"]) == 2
    capsys.readouterr()
    code, data = run_json(capsys, ["rasterize", "--cloud", scaled, "--m", "2", "--normalize"])
    assert code == 0
    assert data["occupied"] == [[0, 0], [0, 3], [3, 0]]


def test_reruns_are_byte_identical(tmp_path):
    for argv in (
        ["gasket", "--n", "2", "--delta", "0.3", "--depth", "3"],
        ["certify", "--n", "2", "--delta", "0.005", "--alpha", "30", "--window", "5"],
    ):
        a, b = tmp_path / "a.out", tmp_path / "b.out"
        assert main(argv + ["--out", str(a)]) in (0, 1)
        assert main(argv + ["--out", str(b)]) in (0, 1)
        assert a.read_bytes() == b.read_bytes()


def test_svg_scatter_output(tmp_path):
    cloud = write_cloud(tmp_path, EQ_CLOUD)
    out = tmp_path / "w.svg"
    code = main(
        ["triangle", "--cloud", cloud, "--delta", "0.5", "--format", "svg", "--out", str(out)]
    )
    assert code == 0
    svg = out.read_text()
    assert svg.startswith('<svg xmlns="http://www.w3.org/2000/svg"')
    assert svg.rstrip().endswith("</svg>")
    # all three vertices highlighted and joined into a ring
    assert svg.count('stroke="#d62728" stroke-width="2"') == 3
    assert svg.count("<line") == 3
    # the origin sits at the lower-left corner: y axis is flipped
    assert 'cx="24" cy="616"' in svg


def test_svg_requires_planar_cloud(capsys, tmp_path):
    cloud = write_cloud(
        tmp_path,
        {"dimension": 3, "points": [[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]]},
    )
    assert main(["extreme", "--cloud", cloud, "--target", "zero", "--format", "svg"]) == 2


def test_exit_codes_for_bad_input(capsys, tmp_path):
    cloud = write_cloud(tmp_path, EQ_CLOUD)
    assert main(["minkdim", "--cloud", cloud, "--kmin", "5", "--kmax", "2"]) == 2
    assert main(["triangle", "--cloud", str(tmp_path / "missing.json"), "--delta", "0.3"]) == 2
    assert main(["gasket", "--n", "2", "--delta", "0.25", "--depth", "20"]) == 3
    assert main(["content", "--grid", cloud, "--s", "1.0"]) == 2
    capsys.readouterr()
    with pytest.raises(SystemExit) as exc:
        main(["extreme", "--cloud", cloud, "--target", "sideways"])
    assert exc.value.code == 2
