import json
import re

import numpy as np
import pytest

from relu_regions import forward, load_network, loads_network
from relu_regions.cli import main, parse_skip_spec
from relu_regions.network import NetworkValidationError, save_network
from relu_regions.svgplot import render_region_svg

from conftest import demo_net  # noqa: F401  (fixture re-export)


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def write_demo(tmp_path, demo_net):
    path = tmp_path / "net.json"
    path.write_text(save_network(demo_net))
    return str(path)


class TestSkipSpec:
    def test_grammar(self):
        assert parse_skip_spec("") == ()
        assert parse_skip_spec("1-3") == ((1, 3),)
        assert parse_skip_spec("1-3,2-4") == ((1, 3), (2, 4))

    def test_rejects_garbage(self):
        with pytest.raises(NetworkValidationError):
            parse_skip_spec("1>3")
        with pytest.raises(NetworkValidationError):
            parse_skip_spec("1-3-5")


class TestInitRandom:
    def test_writes_valid_network(self, tmp_path, capsys):
        out = tmp_path / "net.json"
        code, stdout, _ = run(["init-random", "--layers", "3", "--width", "4",
                               "--skips", "1-3", "--seed", "7",
                               "--out", str(out)], capsys)
        assert code == 0
        assert stdout.startswith("config: ")
        net = load_network(out)
        assert net.widths == (4, 4, 4)
        assert net.skips == ((1, 3),)

    def test_empty_skips_gives_plain_mlp(self, tmp_path, capsys):
        out = tmp_path / "net.json"
        code, _, _ = run(["init-random", "--layers", "2", "--width", "3",
                          "--skips", "", "--out", str(out)], capsys)
        assert code == 0
        assert load_network(out).skips == ()

    def test_invalid_skip_exits_2(self, tmp_path, capsys):
        code, _, err = run(["init-random", "--layers", "3", "--width", "4",
                            "--skips", "2-3", "--out", str(tmp_path / "x.json")],
                           capsys)
        assert code == 2
        assert "skips" in err


class TestEnumerate:
    def test_summary_and_files(self, tmp_path, capsys, demo_net):
        net_path = write_demo(tmp_path, demo_net)
        out_json = tmp_path / "regions.json"
        out_csv = tmp_path / "regions.csv"
        code, stdout, _ = run(["enumerate", net_path, "--out", str(out_json),
                               "--csv", str(out_csv)], capsys)
        assert code == 0
        match = re.search(r"(\d+) regions, (\d+) pruned, ([\d.]+) seconds", stdout)
        assert match and match.group(1) == "8"
        doc = json.loads(out_json.read_text())
        assert len(doc["regions"]) == 8
        assert len(out_csv.read_text().strip().split("\n")) == 9

    def test_guard_exits_3(self, tmp_path, capsys):
        code, _, _ = run(["init-random", "--layers", "12", "--width", "4",
                          "--out", str(tmp_path / "big.json")], capsys)
        assert code == 0
        code, _, err = run(["enumerate", str(tmp_path / "big.json")], capsys)
        assert code == 3
        assert "2^48" in err or str(2 ** 48) in err

    def test_missing_file_exits_2(self, capsys):
        code, _, _ = run(["enumerate", "/nonexistent/net.json"], capsys)
        assert code == 2

    def test_csv_deterministic(self, tmp_path, capsys, demo_net):
        net_path = write_demo(tmp_path, demo_net)
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        run(["enumerate", net_path, "--csv", str(a)], capsys)
        run(["enumerate", net_path, "--csv", str(b)], capsys)
        assert a.read_bytes() == b.read_bytes()


class TestPlot:
    def test_single_neuron_two_polygons(self, tmp_path, capsys):
        run(["init-random", "--layers", "1", "--width", "1", "--seed", "3",
             "--out", str(tmp_path / "n.json")], capsys)
        svg_path = tmp_path / "out.svg"
        code, _, _ = run(["plot", str(tmp_path / "n.json"),
                          "--out", str(svg_path)], capsys)
        assert code == 0
        svg = svg_path.read_text()
        assert svg.startswith("<?xml")
        assert 'version="1.1"' in svg
        assert svg.count("<polygon") == 2

    def test_polygon_areas_tile_box(self, tmp_path, capsys):
        run(["init-random", "--layers", "2", "--width", "3", "--seed", "11",
             "--out", str(tmp_path / "n.json")], capsys)
        svg_path = tmp_path / "p.svg"
        code, _, _ = run(["plot", str(tmp_path / "n.json"), "--box", "-10",
                          "10", "-10", "10", "--out", str(svg_path)], capsys)
        assert code == 0
        total = 0.0
        for points in re.findall(r'points="([^"]+)"', svg_path.read_text()):
            verts = [tuple(map(float, p.split(","))) for p in points.split()]
            s = 0.0
            for i in range(len(verts)):
                x0, y0 = verts[i]
                x1, y1 = verts[(i + 1) % len(verts)]
                s += x0 * y1 - x1 * y0
            total += abs(s) / 2.0
        assert total == pytest.approx(400.0, rel=1e-3)

    def test_non_2d_rejected(self, tmp_path, capsys):
        run(["init-random", "--layers", "1", "--width", "2", "--input-dim", "3",
             "--out", str(tmp_path / "n3.json")], capsys)
        code, _, err = run(["plot", str(tmp_path / "n3.json"),
                            "--out", str(tmp_path / "x.svg")], capsys)
        assert code == 2
        assert "2-D" in err or "input_dim" in err

    def test_svg_bytes_deterministic(self, tmp_path, capsys, demo_net):
        net_path = write_demo(tmp_path, demo_net)
        a, b = tmp_path / "a.svg", tmp_path / "b.svg"
        run(["plot", net_path, "--box", "0", "1", "0", "1", "--out", str(a)], capsys)
        run(["plot", net_path, "--box", "0", "1", "0", "1", "--out", str(b)], capsys)
        assert a.read_bytes() == b.read_bytes()


class TestCompareSkips:
    def test_two_trials_report_and_csv(self, tmp_path, capsys):
        csv_path = tmp_path / "trials.csv"
        code, stdout, _ = run(["compare-skips", "--layers", "3", "--width", "3",
                               "--skips", "1-3", "--trials", "2", "--seed", "4",
                               "--csv", str(csv_path)], capsys)
        assert code == 0
        assert "with skips" in stdout and "without skips" in stdout
        lines = csv_path.read_text().strip().split("\n")
        assert lines[0] == "trial,variant,seed,region_count,wall_ms"
        assert len(lines) == 5  # 2 trials x 2 variants
        assert lines[1].split(",")[1] == "with_skips"

    def test_single_trial_warns_without_decision(self, capsys):
        code, stdout, _ = run(["compare-skips", "--layers", "3", "--width", "3",
                               "--skips", "1-3", "--trials", "1"], capsys)
        assert code == 0
        assert "warning" in stdout
        assert "rejected" not in stdout

    def test_requires_skip_spec(self, capsys):
        code, _, err = run(["compare-skips", "--layers", "3", "--width", "3",
                            "--skips", "", "--trials", "2"], capsys)
        assert code == 2


class TestCacheStats:
    def test_zero_offset_full_hit_rate(self, tmp_path, capsys):
        run(["init-random", "--layers", "2", "--width", "4", "--seed", "6",
             "--out", str(tmp_path / "n.json")], capsys)
        code, stdout, _ = run(["cache-stats", str(tmp_path / "n.json"),
                               "--train-fn", "phi2", "--grid-start", "-10",
                               "--grid-step", "1.0", "--grid-len", "21",
                               "--offset", "0"], capsys)
        assert code == 0
        assert "hit rate:       1.000000" in stdout

    def test_empty_grid_zero_rate(self, tmp_path, capsys):
        run(["init-random", "--layers", "2", "--width", "4", "--seed", "6",
             "--out", str(tmp_path / "n.json")], capsys)
        code, _, err = run(["cache-stats", str(tmp_path / "n.json"),
                            "--grid-len", "0"], capsys)
        assert code == 2  # empty grid is a validation error

    def test_offset_grid_regression(self, tmp_path, capsys):
        run(["init-random", "--layers", "2", "--width", "5", "--seed", "2025",
             "--out", str(tmp_path / "n.json")], capsys)
        code, stdout, _ = run(["cache-stats", str(tmp_path / "n.json"),
                               "--grid-start", "-10", "--grid-step", "0.5",
                               "--grid-len", "41", "--offset", "0.25"], capsys)
        assert code == 0
        assert "cached regions: 27" in stdout
        assert "hit rate:       0.998810" in stdout


class TestPredict:
    def test_output_matches_forward_and_caches(self, tmp_path, capsys, demo_net):
        net_path = write_demo(tmp_path, demo_net)
        cache_path = tmp_path / "cache.json"
        code, stdout, _ = run(["predict", net_path, "--x", "0.4,0.2",
                               "--cache", str(cache_path)], capsys)
        assert code == 0
        assert "cache: miss" in stdout
        value = float(stdout.split("output: ")[1].split("\n")[0])
        assert value == pytest.approx(forward(demo_net, [0.4, 0.2]).output[0])
        doc = json.loads(cache_path.read_text())
        assert "11|01" in doc

        code, stdout, _ = run(["predict", net_path, "--x", "0.4,0.2",
                               "--cache", str(cache_path)], capsys)
        assert code == 0
        assert "cache: hit" in stdout
        assert float(stdout.split("output: ")[1].split("\n")[0]) == \
            pytest.approx(value)

    def test_malformed_x_exits_2(self, tmp_path, capsys, demo_net):
        net_path = write_demo(tmp_path, demo_net)
        code, _, err = run(["predict", net_path, "--x", "0.4,banana"], capsys)
        assert code == 2


class TestConfigEcho:
    def test_every_subcommand_echoes_config(self, tmp_path, capsys, demo_net):
        net_path = write_demo(tmp_path, demo_net)
        code, stdout, _ = run(["enumerate", net_path], capsys)
        assert code == 0
        config = json.loads(stdout.split("config: ")[1].split("\n")[0])
        assert config["subcommand"] == "enumerate"
        assert config["network"] == net_path
