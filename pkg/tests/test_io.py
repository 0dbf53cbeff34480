import json

import numpy as np
import pytest

from magnify.errors import ValidationError
from magnify.io import (
    RunConfig,
    fmt17,
    load_config_file,
    load_point_cloud_csv,
    load_square_matrix_csv,
    parse_config_text,
    read_embedded_config,
    read_matrix_bin,
    write_json,
    write_magnitude_profile_csv,
    write_matrix_bin,
    write_point_cloud_csv,
    write_weight_profile_csv,
)
from magnify.metric import PointCloud
from magnify.profiles import EvaluationGrid, MagnitudeProfile, WeightProfile


class TestFloatFormat:
    def test_round_trip_exact(self, rng):
        for x in rng.standard_normal(200):
            assert float(fmt17(x)) == x

    def test_seventeen_significant_digits(self):
        assert fmt17(0.05) == "0.050000000000000003"
        assert fmt17(1.0) == "1"


class TestPointCloudCsv:
    def test_round_trip_with_ids(self, tmp_path):
        pc = PointCloud([[1.5, -2.25], [0.1, 0.3]], ids=("a", "b"))
        path = tmp_path / "pc.csv"
        write_point_cloud_csv(path, pc, RunConfig())
        back = load_point_cloud_csv(path)
        np.testing.assert_array_equal(back.points, pc.points)
        assert back.ids == ("a", "b")

    def test_headerless_numeric(self, tmp_path):
        path = tmp_path / "raw.csv"
        path.write_text("1,2\n3,4\n", encoding="utf-8")
        pc = load_point_cloud_csv(path)
        np.testing.assert_array_equal(pc.points, [[1, 2], [3, 4]])
        assert pc.ids is None

    def test_empty_file_rejected(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("", encoding="utf-8")
        with pytest.raises(ValidationError):
            load_point_cloud_csv(path)

    def test_ragged_rows_rejected(self, tmp_path):
        path = tmp_path / "ragged.csv"
        path.write_text("1,2\n3\n", encoding="utf-8")
        with pytest.raises(ValidationError):
            load_point_cloud_csv(path)

    def test_bad_cell_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("x1,x2\n1,banana\n", encoding="utf-8")
        with pytest.raises(ValidationError):
            load_point_cloud_csv(path)

    def test_lf_line_endings(self, tmp_path):
        path = tmp_path / "pc.csv"
        write_point_cloud_csv(path, PointCloud([[1.0]]), RunConfig())
        raw = path.read_bytes()
        assert b"\r" not in raw


class TestMatrixFormats:
    def test_binary_round_trip(self, tmp_path, rng):
        matrix = rng.standard_normal((7, 7))
        path = tmp_path / "m.bin"
        write_matrix_bin(path, matrix)
        np.testing.assert_array_equal(read_matrix_bin(path), matrix)

    def test_binary_header_layout(self, tmp_path):
        path = tmp_path / "m.bin"
        write_matrix_bin(path, np.array([[1.0, 2.0]]))
        raw = path.read_bytes()
        assert len(raw) == 16 + 2 * 8
        assert int.from_bytes(raw[:8], "little") == 1
        assert int.from_bytes(raw[8:16], "little") == 2

    def test_binary_truncation_detected(self, tmp_path):
        path = tmp_path / "m.bin"
        write_matrix_bin(path, np.eye(3))
        path.write_bytes(path.read_bytes()[:-8])
        with pytest.raises(ValidationError):
            read_matrix_bin(path)

    def test_square_csv(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("0,1\n1,0\n", encoding="utf-8")
        np.testing.assert_array_equal(load_square_matrix_csv(path), [[0, 1], [1, 0]])
        path.write_text("0,1,2\n1,0,3\n", encoding="utf-8")
        with pytest.raises(ValidationError):
            load_square_matrix_csv(path)


class TestRunConfig:
    def test_defaults(self):
        cfg = RunConfig()
        assert cfg.epsilon_prop == 0.05
        assert cfg.grid_m is None
        assert cfg.integration.value == "trapezoid"
        assert cfg.k == 30
        assert not cfg.dedup and not cfg.jitter

    def test_round_trip_through_text(self):
        cfg = RunConfig(metric="manhattan", epsilon_prop=0.1, grid_m=32,
                        integration="romberg", k=10, dedup=True, jitter=True,
                        seed=7, threads=3)
        text = "\n".join(f"{k}={v}" for k, v in cfg.to_pairs())
        back, extras = parse_config_text(text)
        assert back == cfg
        assert extras == {}

    def test_unknown_keys_become_extras(self):
        cfg, extras = parse_config_text("k=5\ndataset=circles\nn=40\n")
        assert cfg.k == 5
        assert extras == {"dataset": "circles", "n": "40"}

    def test_invalid_values_rejected(self):
        with pytest.raises(ValidationError):
            parse_config_text("epsilon=1.5")
        with pytest.raises(ValidationError):
            parse_config_text("k=zero")
        with pytest.raises(ValidationError):
            parse_config_text("not a config line")

    def test_load_config_file(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("# comment\nepsilon=0.2\nseed=11\n", encoding="utf-8")
        cfg, _ = load_config_file(path)
        assert cfg.epsilon_prop == 0.2
        assert cfg.seed == 11


class TestEmbeddedConfig:
    def test_csv_embed_and_recover(self, tmp_path):
        grid = EvaluationGrid(4)
        profile = MagnitudeProfile(grid=grid, values=np.array([1.0, 1.5, 1.8, 1.9]),
                                   t_conv=2.9, n=2)
        cfg = RunConfig(seed=5, k=12)
        path = tmp_path / "profile.csv"
        write_magnitude_profile_csv(path, profile, cfg, {"command": "compute"})
        back, extras = read_embedded_config(path)
        assert back == cfg
        assert extras["command"] == "compute"

    def test_json_embed_and_recover(self, tmp_path):
        cfg = RunConfig(seed=3)
        path = tmp_path / "summary.json"
        write_json(path, {"n": 4}, cfg, {"command": "compute"})
        payload = json.loads(path.read_text())
        assert payload["n"] == 4
        back, extras = read_embedded_config(path)
        assert back == cfg
        assert extras["command"] == "compute"

    def test_weight_profile_columns(self, tmp_path):
        grid = EvaluationGrid(3)
        wp = WeightProfile(grid=grid, weights=np.ones((2, 3)), t_conv=1.0, n=2)
        path = tmp_path / "weights.csv"
        write_weight_profile_csv(path, wp, RunConfig())
        lines = [l for l in path.read_text().splitlines() if not l.startswith("#")]
        assert lines[0] == "s,w_1,w_2"
        assert len(lines) == 4
