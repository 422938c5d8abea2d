"""End-to-end runs of every subcommand through the argparse entry point."""
import json
import subprocess
import sys

import numpy as np
import pytest

import zcore
from zcore.cli import build_score_config, build_parser, load_config_file, main
from zcore.errors import ConfigError

from conftest import random_matrix

SPEC_JSON = ('{"seed": 5, "clusters": ['
             '{"center": [0, 0, 0], "spread": 0.4, "count": 30, "duplicates": 5},'
             '{"center": [5, 5, 5], "spread": 1.2, "count": 20}]}')


@pytest.fixture
def emb_file(tmp_path):
    path = tmp_path / "emb.npy"
    zcore.save_matrix(random_matrix(40, 6, seed=50), path)
    return path


def run_cli(*argv):
    return main([str(a) for a in argv])


class TestScoreCommand:
    def test_score_then_select_pipeline(self, tmp_path, emb_file, capsys):
        scores_path = tmp_path / "scores.npy"
        rc = run_cli("score", "--emb", emb_file, "--out", scores_path,
                     "--T", 500, "--alpha", 8, "--seed", 3, "--workers", 2)
        assert rc == 0
        out = capsys.readouterr().out
        assert "zcore-result N=40 M=6 T=500 seconds=" in out
        meta = json.loads((tmp_path / "scores.npy.meta.json").read_text())
        assert meta["seed"] == 3 and meta["T"] == 500

        out_dir = tmp_path / "sel"
        rc = run_cli("select", "--scores", scores_path, "--rate", 0.9,
                     "--out-dir", out_dir)
        assert rc == 0
        indices = (out_dir / "indices.txt").read_text().splitlines()
        assert len(indices) == 4  # round(40 * 0.1)
        selection = json.loads((out_dir / "selection.json").read_text())
        assert selection["config"]["seed"] == 3

    def test_multiple_embeddings_concatenate(self, tmp_path, capsys):
        a = tmp_path / "a.npy"
        b = tmp_path / "b.npy"
        zcore.save_matrix(random_matrix(12, 2, seed=51), a)
        zcore.save_matrix(random_matrix(12, 3, seed=52), b)
        rc = run_cli("score", "--emb", a, "--emb", b, "--out",
                     tmp_path / "s.npy", "--T", 50, "--seed", 1)
        assert rc == 0
        assert "N=12 M=5" in capsys.readouterr().out

    def test_matches_library_call(self, tmp_path, emb_file):
        scores_path = tmp_path / "s.npy"
        run_cli("score", "--emb", emb_file, "--out", scores_path,
                "--T", 400, "--seed", 9, "--alpha", 5)
        config = zcore.ScoreConfig(iterations=400, seed=9, neighbors=5)
        expected = zcore.score_dataset(zcore.load_matrix(emb_file), config)
        assert np.array_equal(zcore.load_scores(scores_path), expected)

    def test_standardize_flag_changes_the_geometry(self, tmp_path, emb_file):
        raw = tmp_path / "raw.npy"
        std = tmp_path / "std.npy"
        run_cli("score", "--emb", emb_file, "--out", raw, "--T", 300, "--seed", 2)
        run_cli("score", "--emb", emb_file, "--out", std, "--T", 300, "--seed", 2,
                "--standardize")
        assert not np.array_equal(zcore.load_scores(raw), zcore.load_scores(std))

    def test_zero_iterations_without_init_writes_zeros(self, tmp_path, emb_file):
        scores_path = tmp_path / "s.csv"
        rc = run_cli("score", "--emb", emb_file, "--out", scores_path,
                     "--T", 0, "--no-random-init")
        assert rc == 0
        assert np.array_equal(zcore.load_scores(scores_path), np.zeros(40))

    def test_oversized_m_fails_nonzero(self, tmp_path, emb_file, capsys):
        rc = run_cli("score", "--emb", emb_file, "--out", tmp_path / "s.npy",
                     "--T", 10, "--m", 2000)
        assert rc != 0
        assert "error" in capsys.readouterr().err

    def test_missing_file_fails_nonzero(self, tmp_path):
        rc = run_cli("score", "--emb", tmp_path / "absent.npy",
                     "--out", tmp_path / "s.npy", "--T", 1)
        assert rc != 0


class TestSelectCommand:
    def test_rate_zero_keeps_all(self, tmp_path):
        scores_path = tmp_path / "s.npy"
        zcore.save_scores(np.arange(10, dtype=np.float64), scores_path)
        rc = run_cli("select", "--scores", scores_path, "--rate", 0.0,
                     "--out-dir", tmp_path / "sel")
        assert rc == 0
        assert len((tmp_path / "sel" / "indices.txt").read_text().splitlines()) == 10

    def test_rate_one_is_an_error(self, tmp_path, capsys):
        scores_path = tmp_path / "s.npy"
        zcore.save_scores(np.arange(4, dtype=np.float64), scores_path)
        rc = run_cli("select", "--scores", scores_path, "--rate", 1.0,
                     "--out-dir", tmp_path / "sel")
        assert rc != 0

    def test_csv_scores_are_accepted(self, tmp_path):
        scores_path = tmp_path / "s.csv"
        zcore.save_scores(np.array([3.0, 1.0, 2.0]), scores_path)
        rc = run_cli("select", "--scores", scores_path, "--rate", str(1 / 3),
                     "--out-dir", tmp_path / "sel")
        assert rc == 0
        assert (tmp_path / "sel" / "indices.txt").read_text().splitlines() == ["0", "2"]


class TestStatsCommand:
    def test_csv_output(self, tmp_path, emb_file):
        out = tmp_path / "stats.csv"
        rc = run_cli("stats", "--emb", emb_file, "--out", out)
        assert rc == 0
        rows = out.read_text().splitlines()
        assert rows[0] == "dim,min,median,max,mean,std"
        assert len(rows) == 7


class TestSynthCommand:
    def test_synth_output_loads(self, tmp_path):
        spec = tmp_path / "spec.json"
        spec.write_text(SPEC_JSON)
        out = tmp_path / "synth.npy"
        rc = run_cli("synth", "--spec", spec, "--out", out)
        assert rc == 0
        assert zcore.load_matrix(out).shape == (50, 3)


class TestCheckDistCommand:
    def test_csv_and_summary(self, tmp_path, emb_file, capsys):
        out = tmp_path / "dist.csv"
        rc = run_cli("check-dist", "--emb", emb_file, "--dim", 0,
                     "--samples", 2000, "--out", out)
        assert rc == 0
        rows = out.read_text().splitlines()
        assert rows[0] == "value,source"
        assert sum(1 for r in rows if r.endswith(",data")) == 40
        assert sum(1 for r in rows if r.endswith(",sample")) == 2000
        err = capsys.readouterr().err
        assert "ks=" in err and "frac_below_median=" in err

    def test_zero_samples_emits_data_only(self, tmp_path, emb_file):
        out = tmp_path / "dist.csv"
        rc = run_cli("check-dist", "--emb", emb_file, "--dim", 1,
                     "--samples", 0, "--out", out)
        assert rc == 0
        rows = out.read_text().splitlines()
        assert len(rows) == 41

    def test_dim_out_of_range_fails(self, tmp_path, emb_file):
        rc = run_cli("check-dist", "--emb", emb_file, "--dim", 99,
                     "--samples", 10, "--out", tmp_path / "d.csv")
        assert rc != 0

    def test_triangular_tracks_gaussian_data_better_than_uniform(self, tmp_path):
        # strongly gaussian-shaped column: uniform sampling should diverge more
        mat = np.random.default_rng(53).standard_normal((4000, 1)).astype(np.float32)
        tri = zcore.check_distribution(mat, 0, zcore.DistributionKind.TRIANGULAR,
                                       20_000, seed=2)
        uni = zcore.check_distribution(mat, 0, zcore.DistributionKind.UNIFORM,
                                       20_000, seed=2)
        assert uni.ks > tri.ks

    def test_symmetric_column_has_half_mass_below_median(self):
        # mirrored values: min and max are symmetric around the median, so
        # the triangular CDF at its apex is exactly one half
        half = np.random.default_rng(54).standard_normal(2000)
        mat = np.concatenate([half, -half]).reshape(-1, 1).astype(np.float32)
        check = zcore.check_distribution(mat, 0, zcore.DistributionKind.TRIANGULAR,
                                         50_000, seed=3)
        assert abs(check.frac_below_median - 0.5) < 0.01


class TestVerifyCommand:
    def test_default_spec_passes_against_oracle(self, capsys):
        rc = run_cli("verify", "--T", 300)
        assert rc == 0
        assert "PASS" in capsys.readouterr().err

    def test_worker_invariance_at_zero_tolerance(self, capsys):
        rc = run_cli("verify", "--against", "workers", "--tol", 0, "--T", 2000)
        assert rc == 0

    def test_custom_spec_file(self, tmp_path):
        spec = tmp_path / "spec.json"
        spec.write_text(SPEC_JSON)
        rc = run_cli("verify", "--spec", spec, "--T", 200, "--alpha", 6)
        assert rc == 0

    def test_mismatch_exits_nonzero(self, capsys):
        # impossible tolerance: proves verification failures propagate
        rc = run_cli("verify", "--T", 100, "--tol", -1.0)
        assert rc == 1
        assert "FAIL" in capsys.readouterr().err


class TestConfigFile:
    def test_values_fill_unset_flags(self, tmp_path, emb_file):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("# standard run\nT = 123\nalpha = 4\ndist = uniform\n"
                       "seed = 77\nrandom_init = false\n")
        parser = build_parser()
        args = parser.parse_args(["score", "--emb", str(emb_file), "--out",
                                  "/dev/null", "--config", str(cfg), "--alpha", "9"])
        config = build_score_config(args)
        assert config.iterations == 123
        assert config.neighbors == 9  # flag beats file
        assert config.kind is zcore.DistributionKind.UNIFORM
        assert config.seed == 77
        assert config.enable_random_init is False

    def test_unknown_key_rejected(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("bogus = 1\n")
        with pytest.raises(ConfigError):
            load_config_file(cfg)

    def test_malformed_line_rejected(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("T 123\n")
        with pytest.raises(ConfigError):
            load_config_file(cfg)


class TestEntryPoint:
    def test_console_script_runs(self):
        out = subprocess.run([sys.executable, "-m", "zcore.cli", "--version"],
                             capture_output=True, text=True)
        assert out.returncode == 0

    def test_unknown_flag_rejected(self):
        with pytest.raises(SystemExit):
            main(["score", "--emb", "x.npy", "--out", "y.npy", "--bogus", "1"])
