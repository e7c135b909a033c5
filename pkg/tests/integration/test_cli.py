"""End-to-end tests of the ``msgnn`` command line."""

import numpy as np
import pandas as pd
import pytest

from app.cli import main
from app.errors import ContractError
from app.imaging import CLEAN_DIR, RAIN_DIR, load_png, save_png, synthetic_background
from app.models import MsgnnConfig
from app.network import ParameterStore
from app.storage import save_checkpoint

TINY = "N=2\nM=1\nchannels=4\nk=2\nl=3\ns=3\nseed=3\ncrop=16\nbatch=2\nmilestones=\n"


@pytest.fixture
def tiny_cfg(tmp_path):
    path = tmp_path / "tiny.cfg"
    path.write_text(TINY)
    return path


@pytest.fixture
def zero_tail_checkpoint(tmp_path, tiny_config):
    store = ParameterStore.initialize(tiny_config, zero_tail=True)
    return save_checkpoint(tmp_path / "ckpt" / "zero.ckpt", tiny_config, store)


def stderr_line(capsys):
    return capsys.readouterr().err.strip().splitlines()[-1]


class TestSynth:
    def test_generated_dataset_is_deterministic(self, tmp_path, capsys):
        for name in ("a", "b"):
            argv = ["synth", "--out-dir", str(tmp_path / name), "--count", "3", "--size", "32", "--seed", "5"]
            assert main(argv) == 0
        assert "wrote 3 pairs" in capsys.readouterr().out
        for sub in (RAIN_DIR, CLEAN_DIR):
            for i in range(3):
                first = (tmp_path / "a" / sub / f"{i:04d}.png").read_bytes()
                assert first == (tmp_path / "b" / sub / f"{i:04d}.png").read_bytes()
        manifest = (tmp_path / "a" / "manifest.tsv").read_text().splitlines()
        assert [line.split("\t")[0] for line in manifest] == ["0000", "0001", "0002"]

    def test_negligible_rain_leaves_clean_images(self, tmp_path):
        clean_dir = tmp_path / "clean"
        for i in range(2):
            save_png(synthetic_background(24, 24, i), clean_dir / f"img{i}.png")
        out = tmp_path / "out"
        assert main(["synth", "--clean-dir", str(clean_dir), "--out-dir", str(out), "--intensity", "1e-6"]) == 0
        for i in range(2):
            np.testing.assert_array_equal(load_png(out / RAIN_DIR / f"img{i}.png"), load_png(out / CLEAN_DIR / f"img{i}.png"))
            np.testing.assert_array_equal(load_png(out / CLEAN_DIR / f"img{i}.png"), load_png(clean_dir / f"img{i}.png"))

    def test_invalid_rain_parameter(self, tmp_path, capsys):
        assert main(["synth", "--out-dir", str(tmp_path / "x"), "--count", "1", "--density", "0.9"]) == 1
        assert stderr_line(capsys).startswith("error:config:")

    def test_missing_clean_dir(self, tmp_path, capsys):
        assert main(["synth", "--clean-dir", str(tmp_path / "none"), "--out-dir", str(tmp_path / "x")]) == 1
        assert stderr_line(capsys).startswith("error:io:")


class TestParams:
    def test_default_total(self, capsys):
        assert main(["params"]) == 0
        out = capsys.readouterr().out.splitlines()
        assert out[0] == "total 1252804"
        assert any(line.split()[0] == "injections" for line in out[1:])

    def test_config_file(self, tiny_cfg, capsys):
        from app.network import param_count

        assert main(["params", "--config", str(tiny_cfg)]) == 0
        expected = param_count(MsgnnConfig(N=2, M=1, channels=4, k=2, l=3, s=3))
        assert capsys.readouterr().out.splitlines()[0] == f"total {expected}"

    def test_unknown_key(self, tmp_path, capsys):
        path = tmp_path / "bad.cfg"
        path.write_text("depth=3\n")
        assert main(["params", "--config", str(path)]) == 1
        assert stderr_line(capsys) == "error:config: unknown config key 'depth'"


class TestDerain:
    def test_zero_tail_reproduces_input(self, tmp_path, pair_dir, zero_tail_checkpoint, capsys):
        source = pair_dir / RAIN_DIR / "0000.png"
        output, residual, grid = tmp_path / "out.png", tmp_path / "res.png", tmp_path / "grid.png"
        argv = [
            "derain", "--input", str(source), "--checkpoint", str(zero_tail_checkpoint),
            "--output", str(output), "--residual", str(residual), "--grid", str(grid),
        ]
        assert main(argv) == 0
        np.testing.assert_array_equal(load_png(output), load_png(source))
        np.testing.assert_array_equal(load_png(residual), 0.0)
        assert load_png(grid).shape == (32, 3 * 32 + 8, 3)
        assert "wrote" in capsys.readouterr().out

    def test_with_exemplar(self, tmp_path, pair_dir, zero_tail_checkpoint):
        argv = [
            "derain", "--input", str(pair_dir / RAIN_DIR / "0001.png"), "--checkpoint", str(zero_tail_checkpoint),
            "--output", str(tmp_path / "out.png"), "--exemplar", str(pair_dir / RAIN_DIR / "0002.png"),
        ]
        assert main(argv) == 0

    def test_missing_input(self, tmp_path, zero_tail_checkpoint, capsys):
        argv = ["derain", "--input", str(tmp_path / "none.png"), "--checkpoint", str(zero_tail_checkpoint), "--output", str(tmp_path / "o.png")]
        assert main(argv) == 1
        assert stderr_line(capsys).startswith("error:missing_file:")

    def test_checkpoint_must_match_config(self, tmp_path, pair_dir, zero_tail_checkpoint, capsys):
        config = tmp_path / "wide.cfg"
        config.write_text(TINY.replace("channels=4", "channels=8"))
        argv = [
            "derain", "--input", str(pair_dir / RAIN_DIR / "0000.png"), "--checkpoint", str(zero_tail_checkpoint),
            "--output", str(tmp_path / "o.png"), "--config", str(config),
        ]
        assert main(argv) == 1
        assert stderr_line(capsys).startswith("error:checkpoint:")

    def test_unwritable_output_is_an_io_error(self, tmp_path, pair_dir, zero_tail_checkpoint, capsys):
        blocker = tmp_path / "blocker"
        blocker.write_text("a file, not a directory")
        argv = [
            "derain", "--input", str(pair_dir / RAIN_DIR / "0000.png"), "--checkpoint", str(zero_tail_checkpoint),
            "--output", str(blocker / "o.png"),
        ]
        assert main(argv) == 1
        line = stderr_line(capsys)
        assert line.startswith("error:io:")
        assert "blocker" in line

    def test_not_a_checkpoint(self, tmp_path, pair_dir, capsys):
        bogus = tmp_path / "bogus.ckpt"
        bogus.write_bytes(b"definitely not a checkpoint")
        argv = ["derain", "--input", str(pair_dir / RAIN_DIR / "0000.png"), "--checkpoint", str(bogus), "--output", str(tmp_path / "o.png")]
        assert main(argv) == 1
        assert stderr_line(capsys).startswith("error:checkpoint:")


class TestEval:
    def test_report_of_identity_network(self, tmp_path, pair_dir, zero_tail_checkpoint, capsys):
        report = tmp_path / "report" / "eval.csv"
        argv = ["eval", "--data", str(pair_dir), "--checkpoint", str(zero_tail_checkpoint), "--report", str(report)]
        assert main(argv) == 0
        assert "mean" in capsys.readouterr().out
        frame = pd.read_csv(report)
        assert list(frame.columns) == ["name", "psnr", "ssim", "input_psnr", "input_ssim"]
        assert len(frame) == 6
        assert frame["name"].iloc[-1] == "mean"
        # The identity network scores exactly like its input.
        np.testing.assert_allclose(frame["psnr"], frame["input_psnr"])
        assert report.with_suffix(".txt").is_file()

    def test_unwritable_report(self, tmp_path, pair_dir, zero_tail_checkpoint, capsys):
        blocker = tmp_path / "blocker"
        blocker.write_text("")
        argv = ["eval", "--data", str(pair_dir), "--checkpoint", str(zero_tail_checkpoint), "--report", str(blocker / "eval.csv")]
        assert main(argv) == 1
        assert stderr_line(capsys).startswith("error:io:")

    def test_unpaired_dataset(self, pair_dir, zero_tail_checkpoint, capsys):
        (pair_dir / CLEAN_DIR / "0002.png").unlink()
        assert main(["eval", "--data", str(pair_dir), "--checkpoint", str(zero_tail_checkpoint)]) == 1
        line = stderr_line(capsys)
        assert line.startswith("error:dataset:")
        assert "rain/0002.png" in line


class TestUsage:
    def test_missing_required_flag(self, capsys):
        with pytest.raises(SystemExit) as excinfo:
            main(["train"])
        assert excinfo.value.code == 2
        assert stderr_line(capsys).startswith("error:usage:")

    def test_unknown_command(self, capsys):
        with pytest.raises(SystemExit) as excinfo:
            main(["fly"])
        assert excinfo.value.code == 2

    def test_errors_from_a_command_are_one_line(self, mocker, capsys):
        counter = mocker.patch("app.cli.params.param_count", side_effect=ContractError("bad\nshape"))
        assert main(["params"]) == 1
        counter.assert_called_once()
        assert stderr_line(capsys) == "error:contract: bad shape"

    def test_bad_log_level(self, capsys):
        with pytest.raises(SystemExit) as excinfo:
            main(["--log-level", "LOUD", "params"])
        assert excinfo.value.code == 2
        assert "LOUD" in stderr_line(capsys)


class TestTrainCommand:
    def test_train_then_resume_latest(self, tmp_path, pair_dir, tiny_cfg, capsys):
        out = tmp_path / "run"
        config = tmp_path / "short.cfg"
        config.write_text(TINY + "epochs=2\n")
        assert main(["train", "--data", str(pair_dir), "--config", str(config), "--out", str(out), "--max-steps", "1"]) == 0
        printed = capsys.readouterr().out
        assert "checkpoint" in printed
        assert main(["train", "--data", str(pair_dir), "--config", str(config), "--out", str(out), "--resume", "latest"]) == 0
        records = (out / "metrics.tsv").read_text().splitlines()
        assert [line.split("\t")[0] for line in records] == ["0", "1"]
        assert (out / "epoch_0002.ckpt").is_file()

    def test_resume_latest_without_checkpoints(self, tmp_path, pair_dir, tiny_cfg, capsys):
        argv = ["train", "--data", str(pair_dir), "--config", str(tiny_cfg), "--out", str(tmp_path / "empty"), "--resume", "latest"]
        assert main(argv) == 1
        assert stderr_line(capsys).startswith("error:checkpoint:")

    def test_invalid_training_value(self, tmp_path, pair_dir, capsys):
        config = tmp_path / "bad.cfg"
        config.write_text("crop=18\n")
        assert main(["train", "--data", str(pair_dir), "--config", str(config), "--out", str(tmp_path / "r")]) == 1
        assert stderr_line(capsys).startswith("error:config:")


class TestAblate:
    def test_small_sweep_writes_table(self, tmp_path, pair_dir, tiny_cfg, capsys):
        out = tmp_path / "ablation"
        argv = [
            "ablate", "--data", str(pair_dir), "--axis", "k", "--values", "1", "2",
            "--budget", "1", "--config", str(tiny_cfg), "--out", str(out),
        ]
        assert main(argv) == 0
        frame = pd.read_csv(out / "ablation_k.csv")
        assert list(frame["value"]) == [1, 2]
        assert frame["params"].nunique() == 1
        assert (out / "ablation_k.txt").is_file()
        assert (out / "k_1").is_dir()
        assert "psnr" in capsys.readouterr().out

    def test_components_change_parameter_count(self, tmp_path, pair_dir, tiny_cfg):
        out = tmp_path / "ablation"
        argv = [
            "ablate", "--data", str(pair_dir), "--axis", "components", "--values", "base", "fc+ct+graph",
            "--budget", "1", "--config", str(tiny_cfg), "--out", str(out),
        ]
        assert main(argv) == 0
        frame = pd.read_csv(out / "ablation_components.csv")
        assert frame["params"].iloc[0] < frame["params"].iloc[1]
        assert (out / "components_fc-ct-graph").is_dir()

    def test_unknown_axis(self, tmp_path, pair_dir, capsys):
        argv = ["ablate", "--data", str(pair_dir), "--axis", "depth", "--out", str(tmp_path / "a")]
        assert main(argv) == 1
        assert stderr_line(capsys).startswith("error:ablation:")

    def test_invalid_value_fails_before_training(self, tmp_path, pair_dir, tiny_cfg, capsys):
        out = tmp_path / "a"
        argv = ["ablate", "--data", str(pair_dir), "--axis", "k", "--values", "3", "0", "--config", str(tiny_cfg), "--out", str(out)]
        assert main(argv) == 1
        assert stderr_line(capsys).startswith("error:ablation:")
        assert not out.exists()
