"""Training runs through the library API."""

import math

import numpy as np
import pytest

from app.cli import main
from app.errors import CheckpointError
from app.imaging import PairedDataset
from app.models import MsgnnConfig, TrainConfig
from app.network import ParameterStore
from app.storage import latest_checkpoint, load_checkpoint, save_checkpoint
from app.training import Trainer, evaluate, train


def short_config(**overrides):
    values = {"epochs": 2, "milestones": [], "batch": 2, "crop": 16, "seed": 11, "holdout_fraction": 0.2}
    values.update(overrides)
    return TrainConfig(**values)


def arrays_equal(a: ParameterStore, b: ParameterStore) -> bool:
    return a.names() == b.names() and all(np.array_equal(a[n].data, b[n].data) for n in a)


class TestTraining:
    def test_smoke_run_writes_metrics_and_checkpoints(self, tmp_path, pair_dir, tiny_config):
        dataset = PairedDataset.from_directory(pair_dir)
        result = train(dataset, tiny_config, short_config(), tmp_path / "run")
        assert [r.epoch for r in result.records] == [0, 1]
        assert result.state.step == 4
        assert len(result.step_losses) == 4
        assert all(-1.0 <= loss <= 1.0 for loss in result.step_losses)
        assert not math.isnan(result.records[-1].psnr)
        assert result.checkpoint.name == "epoch_0002.ckpt"
        assert (tmp_path / "run" / "epoch_0001.ckpt").is_file()

        restored = load_checkpoint(result.checkpoint)
        assert restored.step == 4
        assert arrays_equal(restored.params, result.params)

    def test_training_changes_parameters(self, tmp_path, pair_dir, tiny_config):
        dataset = PairedDataset.from_directory(pair_dir)
        initial = ParameterStore.initialize(tiny_config)
        result = train(dataset, tiny_config, short_config(epochs=1), tmp_path / "run")
        assert not np.array_equal(initial["tail.weight"].data, result.params["tail.weight"].data)

    def test_same_seed_same_run(self, tmp_path, pair_dir, tiny_config):
        dataset = PairedDataset.from_directory(pair_dir)
        first = train(dataset, tiny_config, short_config(epochs=1), tmp_path / "a")
        second = train(dataset, tiny_config, short_config(epochs=1), tmp_path / "b")
        assert first.step_losses == second.step_losses
        assert arrays_equal(first.params, second.params)

    def test_resume_mid_epoch_matches_uninterrupted_run(self, tmp_path, pair_dir, tiny_config):
        dataset = PairedDataset.from_directory(pair_dir)
        reference = train(dataset, tiny_config, short_config(), tmp_path / "full")

        interrupted = train(dataset, tiny_config, short_config(max_steps=3), tmp_path / "split")
        assert interrupted.state.step == 3
        assert interrupted.checkpoint.name == "epoch_0001_step000003.ckpt"
        assert latest_checkpoint(tmp_path / "split") == interrupted.checkpoint

        resumed = train(dataset, tiny_config, short_config(), tmp_path / "split", resume=interrupted.checkpoint)
        assert resumed.state.step == 4
        assert arrays_equal(resumed.params, reference.params)
        for name in reference.state.first:
            np.testing.assert_array_equal(resumed.state.first[name], reference.state.first[name])
        assert [r.model_dump() for r in resumed.records][0] == reference.records[0].model_dump()
        assert resumed.records[1].loss == pytest.approx(reference.records[1].loss, rel=1e-12)

    def test_resume_at_epoch_boundary(self, tmp_path, pair_dir, tiny_config):
        dataset = PairedDataset.from_directory(pair_dir)
        reference = train(dataset, tiny_config, short_config(), tmp_path / "full")
        train(dataset, tiny_config, short_config(epochs=2, max_steps=2), tmp_path / "split")
        resumed = train(dataset, tiny_config, short_config(), tmp_path / "split", resume=tmp_path / "split" / "epoch_0001.ckpt")
        assert arrays_equal(resumed.params, reference.params)
        assert [r.epoch for r in resumed.records] == [0, 1]

    def test_graph_free_training(self, tmp_path, pair_dir, tiny_config):
        dataset = PairedDataset.from_directory(pair_dir)
        config = tiny_config.model_copy(update={"use_graph": False})
        result = train(dataset, config, short_config(epochs=1), tmp_path / "run")
        assert result.state.step == 2

    def test_resume_needs_training_position(self, tmp_path, pair_dir, tiny_config):
        dataset = PairedDataset.from_directory(pair_dir)
        bare = save_checkpoint(tmp_path / "bare.ckpt", tiny_config, ParameterStore.initialize(tiny_config))
        trainer = Trainer(dataset, tiny_config, short_config(), tmp_path / "run")
        with pytest.raises(CheckpointError, match="training position"):
            trainer.resume(bare)

    def test_single_pair_is_its_own_exemplar(self, tmp_path, pair_factory, tiny_config):
        dataset = PairedDataset.from_directory(pair_factory("one", count=1))
        result = train(dataset, tiny_config, short_config(epochs=1, holdout_fraction=0.9), tmp_path / "run")
        assert result.state.step == 1
        assert math.isnan(result.records[0].psnr)

    def test_without_holdout_metrics_are_nan(self, tmp_path, pair_factory, tiny_config):
        dataset = PairedDataset.from_directory(pair_factory("two", count=2))
        result = train(dataset, tiny_config, short_config(epochs=1, holdout_fraction=0.0), tmp_path / "run")
        assert math.isnan(result.records[0].psnr)
        assert math.isnan(result.records[0].ssim)



DESK_MODEL = MsgnnConfig(N=2, M=2, channels=8, k=3, l=3, s=3)
# 15 training pairs in batches of 3: 5 steps per epoch, 200 steps in total.
DESK_TRAIN = TrainConfig(lr=5e-4, epochs=40, milestones=[], batch=3, crop=48, holdout_fraction=0.25, max_steps=200)


def desk_run(data, out):
    dataset = PairedDataset.from_directory(data)
    return dataset, train(dataset, DESK_MODEL, DESK_TRAIN, out)


@pytest.fixture(scope="module")
def desk_data(tmp_path_factory):
    root = tmp_path_factory.mktemp("desk") / "data"
    assert main(["synth", "--out-dir", str(root), "--seed", "7"]) == 0
    return root


@pytest.fixture(scope="module")
def desk_result(desk_data, tmp_path_factory):
    return desk_run(desk_data, tmp_path_factory.mktemp("desk_run"))


@pytest.mark.slow
def test_desk_scale_training_improves_on_rainy_input(desk_result):
    dataset, result = desk_result
    assert result.state.step == 200
    first, last = np.mean(result.step_losses[:10]), np.mean(result.step_losses[-10:])
    # Distance of the loss from its floor of -1 at least halves.
    assert last + 1.0 <= 0.5 * (first + 1.0)

    _, heldout = dataset.split(DESK_TRAIN.holdout_fraction)
    assert len(heldout) == 5
    frame = evaluate(heldout, result.params, DESK_MODEL)
    mean = frame[frame["name"] == "mean"].iloc[0]
    assert mean["psnr"] - mean["input_psnr"] >= 2.0


@pytest.mark.slow
def test_desk_scale_rerun_writes_identical_metrics(desk_data, desk_result, tmp_path):
    _, result = desk_result
    _, again = desk_run(desk_data, tmp_path / "again")
    original = result.checkpoint.parent / "metrics.tsv"
    assert (tmp_path / "again" / "metrics.tsv").read_bytes() == original.read_bytes()
    assert again.step_losses == result.step_losses
