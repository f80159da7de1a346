import dataclasses

import torch

from histotrainer import TrainConfig, apply_stage, build_model, train_two_stage
from histotrainer.model import frozen_state_clone, set_train_mode
from histotrainer.train import load_checkpoint, seed_everything


def test_smoke_training_loss_decreases(smoke_run):
    history = smoke_run.history
    assert len(history) == 6  # 3 + 3 epochs
    assert history[-1].loss < history[0].loss


def test_history_covers_both_stages(smoke_run):
    stages = [h.stage for h in smoke_run.history]
    assert stages == [1, 1, 1, 2, 2, 2]


def test_checkpoint_round_trip(smoke_run, smoke_config):
    model, config = load_checkpoint(smoke_run.checkpoint_path)
    assert config == smoke_config
    with torch.inference_mode():
        out = model.eval()(torch.rand(1, 3, 299, 299))
    assert out.shape == (1, 4)


def test_training_log_written(smoke_run):
    log = smoke_run.checkpoint_path.parent / "training_log.jsonl"
    assert log.exists()
    assert len(log.read_text().splitlines()) == 6


def test_stage1_step_keeps_backbone_bit_identical(smoke_config):
    seed_everything(0)
    model = build_model(smoke_config)
    apply_stage(model, 1, smoke_config)
    before = frozen_state_clone(model)
    head_before = model.fc[0].weight.detach().clone()

    set_train_mode(model)
    optimizer = torch.optim.RMSprop(
        [p for p in model.parameters() if p.requires_grad], lr=1e-3
    )
    inputs = torch.rand(4, 3, 299, 299)
    targets = torch.tensor([0, 1, 2, 3])
    loss = torch.nn.functional.cross_entropy(model(inputs), targets)
    loss.backward()
    optimizer.step()

    after_params = dict(model.named_parameters())
    after_buffers = dict(model.named_buffers())
    for name, tensor in before.items():
        current = after_params.get(name, after_buffers.get(name))
        assert torch.equal(tensor, current), f"{name} changed during stage 1"
    assert not torch.equal(head_before, model.fc[0].weight), "head did not train"


def test_fixed_seed_reproduces_first_epoch_loss(mini_dataset, tmp_path):
    config = TrainConfig(
        pretrained=False, batch_size=8, stage1_epochs=1, stage2_epochs=1, seed=77
    )
    first = train_two_stage(mini_dataset, config, tmp_path / "a")
    second = train_two_stage(mini_dataset, config, tmp_path / "b")
    assert first.history[0].loss == second.history[0].loss
    assert [h.loss for h in first.history] == [h.loss for h in second.history]


def test_different_seeds_change_training(mini_dataset, tmp_path):
    config = TrainConfig(
        pretrained=False, batch_size=8, stage1_epochs=1, stage2_epochs=1, seed=1
    )
    other = dataclasses.replace(config, seed=2)
    first = train_two_stage(mini_dataset, config, tmp_path / "a")
    second = train_two_stage(mini_dataset, other, tmp_path / "b")
    assert first.history[0].loss != second.history[0].loss
