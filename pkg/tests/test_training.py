"""Optimizer, schedules, checkpoints, and training-loop smoke tests."""

import numpy as np
import pytest

from gazekit.autodiff import parameter
from gazekit.errors import DataError, NumericError, ShapeError
from gazekit.datasets import ImageStore, toy_face_generate
from gazekit.datasets.toyfaces import DEFAULT_DOMAINS
from gazekit.model import ModelConfig
from gazekit.training import (
    Checkpoint,
    ScheduleSpec,
    adam_step,
    finetune_config,
    finetune_loop,
    init_optim_state,
    load_checkpoint,
    lr_at,
    pretrain_config,
    pretrain_loop,
    save_checkpoint,
)

TINY_MODEL = ModelConfig(image_size=16, patch_size=4, depth=2, heads=2, embed_dim=16, decoder_depth=1, decoder_dim=8, decoder_heads=2)


def tiny_dataset(n=48, seed=0, domain=DEFAULT_DOMAINS[0], image_size=16):
    manifest, images, _ = toy_face_generate(domain, n, seed=seed, image_size=image_size)
    return manifest, ImageStore.from_images(manifest, images)


class TestAdam:
    def test_zero_grads_no_motion(self):
        params = {"w": parameter(np.array([1.0, -2.0]))}
        state = init_optim_state(params, weight_decay=0.0)
        adam_step(params, {"w": np.zeros(2)}, state, lr=0.1)
        np.testing.assert_array_equal(params["w"].data, [1.0, -2.0])

    def test_first_step_closed_form(self):
        # eps << |g|: first update is -lr * sign(g)
        params = {"w": parameter(np.array([0.5]))}
        state = init_optim_state(params, eps=1e-12, weight_decay=0.0)
        adam_step(params, {"w": np.array([3.7])}, state, lr=0.01)
        np.testing.assert_allclose(params["w"].data, [0.5 - 0.01], atol=1e-9)

    def test_two_steps_match_reference_recursion(self):
        lr, b1, b2, eps, g = 0.05, 0.9, 0.999, 1e-8, 1.3
        params = {"w": parameter(np.array([2.0]))}
        state = init_optim_state(params, beta1=b1, beta2=b2, eps=eps, weight_decay=0.0)
        for _ in range(2):
            adam_step(params, {"w": np.array([g])}, state, lr=lr)
        # hand-rolled recursion
        w, m, v = 2.0, 0.0, 0.0
        for t in (1, 2):
            m = b1 * m + (1 - b1) * g
            v = b2 * v + (1 - b2) * g * g
            w = w - lr * (m / (1 - b1**t)) / (np.sqrt(v / (1 - b2**t)) + eps)
        np.testing.assert_allclose(params["w"].data, [w], atol=1e-15)

    def test_decoupled_decay_shrinks_before_update(self):
        params = {"w": parameter(np.array([10.0]))}
        state = init_optim_state(params, weight_decay=0.1, decoupled=True, eps=1e-12)
        adam_step(params, {"w": np.array([1.0])}, state, lr=0.01)
        expect = 10.0 * (1 - 0.01 * 0.1) - 0.01
        np.testing.assert_allclose(params["w"].data, [expect], atol=1e-9)

    def test_lr_zero_is_noop_without_decay(self):
        params = {"w": parameter(np.array([4.0, -1.0]))}
        state = init_optim_state(params, weight_decay=0.0)
        adam_step(params, {"w": np.array([0.3, 2.0])}, state, lr=0.0)
        np.testing.assert_array_equal(params["w"].data, [4.0, -1.0])

    def test_shape_mismatch(self):
        params = {"w": parameter(np.zeros(3))}
        state = init_optim_state(params)
        with pytest.raises(ShapeError):
            adam_step(params, {"w": np.zeros(4)}, state, lr=0.1)


class TestSchedule:
    def test_one_cycle_endpoints(self):
        spec = ScheduleSpec(kind="one_cycle", total_steps=1000, max_lr=1e-3, pct_start=0.3, div_factor=25, final_div=1e4)
        assert lr_at(spec, 0) == 1e-3 / 25
        assert lr_at(spec, 300) == 1e-3
        assert lr_at(spec, 1000) == pytest.approx(1e-3 / 1e4, rel=1e-12)

    def test_one_cycle_clamps_past_end(self):
        spec = ScheduleSpec(kind="one_cycle", total_steps=100, max_lr=1e-3)
        assert lr_at(spec, 5000) == lr_at(spec, 100)

    def test_one_cycle_continuous(self):
        spec = ScheduleSpec(kind="one_cycle", total_steps=200, max_lr=1e-3)
        lrs = [lr_at(spec, s) for s in range(201)]
        diffs = np.abs(np.diff(lrs))
        assert diffs.max() < 1e-3 / 10  # no jumps

    def test_step_decay_epoch_12(self):
        spec = ScheduleSpec(kind="step_decay", total_steps=0, max_lr=1e-4, gamma=0.1, step_epochs=5, steps_per_epoch=1)
        assert lr_at(spec, 12) == pytest.approx(1e-4 * 0.01, rel=1e-12)

    def test_constant(self):
        spec = ScheduleSpec(kind="constant", max_lr=5e-4)
        assert lr_at(spec, 0) == lr_at(spec, 10**6) == 5e-4

    def test_bad_pct_start(self):
        with pytest.raises(NumericError):
            ScheduleSpec(pct_start=1.5)


class TestCheckpoint:
    def _roundtrip_ckpt(self, tmp_path, dtype=np.float64):
        from gazekit.model import init_params
        from gazekit.training.optim import init_optim_state as opt_init

        params = init_params(TINY_MODEL, seed=1, dtype=dtype)
        state = opt_init(params, weight_decay=0.05)
        state.m = {k: np.full_like(p.data, 0.25) for k, p in params.items()}
        state.v = {k: np.full_like(p.data, 0.5) for k, p in params.items()}
        state.step = 7
        ckpt = Checkpoint.from_tensors(TINY_MODEL, params, step=7, optim=state, meta={"mode": "pretrain"})
        path = tmp_path / "ckpt.bin"
        save_checkpoint(ckpt, path)
        return ckpt, path

    def test_save_load_save_identical_bytes(self, tmp_path):
        _, path = self._roundtrip_ckpt(tmp_path)
        loaded = load_checkpoint(path)
        path2 = tmp_path / "ckpt2.bin"
        save_checkpoint(loaded, path2)
        assert path.read_bytes() == path2.read_bytes()

    def test_loaded_contents_match(self, tmp_path):
        ckpt, path = self._roundtrip_ckpt(tmp_path)
        loaded = load_checkpoint(path)
        assert loaded.step == 7
        assert loaded.config == TINY_MODEL
        assert loaded.optim is not None and loaded.optim.step == 7
        for name, arr in ckpt.params.items():
            np.testing.assert_array_equal(loaded.params[name], arr)

    def test_float32_round_trip(self, tmp_path):
        _, path = self._roundtrip_ckpt(tmp_path, dtype=np.float32)
        loaded = load_checkpoint(path)
        assert loaded.dtype == np.float32
        path2 = tmp_path / "b.bin"
        save_checkpoint(loaded, path2)
        assert path.read_bytes() == path2.read_bytes()

    def test_corrupt_magic(self, tmp_path):
        _, path = self._roundtrip_ckpt(tmp_path)
        blob = bytearray(path.read_bytes())
        blob[0] ^= 0xFF
        path.write_bytes(bytes(blob))
        with pytest.raises(DataError, match="magic"):
            load_checkpoint(path)

    def test_truncated_file(self, tmp_path):
        _, path = self._roundtrip_ckpt(tmp_path)
        blob = path.read_bytes()
        path.write_bytes(blob[: len(blob) // 2])
        with pytest.raises(DataError, match="truncated"):
            load_checkpoint(path)

    def test_version_mismatch(self, tmp_path):
        import struct

        _, path = self._roundtrip_ckpt(tmp_path)
        blob = bytearray(path.read_bytes())
        blob[8:12] = struct.pack("<I", 99)
        path.write_bytes(bytes(blob))
        with pytest.raises(DataError, match="version"):
            load_checkpoint(path)

    def test_cross_config_shape_error(self, tmp_path):
        # doctor the header to claim a wider model than the payload carries
        import json
        import struct

        _, path = self._roundtrip_ckpt(tmp_path)
        blob = path.read_bytes()
        (header_len,) = struct.unpack_from("<Q", blob, 12)
        header = json.loads(blob[20 : 20 + header_len].decode())
        header["model_config"]["embed_dim"] = 32
        new_header = json.dumps(header, sort_keys=True, separators=(",", ":")).encode()
        path.write_bytes(blob[:12] + struct.pack("<Q", len(new_header)) + new_header + blob[20 + header_len :])
        with pytest.raises(DataError, match="shape"):
            load_checkpoint(path)


def smoke_pretrain_run(seed=0, max_steps=200):
    """Shared smoke setup: fixed-texture noise-free domain, a small 32px
    model, and a high-lr one-cycle with clipping that descends fast."""
    from gazekit.datasets import ToyDomainSpec

    model = ModelConfig(image_size=32, patch_size=4, depth=2, heads=4, embed_dim=32, decoder_depth=1, decoder_dim=16, decoder_heads=2)
    domain = ToyDomainSpec(name="smoke", noise_sigma=0.0, texture_amp=0.4, texture_jitter=False)
    manifest, store = tiny_dataset(n=64, seed=0, domain=domain, image_size=32)
    cfg = pretrain_config(
        model=model,
        seed=seed,
        epochs=200,
        batch_size=16,
        max_steps=max_steps,
        beta2=0.95,
        grad_clip=1.0,
        precision="fast",
        schedule=ScheduleSpec(kind="one_cycle", max_lr=2e-2),
    )
    return pretrain_loop(cfg, manifest, store)


class TestPretrainLoop:
    def test_smoke_loss_halves_in_200_steps(self):
        ckpt, trace = smoke_pretrain_run()
        assert len(trace) == 200
        initial = trace[0][2]
        final = np.mean([row[2] for row in trace[-10:]])
        assert final < 0.5 * initial

    def test_smoothed_loss_monotone(self):
        _, trace = smoke_pretrain_run()
        losses = np.array([row[2] for row in trace])
        smoothed = np.convolve(losses, np.ones(20) / 20, mode="valid")
        # non-increasing up to minibatch jitter
        assert np.all(np.diff(smoothed) < 0.02 * smoothed[0])
        assert smoothed[-1] < smoothed[0]

    def test_reference_mode_bit_identical(self):
        manifest, store = tiny_dataset(n=24)
        cfg = pretrain_config(model=TINY_MODEL, seed=3, epochs=2, batch_size=8, precision="reference")
        _, trace_a = pretrain_loop(cfg, manifest, store)
        _, trace_b = pretrain_loop(cfg, manifest, store)
        assert trace_a == trace_b

    def test_pixel_norm_toggle_changes_trace(self):
        manifest, store = tiny_dataset(n=24)
        base = dict(model=TINY_MODEL, seed=1, epochs=1, batch_size=8, precision="reference")
        _, with_norm = pretrain_loop(pretrain_config(**base, pixel_norm=True), manifest, store)
        _, without = pretrain_loop(pretrain_config(**base, pixel_norm=False), manifest, store)
        assert [r[2] for r in with_norm] != [r[2] for r in without]

    def test_empty_dataset_rejected(self):
        from gazekit.datasets import DatasetManifest

        cfg = pretrain_config(model=TINY_MODEL)
        with pytest.raises(DataError, match="empty"):
            pretrain_loop(cfg, DatasetManifest(name="none"), ImageStore(arrays={}))


class TestFinetuneLoop:
    def test_validation_error_decreases(self):
        manifest, store = tiny_dataset(n=96, seed=5)
        train = manifest.derive(manifest.records[:80], "train")
        val = manifest.derive(manifest.records[80:], "val")
        cfg = finetune_config(model=TINY_MODEL, seed=0, epochs=5, batch_size=16, precision="fast")
        _, trace, val_errors = finetune_loop(cfg, train, store, val_manifest=val, val_store=store)
        assert len(val_errors) == 6  # initial + per-epoch
        assert val_errors[-1] < val_errors[0]

    def test_missing_label_identifies_record(self):
        from dataclasses import replace as drep

        manifest, store = tiny_dataset(n=8)
        broken = manifest.derive(
            [r if i != 3 else drep(r, gaze=None) for i, r in enumerate(manifest.records)], "broken"
        )
        cfg = finetune_config(model=TINY_MODEL, epochs=1, batch_size=4)
        with pytest.raises(DataError, match="frame') ?|3"):
            finetune_loop(cfg, broken, store)

    def test_pretrained_init_differs_from_random(self):
        manifest, store = tiny_dataset(n=32, seed=2)
        pre_cfg = pretrain_config(model=TINY_MODEL, seed=0, epochs=1, batch_size=8, precision="reference")
        pre_ckpt, _ = pretrain_loop(pre_cfg, manifest, store)
        ft = finetune_config(model=TINY_MODEL, seed=0, epochs=1, batch_size=8, precision="reference")
        _, trace_pre, _ = finetune_loop(ft, manifest, store, init=pre_ckpt)
        _, trace_rand, _ = finetune_loop(ft, manifest, store, init=None)
        assert [r[2] for r in trace_pre] != [r[2] for r in trace_rand]

    def test_config_mismatch_rejected(self):
        manifest, store = tiny_dataset(n=8)
        other_model = ModelConfig(image_size=16, patch_size=4, depth=1, heads=2, embed_dim=8, decoder_depth=1, decoder_dim=8, decoder_heads=2)
        pre_ckpt, _ = pretrain_loop(
            pretrain_config(model=other_model, epochs=1, batch_size=8), manifest, store
        )
        cfg = finetune_config(model=TINY_MODEL, epochs=1, batch_size=8)
        with pytest.raises(DataError, match="config"):
            finetune_loop(cfg, manifest, store, init=pre_ckpt)
