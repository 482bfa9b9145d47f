"""Smoke tests for the aeslab python module (built extension + package)."""

import json
import subprocess
import os

import pytest

import aeslab


def test_version():
    assert aeslab.__version__


def test_cipher_known_answer():
    key = aeslab.Aes128Key(bytes(range(16)))
    schedule = aeslab.expand_key(key)
    plain = bytes.fromhex("00112233445566778899aabbccddeeff")
    cipher = aeslab.encrypt_block(plain, schedule)
    assert cipher.hex() == "69c4e0d86a7b0430d8cdb78070b4c55a"
    assert aeslab.decrypt_block(cipher, schedule) == plain


def test_cipher_selftest():
    results = aeslab.cipher_selftest()
    assert results and all(passed for _, passed in results)


def test_block_helpers():
    assert aeslab.apply_fault(bytes(16))[0] == 0xFF
    assert aeslab.apply_fault(aeslab.apply_fault(b"0123456789abcdef")) == b"0123456789abcdef"
    with pytest.raises(ValueError):
        aeslab.apply_fault(b"short")
    assert aeslab.pad_or_truncate(b"abc") == b"abc" + bytes(13)
    assert aeslab.pad_or_truncate(b"x" * 20) == b"x" * 16


def test_threshold_fixture():
    stats = aeslab.compute_threshold([1_000_000] * 4 + [10_000_000])
    assert stats.threshold_ns == 8_200_000.0
    assert stats.mean_ns == 2_800_000.0
    with pytest.raises(ValueError):
        aeslab.compute_threshold([])


def test_generation_is_deterministic():
    config = aeslab.InjectionConfig()
    config.block_count = 200
    config.anomaly_ratio = 0.3
    config.master_seed = 7
    a = aeslab.generate_blocks(config)
    b = aeslab.generate_blocks(config)
    assert [blk.plaintext for blk in a] == [blk.plaintext for blk in b]
    kinds = {blk.anomaly.type for blk in a}
    assert aeslab.AnomalyType.NONE in kinds


def test_end_to_end_run():
    options = aeslab.RunOptions()
    options.experiment.injection.block_count = 400
    options.experiment.injection.anomaly_ratio = 0.25
    options.experiment.injection.master_seed = 11
    options.experiment.worker_count = 2
    options.forest.tree_count = 11
    result = aeslab.execute_run(options)

    assert len(result.records) == 400
    assert result.dataset.benign + result.dataset.anomalous == 400
    assert result.timing.threshold_ns >= result.timing.mean_ns

    manifest = json.loads(result.manifest_json)
    assert manifest["config"]["master_seed"] == 11
    assert manifest["detectors"]["threshold"]["evaluated"] == 400

    # every delay block must be flagged by the threshold rule in this regime
    for record in result.records:
        if record.anomaly.type == aeslab.AnomalyType.DELAY:
            assert record.flagged_threshold is True


def test_forest_train_predict(tmp_path):
    options = aeslab.RunOptions()
    options.experiment.injection.block_count = 300
    options.experiment.injection.anomaly_ratio = 0.3
    options.experiment.injection.master_seed = 5
    options.forest.tree_count = 11
    result = aeslab.execute_run(options)
    dataset = aeslab.extract_dataset(result.records, aeslab.FeatureMode.TIME_ONLY)

    split = aeslab.split_train_test(dataset, 0.3, seed=9)
    train = [dataset[i] for i in split.train_indices]
    params = aeslab.ForestHyperparams()
    params.tree_count = 11
    model = aeslab.train_forest(train, params, aeslab.FeatureMode.TIME_ONLY, seed=9)

    # delays are separable on duration alone
    hits = 0
    total = 0
    for i in split.test_indices:
        if result.records[i].anomaly.type == aeslab.AnomalyType.DELAY:
            total += 1
            hits += model.predict(dataset[i].values)
    assert total > 0 and hits == total

    path = tmp_path / "model.json"
    aeslab.save_model(model, path)
    loaded = aeslab.load_model(path)
    assert loaded.tree_count == 11
    probe = dataset[split.test_indices[0]].values
    assert loaded.predict(probe) == model.predict(probe)


def test_metrics_identities():
    counts = aeslab.ConfusionCounts(tp=8, fp=2, fn=1, tn=89)
    metrics = aeslab.metrics_from(counts)
    assert metrics.accuracy == 0.97
    assert metrics.precision == 0.8
    assert abs(metrics.recall - 8 / 9) < 1e-15

    empty = aeslab.metrics_from(aeslab.ConfusionCounts(tp=0, fp=0, fn=0, tn=10))
    assert empty.precision is None
    assert empty.recall is None


def test_gini():
    assert aeslab.gini_impurity(6, 0) == 0.0
    assert aeslab.gini_impurity(3, 3) == 0.5


def test_cli_binary_selftest():
    cli = os.environ.get("AESLAB_CLI")
    if not cli:
        pytest.skip("AESLAB_CLI not set")
    proc = subprocess.run([cli, "selftest"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "fips197-c1-encrypt" in proc.stdout
