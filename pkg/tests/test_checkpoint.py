import hashlib

import numpy as np
import pytest

from ctcocr import Checkpoint, FormatError


def sample_checkpoint():
    rng = np.random.default_rng(5)
    return Checkpoint(
        arrays={
            "head.w": rng.normal(size=(4, 3)),
            "head.b": np.zeros(3),
            "rnn.l0.fwd.wx": rng.normal(size=(2, 8)),
        },
        metadata={"kind": "crnn", "epoch": 3, "alphabet": {"labels": "abc"}},
    )


def test_round_trip(tmp_path):
    ckpt = sample_checkpoint()
    path = tmp_path / "model.ckpt"
    ckpt.save(path)
    loaded = Checkpoint.load(path)
    assert loaded.metadata == ckpt.metadata
    assert set(loaded.arrays) == set(ckpt.arrays)
    for name in ckpt.arrays:
        assert np.array_equal(loaded.arrays[name], ckpt.arrays[name])
        assert loaded.arrays[name].dtype == ckpt.arrays[name].dtype


def test_save_is_byte_deterministic(tmp_path):
    ckpt = sample_checkpoint()
    a, b = tmp_path / "a.ckpt", tmp_path / "b.ckpt"
    ckpt.save(a)
    ckpt.save(b)
    assert hashlib.sha256(a.read_bytes()).hexdigest() == \
        hashlib.sha256(b.read_bytes()).hexdigest()


def test_rejects_wrong_version(tmp_path):
    path = tmp_path / "v.ckpt"
    sample_checkpoint().save(path)
    data = bytearray(path.read_bytes())
    data[10] = 99  # bump the little-endian version field
    path.write_bytes(bytes(data))
    with pytest.raises(FormatError, match="version"):
        Checkpoint.load(path)


def test_rejects_non_checkpoint(tmp_path):
    path = tmp_path / "junk"
    path.write_bytes(b"hello world, definitely not a checkpoint")
    with pytest.raises(FormatError):
        Checkpoint.load(path)


def test_integer_arrays_supported(tmp_path):
    ckpt = Checkpoint(arrays={"steps": np.arange(5, dtype=np.int64)}, metadata={})
    path = tmp_path / "i.ckpt"
    ckpt.save(path)
    assert np.array_equal(Checkpoint.load(path).arrays["steps"], np.arange(5))
