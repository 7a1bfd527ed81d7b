import numpy as np
import pytest

from symdrive.autodiff import load_tensors, save_tensors
from symdrive.imgio import read_pfm, read_ppm, write_pfm, write_ppm
from symdrive.rngs import stream


def test_checkpoint_roundtrip(tmp_path):
    rng = np.random.default_rng(0)
    named = {
        "enc.w": rng.standard_normal((4, 3, 3, 3)).astype(np.float32),
        "enc.b": rng.standard_normal(4).astype(np.float32),
        "scalar": np.float32(2.5).reshape(()),
    }
    path = tmp_path / "model.symt"
    save_tensors(path, named)
    back = load_tensors(path)
    assert set(back) == set(named)
    for k in named:
        np.testing.assert_array_equal(np.asarray(named[k]), back[k].reshape(np.asarray(named[k]).shape))


def test_checkpoint_magic(tmp_path):
    p = tmp_path / "junk.symt"
    p.write_bytes(b"NOPE" + b"\x00" * 16)
    from symdrive.autodiff.checkpoint import CheckpointError

    with pytest.raises(CheckpointError):
        load_tensors(p)


def test_ppm_roundtrip(tmp_path):
    rng = np.random.default_rng(1)
    img = rng.uniform(size=(5, 7, 3)).astype(np.float32)
    path = tmp_path / "img.ppm"
    write_ppm(path, img)
    back = read_ppm(path)
    assert back.shape == (5, 7, 3)
    assert np.abs(back - np.clip(img, 0, 1)).max() <= 0.5 / 255 + 1e-6


def test_ppm_clamps_on_write(tmp_path):
    img = np.array([[[1.5, -0.2, 0.5]]], dtype=np.float32)
    path = tmp_path / "c.ppm"
    write_ppm(path, img)
    back = read_ppm(path)
    np.testing.assert_allclose(back[0, 0], [1.0, 0.0, 0.5], atol=1.5 / 255)


def test_pfm_roundtrip(tmp_path):
    rng = np.random.default_rng(2)
    depth = (rng.uniform(size=(9, 4)) * 50).astype(np.float32)
    path = tmp_path / "d.pfm"
    write_pfm(path, depth)
    np.testing.assert_array_equal(read_pfm(path), depth)


def test_stream_reproducible_and_keyed():
    a = stream(0, "noise", 3).standard_normal(8)
    b = stream(0, "noise", 3).standard_normal(8)
    c = stream(0, "noise", 4).standard_normal(8)
    d = stream(1, "noise", 3).standard_normal(8)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, c)
    assert not np.array_equal(a, d)
