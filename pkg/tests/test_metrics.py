import numpy as np
import pytest
from scipy.ndimage import gaussian_filter

from cofusion.metrics import (avg_gradient, build_report, entropy, mef_ssim,
                              mutual_information, psnr)
from cofusion.sve import ExposureStack


# ---------------------------------------------------------------------- AG

def test_ag_constant_zero():
    assert avg_gradient(np.full((16, 16), 0.7)) == 0.0


def test_ag_ramp_closed_form():
    img = np.tile(np.arange(64) / 255.0, (16, 1))
    assert abs(avg_gradient(img) - np.sqrt(0.5)) < 1e-9


def test_ag_checkerboard_closed_form():
    yy, xx = np.indices((32, 32))
    img = ((yy + xx) % 2).astype(np.float64)
    assert abs(avg_gradient(img) - 255.0) < 1e-9


def test_ag_translation_and_scaling():
    rng = np.random.default_rng(0)
    img = gaussian_filter(rng.random((40, 40)), 2)
    inner = avg_gradient(img[5:-5, 5:-5])
    shifted = avg_gradient(img[6:-4, 5:-5])
    assert abs(inner - shifted) < 0.05 * inner  # translation-stable
    assert abs(avg_gradient(img * 0.5) - 0.5 * avg_gradient(img)) < 1e-12


def test_ag_degenerate_size():
    with pytest.raises(ValueError):
        avg_gradient(np.zeros((1, 5)))


# ---------------------------------------------------------------------- MI

def test_mi_self_identity():
    rng = np.random.default_rng(1)
    x = rng.random((64, 64))
    mi = mutual_information(x, x, x)
    assert abs(mi - 2.0 * entropy(x)) < 1e-9


def test_mi_independent_low():
    vals = []
    for seed in range(20):
        rng = np.random.default_rng(seed)
        fused = rng.random((64, 64))
        a = rng.random((64, 64))
        b = rng.random((64, 64))
        vals.append(mutual_information(fused, a, b, bins=16))
    assert np.mean(vals) < 0.1


def test_mi_constant_fused_zero():
    rng = np.random.default_rng(2)
    a, b = rng.random((32, 32)), rng.random((32, 32))
    assert mutual_information(np.full((32, 32), 0.5), a, b) == pytest.approx(0.0, abs=1e-12)


def test_mi_source_permutation_invariance():
    rng = np.random.default_rng(3)
    f, a, b = rng.random((32, 32)), rng.random((32, 32)), rng.random((32, 32))
    assert mutual_information(f, a, b) == pytest.approx(mutual_information(f, b, a))


# -------------------------------------------------------------------- PSNR

def test_psnr_identical_capped():
    x = np.random.default_rng(4).random((16, 16))
    assert psnr(x, x, x) == 100.0


def test_psnr_known_mse():
    x = np.zeros((10, 10))
    y = np.full((10, 10), 0.1)  # MSE 0.01
    assert psnr(x, y, y) == pytest.approx(20.0)
    assert psnr(x, x, y) == pytest.approx(60.0)  # (100 + 20) / 2


# ----------------------------------------------------------------- MEF-SSIM

def test_mef_ssim_single_source_identity():
    img = np.random.default_rng(5).random((32, 32))
    stack = ExposureStack(img[None])
    assert abs(mef_ssim(stack, img) - 1.0) < 1e-9


def test_mef_ssim_identical_pair_identity():
    img = np.random.default_rng(6).random((32, 32))
    stack = ExposureStack(np.stack([img, img]))
    assert abs(mef_ssim(stack, img) - 1.0) < 1e-9


def test_mef_ssim_noise_low():
    rng = np.random.default_rng(7)
    base = gaussian_filter(rng.random((48, 48)), 2)
    stack = ExposureStack(np.stack([np.clip(base * 1.4, 0, 1), base * 0.6]))
    scores = [mef_ssim(stack, np.random.default_rng(s).random((48, 48)))
              for s in range(5)]
    assert np.mean(scores) < 0.3


def test_mef_ssim_channel_order_invariance():
    rng = np.random.default_rng(8)
    a, b = rng.random((24, 24)), rng.random((24, 24))
    fused = (a + b) / 2
    s1 = mef_ssim(ExposureStack(np.stack([a, b])), fused)
    s2 = mef_ssim(ExposureStack(np.stack([b, a])), fused)
    assert s1 == pytest.approx(s2, abs=1e-12)


def test_mef_ssim_window_too_large():
    with pytest.raises(ValueError):
        mef_ssim(ExposureStack(np.zeros((1, 4, 4))), np.zeros((4, 4)), window=8)


# ------------------------------------------------------------------ entropy

def test_entropy_cases():
    assert entropy(np.full((16, 16), 0.4)) == 0.0
    grad = np.tile(np.linspace(0, 1, 256, endpoint=False) + 1e-4, (4, 1))
    assert abs(entropy(grad) - 8.0) < 1e-9


# ------------------------------------------------------------------- report

def test_report_schema(tmp_path):
    rng = np.random.default_rng(9)
    f = rng.random((32, 32))
    a = rng.random((32, 32))
    b = rng.random((32, 32))
    stack = ExposureStack(np.stack([a, b]))
    rep = build_report(f, a, b, stack=stack, inputs={"fused": "f.png"})
    assert set(rep.values) == {"ag", "mi", "psnr", "mef_ssim", "viff", "niqe"}
    assert rep.values["viff"] is None and rep.values["niqe"] is None
    assert all(np.isfinite(v) for k, v in rep.values.items() if v is not None)
    path = tmp_path / "report.json"
    rep.to_json(str(path))
    import json
    data = json.loads(path.read_text())
    assert data["params"]["mi_bins"] == 256
    assert data["inputs"]["fused"] == "f.png"
