import math
from pathlib import Path

import numpy as np
import pytest

import cirsense

SCENES = Path(__file__).resolve().parents[2] / "scenes"


def test_system_defaults():
    cfg = cirsense.SystemConfig()
    assert len(cfg.active_subcarriers) == 496
    assert len(cfg.tap_set) == 71
    assert cfg.sample_interval_s == pytest.approx(6.25e-9)


def test_recover_single_path_on_grid():
    cfg = cirsense.SystemConfig()
    k = np.asarray(cfg.active_subcarriers, dtype=float)
    csi = (np.exp(-2j * np.pi * k * 4 / cfg.dft_size) / math.sqrt(cfg.dft_size))[:, None]
    cir = cirsense.recover_cir(csi, cfg)
    taps = np.abs(cir.taps[:, 0])
    assert np.argmax(taps) + cir.tap_offset == 4
    assert taps.max() == pytest.approx(1.0, abs=1e-9)


def test_synthesize_and_align():
    out = cirsense.synthesize(str(SCENES / "respiration.json"), seed=3)
    csi = out["csi"]
    assert csi.shape[0] == 496
    ch = cirsense.clean_channel(csi, out["sample_rate_hz"], out["system"])
    res = ch.align()
    truth = out["truth"]
    ts = out["system"].sample_interval_s
    expected = np.mean(truth["relative_delay_s"][0]) / ts
    assert res.delay_taps == pytest.approx(expected, abs=0.1)
    bpm = cirsense.respiration_rate(res.motion_signal, out["sample_rate_hz"])
    assert bpm == pytest.approx(18.0, abs=0.5)


def test_target_distance():
    cfg = cirsense.SystemConfig()
    assert cirsense.target_distance(0.0, 0.6, cfg) == pytest.approx(0.6)
    assert cirsense.target_distance(10e-9, 0.6, cfg) == pytest.approx(0.6 + cfg.light_speed_mps * 10e-9)


def test_run_pipeline_from_trace(tmp_path):
    trace = cirsense.write_synthetic(str(SCENES / "respiration.json"), str(tmp_path), seed=3)
    gt = tmp_path / "respiration.gt.jsonl"
    assert gt.exists()
    res = cirsense.run(str(trace), mode="dual", gt=str(gt), out=str(tmp_path / "run"))
    assert res["gate_failures"] == 0
    target = res["windows"][0]["targets"][0]
    assert abs(target["distance_error_m"]) < 0.05
    assert abs(target["bpm_error"]) < 0.5
    assert (tmp_path / "run" / "results.json").exists()
    back = cirsense.read_trace(str(trace))
    assert back["csi"].shape[0] == 496


def test_errors_carry_codes(tmp_path):
    bad = tmp_path / "bad.cirs"
    bad.write_bytes(b"nope")
    with pytest.raises(cirsense.CirsenseError) as info:
        cirsense.read_trace(str(bad))
    assert info.value.code == "input_format"
    with pytest.raises(cirsense.CirsenseError) as info:
        cirsense.run(str(bad), mode="walking")
    assert info.value.code == "input_format"
