import math
import os

import numpy as np
import pytest

import afdmsense


def test_version():
    assert afdmsense.__version__


def test_daft_roundtrip_and_unitarity():
    rng = np.random.default_rng(0)
    x = rng.standard_normal(32) + 1j * rng.standard_normal(32)
    c1 = 5.0 / 64.0
    y = afdmsense.daft(x, c1, 0.001)
    back = afdmsense.idaft(y, c1, 0.001)
    assert np.allclose(back, x, atol=1e-10)
    assert math.isclose(np.linalg.norm(y), np.linalg.norm(x), rel_tol=1e-10)
    a = afdmsense.daft_matrix(32, c1, 0.001)
    assert np.allclose(a.conj().T @ a, np.eye(32), atol=1e-10)


def test_daft_degenerates_to_fft():
    rng = np.random.default_rng(1)
    x = rng.standard_normal(16) + 1j * rng.standard_normal(16)
    got = afdmsense.daft(x, 0.0, 0.0)
    want = np.fft.fft(x) / math.sqrt(16)
    assert np.allclose(got, want, atol=1e-12)


def test_special_functions():
    assert math.isclose(afdmsense.hyp1f1(1.0, 1.0, 2.5), math.exp(2.5),
                        rel_tol=1e-12)
    assert math.isclose(afdmsense.log_hyp1f1(1.0, 1.0, 500.0), 500.0,
                        rel_tol=1e-12)
    assert math.isclose(afdmsense.log_gamma(5.0), math.log(24.0),
                        rel_tol=1e-13)
    # 1F1(m+1;1;z)/1F1(m;1;z) -> z/m for large z
    assert math.isclose(
        afdmsense.hyp1f1_ratio(3.0, 1.0, 2.0, 1.0, 5e4) * 2.0 / 5e4,
        1.0, rel_tol=0.01)
    with pytest.raises(Exception):
        afdmsense.hyp1f1(1.0, -1.0, 2.0)


def test_tilted_nakagami_m1_closed_form():
    omega, lam, eta = 0.4, 2.0, 0.3 - 0.7j
    mean, second = afdmsense.tilted_nakagami_moments(1.0, omega, eta, lam)
    denom = 1.0 + lam * omega
    assert np.isclose(mean, omega * eta / denom, rtol=1e-12)
    assert math.isclose(second, omega / denom + abs(mean) ** 2, rel_tol=1e-10)
    var = afdmsense.tilted_nakagami_variance(1.0, omega, eta, lam)
    assert var == omega / denom
    var5 = afdmsense.tilted_nakagami_variance(5.0, omega, eta, lam)
    m5, s5 = afdmsense.tilted_nakagami_moments(5.0, omega, eta, lam)
    assert math.isclose(var5, s5 - abs(m5) ** 2, rel_tol=1e-9)


def test_rss_inversion():
    d0, n1, g0 = 75.0, 2.19, 1.0
    signal = g0 * d0 ** (-n1)
    d0_hat, degenerate = afdmsense.rss_nakagami_range(
        signal + 1e-9, 1e-9, 1.0, n1, g0)
    assert not degenerate
    assert math.isclose(d0_hat, d0, rel_tol=1e-9)
    d0_hat, degenerate = afdmsense.rss_nakagami_range(1e-9, 1e-9, 1.0, n1, g0)
    assert degenerate


@pytest.fixture
def small_config(tmp_path):
    text = "\n".join([
        "n_sub = 32",
        "num_paths = 2",
        "tap_max = 8",
        "trials = 4",
        "seed = 9",
        "snr_db = 10, 20",
        "max_iter_ec = 200",
        "max_iter_em = 50",
        "crb_draws = 3",
        "",
    ])
    path = tmp_path / "smoke.cfg"
    path.write_text(text)
    return str(path)


def test_grid_size(small_config):
    assert afdmsense.grid_size(small_config) == 2


def test_run_trial_deterministic(small_config):
    a = afdmsense.run_trial(small_config, scenario_id=0, trial_index=1)
    b = afdmsense.run_trial(small_config, scenario_id=0, trial_index=1)
    assert a == b
    for key in ("d0_true", "d0_hat", "d0_hat_baseline", "nu1_true", "nu1_hat",
                "vlos_true", "vlos_hat", "converged", "em_iters",
                "ec_iters_total", "fixed_point_residual", "clamp_count"):
        assert key in a
    assert a["d0_true"] == 100.0
    assert math.isfinite(a["d0_hat"])
    # same geometry across the snr axis (common random numbers)
    c = afdmsense.run_trial(small_config, scenario_id=1, trial_index=1)
    assert c["nu1_true"] == a["nu1_true"]


def test_rcrb(small_config):
    rd0, rnu = afdmsense.rcrb(small_config, scenario_id=0)
    assert rd0 > 0 and math.isfinite(rd0)
    assert rnu > 0 and math.isfinite(rnu)


def test_shipped_config_parses():
    cfg_dir = os.environ.get("AFDMSENSE_CONFIG_DIR")
    if not cfg_dir:
        pytest.skip("AFDMSENSE_CONFIG_DIR not set")
    assert afdmsense.grid_size(os.path.join(cfg_dir, "table1.cfg")) == 1
