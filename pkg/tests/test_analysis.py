import numpy as np
import pytest

from onebit_mimo.analysis import (
    DAC_FOM,
    KappaSearchError,
    PowerModel,
    ee_sweep,
    energy_efficiency,
    kappa_search,
    low_snr_kappa,
    rate_crossing,
)
from onebit_mimo.rates import closed_form_fr, closed_form_onebit, degradation_ratios


def test_low_snr_kappa():
    assert low_snr_kappa() == pytest.approx(2.4674, abs=1e-4)


def test_kappa_high_power_small_array(default_scenario):
    r = kappa_search(default_scenario, 100, P_t=100.0)
    assert r.kappa == pytest.approx(3.79, abs=0.2)
    assert r.achieved_gap <= 1e-3 + 1e-12


def test_kappa_low_power(default_scenario):
    r = kappa_search(default_scenario, 1000, P_t=1e-3)
    assert 2.3 <= r.kappa <= 2.6
    cross = kappa_search(default_scenario, 1000, P_t=1e-4)
    assert cross.kappa == pytest.approx(low_snr_kappa(), rel=0.05)


def test_kappa_declines_for_large_arrays(default_scenario):
    k = [kappa_search(default_scenario, m, P_t=100.0).kappa for m in (1e4, 1e5, 5e5, 1e6)]
    assert all(a > b for a, b in zip(k, k[1:]))
    assert k[-1] < 2.0


def test_threshold_result_is_minimal(default_scenario):
    r = kappa_search(default_scenario, 200, P_t=10.0)
    target = closed_form_fr(default_scenario, M=200).per_user - 1e-3
    assert closed_form_onebit(default_scenario, M=r.M_one).per_user >= target
    assert closed_form_onebit(default_scenario, M=r.M_one * (1 - 1e-9)).per_user < target


def test_root_criterion(default_scenario):
    r = kappa_search(default_scenario, 128, 0.0, P_t=10.0, criterion="root")
    assert r.M_one == pytest.approx(486.2, abs=0.1)
    assert r.M_one_int == 486
    assert r.achieved_gap < 1e-9
    assert r.kappa_rounded == round(r.kappa, 2)


def test_kappa_errors(default_scenario):
    with pytest.raises(ValueError):
        kappa_search(default_scenario, 8)
    with pytest.raises(ValueError):
        kappa_search(default_scenario, 100, criterion="exact")
    with pytest.raises(KappaSearchError):
        kappa_search(default_scenario, 100, P_t=10.0, M_max=200)


def test_kappa_monte_carlo_recheck(default_scenario):
    r = kappa_search(default_scenario, 20, P_t=10.0, mc_trials=20)
    assert r.mc_gap is not None and r.mc_gap < 0.1


def test_rate_crossings(default_scenario):
    m_one = rate_crossing(default_scenario, 3.0, True)
    m_conv = rate_crossing(default_scenario, 3.0, False)
    assert m_one == pytest.approx(540, rel=0.1)
    assert m_conv == pytest.approx(150, rel=0.1)
    assert closed_form_onebit(default_scenario, M=m_one).per_user >= 3.0
    with pytest.raises(KappaSearchError):
        rate_crossing(default_scenario, 10.0, True, M_max=1e6)


def test_tn_ratio_limit_matches_low_snr_kappa(default_scenario):
    assert degradation_ratios(default_scenario, M=1e10).TN[0, 0] == pytest.approx(low_snr_kappa(),
                                                                                 rel=1e-6)


def test_dac_power():
    assert PowerModel(f_s=100e6, bits=1).P_DAC == pytest.approx(9.88e-5, rel=1e-12)
    assert DAC_FOM == 494e-15
    assert PowerModel(f_s=100e6, bits=10).P_DAC / PowerModel(f_s=100e6, bits=1).P_DAC == 512


def test_power_model_validation():
    for kw in (dict(amp_efficiency=0.0), dict(amp_efficiency=1.5), dict(f_s=-1.0), dict(bits=0)):
        with pytest.raises(ValueError):
            PowerModel(**kw)
    pm = PowerModel(amp_efficiency=0.5, f_s=0.0, P_RF=0.01)
    assert pm.total_power(10, 2.0) == pytest.approx(4.0 + 0.1)
    assert energy_efficiency(8.0, pm, 10, 2.0) == pytest.approx(8.0 / 4.1)
    with pytest.raises(ValueError):
        energy_efficiency(1.0, PowerModel(f_s=0.0, P_RF=0.0), 10, 0.0)


def test_ee_sweep(default_scenario):
    fs = np.arange(20, 401, 20) * 1e6
    res = ee_sweep(default_scenario, fs)
    assert res.M_one == 486 and res.M_conv == 128
    assert np.all(np.diff(res.ee_fr) < 0)
    assert np.ptp(res.ee_onebit) / res.ee_onebit.mean() < 0.02  # nearly flat
    assert res.crossover_fs == pytest.approx(100e6, rel=0.3)
    below, above = fs < res.crossover_fs, fs > res.crossover_fs
    assert np.all(res.ee_onebit[above] > res.ee_fr[above])
    assert np.all(res.ee_onebit[below] < res.ee_fr[below])


def test_ee_zero_frequency_limit(default_scenario):
    res = ee_sweep(default_scenario, [0.0])
    pt = default_scenario.constants.P_t
    assert res.ee_fr[0] == pytest.approx(res.sum_rate_fr / (pt + 128 * 0.0358))
    assert res.ee_fr[0] > res.ee_onebit[0]
    with pytest.raises(ValueError):
        ee_sweep(default_scenario, [])
