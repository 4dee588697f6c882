import numpy as np
import pytest

from onebit_mimo.scenario import NetworkScenario
from onebit_mimo.validation import (
    FAIL,
    INSUFFICIENT,
    PASS,
    check_estimation_identity,
    check_mc_gap,
    check_pilot_contamination_ratio,
    check_zf_identity,
)


def test_identity_checks(default_scenario):
    for check in (check_estimation_identity, check_pilot_contamination_ratio, check_zf_identity):
        r = check(default_scenario)
        assert r.status == PASS and r.ok


def test_mc_gap_with_ten_trials_is_inconclusive(default_scenario):
    r = check_mc_gap(default_scenario, 10)
    assert r.status == INSUFFICIENT and r.ok


def test_mc_gap_can_fail():
    # at c = 1.5 the deterministic-equivalent analysis is far off, so a
    # strict tolerance must produce a failure rather than a pass
    sc = NetworkScenario.from_beta(np.ones((1, 1, 8)), M=12, P_t=10.0, sigma2=1.0, rho_p=10.0)
    r = check_mc_gap(sc, 200, rel_tol=1e-4, max_rel_se=1.0)
    assert r.status == FAIL and not r.ok
