import numpy as np
import pytest

from gpuslice.scenarios import REFERENCE_OVERLOAD_DEGRADATION_PCT, run_scenario


def test_overload_never_starves(paper_cfg):
    rep, res = run_scenario("overload3x", paper_cfg)
    assert np.all(res.allocation > 0)
    assert rep.latency_degradation_pct > 0
    assert rep.details["reference_degradation_pct"] == REFERENCE_OVERLOAD_DEGRADATION_PCT


def test_spike_reconverges(paper_cfg):
    rep, res = run_scenario("spike10x", paper_cfg)
    assert rep.details["window"] == [40, 50]
    assert rep.details["max_shift_during_spike"] > 0.01
    np.testing.assert_array_equal(res.allocation[50], res.allocation[39])
    assert rep.details["reconverged_within_steps"] == 1


def test_skew_prevents_monopoly(paper_cfg):
    rep, res = run_scenario("skew90", paper_cfg)
    dom = rep.details["dominant_agent"]
    assert dom == 3
    assert np.all(res.allocation[:, dom] < 1.0)
    assert np.all(np.delete(res.allocation, dom, axis=1) > 0)


def test_unknown_scenario(paper_cfg):
    with pytest.raises(ValueError):
        run_scenario("meltdown", paper_cfg)
