import json

import numpy as np
import pytest

from apeuler import suites, verify
from apeuler.assembly import AssembledField
from apeuler.frequencies import FrequencySeq, generate_frequencies


def test_fault_injection_is_caught(desk, desk_parts):
    layout, freqs = desk_parts
    bad = AssembledField(desk.base, desk.S, layout, freqs, desk.p, pressure_scale=2.0)
    res, div = verify.residual_audit(bad, [0.0, 1.0], 400, rng=0)
    assert not res.passed and res.name == "euler_residual"
    assert res.measured > 1e-3
    assert div.passed


def test_report_serialization_is_deterministic(desk):
    def run():
        rep = verify.VerificationReport(config={"seed": 7})
        rep.extend(verify.residual_audit(desk, [0.0, 2.0], 300, rng=3))
        rep.extend(verify.layout_entries(desk.layout))
        return json.loads(rep.to_json({"started": "now"}))

    a, b = run(), run()
    assert a["metadata"]["started"] == "now"
    assert set(a["metadata"]["wall_time"]) == {e["name"] for e in a["entries"]}
    a.pop("metadata")
    b.pop("metadata")
    assert a == b
    assert all("audits" in e and "ratio" in e for e in a["entries"])


def test_report_summary_and_failures():
    rep = verify.VerificationReport()
    rep.add(verify.CheckEntry("a", "x <= 1", 0.5, 1.0, True))
    rep.add(verify.CheckEntry("b", "y <= 1", 2.0, 1.0, False))
    assert not rep.passed
    assert [e.name for e in rep.failures()] == ["b"]
    assert rep.entries[1].ratio == 2.0
    text = rep.summary()
    assert "[FAIL] b" in text and "1/2 checks passed" in text
    assert verify.CheckEntry("c", "", 1.0, None, True).ratio is None


def test_base_flow_audit(desk):
    entries = verify.base_flow_audit(desk.base, 500, rng=1)
    assert all(e.passed for e in entries)
    assert entries[2].measured == 0.0


def test_layout_and_frequency_entries(desk):
    assert all(e.passed for e in verify.layout_entries(desk.layout))
    entries = verify.frequency_entries(desk.freqs)
    assert all(e.passed for e in entries)
    assert entries[1].details["certificate"]


def test_rational_frequencies_fail_probe(desk):
    fs = generate_frequencies(desk.layout.spec, 2, 2, mode="user",
                              user_blocks=[[[1.0], [0.5]], [[1e-3]], [[1e-6]]])
    entries = verify.frequency_entries(fs)
    assert not entries[1].passed


def test_witness_entries(desk, desk_parts):
    entries = verify.witness_entries(desk)
    assert len(entries) == 4 and all(e.passed for e in entries)
    layout, freqs = desk_parts
    empty = AssembledField(desk.base, desk.S, layout, freqs, desk.p, K=0)
    [e] = verify.witness_entries(empty)
    assert not e.passed


def test_stationary_estimates_have_zero_time_derivative(desk):
    zero = FrequencySeq.stationary(desk.shapes, desk.S, desk.epsilon)
    af = AssembledField(desk.base, desk.S, desk.layout, zero, desk.p)
    consts = verify._Constants(af, 17)
    entries = verify.scale_bound_entries(af, consts, [0.0, 1.0])
    dtu = [e for e in entries if "_dtu" in e.name]
    assert dtu and all(e.measured == 0.0 for e in dtu)


def test_estimate_entries_small_grid(desk):
    consts = verify._Constants(desk, 17)
    entries = verify.rescaling_entries(desk, consts, 3, 3) + verify.divergence_trend_entries(desk, consts)
    assert all(e.passed for e in entries)
    trend = [e for e in entries if e.name.startswith("divergent_growth")]
    assert trend and all(e.measured > 1 for e in trend)


def test_pressure_reconstruction_gauge_and_guards(desk):
    recon, direct = verify.reconstruct_pressure(desk, desk.theta, 64)
    assert abs(recon.mean()) <= 1e-15
    assert abs(direct.mean()) <= 1e-3 * np.abs(direct).max()
    with pytest.raises(ValueError):
        verify.pressure_reconstruction(desk, n=63)
    with pytest.raises(MemoryError):
        verify._grid_guard(2**13, 2)


def test_drift_guards(desk):
    with pytest.raises(ValueError):
        verify.spectral_drift(desk, n=65)
    # at T = 0 the only error is the grid representation of the initial data
    coarse = verify.spectral_drift(desk, t_final=0.0, n=128)[0.0]
    fine = verify.spectral_drift(desk, t_final=0.0, n=256)[0.0]
    assert fine < coarse / 10
    assert fine <= 1e-3


def test_central_difference_orders():
    f = np.exp
    for order in (2, 4, 6):
        err = abs(verify.central_difference(f, 1e-3, order) - 1.0)
        assert err <= {2: 1e-6, 4: 1e-11, 6: 1e-12}[order]


def test_suite_resolution():
    assert suites.resolve("full") == [s for s in suites.SUITES if s != "drift"]
    assert suites.resolve("all") == list(suites.SUITES)
    assert suites.resolve("residual, base,residual") == ["residual", "base"]
    with pytest.raises(ValueError, match="empty"):
        suites.resolve(" , ")
    with pytest.raises(ValueError, match="unknown"):
        suites.resolve("nope")
