import os
import pathlib

import pytest

import wgmtransport as wt

CONFIGS = pathlib.Path(os.environ.get("WGM_CONFIG_DIR", pathlib.Path(__file__).parents[2] / "configs"))


def load(name):
    return wt.load_config(CONFIGS / f"{name}.json")


def test_methods():
    assert wt.methods() == ["tm", "spt", "cqed-semiclassical", "cqed-master"]


def test_config_describe():
    c = load("fig3c")
    d = c.describe()
    assert d["kappa_tot_over_2pi_hz"] == pytest.approx(60e9, rel=1e-12)
    assert c.warnings == []
    assert c.source["rates"]["Gamma_over_2pi_hz"] == 600e6


def test_critical_coupling_point():
    c = load("fig2a")
    for m in ("tm", "spt", "cqed-semiclassical"):
        assert wt.transmission(c, m, 0.0) < 1e-12
    assert wt.transmission(c, "spt", 10.0) > 0.9


def test_small_sweep_and_compare():
    c = load("fig4b")
    s = wt.run_sweep(c, methods="tm,spt,cqed-semiclassical", points=101, range=(-5.0, 5.0))
    assert len(s["delta1_over_kappa_tot"]) == 101
    assert [x["method"] for x in s["series"]] == ["tm", "spt", "cqed-semiclassical"]
    report = wt.compare(s)
    assert report["pass"] is True


def test_master_sweep_is_strided():
    c = load("fig3c")
    s = wt.run_sweep(c, methods="cqed-master", points=21, master_stride=10)
    t = s["series"][0]["T"]
    assert [v is not None for v in t].count(True) == 3


def test_chirality():
    r = wt.chirality(load("fig3c"), methods="spt", points=201)
    assert r["backward"]["spt"] < 1e-12
    assert r["forward"]["spt"] > 0.5


def test_errors():
    with pytest.raises(wt.IoError):
        wt.load_config("/nonexistent/config.json")
    doc = load("baseline").source
    doc["sigma_z"] = 3.0
    with pytest.raises(wt.ConfigError):
        wt.parse_config(doc)
    with pytest.raises(wt.DomainError):
        wt.transmission(load("baseline"), "magic", 0.0)
    assert issubclass(wt.ConfigError, wt.Error)
