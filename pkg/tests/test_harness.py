import json

import numpy as np
import pytest

from linkedrmt.classes import build_companion_classes
from linkedrmt.cli import main
from linkedrmt.exact import companion_moment_exact
from linkedrmt.harness import (
    ConfigError,
    ExperimentConfig,
    moment_estimates,
    run_concentration,
    run_mc_experiment,
    run_verify,
    sample_spectra,
)
from linkedrmt.linkfn import block_circulant, f2, f3
from linkedrmt.sampler import sample_companion_matrix
from linkedrmt.spectral import hermitian_eigenvalues, normalized_spectrum


def small_cfg(tmp_path=None, **kw):
    d = dict(link="builtin:block:2", sizes=[16, 32], samples=20, orders=[0, 2, 4], seed=3)
    d.update(kw)
    if tmp_path is not None:
        d["out"] = str(tmp_path)
    return ExperimentConfig(**d)


@pytest.mark.parametrize("kw", [
    dict(sizes=[15]), dict(samples=0), dict(orders=[]), dict(dist="cauchy"),
    dict(link="builtin:bogus"), dict(range=(1, 1)), dict(sizes=[]),
])
def test_config_validation(kw):
    with pytest.raises(ConfigError):
        small_cfg(**kw).validate()


def test_config_round_trip(tmp_path):
    cfg = small_cfg(tmp_path)
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps(cfg.to_dict()))
    assert ExperimentConfig.from_json(p) == cfg
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"nope": 1})


def test_zeroth_moment_row():
    res = run_mc_experiment(small_cfg())
    for N in (16, 32):
        row = res.table.row(N, 0)
        assert row.estimate == 1.0 and row.std_error == 0.0


def test_moment_table_exact_columns():
    res = run_mc_experiment(small_cfg(orders=[3, 4]))
    row = res.table.row(32, 4)
    assert row.exact == companion_moment_exact(block_circulant(2), 2, 4)
    assert res.table.row(16, 3).exact == 0
    lines = res.table.to_csv().splitlines()
    assert lines[0] == "N,m,estimate,std_error,exact_num,exact_den,abs_err"
    assert len(lines) == 5


def test_outputs_are_reproducible(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    run_mc_experiment(small_cfg(a, spectra=True))
    run_mc_experiment(small_cfg(b, spectra=True, workers=4))
    files = ["moments.csv", "histogram.csv", "report.json", "spectra_N16.csv", "spectra_N32.csv"]
    for name in files:
        assert (a / name).read_bytes() == (b / name).read_bytes(), name
    cfg_a = json.loads((a / "config.json").read_text())
    assert cfg_a["seed"] == 3
    meta = json.loads((a / "meta.json").read_text())
    assert meta["seed"] == 3 and "build" in meta and "timestamp" in meta
    report = json.loads((a / "report.json").read_text())
    assert set(report) == {"checks", "seed", "versions"}
    assert (a / "spectra_N16.csv").read_text().splitlines()[0] == "sample_index,eig_index,value"
    assert (a / "histogram.csv").read_text().splitlines()[0] == "bin_lo,bin_hi,count,density"


def test_sample_spectra_independent_of_workers():
    a = sample_spectra(f3(), 24, 6, seed=9, workers=1)
    b = sample_spectra(f3(), 24, 6, seed=9, workers=3)
    assert a.tobytes() == b.tobytes()
    c = sample_spectra(f3(), 24, 3, seed=9, first_index=3)
    assert np.array_equal(a[3:], c)


def test_companion_monte_carlo_matches_exact():
    # the finite companion itself: no N -> oo limit involved
    for f, K in ((f2(), 2), (f3(), 4), (block_circulant(2), 4)):
        cmap = build_companion_classes(f, K)
        x = np.array([
            np.mean(normalized_spectrum(hermitian_eigenvalues(
                sample_companion_matrix(cmap, 0, s).entries), K).values ** 4)
            for s in range(20_000)
        ])
        exact = float(companion_moment_exact(f, K, 4))
        se = x.std(ddof=1) / np.sqrt(len(x))
        assert abs(x.mean() - exact) <= 4 * se


def test_verify_default_links_pass():
    rep = run_verify(m_max=6)
    assert rep["pass"]
    names = {c["name"] for c in rep["checks"]}
    assert names >= {"isserlis_vs_matching", "size_stability", "odd_moment_vanishes",
                     "moment_bound", "carleman_increasing", "pair_compatibility_finite_n",
                     "gaussian_endpoint", "pattern_order_matters"}


def test_verify_f2_f3_m4():
    rep = run_verify([f2(), f3()], m_max=4, stability_m_max=4)
    assert rep["pass"]
    (c,) = [c for c in rep["checks"] if c["name"] == "pattern_order_matters"]
    assert c["lhs"] == "11/4" and c["rhs"] == "5/2"


def test_verify_gaussian_endpoint_values():
    rep = run_verify([block_circulant(1)], m_max=8)
    got = {c["params"]["m"]: c["lhs"] for c in rep["checks"] if c["name"] == "gaussian_endpoint"}
    assert got == {2: "1", 4: "3", 6: "15", 8: "105"}


def test_concentration_validation():
    with pytest.raises(ConfigError):
        run_concentration(small_cfg(sizes=[16, 32, 64], samples=1))
    with pytest.raises(ConfigError):
        run_concentration(small_cfg(sizes=[16, 32]))


def test_concentration_m0_all_zero():
    rep = run_concentration(small_cfg(sizes=[8, 16, 32], samples=5), m=0)
    assert rep["fourth_central_moments"] == [0.0, 0.0, 0.0]


def test_moment_estimates_m0():
    assert np.all(moment_estimates(np.random.default_rng(0).normal(size=(4, 6)), 0) == 1)


# ------------------------------------------------------------- CLI

def test_cli_link_check(capsys, tmp_path):
    assert main(["link", "check", "--link", "builtin:f3"]) == 0
    assert json.loads(capsys.readouterr().out)["table"] == [[0, 0], [0, 1]]
    bad = tmp_path / "bad.json"
    bad.write_text('{"k":2,"table":[[0,0],[2,1]]}')
    assert main(["link", "check", "--link", str(bad)]) == 2
    assert main(["link", "check", "--link", "builtin:block:2", "--size", "6",
                 "--out", str(tmp_path / "classes.csv")]) == 0
    rows = (tmp_path / "classes.csv").read_text().splitlines()
    assert rows[0] == "i,j,class_id,conjugated,kind" and len(rows) == 37


def test_cli_usage_errors():
    assert main([]) == 2
    assert main(["moments", "mc", "--link", "builtin:block:2", "--sizes", "15"]) == 2
    assert main(["moments", "mc", "--sizes", "x"]) == 2


def test_cli_exact(capsys):
    assert main(["moments", "exact", "--link", "builtin:block:2", "--orders", "4"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["orders"][0]["numerator"] == 9 and rep["method"] == "isserlis"
    assert main(["moments", "exact", "--link", "builtin:block:20", "--orders", "8"]) == 2


def test_cli_sample(tmp_path):
    assert main(["sample", "--link", "builtin:f2", "--size", "8", "--samples", "2",
                 "--kind", "companion", "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "spectra.csv").read_text().splitlines()
    assert lines[0] == "sample_index,eig_index,value" and len(lines) == 17


def test_cli_mc(tmp_path):
    out = tmp_path / "run"
    rc = main(["moments", "mc", "--link", "builtin:block:2", "--sizes", "16,32", "--samples", "10",
               "--orders", "2,4", "--seed", "1", "--out", str(out), "--bins", "10",
               "--range", "-2", "2"])
    assert rc == 0
    assert {p.name for p in out.iterdir()} >= {"config.json", "moments.csv", "histogram.csv",
                                               "report.json", "meta.json"}
    assert len((out / "histogram.csv").read_text().splitlines()) == 11
    assert json.loads((out / "config.json").read_text())["range"] == [-2.0, 2.0]


def test_cli_config_file(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"link": "builtin:f3", "sizes": [8], "samples": 3, "orders": [2]}))
    assert main(["moments", "mc", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 0
    assert json.loads((tmp_path / "o" / "config.json").read_text())["link"] == "builtin:f3"


def test_cli_verify(capsys, tmp_path):
    assert main(["verify", "--link", "builtin:f2", "--m-max", "4", "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "PASS  isserlis_vs_matching" in out and "FAIL" not in out
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["pass"] and report["seed"] == 0


def test_cli_concentration(capsys):
    rc = main(["concentration", "--link", "builtin:block:2", "--sizes", "16,32,64",
               "--samples", "50", "--orders", "0"])
    assert rc == 0
    assert json.loads(capsys.readouterr().out.splitlines()[0])["fourth_central_moments"] == [0, 0, 0]
