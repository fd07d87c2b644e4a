import json

import pytest

import homoperc


def test_betti_numbers():
    assert homoperc.betti_numbers("cubical", d=3, N=3, q=3) == [1, 3, 3, 1]
    assert homoperc.betti_numbers("permutohedral", d=2, N=4, q=2) == [1, 2, 1]


def test_validate_names_the_field_rule():
    assert any("char(F) ≠ 2" in v for v in homoperc.validate("cubical", q=2))
    assert any("char(F) ∤ d+1" in v for v in homoperc.validate("permutohedral", d=2, N=4, q=3))
    assert homoperc.validate("cubical", d=4, i=2, N=4, q=3) == []
    assert homoperc.effective_field("permutohedral", d=2) == 2


def test_invalid_model_raises():
    with pytest.raises(ValueError):
        homoperc.Model("cubical", d=2, i=1, N=8, q=2)


def test_duality_and_extremes():
    m = homoperc.Model("cubical", d=2, i=1, N=6, q=3)
    assert m.units == 72
    for seed in range(20):
        s = m.sample(0.5, seed=seed)
        assert s["rank_phi"] + s["rank_psi"] == 2
    assert m.rank_phi([0] * m.units) == 0
    assert m.rank_phi([1] * m.units) == 2


def test_critical_pair_is_ordered_and_reproducible():
    a = homoperc.critical_pair("cubical", d=2, i=1, N=8, seed=5)
    b = homoperc.critical_pair("cubical", d=2, i=1, N=8, seed=5, method="bisect")
    assert a == b
    assert 0.0 < a[0] <= a[1] <= 1.0


def test_run_trials_threads_do_not_change_results():
    one = homoperc.run_trials("permutohedral", d=2, i=1, N=8, trials=12, seed=3)
    four = homoperc.run_trials("permutohedral", d=2, i=1, N=8, trials=12, seed=3, threads=4)
    assert one == four
    assert len(one) == 12


def test_run_experiment_outputs():
    code, csv = homoperc.run_experiment("audit", d=2, N=6, q=3, p=[0.5], trials=10)
    assert code == 0
    lines = csv.strip().split("\n")
    assert lines[0].startswith("model,d,i,N,q,seed,trial,p")
    assert len(lines) == 11
    code, text = homoperc.run_experiment("threshold", d=2, N=16, trials=5, format="json")
    report = json.loads(text)
    assert report["schema_version"] == 1
    assert report["config"]["trials"] == 5
    assert len(report["rows"]) == 5
