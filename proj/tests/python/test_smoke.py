import math

import pytest

import nulltube


def test_builtins_listed():
    assert {"minkowski", "minkowski_shifted", "schwarzschild_kruskal"} <= set(nulltube.builtin_charts())
    assert len(nulltube.builtin_tubes()) >= 3


def test_minkowski_metric():
    c = nulltube.Chart("minkowski", {})
    g = c.metric([1.0, 3.0, 1.2, 0.4])
    assert g[0][1] == pytest.approx(2.0)
    assert g[2][2] == pytest.approx(16.0)
    assert g[3][3] == pytest.approx(16.0 * math.sin(1.2) ** 2)


def test_identities():
    c = nulltube.Chart("schwarzschild_kruskal", {"M": 1.0})
    p = [0.3, 0.8, 1.0, 0.5]
    assert c.scacs_residual(p) < 1e-8
    assert c.lie_b_residual(p) < 1e-8
    assert c.raychaudhuri_residual(p) < 1e-6


def test_oracle_agreement():
    d = nulltube.compare_with_oracle(nulltube.Chart("minkowski", {}), grid=64)
    assert d["max"] < 1e-6


def test_horizon():
    c = nulltube.Chart("schwarzschild", {})
    d = nulltube.find_marginal(c, 0.5, -0.4, 0.4, incoming=True)
    assert max(abs(r) for r in d["roots"]) < 1e-10


def test_no_marginal_surface():
    with pytest.raises(nulltube.SolverError):
        nulltube.find_marginal(nulltube.Chart("minkowski", {}), 2.0, 1.0, 9.0)


def test_tube_verdict():
    r = nulltube.verify_tube("null-hyperplane", levels=2, bumps=1)
    assert r["class"] == "null"
    assert r["all_sections_marginal"]
    assert r["theorem_consistent"]


def test_config_error():
    with pytest.raises(nulltube.ConfigError):
        nulltube.Chart("nope", {})
    assert issubclass(nulltube.ConfigError, nulltube.NulltubeError)


def test_cli():
    code, out, err = nulltube.run_cli(["chart-info", "--chart", "minkowski"])
    assert code == 0 and '"schema": 1' in out
    code, _, err = nulltube.run_cli(["surface", "--grid", "17"])
    assert code == 2 and "power of two" in err
