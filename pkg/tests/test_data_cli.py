import json
import os
import subprocess
import sys

import numpy as np
import pytest
import scipy.sparse as sp

from dantzig_lp import cli
from dantzig_lp.ablation import VARIANTS, all_optimal, random_subset, run_ablation, run_bench, solve_variant
from dantzig_lp.data import (InstanceSpec, gen_design, gen_ds_instance, gen_fused_instance,
                             generate_instance, lambda_grid, log_grid, read_matrix, read_vector,
                             save_instance, write_matrix, write_vector)
from dantzig_lp.errors import DegenerateColumn, EmptyGrid, InvalidAnchor
from dantzig_lp.fused_prox import differences

from oracles import ds_objective


# -- generation -----------------------------------------------------------------

def test_ds_instance_construction():
    X, y, beta0, e0 = gen_ds_instance(InstanceSpec(n=50, p=120, seed=3))
    assert sp.issparse(X) and X.shape == (50, 120)
    np.testing.assert_allclose(np.sqrt(X.multiply(X).sum(axis=0)).A1, 1.0, atol=1e-12)
    assert np.count_nonzero(beta0) == 10
    np.testing.assert_allclose(e0, y - X @ beta0, atol=1e-12)


def test_bp_instance_noiseless():
    spec = InstanceSpec(kind="bp", n=40, p=100, seed=1)
    X, y, beta0, e0 = gen_ds_instance(spec)
    assert spec.support_size == 8 and np.count_nonzero(beta0) == 8
    assert not e0.any()
    np.testing.assert_array_equal(y, X @ beta0)


def test_sparsification_fraction():
    X = gen_design(500, 5000, pi=0.95, seed=0, normalize=False)
    assert X.nnz <= 0.1 * 500 * 5000


def test_equicorrelation():
    X = gen_design(4000, 6, rho=0.5, seed=2, normalize=False).toarray()
    C = np.corrcoef(X, rowvar=False)
    off = C[~np.eye(6, dtype=bool)]
    assert np.abs(off - 0.5).max() < 0.05


def test_snr_calibration():
    ratios = []
    for seed in range(10):
        X, y, beta0, e0 = gen_ds_instance(InstanceSpec(n=500, p=200, seed=seed))
        ratio = np.var(X @ beta0) / np.var(e0)
        assert 8 <= ratio <= 12
        ratios.append(ratio)
    assert 9 <= np.mean(ratios) <= 11


def test_column_order_independent():
    a = gen_design(20, 10, pi=0.5, seed=9)
    b = gen_design(20, 30, pi=0.5, seed=9)
    assert (a != b[:, :10]).nnz == 0


def test_determinism():
    spec = InstanceSpec(n=30, p=80, rho=0.3, pi=0.4, seed=123)
    a, b = gen_ds_instance(spec), gen_ds_instance(spec)
    assert (a[0] != b[0]).nnz == 0
    for u, v in zip(a[1:], b[1:]):
        np.testing.assert_array_equal(u, v)
    other = gen_ds_instance(InstanceSpec(n=30, p=80, rho=0.3, pi=0.4, seed=124))
    assert not np.array_equal(a[1], other[1])


def test_degenerate_column():
    with pytest.raises(DegenerateColumn):
        gen_design(1, 5, pi=0.9999, seed=0)


def test_invalid_specs():
    for bad in (dict(kind="nope"), dict(rho=1.0), dict(pi=-0.1), dict(snr=0.0), dict(n=0),
                dict(seed=-1)):
        with pytest.raises(ValueError):
            InstanceSpec(**bad)


def test_fused_signal_knots():
    _, _, beta0 = gen_fused_instance(InstanceSpec(kind="fused_signal", n=100, knot_count=3, seed=4))
    assert np.count_nonzero(differences(beta0)[1:]) == 3
    _, y, beta0 = gen_fused_instance(InstanceSpec(kind="fused_signal", n=40, knot_count=0, seed=4))
    assert np.ptp(beta0) == 0.0 and np.isfinite(y).all()


def test_fused_regression_protocol():
    spec = InstanceSpec(kind="fused_regression", n=50, p=200, seed=5)
    X, y, beta0 = gen_fused_instance(spec)
    assert X.shape == (50, 200) and spec.knots == 20
    assert np.count_nonzero(differences(beta0)[1:]) == 20
    assert abs(np.std(X.data) - 1) < 0.05


def test_fused_knots_too_many():
    with pytest.raises(ValueError):
        gen_fused_instance(InstanceSpec(kind="fused_signal", n=5, knot_count=5))


# -- lambda grids ---------------------------------------------------------------

def test_grid_single_value():
    assert list(log_grid(0.1, 2.0, 1)) == [2.0]


def test_grid_log_spacing():
    g = log_grid(0.01, 3.0, 50)
    assert g[0] == 3.0 and g[-1] == 0.01 and np.all(np.diff(g) < 0)
    ratios = g[1:] / g[:-1]
    assert np.ptp(ratios) <= 1e-12


def test_grid_kinds():
    assert lambda_grid("tau", (0.4, 2.5, 10.0), 5)[-1] == pytest.approx(0.4 * 2.5, rel=1e-15)
    assert lambda_grid("path", (1.0, 10.0), 50)[-1] == 2.0
    assert lambda_grid("real", (10.0,), 100)[-1] == pytest.approx(1e-2)
    with pytest.raises(ValueError):
        lambda_grid("other", (1.0,), 3)


def test_grid_errors():
    with pytest.raises(EmptyGrid):
        log_grid(0.1, 1.0, 0)
    with pytest.raises(InvalidAnchor):
        log_grid(-1.0, 1.0, 3)
    with pytest.raises(InvalidAnchor):
        log_grid(2.0, 1.0, 3)
    with pytest.raises(InvalidAnchor):
        lambda_grid("range", (0.0, 1.0), 3)


# -- files ----------------------------------------------------------------------

def test_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    X = sp.random(12, 9, density=0.4, random_state=0, format="csc")
    X.data = rng.standard_normal(X.nnz) * 10.0 ** rng.integers(-8, 8, X.nnz)
    v = rng.standard_normal(15) * 10.0 ** rng.integers(-300, 300, 15)
    write_matrix(tmp_path / "X.mtx", X)
    write_vector(tmp_path / "v.csv", v)
    assert (read_matrix(tmp_path / "X.mtx") != X).nnz == 0
    np.testing.assert_array_equal(read_vector(tmp_path / "v.csv"), v)


def test_save_instance(tmp_path):
    inst = generate_instance(InstanceSpec(n=10, p=20, seed=7))
    paths = save_instance(tmp_path, inst)
    assert set(paths) == {"X", "y", "beta0", "e0"}
    assert (read_matrix(paths["X"]) != inst["X"]).nnz == 0
    np.testing.assert_array_equal(read_vector(paths["y"]), inst["y"])


# -- ablation -------------------------------------------------------------------

def test_random_subset_deterministic():
    a, b = random_subset(3, 100, 7), random_subset(3, 100, 7)
    np.testing.assert_array_equal(a, b)
    assert a.size == 7 and np.unique(a).size == 7


@pytest.mark.parametrize("seed", range(3))
def test_variants_agree(seed):
    spec = InstanceSpec(n=20, p=60, seed=seed)
    X, y, _, e0 = gen_ds_instance(spec)
    lam = 2 * np.abs(X.T @ e0).max()
    ref = ds_objective(X, y, lam)[0]
    for variant in VARIANTS:
        (res,) = run_ablation(spec, variant)
        assert res.status == "optimal"
        assert res.lam == pytest.approx(lam)
        assert res.objective == pytest.approx(ref, rel=1e-6, abs=1e-9)


def test_variant_working_sets():
    X, y, _, e0 = gen_ds_instance(InstanceSpec(n=20, p=60, seed=1))
    lam = 0.5 * np.abs(X.T @ e0).max()
    con = solve_variant(X, y, lam, "constraint_only")
    assert con.J.size == 60 and all(t.n_cols == 60 for t in con.trace)
    col = solve_variant(X, y, lam, "column_only")
    assert col.I.size == 60 and all(t.n_rows == 60 for t in col.trace)
    with pytest.raises(ValueError):
        solve_variant(X, y, lam, "bogus")


def test_bench_sorted_and_threaded(monkeypatch):
    specs = [InstanceSpec(n=15, p=40, seed=s) for s in (2, 1)]
    monkeypatch.setenv("DANTZIG_LP_THREADS", "2")
    res = run_bench(specs, ("full", "lasso_init_cg_cc"))
    assert len(res) == 4 and all_optimal(res)
    keys = [(r.instance["seed"], VARIANTS.index(r.variant)) for r in res]
    assert keys == sorted(keys)
    serial = run_bench(specs, ("full", "lasso_init_cg_cc"), threads=1)
    assert [r.objective for r in serial] == [r.objective for r in res]


# -- command line ---------------------------------------------------------------

def run_cli(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out


def test_cli_ds_grid(capsys):
    code, out = run_cli(["ds", "--n", "20", "--p", "60", "--seed", "1",
                         "--lambda-grid", "5:auto:auto"], capsys)
    assert code == 0
    doc = json.loads(out.out)
    assert doc["schema_version"] == 1 and len(doc["results"]) == 5
    X, y, _, e0 = gen_ds_instance(InstanceSpec(n=20, p=60, seed=1))
    lams = [r["lam"] for r in doc["results"]]
    assert lams[0] == pytest.approx(np.abs(X.T @ y).max())
    assert lams[-1] == pytest.approx(2 * np.abs(X.T @ e0).max())
    for r in doc["results"]:
        assert r["status"] == "optimal"
        assert r["objective"] == pytest.approx(ds_objective(X, y, r["lam"])[0], abs=1e-7)


def test_cli_missing_in_y(tmp_path, capsys):
    write_matrix(tmp_path / "X.mtx", np.eye(3))
    code, out = run_cli(["ds", "--in-x", str(tmp_path / "X.mtx"), "--lambda", "0.1"], capsys)
    assert code == 1
    assert "usage" in out.err and "--in-y" in out.err


def test_cli_bad_flag_exits_1(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["ds", "--bogus"])
    assert exc.value.code == 1


def test_cli_gen_round_trip(tmp_path, capsys):
    out_dir = tmp_path / "d"
    code, out = run_cli(["gen", "--kind", "ds", "--n", "10", "--p", "20", "--seed", "7",
                         "--out", str(out_dir)], capsys)
    assert code == 0
    inst = generate_instance(InstanceSpec(n=10, p=20, seed=7))
    assert (read_matrix(out_dir / "X.mtx") != inst["X"]).nnz == 0
    np.testing.assert_array_equal(read_vector(out_dir / "y.csv"), inst["y"])
    np.testing.assert_array_equal(read_vector(out_dir / "beta0.csv"), inst["beta0"])

    res = tmp_path / "r.json"
    code, _ = run_cli(["ds", "--in-x", str(out_dir / "X.mtx"), "--in-y", str(out_dir / "y.csv"),
                       "--lambda", "0.5", "--out", str(res)], capsys)
    assert code == 0
    r = json.loads(res.read_text())["results"][0]
    assert r["objective"] == pytest.approx(ds_objective(inst["X"], inst["y"], 0.5)[0], abs=1e-7)


def test_cli_variants_and_tau(capsys):
    code, out = run_cli(["ds", "--n", "20", "--p", "60", "--seed", "2", "--tau", "1.0",
                         "--variant", "random_init"], capsys)
    assert code == 0
    (r,) = json.loads(out.out)["results"]
    X, y, _, e0 = gen_ds_instance(InstanceSpec(n=20, p=60, seed=2))
    assert r["lam"] == pytest.approx(np.abs(X.T @ e0).max())
    assert r["variant"] == "random_init"


def test_cli_iteration_limit(capsys):
    code, out = run_cli(["ds", "--n", "30", "--p", "200", "--seed", "3", "--tau", "0.3",
                         "--variant", "random_init", "--max-outer", "1"], capsys)
    assert code == 2
    assert json.loads(out.out)["results"][0]["status"] == "iteration_limit"


def test_cli_bp(capsys):
    code, out = run_cli(["bp", "--n", "20", "--p", "50", "--seed", "0"], capsys)
    assert code == 0
    (r,) = json.loads(out.out)["results"]
    assert r["max_constraint_violation"] <= 1e-8 * 10


def test_cli_fused(capsys):
    code, out = run_cli(["fused", "--kind", "fused_signal", "--n", "40", "--seed", "0",
                         "--lambda-grid", "3:auto:auto"], capsys)
    assert code == 0 and len(json.loads(out.out)["results"]) == 3
    code, out = run_cli(["fused", "--kind", "fused_regression", "--n", "25", "--p", "15",
                         "--seed", "0", "--lambda", "1.0"], capsys)
    assert code == 0
    assert json.loads(out.out)["results"][0]["variant"] == "fused_regression"
    code, _ = run_cli(["fused", "--n", "20"], capsys)
    assert code == 1


def test_cli_bench(capsys):
    code, out = run_cli(["bench", "--n", "15", "--p", "40", "--seeds", "2",
                         "--variant", "full", "--variant", "column_only", "--threads", "1"],
                        capsys)
    assert code == 0
    res = json.loads(out.out)["results"]
    assert len(res) == 4
    for seed in (0, 1):
        objs = [r["objective"] for r in res if r["instance"]["seed"] == seed]
        assert objs[0] == pytest.approx(objs[1], rel=1e-6)


def test_console_script_module():
    out = subprocess.run([sys.executable, "-m", "dantzig_lp.cli", "bp", "--n", "10", "--p", "20"],
                         capture_output=True, text=True, env=dict(os.environ))
    assert out.returncode == 0
    assert json.loads(out.stdout)["command"] == "bp"
