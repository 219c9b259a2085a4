import numpy as np
import pytest
from scipy.spatial.distance import cdist

from greedy_inverse.errors import DivisionByZero, DuplicateNodes, ValidationError
from greedy_inverse.fourier import ImageGrid, ndft_forward
from greedy_inverse.greedy import SelectionResult
from greedy_inverse.landweber import LandweberConfig
from greedy_inverse.pipeline import (
    Experiment,
    ExperimentConfig,
    chi2,
    chi2_sq,
    mre,
    reconstruct,
    rmse,
    run_experiment,
)
from greedy_inverse.simulation import Visibilities, fixture


def small(name="single", **kw):
    base = dict(source=fixture(name), source_name=name, n_frequencies=120, n_select=24, image_size=64,
                landweber=LandweberConfig(max_iters=60))
    base.update(kw)
    return ExperimentConfig(**base)


# ---- metrics

def test_metrics_zero_on_exact_prediction():
    vis = Visibilities(np.zeros((3, 2)), [1 + 1j, 2, -3j], 0.1)
    for f in (chi2, chi2_sq, rmse, mre):
        assert f(vis, vis.values) == 0.0


def test_metrics_single_sample():
    vis = Visibilities([[0.0, 0.0]], [3 + 4j], 0.5)
    pred = [3 + 4j + 0.6 - 0.8j]  # residual modulus 1
    assert chi2(vis, pred) == pytest.approx(1 / 0.25)
    assert chi2_sq(vis, pred) == pytest.approx(1 / 0.25)
    assert rmse(vis, pred) == pytest.approx(1.0)
    assert mre(vis, pred) == pytest.approx(1 / 5)


def test_metrics_hand_oracle():
    y = [1 + 0j, 0 + 2j, -1 - 1j, 3 + 0j, 0.5 + 0.5j]
    p = [1.1 + 0j, 0 + 1.8j, -1 - 1j, 2.5 + 0.5j, 0.5 + 0j]
    s = [0.1, 0.2, 0.1, 0.5, 0.25]
    vis = Visibilities(np.zeros((5, 2)), y, s)
    res = [abs(a - b) for a, b in zip(y, p)]
    # written out term by term
    want_chi2 = (res[0] / s[0] ** 2 + res[1] / s[1] ** 2 + res[2] / s[2] ** 2 + res[3] / s[3] ** 2
                 + res[4] / s[4] ** 2) / 5
    want_rmse = ((res[0] ** 2 + res[1] ** 2 + res[2] ** 2 + res[3] ** 2 + res[4] ** 2) / 5) ** 0.5
    want_mre = (res[0] / abs(y[0]) + res[1] / abs(y[1]) + res[2] / abs(y[2]) + res[3] / abs(y[3])
                + res[4] / abs(y[4])) / 5
    assert chi2(vis, p) == pytest.approx(want_chi2, rel=1e-12)
    assert rmse(vis, p) == pytest.approx(want_rmse, rel=1e-12)
    assert mre(vis, p) == pytest.approx(want_mre, rel=1e-12)
    assert chi2_sq(vis, p) == pytest.approx(sum(r * r / q**2 for r, q in zip(res, s)) / 5, rel=1e-12)


def test_mre_zero_visibility():
    vis = Visibilities(np.zeros((2, 2)), [0, 1], 1.0)
    with pytest.raises(DivisionByZero):
        mre(vis, [0.1, 1])


def test_metrics_length_mismatch():
    with pytest.raises(ValidationError):
        rmse(Visibilities(np.zeros((2, 2)), [1, 1], 1.0), [1])


# ---- configuration

def test_config_validation():
    with pytest.raises(ValidationError):
        ExperimentConfig(residual_forward="cheap")
    with pytest.raises(ValidationError):
        ExperimentConfig(r_max=0.6)
    with pytest.raises(ValidationError):
        ExperimentConfig(image_size=63)


def test_grid_matches_frequency_disk():
    exp = Experiment(small())
    assert exp.grid.r_max == pytest.approx(np.hypot(*exp.vis.xi.T).max())
    assert np.all(np.hypot(*exp.grid.points().T) <= exp.r_max + 1e-15)


# ---- reconstruction

def test_all_points_beats_zero_image():
    exp = Experiment(small(noise_level=0.0))
    _, rep = reconstruct(exp, "all")
    zero = ndft_forward(ImageGrid.zeros(64), exp.vis.xi)
    assert rep.rmse < rmse(exp.vis, zero)
    assert rep.n_used == 120


def test_full_selection_equals_all_points():
    exp = Experiment(small())
    everything = SelectionResult(list(range(120)), [0.0] * 120, "error")
    img_a, a = reconstruct(exp, "all")
    img_b, b = reconstruct(exp, everything)
    assert np.array_equal(img_a.pixels, img_b.pixels)
    assert (a.chi2, a.rmse, a.mre, a.n_used) == (b.chi2, b.rmse, b.mre, b.n_used)


def test_bad_selection_indices():
    exp = Experiment(small())
    with pytest.raises(ValidationError):
        reconstruct(exp, SelectionResult([0, 500], [1, 1], "error"))


def test_failure_stage_recorded():
    exp = Experiment(small())
    dup = Visibilities(np.vstack([exp.vis.xi[:3], exp.vis.xi[:1]]), np.ones(4), 1.0)
    exp.vis = dup
    with pytest.raises(DuplicateNodes) as info:
        exp.image_from([0, 3])
    assert info.value.stage == "interpolate"


def test_error_order_independent_of_source():
    a = Experiment(small("single")).select("error")
    b = Experiment(small("double")).select("error")
    assert a.order == b.order


def test_noiseless_residual_trace_positive():
    exp = Experiment(small(noise_level=0.0, residual_forward="proxy"))
    sel = exp.select("residual")
    assert len(sel) == 24
    assert min(sel.indicator_trace) > 0


def test_run_is_deterministic():
    a = run_experiment(small("double", residual_forward="proxy"))
    b = run_experiment(small("double", residual_forward="proxy"))
    assert a.table() == b.table()
    assert a.selections["residual"].order == b.selections["residual"].order


def test_external_visibilities_are_used():
    exp = Experiment(small())
    shifted = Visibilities(exp.vis.xi, exp.vis.values * 2, exp.vis.sigma)
    other = Experiment(small(), visibilities=shifted)
    assert np.array_equal(other.vis.values, 2 * exp.vis.values)


# ---- the full-size single-source run

@pytest.fixture(scope="module")
def single_run():
    return run_experiment(ExperimentConfig(source=fixture("single")))


def test_run_experiment_block(single_run):
    assert [single_run.reports[m].n_used for m in ("all", "error", "residual")] == [400, 80, 80]
    for row in single_run.table():
        assert all(np.isfinite(row[k]) and row[k] >= 0 for k in ("chi2", "chi2_sq", "rmse", "mre"))


def test_error_based_within_twice_all_points(single_run):
    assert single_run.reports["error"].rmse <= 2 * single_run.reports["all"].rmse


def test_error_selection_is_spread_out(single_run):
    xi = single_run.experiment.vis.xi
    fill = lambda idx: cdist(xi, xi[idx]).min(axis=1).max()
    chosen = fill(single_run.selections["error"].order)
    rng = np.random.default_rng(0)
    best_random = min(fill(rng.choice(400, 80, replace=False)) for _ in range(1000))
    assert chosen <= 3 * best_random
    assert chosen <= best_random
