"""End-to-end smoke of the python bindings on a small synthetic farm."""

import json
import math

import pytest

import wtpc


@pytest.fixture(scope="module")
def pipeline():
    data, truth_json = wtpc.simulate(seed=11, n=4000)
    truth = json.loads(truth_json)
    base, chosen_m, sweep = wtpc.select(data, model_class="spline", grid=list(range(8, 21)))
    enhanced = wtpc.enhance(base, data, mode="both")
    profile = wtpc.build_profile(enhanced, data)
    dynamic = wtpc.fit_dynamic(enhanced, profile, data, q1=1, q2=0)
    return data, truth, base, chosen_m, sweep, enhanced, profile, dynamic


def test_selection_lands_on_a_reasonable_order(pipeline):
    _, _, _, chosen_m, sweep, _, _, _ = pipeline
    assert 8 <= chosen_m <= 20
    assert any(m == chosen_m for m, _, _ in sweep)
    for _, mse, bic in sweep:
        assert mse > 0 and math.isfinite(bic)


def test_dynamic_forecasts_beat_the_static_model_at_one_step(pipeline):
    data, _, base, _, _, enhanced, profile, dynamic = pipeline
    static_mse = wtpc.mse(enhanced, data)
    one_step = wtpc.mse_at_horizon(dynamic, data, h_minutes=10.0)
    assert one_step < static_mse
    assert wtpc.mse(base, data) > 0


def test_predictions_carry_positive_variance(pipeline):
    data, _, _, _, _, _, _, dynamic = pipeline
    preds = wtpc.predict_power(
        dynamic, data, [5.4, 9.0, 12.2], [0.0, 10.0, -5.0], [8.0, 9.0, 10.0]
    )
    assert len(preds) == 3
    for mean, var in preds:
        assert var > 0
        assert 0 <= mean < 4000


def test_coverage_is_near_nominal(pipeline):
    data, _, _, _, _, _, _, dynamic = pipeline
    holdout, _ = wtpc.simulate(seed=12, n=4000)
    cov = wtpc.coverage_audit(dynamic, holdout, level=0.95, history=data)
    assert 0.90 <= cov <= 0.99


def test_truth_metadata_round_trips(pipeline):
    _, truth, _, _, _, _, _, _ = pipeline
    assert truth["seed"] == 11
    assert truth["arma"]["sigma_eps2"] > 0


def test_errors_surface_as_the_bound_exception():
    with pytest.raises(wtpc.WtpcError):
        wtpc.load_scada("/nonexistent/path.csv")
