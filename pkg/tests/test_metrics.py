import logging
import random

import pytest

from resplan.metrics import (
    DegenerateBoundsError,
    EmptyOutcomesError,
    EmptyTraceError,
    MeasureSpec,
    MissingMeasureError,
    Objective,
    Orientation,
    StrategyOutcome,
    VehicleRecord,
    aggregate_measures,
    best_outcome,
    derive_bounds,
    evaluate_strategies,
    heuristic_score,
    load_measure_specs,
    outcomes_to_csv,
    read_trace_csv,
    read_tripinfo_xml,
)

from .oracles import aggregation_oracle


def vehicle(i, speed, wait=5.0, loss=20.0, travel=300.0):
    return VehicleRecord(f"v{i}", speed, wait, loss, travel)


def test_aggregate_mean_speed():
    trace = [vehicle(0, 10), vehicle(1, 20), vehicle(2, 30)]
    assert aggregate_measures(trace)["V_avg"] == 20.0


def test_aggregate_single_vehicle_identity():
    record = VehicleRecord("v0", 42.0, 3.0, 9.0, 120.0)
    values = aggregate_measures([record])
    assert values == {"V_avg": 42.0, "W_avg": 3.0, "TL_avg": 9.0, "MT_trav": 120.0}


def test_aggregate_empty_trace():
    with pytest.raises(EmptyTraceError):
        aggregate_measures([])


def test_aggregate_matches_oracle_on_synthetic_trace():
    rng = random.Random(23)
    rows = [
        (rng.uniform(0, 130), rng.uniform(0, 100), 0.0, rng.uniform(60, 1200))
        for _ in range(100)
    ]
    rows = [(s, w, w + rng.uniform(0, 200), t) for s, w, _, t in rows]
    trace = [VehicleRecord(f"v{i}", *row) for i, row in enumerate(rows)]
    values = aggregate_measures(trace)
    expected = aggregation_oracle(rows)
    for name, exp in zip(("V_avg", "W_avg", "TL_avg", "MT_trav"), expected):
        assert values[name] == pytest.approx(exp, abs=1e-9)


def test_vehicle_record_invariants():
    with pytest.raises(ValueError):
        VehicleRecord("v", -1.0, 0.0, 0.0, 10.0)
    with pytest.raises(ValueError):
        VehicleRecord("v", 10.0, 50.0, 20.0, 10.0)  # waiting > time loss
    with pytest.raises(ValueError):
        VehicleRecord("v", 10.0, 0.0, 0.0, 0.0)  # zero travel time


def test_heuristic_all_lower_bounds_is_zero():
    specs = [
        MeasureSpec("V_avg", 0.6, 0.0, 100.0),
        MeasureSpec("W_avg", 0.4, 10.0, 600.0),
    ]
    assert heuristic_score({"V_avg": 0.0, "W_avg": 10.0}, specs) == 0.0


def test_heuristic_all_upper_bounds_saturates():
    specs = [
        MeasureSpec("V_avg", 0.5, 0.0, 100.0),
        MeasureSpec("W_avg", 0.5, 0.0, 600.0),
    ]
    assert heuristic_score({"V_avg": 100.0, "W_avg": 600.0}, specs) == 1.0


def test_heuristic_mixed_orientation_hand_value():
    specs = [
        MeasureSpec("V_avg", 0.6, 0.0, 100.0, Orientation.BENEFIT),
        MeasureSpec("W_avg", 0.4, 0.0, 600.0, Orientation.COST),
    ]
    h = heuristic_score({"V_avg": 50.0, "W_avg": 150.0}, specs)
    assert h == pytest.approx(0.6 * 0.5 + 0.4 * 0.75)
    assert h == pytest.approx(0.6)


def test_heuristic_clamps_out_of_range_with_warning(caplog):
    specs = [MeasureSpec("V_avg", 1.0, 0.0, 100.0)]
    with caplog.at_level(logging.WARNING):
        h = heuristic_score({"V_avg": 180.0}, specs)
    assert h == 1.0
    assert "clamping" in caplog.text


def test_heuristic_missing_measure():
    with pytest.raises(MissingMeasureError):
        heuristic_score({}, [MeasureSpec("V_avg", 1.0, 0.0, 1.0)])


def test_degenerate_bounds_rejected():
    with pytest.raises(DegenerateBoundsError):
        MeasureSpec("V_avg", 1.0, 5.0, 5.0)


def outcome(sid, h):
    return StrategyOutcome(sid, {}, h)


def test_best_outcome_argmax_and_argmin():
    outcomes = [outcome("s0", 0.2), outcome("s1", 0.9), outcome("s2", 0.5)]
    assert best_outcome(outcomes, Objective.MAXIMIZE) == "s1"
    assert best_outcome(outcomes, Objective.MINIMIZE) == "s0"


def test_best_outcome_tie_breaks_to_lowest_index():
    assert best_outcome([outcome("s0", 0.5), outcome("s1", 0.5)]) == "s0"


def test_best_outcome_empty():
    with pytest.raises(EmptyOutcomesError):
        best_outcome([])


def test_evaluate_strategies_and_csv():
    specs = [
        MeasureSpec("V_avg", 0.5, 0.0, 100.0, Orientation.BENEFIT),
        MeasureSpec("W_avg", 0.5, 0.0, 100.0, Orientation.COST),
        MeasureSpec("TL_avg", 0.0, 0.0, 1000.0, Orientation.COST),
        MeasureSpec("MT_trav", 0.0, 0.0, 4000.0, Orientation.COST),
    ]
    traces = {
        "baseline": [vehicle(0, 30, wait=50.0, loss=60.0)],
        "managed": [vehicle(0, 60, wait=10.0, loss=15.0)],
    }
    outcomes = evaluate_strategies(traces, specs)
    assert best_outcome(outcomes) == "managed"
    csv_text = outcomes_to_csv(outcomes, specs)
    assert csv_text.splitlines()[0] == "strategy_id,V_avg,W_avg,TL_avg,MT_trav,H,weight_total"
    assert len(csv_text.splitlines()) == 3


def test_derive_bounds_fallback(caplog):
    with caplog.at_level(logging.WARNING):
        spec = derive_bounds([{"V_avg": 10.0}, {"V_avg": 40.0}], "V_avg", 1.0)
    assert (spec.lower_bound, spec.upper_bound) == (10.0, 40.0)
    assert "deriving bounds" in caplog.text


def test_trace_csv_round_trip(tmp_path):
    path = tmp_path / "trace.csv"
    path.write_text(
        "vehicle_id,speed,waiting_time,time_loss,total_travel_time\n"
        "v0,30.5,4.0,10.0,200.0\nv1,55.0,0.0,2.5,120.0\n"
    )
    trace = read_trace_csv(path)
    assert [r.vehicle_id for r in trace] == ["v0", "v1"]
    assert trace[0].speed == 30.5


def test_trace_csv_missing_columns(tmp_path):
    path = tmp_path / "trace.csv"
    path.write_text("vehicle_id,speed\nv0,30\n")
    with pytest.raises(ValueError, match="missing columns"):
        read_trace_csv(path)


def test_tripinfo_xml_adapter(tmp_path):
    path = tmp_path / "tripinfo.xml"
    path.write_text(
        '<tripinfos><tripinfo id="v0" duration="100" routeLength="1000" '
        'waitingTime="5" timeLoss="12"/></tripinfos>'
    )
    records = read_tripinfo_xml(path)
    assert records[0].speed == pytest.approx(36.0)  # 10 m/s -> km/h
    assert records[0].total_travel_time == 100.0


def test_load_measure_specs_fixture():
    from resplan.config import data_path

    specs = load_measure_specs(data_path("measure_specs.json"))
    assert [s.name for s in specs] == ["V_avg", "W_avg", "TL_avg", "MT_trav"]
    assert specs[1].orientation is Orientation.COST
