import random

import pytest

from resplan.actions import canonical_catalog
from resplan.errors import DimensionMismatchError, LengthMismatchError
from resplan.plans import (
    BinaryPlan,
    MissingManualError,
    PlanNotFoundError,
    compare_to_manual,
    extract_binary_plan,
    load_score_table_csv,
    render_plan,
    score_plan,
    score_breakdown,
)
from resplan.topsis import catalog_matrix, derive_action_weights


@pytest.fixture(scope="module")
def weights():
    return derive_action_weights(catalog_matrix(canonical_catalog()))


def test_extract_clean_bracketed_list():
    plan = extract_binary_plan("Final plan: [1, 0, 1, 1, 0]", 5)
    assert plan.bits == (1, 0, 1, 1, 0)


def test_extract_wrong_length_reports_found_lengths():
    text = "Plan: [" + ", ".join("10" * 12) + "]"  # 24 alternating bits
    with pytest.raises(LengthMismatchError) as err:
        extract_binary_plan(text, 10)
    assert err.value.found_lengths == [24]
    assert err.value.expected == 10


def test_extract_from_fenced_code_block():
    text = (
        "The incident is minor, so only warning measures apply.\n"
        "```python\nplan = [0, 1, 1, 0, 1, 1, 1, 0, 0, 1]\n```\n"
    )
    plan = extract_binary_plan(text, 10)
    assert plan.bits == (0, 1, 1, 0, 1, 1, 1, 0, 0, 1)


def test_extract_prefers_last_matching_vector():
    text = "Draft: [1, 1, 1, 1, 1]\nCorrected: [0, 0, 1, 1, 0]"
    assert extract_binary_plan(text, 5).bits == (0, 0, 1, 1, 0)


def test_extract_ignores_shorter_interleaved_lists():
    text = "First two actions: [1, 0]. Full vector: [1, 0, 1, 1, 0, 1, 0, 1, 0, 1]"
    assert extract_binary_plan(text, 10).bits == (1, 0, 1, 1, 0, 1, 0, 1, 0, 1)


def test_extract_not_found_on_prose():
    with pytest.raises(PlanNotFoundError):
        extract_binary_plan("Deploy the response vehicle and notify EMS.", 10)


def test_extract_never_treats_lone_digits_as_vectors():
    with pytest.raises(PlanNotFoundError):
        extract_binary_plan("reduce the action count to 0 and wait", 10)


def test_extract_requires_positive_length():
    with pytest.raises(ValueError):
        extract_binary_plan("[1]", 0)


def test_render_round_trip_examples():
    for bits in [(1,), (0, 1), (1, 0, 1, 1, 0, 1, 0, 1, 0, 1)]:
        assert extract_binary_plan(render_plan(bits), len(bits)).bits == bits


def test_binary_plan_invariants():
    with pytest.raises(ValueError):
        BinaryPlan(bits=(), source="x")
    with pytest.raises(ValueError):
        BinaryPlan(bits=(0, 2), source="x")


def test_score_reference_spot_checks(weights):
    near_complete = BinaryPlan(bits=(1, 1, 1, 1, 1, 1, 1, 1, 0, 1), source="t")
    assert score_plan(near_complete, weights) == pytest.approx(4.97, abs=0.01)
    all_ones = BinaryPlan(bits=(1,) * 10, source="t")
    assert score_plan(all_ones, weights) == pytest.approx(5.16, abs=0.01)


def test_score_empty_plan_is_zero(weights):
    assert score_plan(BinaryPlan(bits=(0,) * 10, source="t"), weights) == 0.0


def test_score_dimension_mismatch(weights):
    with pytest.raises(DimensionMismatchError):
        score_plan(BinaryPlan(bits=(1, 0), source="t"), weights)


def test_score_additive_over_disjoint_supports(weights):
    rng = random.Random(7)
    for _ in range(50):
        mask = [rng.randint(0, 1) for _ in range(10)]
        a = BinaryPlan(bits=tuple(mask), source="a")
        b = BinaryPlan(bits=tuple(1 - m for m in mask), source="b")
        union = BinaryPlan(bits=(1,) * 10, source="u")
        assert score_plan(a, weights) + score_plan(b, weights) == pytest.approx(
            score_plan(union, weights)
        )


def test_score_monotone_in_added_actions(weights):
    rng = random.Random(11)
    for _ in range(50):
        bits = [rng.randint(0, 1) for _ in range(10)]
        base = score_plan(BinaryPlan(bits=tuple(bits), source="t"), weights)
        zeros = [i for i, b in enumerate(bits) if b == 0]
        if not zeros:
            continue
        bits[rng.choice(zeros)] = 1
        assert score_plan(BinaryPlan(bits=tuple(bits), source="t"), weights) >= base


def test_score_breakdown_contract(weights):
    plan = BinaryPlan(bits=(1,) + (0,) * 9, source="t")
    rows = score_breakdown(plan, weights)
    assert rows[0] == {
        "index": 0,
        "name": "Deploy IRV",
        "weight": weights.weights[0],
        "included": True,
    }
    assert all(not row["included"] for row in rows[1:])


def test_compare_to_manual_identical_column_is_zero():
    table = {"i1": {"m": 2.0, "Manual solution": 2.0}}
    report = compare_to_manual(table)
    assert report.averages()["m"] == 0.0
    assert report.averages()["Manual solution"] == 0.0


def test_compare_to_manual_arithmetic_mean():
    table = {
        "i1": {"m": 3.0, "Manual solution": 2.0},
        "i2": {"m": 5.0, "Manual solution": 2.0},
    }
    assert compare_to_manual(table).averages()["m"] == 2.0


def test_compare_to_manual_missing_manual():
    with pytest.raises(MissingManualError):
        compare_to_manual({"i1": {"m": 1.0}})


def test_compare_reference_fixture_averages():
    from resplan.config import data_path

    table = load_score_table_csv(data_path("model_scores.csv"))
    report = compare_to_manual(table)
    averages = report.averages()
    assert averages["GPT-4"] == pytest.approx(0.68, abs=0.005)
    assert averages["GPT-4o"] == pytest.approx(1.16, abs=0.005)
    assert averages["Gemini 1.5 Flash"] == pytest.approx(1.15, abs=0.005)
    assert averages["Gemini 1.5 Pro"] == pytest.approx(1.52, abs=0.005)


def test_score_report_csv_layout():
    table = {
        "i1": {"m": 3.0, "Manual solution": 2.0},
        "i2": {"m": 5.0, "Manual solution": 2.0},
    }
    lines = compare_to_manual(table).to_csv().splitlines()
    assert lines[0] == "incident,m,Manual solution"
    assert lines[1] == "i1,3.00,2.00"
    assert lines[-1] == "Average Difference,2.00,0.00"


def test_load_score_table_skips_summary_row(tmp_path):
    path = tmp_path / "scores.csv"
    path.write_text(
        "incident,m,Manual solution\ni1,1.0,1.0\nAverage Difference,0.0,0.0\n"
    )
    assert list(load_score_table_csv(path)) == ["i1"]
