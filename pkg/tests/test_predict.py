import json
import random

import pytest

from fspgen.predict import (
    EmptyEvalError,
    LogitsRecord,
    MissingGoldLabelError,
    constrained_predict,
    evaluate,
    format_report,
    read_logits,
)


def brute_force_prefix_argmax(logits, n_l):
    # Independent oracle: scan the prefix, keep the first maximum.
    best_index, best_value = 0, logits[0]
    for i in range(1, n_l):
        if logits[i] > best_value:
            best_index, best_value = i, logits[i]
    return best_index


def test_prefix_masks_global_max():
    assert constrained_predict([2.0, 1.0, 3.5], 2) == 0


def test_single_logit():
    assert constrained_predict([0.1], 1) == 0


def test_ties_break_low():
    assert constrained_predict([1.0, 1.0, 1.0], 3) == 0
    assert constrained_predict([0.0, 2.0, 2.0], 3) == 1


def test_matches_brute_force_oracle():
    rng = random.Random(7)
    for _ in range(1000):
        logits = [rng.uniform(-5, 5) for _ in range(20)]
        assert constrained_predict(logits, 14) == brute_force_prefix_argmax(logits, 14)


def test_prediction_always_in_range():
    rng = random.Random(8)
    for _ in range(500):
        logits = [rng.gauss(0, 3) for _ in range(20)]
        for n_l in range(1, 21):
            assert constrained_predict(logits, n_l) < n_l


def test_shift_and_scale_invariance():
    rng = random.Random(9)
    for _ in range(200):
        logits = [rng.uniform(-2, 2) for _ in range(20)]
        base = constrained_predict(logits, 11)
        shift = rng.uniform(-100, 100)
        scale = rng.uniform(0.01, 50)
        assert constrained_predict([x + shift for x in logits], 11) == base
        assert constrained_predict([x * scale for x in logits], 11) == base


def test_raising_winner_keeps_prediction():
    rng = random.Random(10)
    for _ in range(200):
        logits = [rng.uniform(-2, 2) for _ in range(10)]
        winner = constrained_predict(logits, 10)
        logits[winner] += rng.uniform(0, 5)
        assert constrained_predict(logits, 10) == winner


def test_n_l_bounds_checked():
    with pytest.raises(ValueError):
        constrained_predict([1.0, 2.0], 0)
    with pytest.raises(ValueError):
        constrained_predict([1.0, 2.0], 3)


def test_evaluate_perfect_predictions():
    records = [
        LogitsRecord(f"s{i}", [1.0 if j == i % 3 else 0.0 for j in range(20)], i % 3)
        for i in range(30)
    ]
    report = evaluate(records, 3)
    assert report.accuracy == 1.0
    assert report.n_examples == 30
    assert report.per_class_accuracy == [1.0, 1.0, 1.0]


def test_evaluate_random_logits_binomial_band():
    # Uniform-random logits on a balanced binary task land near 0.5; 10k trials
    # put 4 sigma at 0.02.
    rng = random.Random(11)
    records = [
        LogitsRecord(f"s{i}", [rng.random() for _ in range(20)], i % 2)
        for i in range(10_000)
    ]
    report = evaluate(records, 2)
    assert abs(report.accuracy - 0.5) < 0.02


def test_evaluate_empty_stream():
    with pytest.raises(EmptyEvalError):
        evaluate([], 2)


def test_evaluate_missing_gold_names_sample():
    records = [LogitsRecord("good", [1.0, 0.0], 0), LogitsRecord("bad-rec", [1.0, 0.0])]
    with pytest.raises(MissingGoldLabelError, match="bad-rec"):
        evaluate(records, 2)


def test_evaluate_gold_out_of_range():
    with pytest.raises(ValueError, match="out of range"):
        evaluate([LogitsRecord("s", [1.0, 0.0, 3.0], 2)], 2)


def test_evaluate_per_class_counts():
    records = [
        LogitsRecord("a", [1.0, 0.0], 0),   # correct
        LogitsRecord("b", [1.0, 0.0], 1),   # wrong
        LogitsRecord("c", [0.0, 1.0], 1),   # correct
    ]
    report = evaluate(records, 2)
    assert report.per_class_counts == [1, 2]
    assert report.per_class_accuracy == [1.0, 0.5]
    assert report.accuracy == pytest.approx(2 / 3)


def test_read_logits_round_trip(tmp_path):
    path = tmp_path / "logits.jsonl"
    rows = [
        {"sample_id": "x1", "logits": [0.5, -1.0, 2.0], "gold_label": 2},
        {"sample_id": "x2", "logits": [1.5, 0.0, 0.0], "gold_label": 0},
    ]
    path.write_text("\n".join(json.dumps(r) for r in rows) + "\n", encoding="utf-8")
    records = list(read_logits(path))
    assert [r.sample_id for r in records] == ["x1", "x2"]
    assert records[0].logits == [0.5, -1.0, 2.0]
    assert records[1].gold_label == 0


def test_read_logits_rejects_malformed(tmp_path):
    path = tmp_path / "logits.jsonl"
    path.write_text('{"sample_id": "x", "gold_label": 1}\n', encoding="utf-8")
    with pytest.raises(ValueError, match="line 1"):
        list(read_logits(path))


def test_format_report_table():
    report = evaluate([LogitsRecord("a", [1.0, 0.0], 0)], 2)
    table = format_report(report)
    assert "accuracy: 1.0000" in table
    assert "class" in table
