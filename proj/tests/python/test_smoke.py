import json

import pytest

import ensemble_instruct as ei


def test_tokenize_and_rouge():
    assert ei.tokenize("Sort the List, please!") == ["sort", "the", "list", "please"]
    assert ei.lcs_length(["a", "b", "c", "d"], ["a", "c", "d", "b"]) == 3
    s = ei.rouge_l("a b c d", "a c d b")
    assert s["f1"] == pytest.approx(0.75)
    assert ei.rouge_l("", "anything")["f1"] == 0.0


def test_novelty():
    assert ei.is_novel("translate this to french", ["sort a list of numbers"])
    assert not ei.is_novel("sort a list of numbers", ["Sort a list of numbers."])


def test_parse_instance():
    ok = ei.parse_instance("[5, 1]\noutput: [1, 5]\n|EoS|", "A", "Sort the list.")
    assert ok == {"ok": True, "instruction": "Sort the list.", "input": "[5, 1]", "output": "[1, 5]"}
    bad = ei.parse_instance("[5, 1]", "A")
    assert bad == {"ok": False, "reason": "missing_output"}


def test_ensemble_select():
    o1 = "[-4, 2, 5, 5, 10, 92, 92, 101]"
    d = ei.ensemble_select([o1, o1, "[-4, 2, 5, 10, 101, 92, 92]"])
    assert d["selected"] == o1 and d["selected_index"] == 1
    assert ei.ensemble_select(["a b", "c d", "e f"])["selected"] is None


def test_stats():
    assert ei.compute_stats(100, 72, 49)["cell"] == "49 (68%)"
    assert ei.compute_stats(100, 40, 25)["cell"] == "25 (63%)"
    with pytest.raises(ei.EinstError):
        ei.compute_stats(10, 20, 5)


def test_evaluate(tmp_path):
    preds = tmp_path / "p.jsonl"
    refs = tmp_path / "r.jsonl"
    refs.write_text(
        "".join(
            json.dumps({"task_id": "t", "instance_id": str(i), "references": ["yes it is"]}) + "\n"
            for i in range(2)
        )
    )
    preds.write_text(
        json.dumps({"task_id": "t", "instance_id": "0", "prediction": "yes it is"}) + "\n"
        + json.dumps({"task_id": "t", "instance_id": "1", "prediction": "nope"}) + "\n"
    )
    report = ei.evaluate(preds, refs)
    assert report["overall"] == pytest.approx(50.0)
    assert ei.score_record("yes it is", ["no", "yes it is"]) == 1.0
