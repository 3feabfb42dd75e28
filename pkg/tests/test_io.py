import json

import pytest
from hypothesis import given, settings, strategies as st

from halman import MalformedInput, gen_colorful_lower, gen_pq_lower, gen_random_colorful
from halman.io import FORMAT_VERSION, dumps, instance_from_json, instance_to_json, load_instance, loads, save_instance


def test_rationals_are_reduced_strings():
    obj = instance_to_json(gen_colorful_lower(2, 1))
    assert obj["version"] == FORMAT_VERSION
    assert obj["families"][0][0][0] == ["-4", "-1/2"]


@pytest.mark.parametrize("inst", [gen_colorful_lower(3, 2), gen_pq_lower(3), gen_random_colorful(2, 2, seed=3)])
def test_round_trip_is_byte_identical(inst):
    text = dumps(inst)
    assert loads(text) == inst
    assert dumps(loads(text)) == text


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.booleans())
def test_round_trip_random(seed, structured):
    inst = gen_random_colorful(2, 1, seed=seed, structured=structured)
    assert dumps(loads(dumps(inst))) == dumps(inst)


def test_file_round_trip(tmp_path):
    inst = gen_pq_lower(2)
    path = tmp_path / "i.json"
    save_instance(inst, path)
    assert load_instance(path) == inst


def test_integers_and_unreduced_fractions_accepted():
    obj = {"dimension": 1, "families": [[[[0, "4/2"]]]], "points": [{"coords": ["2/4"]}]}
    inst = instance_from_json(obj)
    assert dumps(inst) == dumps(instance_from_json(json.loads(dumps(inst))))
    assert instance_to_json(inst)["families"][0][0][0] == ["0", "2"]


BAD = [
    "[]",
    '{"dimension": 0, "families": [[[[0, 1]]]]}',
    '{"dimension": 1, "families": []}',
    '{"dimension": 1, "families": [[[[0.5, 1]]]]}',
    '{"dimension": 1, "families": [[[["0.5", 1]]]]}',
    '{"dimension": 1, "families": [[[[2, 1]]]]}',
    '{"dimension": 2, "families": [[[[0, 1]]]]}',
    '{"dimension": 1, "families": [[[[0, 1]]]], "points": [{"coords": [0], "multiplicity": 0}]}',
    '{"dimension": 1, "families": [[[[0, 1]]]], "points": [{"coords": [0, 1]}]}',
    '{"version": "other/9", "dimension": 1, "families": [[[[0, 1]]]]}',
    "{not json",
]


@pytest.mark.parametrize("text", BAD)
def test_malformed(text):
    with pytest.raises(MalformedInput):
        loads(text)


def test_missing_file(tmp_path):
    with pytest.raises(MalformedInput):
        load_instance(tmp_path / "nope.json")
