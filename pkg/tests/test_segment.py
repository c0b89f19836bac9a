import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nestseg.corpus import BoundaryLabel, LABEL_ORDER
from nestseg.segment import (
    IllFormedError,
    Segment,
    SegmentationError,
    Violation,
    check_well_formed,
    labels_to_segments,
    parse_labels,
    render_brackets,
    repair,
    segment_depths,
    segments_to_labels,
    validate_segmentation,
)

from conftest import PIECES_FORMS, PIECES_LABELS, REPAIR_FORMS, REPAIR_INPUT, REPAIR_REPAIRED

B, E, BE, I = LABEL_ORDER
labels_st = st.lists(st.sampled_from(LABEL_ORDER), min_size=1, max_size=40)


def codes(labels):
    return " ".join(label.code for label in labels)


def test_gold_is_well_formed():
    assert check_well_formed(parse_labels(PIECES_LABELS)).ok
    assert check_well_formed([BE])


def test_uncovered_token_reported_at_worldwide():
    check = check_well_formed(parse_labels(REPAIR_INPUT))
    assert not check.ok
    assert check.first_violation == (3, Violation.UNCOVERED_TOKEN)
    assert REPAIR_FORMS[check.position] == "worldwide"


@pytest.mark.parametrize(
    "text, expected",
    [
        ("E", (0, Violation.UNMATCHED_END)),
        ("BE I", (1, Violation.UNCOVERED_TOKEN)),
        ("B B I E", (0, Violation.UNCLOSED_BEGIN)),
        ("B E E", (2, Violation.UNMATCHED_END)),
        ("BE B I", (1, Violation.UNCLOSED_BEGIN)),
    ],
)
def test_violations(text, expected):
    assert check_well_formed(parse_labels(text)).first_violation == expected


def test_repair_trace():
    out = repair(parse_labels(REPAIR_INPUT))
    assert codes(out) == REPAIR_REPAIRED
    changed = [i for i, (a, b) in enumerate(zip(parse_labels(REPAIR_INPUT), out)) if a is not b]
    assert [REPAIR_FORMS[i] for i in changed] == ["worldwide", "thus", ",", "been"]
    assert [out[i] for i in changed] == [B, B, B, E]


def test_repair_identity_on_gold():
    gold = parse_labels(PIECES_LABELS)
    assert repair(gold) == gold


def test_repair_single_end():
    assert repair([E]) == [BE]


def test_repair_stranded_begin():
    assert repair(parse_labels("B B E")) == parse_labels("BE B E")


def test_repair_does_not_mutate():
    labels = parse_labels("I I")
    repair(labels)
    assert labels == [I, I]


def test_segments_of_gold():
    assert labels_to_segments(parse_labels(PIECES_LABELS)) == {(0, 15), (3, 5), (6, 9)}
    assert labels_to_segments([BE]) == {(0, 0)}


def test_segments_of_repaired():
    segs = labels_to_segments(parse_labels(REPAIR_REPAIRED))
    assert segs == {(0, 2), (3, 5), (6, 9), (10, 12), (13, 18)}


def test_segments_reject_ill_formed():
    with pytest.raises(IllFormedError) as info:
        labels_to_segments(parse_labels(REPAIR_INPUT))
    assert info.value.check.first_violation == (3, Violation.UNCOVERED_TOKEN)


def test_depths():
    depths = segment_depths(parse_labels(PIECES_LABELS))
    assert depths == {(0, 15): 1, (3, 5): 2, (6, 9): 2}


def test_segments_to_labels_examples():
    assert segments_to_labels({Segment(0, 0)}, 1) == [BE]
    assert codes(segments_to_labels({(0, 15), (3, 5), (6, 9)}, 16)) == PIECES_LABELS


@pytest.mark.parametrize(
    "segs, length, fragment",
    [
        ({(0, 3), (2, 5)}, 6, "partially overlap"),
        ({(0, 1)}, 3, "not covered"),
        ({(0, 2), (0, 1), (2, 2)}, 3, "share a start"),
        ({(0, 2), (1, 2)}, 3, "share an end"),
        ({(0, 4)}, 3, "out of range"),
    ],
)
def test_segmentation_errors(segs, length, fragment):
    with pytest.raises(SegmentationError, match=fragment):
        segments_to_labels(segs, length)


def test_partial_overlap_names_segments():
    with pytest.raises(SegmentationError) as info:
        validate_segmentation({(0, 3), (2, 5)}, 6)
    assert "(0, 3)" in str(info.value) and "(2, 5)" in str(info.value)


def test_render_brackets():
    text = render_brackets(PIECES_FORMS, parse_labels(PIECES_LABELS))
    assert text.startswith("[Ces pièces , [mondialement connues ,] [donc")
    assert text.endswith("amateur nippon]")


@settings(max_examples=300, deadline=None)
@given(labels_st)
def test_repair_properties(labels):
    out = repair(labels)
    assert len(out) == len(labels)
    assert check_well_formed(out).ok
    assert repair(out) == out


@settings(max_examples=300, deadline=None)
@given(labels_st)
def test_round_trip_through_segments(labels):
    fixed = repair(labels)
    segs = labels_to_segments(fixed)
    assert segments_to_labels(segs, len(fixed)) == fixed
    assert labels_to_segments(segments_to_labels(segs, len(fixed))) == segs


def test_repair_only_touches_needed_tokens():
    # a well-formed prefix followed by junk keeps the prefix intact
    rng = random.Random(5)
    for _ in range(500):
        prefix = parse_labels("B I E BE")
        tail = [rng.choice(LABEL_ORDER) for _ in range(rng.randint(1, 8))]
        assert repair(prefix + tail)[:4] == prefix


def test_exhaustive_small():
    # identity on well-formed and a well-formed result everywhere
    for n in range(1, 7):
        for labels in itertools.product(LABEL_ORDER, repeat=n):
            out = repair(labels)
            assert check_well_formed(out).ok, labels
            if check_well_formed(labels).ok:
                assert out == list(labels)
