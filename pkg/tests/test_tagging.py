import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import LABELS, any_tags, entity_sets
from nereval.errors import ConfigurationError, InvalidInputError, NestedEntitiesError
from nereval.tagging import (
    BILOU,
    IOB1,
    IOB2,
    EntitySpan,
    SchemeViolation,
    decode_entities,
    encode_entities,
    entity_label,
    flatten_nested,
    project_first_token_labels,
    split_tag,
    validate_tags,
)


class TestValidate:
    def test_well_formed(self):
        assert validate_tags(["B-PER", "I-PER", "O"], IOB2) == []

    def test_orphan_i(self):
        assert validate_tags(["I-PER", "O"]) == [SchemeViolation(0, "orphan-I")]

    def test_type_switch(self):
        assert validate_tags(["B-PER", "I-LOC"]) == [SchemeViolation(1, "type-switch-I")]

    @pytest.mark.parametrize("tag", ["X-PER", "PER", "B-", "O-PER", "E-PER"])
    def test_invalid_prefix(self, tag):
        assert validate_tags(["O", tag]) == [SchemeViolation(1, "invalid-prefix")]

    def test_unknown_scheme(self):
        with pytest.raises(ConfigurationError):
            validate_tags(["O"], "BIOES2")

    def test_scheme_id_case_insensitive(self):
        assert validate_tags(["B-PER"], "iob2") == []

    def test_iob1_allows_i_start(self):
        assert validate_tags(["I-PER", "I-PER", "B-PER"], IOB1) == []

    def test_bilou(self):
        assert validate_tags(["B-PER", "L-PER", "U-LOC", "O"], BILOU) == []
        assert validate_tags(["B-PER", "O"], BILOU) == [SchemeViolation(0, "unterminated")]
        assert validate_tags(["L-PER"], BILOU) == [SchemeViolation(0, "orphan-I")]
        assert validate_tags(["B-PER", "L-LOC"], BILOU) == [
            SchemeViolation(0, "unterminated"),
            SchemeViolation(1, "type-switch-I"),
        ]

    @given(any_tags)
    def test_empty_iff_decode_modes_agree_and_roundtrip(self, tags):
        if not validate_tags(tags):
            spans = decode_entities(tags)
            assert spans == decode_entities(tags, mode="repair")
            assert encode_entities(spans, len(tags)) == list(tags)


class TestDecode:
    def test_basic(self):
        assert decode_entities(["B-PER", "I-PER", "O", "B-LOC"]) == [
            EntitySpan("PER", 0, 1),
            EntitySpan("LOC", 3, 3),
        ]

    def test_strict_orphan(self):
        assert decode_entities(["I-PER", "I-PER", "O"], IOB2, "strict") == []

    def test_repair_orphan(self):
        assert decode_entities(["I-PER", "I-PER", "O"], IOB2, "repair") == [EntitySpan("PER", 0, 1)]

    def test_type_switch_closes_entity(self):
        assert decode_entities(["B-PER", "I-LOC", "I-LOC"]) == [EntitySpan("PER", 0, 0)]
        assert decode_entities(["B-PER", "I-LOC", "I-LOC"], mode="repair") == [
            EntitySpan("PER", 0, 0),
            EntitySpan("LOC", 1, 2),
        ]

    def test_hyphenated_label(self):
        assert split_tag("B-Sign-or-Symptom") == ("B", "Sign-or-Symptom")
        assert decode_entities(["B-Sign-or-Symptom", "I-Sign-or-Symptom"]) == [
            EntitySpan("Sign-or-Symptom", 0, 1)
        ]

    def test_adjacent_b(self):
        assert decode_entities(["B-PER", "B-PER"]) == [EntitySpan("PER", 0, 0), EntitySpan("PER", 1, 1)]

    def test_invalid_tags_act_as_outside(self):
        assert decode_entities(["B-PER", "X-PER", "I-PER"], mode="repair") == [
            EntitySpan("PER", 0, 0),
            EntitySpan("PER", 2, 2),
        ]

    def test_iob1(self):
        assert decode_entities(["I-PER", "I-PER", "B-PER", "O"], IOB1) == [
            EntitySpan("PER", 0, 1),
            EntitySpan("PER", 2, 2),
        ]

    def test_bilou_strict_and_repair(self):
        tags = ["B-PER", "I-PER", "L-PER", "U-LOC", "B-DISO", "O", "L-ANAT"]
        assert decode_entities(tags, BILOU) == [EntitySpan("PER", 0, 2), EntitySpan("LOC", 3, 3)]
        assert decode_entities(tags, BILOU, "repair") == [
            EntitySpan("PER", 0, 2),
            EntitySpan("LOC", 3, 3),
            EntitySpan("DISO", 4, 4),
            EntitySpan("ANAT", 6, 6),
        ]

    def test_iobes_aliases(self):
        assert decode_entities(["S-PER", "B-LOC", "E-LOC"], BILOU) == [
            EntitySpan("PER", 0, 0),
            EntitySpan("LOC", 1, 2),
        ]

    def test_unknown_mode(self):
        with pytest.raises(ConfigurationError):
            decode_entities(["O"], IOB2, "lenient")

    @given(any_tags, st.sampled_from([IOB2, IOB1, BILOU]), st.sampled_from(["strict", "repair"]))
    def test_sorted_and_disjoint(self, tags, scheme, mode):
        spans = decode_entities(tags, scheme, mode)
        assert spans == sorted(spans, key=lambda e: (e.start, e.end, e.label))
        for a, b in zip(spans, spans[1:]):
            assert a.end < b.start
        for e in spans:
            assert 0 <= e.start <= e.end < len(tags) and e.label

    @given(any_tags, st.sampled_from([IOB2, BILOU]))
    def test_repair_superset_of_strict(self, tags, scheme):
        strict = set(decode_entities(tags, scheme, "strict"))
        assert strict <= set(decode_entities(tags, scheme, "repair"))


class TestEncode:
    def test_examples(self):
        assert encode_entities([EntitySpan("PER", 0, 1)], 3) == ["B-PER", "I-PER", "O"]
        assert encode_entities([], 2) == ["O", "O"]
        assert encode_entities([EntitySpan("LOC", 2, 2), EntitySpan("PER", 0, 0)], 3) == ["B-PER", "O", "B-LOC"]

    def test_iob1_uses_b_only_between_same_type(self):
        spans = [EntitySpan("PER", 0, 1), EntitySpan("PER", 2, 2), EntitySpan("LOC", 4, 4)]
        assert encode_entities(spans, 5, IOB1) == ["I-PER", "I-PER", "B-PER", "O", "I-LOC"]

    def test_bilou(self):
        spans = [EntitySpan("PER", 0, 2), EntitySpan("LOC", 3, 3)]
        assert encode_entities(spans, 4, BILOU) == ["B-PER", "I-PER", "L-PER", "U-LOC"]

    def test_overlap_rejected(self):
        with pytest.raises(InvalidInputError):
            encode_entities([EntitySpan("PER", 0, 2), EntitySpan("LOC", 2, 3)], 5)

    def test_out_of_bounds_rejected(self):
        with pytest.raises(InvalidInputError):
            encode_entities([EntitySpan("PER", 2, 3)], 3)

    @given(entity_sets(), st.sampled_from([IOB2, IOB1, BILOU]))
    def test_inverse_round_trip(self, sample, scheme):
        spans, length = sample
        assert decode_entities(encode_entities(spans, length, scheme), scheme) == spans


class TestFlatten:
    nested = [EntitySpan("DISO", 0, 5), EntitySpan("ANAT", 2, 3)]

    def test_keep_coarsest(self):
        assert flatten_nested(self.nested, "keep-coarsest") == [EntitySpan("DISO", 0, 5)]

    def test_concatenate(self):
        assert flatten_nested(self.nested, "concatenate") == [EntitySpan("DISO+ANAT", 0, 5)]

    def test_error(self):
        with pytest.raises(NestedEntitiesError):
            flatten_nested(self.nested, "error")

    @pytest.mark.parametrize("strategy", ["keep-coarsest", "concatenate", "error"])
    def test_no_nesting_is_identity(self, strategy):
        assert flatten_nested([EntitySpan("PER", 0, 1)], strategy) == [EntitySpan("PER", 0, 1)]

    def test_partial_overlap_keeps_longer(self):
        spans = [EntitySpan("A", 0, 2), EntitySpan("B", 2, 6)]
        assert flatten_nested(spans) == [EntitySpan("B", 2, 6)]

    def test_partial_overlap_ties(self):
        assert flatten_nested([EntitySpan("B", 0, 2), EntitySpan("A", 2, 4)]) == [EntitySpan("B", 0, 2)]
        assert flatten_nested([EntitySpan("B", 0, 2), EntitySpan("A", 0, 2)]) == [EntitySpan("A", 0, 2)]

    def test_concatenate_orders_by_length_then_start(self):
        spans = [EntitySpan("C", 6, 7), EntitySpan("A", 0, 9), EntitySpan("B", 1, 2), EntitySpan("D", 11, 11)]
        assert flatten_nested(spans, "concatenate") == [EntitySpan("A+B+C", 0, 9), EntitySpan("D", 11, 11)]

    def test_concatenate_chains_partial_overlaps(self):
        spans = [EntitySpan("A", 0, 2), EntitySpan("B", 2, 4), EntitySpan("C", 4, 5)]
        assert flatten_nested(spans, "concatenate") == [EntitySpan("A+B+C", 0, 5)]

    def test_duplicates_collapse(self):
        assert flatten_nested([EntitySpan("A", 0, 1)] * 2, "error") == [EntitySpan("A", 0, 1)]

    def test_unknown_strategy(self):
        with pytest.raises(ConfigurationError):
            flatten_nested([], "merge")


class TestProjection:
    def test_examples(self):
        assert project_first_token_labels(["B-PER", "I-PER", "O"]) == ["PER", "O", "O"]
        assert project_first_token_labels(["O", "O"]) == ["O", "O"]
        assert project_first_token_labels(["B-PER", "B-LOC"]) == ["PER", "LOC"]

    @given(any_tags)
    def test_one_mark_per_entity(self, tags):
        projected = project_first_token_labels(tags)
        assert sum(p != "O" for p in projected) == len(decode_entities(tags))

    def test_entity_label(self):
        assert [entity_label(t) for t in ["B-PER", "I-PER", "O", "weird"]] == ["PER", "PER", "O", "weird"]
