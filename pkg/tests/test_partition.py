import pytest

from ruaguard.errors import DatasetFormatError, EmptySplitGrammarError
from ruaguard.grammar import enumerate_strings, parse_grammar, serialize_grammar
from ruaguard.partition import (
    SPLITS,
    PartitionConfig,
    PartitionedGrammar,
    emit_split_datasets,
    format_manifest,
    load_partition,
    partition,
)
from ruaguard.matching import member


def _rule_of_weights(weights, annotation=""):
    body = " | ".join(f'{w}: "t{i}"' for i, w in enumerate(weights))
    return parse_grammar(f"S{annotation} -> {body}\n")


class TestSharedPrefix:
    def test_descending_weights_stop_at_first_reaching_p(self):
        g = _rule_of_weights([0.30, 0.25, 0.20, 0.15, 0.10])
        parts = partition(g, PartitionConfig(p=0.25, seed=0))
        assert parts.shared["S"] == (0,)
        assert sorted(parts.exclusive["S"]) == [1, 2, 3, 4]

    def test_p_099_on_uniform_four_way_rule_shares_everything(self):
        g = _rule_of_weights([1, 1, 1, 1])
        parts = partition(g, PartitionConfig(p=0.99, seed=0))
        assert parts.shared["S"] == (0, 1, 2, 3)
        assert parts.exclusive["S"] == {}

    def test_uniform_ten_way_rule_shares_three(self):
        g = _rule_of_weights([1] * 10)
        parts = partition(g, PartitionConfig(p=0.25, seed=0))
        assert len(parts.shared["S"]) == 3
        assert len(parts.exclusive["S"]) == 7

    def test_strict_greater_requires_mass_above_p(self):
        g = _rule_of_weights([1, 1, 1, 1])
        loose = partition(g, PartitionConfig(p=0.25, seed=0))
        strict = partition(g, PartitionConfig(p=0.25, seed=0, strict_greater=True))
        assert len(loose.shared["S"]) == 1
        assert len(strict.shared["S"]) == 2

    def test_float_noise_near_boundary_is_tolerated(self):
        g = _rule_of_weights([1] * 6)
        parts = partition(g, PartitionConfig(p=0.5, seed=0))
        assert len(parts.shared["S"]) == 3

    def test_ties_ranked_by_original_position(self):
        g = _rule_of_weights([1, 1, 1, 1, 1])
        parts = partition(g, PartitionConfig(p=0.4, seed=0))
        assert parts.shared["S"] == (0, 1)

    def test_weights_ranked_not_positional(self):
        g = _rule_of_weights([1, 5, 1, 1])
        parts = partition(g, PartitionConfig(p=0.5, seed=0))
        assert parts.shared["S"] == (1,)


class TestEligibility:
    def test_below_threshold_rules_fully_shared(self):
        g = parse_grammar('S -> "a" | "b" | "c"\n')
        parts = partition(g, PartitionConfig(seed=0))
        assert parts.shared["S"] == (0, 1, 2)

    def test_nosplit_annotation_wins_over_size(self):
        g = _rule_of_weights([1] * 10, annotation=" @nosplit")
        parts = partition(g, PartitionConfig(seed=0))
        assert parts.shared["S"] == tuple(range(10))

    def test_split_annotation_wins_over_threshold(self):
        g = parse_grammar('S @split -> "a" | "b"\n')
        parts = partition(g, PartitionConfig(p=0.5, seed=0))
        assert parts.shared["S"] == (0,)
        assert len(parts.exclusive["S"]) == 1


class TestLeakage:
    def test_exclusive_alternatives_land_in_exactly_one_split(self):
        g = _rule_of_weights([1] * 10)
        parts = partition(g, PartitionConfig(p=0.25, seed=0))
        languages = {
            split: set(enumerate_strings(sub))
            for split, sub in parts.sub_grammars.items()
        }
        for idx in parts.shared["S"]:
            assert all(f"t{idx}" in lang for lang in languages.values())
        for idx, split in parts.exclusive["S"].items():
            holders = [s for s, lang in languages.items() if f"t{idx}" in lang]
            assert holders == [split]

    def test_split_languages_cover_the_source_language(self):
        g = _rule_of_weights([1] * 10)
        parts = partition(g, PartitionConfig(p=0.25, seed=3))
        union = set()
        for sub in parts.sub_grammars.values():
            union |= set(enumerate_strings(sub))
        assert union == set(enumerate_strings(g))

    def test_assignment_frequencies_track_fractions(self):
        g = _rule_of_weights([1] * 400)
        parts = partition(g, PartitionConfig(p=0.005, seed=8))
        counts = {s: 0 for s in SPLITS}
        for split in parts.exclusive["S"].values():
            counts[split] += 1
        assert counts["train"] > counts["val"]
        assert counts["train"] > counts["test"]
        assert all(c > 0 for c in counts.values())

    def test_deterministic_per_seed(self, pos):
        a = partition(pos, PartitionConfig(seed=5))
        b = partition(pos, PartitionConfig(seed=5))
        c = partition(pos, PartitionConfig(seed=6))
        assert format_manifest(a) == format_manifest(b)
        assert format_manifest(a) != format_manifest(c)

    def test_real_grammar_sub_languages_stay_inside_source(self, pos):
        parts = partition(pos, PartitionConfig(seed=0))
        for sub in parts.sub_grammars.values():
            for s in enumerate_strings(sub)[:200]:
                assert member(pos, s)


class TestManifest:
    def test_round_trip_reproduces_identical_sub_grammars(self, pos):
        parts = partition(pos, PartitionConfig(seed=11))
        again = load_partition(pos, format_manifest(parts))
        assert isinstance(again, PartitionedGrammar)
        assert again.shared == parts.shared
        assert again.exclusive == parts.exclusive
        for split in SPLITS:
            assert serialize_grammar(again.sub_grammars[split]) == serialize_grammar(
                parts.sub_grammars[split]
            )

    def test_header_required(self, toy):
        with pytest.raises(DatasetFormatError):
            load_partition(toy, "rule\talt\tassignment\nS\t0\tshared\n")

    def test_unknown_rule_rejected(self):
        g = parse_grammar('S -> "a"\n')
        text = "rule\talt_index\tassignment\nS\t0\tshared\nX\t0\tshared\n"
        with pytest.raises(DatasetFormatError):
            load_partition(g, text)

    def test_out_of_range_index_rejected(self):
        g = parse_grammar('S -> "a"\n')
        text = "rule\talt_index\tassignment\nS\t1\tshared\n"
        with pytest.raises(DatasetFormatError):
            load_partition(g, text)

    def test_duplicate_row_rejected(self):
        g = parse_grammar('S -> "a" | "b"\n')
        text = "rule\talt_index\tassignment\nS\t0\tshared\nS\t0\ttrain\nS\t1\tshared\n"
        with pytest.raises(DatasetFormatError):
            load_partition(g, text)

    def test_unknown_assignment_rejected(self):
        g = parse_grammar('S -> "a"\n')
        text = "rule\talt_index\tassignment\nS\t0\taddtest\n"
        with pytest.raises(DatasetFormatError):
            load_partition(g, text)

    def test_partial_coverage_rejected(self):
        g = parse_grammar('S -> "a" | "b"\n')
        text = "rule\talt_index\tassignment\nS\t0\tshared\n"
        with pytest.raises(DatasetFormatError):
            load_partition(g, text)

    def test_empty_split_surfaces_through_manifest(self):
        g = parse_grammar('S -> "a" | "b"\n')
        text = "rule\talt_index\tassignment\nS\t0\ttrain\nS\t1\ttrain\n"
        with pytest.raises(EmptySplitGrammarError) as err:
            load_partition(g, text)
        assert "val" in str(err.value)

    def test_manifest_can_prune_referenced_rules_per_split(self):
        g = parse_grammar('S -> A | "s"\nA -> "a1" | "a2"\n')
        text = (
            "rule\talt_index\tassignment\n"
            "S\t0\tshared\nS\t1\tshared\n"
            "A\t0\ttrain\nA\t1\ttrain\n"
        )
        parts = load_partition(g, text)
        assert sorted(enumerate_strings(parts.sub_grammars["train"])) == ["a1", "a2", "s"]
        assert enumerate_strings(parts.sub_grammars["val"]) == ["s"]
        assert "A" not in parts.sub_grammars["val"].rules


class TestEmitDatasets:
    def test_batches_are_tagged_and_in_language(self, aic):
        parts = partition(aic, PartitionConfig(seed=0))
        batches = emit_split_datasets(parts, (60, 25, 25), seed=1)
        assert set(batches) == set(SPLITS)
        for split, batch in batches.items():
            assert batch.split == split
            assert len(batch.utterances) == len(set(batch.utterances))
            sub = parts.sub_grammars[split]
            assert all(member(sub, u) for u in batch.utterances)

    def test_split_samples_never_leak_exclusive_strings(self):
        g = _rule_of_weights([1] * 10)
        parts = partition(g, PartitionConfig(p=0.25, seed=2))
        batches = emit_split_datasets(parts, (4, 4, 4), seed=0)
        for split, batch in batches.items():
            for other in SPLITS:
                if other == split:
                    continue
                other_exclusive = {
                    f"t{i}"
                    for i, s in parts.exclusive["S"].items()
                    if s == other
                }
                assert not (set(batch.utterances) & other_exclusive)

    def test_counts_must_be_positive(self, toy):
        parts = partition(toy, PartitionConfig(seed=0))
        with pytest.raises(ValueError):
            emit_split_datasets(parts, (5, 0, 5), seed=0)


class TestConfigValidation:
    @pytest.mark.parametrize(
        "kwargs",
        [
            {"p": 0.0},
            {"p": 1.0},
            {"split_fractions": (0.5, 0.5, 0.5)},
            {"split_fractions": (0.7, 0.3, 0.0)},
            {"min_alternatives_to_split": 1},
        ],
    )
    def test_bad_configs_rejected(self, kwargs):
        with pytest.raises(ValueError):
            PartitionConfig(**kwargs)
