import json
from types import SimpleNamespace

import pytest

from ruaguard.dataset import Label, one_hot_prediction
from ruaguard.errors import MissingClearConfirmError
from ruaguard.guard import (
    RESPONSE_PRESETS,
    DisclosureConfig,
    GuardDecision,
    compose_response,
    decision_to_json,
    guard,
    load_guard_config,
    parse_guard_config,
)
from ruaguard.recognizer import RecognizerModel
from ruaguard.grammar import parse_grammar


class FixedClassifier:
    def __init__(self, label):
        self.label = label

    def predict(self, text):
        return one_hot_prediction(text, self.label)


class TestCompose:
    def test_confirmation_only(self):
        assert compose_response(RESPONSE_PRESETS["cc"]) == "I am a chatbot."

    def test_with_maker(self):
        assert (
            compose_response(RESPONSE_PRESETS["cc_wm"])
            == "I am a chatbot made by Example.com."
        )

    def test_with_purpose(self):
        assert compose_response(RESPONSE_PRESETS["cc_p"]) == (
            "I am a chatbot. I am designed to help you get things done."
        )

    def test_full_disclosure(self):
        assert compose_response(RESPONSE_PRESETS["cc_wm_p_hr"]) == (
            "I am a chatbot made by Example.com. "
            "I am designed to help you get things done. "
            "If I say anything that seems wrong, you can report it to "
            'Example.com by saying "report problem" or by going to '
            "Example.com/bot-issue."
        )

    def test_component_order_is_fixed(self):
        cfg = DisclosureConfig(
            clear_confirm="AA.", who_makes="BB.", purpose="CC.", how_report="DD."
        )
        assert compose_response(cfg) == "AA. BB. CC. DD."

    def test_presets_all_compose_distinct_responses(self):
        responses = {name: compose_response(cfg) for name, cfg in RESPONSE_PRESETS.items()}
        assert len(set(responses.values())) == len(RESPONSE_PRESETS)
        for text in responses.values():
            assert text.strip()

    def test_missing_confirmation_rejected(self):
        with pytest.raises(MissingClearConfirmError):
            DisclosureConfig(clear_confirm="")
        with pytest.raises(MissingClearConfirmError):
            DisclosureConfig(clear_confirm="   ")
        stub = SimpleNamespace(
            clear_confirm=" ", who_makes=None, purpose=None, how_report=None
        )
        with pytest.raises(MissingClearConfirmError):
            compose_response(stub)

    def test_bad_policy_rejected(self):
        with pytest.raises(ValueError):
            DisclosureConfig(clear_confirm="ok", aic_policy="escalate")


class TestGuardDecision:
    CFG = RESPONSE_PRESETS["cc"]

    def test_positive_gets_disclosure(self):
        decision = guard("are you a robot", FixedClassifier(Label.POS), self.CFG)
        assert decision.action == "respond"
        assert decision.response == "I am a chatbot."
        assert decision.label is Label.POS

    def test_negative_passes_through(self):
        decision = guard("what time is it", FixedClassifier(Label.NEG), self.CFG)
        assert decision.action == "pass"
        assert decision.response is None

    def test_ambiguous_default_passes_through(self):
        decision = guard("you sound robotic", FixedClassifier(Label.AIC), self.CFG)
        assert decision.action == "pass"
        assert decision.response is None

    def test_ambiguous_clarify_policy_responds(self):
        cfg = DisclosureConfig(clear_confirm="I am a chatbot.", aic_policy="clarify")
        decision = guard("you sound robotic", FixedClassifier(Label.AIC), cfg)
        assert decision.action == "respond"
        assert decision.response == "I am a chatbot."

    def test_classifier_id_defaults_to_type_name(self):
        decision = guard("x", FixedClassifier(Label.NEG), self.CFG)
        assert decision.classifier_id == "FixedClassifier"
        tagged = guard("x", FixedClassifier(Label.NEG), self.CFG, classifier_id="v2")
        assert tagged.classifier_id == "v2"

    def test_with_grammar_recognizer(self):
        pos = parse_grammar('S -> "are you a robot"')
        aic = parse_grammar('S -> "you sound robotic"')
        model = RecognizerModel(pos_grammar=pos, aic_grammar=aic)
        asked = guard("Are you a robot?", model, self.CFG)
        assert asked.action == "respond"
        assert asked.response == "I am a chatbot."
        ambiguous = guard("you sound robotic", model, self.CFG)
        assert ambiguous.action == "pass"
        other = guard("how is the weather", model, self.CFG)
        assert other.action == "pass"
        assert other.label is Label.NEG


class TestDecisionJson:
    def test_fields(self):
        decision = GuardDecision(
            label=Label.POS, action="respond", response="I am a chatbot.",
            classifier_id="stub",
        )
        payload = json.loads(decision_to_json(decision))
        assert payload == {
            "label": "p",
            "action": "respond",
            "response": "I am a chatbot.",
            "classifier": "stub",
        }

    def test_optional_text_included(self):
        decision = GuardDecision(
            label=Label.NEG, action="pass", response=None, classifier_id="stub"
        )
        payload = json.loads(decision_to_json(decision, text="hello"))
        assert payload["text"] == "hello"
        assert payload["response"] is None


class TestConfigFile:
    def test_parse_with_comments(self):
        cfg = parse_guard_config(
            "# guard settings\n"
            "clear_confirm = I am a chatbot.\n"
            "\n"
            "purpose = I help with questions.\n"
            "aic_policy = clarify\n"
        )
        assert cfg.clear_confirm == "I am a chatbot."
        assert cfg.purpose == "I help with questions."
        assert cfg.who_makes is None
        assert cfg.aic_policy == "clarify"

    def test_value_may_contain_equals(self):
        cfg = parse_guard_config("clear_confirm = x = y\n")
        assert cfg.clear_confirm == "x = y"

    def test_unknown_key_rejected(self):
        with pytest.raises(ValueError, match="unknown guard config key"):
            parse_guard_config("clear_confirm = ok\nshout = yes\n")

    def test_missing_equals_rejected(self):
        with pytest.raises(ValueError, match="key=value"):
            parse_guard_config("clear_confirm\n")

    def test_confirmation_required(self):
        with pytest.raises(MissingClearConfirmError):
            parse_guard_config("purpose = helping\n")

    def test_load_from_file(self, tmp_path):
        path = tmp_path / "guard.cfg"
        path.write_text("clear_confirm = I am a bot.\naic_policy = clarify\n")
        cfg = load_guard_config(path)
        assert cfg.clear_confirm == "I am a bot."
        assert cfg.aic_policy == "clarify"
