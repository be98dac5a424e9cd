"""Disclosure responses and the runtime guard decision.

A disclosure response is composed from up to four parts, always in this
order: a clear confirmation of being non-human (required), who makes the
system, its purpose, and how to report problems. The guard classifies an
incoming utterance and responds with the composed disclosure on a clear
ask; ambiguous cases follow the configured policy and clear negatives
always pass through untouched.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .dataset import Label
from .errors import MissingClearConfirmError

AIC_POLICIES = ("clarify", "pass_through")


@dataclass(frozen=True)
class DisclosureConfig:
    clear_confirm: str
    who_makes: str | None = None
    purpose: str | None = None
    how_report: str | None = None
    aic_policy: str = "pass_through"

    def __post_init__(self):
        if not self.clear_confirm or not self.clear_confirm.strip():
            raise MissingClearConfirmError("clear_confirm must be a non-empty string")
        if self.aic_policy not in AIC_POLICIES:
            raise ValueError(f"aic_policy must be one of {AIC_POLICIES}")


@dataclass(frozen=True)
class GuardDecision:
    label: Label
    action: str  # "respond" or "pass"
    response: str | None
    classifier_id: str


def compose_response(cfg: DisclosureConfig) -> str:
    """Join the present components, in fixed order, with single spaces."""
    if not cfg.clear_confirm or not cfg.clear_confirm.strip():
        raise MissingClearConfirmError("clear_confirm must be a non-empty string")
    parts = [cfg.clear_confirm]
    for extra in (cfg.who_makes, cfg.purpose, cfg.how_report):
        if extra:
            parts.append(extra)
    return " ".join(parts)


def guard(utterance: str, classifier, cfg: DisclosureConfig,
          classifier_id: str | None = None) -> GuardDecision:
    """Classify ``utterance`` and decide whether to emit the disclosure."""
    if classifier_id is None:
        classifier_id = type(classifier).__name__
    label = classifier.predict(utterance).label
    respond = label is Label.POS or (
        label is Label.AIC and cfg.aic_policy == "clarify"
    )
    return GuardDecision(
        label=label,
        action="respond" if respond else "pass",
        response=compose_response(cfg) if respond else None,
        classifier_id=classifier_id,
    )


def decision_to_json(decision: GuardDecision, text: str | None = None) -> str:
    payload = {
        "label": decision.label.value,
        "action": decision.action,
        "response": decision.response,
        "classifier": decision.classifier_id,
    }
    if text is not None:
        payload["text"] = text
    return json.dumps(payload, sort_keys=True)


# Named configurations reproducing the studied response wordings.
RESPONSE_PRESETS: dict[str, DisclosureConfig] = {
    "cc": DisclosureConfig(clear_confirm="I am a chatbot."),
    "cc_wm": DisclosureConfig(
        clear_confirm="I am a chatbot",
        who_makes="made by Example.com.",
    ),
    "cc_p": DisclosureConfig(
        clear_confirm="I am a chatbot.",
        purpose="I am designed to help you get things done.",
    ),
    "cc_wm_p": DisclosureConfig(
        clear_confirm="I am a chatbot",
        who_makes="made by Example.com.",
        purpose="I am designed to help you get things done.",
    ),
    "cc_wm_p_hr": DisclosureConfig(
        clear_confirm="I am a chatbot",
        who_makes="made by Example.com.",
        purpose="I am designed to help you get things done.",
        how_report=(
            "If I say anything that seems wrong, you can report it to "
            'Example.com by saying "report problem" or by going to '
            "Example.com/bot-issue."
        ),
    ),
    "cc_ai": DisclosureConfig(clear_confirm="I am an A.I."),
    "cc_extra": DisclosureConfig(clear_confirm="I'm not a person. I'm an A.I."),
    "cc_p_alt": DisclosureConfig(
        clear_confirm="I am a chatbot.",
        purpose="I am designed to help you with your insurance policy.",
    ),
}

_CONFIG_KEYS = ("clear_confirm", "who_makes", "purpose", "how_report", "aic_policy")


def parse_guard_config(text: str) -> DisclosureConfig:
    """Read a key=value guard config; # starts a comment line."""
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"expected key=value on line {lineno}")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in _CONFIG_KEYS:
            raise ValueError(f"unknown guard config key {key!r} on line {lineno}")
        values[key] = value.strip()
    if "clear_confirm" not in values:
        raise MissingClearConfirmError("guard config must set clear_confirm")
    return DisclosureConfig(**values)


def load_guard_config(path) -> DisclosureConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_guard_config(fh.read())
