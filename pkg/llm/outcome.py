# -*- coding: utf-8 -*-

"""
Reading the model's structured answer.

The first balanced ``{...}`` object in the reply must carry "reasoning" and "action"; "temperature",
"luminosity" and "explanation" are optional. The action text is resolved against the offered candidates by,
in order: exact label, label ignoring case and spacing, the single device whose name appears in the text,
then the meta-action synonyms. Anything else yields the default outcome: no action, failure message, failed.
"""

import json
import re
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

from house.actions import NO_ACTION, ActionCandidate, ActionCode

FAILURE_MESSAGE = 'I could not decide on an action.'

NO_ACTION_SYNONYMS = ('no action', 'nothing')
INTERACT_SYNONYMS = ('interact', 'inform', 'tell the user')


@dataclass(frozen=True)
class DecisionOutcome:
    reasoning: str
    action: ActionCandidate
    temperature_setpoint: Optional[int] = None
    luminosity: Optional[int] = None
    explanation: Optional[str] = None
    failed: bool = False
    warnings: Tuple[str, ...] = ()

    def __post_init__(self):
        if self.luminosity is not None and not 0 <= self.luminosity <= 100:
            raise ValueError('luminosity must be within [0, 100]')
        if self.failed and (self.action.code != ActionCode.NO_ACTION or self.explanation != FAILURE_MESSAGE):
            raise ValueError('a failed outcome must be the default outcome')

    def to_dict(self) -> Dict[str, Any]:
        return {
            'reasoning': self.reasoning,
            'action': self.action.label,
            'action_code': int(self.action.code),
            'device_id': self.action.device_id,
            'temperature': self.temperature_setpoint,
            'luminosity': self.luminosity,
            'explanation': self.explanation,
            'failed': self.failed,
            'warnings': list(self.warnings),
        }


def failed_outcome(candidates: Sequence[ActionCandidate], reason: str) -> DecisionOutcome:
    no_action = next((c for c in candidates if c.code == ActionCode.NO_ACTION), NO_ACTION)
    return DecisionOutcome(reasoning='', action=no_action, explanation=FAILURE_MESSAGE, failed=True,
                           warnings=(reason,))


def extract_first_object(raw: str) -> Optional[str]:
    ''' text of the first balanced top-level {...} in raw, string literals respected '''
    start = raw.find('{')
    if start == -1:
        return None
    depth = 0
    in_string = False
    escaped = False
    for position in range(start, len(raw)):
        char = raw[position]
        if in_string:
            if escaped:
                escaped = False
            elif char == '\\':
                escaped = True
            elif char == '"':
                in_string = False
        elif char == '"':
            in_string = True
        elif char == '{':
            depth += 1
        elif char == '}':
            depth -= 1
            if depth == 0:
                return raw[start:position + 1]
    return None


def _normalise(text: str) -> str:
    return ' '.join(text.split()).casefold().rstrip('.')


def resolve_action(text: str, candidates: Sequence[ActionCandidate]) -> Tuple[Optional[ActionCandidate], str]:
    for candidate in candidates:
        if candidate.label == text:
            return candidate, 'exact'
    wanted = _normalise(text)
    for candidate in candidates:
        if _normalise(candidate.label) == wanted:
            return candidate, 'normalised'

    named = []
    for candidate in candidates:
        if candidate.code != ActionCode.DEVICE_TOGGLE or not candidate.device_name:
            continue
        pattern = r'(?<![0-9a-z])' + re.escape(_normalise(candidate.device_name)) + r'(?![0-9a-z])'
        if re.search(pattern, wanted):
            named.append(candidate)
    if len(named) == 1:
        return named[0], 'device name'
    if len(named) > 1:
        return None, f'action "{text}" names {len(named)} devices'

    wants_nothing = any(word in wanted for word in NO_ACTION_SYNONYMS)
    wants_interaction = any(word in wanted for word in INTERACT_SYNONYMS)
    if wants_nothing != wants_interaction:
        code = ActionCode.NO_ACTION if wants_nothing else ActionCode.INTERACT_WITH_USER
        for candidate in candidates:
            if candidate.code == code:
                return candidate, 'synonym'
    return None, f'action "{text}" matches no candidate'


def _optional_int(document: Dict[str, Any], key: str, warnings: List[str], low=None, high=None) -> Optional[int]:
    value = document.get(key)
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        warnings.append(f'ignored non-numeric "{key}": {value!r}')
        return None
    if isinstance(value, float):
        if not value.is_integer():
            warnings.append(f'ignored non-integer "{key}": {value!r}')
            return None
        value = int(value)
    if (low is not None and value < low) or (high is not None and value > high):
        warnings.append(f'ignored out-of-range "{key}": {value}')
        return None
    return value


def parse_outcome(raw: str, candidates: Sequence[ActionCandidate]) -> DecisionOutcome:
    if not isinstance(raw, str):
        return failed_outcome(candidates, 'reply is not text')
    text = extract_first_object(raw)
    if text is None:
        return failed_outcome(candidates, 'no JSON object in reply')
    try:
        document = json.loads(text)
    except (ValueError, RecursionError):
        return failed_outcome(candidates, 'first JSON object in reply does not parse')
    if not isinstance(document, dict):
        return failed_outcome(candidates, 'reply object is not a mapping')
    missing = [key for key in ('reasoning', 'action') if key not in document]
    if missing:
        return failed_outcome(candidates, f'reply lacks required key(s): {", ".join(missing)}')
    action_text = document['action']
    if not isinstance(action_text, str):
        return failed_outcome(candidates, f'"action" must be a label, got {action_text!r}')
    action, how = resolve_action(action_text, candidates)
    if action is None:
        return failed_outcome(candidates, how)

    warnings: List[str] = []
    if how != 'exact':
        warnings.append(f'action "{action_text}" resolved to "{action.label}" by {how}')
    temperature = _optional_int(document, 'temperature', warnings)
    luminosity = _optional_int(document, 'luminosity', warnings, low=0, high=100)
    explanation = document.get('explanation')
    if explanation is not None and not isinstance(explanation, str):
        warnings.append(f'ignored non-text "explanation": {explanation!r}')
        explanation = None
    if explanation is not None:
        explanation = explanation.strip() or None
    reasoning = document['reasoning']
    reasoning = reasoning if isinstance(reasoning, str) else json.dumps(reasoning, ensure_ascii=False)
    return DecisionOutcome(reasoning=reasoning, action=action, temperature_setpoint=temperature,
                           luminosity=luminosity, explanation=explanation, failed=False,
                           warnings=tuple(warnings))
