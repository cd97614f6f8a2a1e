# -*- coding: utf-8 -*-

"""
Grading rubric. A matcher is a JSON object; a leaf states constraints that must all hold, ``any`` and ``all``
compose other matchers:

    {"kind": "device" | "interact" | "noop"}
    {"categories": ["AuxiliaryLight", "light"], "rooms": ["livingroom"], "devices": ["lr_tv"],
     "transition": "on" | "off",                 power position after the toggle, "on" is On, Open or Unlocked
     "luminosity": {"max": 50} | {"absent": true},
     "explanation_required": true}
    {"any": [matcher, ...]}, {"all": [matcher, ...]}

A leaf carrying any device constraint only matches device actions. "light" stands for both light categories.
"""

from enum import Enum
from fractions import Fraction
from typing import TYPE_CHECKING, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from house import (ActionCandidate, ActionCode, DeviceCategory, HouseState, LIGHT_CATEGORIES, RandomPolicy,
                   RubricCounts, baseline_grade, build_actions, is_active, toggled)
from llm.outcome import DecisionOutcome

if TYPE_CHECKING:
    from .scenarios import ScenarioSpec

LIGHT_GROUP = 'light'


class ActionKind(str, Enum):
    DEVICE = 'device'
    INTERACT = 'interact'
    NOOP = 'noop'

    @classmethod
    def of(cls, code: ActionCode) -> 'ActionKind':
        return {ActionCode.DEVICE_TOGGLE: cls.DEVICE, ActionCode.INTERACT_WITH_USER: cls.INTERACT,
                ActionCode.NO_ACTION: cls.NOOP}[ActionCode(code)]


class Transition(str, Enum):
    ON = 'on'
    OFF = 'off'


class _Frozen(BaseModel):
    model_config = ConfigDict(frozen=True, extra='forbid', populate_by_name=True)


class LuminosityRule(_Frozen):
    max: Optional[int] = Field(default=None, ge=0, le=100)
    absent: bool = False

    @model_validator(mode='after')
    def _check(self) -> 'LuminosityRule':
        if self.absent == (self.max is not None):
            raise ValueError('give either "max" or "absent": true')
        return self

    def accepts(self, luminosity: Optional[int]) -> bool:
        if self.absent:
            return luminosity is None
        return luminosity is not None and luminosity <= self.max


class Matcher(_Frozen):
    any_of: Optional[Tuple['Matcher', ...]] = Field(default=None, alias='any')
    all_of: Optional[Tuple['Matcher', ...]] = Field(default=None, alias='all')
    kind: Optional[ActionKind] = None
    categories: Optional[Tuple[str, ...]] = None
    devices: Optional[Tuple[str, ...]] = None
    rooms: Optional[Tuple[str, ...]] = None
    transition: Optional[Transition] = None
    luminosity: Optional[LuminosityRule] = None
    explanation_required: bool = False

    @field_validator('categories')
    @classmethod
    def _known_categories(cls, value):
        if value is None:
            return value
        known = {category.value for category in DeviceCategory} | {LIGHT_GROUP}
        unknown = [category for category in value if category not in known]
        if unknown:
            raise ValueError(f'unknown categories {unknown}')
        return value

    @model_validator(mode='after')
    def _check_shape(self) -> 'Matcher':
        for name in ('any_of', 'all_of', 'categories', 'devices', 'rooms'):
            if getattr(self, name) == ():
                raise ValueError(f'{name} must not be empty')
        composite = [self.any_of is not None, self.all_of is not None]
        if sum(composite) > 1:
            raise ValueError('a matcher is either "any" or "all", not both')
        if any(composite) and (self.kind is not None or self._device_constraints() or self.explanation_required):
            raise ValueError('"any"/"all" cannot be mixed with leaf constraints')
        if not any(composite) and self.kind is None and not self._device_constraints() \
                and not self.explanation_required:
            raise ValueError('empty matcher')
        if self._device_constraints() and self.kind not in (None, ActionKind.DEVICE):
            raise ValueError(f'device constraints cannot apply to kind "{self.kind.value}"')
        return self

    def _device_constraints(self) -> bool:
        return any(value is not None for value in
                   (self.categories, self.devices, self.rooms, self.transition, self.luminosity))

    def _category_allowed(self, category: DeviceCategory) -> bool:
        if category.value in self.categories:
            return True
        return LIGHT_GROUP in self.categories and category in LIGHT_CATEGORIES

    def matches(self, outcome: DecisionOutcome, state: HouseState) -> bool:
        if self.any_of is not None:
            return any(matcher.matches(outcome, state) for matcher in self.any_of)
        if self.all_of is not None:
            return all(matcher.matches(outcome, state) for matcher in self.all_of)

        action = outcome.action
        kind = ActionKind.of(action.code)
        if self.kind is not None and kind != self.kind:
            return False
        if self.explanation_required and not outcome.explanation:
            return False
        if not self._device_constraints():
            return True
        if kind != ActionKind.DEVICE:
            return False
        device = state.devices.get(action.device_id)
        if device is None or not device.is_actuator:
            return False
        if self.categories is not None and not self._category_allowed(device.category):
            return False
        if self.devices is not None and device.id not in self.devices:
            return False
        if self.rooms is not None and device.location not in self.rooms:
            return False
        if self.transition is not None:
            switched_on = is_active(toggled(device.state.power))
            if switched_on != (self.transition == Transition.ON):
                return False
        if self.luminosity is not None and not self.luminosity.accepts(outcome.luminosity):
            return False
        return True


Matcher.model_rebuild()


class RubricRule(_Frozen):
    grade: int = Field(ge=1, le=2)
    answer: str = ''
    match: Matcher


def grade_outcome(rubric: Sequence[RubricRule], outcome: DecisionOutcome, state: HouseState) -> int:
    ''' grade of the first matching rule, 0 when none matches '''
    for rule in rubric:
        if rule.match.matches(outcome, state):
            return rule.grade
    return 0


def bare_outcome(candidate: ActionCandidate) -> DecisionOutcome:
    ''' the candidate chosen without any optional key, as a random choice would be '''
    return DecisionOutcome(reasoning='', action=candidate)


def candidate_grades(scenario: 'ScenarioSpec') -> Tuple[List[ActionCandidate], np.ndarray]:
    candidates = build_actions(scenario.user_id, scenario.house)
    grades = np.array([grade_outcome(scenario.rubric, bare_outcome(candidate), scenario.house)
                       for candidate in candidates], dtype=np.int64)
    return candidates, grades


def noop_action_grade(scenario: 'ScenarioSpec') -> int:
    candidates, grades = candidate_grades(scenario)
    for candidate, grade in zip(candidates, grades):
        if candidate.code == ActionCode.NO_ACTION:
            return int(grade)
    return 0


def rubric_counts(scenario: 'ScenarioSpec') -> RubricCounts:
    _, grades = candidate_grades(scenario)
    return RubricCounts(n_rated_1=int(np.sum(grades == 1)), n_rated_2=int(np.sum(grades == 2)),
                        n_total=int(grades.size))


def scenario_baseline(scenario: 'ScenarioSpec') -> Fraction:
    return baseline_grade(rubric_counts(scenario))


def simulate_random_grade(scenario: 'ScenarioSpec', draws: int, seed: int) -> float:
    ''' average rubric grade of `draws` uniformly random choices '''
    if draws < 1:
        raise ValueError('draws must be >= 1')
    candidates, grades = candidate_grades(scenario)
    picks = RandomPolicy(seed).sample(candidates, draws)
    return float(grades[picks].mean())
