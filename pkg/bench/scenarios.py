# -*- coding: utf-8 -*-

"""
Benchmark scenarios. A scenario file is a JSON document next to the house fixtures:

    {
      "name": "Out of bed at night",
      "category": "Safety",
      "house": "../houses/out_of_bed_night.house",     relative to the scenario file
      "user_id": 1,
      "noop_grade": 0,                                 grade of "No action required", checked against the rubric
      "rubric": [{"grade": 2, "answer": "...", "match": {...}}, {"grade": 1, ...}],
      "labeled_outcomes": [{"reply": {"action": "floor lamp is Off"}, "grade": 2}, ...]
    }

Rubric rules are listed best grade first; anything no rule matches grades 0.
"""

import json
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from house import HouseState, load_house
from utils.errors import HouseLoadError, ScenarioLoadError
from .rubric import RubricRule, noop_action_grade

SCENARIO_SUFFIX = '.json'


class ScenarioCategory(str, Enum):
    SAFETY = 'Safety'
    COMFORT = 'Comfort'
    PREFERENCE = 'Preference'


# benchmark order
SCENARIO_CATEGORIES = {
    'Out of bed at night': ScenarioCategory.SAFETY,
    'Watching TV: late evening': ScenarioCategory.COMFORT,
    'Out from bed issue with CO2': ScenarioCategory.SAFETY,
    'Going back to bed at night': ScenarioCategory.SAFETY,
    'Evening sleeping: TV ON': ScenarioCategory.PREFERENCE,
    'At dinner watching TV': ScenarioCategory.PREFERENCE,
    'Forgot to turn off TV: user out': ScenarioCategory.COMFORT,
    'Too low temperature': ScenarioCategory.PREFERENCE,
    'Low luminosity day': ScenarioCategory.PREFERENCE,
    'Failed curtains': ScenarioCategory.COMFORT,
    'Forgot to turn off lights': ScenarioCategory.PREFERENCE,
}
SCENARIO_NAMES = tuple(SCENARIO_CATEGORIES)


class LabeledOutcome(BaseModel):
    model_config = ConfigDict(frozen=True, extra='forbid')

    reply: Dict[str, Any]
    grade: int = Field(ge=0, le=2)
    note: str = ''

    def reply_text(self, reasoning: str = 'labeled outcome') -> str:
        ''' the reply as a model would send it '''
        document = {'reasoning': reasoning}
        document.update(self.reply)
        return json.dumps(document, ensure_ascii=False)


class ScenarioSpec(BaseModel):
    model_config = ConfigDict(frozen=True, extra='forbid')

    name: str
    category: ScenarioCategory
    house: HouseState
    house_path: Optional[str] = None
    user_id: int
    noop_grade: int = Field(default=0, ge=0, le=2)
    rubric: Tuple[RubricRule, ...]
    labeled_outcomes: Tuple[LabeledOutcome, ...] = ()

    @model_validator(mode='after')
    def _check(self) -> 'ScenarioSpec':
        expected = SCENARIO_CATEGORIES.get(self.name)
        if expected is None:
            raise ValueError(f'unknown scenario name "{self.name}"')
        if expected != self.category:
            raise ValueError(f'scenario "{self.name}" belongs to {expected.value}, not {self.category.value}')
        grades = [rule.grade for rule in self.rubric]
        if grades != sorted(grades, reverse=True):
            raise ValueError('rubric rules must be ordered best grade first')
        try:
            self.house.user(self.user_id)
        except KeyError:
            raise ValueError(f'user {self.user_id} is not in the house')
        return self

    @property
    def order(self) -> int:
        return SCENARIO_NAMES.index(self.name)


def load_scenario(path) -> ScenarioSpec:
    path = Path(path)
    try:
        with path.open('rt', encoding='utf-8') as handle:
            document = json.load(handle)
    except FileNotFoundError as e:
        raise ScenarioLoadError(f'{path}: scenario file not found') from e
    except json.JSONDecodeError as e:
        raise ScenarioLoadError(f'{path}: not a valid JSON document (line {e.lineno}, column {e.colno})') from e
    except UnicodeDecodeError as e:
        raise ScenarioLoadError(f'{path}: not UTF-8 text ({e.reason} at byte {e.start})') from e
    except OSError as e:
        raise ScenarioLoadError(f'{path}: cannot read scenario file ({e.strerror or e})') from e
    if not isinstance(document, dict) or not isinstance(document.get('house'), str):
        raise ScenarioLoadError(f'{path}: "house" must name a house file')

    house_path = (path.parent / document['house']).resolve()
    try:
        house = load_house(house_path)
    except HouseLoadError as e:
        raise ScenarioLoadError(f'{path}: {e}') from e
    payload = dict(document, house=house, house_path=str(house_path))
    try:
        scenario = ScenarioSpec.model_validate(payload)
    except ValidationError as e:
        details = '\n'.join(f'  {".".join(str(p) for p in item["loc"]) or "<root>"}: {item["msg"]}'
                            for item in e.errors())
        raise ScenarioLoadError(f'{path}: invalid scenario\n{details}') from e

    actual = noop_action_grade(scenario)
    if actual != scenario.noop_grade:
        raise ScenarioLoadError(f'{path}: rubric grades "No action required" {actual}, '
                                f'noop_grade says {scenario.noop_grade}')
    return scenario


def load_scenarios(directory, names=None) -> List[ScenarioSpec]:
    '''
    every scenario file of a directory in benchmark order, optionally restricted to some names
    '''
    directory = Path(directory)
    if not directory.is_dir():
        raise ScenarioLoadError(f'{directory}: scenario directory not found')
    scenarios = [load_scenario(path) for path in sorted(directory.glob(f'*{SCENARIO_SUFFIX}'))]
    seen = {}
    for scenario in scenarios:
        if scenario.name in seen:
            raise ScenarioLoadError(f'scenario "{scenario.name}" is defined twice')
        seen[scenario.name] = scenario
    if names is not None:
        missing = [name for name in names if name not in seen]
        if missing:
            raise ScenarioLoadError(f'unknown scenario(s): {", ".join(missing)}')
        scenarios = [seen[name] for name in names]
    return sorted(scenarios, key=lambda scenario: scenario.order)
