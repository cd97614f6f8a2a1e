# -*- coding: utf-8 -*-

"""
Action builder: the filtered list of actions offered to the model for one user, and the random-choice
baseline computed over that list.
"""

from collections import Counter
from dataclasses import dataclass
from enum import IntEnum
from fractions import Fraction
from typing import List, Optional, Sequence

import numpy as np

from utils.errors import BaselineError, BuildError
from .model import HouseState, is_active

INTERACT_LABEL = 'Interact with user'
NO_ACTION_LABEL = 'No action required'


class ActionCode(IntEnum):
    NO_ACTION = 0
    DEVICE_TOGGLE = 1
    INTERACT_WITH_USER = 2


@dataclass(frozen=True)
class ActionCandidate:
    code: ActionCode
    label: str
    device_id: Optional[str] = None
    device_name: Optional[str] = None

    def __post_init__(self):
        if (self.code == ActionCode.DEVICE_TOGGLE) != (self.device_id is not None):
            raise ValueError('device_id must be set exactly for device actions')


INTERACT_ACTION = ActionCandidate(ActionCode.INTERACT_WITH_USER, INTERACT_LABEL)
NO_ACTION = ActionCandidate(ActionCode.NO_ACTION, NO_ACTION_LABEL)


def build_actions(user_id: int, state: HouseState) -> List[ActionCandidate]:
    '''
    Actuators in the user's room or global are always offered; an actuator elsewhere is offered only when
    its power is in the active position, so that it can be switched off.
    Labels read "<name> is <state>"; names shared by two offered devices are prefixed by the room name.
    '''
    try:
        user = state.user(user_id)
    except KeyError:
        raise BuildError(f'unknown user id {user_id}')

    eligible = []
    for device in state.ordered_devices():
        if not device.is_actuator:
            continue
        if device.location == user.location or device.is_global or is_active(device.state.power):
            eligible.append(device)

    name_counts = Counter(device.name.lower() for device in eligible)
    candidates = []
    for device in eligible:
        name = device.name
        if name_counts[name.lower()] > 1 and not device.is_global:
            name = f'{state.location_name(device.location)} {device.name}'
        label = f'{name} is {device.state.power.value}'
        candidates.append(ActionCandidate(ActionCode.DEVICE_TOGGLE, label, device.id, device.name))
    labels = [candidate.label for candidate in candidates]
    if len(set(labels)) != len(labels):
        raise BuildError(f'action labels are not unique for user {user_id}: {labels}')

    candidates.append(INTERACT_ACTION)
    candidates.append(NO_ACTION)
    return candidates


def count_raw_actions(state: HouseState) -> int:
    ''' size of the unfiltered action space: one toggle per actuator plus the two meta actions '''
    return sum(1 for device in state.devices.values() if device.is_actuator) + 2


@dataclass(frozen=True)
class RubricCounts:
    n_rated_1: int
    n_rated_2: int
    n_total: int

    def __post_init__(self):
        if min(self.n_rated_1, self.n_rated_2, self.n_total) < 0:
            raise BaselineError('rubric counts must be non-negative')
        if self.n_rated_1 + self.n_rated_2 > self.n_total:
            raise BaselineError('more rated actions than actions')


def baseline_grade(counts: RubricCounts) -> Fraction:
    ''' expected grade of a uniformly random action choice '''
    if counts.n_total == 0:
        raise BaselineError('baseline of an empty action list is undefined')
    return Fraction(counts.n_rated_1 + 2 * counts.n_rated_2, counts.n_total)


class RandomPolicy:
    '''
    Uniform choice among candidates with its own seeded generator.
    '''

    def __init__(self, seed: int):
        self.seed = seed
        self._rng = np.random.default_rng(seed)

    def choose(self, candidates: Sequence[ActionCandidate]) -> ActionCandidate:
        if not candidates:
            raise ValueError('cannot choose from an empty candidate list')
        return candidates[int(self._rng.integers(len(candidates)))]

    def sample(self, candidates: Sequence[ActionCandidate], draws: int) -> np.ndarray:
        ''' indices of `draws` independent uniform choices '''
        if not candidates:
            raise ValueError('cannot choose from an empty candidate list')
        return self._rng.integers(len(candidates), size=draws)


def random_policy(seed: int, candidates: Sequence[ActionCandidate]) -> ActionCandidate:
    return RandomPolicy(seed).choose(candidates)
