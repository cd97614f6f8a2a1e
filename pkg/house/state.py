# -*- coding: utf-8 -*-

from typing import TYPE_CHECKING

from utils.errors import ApplyError
from .actions import ActionCode
from .model import HVAC_CATEGORY, LIGHT_CATEGORIES, HouseState, is_active, toggled

if TYPE_CHECKING:
    from llm.outcome import DecisionOutcome


def apply_outcome(state: HouseState, outcome: 'DecisionOutcome') -> HouseState:
    '''
    Return the snapshot after executing a decision. Device actions toggle the power position and carry the
    optional luminosity (lights switched on) and setpoint (HVAC); meta actions only extend the history.
    '''
    action = outcome.action
    devices = state.devices
    if action.code == ActionCode.DEVICE_TOGGLE:
        device = state.devices.get(action.device_id)
        if device is None:
            raise ApplyError(f'outcome references unknown device {action.device_id}')
        if not device.is_actuator:
            raise ApplyError(f'device {device.id} is a sensor and cannot be switched')
        new_power = toggled(device.state.power)
        update = {'power': new_power}
        if outcome.luminosity is not None and device.category in LIGHT_CATEGORIES and is_active(new_power):
            update['luminosity'] = outcome.luminosity
        if outcome.temperature_setpoint is not None and device.category == HVAC_CATEGORY:
            update['setpoint'] = outcome.temperature_setpoint
        new_device = device.model_copy(update={'state': device.state.model_copy(update=update)})
        devices = dict(state.devices)
        devices[device.id] = new_device
    elif action.code not in (ActionCode.NO_ACTION, ActionCode.INTERACT_WITH_USER):
        raise ApplyError(f'unsupported action code {action.code}')

    return state.model_copy(update={'devices': devices,
                                    'action_history': state.action_history + (action.label,)})
