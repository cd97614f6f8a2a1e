# -*- coding: utf-8 -*-

"""
Context rendering of a house snapshot, as natural sentences or as a JSON document.
Both renderings are deterministic: rooms in declaration order, and within a room curtains, lights, TV,
other actuators, then sensors.
"""

import json
from enum import Enum
from typing import Any, Dict, List

from .loader import state_document
from .model import (DeviceCategory, Device, HouseState, LIGHT_CATEGORIES, Room)

HEADER = 'Current State of the House:'


class Representation(str, Enum):
    NATURAL = 'natural'
    JSON = 'json'


def render(state: HouseState, rep: Representation) -> str:
    rep = Representation(rep)
    if rep == Representation.JSON:
        return _dump(_house_json(state))
    return _render_natural(state)


def render_room(room: Room, state: HouseState, rep: Representation) -> str:
    rep = Representation(rep)
    if rep == Representation.JSON:
        return _dump(_room_json(room, state))
    return '\n'.join(_room_lines(room, state))


def format_number(value) -> str:
    value = float(value)
    if value.is_integer():
        return str(int(value))
    return f'{value:g}'


def format_clock(clock) -> str:
    suffix = 'AM' if clock.hour < 12 else 'PM'
    hour = clock.hour % 12 or 12
    return f'{hour}:{clock.minute:02d} {suffix}'


# natural representation

def _render_natural(state: HouseState) -> str:
    lines = [HEADER]
    lines.extend(_user_lines(state))
    if state.action_history:
        lines.append('Previous actions: ' + ', then '.join(state.action_history) + '.')
    for room in state.rooms:
        lines.append('')
        lines.extend(_room_lines(room, state))
    lines.append('')
    note = state.cleaning_note
    if note.last_cleaned:
        lines.append(f'House was cleaned {note.last_cleaned}.')
    if note.cadence:
        lines.append(f'Expected cleaning {note.cadence}.')
    for device in state.global_devices():
        lines.append(_device_sentence(device, in_room=False))
    lines.append(f'Time: {format_clock(state.clock)}')
    lines.append(f'Global house temperature is {state.inside_temp_c}°C,')
    lines.append(f'outside temperature is {state.outside_temp_c}°C.')
    return '\n'.join(lines) + '\n'


def _user_lines(state: HouseState) -> List[str]:
    lines = []
    several = len(state.users) > 1
    for user in state.users:
        subject = f'User {user.user_id}' if several else 'User'
        lines.append(f'User {user.user_id} is in the {state.room(user.location).name}.')
        if user.current_activity:
            lines.append(f'{subject} is {user.current_activity}.')
        if user.activity_history:
            lines.append(f'Previously: {subject} was ' + ', then '.join(user.activity_history))
    return lines


def _power_word(device: Device) -> str:
    word = device.state.power.value
    if device.category in LIGHT_CATEGORIES and device.state.luminosity is not None:
        word = f'{word} at {device.state.luminosity}%'
    return word


def _grouped(label: str, devices: List[Device], plural_verb: bool) -> str:
    names = ', '.join(device.name for device in devices)
    states = ', '.join(_power_word(device) for device in devices)
    if len(devices) == 1 and not plural_verb:
        return f'{label} are {states}.'
    if len(devices) == 1:
        return f'{label}: {names} are {states}.'
    return f'{label}: {names} are respectively {states}.'


def _room_order(device: Device) -> int:
    if not device.is_actuator:
        return 4
    if device.category == DeviceCategory.CURTAINS:
        return 0
    if device.category in LIGHT_CATEGORIES:
        return 1
    if device.category == DeviceCategory.TV:
        return 2
    return 3


def _room_lines(room: Room, state: HouseState) -> List[str]:
    devices = sorted(state.room_devices(room), key=_room_order)
    curtains = [d for d in devices if d.is_actuator and d.category == DeviceCategory.CURTAINS]
    lights = [d for d in devices if d.is_actuator and d.category in LIGHT_CATEGORIES]
    others = [d for d in devices if d not in curtains and d not in lights]

    header = f'{room.name}:'
    if curtains:
        # a lone device called "curtains" reads "Curtains are Closed."
        unnamed = len(curtains) == 1 and curtains[0].name.lower() == 'curtains'
        header += ' ' + _grouped('Curtains', curtains, plural_verb=not unnamed)
    lines = [header]
    if lights:
        lines.append(_grouped('Lights', lights, plural_verb=True))
    lines.extend(_device_sentence(device, in_room=True) for device in others)
    return lines


def _device_sentence(device: Device, in_room: bool) -> str:
    state = device.state
    category = device.category
    if device.is_actuator:
        power = state.power.value.lower()
        if category == DeviceCategory.TV:
            if device.name.lower() == 'tv':
                return f'There is a TV in the room and its state is {power}.'
            return f'There is a TV named {device.name} in the room and its state is {power}.'
        if category == DeviceCategory.HVAC:
            if state.setpoint is not None:
                return f'{device.name} is {power} with objective to {state.setpoint}°C.'
            return f'{device.name} is {power}.'
        if category == DeviceCategory.SMART_DOOR:
            return f'{device.name} is {power}.'
        return f'{device.name} is {_power_word(device)}.'

    value = format_number(state.reading.value)
    if in_room and category == DeviceCategory.CO2_SENSOR:
        return f'CO2 level in room is {value}ppm.'
    if in_room and category == DeviceCategory.TEMPERATURE_SENSOR:
        return f'Temperature in room is {value}°C.'
    if in_room and category == DeviceCategory.HUMIDITY_SENSOR:
        return f'Humidity in room is {value}%.'
    return f'{device.name} is {value}{state.reading.unit}.'


# json representation

def _dump(document: Dict[str, Any]) -> str:
    return json.dumps(document, indent=2, ensure_ascii=False) + '\n'


def _device_json(device: Device) -> Dict[str, Any]:
    return {'id': device.id, 'name': device.name, 'kind': device.kind.value, 'category': device.category.value,
            'state': state_document(device.state)}


def _room_json(room: Room, state: HouseState) -> Dict[str, Any]:
    return {'name': room.name, 'devices': [_device_json(device) for device in state.room_devices(room)]}


def _house_json(state: HouseState) -> Dict[str, Any]:
    return {
        'users': [{'user_id': user.user_id,
                   'location': state.room(user.location).name,
                   'current_activity': user.current_activity,
                   'activity_history': list(user.activity_history)} for user in state.users],
        'action_history': list(state.action_history),
        'rooms': [_room_json(room, state) for room in state.rooms],
        'global_devices': [_device_json(device) for device in state.global_devices()],
        'cleaning': {'last_cleaned': state.cleaning_note.last_cleaned,
                     'cadence': state.cleaning_note.cadence},
        'time': format_clock(state.clock),
        'inside_temperature_c': state.inside_temp_c,
        'outside_temperature_c': state.outside_temp_c,
    }
