# -*- coding: utf-8 -*-

"""
House schema files (``*.house``): one JSON document per house.

    {
      "clock": "22:21",                      24h wall time
      "inside_temp_c": 20, "outside_temp_c": 5,
      "cleaning": {"last_cleaned": "today", "cadence": "one time a week"},
      "action_history": ["TV is On"],
      "users": [{"user_id": 1, "location": "livingroom",
                 "current_activity": "watching TV", "activity_history": ["..."]}],
      "rooms": [{"id": "livingroom", "name": "Livingroom",
                 "devices": [{"id": "...", "name": "...", "kind": "Actuator", "category": "MainLight",
                              "state": {"power": "Off", "luminosity": 40}}]}],
      "global_devices": [{"id": "hvac", ..., "state": {"power": "On", "setpoint": 20}}]
    }

Sensor readings are written as ``{"value": 513, "unit": "ppm"}`` or as a bare number, in which case the
category's default unit is used.
"""

import json
from pathlib import Path
from typing import Any, Dict

from pydantic import ValidationError

from utils.errors import HouseLoadError
from .model import DEFAULT_UNITS, GLOBAL_LOCATION, DeviceCategory, HouseState

_TOP_LEVEL_KEYS = {'clock', 'inside_temp_c', 'outside_temp_c', 'cleaning', 'action_history', 'users', 'rooms',
                   'global_devices'}


def load_house(path) -> HouseState:
    path = Path(path)
    try:
        with path.open('rt', encoding='utf-8') as handle:
            document = json.load(handle)
    except FileNotFoundError as e:
        raise HouseLoadError(f'{path}: house file not found') from e
    except json.JSONDecodeError as e:
        raise HouseLoadError(f'{path}: not a valid JSON document (line {e.lineno}, column {e.colno})') from e
    except UnicodeDecodeError as e:
        raise HouseLoadError(f'{path}: not UTF-8 text ({e.reason} at byte {e.start})') from e
    except OSError as e:
        raise HouseLoadError(f'{path}: cannot read house file ({e.strerror or e})') from e
    return house_from_document(document, source=str(path))


def house_from_document(document: Dict[str, Any], source: str = '<document>') -> HouseState:
    if not isinstance(document, dict):
        raise HouseLoadError(f'{source}: top level must be an object')
    unknown = set(document) - _TOP_LEVEL_KEYS
    if unknown:
        raise HouseLoadError(f'{source}: unknown top-level field(s) {", ".join(sorted(unknown))}')

    devices: Dict[str, Dict[str, Any]] = {}
    seen_at: Dict[str, str] = {}

    def collect(device_docs, location, where):
        if not isinstance(device_docs, list):
            raise HouseLoadError(f'{source}: {where} must be a list')
        ids = []
        for index, raw in enumerate(device_docs):
            at = f'{where}[{index}]'
            if not isinstance(raw, dict):
                raise HouseLoadError(f'{source}: {at} must be an object')
            device_id = raw.get('id')
            if not isinstance(device_id, str) or not device_id:
                raise HouseLoadError(f'{source}: {at}.id is missing or empty')
            if device_id in devices:
                raise HouseLoadError(f'{source}: duplicate device id "{device_id}" at {at} '
                                     f'(first declared at {seen_at[device_id]})')
            devices[device_id] = _normalise_device(raw, location, f'{source}: {at}')
            seen_at[device_id] = at
            ids.append(device_id)
        return ids

    room_docs = document.get('rooms', [])
    if not isinstance(room_docs, list):
        raise HouseLoadError(f'{source}: rooms must be a list')
    rooms = []
    for index, room in enumerate(room_docs):
        if not isinstance(room, dict):
            raise HouseLoadError(f'{source}: rooms[{index}] must be an object')
        room_id = room.get('id')
        if not isinstance(room_id, str):
            raise HouseLoadError(f'{source}: rooms[{index}].id is missing')
        device_ids = collect(room.get('devices', []), room_id, f'rooms[{index}].devices')
        rooms.append({'id': room_id, 'name': room.get('name', room_id), 'device_ids': device_ids})
    global_ids = collect(document.get('global_devices', []), GLOBAL_LOCATION, 'global_devices')

    payload = {
        'rooms': rooms,
        'devices': devices,
        'global_device_ids': global_ids,
        'users': document.get('users', []),
        'action_history': document.get('action_history', []),
        'cleaning_note': document.get('cleaning', {}),
    }
    for key in ('clock', 'inside_temp_c', 'outside_temp_c'):
        if key in document:
            payload[key] = document[key]
    try:
        return HouseState.model_validate(payload)
    except ValidationError as e:
        raise HouseLoadError(f'{source}: invalid house\n{_describe(e)}') from e


def _normalise_device(raw: Dict[str, Any], location: str, where: str) -> Dict[str, Any]:
    device = dict(raw)
    device['location'] = location
    state = device.get('state') or {}
    if not isinstance(state, dict):
        raise HouseLoadError(f'{where}.state must be an object such as {{"power": "On"}}, got {state!r}')
    state = dict(state)
    reading = state.get('reading')
    if isinstance(reading, (int, float)) and not isinstance(reading, bool):
        try:
            unit = DEFAULT_UNITS.get(DeviceCategory(device.get('category')), '')
        except ValueError:
            unit = ''
        state['reading'] = {'value': reading, 'unit': unit}
    device['state'] = state
    return device


def _describe(error: ValidationError) -> str:
    lines = []
    for item in error.errors():
        location = '.'.join(str(part) for part in item['loc']) or '<root>'
        lines.append(f'  {location}: {item["msg"]}')
    return '\n'.join(lines)


def house_to_document(state: HouseState) -> Dict[str, Any]:
    def device_doc(device):
        doc = {'id': device.id, 'name': device.name, 'kind': device.kind.value,
               'category': device.category.value, 'state': state_document(device.state)}
        return doc

    return {
        'clock': state.clock.strftime('%H:%M'),
        'inside_temp_c': state.inside_temp_c,
        'outside_temp_c': state.outside_temp_c,
        'cleaning': {'last_cleaned': state.cleaning_note.last_cleaned, 'cadence': state.cleaning_note.cadence},
        'action_history': list(state.action_history),
        'users': [{'user_id': user.user_id, 'location': user.location,
                   'current_activity': user.current_activity,
                   'activity_history': list(user.activity_history)} for user in state.users],
        'rooms': [{'id': room.id, 'name': room.name,
                   'devices': [device_doc(device) for device in state.room_devices(room)]}
                  for room in state.rooms],
        'global_devices': [device_doc(device) for device in state.global_devices()],
    }


def state_document(device_state) -> Dict[str, Any]:
    doc: Dict[str, Any] = {}
    if device_state.power is not None:
        doc['power'] = device_state.power.value
    if device_state.luminosity is not None:
        doc['luminosity'] = device_state.luminosity
    if device_state.setpoint is not None:
        doc['setpoint'] = device_state.setpoint
    if device_state.reading is not None:
        value = device_state.reading.value
        doc['reading'] = {'value': int(value) if float(value).is_integer() else value,
                          'unit': device_state.reading.unit}
    return doc


def save_house(state: HouseState, path) -> None:
    path = Path(path)
    with path.open('wt', encoding='utf-8') as handle:
        json.dump(house_to_document(state), handle, indent=2, ensure_ascii=False)
        handle.write('\n')

