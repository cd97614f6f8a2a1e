# -*- coding: utf-8 -*-

"""
Immutable domain model of the smart home.

Every model is a frozen pydantic model; operations that change the home return new snapshots
through ``model_copy(update=...)``.
"""

from __future__ import annotations

from datetime import time
from enum import Enum
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

GLOBAL_LOCATION = 'global'


class DeviceKind(str, Enum):
    SENSOR = 'Sensor'
    ACTUATOR = 'Actuator'


class DeviceCategory(str, Enum):
    MAIN_LIGHT = 'MainLight'
    AUXILIARY_LIGHT = 'AuxiliaryLight'
    TV = 'Tv'
    CURTAINS = 'Curtains'
    HVAC = 'Hvac'
    SMART_DOOR = 'SmartDoor'
    CO2_SENSOR = 'Co2Sensor'
    TEMPERATURE_SENSOR = 'TemperatureSensor'
    HUMIDITY_SENSOR = 'HumiditySensor'
    GENERIC = 'Generic'


class Power(str, Enum):
    ON = 'On'
    OFF = 'Off'
    OPEN = 'Open'
    CLOSED = 'Closed'
    LOCKED = 'Locked'
    UNLOCKED = 'Unlocked'


HVAC_CATEGORY = DeviceCategory.HVAC
LIGHT_CATEGORIES = frozenset({DeviceCategory.MAIN_LIGHT, DeviceCategory.AUXILIARY_LIGHT})
SENSOR_CATEGORIES = frozenset({DeviceCategory.CO2_SENSOR, DeviceCategory.TEMPERATURE_SENSOR,
                               DeviceCategory.HUMIDITY_SENSOR})

# active position first, inactive second
SWITCH_PAIRS = {
    Power.ON: Power.OFF, Power.OFF: Power.ON,
    Power.OPEN: Power.CLOSED, Power.CLOSED: Power.OPEN,
    Power.UNLOCKED: Power.LOCKED, Power.LOCKED: Power.UNLOCKED,
}
ACTIVE_POWERS = frozenset({Power.ON, Power.OPEN, Power.UNLOCKED})

LEGAL_POWERS = {
    DeviceCategory.MAIN_LIGHT: {Power.ON, Power.OFF},
    DeviceCategory.AUXILIARY_LIGHT: {Power.ON, Power.OFF},
    DeviceCategory.TV: {Power.ON, Power.OFF},
    DeviceCategory.HVAC: {Power.ON, Power.OFF},
    DeviceCategory.CURTAINS: {Power.OPEN, Power.CLOSED},
    DeviceCategory.SMART_DOOR: {Power.LOCKED, Power.UNLOCKED},
    DeviceCategory.GENERIC: {Power.ON, Power.OFF, Power.OPEN, Power.CLOSED},
}

DEFAULT_UNITS = {
    DeviceCategory.CO2_SENSOR: 'ppm',
    DeviceCategory.TEMPERATURE_SENSOR: '°C',
    DeviceCategory.HUMIDITY_SENSOR: '%RH',
}


def is_active(power: Optional[Power]) -> bool:
    return power in ACTIVE_POWERS


def toggled(power: Power) -> Power:
    return SWITCH_PAIRS[power]


class _Frozen(BaseModel):
    model_config = ConfigDict(frozen=True, extra='forbid', use_enum_values=False)


class Reading(_Frozen):
    value: float
    unit: str


class DeviceState(_Frozen):
    power: Optional[Power] = None
    luminosity: Optional[int] = Field(default=None, ge=0, le=100)
    setpoint: Optional[int] = None
    reading: Optional[Reading] = None


class Device(_Frozen):
    id: str = Field(min_length=1)
    name: str = Field(min_length=1)
    kind: DeviceKind
    category: DeviceCategory
    location: str
    state: DeviceState = DeviceState()

    @model_validator(mode='after')
    def _check_state(self) -> 'Device':
        state = self.state
        if state.luminosity is not None and self.category not in LIGHT_CATEGORIES:
            raise ValueError(f'luminosity is only allowed on lights, not on {self.category.value}')
        if state.setpoint is not None and self.category != DeviceCategory.HVAC:
            raise ValueError(f'setpoint is only allowed on Hvac, not on {self.category.value}')
        if self.kind == DeviceKind.SENSOR:
            if self.category not in SENSOR_CATEGORIES and self.category != DeviceCategory.GENERIC:
                raise ValueError(f'category {self.category.value} cannot be a sensor')
            if state.power is not None:
                raise ValueError('sensors carry a reading, not a power state')
            if state.reading is None:
                raise ValueError('sensor state requires a reading')
            if state.reading.unit == 'ppm' and state.reading.value < 0:
                raise ValueError('ppm reading must be >= 0')
        else:
            if state.reading is not None:
                raise ValueError('reading is only allowed on sensors')
            if state.power is None:
                raise ValueError('actuator state requires a power value')
            legal = LEGAL_POWERS.get(self.category)
            if legal is None:
                raise ValueError(f'category {self.category.value} cannot be an actuator')
            if state.power not in legal:
                allowed = ', '.join(sorted(p.value for p in legal))
                raise ValueError(f'power {state.power.value} is not legal for {self.category.value} ({allowed})')
        return self

    @property
    def is_actuator(self) -> bool:
        return self.kind == DeviceKind.ACTUATOR

    @property
    def is_global(self) -> bool:
        return self.location == GLOBAL_LOCATION


class Room(_Frozen):
    id: str = Field(min_length=1)
    name: str = Field(min_length=1)
    device_ids: Tuple[str, ...] = ()


class UserState(_Frozen):
    user_id: int
    location: str
    current_activity: str = ''
    activity_history: Tuple[str, ...] = ()


class CleaningNote(_Frozen):
    last_cleaned: str = ''
    cadence: str = ''


class HouseState(_Frozen):
    rooms: Tuple[Room, ...] = ()
    devices: Dict[str, Device] = Field(default_factory=dict)
    global_device_ids: Tuple[str, ...] = ()
    users: Tuple[UserState, ...] = ()
    action_history: Tuple[str, ...] = ()
    clock: time = time(0, 0)
    inside_temp_c: int = 20
    outside_temp_c: int = 10
    cleaning_note: CleaningNote = CleaningNote()

    @field_validator('clock', mode='before')
    @classmethod
    def _parse_clock(cls, value):
        if isinstance(value, str):
            try:
                hours, minutes = value.split(':')
                return time(int(hours), int(minutes))
            except ValueError as e:
                raise ValueError(f'clock must be HH:MM (24h), got {value!r}') from e
        return value

    @model_validator(mode='after')
    def _check_references(self) -> 'HouseState':
        room_ids = [room.id for room in self.rooms]
        if len(set(room_ids)) != len(room_ids):
            raise ValueError('room ids must be unique')
        if GLOBAL_LOCATION in room_ids:
            raise ValueError(f'"{GLOBAL_LOCATION}" is reserved and cannot be a room id')
        placed = []
        for room in self.rooms:
            for device_id in room.device_ids:
                device = self.devices.get(device_id)
                if device is None:
                    raise ValueError(f'room {room.id} references unknown device {device_id}')
                if device.location != room.id:
                    raise ValueError(f'device {device_id} is listed in room {room.id} but located in {device.location}')
                placed.append(device_id)
        for device_id in self.global_device_ids:
            device = self.devices.get(device_id)
            if device is None or not device.is_global:
                raise ValueError(f'global device list references {device_id}, which is not a global device')
            placed.append(device_id)
        if len(placed) != len(set(placed)) or set(placed) != set(self.devices):
            raise ValueError('every device must be placed exactly once, in a room or in the global list')
        for key, device in self.devices.items():
            if key != device.id:
                raise ValueError(f'device map key {key} does not match device id {device.id}')
        user_ids = [user.user_id for user in self.users]
        if len(set(user_ids)) != len(user_ids):
            raise ValueError('user ids must be unique')
        for user in self.users:
            if user.location not in room_ids:
                raise ValueError(f'user {user.user_id} is located in unknown room {user.location}')
        return self

    def room(self, room_id: str) -> Room:
        for room in self.rooms:
            if room.id == room_id:
                return room
        raise KeyError(room_id)

    def user(self, user_id: int) -> UserState:
        for user in self.users:
            if user.user_id == user_id:
                return user
        raise KeyError(user_id)

    def room_devices(self, room: Room) -> List[Device]:
        return [self.devices[device_id] for device_id in room.device_ids]

    def global_devices(self) -> List[Device]:
        return [self.devices[device_id] for device_id in self.global_device_ids]

    def ordered_devices(self) -> List[Device]:
        ''' declaration order: rooms first, then global devices '''
        ordered = []
        for room in self.rooms:
            ordered.extend(self.room_devices(room))
        ordered.extend(self.global_devices())
        return ordered

    def location_name(self, location: str) -> str:
        if location == GLOBAL_LOCATION:
            return 'Global'
        return self.room(location).name
