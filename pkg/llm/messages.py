# -*- coding: utf-8 -*-

from dataclasses import asdict, dataclass
from enum import Enum
from typing import Any, Dict, Optional


class Role(str, Enum):
    SYSTEM = 'system'
    USER = 'user'
    ASSISTANT = 'assistant'


@dataclass(frozen=True)
class ChatMessage:
    role: Role
    content: str

    def __post_init__(self):
        object.__setattr__(self, 'role', Role(self.role))
        if self.role in (Role.SYSTEM, Role.USER) and not self.content:
            raise ValueError(f'{self.role.value} message content must not be empty')

    def to_wire(self) -> Dict[str, str]:
        return {'role': self.role.value, 'content': self.content}


def system(content: str) -> ChatMessage:
    return ChatMessage(Role.SYSTEM, content)


def user(content: str) -> ChatMessage:
    return ChatMessage(Role.USER, content)


def assistant(content: str) -> ChatMessage:
    return ChatMessage(Role.ASSISTANT, content)


@dataclass(frozen=True)
class GenerationParams:
    max_tokens: int = 300
    min_p: float = 0.05
    temperature: float = 0.2
    # forwarded only when set; servers that do not know it ignore it
    seed: Optional[int] = None

    def __post_init__(self):
        if self.max_tokens < 1:
            raise ValueError('max_tokens must be >= 1')
        if not 0.0 <= self.min_p <= 1.0:
            raise ValueError('min_p must be within [0, 1]')
        if self.temperature < 0:
            raise ValueError('temperature must be >= 0')

    def to_wire(self) -> Dict[str, Any]:
        wire = asdict(self)
        if self.seed is None:
            del wire['seed']
        return wire
