# -*- coding: utf-8 -*-

import json
import logging
import threading
import time
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Callable, List, Optional, Sequence, Union

import requests

from utils.errors import BackendUnreachableError, ConfigError, GatewayError
from .messages import ChatMessage, GenerationParams, Role

logger = logging.getLogger(__name__)

DEFAULT_TIMEOUT = 120.0


class Backend(ABC):
    ''' anything that turns a list of chat messages into the assistant's text '''

    @abstractmethod
    def complete(self, messages: Sequence[ChatMessage], params: GenerationParams) -> str:
        pass


class HttpChatBackend(Backend):
    '''
    OpenAI-style chat-completions client for local inference servers.
    No retries: a retried call would hide failures from the failure ratio.
    '''

    def __init__(self, endpoint: str, model: str, api_key: Optional[str] = None, timeout: float = DEFAULT_TIMEOUT):
        self.url = self._completions_url(endpoint)
        self.model = model
        self.timeout = timeout
        self.session = requests.Session()
        if api_key:
            self.session.headers['Authorization'] = f'Bearer {api_key}'

    @staticmethod
    def _completions_url(endpoint: str) -> str:
        endpoint = endpoint.rstrip('/')
        if endpoint.endswith('/chat/completions'):
            return endpoint
        if endpoint.endswith('/v1'):
            return endpoint + '/chat/completions'
        return endpoint + '/v1/chat/completions'

    def complete(self, messages: Sequence[ChatMessage], params: GenerationParams) -> str:
        payload = {'model': self.model, 'messages': [message.to_wire() for message in messages], 'stream': False}
        payload.update(params.to_wire())
        started = time.perf_counter()
        try:
            response = self.session.post(self.url, json=payload, timeout=self.timeout)
            response.raise_for_status()
            data = response.json()
        except requests.ConnectionError as e:
            raise BackendUnreachableError(f'cannot reach {self.url}: {e}', time.perf_counter() - started) from e
        except requests.Timeout as e:
            raise GatewayError(f'{self.url} timed out after {self.timeout}s', time.perf_counter() - started) from e
        except (requests.RequestException, ValueError) as e:
            raise GatewayError(f'chat request to {self.url} failed: {e}', time.perf_counter() - started) from e

        try:
            content = data['choices'][0]['message']['content']
        except (KeyError, IndexError, TypeError) as e:
            raise GatewayError(f'malformed chat response from {self.url}', time.perf_counter() - started) from e
        if not isinstance(content, str):
            raise GatewayError(f'chat response from {self.url} has no text content', time.perf_counter() - started)
        return content


class ScriptedBackend(Backend):
    '''
    Replays canned replies in order and records every prompt it receives.
    A reply given as an exception instance is raised instead of returned; an exhausted queue raises
    GatewayError.
    '''

    def __init__(self, replies: Sequence[Union[str, Exception]] = (), path=None):
        self._replies: List[Union[str, Exception]] = list(replies)
        if path is not None:
            self._replies.extend(_read_script(path))
        self._position = 0
        self._lock = threading.Lock()
        self.prompts: List[List[ChatMessage]] = []

    @classmethod
    def from_file(cls, path) -> 'ScriptedBackend':
        return cls(path=path)

    @property
    def remaining(self) -> int:
        with self._lock:
            return len(self._replies) - self._position

    def complete(self, messages: Sequence[ChatMessage], params: GenerationParams) -> str:
        with self._lock:
            self.prompts.append(list(messages))
            if self._position >= len(self._replies):
                raise GatewayError('scripted backend has no replies left')
            reply = self._replies[self._position]
            self._position += 1
        if isinstance(reply, Exception):
            raise reply
        return reply


def _read_script(path) -> List[Union[str, Exception]]:
    '''
    JSON list; strings are replies, objects are {"reply": {...}} (serialised to JSON text),
    {"error": "message"} (a failed call) or {"unreachable": "message"} (the server is gone).
    '''
    try:
        with Path(path).open('rt', encoding='utf-8') as handle:
            items = json.load(handle)
    except (OSError, ValueError) as e:
        raise ConfigError(f'{path}: cannot read scripted replies: {e}') from e
    if not isinstance(items, list):
        raise ConfigError(f'{path}: scripted replies must be a JSON list')
    return [_scripted_item(item) for item in items]


def _scripted_item(item) -> Union[str, Exception]:
    if isinstance(item, str):
        return item
    if isinstance(item, dict) and 'reply' in item:
        return json.dumps(item['reply'], ensure_ascii=False)
    if isinstance(item, dict) and 'error' in item:
        return GatewayError(str(item['error']))
    if isinstance(item, dict) and 'unreachable' in item:
        return BackendUnreachableError(str(item['unreachable']))
    raise ConfigError(f'unsupported scripted reply item: {item!r}')


def complete(backend: Backend, messages: Sequence[ChatMessage], params: GenerationParams, trace=None,
             clock: Callable[[], float] = time.perf_counter) -> str:
    '''
    One model call. The call's wall-clock duration is recorded in `trace`; failures raise GatewayError
    carrying the elapsed time.
    '''
    if not messages:
        raise ValueError('complete() needs at least one message')
    if messages[0].role != Role.SYSTEM:
        raise ValueError('the first message must be the system prompt')
    started = clock()
    try:
        reply = backend.complete(messages, params)
    except GatewayError as e:
        if not e.elapsed:
            e.elapsed = clock() - started
        logger.warning('LLM call failed after %.2fs: %s', e.elapsed, e)
        raise
    seconds = clock() - started
    if trace is not None:
        trace.record_call(messages, reply, seconds)
    logger.debug('LLM call finished in %.3fs (%d characters)', seconds, len(reply))
    return reply
