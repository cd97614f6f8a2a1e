# -*- coding: utf-8 -*-

from .messages import Role, ChatMessage, GenerationParams
from .trace import ChainTrace, LlmCall, RetrievalQuery
from .backends import Backend, HttpChatBackend, ScriptedBackend, complete
from .outcome import DecisionOutcome, FAILURE_MESSAGE, parse_outcome, failed_outcome, extract_first_object
