# -*- coding: utf-8 -*-

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from .messages import ChatMessage


@dataclass(frozen=True)
class LlmCall:
    messages: Tuple[ChatMessage, ...]
    reply: str
    seconds: float


@dataclass(frozen=True)
class RetrievalQuery:
    query: str
    entries: Tuple  # of PreferenceEntry


@dataclass
class ChainTrace:
    '''
    Everything one decision did: model calls with their latency, retrieval queries, warnings raised while
    reading the reply and the transport error that stopped the chain, if any.
    '''
    llm_calls: List[LlmCall] = field(default_factory=list)
    retrieval_queries: List[RetrievalQuery] = field(default_factory=list)
    total_seconds: float = 0.0
    warnings: List[str] = field(default_factory=list)
    error: Optional[Exception] = None

    def record_call(self, messages, reply: str, seconds: float):
        self.llm_calls.append(LlmCall(tuple(messages), reply, seconds))

    def record_retrieval(self, query: str, entries):
        self.retrieval_queries.append(RetrievalQuery(query, tuple(entries)))

    @property
    def llm_seconds(self) -> float:
        return sum(call.seconds for call in self.llm_calls)

    def summary(self) -> dict:
        return {
            'llm_calls': len(self.llm_calls),
            'llm_call_seconds': [round(call.seconds, 4) for call in self.llm_calls],
            'retrieval_queries': [{'query': q.query, 'results': len(q.entries)} for q in self.retrieval_queries],
            'total_seconds': round(self.total_seconds, 4),
            'warnings': list(self.warnings),
            'error': None if self.error is None else str(self.error),
        }
