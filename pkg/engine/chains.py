# -*- coding: utf-8 -*-

import logging
import re
import time
from enum import Enum
from typing import Callable, List, Optional, Sequence, Tuple

from house import HouseState, Representation, build_actions, render
from house.actions import ActionCandidate
from llm import ChainTrace, DecisionOutcome, GenerationParams, complete, failed_outcome, parse_outcome
from llm.backends import Backend
from llm.messages import ChatMessage, assistant, system, user
from retrieval import Embedder, VectorIndex, query_top_k
from retrieval.preferences import PreferenceEntry, deduplicate, format_for_prompt
from utils.errors import GatewayError, RetrievalError
from .prompts import NO_PREFERENCES, PromptTemplates, default_templates, format_answers, format_candidates

logger = logging.getLogger(__name__)

RETRIEVAL_K = 3
MAX_PROBLEMS = 3

_LIST_ITEM = re.compile(r'^\s*(?:\d+\s*[.)]|[-*•])\s*(.*?)\s*$')


class PromptStyle(str, Enum):
    DIRECT = 'direct'
    DIRECT_PREF = 'directPref'
    OPEN_QUESTION = 'OpenQuestion'
    THREE_QUESTION = 'ThreeQuestion'


# model calls made by one decision of each style, whatever the replies are
EXPECTED_CALLS = {
    PromptStyle.DIRECT: 1,
    PromptStyle.DIRECT_PREF: 1,
    PromptStyle.OPEN_QUESTION: 2,
    PromptStyle.THREE_QUESTION: 4,
}


def parse_problems(raw: str) -> List[str]:
    '''
    Up to three items of a numbered or bulleted list. A reply without list items is one problem.
    '''
    items = []
    for line in raw.splitlines():
        match = _LIST_ITEM.match(line)
        if match is None:
            continue
        item = match.group(1).strip()
        if item:
            items.append(item)
    if items:
        return items[:MAX_PROBLEMS]
    whole = raw.strip()
    return [whole] if whole else []


class _Chain:
    ''' the state shared by the steps of one decision '''

    def __init__(self, backend: Backend, params: GenerationParams, trace: ChainTrace, clock, templates):
        self.backend = backend
        self.params = params
        self.trace = trace
        self.clock = clock
        self.templates = templates

    def ask(self, messages: Sequence[ChatMessage]) -> str:
        return complete(self.backend, list(messages), self.params, trace=self.trace, clock=self.clock)

    def retrieve(self, problems: Sequence[str], prefs: Optional[VectorIndex], embedder: Embedder,
                 k: int) -> List[PreferenceEntry]:
        found = []
        for problem in problems:
            entries = query_top_k(prefs, problem, k, embedder) if prefs is not None else []
            self.trace.record_retrieval(problem, entries)
            found.extend(entries)
        return deduplicate(found)


def _preferences_text(entries) -> str:
    return format_for_prompt(entries) or NO_PREFERENCES


def _direct(chain: _Chain, context: str, candidates: str, prefs, embedder, k) -> str:
    messages = [system(chain.templates.fill('system')),
                user(chain.templates.fill('direct', context=context, candidates=candidates))]
    return chain.ask(messages)


def _direct_pref(chain: _Chain, context: str, candidates: str, prefs, embedder, k) -> str:
    entries = prefs.entries if prefs is not None else ()
    messages = [system(chain.templates.fill('system_pref', preferences=_preferences_text(entries))),
                user(chain.templates.fill('direct', context=context, candidates=candidates))]
    return chain.ask(messages)


def _problems_step(chain: _Chain, context: str, candidates: str, prefs, embedder, k):
    opening = [system(chain.templates.fill('system')),
               user(chain.templates.fill('problems', context=context, candidates=candidates))]
    reply = chain.ask(opening)
    entries = chain.retrieve(parse_problems(reply), prefs, embedder, k)
    conversation = opening + [assistant(reply)]
    return conversation, entries


def _open_question(chain: _Chain, context: str, candidates: str, prefs, embedder, k) -> str:
    conversation, entries = _problems_step(chain, context, candidates, prefs, embedder, k)
    answer = user(chain.templates.fill('answer', preferences=_preferences_text(entries), candidates=candidates))
    return chain.ask(conversation + [answer])


def _three_question(chain: _Chain, context: str, candidates: str, prefs, embedder, k) -> str:
    conversation, entries = _problems_step(chain, context, candidates, prefs, embedder, k)
    preferences = _preferences_text(entries)
    answer = user(chain.templates.fill('answer', preferences=preferences, candidates=candidates))
    # same prompt twice: two sampled proposals
    proposals = [chain.ask(conversation + [answer]) for _ in range(2)]
    final = user(chain.templates.fill('final', answers=format_answers(proposals), candidates=candidates))
    return chain.ask(conversation + [final])


_STYLES = {
    PromptStyle.DIRECT: _direct,
    PromptStyle.DIRECT_PREF: _direct_pref,
    PromptStyle.OPEN_QUESTION: _open_question,
    PromptStyle.THREE_QUESTION: _three_question,
}


def decide(style: PromptStyle, state: HouseState, user_id: int, rep: Representation, prefs: Optional[VectorIndex],
           backend: Backend, embedder: Optional[Embedder], params: GenerationParams, k: int = RETRIEVAL_K,
           templates: Optional[PromptTemplates] = None,
           clock: Callable[[], float] = time.perf_counter) -> Tuple[DecisionOutcome, ChainTrace]:
    '''
    Run one prompting style for one user and return the parsed outcome with its trace.
    :param prefs: preference index; may be None for the direct style
    :param clock: monotonic seconds, total_seconds covers rendering, action building, calls, retrieval and parsing
    '''
    style = PromptStyle(style)
    templates = templates or default_templates()
    trace = ChainTrace()
    started = clock()

    context = render(state, rep)
    candidates: List[ActionCandidate] = build_actions(user_id, state)
    chain = _Chain(backend, params, trace, clock, templates)
    try:
        raw = _STYLES[style](chain, context, format_candidates(candidates), prefs, embedder, k)
    except (GatewayError, RetrievalError) as e:
        trace.error = e
        logger.warning('%s decision for user %s stopped after %d call(s): %s', style.value, user_id,
                       len(trace.llm_calls), e)
        outcome = failed_outcome(candidates, f'{type(e).__name__}: {e}')
    else:
        outcome = parse_outcome(raw, candidates)
        for warning in outcome.warnings:
            logger.warning('%s decision for user %s: %s', style.value, user_id, warning)

    trace.warnings.extend(outcome.warnings)
    trace.total_seconds = clock() - started
    return outcome, trace
