# -*- coding: utf-8 -*-

"""
Prompt templates are plain text files under ``engine/templates``. Placeholders use ``$name`` (``$$`` for a
literal dollar sign): context, candidates, preferences, problems, answers and format. The ``format`` placeholder
is always filled with the contents of ``format.txt``.
"""

from pathlib import Path
from string import Template
from typing import Dict, Optional, Sequence

from house.actions import ActionCandidate

TEMPLATE_DIR = Path(__file__).parent / 'templates'
TEMPLATE_NAMES = ('system', 'system_pref', 'format', 'direct', 'problems', 'answer', 'final')

NO_PREFERENCES = 'Nothing is recorded.'


class PromptTemplates:

    def __init__(self, directory=TEMPLATE_DIR):
        self.directory = Path(directory)
        self._templates: Dict[str, Template] = {}
        for name in TEMPLATE_NAMES:
            path = self.directory / f'{name}.txt'
            try:
                text = path.read_text(encoding='utf-8').rstrip('\n')
            except FileNotFoundError as e:
                raise ValueError(f'prompt template {path} is missing') from e
            if not text.strip():
                raise ValueError(f'prompt template {path} is empty')
            self._templates[name] = Template(text)

    def fill(self, name: str, **values: str) -> str:
        values.setdefault('format', self._templates['format'].template)
        try:
            return self._templates[name].substitute(values)
        except KeyError as e:
            raise ValueError(f'template "{name}" needs a value for {e}') from e


_default: Optional[PromptTemplates] = None


def default_templates() -> PromptTemplates:
    global _default
    if _default is None:
        _default = PromptTemplates()
    return _default


def format_candidates(candidates: Sequence[ActionCandidate]) -> str:
    return '\n'.join(f'- {candidate.label}' for candidate in candidates)


def format_answers(answers: Sequence[str]) -> str:
    return '\n\n'.join(f'Answer {number}:\n{answer.strip()}' for number, answer in enumerate(answers, start=1))
