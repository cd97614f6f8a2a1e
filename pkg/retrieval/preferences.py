# -*- coding: utf-8 -*-

"""
Preference database: one naturally written sentence per line, followed by a tab and its importance tag.

    Never unlock the entrance door at night.<TAB>RULE
    User 1 likes dim light in the evening.<TAB>PREFERENCE
    People usually sleep between 11 PM and 7 AM.<TAB>GENERALITY
"""

from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Iterable, List, Optional

import numpy as np

from utils.errors import PreferenceParseError


class PreferenceTag(str, Enum):
    RULE = 'RULE'
    PREFERENCE = 'PREFERENCE'
    GENERALITY = 'GENERALITY'

    @property
    def importance(self) -> int:
        ''' 0 is the most important '''
        return _IMPORTANCE[self]


_IMPORTANCE = {PreferenceTag.RULE: 0, PreferenceTag.PREFERENCE: 1, PreferenceTag.GENERALITY: 2}


@dataclass(frozen=True)
class PreferenceEntry:
    text: str
    tag: PreferenceTag
    embedding: Optional[np.ndarray] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if not self.text.strip():
            raise ValueError('preference text must not be empty')

    def with_embedding(self, embedding: np.ndarray) -> 'PreferenceEntry':
        return replace(self, embedding=embedding)


def parse_preference_line(line: str, line_number: int) -> PreferenceEntry:
    if '\t' not in line:
        raise PreferenceParseError('expected "<sentence><TAB><TAG>"', line_number)
    text, tag = line.rsplit('\t', 1)
    text, tag = text.strip(), tag.strip()
    if not text:
        raise PreferenceParseError('empty sentence', line_number)
    try:
        tag = PreferenceTag(tag)
    except ValueError:
        allowed = ', '.join(t.value for t in PreferenceTag)
        raise PreferenceParseError(f'unknown tag "{tag}" (expected one of {allowed})', line_number)
    return PreferenceEntry(text, tag)


def load_preferences(path) -> List[PreferenceEntry]:
    path = Path(path)
    try:
        lines = path.read_text(encoding='utf-8').splitlines()
    except FileNotFoundError as e:
        raise PreferenceParseError(f'{path}: preference file not found') from e
    except UnicodeDecodeError as e:
        raise PreferenceParseError(f'{path}: not UTF-8 text ({e.reason} at byte {e.start})') from e
    except OSError as e:
        raise PreferenceParseError(f'{path}: cannot read preference file ({e.strerror or e})') from e
    entries = []
    for line_number, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        entries.append(parse_preference_line(line, line_number))
    return entries


def deduplicate(entries: Iterable[PreferenceEntry]) -> List[PreferenceEntry]:
    seen = set()
    unique = []
    for entry in entries:
        key = (entry.text, entry.tag)
        if key in seen:
            continue
        seen.add(key)
        unique.append(entry)
    return unique


def format_for_prompt(entries: Iterable[PreferenceEntry]) -> str:
    '''
    One "[TAG] sentence" line per distinct entry, rules first, then preferences, then generalities.
    '''
    unique = deduplicate(entries)
    ordered = sorted(unique, key=lambda entry: entry.tag.importance)
    return '\n'.join(f'[{entry.tag.value}] {entry.text}' for entry in ordered)
