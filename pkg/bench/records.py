# -*- coding: utf-8 -*-

from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable, List, Optional

import pandas as pd

RECORD_COLUMNS = ('model_label', 'representation', 'style', 'scenario', 'category', 'repetition', 'grade',
                  'processing_seconds', 'failed', 'action', 'llm_calls', 'error')


@dataclass(frozen=True)
class RunRecord:
    '''
    One benchmark execution.
    :param processing_seconds: the whole decision, context rendering to reply parsing
    :param error: transport or retrieval error that stopped the chain, empty otherwise
    '''
    model_label: str
    representation: str
    style: str
    scenario: str
    category: str
    repetition: int
    grade: int
    processing_seconds: float
    failed: bool
    action: str = ''
    llm_calls: int = 0
    error: Optional[str] = None

    def __post_init__(self):
        if self.grade not in (0, 1, 2):
            raise ValueError(f'grade must be 0, 1 or 2, got {self.grade}')


def records_to_frame(records: Iterable[RunRecord]) -> pd.DataFrame:
    return pd.DataFrame([asdict(record) for record in records], columns=list(RECORD_COLUMNS))


def records_from_frame(frame: pd.DataFrame) -> List[RunRecord]:
    records = []
    for row in frame.to_dict(orient='records'):
        error = row['error']
        records.append(RunRecord(
            model_label=str(row['model_label']),
            representation=str(row['representation']),
            style=str(row['style']),
            scenario=str(row['scenario']),
            category=str(row['category']),
            repetition=int(row['repetition']),
            grade=int(row['grade']),
            processing_seconds=float(row['processing_seconds']),
            failed=_as_bool(row['failed']),
            action=str(row['action']),
            llm_calls=int(row['llm_calls']),
            error=None if error is None or error == '' or (isinstance(error, float) and pd.isna(error)) else str(error),
        ))
    return records


def _as_bool(value) -> bool:
    if isinstance(value, str):
        return value.strip().lower() == 'true'
    return bool(value)


def write_records(records: Iterable[RunRecord], path) -> Path:
    path = Path(path)
    records_to_frame(records).to_csv(path, index=False)
    return path


def read_records(path) -> List[RunRecord]:
    text_columns = {name: str for name in ('model_label', 'representation', 'style', 'scenario', 'category',
                                           'action', 'error', 'failed')}
    frame = pd.read_csv(path, dtype=text_columns, keep_default_na=False, float_precision='round_trip')
    return records_from_frame(frame)
