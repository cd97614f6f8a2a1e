# -*- coding: utf-8 -*-

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from utils import ensure_dir, fraction_to_decimal
from house.actions import RubricCounts, baseline_grade
from utils.errors import AggregationError
from .records import RunRecord, records_to_frame
from .rubric import rubric_counts
from .scenarios import ScenarioSpec

logger = logging.getLogger(__name__)

CELL_KEYS = ['model_label', 'representation', 'style']
REPORT_COLUMNS = CELL_KEYS + ['avg_grade', 'avg_processing_s', 'failure_ratio']
CELL_COLUMNS = REPORT_COLUMNS + ['executions', 'baseline_grade', 'gain_over_baseline']
SCENARIO_COLUMNS = CELL_KEYS + ['scenario', 'category', 'avg_grade', 'avg_processing_s', 'failure_ratio',
                                'executions', 'baseline_grade']
CATEGORY_COLUMNS = CELL_KEYS + ['category', 'avg_grade', 'executions']
BASELINE_COLUMNS = ['scenario', 'category', 'n_rated_1', 'n_rated_2', 'n_actions', 'baseline_grade']
REPRESENTATION_COLUMNS = ['model_label', 'json_avg_grade', 'natural_avg_grade', 'natural_vs_json']

REPORT_FILES = ('report.csv', 'report_scenarios.csv', 'report_categories.csv', 'report_representations.csv',
                'report.md')
CSV_FLOAT_FORMAT = '%.6f'


@dataclass
class AggregateReport:
    cells: pd.DataFrame = field(default_factory=lambda: pd.DataFrame(columns=CELL_COLUMNS))
    scenarios: pd.DataFrame = field(default_factory=lambda: pd.DataFrame(columns=SCENARIO_COLUMNS))
    categories: pd.DataFrame = field(default_factory=lambda: pd.DataFrame(columns=CATEGORY_COLUMNS))
    representations: pd.DataFrame = field(default_factory=lambda: pd.DataFrame(columns=REPRESENTATION_COLUMNS))
    baselines: pd.DataFrame = field(default_factory=lambda: pd.DataFrame(columns=BASELINE_COLUMNS))
    exact_baselines: Dict[str, Fraction] = field(default_factory=dict)

    @property
    def empty(self) -> bool:
        return self.cells.empty


def baseline_table(scenarios: Sequence[ScenarioSpec]) -> pd.DataFrame:
    rows = []
    for scenario in scenarios:
        counts = rubric_counts(scenario)
        rows.append({'scenario': scenario.name, 'category': scenario.category.value,
                     'n_rated_1': counts.n_rated_1, 'n_rated_2': counts.n_rated_2, 'n_actions': counts.n_total,
                     'baseline_grade': float(baseline_grade(counts))})
    return pd.DataFrame(rows, columns=BASELINE_COLUMNS)


def exact_baseline(row) -> Fraction:
    ''' exact baseline of one baseline_table row '''
    return baseline_grade(RubricCounts(int(row.n_rated_1), int(row.n_rated_2), int(row.n_actions)))


def _check_consistency(frame: pd.DataFrame):
    ''' every cell must cover the same scenarios the same number of times '''
    sizes = frame.groupby(CELL_KEYS + ['scenario'], sort=False).size()
    reference = None
    for cell, per_scenario in sizes.groupby(level=[0, 1, 2], sort=False):
        layout = {key[-1]: int(count) for key, count in per_scenario.items()}
        if reference is None:
            reference = (cell, layout)
        elif layout != reference[1]:
            raise AggregationError(f'cell {"/".join(cell)} covers {layout}, '
                                   f'cell {"/".join(reference[0])} covers {reference[1]}')
    if reference is not None and len(set(reference[1].values())) > 1:
        raise AggregationError(f'scenarios have unequal repetition counts: {reference[1]}')


def _compare_representations(frame: pd.DataFrame) -> pd.DataFrame:
    ''' per model: average grade over every JSON and every natural execution, and the relative difference '''
    per_rep = frame.groupby(['model_label', 'representation'], sort=False)['grade'].mean()
    rows = []
    for model in pd.unique(frame['model_label']):
        json_avg = float(per_rep.get((model, 'json'), np.nan))
        natural_avg = float(per_rep.get((model, 'natural'), np.nan))
        difference = natural_avg / json_avg - 1.0 if json_avg > 0 else np.nan
        rows.append({'model_label': model, 'json_avg_grade': json_avg, 'natural_avg_grade': natural_avg,
                     'natural_vs_json': difference})
    return pd.DataFrame(rows, columns=REPRESENTATION_COLUMNS)


def _summarise(frame: pd.DataFrame, keys: List[str]) -> pd.DataFrame:
    grouped = frame.groupby(keys, sort=False)
    return grouped.agg(avg_grade=('grade', 'mean'), avg_processing_s=('processing_seconds', 'mean'),
                       failure_ratio=('failed', 'mean'), executions=('grade', 'size')).reset_index()


def aggregate(records: Sequence[RunRecord], scenarios: Optional[Sequence[ScenarioSpec]] = None) -> AggregateReport:
    '''
    Averages per cell, per cell and scenario, per cell and category. Failed executions stay in every average.
    Baseline columns are filled when the scenarios are given.
    '''
    baselines = baseline_table(scenarios) if scenarios else pd.DataFrame(columns=BASELINE_COLUMNS)
    exact = {row.scenario: exact_baseline(row) for row in baselines.itertuples(index=False)}
    frame = records_to_frame(records)
    if frame.empty:
        return AggregateReport(baselines=baselines, exact_baselines=exact)

    frame['failed'] = frame['failed'].astype(float)
    frame['grade'] = frame['grade'].astype(float)
    frame['processing_seconds'] = frame['processing_seconds'].astype(float)
    _check_consistency(frame)
    if exact:
        unknown = sorted(set(frame['scenario']) - set(exact))
        if unknown:
            raise AggregationError(f'no baseline for scenario(s) {", ".join(unknown)}')
    baseline_of = {name: float(value) for name, value in exact.items()}

    per_scenario = _summarise(frame, CELL_KEYS + ['scenario', 'category'])
    per_scenario['baseline_grade'] = per_scenario['scenario'].map(baseline_of) if exact else np.nan

    cells = _summarise(frame, CELL_KEYS)
    if exact:
        cell_baseline = per_scenario.groupby(CELL_KEYS, sort=False)['baseline_grade'].mean()
        cells['baseline_grade'] = [cell_baseline[tuple(row)] for row in cells[CELL_KEYS].itertuples(index=False)]
        with np.errstate(divide='ignore', invalid='ignore'):
            gain = cells['avg_grade'] / cells['baseline_grade'] - 1.0
        cells['gain_over_baseline'] = gain.where(cells['baseline_grade'] > 0)
    else:
        cells['baseline_grade'] = np.nan
        cells['gain_over_baseline'] = np.nan

    categories = frame.groupby(CELL_KEYS + ['category'], sort=False).agg(
        avg_grade=('grade', 'mean'), executions=('grade', 'size')).reset_index()

    return AggregateReport(cells=cells[CELL_COLUMNS], scenarios=per_scenario[SCENARIO_COLUMNS],
                           categories=categories[CATEGORY_COLUMNS], representations=_compare_representations(frame),
                           baselines=baselines, exact_baselines=exact)


def emit_report(report: AggregateReport, output_dir, formats: Sequence[str] = ('csv', 'markdown')) -> List[Path]:
    '''
    report.csv holds one row per cell; report_scenarios.csv and report_categories.csv break the cells down;
    report_representations.csv compares the natural and JSON contexts per model;
    report.md renders the same tables for reading.
    '''
    output_dir = Path(output_dir)
    ensure_dir(output_dir)
    written = []
    if 'csv' in formats:
        report.cells[REPORT_COLUMNS].to_csv(output_dir / 'report.csv', index=False, float_format=CSV_FLOAT_FORMAT)
        report.scenarios.to_csv(output_dir / 'report_scenarios.csv', index=False, float_format=CSV_FLOAT_FORMAT)
        report.categories.to_csv(output_dir / 'report_categories.csv', index=False, float_format=CSV_FLOAT_FORMAT)
        report.representations.to_csv(output_dir / 'report_representations.csv', index=False,
                                      float_format=CSV_FLOAT_FORMAT)
        written.extend(output_dir / name for name in REPORT_FILES[:4])
    if 'markdown' in formats:
        path = output_dir / 'report.md'
        path.write_text(render_markdown(report), encoding='utf-8')
        written.append(path)
    for path in written:
        logger.info(f'Report written: {path}')
    return written


def _number(value, digits: int = 2) -> str:
    if value is None or (isinstance(value, float) and np.isnan(value)):
        return '-'
    return f'{value:.{digits}f}'


def _percent(value) -> str:
    if value is None or (isinstance(value, float) and np.isnan(value)):
        return '-'
    return f'{value * 100:+.1f}%'


def _table(header: List[str], rows: List[List[str]]) -> List[str]:
    lines = ['| ' + ' | '.join(header) + ' |', '|' + '|'.join('---' for _ in header) + '|']
    lines.extend('| ' + ' | '.join(row) + ' |' for row in rows)
    return lines


def render_markdown(report: AggregateReport) -> str:
    lines = ['# Benchmark report', '']

    lines += ['## Average grade per model, representation and prompting style', '']
    rows = [[row.model_label, row.representation, row.style, _number(row.avg_grade),
             _number(row.failure_ratio), _number(row.avg_processing_s), _percent(row.gain_over_baseline)]
            for row in report.cells.itertuples(index=False)]
    lines += _table(['Model', 'Representation', 'Prompting style', 'Average grade', 'Failure ratio',
                     'Proces. time (s)', 'Gain over random'], rows)
    lines.append('')

    if not report.categories.empty:
        lines += ['## Average grade per category', '']
        pivot = report.categories.pivot_table(index=CELL_KEYS, columns='category', values='avg_grade', sort=False)
        columns = [column for column in ('Safety', 'Comfort', 'Preference') if column in pivot.columns]
        rows = [list(index) + [_number(pivot.loc[index, column]) for column in columns] for index in pivot.index]
        lines += _table(['Model', 'Representation', 'Prompting style'] + columns, rows)
        lines.append('')

    if not report.representations.empty:
        lines += ['## Natural language versus JSON context', '']
        rows = [[row.model_label, _number(row.json_avg_grade), _number(row.natural_avg_grade),
                 _percent(row.natural_vs_json)] for row in report.representations.itertuples(index=False)]
        lines += _table(['Model', 'JSON', 'Natural', 'Natural vs JSON'], rows)
        lines.append('')

    if not report.baselines.empty:
        lines += ['## Random choice baseline', '']
        rows = []
        for row in report.baselines.itertuples(index=False):
            exact = report.exact_baselines.get(row.scenario)
            value = fraction_to_decimal(exact) if exact is not None else _number(row.baseline_grade, 3)
            rows.append([row.scenario, row.category, str(row.n_rated_1), str(row.n_rated_2), str(row.n_actions),
                         value])
        lines += _table(['Scenario', 'Category', 'Rated 1', 'Rated 2', 'Actions', 'Baseline grade'], rows)
        lines.append('')
    return '\n'.join(lines)
