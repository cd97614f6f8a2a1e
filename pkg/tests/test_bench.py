# -*- coding: utf-8 -*-

import json
import logging
from fractions import Fraction

import pandas as pd
import pytest
from pydantic import ValidationError

from bench import (SCENARIO_NAMES, BenchMatrix, BenchRunner, Matcher, ModelSpec, RunRecord, aggregate,
                   emit_report, grade_outcome, load_scenario, load_scenarios, noop_action_grade, read_records,
                   render_markdown, rubric_counts, scenario_baseline, simulate_random_grade, write_records)
import bench.report as bench_report
from bench.runner import PARTIAL_RECORDS_FILE, RECORDS_FILE, repetition_seed
from engine import PromptStyle
from house import Representation, build_actions
from llm import GenerationParams, ScriptedBackend, parse_outcome
from llm.backends import Backend
from utils import fraction_to_decimal
from utils.errors import AggregationError, BackendUnreachableError, BenchmarkAborted, ScenarioLoadError
from tests.helpers import PROBLEMS_REPLY, SCENARIOS_DIR, StepClock, check_golden

PARAMS = GenerationParams()

BASELINES = {
    'Out of bed at night': (1, 1, 8, '0.375'),
    'Watching TV: late evening': (3, 1, 8, '0.625'),
    'Out from bed issue with CO2': (0, 1, 7, '0.286'),
    'Going back to bed at night': (1, 1, 8, '0.375'),
    'Evening sleeping: TV ON': (2, 1, 9, '0.444'),
    'At dinner watching TV': (2, 2, 8, '0.750'),
    'Forgot to turn off TV: user out': (2, 2, 9, '0.667'),
    'Too low temperature': (1, 1, 8, '0.375'),
    'Low luminosity day': (2, 1, 9, '0.444'),
    'Failed curtains': (1, 2, 7, '0.714'),
    'Forgot to turn off lights': (0, 5, 9, '1.111'),
}


def _record(scenario='Out of bed at night', repetition=0, grade=2, style='direct', **overrides):
    values = dict(model_label='m', representation='natural', style=style, scenario=scenario, category='Safety',
                  repetition=repetition, grade=grade, processing_seconds=0.5, failed=False)
    values.update(overrides)
    return RunRecord(**values)


def _runner(scenarios, backend, styles=(PromptStyle.DIRECT,), reps=10, **kwargs):
    matrix = BenchMatrix(models=(ModelSpec('scripted', backend),), representations=(Representation.NATURAL,),
                         styles=tuple(styles))
    kwargs.setdefault('progress', False)
    prefs = kwargs.pop('prefs', None)
    embedder = kwargs.pop('embedder', None)
    return BenchRunner(matrix, scenarios, prefs, embedder, PARAMS, reps=reps, **kwargs)


# scenarios and rubrics

def test_scenarios_load_in_benchmark_order(scenarios):
    assert tuple(scenario.name for scenario in scenarios) == SCENARIO_NAMES
    categories = [scenario.category.value for scenario in scenarios]
    assert categories.count('Safety') == 3
    assert categories.count('Comfort') == 3
    assert categories.count('Preference') == 5


def test_scenario_selection_by_name():
    selected = load_scenarios(SCENARIOS_DIR, ['Failed curtains', 'Out of bed at night'])
    assert [scenario.name for scenario in selected] == ['Out of bed at night', 'Failed curtains']
    with pytest.raises(ScenarioLoadError, match='unknown scenario'):
        load_scenarios(SCENARIOS_DIR, ['Flooded basement'])


def test_baseline_of_every_scenario(scenarios):
    for scenario in scenarios:
        n1, n2, n, shown = BASELINES[scenario.name]
        counts = rubric_counts(scenario)
        assert (counts.n_rated_1, counts.n_rated_2, counts.n_total) == (n1, n2, n)
        assert scenario_baseline(scenario) == Fraction(n1 + 2 * n2, n)
        assert fraction_to_decimal(scenario_baseline(scenario)) == shown


def test_labeled_outcomes_get_their_grades(scenarios):
    for scenario in scenarios:
        candidates = build_actions(scenario.user_id, scenario.house)
        assert len(scenario.labeled_outcomes) >= 3
        for labeled in scenario.labeled_outcomes:
            outcome = parse_outcome(labeled.reply_text(), candidates)
            assert not outcome.failed, labeled
            assert grade_outcome(scenario.rubric, outcome, scenario.house) == labeled.grade, \
                (scenario.name, labeled.reply)


def test_failed_outcome_grades_like_no_action(scenarios):
    for scenario in scenarios:
        failed = parse_outcome('no json', build_actions(scenario.user_id, scenario.house))
        assert grade_outcome(scenario.rubric, failed, scenario.house) == scenario.noop_grade
        assert noop_action_grade(scenario) == scenario.noop_grade


def test_random_choice_simulation_matches_the_exact_baseline(scenarios):
    for scenario in scenarios:
        simulated = simulate_random_grade(scenario, draws=200000, seed=17)
        assert abs(simulated - float(scenario_baseline(scenario))) < 0.01, scenario.name


def _scenario_file(tmp_path, **changes):
    document = json.loads((SCENARIOS_DIR / '01_out_of_bed_night.json').read_text(encoding='utf-8'))
    document['house'] = str((SCENARIOS_DIR / document['house']).resolve())
    document.update(changes)
    path = tmp_path / 'scenario.json'
    path.write_text(json.dumps(document), encoding='utf-8')
    return path


def test_scenario_validation(tmp_path):
    assert load_scenario(_scenario_file(tmp_path)).name == 'Out of bed at night'
    with pytest.raises(ScenarioLoadError, match='noop_grade'):
        load_scenario(_scenario_file(tmp_path, noop_grade=1))
    with pytest.raises(ScenarioLoadError):
        load_scenario(_scenario_file(tmp_path, category='Comfort'))
    with pytest.raises(ScenarioLoadError):
        load_scenario(_scenario_file(tmp_path, name='Flooded basement'))
    with pytest.raises(ScenarioLoadError):
        load_scenario(_scenario_file(tmp_path, user_id=5))
    with pytest.raises(ScenarioLoadError):
        load_scenario(_scenario_file(tmp_path, house='missing.house'))
    rubric = json.loads((SCENARIOS_DIR / '01_out_of_bed_night.json').read_text(encoding='utf-8'))['rubric']
    with pytest.raises(ScenarioLoadError):
        load_scenario(_scenario_file(tmp_path, rubric=list(reversed(rubric))))
    with pytest.raises(ScenarioLoadError, match='cannot read'):
        load_scenario(tmp_path)
    binary = tmp_path / 'binary.json'
    binary.write_bytes(b'\xff\xfe{}')
    with pytest.raises(ScenarioLoadError, match='not UTF-8'):
        load_scenario(binary)


@pytest.mark.parametrize('document', [
    {},
    {'any': []},
    {'any': [{'kind': 'noop'}], 'kind': 'device'},
    {'kind': 'interact', 'categories': ['MainLight']},
    {'categories': ['Fridge']},
    {'luminosity': {'max': 50, 'absent': True}},
])
def test_invalid_matchers(document):
    with pytest.raises(ValidationError):
        Matcher.model_validate(document)


# runs

def _scripted_replies(scenarios, styles, representations, reps, reply_for):
    replies = []
    for _ in representations:
        for style in styles:
            for scenario in scenarios:
                for _ in range(reps):
                    answer = reply_for(scenario)
                    if style == PromptStyle.OPEN_QUESTION:
                        replies += [PROBLEMS_REPLY, answer]
                    elif style == PromptStyle.THREE_QUESTION:
                        replies += [PROBLEMS_REPLY, answer, answer, answer]
                    else:
                        replies.append(answer)
    return replies


def test_full_matrix_run(scenarios, pref_index, embedder, tmp_path):
    styles = list(PromptStyle)
    representations = list(Representation)
    backend = ScriptedBackend(_scripted_replies(scenarios, styles, representations, 10,
                                                lambda scenario: scenario.labeled_outcomes[0].reply_text()))
    matrix = BenchMatrix(models=(ModelSpec('scripted', backend),), representations=tuple(representations),
                         styles=tuple(styles))
    runner = BenchRunner(matrix, scenarios, pref_index, embedder, PARAMS, reps=10, seed=3, jobs=1,
                         output_dir=tmp_path, progress=False)
    records = runner.run()
    assert len(records) == 880
    assert backend.remaining == 0
    assert all(record.grade == 2 and not record.failed for record in records)
    assert (tmp_path / RECORDS_FILE).is_file()
    assert not (tmp_path / PARTIAL_RECORDS_FILE).exists()
    assert len(read_records(tmp_path / RECORDS_FILE)) == 880

    report = aggregate(records, scenarios)
    assert len(report.cells) == 8
    assert list(report.cells['style'][:4]) == [style.value for style in styles]
    assert list(report.cells['representation'].unique()) == ['natural', 'json']
    assert (report.cells['avg_grade'] == 2.0).all()
    assert (report.cells['executions'] == 110).all()
    assert len(report.scenarios) == 88
    written = emit_report(report, tmp_path / 'report')
    frame = pd.read_csv(tmp_path / 'report' / 'report.csv')
    assert list(frame.columns) == ['model_label', 'representation', 'style', 'avg_grade', 'avg_processing_s',
                                   'failure_ratio']
    assert len(frame) == 8
    assert len(written) == 5
    representations = pd.read_csv(tmp_path / 'report' / 'report_representations.csv')
    assert list(representations.columns) == ['model_label', 'json_avg_grade', 'natural_avg_grade', 'natural_vs_json']
    assert representations.iloc[0].tolist() == ['scripted', 2.0, 2.0, 0.0]


def test_failures_count_in_the_cell_average(scenario_by_name, tmp_path):
    scenario = scenario_by_name['Out of bed at night']
    good = scenario.labeled_outcomes[0].reply_text()
    backend = ScriptedBackend([good] * 4 + ['not json'] + [good] * 4 + ['{"reasoning": "r"}'])
    records = _runner([scenario], backend, clock=StepClock(0.1)).run()
    assert [record.failed for record in records] == [False] * 4 + [True] + [False] * 4 + [True]
    report = aggregate(records, [scenario])
    row = report.cells.iloc[0]
    assert row['avg_grade'] == pytest.approx(1.6)
    assert row['failure_ratio'] == pytest.approx(0.2)
    assert row['executions'] == 10
    assert row['baseline_grade'] == pytest.approx(0.375)
    assert row['gain_over_baseline'] == pytest.approx(1.6 / 0.375 - 1.0)
    assert row['avg_processing_s'] == pytest.approx(0.3)
    markdown = render_markdown(report)
    assert '| scripted | natural | direct | 1.60 | 0.20 |' in markdown
    assert '| Out of bed at night | Safety | 1 | 1 | 8 | 0.375 |' in markdown


def _scripted_report(scenarios, prefs, embedder):
    replies = []
    for _ in (PromptStyle.DIRECT, PromptStyle.DIRECT_PREF):
        for scenario in scenarios:
            good = scenario.labeled_outcomes[0].reply_text()
            weak = scenario.labeled_outcomes[2].reply_text()
            replies += [good, weak, 'not json', good]
    runner = _runner(scenarios, ScriptedBackend(replies), styles=(PromptStyle.DIRECT, PromptStyle.DIRECT_PREF),
                     reps=4, prefs=prefs, embedder=embedder, clock=StepClock(0.125))
    return render_markdown(aggregate(runner.run(), scenarios))


def test_scripted_report_is_reproducible(scenario_by_name, pref_index, embedder, update_golden):
    scenarios = [scenario_by_name['Out of bed at night'], scenario_by_name['At dinner watching TV']]
    markdown = _scripted_report(scenarios, pref_index, embedder)
    assert markdown == _scripted_report(scenarios, pref_index, embedder)
    check_golden('scripted_report.md', markdown, update_golden)


def test_failures_on_a_scenario_where_doing_nothing_is_acceptable(scenario_by_name):
    scenario = scenario_by_name['At dinner watching TV']
    backend = ScriptedBackend(['not json'] * 10)
    report = aggregate(_runner([scenario], backend).run(), [scenario])
    assert report.cells.iloc[0]['avg_grade'] == pytest.approx(1.0)
    assert report.cells.iloc[0]['failure_ratio'] == pytest.approx(1.0)


def test_unreachable_server_aborts_with_partial_records(scenario_by_name, tmp_path):
    scenarios = [scenario_by_name['Out of bed at night'], scenario_by_name['Failed curtains']]
    good = scenarios[0].labeled_outcomes[0].reply_text()
    backend = ScriptedBackend([good, BackendUnreachableError('connection refused')])
    with pytest.raises(BenchmarkAborted) as info:
        _runner(scenarios, backend, reps=2, output_dir=tmp_path).run()
    assert len(info.value.records) == 1
    assert info.value.partial_path == tmp_path / PARTIAL_RECORDS_FILE
    assert read_records(info.value.partial_path) == info.value.records
    assert not (tmp_path / RECORDS_FILE).exists()


def test_zero_repetitions(scenarios, tmp_path):
    records = _runner(scenarios, ScriptedBackend(), reps=0, output_dir=tmp_path).run()
    assert records == []
    assert read_records(tmp_path / RECORDS_FILE) == []
    assert aggregate(records, scenarios).empty


class _SeedRecorder(Backend):

    def __init__(self, reply):
        self.reply = reply
        self.seeds = []

    def complete(self, messages, params):
        self.seeds.append(params.seed)
        return self.reply


def test_forwarded_seeds_are_reproducible(scenario_by_name):
    scenario = scenario_by_name['Failed curtains']
    reply = scenario.labeled_outcomes[0].reply_text()
    first, second, plain = _SeedRecorder(reply), _SeedRecorder(reply), _SeedRecorder(reply)
    _runner([scenario], first, reps=3, seed=5, forward_seed=True).run()
    _runner([scenario], second, reps=3, seed=5, forward_seed=True).run()
    _runner([scenario], plain, reps=3, seed=5).run()
    assert first.seeds == second.seeds
    assert len(set(first.seeds)) == 3
    assert plain.seeds == [None, None, None]
    assert first.seeds[0] == repetition_seed(5, 0, 0, 0)


def test_cell_summary_is_logged(scenario_by_name, caplog):
    scenario = scenario_by_name['Out of bed at night']
    backend = ScriptedBackend([scenario.labeled_outcomes[0].reply_text()] * 2)
    logger = logging.getLogger('bench-test')
    with caplog.at_level(logging.INFO, logger='bench-test'):
        _runner([scenario], backend, reps=2, logger=logger).run()
    assert any('[Cell 1/1] model=scripted rep=natural style=direct avg_grade=2.000' in message
               for message in caplog.messages)


# aggregation

def test_aggregate_rejects_uneven_cells(scenarios):
    records = [_record(repetition=0), _record(repetition=1), _record(style='directPref', repetition=0)]
    with pytest.raises(AggregationError):
        aggregate(records)
    uneven = [_record(repetition=0), _record(repetition=1),
              _record(scenario='Failed curtains', category='Comfort', repetition=0)]
    with pytest.raises(AggregationError, match='unequal'):
        aggregate(uneven)
    with pytest.raises(AggregationError, match='no baseline'):
        aggregate([_record(scenario='Flooded basement')], scenarios)


def test_aggregate_by_category():
    records = [_record(grade=2), _record(repetition=1, grade=1),
               _record(scenario='Failed curtains', category='Comfort', grade=0),
               _record(scenario='Failed curtains', category='Comfort', repetition=1, grade=0, failed=True)]
    report = aggregate(records)
    categories = report.categories.set_index('category')
    assert categories.loc['Safety', 'avg_grade'] == pytest.approx(1.5)
    assert categories.loc['Comfort', 'avg_grade'] == pytest.approx(0.0)
    assert report.cells.iloc[0]['failure_ratio'] == pytest.approx(0.25)
    assert pd.isna(report.cells.iloc[0]['baseline_grade'])


def test_natural_versus_json_comparison():
    records = [_record(grade=2), _record(repetition=1, grade=1),
               _record(representation='json', grade=1), _record(representation='json', repetition=1, grade=1),
               _record(model_label='n', grade=2), _record(model_label='n', repetition=1, grade=2)]
    report = aggregate(records)
    rows = report.representations.set_index('model_label')
    assert rows.loc['m', 'json_avg_grade'] == pytest.approx(1.0)
    assert rows.loc['m', 'natural_avg_grade'] == pytest.approx(1.5)
    assert rows.loc['m', 'natural_vs_json'] == pytest.approx(0.5)
    assert pd.isna(rows.loc['n', 'json_avg_grade'])
    assert pd.isna(rows.loc['n', 'natural_vs_json'])
    markdown = render_markdown(report)
    assert '| m | 1.00 | 1.50 | +50.0% |' in markdown
    assert '| n | - | 2.00 | - |' in markdown


def test_baseline_counts_are_derived_once_per_scenario(scenarios, monkeypatch):
    counted = []
    original = bench_report.rubric_counts

    def counting(scenario):
        counted.append(scenario.name)
        return original(scenario)

    monkeypatch.setattr(bench_report, 'rubric_counts', counting)
    report = aggregate([], scenarios)
    assert counted == [scenario.name for scenario in scenarios]
    assert report.exact_baselines['Out of bed at night'] == Fraction(3, 8)
    assert report.baselines['n_actions'].tolist()[0] == 8


def test_records_survive_the_csv_file(tmp_path):
    records = [_record(processing_seconds=0.1 + 0.2, action='floor lamp is Off', llm_calls=4),
               _record(repetition=1, grade=0, failed=True, action='No action required',
                       error='GatewayError: server overloaded, retry later')]
    path = write_records(records, tmp_path / 'records.csv')
    assert read_records(path) == records


def test_record_grades_are_bounded():
    with pytest.raises(ValueError):
        _record(grade=3)
