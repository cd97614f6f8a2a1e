# -*- coding: utf-8 -*-

from .scenarios import ScenarioCategory, ScenarioSpec, LabeledOutcome, SCENARIO_NAMES, load_scenario, load_scenarios
from .rubric import (Matcher, RubricRule, grade_outcome, rubric_counts, scenario_baseline, simulate_random_grade,
                     noop_action_grade)
from .records import RunRecord, read_records, write_records
from .runner import BenchMatrix, BenchRunner, ModelSpec, run_benchmark
from .report import AggregateReport, aggregate, baseline_table, emit_report, exact_baseline, render_markdown
