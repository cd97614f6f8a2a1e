# -*- coding: utf-8 -*-

import logging
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from tqdm import tqdm

from engine import PromptStyle, decide
from house import Representation
from llm import GenerationParams
from llm.backends import Backend
from retrieval import Embedder, VectorIndex
from utils.errors import BackendUnreachableError, BenchmarkAborted
from utils.metrics import AverageMetricTracker
from .records import RunRecord, write_records
from .rubric import grade_outcome
from .scenarios import ScenarioSpec

RECORDS_FILE = 'records.csv'
PARTIAL_RECORDS_FILE = 'records.partial.csv'


@dataclass(frozen=True)
class ModelSpec:
    label: str
    backend: Backend


@dataclass(frozen=True)
class BenchMatrix:
    models: Tuple[ModelSpec, ...]
    representations: Tuple[Representation, ...]
    styles: Tuple[PromptStyle, ...]

    def cells(self) -> List[Tuple[int, ModelSpec, Representation, PromptStyle]]:
        ''' model, then representation, then style '''
        cells = []
        for model in self.models:
            for rep in self.representations:
                for style in self.styles:
                    cells.append((len(cells), model, Representation(rep), PromptStyle(style)))
        return cells


def repetition_seed(seed: int, cell: int, scenario: int, repetition: int) -> int:
    return int(np.random.SeedSequence([seed, cell, scenario, repetition]).generate_state(1)[0])


class _RecordSink:
    ''' serialises records coming from worker threads '''

    def __init__(self):
        self._lock = threading.Lock()
        self.records: List[RunRecord] = []

    def add(self, record: RunRecord):
        with self._lock:
            self.records.append(record)

    def snapshot(self) -> List[RunRecord]:
        with self._lock:
            return list(self.records)


class BenchRunner:
    """
    Runs the experiment matrix: every model x representation x style cell over every scenario, `reps` times.
    Scenarios of a cell run concurrently up to `jobs`; the repetitions of one scenario run in order.
    """

    def __init__(self, matrix: BenchMatrix, scenarios: Sequence[ScenarioSpec], prefs: Optional[VectorIndex],
                 embedder: Optional[Embedder], params: GenerationParams, reps: int = 10, seed: int = 0,
                 jobs: int = 1, k: int = 3, forward_seed: bool = False, output_dir=None, progress: bool = True,
                 logger: Optional[logging.Logger] = None, clock: Callable[[], float] = time.perf_counter):
        '''

        :param forward_seed: send a per-repetition sampling seed derived from `seed` to the backend
        :param output_dir: records.partial.csv is rewritten there after every cell and replaced by records.csv at the end
        :param clock: monotonic seconds used for processing times
        '''
        if reps < 0:
            raise ValueError('reps must be >= 0')
        if jobs < 1:
            raise ValueError('jobs must be >= 1')
        self.matrix = matrix
        self.scenarios = list(scenarios)
        self.prefs = prefs
        self.embedder = embedder
        self.params = params
        self.reps = reps
        self.seed = seed
        self.jobs = jobs
        self.k = k
        self.forward_seed = forward_seed
        self.output_dir = Path(output_dir) if output_dir is not None else None
        self.progress = progress
        self.logger = logger or logging.getLogger('bench')
        self.clock = clock

        self.metrics = AverageMetricTracker('grade', 'processing_s', 'failed')
        self._abort = threading.Event()

    def run(self) -> List[RunRecord]:
        cells = self.matrix.cells()
        self.logger_info(f'Benchmark start: {len(cells)} cell(s) x {len(self.scenarios)} scenario(s) '
                         f'x {self.reps} repetition(s), jobs={self.jobs}.')
        records: List[RunRecord] = []
        if self.reps == 0 or not self.scenarios:
            self._flush(records, RECORDS_FILE)
            return records

        with ThreadPoolExecutor(max_workers=self.jobs) as executor:
            for cell_index, model, rep, style in cells:
                sink = _RecordSink()
                self.metrics.reset()
                with tqdm(total=len(self.scenarios) * self.reps, disable=not self.progress, leave=False,
                          desc=f'{model.label}/{rep.value}/{style.value}') as bar:
                    futures = [executor.submit(self._run_scenario, cell_index, model, rep, style, position,
                                               scenario, sink, bar)
                               for position, scenario in enumerate(self.scenarios)]
                    errors = [future.exception() for future in futures]
                cell_records = sorted(sink.snapshot(),
                                      key=lambda r: (self._scenario_position(r.scenario), r.repetition))
                records.extend(cell_records)
                for record in cell_records:
                    self.metrics.update_multi_metrics([
                        {'key': 'grade', 'value': record.grade},
                        {'key': 'processing_s', 'value': record.processing_seconds},
                        {'key': 'failed', 'value': float(record.failed)},
                    ])
                aborted = next((e for e in errors if e is not None), None)
                if aborted is not None:
                    partial = self._flush(records, PARTIAL_RECORDS_FILE)
                    self.logger_warning(f'Benchmark aborted in cell {cell_index + 1}/{len(cells)}: {aborted}')
                    raise BenchmarkAborted(str(aborted), records, partial) from aborted
                self._log_cell(cell_index, len(cells), model, rep, style)
                self._flush(records, PARTIAL_RECORDS_FILE)

        self._flush(records, RECORDS_FILE)
        if self.output_dir is not None:
            (self.output_dir / PARTIAL_RECORDS_FILE).unlink(missing_ok=True)
        self.logger_info(f'Benchmark end: {len(records)} record(s).')
        return records

    def _scenario_position(self, name: str) -> int:
        for position, scenario in enumerate(self.scenarios):
            if scenario.name == name:
                return position
        return len(self.scenarios)

    def _run_scenario(self, cell_index: int, model: ModelSpec, rep: Representation, style: PromptStyle,
                      position: int, scenario: ScenarioSpec, sink: _RecordSink, bar):
        for repetition in range(self.reps):
            if self._abort.is_set():
                return
            params = self.params
            if self.forward_seed:
                params = replace(params, seed=repetition_seed(self.seed, cell_index, position, repetition))
            outcome, trace = decide(style, scenario.house, scenario.user_id, rep, self.prefs, model.backend,
                                    self.embedder, params, k=self.k, clock=self.clock)
            if isinstance(trace.error, BackendUnreachableError):
                self._abort.set()
                raise trace.error
            grade = grade_outcome(scenario.rubric, outcome, scenario.house)
            record = RunRecord(model_label=model.label, representation=rep.value, style=style.value,
                               scenario=scenario.name, category=scenario.category.value, repetition=repetition,
                               grade=grade, processing_seconds=trace.total_seconds, failed=outcome.failed,
                               action=outcome.action.label, llm_calls=len(trace.llm_calls),
                               error=None if trace.error is None else str(trace.error))
            sink.add(record)
            bar.update(1)

    def _log_cell(self, cell_index: int, n_cells: int, model: ModelSpec, rep: Representation, style: PromptStyle):
        self.logger_info(f'[Cell {cell_index + 1}/{n_cells}] model={model.label} rep={rep.value} '
                         f'style={style.value} avg_grade={self.metrics.avg("grade"):.3f} '
                         f'avg_time={self.metrics.avg("processing_s"):.3f}s '
                         f'failure_ratio={self.metrics.avg("failed"):.3f}')

    def _flush(self, records: List[RunRecord], file_name: str) -> Optional[Path]:
        if self.output_dir is None:
            return None
        self.output_dir.mkdir(parents=True, exist_ok=True)
        return write_records(records, self.output_dir / file_name)

    def logger_info(self, msg):
        self.logger.info(msg)

    def logger_warning(self, msg):
        self.logger.warning(msg)


def run_benchmark(matrix: BenchMatrix, scenarios: Sequence[ScenarioSpec], prefs: Optional[VectorIndex],
                  embedder: Optional[Embedder], params: GenerationParams, reps: int = 10, seed: int = 0,
                  **kwargs) -> List[RunRecord]:
    return BenchRunner(matrix, scenarios, prefs, embedder, params, reps=reps, seed=seed, **kwargs).run()
