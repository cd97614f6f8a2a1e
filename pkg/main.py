# -*- coding: utf-8 -*-

"""
Command line entry point.

    python main.py render fixtures/houses/out_of_bed_night.house --rep natural
    python main.py decide fixtures/houses/out_of_bed_night.house --user 1 --style directPref \
        --backend scripted:fixtures/scripted/out_of_bed_night.json
    python main.py query "the user cannot sleep" --k 3
    python main.py baseline --draws 100000
    python main.py bench -c configs/config.json --reps 10 --jobs 1

Exit codes: 0 success, 1 usage error, 2 unreadable or invalid input, 3 model or embedding server failure.
"""

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path
from typing import List, Optional, Sequence

import pandas as pd

import llm.backends as llm_backends
import retrieval.embedders as retrieval_embedders
from bench import (BenchMatrix, BenchRunner, ModelSpec, aggregate, baseline_table, emit_report, exact_baseline,
                   load_scenarios, simulate_random_grade)
from engine import EXPECTED_CALLS, PromptStyle, decide
from house import Representation, load_house, render
from llm import GenerationParams
from logger import setup_logging
from parse_config import ConfigParser, CustomArgs, add_options
from retrieval import VectorIndex, format_for_prompt, load_preferences, query_top_k
from utils import fraction_to_decimal
from utils.errors import (AggregationError, BenchmarkAborted, BuildError, ConfigError, GatewayError, HouseLoadError,
                          PreferenceParseError, RetrievalError, ScenarioLoadError)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_TRANSPORT = 3

STYLE_NAMES = [style.value for style in PromptStyle]
REPRESENTATION_NAMES = [rep.value for rep in Representation]


class UsageArgumentParser(argparse.ArgumentParser):
    ''' argument errors exit with status 1 '''

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f'{self.prog}: error: {message}\n')


def _choice_list(allowed: Sequence[str], what: str):
    def parse(value: str) -> List[str]:
        items = [item.strip() for item in value.split(',') if item.strip()]
        unknown = [item for item in items if item not in allowed]
        if not items or unknown:
            raise argparse.ArgumentTypeError(f'invalid {what} {", ".join(unknown) or value!r} '
                                             f'(choose from {", ".join(allowed)})')
        return items
    return parse


def _comma_list(value: str) -> List[str]:
    return [item.strip() for item in value.split(',') if item.strip()]


GENERATION_OPTIONS = [
    CustomArgs(['--max-tokens'], default=None, type=int, target='generation;max_tokens',
               help='maximum number of tokens in a reply (default: 300)'),
    CustomArgs(['--min-p'], default=None, type=float, target='generation;min_p',
               help='min_p sampling filter (default: 0.05)'),
    CustomArgs(['--temperature'], default=None, type=float, target='generation;temperature',
               help='sampling temperature (default: 0.2)'),
    CustomArgs(['--k'], default=None, type=int, target='retrieval;k',
               help='preferences retrieved per problem (default: 3)'),
    CustomArgs(['--seed'], default=None, type=int, target='seed',
               help='seed of the run (default: from config)'),
    CustomArgs(['--prefs'], default=None, type=str, target='preferences',
               help='preference file, one "sentence<TAB>TAG" per line'),
]

BENCH_OPTIONS = GENERATION_OPTIONS + [
    CustomArgs(['--reps'], default=None, type=int, target='reps',
               help='repetitions of every scenario in every cell (default: 10)'),
    CustomArgs(['--jobs'], default=None, type=int, target='jobs',
               help='scenarios of a cell run concurrently (default: 1)'),
    CustomArgs(['-o', '--output'], default=None, type=str, target='bench;save_dir',
               help='directory receiving the run directories (default: saved/)'),
    CustomArgs(['--styles'], default=None, type=_choice_list(STYLE_NAMES, 'style'), target='styles',
               help='comma separated prompting styles'),
    CustomArgs(['--representations'], default=None, type=_choice_list(REPRESENTATION_NAMES, 'representation'),
               target='representations', help='comma separated context representations'),
    CustomArgs(['--scenarios'], default=None, type=_comma_list, target='scenarios',
               help='comma separated scenario names (default: all)'),
    CustomArgs(['--scenarios-dir'], default=None, type=str, target='scenarios_dir',
               help='directory of scenario files'),
    CustomArgs(['--forward-seed'], default=None, type=str, target='generation;forward_seed',
               help='send a per-repetition sampling seed to the server, true or false'),
    CustomArgs(['--progress'], default=None, type=str, target='bench;progress',
               help='show progress bars, true or false'),
]

BASELINE_OPTIONS = [
    CustomArgs(['--scenarios-dir'], default=None, type=str, target='scenarios_dir',
               help='directory of scenario files'),
    CustomArgs(['--seed'], default=None, type=int, target='seed',
               help='seed of the random choices (default: from config)'),
]

QUERY_OPTIONS = [
    CustomArgs(['--k'], default=None, type=int, target='retrieval;k',
               help='number of entries returned (default: 3)'),
    CustomArgs(['--prefs'], default=None, type=str, target='preferences',
               help='preference file, one "sentence<TAB>TAG" per line'),
]


def _add_config(parser):
    parser.add_argument('-c', '--config', default=None, type=str,
                        help='config file path (default: configs/config.json)')


def _add_backend_flags(parser):
    parser.add_argument('--backend', default=None, type=str,
                        help='scripted:<replies.json> or a chat completions endpoint URL')
    parser.add_argument('--endpoint', default=None, type=str, help='chat completions endpoint URL')
    parser.add_argument('--model', default=None, type=str, help='model name sent to the server')
    parser.add_argument('--model-label', default=None, type=str, help='model label used in reports')
    parser.add_argument('--api-key', default=None, type=str, help='bearer token (prefer HOME_LLM_API_KEY)')
    parser.add_argument('--timeout', default=None, type=float, help='seconds per model call (default: 120)')


def _add_embedder_flag(parser):
    parser.add_argument('--embedder', default=None, type=str,
                        help='test-embedder or an embedding endpoint URL')


def build_parser() -> UsageArgumentParser:
    parser = UsageArgumentParser(description='LLM smart home decision engine and benchmark')
    commands = parser.add_subparsers(dest='command', metavar='command', parser_class=UsageArgumentParser)
    commands.required = True

    render_parser = commands.add_parser('render', help='print the context representation of a house')
    render_parser.add_argument('house', type=str, help='house file')
    render_parser.add_argument('--rep', default='natural', choices=REPRESENTATION_NAMES,
                               help='context representation (default: natural)')
    render_parser.set_defaults(handler=cmd_render, options=[])

    decide_parser = commands.add_parser('decide', help='run one decision and print the outcome and its trace')
    decide_parser.add_argument('house', type=str, help='house file')
    decide_parser.add_argument('--user', default=1, type=int, help='user id (default: 1)')
    decide_parser.add_argument('--style', default=PromptStyle.DIRECT.value, choices=STYLE_NAMES,
                               help='prompting style (default: direct)')
    decide_parser.add_argument('--rep', default='natural', choices=REPRESENTATION_NAMES,
                               help='context representation (default: natural)')
    _add_config(decide_parser)
    _add_backend_flags(decide_parser)
    _add_embedder_flag(decide_parser)
    add_options(decide_parser, GENERATION_OPTIONS)
    decide_parser.set_defaults(handler=cmd_decide, options=GENERATION_OPTIONS)

    query_parser = commands.add_parser('query', help='print the preferences closest to a text')
    query_parser.add_argument('text', type=str, help='query text')
    _add_config(query_parser)
    _add_embedder_flag(query_parser)
    add_options(query_parser, QUERY_OPTIONS)
    query_parser.set_defaults(handler=cmd_query, options=QUERY_OPTIONS)

    baseline_parser = commands.add_parser('baseline', help='print the random choice baseline of every scenario')
    baseline_parser.add_argument('--draws', default=0, type=int,
                                 help='also simulate this many random choices per scenario (default: 0)')
    baseline_parser.add_argument('--output', default=None, type=str, help='write baseline.csv into this directory')
    _add_config(baseline_parser)
    add_options(baseline_parser, BASELINE_OPTIONS)
    baseline_parser.set_defaults(handler=cmd_baseline, options=BASELINE_OPTIONS)

    bench_parser = commands.add_parser('bench', help='run the benchmark matrix and write the reports')
    bench_parser.add_argument('--baseline-only', action='store_true',
                              help='only compute the random choice baseline, no model is called')
    _add_config(bench_parser)
    _add_backend_flags(bench_parser)
    _add_embedder_flag(bench_parser)
    add_options(bench_parser, BENCH_OPTIONS)
    bench_parser.set_defaults(handler=cmd_bench, options=BENCH_OPTIONS)
    return parser


# builders

def generation_params(config: ConfigParser) -> GenerationParams:
    generation = config['generation']
    try:
        return GenerationParams(max_tokens=int(generation.get('max_tokens', 300)),
                                min_p=float(generation.get('min_p', 0.05)),
                                temperature=float(generation.get('temperature', 0.2)))
    except ValueError as e:
        raise ConfigError(f'generation parameters: {e}')


def build_models(config: ConfigParser) -> List[ModelSpec]:
    models = config.get('models') or []
    if not models:
        raise ConfigError('no model is configured')
    return [ModelSpec(label=entry['label'], backend=ConfigParser.init_from(entry['backend'], llm_backends))
            for entry in models]


def build_index(config: ConfigParser, embedder) -> VectorIndex:
    entries = load_preferences(config['preferences'])
    return VectorIndex.build(entries, embedder)


def _retrieval_k(config: ConfigParser) -> int:
    k = int(config.get('retrieval', {}).get('k', 3))
    if k < 1:
        raise ConfigError('k must be >= 1')
    return k


# commands

def cmd_render(args) -> int:
    setup_logging(None)
    state = load_house(args.house)
    sys.stdout.write(render(state, Representation(args.rep)))
    return EXIT_OK


def cmd_decide(args) -> int:
    config = ConfigParser.from_args(args, args.options, save=False)
    logger = config.get_logger('decide', 1)
    state = load_house(args.house)
    style = PromptStyle(args.style)
    params = generation_params(config)
    if config.get('seed') is not None and config['generation'].get('forward_seed'):
        params = replace(params, seed=int(config['seed']))
    model = build_models(config)[0]
    embedder = config.init_obj('embedder', retrieval_embedders)
    prefs = build_index(config, embedder) if style != PromptStyle.DIRECT else None

    logger.info(f'{style.value} decision for user {args.user} with model {model.label}.')
    outcome, trace = decide(style, state, args.user, Representation(args.rep), prefs, model.backend, embedder,
                            params, k=_retrieval_k(config))
    document = {'model_label': model.label, 'style': style.value, 'representation': args.rep,
                'outcome': outcome.to_dict(), 'trace': trace.summary(),
                'expected_llm_calls': EXPECTED_CALLS[style]}
    sys.stdout.write(json.dumps(document, indent=2, ensure_ascii=False) + '\n')
    if trace.error is not None:
        logger.error(f'Decision stopped by {type(trace.error).__name__}: {trace.error}')
        return EXIT_TRANSPORT
    return EXIT_OK


def cmd_query(args) -> int:
    config = ConfigParser.from_args(args, args.options, save=False)
    embedder = config.init_obj('embedder', retrieval_embedders)
    index = build_index(config, embedder)
    for rank, entry in enumerate(query_top_k(index, args.text, _retrieval_k(config), embedder), start=1):
        sys.stdout.write(f'{rank}. {format_for_prompt([entry])}\n')
    return EXIT_OK


def _baseline_frame(scenarios, draws: int, seed: int) -> pd.DataFrame:
    frame = baseline_table(scenarios)
    frame['baseline'] = [fraction_to_decimal(exact_baseline(row)) for row in frame.itertuples(index=False)]
    if draws > 0:
        frame['simulated'] = [round(simulate_random_grade(scenario, draws, seed), 4) for scenario in scenarios]
    return frame


def _print_baselines(frame: pd.DataFrame):
    columns = ['scenario', 'category', 'n_rated_1', 'n_rated_2', 'n_actions', 'baseline']
    if 'simulated' in frame.columns:
        columns.append('simulated')
    sys.stdout.write(frame[columns].to_string(index=False) + '\n')


def cmd_baseline(args) -> int:
    config = ConfigParser.from_args(args, args.options, save=False)
    scenarios = load_scenarios(config['scenarios_dir'], config.get('scenarios'))
    frame = _baseline_frame(scenarios, args.draws, int(config.get('seed', 0)))
    _print_baselines(frame)
    if args.output:
        output = Path(args.output)
        output.mkdir(parents=True, exist_ok=True)
        frame.to_csv(output / 'baseline.csv', index=False)
    return EXIT_OK


def cmd_bench(args) -> int:
    config = ConfigParser.from_args(args, args.options, save=True)
    logger = config.get_logger('bench', config['bench'].get('log_verbosity', 1))
    scenarios = load_scenarios(config['scenarios_dir'], config.get('scenarios'))
    logger.info(f'{len(scenarios)} scenario(s) loaded, run directory {config.save_dir}.')

    if args.baseline_only:
        frame = _baseline_frame(scenarios, 0, int(config['seed']))
        _print_baselines(frame)
        frame.to_csv(config.save_dir / 'baseline.csv', index=False)
        return EXIT_OK

    matrix = BenchMatrix(models=tuple(build_models(config)),
                         representations=tuple(Representation(rep) for rep in config['representations']),
                         styles=tuple(PromptStyle(style) for style in config['styles']))
    embedder = config.init_obj('embedder', retrieval_embedders)
    prefs = build_index(config, embedder)
    runner = BenchRunner(matrix, scenarios, prefs, embedder, generation_params(config),
                         reps=int(config['reps']), seed=int(config['seed']), jobs=int(config['jobs']),
                         k=_retrieval_k(config), forward_seed=config['generation']['forward_seed'],
                         output_dir=config.save_dir, progress=config['bench']['progress'], logger=logger)
    records = runner.run()
    report = aggregate(records, scenarios)
    emit_report(report, config.save_dir)
    for row in report.cells.itertuples(index=False):
        sys.stdout.write(f'{row.model_label}\t{row.representation}\t{row.style}\t'
                         f'avg_grade={row.avg_grade:.3f}\tavg_time={row.avg_processing_s:.3f}s\t'
                         f'failure_ratio={row.failure_ratio:.3f}\n')
    sys.stdout.write(f'reports written to {config.save_dir}\n')
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except (HouseLoadError, ScenarioLoadError, PreferenceParseError, BuildError, AggregationError, ConfigError) as e:
        sys.stderr.write(f'error: {e}\n')
        return EXIT_DATA
    except BenchmarkAborted as e:
        where = f' (partial records in {e.partial_path})' if e.partial_path else ''
        sys.stderr.write(f'error: benchmark aborted: {e}{where}\n')
        return EXIT_TRANSPORT
    except (GatewayError, RetrievalError) as e:
        sys.stderr.write(f'error: {e}\n')
        return EXIT_TRANSPORT


if __name__ == '__main__':
    sys.exit(main())
