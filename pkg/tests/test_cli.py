# -*- coding: utf-8 -*-

import json
import shlex

import pandas as pd
import pytest

from main import EXIT_DATA, EXIT_OK, EXIT_TRANSPORT, EXIT_USAGE, build_parser, main
from parse_config import DEFAULT_CONFIG, ConfigParser, apply_environment, embedder_block, load_config, override_models
from utils.errors import ConfigError
from tests.helpers import GOLDEN, HOUSES, PREFERENCES, ROOT, SCENARIOS_DIR, SCRIPTED

HOUSE = str(HOUSES / 'out_of_bed_night.house')
SCRIPT = str(SCRIPTED / 'out_of_bed_night.json')
COMMON = ['--prefs', str(PREFERENCES), '--embedder', 'test-embedder']


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch):
    for name in ('HOME_LLM_ENDPOINT', 'HOME_LLM_MODEL', 'HOME_LLM_API_KEY', 'HOME_LLM_TIMEOUT', 'HOME_LLM_EMBEDDER'):
        monkeypatch.delenv(name, raising=False)


def _write_script(tmp_path, items):
    path = tmp_path / 'replies.json'
    path.write_text(json.dumps(items), encoding='utf-8')
    return str(path)


def test_render(capsys):
    assert main(['render', HOUSE]) == EXIT_OK
    assert capsys.readouterr().out == (GOLDEN / 'out_of_bed_night.natural.txt').read_text(encoding='utf-8')
    assert main(['render', HOUSE, '--rep', 'json']) == EXIT_OK
    assert json.loads(capsys.readouterr().out)['time'] == '10:21 PM'


def test_render_missing_house(tmp_path, capsys):
    assert main(['render', str(tmp_path / 'none.house')]) == EXIT_DATA
    assert 'not found' in capsys.readouterr().err


def test_render_unreadable_house(tmp_path, capsys):
    binary = tmp_path / 'binary.house'
    binary.write_bytes(b'\xff\xfe{}')
    assert main(['render', str(binary)]) == EXIT_DATA
    assert 'not UTF-8' in capsys.readouterr().err
    assert main(['render', str(tmp_path)]) == EXIT_DATA
    assert 'cannot read' in capsys.readouterr().err


@pytest.mark.parametrize('argv', [
    [],
    ['fly'],
    ['render', HOUSE, '--rep', 'yaml'],
    ['decide', HOUSE, '--style', 'FiveQuestion'],
    ['bench', '--styles', 'direct,sideways'],
])
def test_usage_errors(argv):
    with pytest.raises(SystemExit) as info:
        main(argv)
    assert info.value.code == EXIT_USAGE


def test_decide_with_scripted_backend(capsys):
    code = main(['decide', HOUSE, '--user', '1', '--style', 'ThreeQuestion', '--backend', f'scripted:{SCRIPT}']
                + COMMON)
    assert code == EXIT_OK
    document = json.loads(capsys.readouterr().out)
    assert document['style'] == 'ThreeQuestion'
    assert document['model_label'] == 'scripted'
    assert document['expected_llm_calls'] == 4
    assert document['trace']['llm_calls'] == 4
    assert len(document['trace']['retrieval_queries']) == 3
    assert document['outcome']['action'] == 'floor lamp is Off'
    assert document['outcome']['luminosity'] == 20
    assert document['outcome']['failed'] is False


def test_decide_unknown_user(capsys):
    code = main(['decide', HOUSE, '--user', '9', '--backend', f'scripted:{SCRIPT}'] + COMMON)
    assert code == EXIT_DATA


def test_decide_unreachable_server(tmp_path, capsys):
    script = _write_script(tmp_path, [{'unreachable': 'connection refused'}])
    code = main(['decide', HOUSE, '--style', 'direct', '--backend', f'scripted:{script}'] + COMMON)
    assert code == EXIT_TRANSPORT
    document = json.loads(capsys.readouterr().out)
    assert document['outcome']['failed'] is True
    assert document['trace']['error'] == 'connection refused'


def test_query(capsys):
    code = main(['query', 'the user is watching TV and wants the floor lamp', '--k', '2'] + COMMON)
    assert code == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines == ['1. [PREFERENCE] User 1 prefers the floor lamp to the main light when watching TV.',
                     lines[1]]
    assert lines[1].startswith('2. [')


def test_query_with_broken_preferences(tmp_path):
    broken = tmp_path / 'prefs.tsv'
    broken.write_text('A rule.\tLAW\n', encoding='utf-8')
    assert main(['query', 'x', '--prefs', str(broken), '--embedder', 'test-embedder']) == EXIT_DATA
    assert main(['query', 'x', '--prefs', str(tmp_path), '--embedder', 'test-embedder']) == EXIT_DATA


def test_baseline(tmp_path, capsys):
    code = main(['baseline', '--scenarios-dir', str(SCENARIOS_DIR), '--draws', '2000', '--output', str(tmp_path)])
    assert code == EXIT_OK
    out = capsys.readouterr().out
    assert '0.375' in out
    assert '1.111' in out
    frame = pd.read_csv(tmp_path / 'baseline.csv')
    assert len(frame) == 11
    assert {'n_rated_1', 'n_rated_2', 'n_actions', 'baseline', 'simulated'} <= set(frame.columns)


def test_bench_baseline_only(tmp_path, capsys):
    code = main(['bench', '--baseline-only', '--scenarios-dir', str(SCENARIOS_DIR), '-o', str(tmp_path)])
    assert code == EXIT_OK
    run_dirs = list((tmp_path / 'HomeLLM_Bench').glob('example_*'))
    assert len(run_dirs) == 1
    assert (run_dirs[0] / 'baseline.csv').is_file()
    assert (run_dirs[0] / 'config.json').is_file()


def _bench_argv(tmp_path, script, reps='2'):
    return ['bench', '--backend', f'scripted:{script}', '--styles', 'direct', '--representations', 'natural',
            '--scenarios', 'Out of bed at night', '--reps', reps, '--scenarios-dir', str(SCENARIOS_DIR),
            '-o', str(tmp_path), '--progress', 'false'] + COMMON


def test_bench_with_scripted_backend(tmp_path, capsys):
    reply = {'reply': {'reasoning': 'dim light', 'action': 'floor lamp is Off'}}
    script = _write_script(tmp_path, [reply, reply])
    assert main(_bench_argv(tmp_path / 'runs', script)) == EXIT_OK
    out = capsys.readouterr().out
    assert 'scripted\tnatural\tdirect\tavg_grade=2.000' in out
    run_dir = next((tmp_path / 'runs' / 'HomeLLM_Bench').glob('example_*'))
    for name in ('records.csv', 'report.csv', 'report.md', 'config.json'):
        assert (run_dir / name).is_file()
    saved = load_config(run_dir / 'config.json')
    assert saved['reps'] == 2
    assert saved['styles'] == ['direct']


def test_bench_unreachable_server(tmp_path, capsys):
    script = _write_script(tmp_path, [{'unreachable': 'connection refused'}])
    assert main(_bench_argv(tmp_path / 'runs', script)) == EXIT_TRANSPORT
    assert 'partial records' in capsys.readouterr().err


def test_bench_invalid_values(tmp_path):
    script = _write_script(tmp_path, [])
    assert main(_bench_argv(tmp_path / 'runs', script, reps='-1')) == EXIT_DATA
    assert main(['bench', '-c', str(tmp_path / 'missing.json')]) == EXIT_DATA


# configuration layers

def test_environment_then_flags_override_the_config_file():
    config = load_config(DEFAULT_CONFIG)
    apply_environment(config, {'HOME_LLM_ENDPOINT': 'http://10.0.0.2:8000', 'HOME_LLM_MODEL': 'env-model',
                               'HOME_LLM_TIMEOUT': '30', 'HOME_LLM_EMBEDDER': 'http://10.0.0.2:9000/embed'})
    backend = config['models'][0]['backend']
    assert backend['args']['endpoint'] == 'http://10.0.0.2:8000'
    assert backend['args']['model'] == 'env-model'
    assert backend['args']['timeout'] == 30.0
    assert config['embedder']['type'] == 'HttpEmbedder'

    override_models(config, model='flag-model', api_key='token')
    assert config['models'][0]['backend']['args']['model'] == 'flag-model'
    assert config['models'][0]['backend']['args']['api_key'] == 'token'
    override_models(config, backend=f'scripted:{SCRIPT}', label='replay')
    assert config['models'] == [{'label': 'replay',
                                 'backend': {'type': 'ScriptedBackend', 'args': {'path': SCRIPT}}}]


def test_configuration_errors():
    with pytest.raises(ConfigError):
        override_models({'models': []}, backend='ftp://nowhere')
    with pytest.raises(ConfigError):
        override_models({'models': []}, endpoint='http://x', timeout='soon')
    with pytest.raises(ConfigError):
        embedder_block('word2vec')
    with pytest.raises(ConfigError):
        ConfigParser.init_from({'type': 'Nope', 'args': {}}, json)


def test_launcher_command_line_parses():
    script = (ROOT / 'bench.sh').read_text(encoding='utf-8').replace('\\\n', ' ')
    command = next(line for line in script.splitlines() if 'main.py' in line)
    tokens = shlex.split(command)
    args = build_parser().parse_args(tokens[tokens.index('main.py') + 1:tokens.index('>>')])
    assert args.command == 'bench'
    assert args.progress == 'true'
    assert args.reps == 10
