# -*- coding: utf-8 -*-

import collections
import json
import logging
import os
from argparse import ArgumentParser, Namespace
from datetime import datetime
from functools import reduce
from operator import getitem
from pathlib import Path
from typing import Any, Dict, Mapping, Optional

from logger import setup_logging
from utils import read_json, write_json
from utils.errors import ConfigError

DEFAULT_CONFIG = Path(__file__).parent / 'configs' / 'config.json'

ENV_ENDPOINT = 'HOME_LLM_ENDPOINT'
ENV_MODEL = 'HOME_LLM_MODEL'
ENV_API_KEY = 'HOME_LLM_API_KEY'
ENV_TIMEOUT = 'HOME_LLM_TIMEOUT'
ENV_EMBEDDER = 'HOME_LLM_EMBEDDER'

SCRIPTED_PREFIX = 'scripted:'

CustomArgs = collections.namedtuple('CustomArgs', 'flags default type target help')


class ConfigParser:
    def __init__(self, config, modification=None, run_id=None, save=True):
        """
        class to parse configuration json file. Handles the experiment matrix, generation parameters,
        initializations of backends and embedders, run directories and the logging module.
        :param config: Dict containing the configuration, contents of `config.json` file for example.
        :param modification: Dict keychain:value, specifying position values to be replaced from config dict.
        :param run_id: Unique Identifier for bench runs, the timestamp is appended to it.
        :param save: create the run directory, save the effective config there and log into it; otherwise
                     only console logging is configured
        """
        # load config file and apply modification
        self._config = _update_config(config, modification)
        self._normalise()
        self.log_levels = {
            0: logging.WARNING,
            1: logging.INFO,
            2: logging.DEBUG
        }

        if save:
            save_dir = Path(self.config['bench']['save_dir'])
            exper_name = self.config['name']
            timestamp = datetime.now().strftime(r'%m%d_%H%M%S')
            run_id = timestamp if not run_id else run_id + '_' + timestamp
            self._save_dir = save_dir / exper_name / run_id
            self.save_dir.mkdir(parents=True, exist_ok=True)
            write_json(self.config, self.save_dir / 'config.json')
            setup_logging(self.save_dir)
        else:
            self._save_dir = None
            setup_logging(None)

    @classmethod
    def from_args(cls, args: Namespace, options=(), save=True, environ: Optional[Mapping[str, str]] = None):
        """
        Initialize this class from parsed cli arguments. The config file comes from `-c`, then environment
        variables and backend flags are applied, then the custom options.
        """
        config_file_path = Path(args.config) if getattr(args, 'config', None) else DEFAULT_CONFIG
        config = load_config(config_file_path)
        apply_environment(config, os.environ if environ is None else environ)
        override_models(config,
                        endpoint=getattr(args, 'endpoint', None),
                        model=getattr(args, 'model', None),
                        api_key=getattr(args, 'api_key', None),
                        timeout=getattr(args, 'timeout', None),
                        backend=getattr(args, 'backend', None),
                        label=getattr(args, 'model_label', None))
        if getattr(args, 'embedder', None):
            config['embedder'] = embedder_block(args.embedder, _embedder_dimension(config))
        # parse custom cli options into dictionary
        modification = {opt.target: getattr(args, _get_opt_name(opt.flags)) for opt in options}
        return cls(config, modification, config.get('run_id'), save=save)

    def _normalise(self):
        config = self.config
        for key in ('styles', 'representations', 'scenarios'):
            if isinstance(config.get(key), str):
                config[key] = [item.strip() for item in config[key].split(',') if item.strip()]
        generation = config.setdefault('generation', {})
        # str to bool, from modification or from default json file
        generation['forward_seed'] = generation.get('forward_seed') in (True, 'true')
        bench = config.setdefault('bench', {})
        bench['progress'] = bench.get('progress', True) in (True, 'true')
        if int(config.get('reps', 0)) < 0:
            raise ConfigError('reps must be >= 0')
        if int(config.get('jobs', 1)) < 1:
            raise ConfigError('jobs must be >= 1')

    def init_obj(self, name, module, *args, **kwargs):
        """
        Finds a function handle with the name given as 'type' in config, and returns the
        instance initialized with corresponding arguments given.

        `object = config.init_obj('name', module, a, b=1)`
        is equivalent to
        `object = module.name(a, b=1)`
        """
        return self.init_from(self[name], module, *args, **kwargs)

    @staticmethod
    def init_from(block: Mapping[str, Any], module, *args, **kwargs):
        ''' same as init_obj for a {"type": ..., "args": {...}} block that is not a top-level key '''
        module_name = block['type']
        module_args = {key: value for key, value in dict(block.get('args', {})).items() if value is not None}
        module_args.update(kwargs)
        try:
            factory = getattr(module, module_name)
        except AttributeError:
            raise ConfigError(f'unknown type "{module_name}" in {module.__name__}')
        return factory(*args, **module_args)

    def __getitem__(self, name):
        """Access items like ordinary dict."""
        return self.config[name]

    def get(self, name, default=None):
        return self.config.get(name, default)

    def get_logger(self, name, verbosity=2):
        msg_verbosity = 'verbosity option {} is invalid. Valid options are {}.'.format(verbosity,
                                                                                       self.log_levels.keys())
        assert verbosity in self.log_levels, msg_verbosity
        logger = logging.getLogger(name)
        logger.setLevel(self.log_levels[verbosity])
        return logger

    # setting read-only attributes
    @property
    def config(self):
        return self._config

    @property
    def save_dir(self):
        return self._save_dir


def load_config(path) -> Dict[str, Any]:
    path = Path(path)
    try:
        return read_json(path)
    except FileNotFoundError:
        raise ConfigError(f'{path}: configuration file not found')
    except json.JSONDecodeError as e:
        raise ConfigError(f'{path}: not a valid JSON document (line {e.lineno}, column {e.colno})')


def add_options(parser: ArgumentParser, options):
    for opt in options:
        parser.add_argument(*opt.flags, default=opt.default, type=opt.type, help=opt.help)


def http_model(endpoint: str, model: Optional[str], api_key=None, timeout=None, label=None) -> Dict[str, Any]:
    model = model or 'default'
    return {'label': label or model,
            'backend': {'type': 'HttpChatBackend',
                        'args': {'endpoint': endpoint, 'model': model, 'api_key': api_key, 'timeout': timeout}}}


def scripted_model(path: str, label=None) -> Dict[str, Any]:
    return {'label': label or 'scripted',
            'backend': {'type': 'ScriptedBackend', 'args': {'path': path}}}


def _http_entries(config):
    return [entry['backend']['args'] for entry in config.get('models', [])
            if entry['backend']['type'] == 'HttpChatBackend']


def _parse_timeout(value) -> Optional[float]:
    if value is None or value == '':
        return None
    try:
        timeout = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f'timeout must be a number of seconds, got {value!r}')
    if timeout <= 0:
        raise ConfigError('timeout must be positive')
    return timeout


def override_models(config, endpoint=None, model=None, api_key=None, timeout=None, backend=None, label=None):
    '''
    `backend` is "scripted:<file>" or an endpoint URL; an endpoint replaces the configured model list by that
    single model. The api key and timeout apply to every HTTP model.
    '''
    if backend:
        if backend.startswith(SCRIPTED_PREFIX):
            config['models'] = [scripted_model(backend[len(SCRIPTED_PREFIX):], label)]
        elif backend.startswith('http://') or backend.startswith('https://'):
            endpoint = backend
        else:
            raise ConfigError(f'unknown backend "{backend}" (use scripted:<file> or an http(s) URL)')
    if endpoint:
        config['models'] = [http_model(endpoint, model, label=label)]
    elif model:
        for args in _http_entries(config):
            args['model'] = model
    timeout = _parse_timeout(timeout)
    for args in _http_entries(config):
        if api_key:
            args['api_key'] = api_key
        if timeout is not None:
            args['timeout'] = timeout
    if label and len(config.get('models', [])) == 1:
        config['models'][0]['label'] = label


def apply_environment(config, environ: Mapping[str, str]):
    override_models(config, endpoint=environ.get(ENV_ENDPOINT), model=environ.get(ENV_MODEL),
                    api_key=environ.get(ENV_API_KEY), timeout=environ.get(ENV_TIMEOUT))
    if environ.get(ENV_EMBEDDER):
        config['embedder'] = embedder_block(environ[ENV_EMBEDDER], _embedder_dimension(config))


def _embedder_dimension(config) -> int:
    return int(config.get('embedder', {}).get('args', {}).get('dimension', 256))


def embedder_block(value: str, dimension: int = 256) -> Dict[str, Any]:
    ''' "test-embedder" or an embedding endpoint URL '''
    if value in ('test-embedder', 'hashing'):
        return {'type': 'HashingEmbedder', 'args': {'dimension': dimension}}
    if value.startswith('http://') or value.startswith('https://'):
        return {'type': 'HttpEmbedder', 'args': {'endpoint': value, 'dimension': dimension}}
    raise ConfigError(f'unknown embedder "{value}" (use test-embedder or an http(s) URL)')


# helper functions to update config dict with custom cli options
def _update_config(config, modification):
    if modification is None:
        return config

    for k, v in modification.items():
        if v is not None:
            _set_by_path(config, k, v)
    return config


def _get_opt_name(flags):
    for flg in flags:
        if flg.startswith('--'):
            return flg.replace('--', '').replace('-', '_')
    return flags[0].replace('--', '').replace('-', '_')


def _set_by_path(tree, keys, value):
    """Set a value in a nested object in tree by sequence of keys."""
    keys = keys.split(';')
    _get_by_path(tree, keys[:-1])[keys[-1]] = value


def _get_by_path(tree, keys):
    """Access a nested object in tree by sequence of keys."""
    return reduce(getitem, keys, tree)
