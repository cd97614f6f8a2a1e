# -*- coding: utf-8 -*-

import logging
import logging.config
from pathlib import Path
from utils import read_json


def setup_logging(save_dir=None, log_config='logger_config.json', default_level=logging.INFO):
    """
    Setup logging configuration.
    File handlers are written into save_dir; without a save_dir only the console handler is kept.
    """
    log_config = Path(__file__).parent.joinpath(log_config)
    if log_config.is_file():
        config = read_json(log_config)
        file_handlers = [name for name, handler in config['handlers'].items() if 'filename' in handler]
        for name in file_handlers:
            if save_dir is None:
                del config['handlers'][name]
                config['root']['handlers'] = [h for h in config['root']['handlers'] if h != name]
            else:
                handler = config['handlers'][name]
                handler['filename'] = str(Path(save_dir) / handler['filename'])

        logging.config.dictConfig(config)
    else:
        print("Warning: logging configuration file is not found in {}.".format(log_config))
        logging.basicConfig(level=default_level)
