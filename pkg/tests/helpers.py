# -*- coding: utf-8 -*-

import copy
import json
import socket
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / 'fixtures'
HOUSES = FIXTURES / 'houses'
SCENARIOS_DIR = FIXTURES / 'scenarios'
PREFERENCES = FIXTURES / 'preferences.tsv'
SCRIPTED = FIXTURES / 'scripted'
GOLDEN = Path(__file__).resolve().parent / 'golden'

PROBLEMS_REPLY = '1. The user moves in the dark.\n2. Bright light dazzles at night.\n3. The TV is still on.'

_MINIMAL_HOUSE = {
    'clock': '22:21',
    'inside_temp_c': 20,
    'outside_temp_c': 5,
    'cleaning': {'last_cleaned': 'today', 'cadence': 'one time a week'},
    'action_history': [],
    'users': [{'user_id': 1, 'location': 'livingroom', 'current_activity': 'watching TV',
               'activity_history': []}],
    'rooms': [
        {'id': 'livingroom', 'name': 'Livingroom', 'devices': [
            {'id': 'lr_main', 'name': 'main', 'kind': 'Actuator', 'category': 'MainLight',
             'state': {'power': 'Off'}},
            {'id': 'lr_tv', 'name': 'TV', 'kind': 'Actuator', 'category': 'Tv', 'state': {'power': 'On'}},
            {'id': 'lr_co2', 'name': 'CO2 sensor', 'kind': 'Sensor', 'category': 'Co2Sensor',
             'state': {'reading': 513}},
        ]},
        {'id': 'kitchen', 'name': 'Kitchen', 'devices': [
            {'id': 'k_main', 'name': 'main', 'kind': 'Actuator', 'category': 'MainLight',
             'state': {'power': 'Off'}},
        ]},
    ],
    'global_devices': [
        {'id': 'hvac', 'name': 'Centralized HVAC system', 'kind': 'Actuator', 'category': 'Hvac',
         'state': {'power': 'On', 'setpoint': 20}},
    ],
}


def house_document():
    ''' a small valid house document, safe to mutate '''
    return copy.deepcopy(_MINIMAL_HOUSE)


def answer_reply(action, **optional):
    document = {'reasoning': 'scripted answer', 'action': action}
    document.update(optional)
    return json.dumps(document)


class StepClock:
    ''' a monotonic clock advancing by `step` seconds at every reading '''

    def __init__(self, step=0.25):
        self.step = step
        self.now = 0.0

    def __call__(self):
        self.now += self.step
        return self.now


def free_port():
    with socket.socket(socket.AF_INET, socket.SOCK_STREAM) as sock:
        sock.bind(('127.0.0.1', 0))
        return sock.getsockname()[1]


class StubServer:
    '''
    Local HTTP server answering every POST with `respond(path, body)`, which returns (status, document).
    Received requests are kept in `requests` as (path, headers, body).
    '''

    def __init__(self, respond):
        self.respond = respond
        self.requests = []
        stub = self

        class Handler(BaseHTTPRequestHandler):
            def do_POST(self):
                length = int(self.headers.get('Content-Length', 0))
                body = json.loads(self.rfile.read(length) or b'null')
                stub.requests.append((self.path, dict(self.headers), body))
                status, document = stub.respond(self.path, body)
                payload = document if isinstance(document, bytes) else json.dumps(document).encode('utf-8')
                self.send_response(status)
                self.send_header('Content-Type', 'application/json')
                self.send_header('Content-Length', str(len(payload)))
                self.end_headers()
                self.wfile.write(payload)

            def log_message(self, format, *args):
                pass

        self.server = ThreadingHTTPServer(('127.0.0.1', 0), Handler)
        self.thread = threading.Thread(target=self.server.serve_forever, daemon=True)

    @property
    def url(self):
        host, port = self.server.server_address
        return f'http://{host}:{port}'

    def __enter__(self):
        self.thread.start()
        return self

    def __exit__(self, *exc):
        self.server.shutdown()
        self.server.server_close()
        self.thread.join()


def check_golden(name, text, update_golden):
    ''' compares `text` with tests/golden/<name>; only --update-golden writes the file '''
    path = GOLDEN / name
    if update_golden:
        path.write_text(text, encoding='utf-8')
        return
    if not path.is_file():
        pytest.fail(f'golden file {name} is missing, run pytest with --update-golden and commit it')
    assert text == path.read_text(encoding='utf-8')
