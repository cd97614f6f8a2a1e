# -*- coding: utf-8 -*-


class HomeLLMError(Exception):
    """Base class of every error raised by this package."""


class HouseLoadError(HomeLLMError):
    pass


class ApplyError(HomeLLMError):
    pass


class BuildError(HomeLLMError):
    pass


class BaselineError(HomeLLMError):
    pass


class PreferenceParseError(HomeLLMError):

    def __init__(self, message, line_number=None):
        if line_number is not None:
            message = f'line {line_number}: {message}'
        super().__init__(message)
        self.line_number = line_number


class RetrievalError(HomeLLMError):
    pass


class GatewayError(HomeLLMError):
    '''
    transport level failure of a chat backend.
    :param elapsed: seconds spent before the failure surfaced
    '''

    def __init__(self, message, elapsed=0.0):
        super().__init__(message)
        self.elapsed = elapsed


class BackendUnreachableError(GatewayError):
    pass


class ScenarioLoadError(HomeLLMError):
    pass


class AggregationError(HomeLLMError):
    pass


class BenchmarkAborted(HomeLLMError):

    def __init__(self, message, records=None, partial_path=None):
        super().__init__(message)
        self.records = list(records or [])
        self.partial_path = partial_path


class ConfigError(HomeLLMError):
    pass
