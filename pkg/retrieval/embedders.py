# -*- coding: utf-8 -*-

"""
Embedders turn sentences into vectors. ``embed`` L2-normalises whatever the embedder returns.

HashingEmbedder is the deterministic test embedder. For a text it:
  1. lower-cases the text and extracts tokens with the pattern ``[a-z0-9]+``
     (a text without such tokens is used whole as its single token);
  2. for every token computes ``sha256(token.encode('utf-8'))`` and reads the first 4 bytes of the digest
     as a little-endian unsigned integer ``h``;
  3. adds 1.0 to component ``h % dimension`` of a float64 zero vector (dimension 256 by default).
"""

import hashlib
import logging
import re
import time
from abc import ABC, abstractmethod
from typing import List, Optional, Sequence

import numpy as np
import requests

from utils.errors import RetrievalError

logger = logging.getLogger(__name__)

_TOKEN = re.compile(r'[a-z0-9]+')
NORM_TOLERANCE = 1e-6


class Embedder(ABC):
    dimension: int

    @abstractmethod
    def embed_batch(self, texts: Sequence[str]) -> np.ndarray:
        ''' (len(texts), dimension) array, one raw vector per text; stateless per call '''


class HashingEmbedder(Embedder):

    def __init__(self, dimension: int = 256):
        if dimension < 1:
            raise ValueError('dimension must be positive')
        self.dimension = dimension

    def tokens(self, text: str) -> List[str]:
        return _TOKEN.findall(text.lower()) or [text]

    def embed_batch(self, texts: Sequence[str]) -> np.ndarray:
        vectors = np.zeros((len(texts), self.dimension), dtype=np.float64)
        for row, text in enumerate(texts):
            for token in self.tokens(text):
                digest = hashlib.sha256(token.encode('utf-8')).digest()
                vectors[row, int.from_bytes(digest[:4], 'little') % self.dimension] += 1.0
        return vectors


class HttpEmbedder(Embedder):
    '''
    Client of an embedding server. The request body is ``{"<input_key>": [texts...], "model": model}``;
    the response is either ``{"data": [{"embedding": [...]}, ...]}`` or a bare list of vectors.
    '''

    def __init__(self, endpoint: str, dimension: int, model: Optional[str] = None, timeout: float = 60.0,
                 input_key: str = 'input', api_key: Optional[str] = None):
        self.endpoint = endpoint
        self.dimension = dimension
        self.model = model
        self.timeout = timeout
        self.input_key = input_key
        self.session = requests.Session()
        if api_key:
            self.session.headers['Authorization'] = f'Bearer {api_key}'

    def embed_batch(self, texts: Sequence[str]) -> np.ndarray:
        payload = {self.input_key: list(texts)}
        if self.model:
            payload['model'] = self.model
        started = time.perf_counter()
        try:
            response = self.session.post(self.endpoint, json=payload, timeout=self.timeout)
            response.raise_for_status()
            data = response.json()
        except (requests.RequestException, ValueError) as e:
            raise RetrievalError(f'embedding request to {self.endpoint} failed after '
                                 f'{time.perf_counter() - started:.2f}s: {e}') from e

        if isinstance(data, dict) and 'data' in data:
            rows = sorted(data['data'], key=lambda item: item.get('index', 0))
            vectors = [row['embedding'] for row in rows]
        elif isinstance(data, list):
            vectors = data
        else:
            raise RetrievalError(f'unrecognised embedding response from {self.endpoint}')
        matrix = np.asarray(vectors, dtype=np.float64)
        if matrix.shape != (len(texts), self.dimension):
            raise RetrievalError(f'embedding server returned shape {matrix.shape}, '
                                 f'expected ({len(texts)}, {self.dimension})')
        return matrix


def normalise(vectors: np.ndarray) -> np.ndarray:
    vectors = np.atleast_2d(np.asarray(vectors, dtype=np.float64))
    norms = np.linalg.norm(vectors, axis=1, keepdims=True)
    if np.any(norms == 0):
        raise RetrievalError('cannot normalise a zero embedding')
    return vectors / norms


def embed(text: str, embedder: Embedder) -> np.ndarray:
    if not text:
        raise RetrievalError('cannot embed an empty text')
    return normalise(embedder.embed_batch([text]))[0]


def embed_many(texts: Sequence[str], embedder: Embedder) -> np.ndarray:
    if not texts:
        return np.zeros((0, embedder.dimension), dtype=np.float64)
    if any(not text for text in texts):
        raise RetrievalError('cannot embed an empty text')
    return normalise(embedder.embed_batch(list(texts)))
