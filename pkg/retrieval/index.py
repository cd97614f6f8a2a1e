# -*- coding: utf-8 -*-

from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from utils.errors import RetrievalError
from .embedders import NORM_TOLERANCE, Embedder, embed, embed_many
from .preferences import PreferenceEntry

# scores closer than this are ties, resolved by load order
SCORE_DECIMALS = 12


@dataclass(frozen=True)
class VectorIndex:
    entries: Tuple[PreferenceEntry, ...]
    dimension: int

    def __post_init__(self):
        for position, entry in enumerate(self.entries):
            if entry.embedding is None:
                raise RetrievalError(f'entry {position} has no embedding')
            if entry.embedding.shape != (self.dimension,):
                raise RetrievalError(f'entry {position} has dimension {entry.embedding.shape}, '
                                     f'index dimension is {self.dimension}')
            if abs(float(np.linalg.norm(entry.embedding)) - 1.0) > NORM_TOLERANCE:
                raise RetrievalError(f'entry {position} embedding is not unit-normalised')
        matrix = np.stack([entry.embedding for entry in self.entries]) if self.entries \
            else np.zeros((0, self.dimension))
        matrix.setflags(write=False)
        object.__setattr__(self, '_matrix', matrix)

    @classmethod
    def build(cls, entries: Sequence[PreferenceEntry], embedder: Embedder) -> 'VectorIndex':
        vectors = embed_many([entry.text for entry in entries], embedder)
        embedded = tuple(entry.with_embedding(vector) for entry, vector in zip(entries, vectors))
        return cls(embedded, embedder.dimension)

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    def __len__(self):
        return len(self.entries)


def cosine_scores(index: VectorIndex, query_vector: np.ndarray) -> np.ndarray:
    return np.round(index.matrix @ query_vector, SCORE_DECIMALS)


def query_top_k(index: VectorIndex, query: str, k: int, embedder: Embedder) -> List[PreferenceEntry]:
    '''
    The k entries most similar to the query, best first; equal scores keep load order.
    An empty index answers with an empty list.
    '''
    if k < 1:
        raise RetrievalError('k must be >= 1')
    if len(index) == 0:
        return []
    query_vector = embed(query, embedder)
    if query_vector.shape != (index.dimension,):
        raise RetrievalError(f'query dimension {query_vector.shape} does not match index dimension {index.dimension}')
    scores = cosine_scores(index, query_vector)
    order = np.argsort(-scores, kind='stable')[:k]
    return [index.entries[position] for position in order]
