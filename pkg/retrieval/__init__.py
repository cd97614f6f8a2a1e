# -*- coding: utf-8 -*-

from .preferences import *
from .embedders import Embedder, HashingEmbedder, HttpEmbedder, embed, embed_many
from .index import VectorIndex, query_top_k
