# -*- coding: utf-8 -*-

from .prompts import PromptTemplates, default_templates, format_candidates
from .chains import PromptStyle, EXPECTED_CALLS, RETRIEVAL_K, decide, parse_problems
