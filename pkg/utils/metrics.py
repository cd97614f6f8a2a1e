# -*- coding: utf-8 -*-

from typing import *

import numpy as np
import pandas as pd


class AverageMetricTracker:
    def __init__(self, *keys, fmt: Optional[str] = ':.6f'):
        '''
        Average metric tracker, can save multi-value
        :param keys: metrics
        '''
        self.fmt = fmt
        columns = ['total', 'counts', 'average', 'current_value']
        self._data = pd.DataFrame(np.zeros((len(keys), len(columns))), index=list(keys), columns=columns)
        self.reset()

    def reset(self):
        self._data.loc[:, :] = 0.0

    def update(self, key, value, n=1):
        self._data.loc[key, 'current_value'] = value
        self._data.loc[key, 'total'] += value * n
        self._data.loc[key, 'counts'] += n
        self._data.loc[key, 'average'] = self._data.loc[key, 'total'] / self._data.loc[key, 'counts']

    def update_multi_metrics(self, metrics: List[Dict[str, float]]):
        for metric in metrics:
            if 'n' not in metric.keys():
                metric['n'] = 1
            self.update(metric['key'], metric['value'], metric['n'])

    def avg(self, key):
        return float(self._data.loc[key, 'average'])
