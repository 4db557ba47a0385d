"""
Result tables for sweeps, optimizer traces and figure data.
"""
import json
import logging
import os
from datetime import datetime

import numpy as np
import pandas as pd

import src

logger = logging.getLogger(__name__)


class ResultTable:
    """
    Labeled columns plus the metadata needed to rerun the experiment.
    """

    def __init__(self, frame, metadata=None):
        """
        Args:
            frame (DataFrame): One row per evaluation
            metadata (dict, optional): Spec, tolerances and anything else worth keeping
        """
        self.frame = frame.reset_index(drop=True)
        self.metadata = dict(metadata or {})
        self.metadata.setdefault('timestamp', datetime.now().isoformat())
        self.metadata.setdefault('version', src.__version__)

    @classmethod
    def from_rows(cls, rows, columns=None, metadata=None):
        frame = pd.DataFrame(list(rows), columns=columns)
        return cls(frame, metadata)

    @property
    def columns(self):
        return list(self.frame.columns)

    def column(self, name):
        if name not in self.frame.columns:
            raise KeyError(f'no column {name!r}; table has {self.columns}')
        return self.frame[name].to_numpy()

    def __len__(self):
        return len(self.frame)

    def equals(self, other):
        """Same columns and values; metadata (timestamps) is not compared."""
        return self.frame.equals(other.frame)

    def to_csv(self, path):
        os.makedirs(os.path.dirname(path) or '.', exist_ok=True)
        self.frame.to_csv(path, index=False)
        logger.info('Wrote %d rows to %s', len(self), path)
        return path

    def to_dict(self):
        records = self.frame.replace({np.nan: None}).to_dict(orient='list')
        return {'columns': records, 'metadata': self.metadata}

    def to_json(self, path):
        os.makedirs(os.path.dirname(path) or '.', exist_ok=True)
        with open(path, 'w') as f:
            json.dump(self.to_dict(), f, indent=2, default=_json_default)
        logger.info('Wrote %d rows to %s', len(self), path)
        return path

    def save(self, out_dir, name, fmt='csv'):
        """Write ``name.csv`` or ``name.json`` inside out_dir."""
        if fmt not in ('csv', 'json'):
            raise ValueError(f"format must be 'csv' or 'json', got {fmt!r}")
        path = os.path.join(out_dir, f'{name}.{fmt}')
        return self.to_csv(path) if fmt == 'csv' else self.to_json(path)


def _json_default(value):
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    return str(value)
