"""
Tests for run configuration parsing and result tables.
"""
import json
import math
import os
import sys
import tempfile
import unittest

import numpy as np

# Add the project root to the Python path
sys.path.insert(0, os.path.dirname(os.path.dirname(__file__)))

import src
from src.utils.config_parser import ConfigParser, RunConfig
from src.utils.errors import ConfigError
from src.utils.result_table import ResultTable


class ConfigParserTest(unittest.TestCase):
    """Test cases for ConfigParser."""

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.path = os.path.join(self.tmp.name, 'run.cfg')

    def tearDown(self):
        self.tmp.cleanup()

    def write(self, text):
        with open(self.path, 'w') as f:
            f.write(text)
        return self.path

    def test_read_file(self):
        values = ConfigParser.read_file(self.write(
            '# storage chain\n'
            'n = 2\n'
            '\n'
            'eta2 = 0.9   # lossy\n'
            'j = 0.5, 0.25\n'
            'format = json\n'))
        self.assertEqual(values, {'n': 2, 'eta2': 0.9, 'j': (0.5, 0.25), 'format': 'json'})

    def test_hash_inside_a_value_is_kept(self):
        values = ConfigParser.read_file(self.write(
            'out_dir = runs/#3   # third batch\n'
            '#gamma = 4\n'))
        self.assertEqual(values, {'out_dir': 'runs/#3'})

    def test_errors_name_the_key(self):
        for text, key in (('colour = red\n', 'colour'), ('gamma = fast\n', 'gamma'),
                          ('plot = png\n', 'plot'), ('just text\n', 'config')):
            with self.assertRaises(ConfigError) as ctx:
                ConfigParser.read_file(self.write(text))
            self.assertEqual(ctx.exception.key, key)
        with self.assertRaises(ConfigError):
            ConfigParser.read_file(os.path.join(self.tmp.name, 'missing.cfg'))

    def test_flags_win_over_file(self):
        config = ConfigParser.build({'gamma': 2.0, 'n': 2}, {'gamma': 3.0, 'omega_a': None})
        self.assertEqual(config.gamma, 3.0)
        self.assertEqual(config.n, 2)
        self.assertEqual(config.omega_a, 1.0)

    def test_validation(self):
        for overrides, key in (({'eta2': 1.5}, 'eta2'), ({'tol': 0.0}, 'tol'), ({'threads': 0}, 'threads'),
                               ({'n': 0}, 'n'), ({'n': 2, 'j': (1.0, 2.0)}, 'j')):
            with self.assertRaises(ConfigError) as ctx:
                ConfigParser.build(overrides=overrides)
            self.assertEqual(ctx.exception.key, key)

    def test_dump_round_trip(self):
        config = ConfigParser.build(overrides={'n': 3, 'gamma': 0.1 + 0.2, 'eta2': 0.9, 'j': (0.3, 1 / 3),
                                               't1_us': 100.0, 'out_dir': 'results'})
        again = ConfigParser.build(ConfigParser.read_file(self.write(ConfigParser.dump(config))))
        self.assertEqual(again, config)

    def test_chain_spec_units(self):
        spec = ConfigParser.to_chain_spec(ConfigParser.build(overrides={'n': 2, 'eta2': 0.81}))
        self.assertEqual(spec.j, (1.0,))
        self.assertAlmostEqual(spec.eta, 0.9)
        self.assertIsNone(spec.t1)
        spec = ConfigParser.to_chain_spec(ConfigParser.build(overrides={'gamma': 1.0, 't1_us': 100.0}))
        self.assertAlmostEqual(spec.gamma, 2 * math.pi)
        self.assertEqual(spec.t1, 100.0)
        self.assertTrue(RunConfig(t1_us=100.0).absolute_units)


class ResultTableTest(unittest.TestCase):
    """Test cases for ResultTable serialization."""

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.table = ResultTable.from_rows(
            [{'omega': 0.5, 'concurrence': 0.33}, {'omega': 1.0, 'concurrence': np.nan}],
            metadata={'eta2': 0.9})

    def tearDown(self):
        self.tmp.cleanup()

    def test_metadata_defaults(self):
        self.assertEqual(self.table.metadata['version'], src.__version__)
        self.assertIn('timestamp', self.table.metadata)
        self.assertEqual(self.table.columns, ['omega', 'concurrence'])
        with self.assertRaises(KeyError):
            self.table.column('gap')

    def test_csv_and_json(self):
        csv_path = self.table.save(os.path.join(self.tmp.name, 'out'), 'sweep', 'csv')
        with open(csv_path) as f:
            self.assertEqual(f.readline().strip(), 'omega,concurrence')
        json_path = self.table.save(os.path.join(self.tmp.name, 'out'), 'sweep', 'json')
        with open(json_path) as f:
            data = json.load(f)
        self.assertEqual(data['columns']['omega'], [0.5, 1.0])
        self.assertIsNone(data['columns']['concurrence'][1])
        self.assertEqual(data['metadata']['eta2'], 0.9)
        with self.assertRaises(ValueError):
            self.table.save(self.tmp.name, 'sweep', 'xlsx')


if __name__ == '__main__':
    unittest.main()
