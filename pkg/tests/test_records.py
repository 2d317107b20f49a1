import os
import sys
import unittest

import numpy as np

# Add the src directory to the path
sys.path.append(os.path.join(os.path.dirname(os.path.dirname(__file__)), 'src'))

from semiclassical.records import InvariantSeries, TrajectoryRecord


class TestInvariantSeries(unittest.TestCase):
    def test_append_and_reference(self):
        """The first value is the reference"""
        series = InvariantSeries("J")
        series.append(0.0, [1.0, 2.0])
        series.append(0.5, [1.5, 2.5])
        self.assertEqual(len(series), 2)
        np.testing.assert_array_equal(series.reference, [1.0, 2.0])
        self.assertEqual(series.as_array().shape, (2, 2))

    def test_times_strictly_increase(self):
        """Repeated or earlier times are refused"""
        series = InvariantSeries("H")
        series.append(1.0, 0.0)
        with self.assertRaises(ValueError):
            series.append(1.0, 0.0)
        with self.assertRaises(ValueError):
            series.append(0.5, 0.0)

    def test_empty_reference(self):
        """An empty series has no reference"""
        with self.assertRaises(ValueError):
            InvariantSeries("empty").reference

    def test_values_are_copied(self):
        """Later changes to an appended array do not leak into the series"""
        value = np.zeros(2)
        series = InvariantSeries("v")
        series.append(0.0, value)
        value[0] = 5.0
        self.assertEqual(series.values[0][0], 0.0)


class TestTrajectoryRecord(unittest.TestCase):
    def test_lookup(self):
        """Series are reached by name"""
        record = TrajectoryRecord(series={"H1": InvariantSeries("H1")})
        record.times.append(0.0)
        record.states.append(None)
        self.assertEqual(len(record), 1)
        self.assertEqual(record["H1"].name, "H1")
        with self.assertRaises(KeyError):
            record["J0"]


if __name__ == '__main__':
    unittest.main()
