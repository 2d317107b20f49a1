#!/usr/bin/env python3

import os
import sys
import unittest

ROOT = os.path.dirname(os.path.abspath(__file__))

# Add the src directory to the path
sys.path.append(os.path.join(ROOT, 'src'))


def run_all_tests(pattern='test_*.py'):
    # Collect every tests/test_*.py module
    loader = unittest.TestLoader()
    test_suite = loader.discover(os.path.join(ROOT, 'tests'), pattern=pattern, top_level_dir=ROOT)

    # Run tests
    runner = unittest.TextTestRunner(verbosity=2)
    return runner.run(test_suite)


if __name__ == "__main__":
    pattern = sys.argv[1] if len(sys.argv) > 1 else 'test_*.py'
    result = run_all_tests(pattern)
    sys.exit(0 if result.wasSuccessful() else 1)
