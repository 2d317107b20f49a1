#!/usr/bin/env python3
"""
Launcher for the semiclassical wave packet command line tool.

    python gwp.py simulate --config fixtures/quartic2d.json --out runs/quartic2d
    python gwp.py check --suite noether-reduced
    python gwp.py plot --in runs/quartic2d/trajectory.csv --cols q2 --x q1 --out orbit.svg
"""

import os
import sys

# Add the src directory to the Python path
project_root = os.path.dirname(os.path.abspath(__file__))
src_dir = os.path.join(project_root, "src")
if src_dir not in sys.path:
    sys.path.insert(0, src_dir)

from semiclassical.cli import main

if __name__ == "__main__":
    sys.exit(main())
