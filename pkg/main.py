#!/usr/bin/env python3
"""
Main Application Entry Point

This is the main entry point for the Gray Hole Guard simulator.
`python main.py serve` starts the HTTP API; see `python main.py --help`.
"""

import sys

from src.grayhole_guard.cli import main

if __name__ == "__main__":
    sys.exit(main())
