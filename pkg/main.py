#!/usr/bin/env python3
"""
main.py - framelab Root Entry Point

Runs the framelab command line from a source checkout without installing.

Usage:
    python main.py catalog list
    python main.py catalog verify two_atom
"""

import sys

__version__ = "1.0.0"
__author__ = "framelab developers"
__license__ = "MIT"

try:
    from framelab.cli import main
except ImportError as e:
    print(f"Error: Could not import framelab ({e})")
    print("\nPlease ensure the package is properly installed:")
    print("  pip install -e .")
    sys.exit(1)

if __name__ == "__main__":
    sys.exit(main())
