"""Recompute every reference row and print the comparison.

Usage: python scripts/reproduce_tables.py [--json]
"""

import sys

from prymweyl.cli import main

if __name__ == "__main__":
    sys.exit(main(["table", "--all-paper", *sys.argv[1:]]))
