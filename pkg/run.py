#!/usr/bin/env python
"""
Run script for Summability Lab
Thin wrapper so `python run.py <command> ...` works from a checkout
"""

import sys

from app.main import main

if __name__ == "__main__":
    sys.exit(main())
