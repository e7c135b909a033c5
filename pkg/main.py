#!/usr/bin/env python3
"""Entry script for the MSGNN deraining tools."""

import sys

from app.cli import main

if __name__ == "__main__":
    sys.exit(main())
