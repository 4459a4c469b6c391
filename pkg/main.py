#!/usr/bin/env python3
"""
RobustLM - robust estimation of long memory under additive outliers
Main entry point
"""
import sys

from cli import main


if __name__ == "__main__":
    sys.exit(main())
