#!/usr/bin/env python3
"""
fracstego - Main Application Entry Point
DCT-domain steganography with chaotic embedding positions.
"""

import sys

from core.cli import main


if __name__ == "__main__":
    sys.exit(main())
