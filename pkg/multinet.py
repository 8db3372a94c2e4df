#!/usr/bin/env python3
"""
MultiNet
Main entry point for running the command-line interface.
"""

from src.cli import main

if __name__ == '__main__':
    main()
