#!/usr/bin/env python3
"""Main entry point for the markov-interp package."""

from markov_interp.cli import main

if __name__ == "__main__":
    raise SystemExit(main())
