#!/usr/bin/env python3
"""
SUSY Propagators Launch Script
Run with: python run.py <command> [--config data/scenarios/oscillator.toml]
"""

import sys


def check_dependencies() -> bool:
    try:
        import joblib  # noqa: F401
        import numpy  # noqa: F401
        import pandas  # noqa: F401
        import scipy  # noqa: F401
    except ImportError as e:
        print(f"❌ Missing dependency: {e}")
        print("Run: pip install -r requirements.txt")
        return False
    return True


def main():
    if not check_dependencies():
        return 2

    from cli.main import main as cli_main

    try:
        return cli_main()
    except KeyboardInterrupt:
        print("\n👋 Interrupted")
        return 130


if __name__ == "__main__":
    sys.exit(main())
