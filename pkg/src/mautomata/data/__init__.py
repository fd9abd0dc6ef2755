"""Bundled scenario, automaton and pushdown fixtures."""
from pathlib import Path

DATA_DIR = Path(__file__).parent


def path(name: str) -> Path:
    return DATA_DIR / name
